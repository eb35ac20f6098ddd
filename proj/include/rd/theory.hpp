#pragma once

#include <functional>

#include "rd/equations.hpp"

namespace rd {

// max_k g_k / (1 + h_t (a g_k l_k + b c g_k)) over the mode set, plus the
// resulting sigma bound theta = b T Lip(R) zeta and the closed-form
// theta_tilde (NaN when no closed form applies; surrogate=true when the
// preconditioner symbols stand in for a non-spectral operator).
struct ZetaTheta {
    double zeta = 0.0;
    double theta = 0.0;
    double theta_tilde = 0.0;
    bool surrogate = false;
};

ZetaTheta zeta_theta(const RDModel& model, double ht, int nt);

struct SigmaKappa {
    double sigma_lo, sigma_hi, kappa;
};

// (1 - theta, 1 + theta, (1+theta)/(1-theta)); requires theta in [0,1).
SigmaKappa sigma_kappa(double theta);

// phi(z) = (gamma z + mu eps - sqrt((gamma z - mu eps)^2
//          + (mu - (1-gamma eps) z)^2)) / 2, minimized over
// [sigma_lo^2, sigma_hi^2] by dense sampling plus golden-section refinement.
struct VarphiBeta {
    std::function<double(double)> phi;
    double beta = 0.0;
    bool conditions_ok = false; // decay-lemma hypotheses on (mu, gamma, eps)
};

VarphiBeta varphi_beta(double mu, double gamma, double epsilon, double sigma_lo,
                       double sigma_hi);

struct FlowParamsPair {
    double gamma, epsilon;
};

// gamma = (1-delta)/kappa, eps = (1-delta) kappa; requires |delta| < 1/kappa.
FlowParamsPair continuous_params(double kappa, double delta);
// eps = kappa - 1/2, gamma = 1/kappa - 1/(2 kappa^2)
FlowParamsPair special_params(double kappa);

// decay-exponent lower bound (1 - kappa|delta|)(3 - delta) min{sigma_lo^2,1}
// / (8 kappa) for the continuous_params configuration
double continuous_rate_bound(double kappa, double delta, double sigma_lo);

// (5/32)(1-theta)^3/(1+theta)
double rate_bound(double theta);

struct GammaLambda {
    double gamma, lambda;
};

// optimal gamma under gamma*eps = 1 for a unit-interval spectrum
// [sigma_n, sigma_1]: r = (s1^2 - sn^2)/(s1^2 + sn^2),
// gamma = (-r/2 + sqrt(r^2/4 + 4 sn^2)) / (2 sn^2), lambda = gamma sn^2.
GammaLambda optimal_gamma_unit(double sigma1, double sigma_n);

// Psi(theta) = 1 - 2 theta - theta^2
double psi(double theta);
// Omega(v, rho, theta) = |1 - v - rho| + (|1 - v| + rho) theta
double omega_fn(double v, double rho, double theta);

// step sizes and convergence constant for arbitrary (gamma_tilde, rho, eps);
// the extrapolation coefficient is left to the caller (gamma_tilde = omega
// tau_p relates them)
struct GeneralStep {
    double tau_p, tau_u, phi;
};

GeneralStep general_hyperparams(double theta, double gamma_tilde, double rho,
                                double epsilon);

// one-parameter family: gamma_tilde = sqrt(u(1-u)), rho = 1-u,
// eps = sqrt(u/(1-u)); requires theta in [0, sqrt(2)-1),
// u in (theta^2/(1-2 theta), 1)
struct DiscreteParams {
    double u, tau_p, tau_u, omega, epsilon, phi;
};

DiscreteParams discrete_hyperparams(double theta, double u);

// per-iteration contraction 2/(Phi + sqrt(Phi^2 + 4)) of the J_k recursion
double contraction_factor(double phi);

// unique-existence step limit: 1/(2b) for G=I models, a^2/b^2 for
// Cahn-Hilliard, per-mode 1/(g (2b - a l)) minimum for the general case;
// infinity when unconstrained (e.g. b=0)
double existence_ht_max(const RDModel& model);

struct TheoryReport {
    double zeta, theta, theta_tilde;
    double sigma_lo, sigma_hi, kappa;
    double flow_rate_bound;
    double ht_max_existence;
    bool surrogate;
};

TheoryReport theory_report(const RDModel& model, double ht, int nt);

} // namespace rd
