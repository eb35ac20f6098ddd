#include "rd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rd/errors.hpp"

namespace rd {

namespace {

// Golden-section refinement of a minimum inside [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > 1e-10) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return f(0.5 * (a + b));
}

} // namespace

ZetaTheta zeta_theta(const RDModel& model, double ht, int nt) {
    if (ht <= 0.0 || nt < 1)
        throw domain_error("zeta_theta requires ht > 0 and nt >= 1");
    const SpectralDiag& g = spectral_symbol(model.g_op);
    const bool surrogate = !is_spectral(model.l_op);
    const SpectralDiag& l = surrogate ? model.l_precond : spectral_symbol(model.l_op);

    const int n = g.nx;
    const double a = model.a, b = model.b, c = model.reaction.c;
    double zeta = 0.0;
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
            const double gk = g.m[static_cast<std::size_t>(k) * n + m];
            const double lk = l.m[static_cast<std::size_t>(k) * n + m];
            zeta = std::max(zeta, gk / (1.0 + ht * (a * gk * lk + b * c * gk)));
        }

    ZetaTheta out;
    out.zeta = zeta;
    out.surrogate = surrogate;
    const double T = nt * ht;
    const double lip = model.reaction.lip_r;
    out.theta = b * T * lip * zeta;
    switch (model.kind) {
    case ModelKind::allen_cahn:
    case ModelKind::var_coeff: // G = I
        out.theta_tilde = b * lip * T;
        break;
    case ModelKind::cahn_hilliard: // G = L
        out.theta_tilde = b * lip * T / (2.0 * std::sqrt(a * ht) + b * c * ht);
        break;
    default:
        out.theta_tilde = std::numeric_limits<double>::quiet_NaN();
        break;
    }
    return out;
}

SigmaKappa sigma_kappa(double theta) {
    if (!(theta >= 0.0 && theta < 1.0))
        throw domain_error("sigma_kappa requires theta in [0,1)");
    return {1.0 - theta, 1.0 + theta, (1.0 + theta) / (1.0 - theta)};
}

VarphiBeta varphi_beta(double mu, double gamma, double epsilon, double sigma_lo,
                       double sigma_hi) {
    if (!(sigma_lo > 0.0) || !(sigma_hi >= sigma_lo))
        throw domain_error("varphi_beta requires 0 < sigma_lo <= sigma_hi");

    VarphiBeta out;
    out.phi = [mu, gamma, epsilon](double z) {
        const double p = gamma * z - mu * epsilon;
        const double q = mu - (1.0 - gamma * epsilon) * z;
        return 0.5 * (gamma * z + mu * epsilon - std::sqrt(p * p + q * q));
    };

    if (mu > 0.0) {
        const double rt = std::sqrt(mu);
        const double ge = gamma * epsilon;
        const double lo = std::max((1.0 - rt / sigma_hi) * (1.0 - rt / sigma_hi),
                                   (1.0 - rt / sigma_lo) * (1.0 - rt / sigma_lo));
        const double hi = (1.0 + rt / sigma_hi) * (1.0 + rt / sigma_hi);
        out.conditions_ok =
            (1.0 / sigma_lo - 1.0 / sigma_hi < 2.0 / rt) && lo < ge && ge < hi;
    }

    const double zlo = sigma_lo * sigma_lo;
    const double zhi = sigma_hi * sigma_hi;
    constexpr int samples = 10000;
    double best = out.phi(zlo);
    int best_i = 0;
    for (int i = 1; i < samples; ++i) {
        const double z = zlo + (zhi - zlo) * i / (samples - 1);
        const double v = out.phi(z);
        if (v < best) {
            best = v;
            best_i = i;
        }
    }
    const double step = (zhi - zlo) / (samples - 1);
    const double bl = std::max(zlo, zlo + (best_i - 1) * step);
    const double br = std::min(zhi, zlo + (best_i + 1) * step);
    out.beta = std::min(best, golden_min(out.phi, bl, br));
    return out;
}

FlowParamsPair continuous_params(double kappa, double delta) {
    if (!(kappa >= 1.0))
        throw domain_error("continuous_params requires kappa >= 1");
    if (!(std::abs(delta) < 1.0 / kappa))
        throw domain_error("continuous_params requires |delta| < 1/kappa");
    return {(1.0 - delta) / kappa, (1.0 - delta) * kappa};
}

FlowParamsPair special_params(double kappa) {
    if (!(kappa >= 1.0))
        throw domain_error("special_params requires kappa >= 1");
    return {1.0 / kappa - 1.0 / (2.0 * kappa * kappa), kappa - 0.5};
}

double continuous_rate_bound(double kappa, double delta, double sigma_lo) {
    if (!(kappa >= 1.0) || !(std::abs(delta) < 1.0 / kappa))
        throw domain_error("continuous_rate_bound requires kappa >= 1 and |delta| < 1/kappa");
    return (1.0 - kappa * std::abs(delta)) * (3.0 - delta) *
           std::min(sigma_lo * sigma_lo, 1.0) / (8.0 * kappa);
}

double rate_bound(double theta) {
    if (!(theta >= 0.0 && theta < 1.0))
        throw domain_error("rate_bound requires theta in [0,1)");
    const double s = 1.0 - theta;
    return (5.0 / 32.0) * s * s * s / (1.0 + theta);
}

GammaLambda optimal_gamma_unit(double sigma1, double sigma_n) {
    if (!(sigma_n > 0.0) || !(sigma1 >= sigma_n))
        throw domain_error("optimal_gamma_unit requires 0 < sigma_n <= sigma1");
    const double s1 = sigma1 * sigma1, sn = sigma_n * sigma_n;
    const double r = (s1 - sn) / (s1 + sn);
    const double gamma = (-r / 2.0 + std::sqrt(r * r / 4.0 + 4.0 * sn)) / (2.0 * sn);
    return {gamma, gamma * sn};
}

double psi(double theta) { return 1.0 - 2.0 * theta - theta * theta; }

double omega_fn(double v, double rho, double theta) {
    return std::abs(1.0 - v - rho) + (std::abs(1.0 - v) + rho) * theta;
}

GeneralStep general_hyperparams(double theta, double gamma_tilde, double rho,
                                double epsilon) {
    if (!(theta >= 0.0 && theta < 1.0))
        throw domain_error("general_hyperparams requires theta in [0,1)");
    if (!(gamma_tilde > 0.0) || !(rho > 0.0) || !(epsilon > 0.0))
        throw domain_error("general_hyperparams requires positive gamma_tilde, rho, epsilon");
    const double v = gamma_tilde * epsilon;
    const double om = omega_fn(v, rho, theta);
    const double num = rho * v * psi(theta) - 0.25 * om * om;
    if (!(num > 0.0))
        throw domain_error("general_hyperparams: step-size numerator not positive");
    const double op = 1.0 + theta;
    const double big = std::max(gamma_tilde * gamma_tilde * op * op,
                                (1.0 - v) * (1.0 - v));
    GeneralStep out;
    out.tau_p = num / (4.0 * (gamma_tilde + rho * epsilon) * op * op * big);
    out.tau_u = out.tau_p / rho;
    const double sum = gamma_tilde + rho * epsilon;
    out.phi = num * num / (2.0 * op * op * big * sum * sum);
    return out;
}

DiscreteParams discrete_hyperparams(double theta, double u) {
    const double lim = std::sqrt(2.0) - 1.0;
    if (!(theta >= 0.0 && theta < lim))
        throw domain_error("discrete_hyperparams requires theta in [0, sqrt(2)-1)");
    const double ulo = theta * theta / (1.0 - 2.0 * theta);
    if (!(u > ulo && u < 1.0))
        throw domain_error("discrete_hyperparams requires u in (theta^2/(1-2 theta), 1)");

    const double op = 1.0 + theta;
    DiscreteParams out;
    out.u = u;
    out.tau_p = (u * (1.0 - 2.0 * theta) - theta * theta) /
                (8.0 * std::sqrt(u * (1.0 - u)) * op * op *
                 std::max(u * op * op, 1.0 - u));
    out.tau_u = out.tau_p / (1.0 - u);
    out.omega = std::sqrt(u * (1.0 - u)) / out.tau_u;
    out.epsilon = std::sqrt(u / (1.0 - u));
    const double q = 1.0 - theta * theta / ((1.0 - 2.0 * theta) * u);
    out.phi = (1.0 - 2.0 * theta) * (1.0 - 2.0 * theta) / (8.0 * op * op) * q * q /
              std::max(op * op, (1.0 - u) / u);
    return out;
}

double contraction_factor(double phi) {
    if (!(phi >= 0.0))
        throw domain_error("contraction_factor requires phi >= 0");
    return 2.0 / (phi + std::sqrt(phi * phi + 4.0));
}

double existence_ht_max(const RDModel& model) {
    const double inf = std::numeric_limits<double>::infinity();
    const double a = model.a, b = model.b;
    const double lip = model.reaction.lip_phi;
    if (b == 0.0)
        return inf;
    switch (model.kind) {
    case ModelKind::allen_cahn:
    case ModelKind::var_coeff:
        return 1.0 / (lip * b);
    case ModelKind::cahn_hilliard:
        return a * a / (b * b);
    default:
        break;
    }
    const SpectralDiag& g = spectral_symbol(model.g_op);
    const SpectralDiag& l =
        is_spectral(model.l_op) ? spectral_symbol(model.l_op) : model.l_precond;
    const int n = g.nx;
    double ht_max = inf;
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
            const double gk = g.m[static_cast<std::size_t>(k) * n + m];
            const double slack = lip * b - a * l.m[static_cast<std::size_t>(k) * n + m];
            if (gk > 0.0 && slack > 0.0)
                ht_max = std::min(ht_max, 1.0 / (gk * slack));
        }
    return ht_max;
}

TheoryReport theory_report(const RDModel& model, double ht, int nt) {
    const ZetaTheta zt = zeta_theta(model, ht, nt);
    const SigmaKappa sk = sigma_kappa(zt.theta);
    TheoryReport rep;
    rep.zeta = zt.zeta;
    rep.theta = zt.theta;
    rep.theta_tilde = zt.theta_tilde;
    rep.sigma_lo = sk.sigma_lo;
    rep.sigma_hi = sk.sigma_hi;
    rep.kappa = sk.kappa;
    rep.flow_rate_bound = rate_bound(zt.theta);
    rep.ht_max_existence = existence_ht_max(model);
    rep.surrogate = zt.surrogate;
    return rep;
}

} // namespace rd
