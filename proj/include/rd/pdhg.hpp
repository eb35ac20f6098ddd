#pragma once

#include <utility>
#include <vector>

#include "rd/precond.hpp"
#include "rd/system.hpp"

namespace rd {

struct PdhgParams {
    double tau_u = 0.5;
    double tau_p = 0.95;
    double omega = 1.0;
    double epsilon = 0.1;
    double tol = 1e-6;      // on ||F||_inf / h_t
    int max_iter = 10000;
    bool preconditioned = true;
};

struct PdhgState {
    SpaceTimeVec u;
    SpaceTimeVec q; // dual variable
    int iter = 0;
};

struct ResSample {
    double res_inf;  // ||F(U_k)||_inf / h_t
    double fhat_l2;  // ||M^-1 F(U_k)||_2 (||F||_2 when unpreconditioned)
};

struct SolveStats {
    int iterations = 0;
    std::vector<ResSample> residual_history; // length iterations + 1
    bool converged = false;
    bool diverged = false;
    double wall_time = 0.0;
};

// abort threshold for the divergence guard
inline constexpr double divergence_limit = 1e12;

// u0 replicated across blocks, zero dual.
PdhgState warm_start(const WindowProblem& prob);

// One iteration:
//   Q_{k+1} = (Q_k + tau_P M^-1 F(U_k)) / (1 + eps tau_P)
//   Qt      = Q_{k+1} + omega (Q_{k+1} - Q_k)
//   U_{k+1} = U_k - tau_U DF(U_k)^T M^-T Qt
// with M = I when params.preconditioned is false.  Throws solve_error on a
// non-finite iterate.
PdhgState pdhg_step(const WindowProblem& prob, const Precond& pc, const PdhgState& state,
                    const PdhgParams& params);

// Iterates until ||F||_inf / h_t < tol or max_iter; divergence is reported
// through the stats, never thrown.
std::pair<SpaceTimeVec, SolveStats> solve_window(const WindowProblem& prob,
                                                 const Precond& pc,
                                                 const PdhgParams& params,
                                                 const SpaceTimeVec& u_init,
                                                 const SpaceTimeVec& q_init);
std::pair<SpaceTimeVec, SolveStats> solve_window(const WindowProblem& prob,
                                                 const Precond& pc,
                                                 const PdhgParams& params);

// G-prox form with G = M M^T; state.q holds P.  Exposed to test the
// equivalence Q_k = M^T P_k.
PdhgState gprox_step(const WindowProblem& prob, const Precond& pc, const PdhgState& state,
                     const PdhgParams& params);

// r_k = -log10(f_{k+1}/f_k); r_bar averages the first `prefix` rates (or all
// if fewer).  Throws domain_error on non-positive values.
struct RateSeries {
    std::vector<double> r;
    double r_bar = 0.0;
};

RateSeries rate_series(const std::vector<double>& fhat_history, std::size_t prefix = 500);

} // namespace rd
