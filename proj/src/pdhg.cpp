#include "rd/pdhg.hpp"

#include <chrono>
#include <cmath>

#include "rd/errors.hpp"

namespace rd {

namespace {

// Shared tail of pdhg_step once F-hat = M^-1 F(U_k) (or F itself) is known.
PdhgState step_from_fhat(const WindowProblem& prob, const Precond& pc,
                         const PdhgState& state, const PdhgParams& params,
                         const SpaceTimeVec& fhat) {
    const double denom = 1.0 + params.epsilon * params.tau_p;
    PdhgState next;
    next.iter = state.iter + 1;
    next.q = lincomb(1.0 / denom, state.q, params.tau_p / denom, fhat);
    SpaceTimeVec qt = lincomb(1.0 + params.omega, next.q, -params.omega, state.q);
    SpaceTimeVec w =
        params.preconditioned ? apply_M_inverse_transpose(pc, qt) : std::move(qt);
    SpaceTimeVec du = apply_DF_transpose(prob, state.u, w);
    next.u = lincomb(1.0, state.u, -params.tau_u, du);
    if (!all_finite(next.u) || !all_finite(next.q))
        throw solve_error("pdhg produced a non-finite iterate");
    return next;
}

} // namespace

PdhgState warm_start(const WindowProblem& prob) {
    PdhgState s;
    s.u = SpaceTimeVec::replicate(prob.nt, prob.ht, prob.u0);
    s.q = SpaceTimeVec::zeros(prob.nt, prob.ht, prob.u0.nx);
    s.iter = 0;
    return s;
}

PdhgState pdhg_step(const WindowProblem& prob, const Precond& pc, const PdhgState& state,
                    const PdhgParams& params) {
    SpaceTimeVec f = eval_F(prob, state.u);
    SpaceTimeVec fhat = params.preconditioned ? apply_M_inverse(pc, f) : std::move(f);
    return step_from_fhat(prob, pc, state, params, fhat);
}

std::pair<SpaceTimeVec, SolveStats> solve_window(const WindowProblem& prob,
                                                 const Precond& pc,
                                                 const PdhgParams& params,
                                                 const SpaceTimeVec& u_init,
                                                 const SpaceTimeVec& q_init) {
    const auto t0 = std::chrono::steady_clock::now();
    PdhgState state{u_init, q_init, 0};
    SolveStats stats;
    try {
        for (;;) {
            SpaceTimeVec f = eval_F(prob, state.u);
            const double res = norm_inf(f) / prob.ht;
            SpaceTimeVec fhat =
                params.preconditioned ? apply_M_inverse(pc, f) : std::move(f);
            stats.residual_history.push_back({res, norm_l2(fhat)});
            if (!std::isfinite(res) || res > divergence_limit) {
                stats.diverged = true;
                break;
            }
            if (res < params.tol) {
                stats.converged = true;
                break;
            }
            if (state.iter >= params.max_iter) break;
            state = step_from_fhat(prob, pc, state, params, fhat);
        }
    } catch (const solve_error&) {
        stats.diverged = true;
    }
    stats.iterations = state.iter;
    stats.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(state.u), std::move(stats)};
}

std::pair<SpaceTimeVec, SolveStats> solve_window(const WindowProblem& prob,
                                                 const Precond& pc,
                                                 const PdhgParams& params) {
    PdhgState s = warm_start(prob);
    return solve_window(prob, pc, params, s.u, s.q);
}

PdhgState gprox_step(const WindowProblem& prob, const Precond& pc, const PdhgState& state,
                     const PdhgParams& params) {
    const double denom = 1.0 + params.epsilon * params.tau_p;
    SpaceTimeVec f = eval_F(prob, state.u);
    SpaceTimeVec ghat = apply_M_inverse_transpose(pc, apply_M_inverse(pc, f));
    PdhgState next;
    next.iter = state.iter + 1;
    next.q = lincomb(1.0 / denom, state.q, params.tau_p / denom, ghat);
    SpaceTimeVec pt = lincomb(1.0 + params.omega, next.q, -params.omega, state.q);
    SpaceTimeVec du = apply_DF_transpose(prob, state.u, pt);
    next.u = lincomb(1.0, state.u, -params.tau_u, du);
    if (!all_finite(next.u) || !all_finite(next.q))
        throw solve_error("g-prox produced a non-finite iterate");
    return next;
}

RateSeries rate_series(const std::vector<double>& fhat_history, std::size_t prefix) {
    RateSeries out;
    for (double v : fhat_history)
        if (!(v > 0.0)) throw domain_error("rate_series requires positive norms");
    if (fhat_history.size() < 2) return out;
    out.r.reserve(fhat_history.size() - 1);
    for (std::size_t k = 0; k + 1 < fhat_history.size(); ++k)
        out.r.push_back(-std::log10(fhat_history[k + 1] / fhat_history[k]));
    const std::size_t n = std::min(prefix, out.r.size());
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += out.r[k];
    out.r_bar = n ? s / static_cast<double>(n) : 0.0;
    return out;
}

} // namespace rd
