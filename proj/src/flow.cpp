#include "rd/flow.hpp"

#include <cmath>

#include "rd/errors.hpp"

namespace rd {

namespace {
constexpr double blowup_limit = 1e12;
} // namespace

FlowRhs flow_rhs(const WindowProblem& prob, const Precond& pc,
                 const SpaceTimeVec& u, const SpaceTimeVec& q, double gamma,
                 double epsilon) {
    const SpaceTimeVec fhat = apply_M_inverse(pc, eval_F(prob, u));
    FlowRhs out{SpaceTimeVec::zeros(u.nt, u.ht, u.nx()),
                lincomb(-epsilon, q, 1.0, fhat)};
    const SpaceTimeVec w =
        apply_M_inverse_transpose(pc, lincomb(1.0 - gamma * epsilon, q, gamma, fhat));
    apply_DF_transpose(prob, u, w, out.du);
    scale(out.du, -1.0);
    return out;
}

double lyapunov_value(const WindowProblem& prob, const Precond& pc,
                      const SpaceTimeVec& u, const SpaceTimeVec& q, double mu) {
    const double f = norm_l2(apply_M_inverse(pc, eval_F(prob, u)));
    const double qn = norm_l2(q);
    return 0.5 * f * f + 0.5 * mu * qn * qn;
}

FlowResult integrate_flow(const WindowProblem& prob, const Precond& pc,
                          const FlowParams& fp, const SpaceTimeVec& u0,
                          const SpaceTimeVec& q0) {
    if (fp.dt <= 0.0 || fp.t_end <= 0.0)
        throw domain_error("integrate_flow requires positive dt and t_end");
    const long steps = std::max<long>(1, std::lround(fp.t_end / fp.dt));

    FlowResult out;
    out.trajectory.reserve(steps + 1);
    SpaceTimeVec u = u0, q = q0;

    for (long s = 0;; ++s) {
        const SpaceTimeVec fhat = apply_M_inverse(pc, eval_F(prob, u));
        const double fn = norm_l2(fhat);
        const double qn = norm_l2(q);
        if (!std::isfinite(fn) || !std::isfinite(qn) || fn > blowup_limit ||
            qn > blowup_limit) {
            out.diverged = true;
            break;
        }
        out.trajectory.push_back(
            {s * fp.dt, fn, 0.5 * fn * fn + 0.5 * fp.mu * qn * qn});
        if (s == steps) break;

        const double h = fp.dt;
        const FlowRhs k1 = flow_rhs(prob, pc, u, q, fp.gamma, fp.epsilon);
        const FlowRhs k2 =
            flow_rhs(prob, pc, lincomb(1.0, u, 0.5 * h, k1.du),
                     lincomb(1.0, q, 0.5 * h, k1.dq), fp.gamma, fp.epsilon);
        const FlowRhs k3 =
            flow_rhs(prob, pc, lincomb(1.0, u, 0.5 * h, k2.du),
                     lincomb(1.0, q, 0.5 * h, k2.dq), fp.gamma, fp.epsilon);
        const FlowRhs k4 = flow_rhs(prob, pc, lincomb(1.0, u, h, k3.du),
                                    lincomb(1.0, q, h, k3.dq), fp.gamma, fp.epsilon);
        add_scaled(u, k1.du, h / 6.0);
        add_scaled(u, k2.du, h / 3.0);
        add_scaled(u, k3.du, h / 3.0);
        add_scaled(u, k4.du, h / 6.0);
        add_scaled(q, k1.dq, h / 6.0);
        add_scaled(q, k2.dq, h / 3.0);
        add_scaled(q, k3.dq, h / 3.0);
        add_scaled(q, k4.dq, h / 6.0);
    }
    return out;
}

bool flow_dt_stable(const FlowParams& fp, double sigma_hi) {
    return fp.dt * (fp.gamma * sigma_hi * sigma_hi + fp.epsilon) <= 0.2;
}

double fit_decay_rate(const std::vector<FlowSample>& trajectory) {
    if (trajectory.size() < 3)
        throw domain_error("fit_decay_rate needs at least 3 samples");
    const double t0 = trajectory.front().t;
    const double cut = t0 + 0.2 * (trajectory.back().t - t0);

    double st = 0, sy = 0, stt = 0, sty = 0;
    long n = 0;
    for (const FlowSample& s : trajectory) {
        if (s.t < cut) continue;
        if (!(s.fhat_l2 > 0.0))
            throw domain_error("fit_decay_rate requires positive norms");
        const double y = std::log(s.fhat_l2);
        st += s.t;
        sy += y;
        stt += s.t * s.t;
        sty += s.t * y;
        ++n;
    }
    if (n < 2) throw domain_error("fit_decay_rate: window too short");
    const double denom = n * stt - st * st;
    if (denom == 0.0) throw domain_error("fit_decay_rate: degenerate abscissae");
    return -(n * sty - st * sy) / denom;
}

} // namespace rd
