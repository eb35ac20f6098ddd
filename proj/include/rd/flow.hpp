#pragma once

#include <vector>

#include "rd/precond.hpp"
#include "rd/system.hpp"

namespace rd {

struct FlowParams {
    double gamma = 1.0;   // damping weight on Fhat in the u-equation
    double epsilon = 1.0; // quadratic regularization of q
    double dt = 0.01;     // fixed RK4 step
    double t_end = 1.0;
    double mu = 1.0; // Lyapunov weight
};

struct FlowRhs {
    SpaceTimeVec du, dq;
};

// dq/dt = -eps q + Fhat(u); du/dt = -DFhat(u)^T (q + gamma dq/dt)
//       = -DFhat(u)^T ((1 - gamma eps) q + gamma Fhat(u)),
// with Fhat = M^{-1} F and DFhat^T = DF^T o M^{-T}.
FlowRhs flow_rhs(const WindowProblem& prob, const Precond& pc,
                 const SpaceTimeVec& u, const SpaceTimeVec& q, double gamma,
                 double epsilon);

// (1/2)||Fhat(u)||_2^2 + (mu/2)||q||_2^2
double lyapunov_value(const WindowProblem& prob, const Precond& pc,
                      const SpaceTimeVec& u, const SpaceTimeVec& q, double mu);

struct FlowSample {
    double t, fhat_l2, lyapunov;
};

struct FlowResult {
    std::vector<FlowSample> trajectory;
    bool diverged = false;
};

// Classical fixed-step RK4 on the (u, q) pair; samples every step including
// t = 0. Stops early (diverged = true) when the state blows up.
FlowResult integrate_flow(const WindowProblem& prob, const Precond& pc,
                          const FlowParams& fp, const SpaceTimeVec& u0,
                          const SpaceTimeVec& q0);

// Fixed-step stability heuristic: dt (gamma sigma_hi^2 + epsilon) <= 0.2.
bool flow_dt_stable(const FlowParams& fp, double sigma_hi);

// Exponential rate of ||Fhat||_2: least-squares slope of log ||Fhat|| vs t
// over the final 80% of the trajectory (the first 20% absorbs transients).
// Returns r with ||Fhat(t)|| ~ C exp(-r t).
double fit_decay_rate(const std::vector<FlowSample>& trajectory);

} // namespace rd
