#pragma once

#include <functional>
#include <vector>

#include "rd/equations.hpp"

namespace rd {

struct KrylovParams {
    double eta = 1e-10; // infinity-norm residual tolerance
    int max_iter = 1000;
};

struct PcgStats {
    int iterations = 0;
    double res_inf = 0.0;
};

using LinearApply = std::function<void(const Field&, Field&)>;

// Preconditioned conjugate gradient from x0 = 0; exits once
// ||A x - rhs||_inf <= kp.eta (verified against a freshly computed
// residual). Throws solve_error on breakdown or non-convergence.
Field pcg_solve(const LinearApply& apply_A, const LinearApply& apply_Pinv,
                const Field& rhs, const KrylovParams& kp,
                PcgStats* stats = nullptr);

// Residual of one implicit step:
// ||U - u_t + ht G(a L U + b f(U))||_inf.
double step_residual_inf(const RDModel& model, const Field& u_t,
                         const Field& u_next, double ht);

// Linear-implicit / nonlinear-explicit step:
// u^{t+1} = (I + a ht G L)^{-1} (u^t - b ht G f(u^t)).
// Direct spectral solve when L is diagonalizable; otherwise PCG with the
// spectral-surrogate preconditioner.
Field imex_step(const RDModel& model, const Field& u_t, double ht);

// U_{k+1} = (I + ht G(a L + b c I))^{-1} (u^t - b ht G(f(U_k) - c U_k))
// from U_0 = u^t until the step residual drops below tol.
Field fixed_point_solve(const RDModel& model, const Field& u_t, double ht,
                        double tol, int max_iter, int* iters = nullptr);

// Lexicographic Gauss-Seidel sweeps for G = I models with a 5-point
// diffusion stencil; each nodal equation is solved by a scalar Newton
// iteration (tolerance 1e-10, at most 50 steps) and relaxed by omega_sor.
Field nonlinear_sor_solve(const RDModel& model, const Field& u_t, double ht,
                          double omega_sor, double tol, int* sweeps = nullptr);

// Newton's method on the single-step system with PCG as the linear solver:
// J = I + ht G(a L + b diag(f'(U))); symmetric (G = I) models solve J
// directly, the rest go through the normal equations J^T J s = -J^T Res
// preconditioned by the squared block inverse.
Field newton_solve(const RDModel& model, const Field& u_t, double ht,
                   const KrylovParams& kp, double tol,
                   std::vector<double>* residuals = nullptr);

} // namespace rd
