#pragma once

#include "rd/equations.hpp"
#include "rd/field.hpp"

namespace rd {

// One window of n_t implicit steps written as the root-finding system
// F(U) = D U + h_t G(a L U + b f(U)) - V = 0, with V carrying the window's
// initial state in its first block.
struct WindowProblem {
    const RDModel* model = nullptr;
    Field u0;
    int nt = 1;
    double ht = 0.0;
    SpaceTimeVec v;
};

WindowProblem make_window(const RDModel& model, Field u0, int nt, double ht);

// First block = u0, remaining blocks zero (periodic BC adds nothing).
SpaceTimeVec assemble_v(const Field& u0, int nt, double ht);

// Output block t = u^{t+1} - u^t + h_t G(a L u^{t+1} + b f(u^{t+1})) - v^t,
// with u^0 = prob.u0; block t describes the step from u^t to u^{t+1}.
void eval_F(const WindowProblem& prob, const SpaceTimeVec& u, SpaceTimeVec& out);
SpaceTimeVec eval_F(const WindowProblem& prob, const SpaceTimeVec& u);

// ||F(u)||_inf / h_t
double residual_inf(const WindowProblem& prob, const SpaceTimeVec& u);

// Output block t = p^t - p^{t+1} (p^{n_t} = 0) + h_t (a L(G p^t)
// + b f'(u^t) . (G p^t)); G applied first, then L / pointwise multiply.
void apply_DF_transpose(const WindowProblem& prob, const SpaceTimeVec& u,
                        const SpaceTimeVec& p, SpaceTimeVec& out);
SpaceTimeVec apply_DF_transpose(const WindowProblem& prob, const SpaceTimeVec& u,
                                const SpaceTimeVec& p);

} // namespace rd
