#pragma once

#include "rd/equations.hpp"
#include "rd/field.hpp"
#include "rd/spectral.hpp"

namespace rd {

// Block lower-bidiagonal preconditioner M = D (x) X with
// X = I + h_t (a G L + b c G) applied spectrally; per-block solves are FFT
// diagonal inversions, block coupling is forward/backward substitution.
struct Precond {
    SpectralDiag x_symbol;
    SpectralDiag x_inv;
    int nt = 1;
    double ht = 0.0;
};

// Uses the model's G symbol and l_precond surrogate; all x multipliers are
// >= 1 for a,b,c >= 0 with nonnegative symbols, so X is invertible.
Precond build_precond(const RDModel& model, int nt, double ht);

// block 0 = X v^0; block t = X v^t - v^{t-1}
SpaceTimeVec apply_M(const Precond& pc, const SpaceTimeVec& v);

// forward substitution: w^0 = X^-1 v^0; w^t = X^-1 (v^t + w^{t-1})
SpaceTimeVec apply_M_inverse(const Precond& pc, const SpaceTimeVec& v);

// backward substitution: w^{nt-1} = X^-1 v^{nt-1}; w^t = X^-1 (v^t + w^{t+1})
SpaceTimeVec apply_M_inverse_transpose(const Precond& pc, const SpaceTimeVec& v);

// allocation-free variants writing into caller storage (reshaped on
// mismatch); out must not alias v
void apply_M_inverse(const Precond& pc, const SpaceTimeVec& v, SpaceTimeVec& out);
void apply_M_inverse_transpose(const Precond& pc, const SpaceTimeVec& v,
                               SpaceTimeVec& out);

} // namespace rd
