#pragma once

#include <functional>
#include <vector>

#include "rd/field.hpp"

namespace rd {

// Diagonal operator in the periodic Fourier basis: entry (k,l) is the
// operator's eigenvalue on mode (k,l).  Tables hold true eigenvalues; the
// FFT convention (forward unnormalized, inverse carrying 1/n_x^2) is
// handled inside apply_diag.
struct SpectralDiag {
    int nx = 0;
    std::vector<double> m;

    double operator()(int k, int l) const {
        return m[static_cast<std::size_t>(k) * nx + l];
    }
};

SpectralDiag ones_symbol(const Grid2D& grid);

// -Lap_h with periodic boundary: multiplier(k,l) = (4/h_x^2)[sin^2(pi k/n_x)
// + sin^2(pi l/n_x)], all >= 0, zero on the mean mode.
SpectralDiag build_neg_laplacian(const Grid2D& grid);

// g applied entrywise to the multiplier table; throws pole_error if any
// g(multiplier) is non-finite (singular solve, e.g. inverting -Lap_h on the
// mean mode).
SpectralDiag map_symbol(const SpectralDiag& op, const std::function<double(double)>& g);

// out = IFFT( multipliers . FFT(in) ); real-to-complex transform is valid
// because every table we build is symmetric under (k,l) -> (n-k, n-l).
void apply_diag(const SpectralDiag& op, const Field& in, Field& out);
Field apply_diag(const SpectralDiag& op, const Field& in);

// Convenience: map_symbol then apply_diag.
Field apply_symbol(const SpectralDiag& op, const std::function<double(double)>& g,
                   const Field& field);

} // namespace rd
