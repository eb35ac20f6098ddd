#include "rd/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <sstream>

#include "rd/errors.hpp"
#include "rd/kernels.hpp"

namespace rd {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

// Plans are created once per grid size under a lock and then executed via the
// new-array interface, which is thread-safe.  FFTW_UNALIGNED lets us execute
// on ordinary vector storage.
PlanPair plans_for(int nx) {
    static std::mutex mtx;
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(nx);
    if (it != cache.end()) return it->second;

    const std::size_t n = static_cast<std::size_t>(nx);
    const std::size_t nc = n * (n / 2 + 1);
    std::vector<double> re(n * n);
    std::vector<std::complex<double>> cx(nc);
    PlanPair p;
    p.fwd = fftw_plan_dft_r2c_2d(nx, nx, re.data(),
                                 reinterpret_cast<fftw_complex*>(cx.data()),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_c2r_2d(nx, nx, reinterpret_cast<fftw_complex*>(cx.data()),
                                 re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[nx] = p;
    return p;
}

} // namespace

SpectralDiag ones_symbol(const Grid2D& grid) {
    SpectralDiag op;
    op.nx = grid.nx;
    op.m.assign(static_cast<std::size_t>(grid.nx) * grid.nx, 1.0);
    return op;
}

SpectralDiag build_neg_laplacian(const Grid2D& grid) {
    const int n = grid.nx;
    const double hx = grid.hx();
    SpectralDiag op;
    op.nx = n;
    op.m.resize(static_cast<std::size_t>(n) * n);
    const double scale = 4.0 / (hx * hx);
    const double pi = std::acos(-1.0);
    for (int k = 0; k < n; ++k) {
        const double sk = std::sin(pi * k / n);
        for (int l = 0; l < n; ++l) {
            const double sl = std::sin(pi * l / n);
            op.m[static_cast<std::size_t>(k) * n + l] = scale * (sk * sk + sl * sl);
        }
    }
    return op;
}

SpectralDiag map_symbol(const SpectralDiag& op, const std::function<double(double)>& g) {
    SpectralDiag out;
    out.nx = op.nx;
    out.m.resize(op.m.size());
    for (std::size_t i = 0; i < op.m.size(); ++i) {
        const double v = g(op.m[i]);
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "symbol map hit a pole: g(" << op.m[i] << ") is not finite at mode ("
                << i / op.nx << "," << i % op.nx << ")";
            throw pole_error(msg.str());
        }
        out.m[i] = v;
    }
    return out;
}

void apply_diag(const SpectralDiag& op, const Field& in, Field& out) {
    if (in.nx != op.nx) throw dim_error("apply_diag: field/operator size mismatch");
    if (out.nx != op.nx) throw dim_error("apply_diag: output size mismatch");
    const int n = op.nx;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    const int ncols = n / 2 + 1;
    const PlanPair plans = plans_for(n);

    // out-of-place r2c preserves its input, so the field is read directly;
    // the complex scratch is reused across calls on each thread
    thread_local std::map<int, std::vector<std::complex<double>>> scratch;
    std::vector<std::complex<double>>& cx = scratch[n];
    cx.resize(static_cast<std::size_t>(n) * ncols);
    fftw_execute_dft_r2c(plans.fwd, const_cast<double*>(in.v.data()),
                         reinterpret_cast<fftw_complex*>(cx.data()));

    const double inv_nn = 1.0 / static_cast<double>(nn);
#pragma omp parallel for if (nn >= kernels::par_threshold) schedule(static)
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < ncols; ++l)
            cx[static_cast<std::size_t>(k) * ncols + l] *=
                op.m[static_cast<std::size_t>(k) * n + l] * inv_nn;
    }

    fftw_execute_dft_c2r(plans.bwd, reinterpret_cast<fftw_complex*>(cx.data()),
                         out.v.data());
}

Field apply_diag(const SpectralDiag& op, const Field& in) {
    Field out(op.nx);
    apply_diag(op, in, out);
    return out;
}

Field apply_symbol(const SpectralDiag& op, const std::function<double(double)>& g,
                   const Field& field) {
    return apply_diag(map_symbol(op, g), field);
}

} // namespace rd
