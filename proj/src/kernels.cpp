#include "rd/kernels.hpp"

#include <cmath>
#include <cstdint>

namespace rd::kernels {

void add_scaled(double* y, const double* x, double a, std::size_t n) {
#pragma omp parallel for if (n >= par_threshold) schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) y[i] += a * x[i];
}

void lincomb(double* out, double a, const double* x, double b, const double* y, std::size_t n) {
#pragma omp parallel for if (n >= par_threshold) schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        out[i] = a * x[i] + b * y[i];
}

void scale(double* y, double a, std::size_t n) {
#pragma omp parallel for if (n >= par_threshold) schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) y[i] *= a;
}

void mobility_apply(double* out, const double* u, const double* sx, const double* sy,
                    int nx, double hx) {
    const double inv_h2 = 1.0 / (hx * hx);
#pragma omp parallel for if (static_cast<std::size_t>(nx) * nx >= par_threshold) schedule(static)
    for (int i = 0; i < nx; ++i) {
        const int ip = (i + 1 == nx) ? 0 : i + 1;
        const int im = (i == 0) ? nx - 1 : i - 1;
        for (int j = 0; j < nx; ++j) {
            const int jp = (j + 1 == nx) ? 0 : j + 1;
            const int jm = (j == 0) ? nx - 1 : j - 1;
            const std::size_t c = static_cast<std::size_t>(i) * nx + j;
            const double flux = sx[c] * (u[static_cast<std::size_t>(ip) * nx + j] - u[c])
                              - sx[static_cast<std::size_t>(im) * nx + j]
                                    * (u[c] - u[static_cast<std::size_t>(im) * nx + j])
                              + sy[c] * (u[static_cast<std::size_t>(i) * nx + jp] - u[c])
                              - sy[static_cast<std::size_t>(i) * nx + jm]
                                    * (u[c] - u[static_cast<std::size_t>(i) * nx + jm]);
            out[c] = -inv_h2 * flux;
        }
    }
}

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double norm_sq(const double* x, std::size_t n) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

double norm_inf(const double* x, std::size_t n) {
    double m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

bool all_finite(const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(x[i])) return false;
    return true;
}

namespace ref {

void add_scaled(double* y, const double* x, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void lincomb(double* out, double a, const double* x, double b, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void scale(double* y, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] *= a;
}

void mobility_apply(double* out, const double* u, const double* sx, const double* sy,
                    int nx, double hx) {
    const double inv_h2 = 1.0 / (hx * hx);
    for (int i = 0; i < nx; ++i) {
        const int ip = (i + 1 == nx) ? 0 : i + 1;
        const int im = (i == 0) ? nx - 1 : i - 1;
        for (int j = 0; j < nx; ++j) {
            const int jp = (j + 1 == nx) ? 0 : j + 1;
            const int jm = (j == 0) ? nx - 1 : j - 1;
            const std::size_t c = static_cast<std::size_t>(i) * nx + j;
            const double flux = sx[c] * (u[static_cast<std::size_t>(ip) * nx + j] - u[c])
                              - sx[static_cast<std::size_t>(im) * nx + j]
                                    * (u[c] - u[static_cast<std::size_t>(im) * nx + j])
                              + sy[c] * (u[static_cast<std::size_t>(i) * nx + jp] - u[c])
                              - sy[static_cast<std::size_t>(i) * nx + jm]
                                    * (u[c] - u[static_cast<std::size_t>(i) * nx + jm]);
            out[c] = -inv_h2 * flux;
        }
    }
}

} // namespace ref

} // namespace rd::kernels
