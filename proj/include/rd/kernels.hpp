#pragma once

#include <cstddef>

// Hot per-node loops, OpenMP-parallel above a size threshold. rd::kernels::ref
// holds plain serial versions of the same loops; tests check par == ref and
// tools/bench_kernels.cpp times the two side by side.
//
// Reductions (dot, norms) are deliberately serial: a fixed summation order keeps
// whole solver runs bit-reproducible regardless of the thread count.

namespace rd::kernels {

inline constexpr std::size_t par_threshold = 1u << 14;

// y += a*x
void add_scaled(double* y, const double* x, double a, std::size_t n);
// out = a*x + b*y
void lincomb(double* out, double a, const double* x, double b, const double* y, std::size_t n);
// y *= a
void scale(double* y, double a, std::size_t n);

// out = g(u) applied per node; G is any callable double -> double
template <class G>
void map(double* out, const double* u, std::size_t n, G&& g) {
#pragma omp parallel for if (n >= par_threshold) schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        out[i] = g(u[i]);
}

// out = -(1/hx^2) * div(sigma grad u) on the periodic grid, sigma given on
// x-faces (sx, between nodes (i,j) and (i+1,j)) and y-faces (sy)
void mobility_apply(double* out, const double* u, const double* sx, const double* sy,
                    int nx, double hx);

double dot(const double* x, const double* y, std::size_t n);
double norm_sq(const double* x, std::size_t n);
double norm_inf(const double* x, std::size_t n);
bool all_finite(const double* x, std::size_t n);

namespace ref {

void add_scaled(double* y, const double* x, double a, std::size_t n);
void lincomb(double* out, double a, const double* x, double b, const double* y, std::size_t n);
void scale(double* y, double a, std::size_t n);

template <class G>
void map(double* out, const double* u, std::size_t n, G&& g) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = g(u[i]);
}

void mobility_apply(double* out, const double* u, const double* sx, const double* sy,
                    int nx, double hx);

} // namespace ref

} // namespace rd::kernels
