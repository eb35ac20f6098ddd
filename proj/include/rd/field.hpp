#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rd/errors.hpp"
#include "rd/kernels.hpp"

namespace rd {

// Periodic square domain [0, L]^2 with nx nodes per axis.
struct Grid2D {
    int nx = 0;
    double length = 0.0;

    double hx() const { return length / nx; }
};

// One scalar field on an nx-by-nx periodic grid, row-major.
// Node (i, j) sits at position (i*hx, j*hx).
struct Field {
    int nx = 0;
    std::vector<double> v;

    Field() = default;
    explicit Field(int n, double fill = 0.0) : nx(n), v(static_cast<std::size_t>(n) * n, fill) {}

    double& operator()(int i, int j) { return v[static_cast<std::size_t>(i) * nx + j]; }
    double operator()(int i, int j) const { return v[static_cast<std::size_t>(i) * nx + j]; }

    std::size_t size() const { return v.size(); }
    double* data() { return v.data(); }
    const double* data() const { return v.data(); }
};

// N_t stacked fields: one window's space-time vector U (or Q, P, V).
struct SpaceTimeVec {
    int nt = 0;
    double ht = 0.0;
    std::vector<Field> blocks;

    static SpaceTimeVec zeros(int nt, double ht, int nx) {
        SpaceTimeVec s{nt, ht, {}};
        s.blocks.assign(nt, Field(nx));
        return s;
    }
    static SpaceTimeVec replicate(int nt, double ht, const Field& f) {
        SpaceTimeVec s{nt, ht, {}};
        s.blocks.assign(nt, f);
        return s;
    }
    int nx() const { return blocks.empty() ? 0 : blocks.front().nx; }
};

inline void check_same_shape(const Field& a, const Field& b) {
    if (a.nx != b.nx) throw dim_error("field size mismatch");
}

inline void check_same_shape(const SpaceTimeVec& a, const SpaceTimeVec& b) {
    if (a.nt != b.nt || a.nx() != b.nx()) throw dim_error("space-time vector shape mismatch");
}

// -- elementwise algebra and norms ------------------------------------------

inline void add_scaled(Field& y, const Field& x, double a) {
    check_same_shape(y, x);
    kernels::add_scaled(y.data(), x.data(), a, y.size());
}

inline Field lincomb(double a, const Field& x, double b, const Field& y) {
    check_same_shape(x, y);
    Field out(x.nx);
    kernels::lincomb(out.data(), a, x.data(), b, y.data(), out.size());
    return out;
}

inline void add_scaled(SpaceTimeVec& y, const SpaceTimeVec& x, double a) {
    check_same_shape(y, x);
    for (int t = 0; t < y.nt; ++t) add_scaled(y.blocks[t], x.blocks[t], a);
}

inline SpaceTimeVec lincomb(double a, const SpaceTimeVec& x, double b, const SpaceTimeVec& y) {
    check_same_shape(x, y);
    SpaceTimeVec out = SpaceTimeVec::zeros(x.nt, x.ht, x.nx());
    for (int t = 0; t < x.nt; ++t)
        kernels::lincomb(out.blocks[t].data(), a, x.blocks[t].data(), b, y.blocks[t].data(),
                         out.blocks[t].size());
    return out;
}

inline void scale(Field& y, double a) { kernels::scale(y.data(), a, y.size()); }

inline void scale(SpaceTimeVec& y, double a) {
    for (auto& blk : y.blocks) kernels::scale(blk.data(), a, blk.size());
}

inline double dot(const Field& x, const Field& y) {
    check_same_shape(x, y);
    return kernels::dot(x.data(), y.data(), x.size());
}

inline double dot(const SpaceTimeVec& x, const SpaceTimeVec& y) {
    check_same_shape(x, y);
    double s = 0;
    for (int t = 0; t < x.nt; ++t) s += dot(x.blocks[t], y.blocks[t]);
    return s;
}

inline double norm_l2(const Field& x) { return std::sqrt(kernels::norm_sq(x.data(), x.size())); }

inline double norm_l2(const SpaceTimeVec& x) {
    double s = 0;
    for (const auto& blk : x.blocks) s += kernels::norm_sq(blk.data(), blk.size());
    return std::sqrt(s);
}

inline double norm_inf(const Field& x) { return kernels::norm_inf(x.data(), x.size()); }

inline double norm_inf(const SpaceTimeVec& x) {
    double m = 0;
    for (const auto& blk : x.blocks) m = std::max(m, norm_inf(blk));
    return m;
}

inline bool all_finite(const SpaceTimeVec& x) {
    for (const auto& blk : x.blocks)
        if (!kernels::all_finite(blk.data(), blk.size())) return false;
    return true;
}

inline double mean(const Field& x) {
    double s = 0;
    for (double e : x.v) s += e;
    return s / static_cast<double>(x.size());
}

} // namespace rd
