#include "rd/precond.hpp"

#include "rd/errors.hpp"
#include "rd/kernels.hpp"

namespace rd {

namespace {

void check_shapes(const Precond& pc, const SpaceTimeVec& v) {
    if (v.nt != pc.nt) throw dim_error("preconditioner block count mismatch");
    if (v.nx() != pc.x_symbol.nx) throw dim_error("preconditioner grid mismatch");
}

} // namespace

Precond build_precond(const RDModel& model, int nt, double ht) {
    if (nt < 1) throw dim_error("preconditioner needs at least one block");
    if (ht <= 0.0) throw dim_error("time step must be positive");
    const SpectralDiag& g = spectral_symbol(model.g_op);
    const SpectralDiag& l = model.l_precond;

    Precond pc;
    pc.nt = nt;
    pc.ht = ht;
    pc.x_symbol.nx = g.nx;
    pc.x_symbol.m.resize(g.m.size());
    const double a = model.a, b = model.b, c = model.reaction.c;
    for (std::size_t i = 0; i < g.m.size(); ++i)
        pc.x_symbol.m[i] = 1.0 + ht * (a * g.m[i] * l.m[i] + b * c * g.m[i]);
    // map_symbol rejects a singular X (cannot occur when all terms are >= 0)
    pc.x_inv = map_symbol(pc.x_symbol, [](double x) { return 1.0 / x; });
    return pc;
}

SpaceTimeVec apply_M(const Precond& pc, const SpaceTimeVec& v) {
    check_shapes(pc, v);
    SpaceTimeVec out = SpaceTimeVec::zeros(v.nt, v.ht, v.nx());
    for (int t = 0; t < v.nt; ++t) {
        apply_diag(pc.x_symbol, v.blocks[t], out.blocks[t]);
        if (t > 0)
            kernels::add_scaled(out.blocks[t].v.data(), v.blocks[t - 1].v.data(), -1.0,
                                out.blocks[t].v.size());
    }
    return out;
}

// apply_diag tolerates in == out (the forward transform fully consumes the
// input before the inverse transform writes), so the substitutions run in
// place on the output blocks.
void apply_M_inverse(const Precond& pc, const SpaceTimeVec& v, SpaceTimeVec& out) {
    check_shapes(pc, v);
    if (out.nt != v.nt || out.nx() != v.nx()) out = SpaceTimeVec::zeros(v.nt, v.ht, v.nx());
    out.ht = v.ht;
    for (int t = 0; t < v.nt; ++t) {
        if (t == 0) {
            apply_diag(pc.x_inv, v.blocks[0], out.blocks[0]);
        } else {
            kernels::lincomb(out.blocks[t].v.data(), 1.0, v.blocks[t].v.data(), 1.0,
                             out.blocks[t - 1].v.data(), out.blocks[t].v.size());
            apply_diag(pc.x_inv, out.blocks[t], out.blocks[t]);
        }
    }
}

void apply_M_inverse_transpose(const Precond& pc, const SpaceTimeVec& v,
                               SpaceTimeVec& out) {
    check_shapes(pc, v);
    if (out.nt != v.nt || out.nx() != v.nx()) out = SpaceTimeVec::zeros(v.nt, v.ht, v.nx());
    out.ht = v.ht;
    for (int t = v.nt - 1; t >= 0; --t) {
        if (t == v.nt - 1) {
            apply_diag(pc.x_inv, v.blocks[t], out.blocks[t]);
        } else {
            kernels::lincomb(out.blocks[t].v.data(), 1.0, v.blocks[t].v.data(), 1.0,
                             out.blocks[t + 1].v.data(), out.blocks[t].v.size());
            apply_diag(pc.x_inv, out.blocks[t], out.blocks[t]);
        }
    }
}

SpaceTimeVec apply_M_inverse(const Precond& pc, const SpaceTimeVec& v) {
    SpaceTimeVec out = SpaceTimeVec::zeros(v.nt, v.ht, v.nx());
    apply_M_inverse(pc, v, out);
    return out;
}

SpaceTimeVec apply_M_inverse_transpose(const Precond& pc, const SpaceTimeVec& v) {
    SpaceTimeVec out = SpaceTimeVec::zeros(v.nt, v.ht, v.nx());
    apply_M_inverse_transpose(pc, v, out);
    return out;
}

} // namespace rd
