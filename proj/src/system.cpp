#include "rd/system.hpp"

#include "rd/errors.hpp"
#include "rd/kernels.hpp"

namespace rd {

namespace {

void check_window_shapes(const WindowProblem& prob, const SpaceTimeVec& u) {
    if (!prob.model) throw dim_error("window problem has no model");
    if (u.nt != prob.nt) throw dim_error("space-time vector has wrong block count");
    if (u.nx() != prob.model->grid.nx)
        throw dim_error("space-time vector grid does not match model grid");
}

} // namespace

WindowProblem make_window(const RDModel& model, Field u0, int nt, double ht) {
    if (nt < 1) throw dim_error("window needs at least one time step");
    if (ht <= 0.0) throw dim_error("time step must be positive");
    if (u0.nx != model.grid.nx) throw dim_error("initial state does not match model grid");
    WindowProblem prob;
    prob.model = &model;
    prob.nt = nt;
    prob.ht = ht;
    prob.v = assemble_v(u0, nt, ht);
    prob.u0 = std::move(u0);
    return prob;
}

SpaceTimeVec assemble_v(const Field& u0, int nt, double ht) {
    SpaceTimeVec v = SpaceTimeVec::zeros(nt, ht, u0.nx);
    v.blocks[0] = u0;
    return v;
}

void eval_F(const WindowProblem& prob, const SpaceTimeVec& u, SpaceTimeVec& out) {
    check_window_shapes(prob, u);
    check_window_shapes(prob, out);
    const RDModel& m = *prob.model;
    const int nx = m.grid.nx;
    const std::size_t nn = static_cast<std::size_t>(nx) * nx;
    const double ht = prob.ht;

    Field lin(nx), reac(nx), gin(nx), gout(nx);
    for (int t = 0; t < prob.nt; ++t) {
        const Field& ut = u.blocks[t];
        apply_operator(m.l_op, ut, lin);
        kernels::map(reac.v.data(), ut.v.data(), nn,
                     [&f = m.reaction.f](double x) { return f(x); });
        kernels::lincomb(gin.v.data(), m.a, lin.v.data(), m.b, reac.v.data(), nn);
        apply_operator(m.g_op, gin, gout);

        // the t = 0 subdiagonal term is absent from D; v^0 = u0 carries the
        // window's initial state instead
        const double* prev = (t == 0) ? nullptr : u.blocks[t - 1].v.data();
        const double* cur = ut.v.data();
        const double* go = gout.v.data();
        const double* vb = prob.v.blocks[t].v.data();
        double* ob = out.blocks[t].v.data();
#pragma omp parallel for if (nn >= kernels::par_threshold) schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nn); ++i)
            ob[i] = cur[i] - (prev ? prev[i] : 0.0) + ht * go[i] - vb[i];
    }
}

SpaceTimeVec eval_F(const WindowProblem& prob, const SpaceTimeVec& u) {
    SpaceTimeVec out = SpaceTimeVec::zeros(u.nt, u.ht, u.nx());
    eval_F(prob, u, out);
    return out;
}

double residual_inf(const WindowProblem& prob, const SpaceTimeVec& u) {
    return norm_inf(eval_F(prob, u)) / prob.ht;
}

void apply_DF_transpose(const WindowProblem& prob, const SpaceTimeVec& u,
                        const SpaceTimeVec& p, SpaceTimeVec& out) {
    check_window_shapes(prob, u);
    check_window_shapes(prob, p);
    check_window_shapes(prob, out);
    const RDModel& m = *prob.model;
    const int nx = m.grid.nx;
    const std::size_t nn = static_cast<std::size_t>(nx) * nx;
    const double ht = prob.ht;

    Field gp(nx), lgp(nx);
    for (int t = 0; t < prob.nt; ++t) {
        apply_operator(m.g_op, p.blocks[t], gp);
        apply_operator(m.l_op, gp, lgp);

        const double* pt = p.blocks[t].v.data();
        const double* pn = (t + 1 < prob.nt) ? p.blocks[t + 1].v.data() : nullptr;
        const double* ut = u.blocks[t].v.data();
        const double* gpd = gp.v.data();
        const double* lgpd = lgp.v.data();
        double* ob = out.blocks[t].v.data();
        const double a = m.a, b = m.b;
        const auto& fp = m.reaction.f_prime;
#pragma omp parallel for if (nn >= kernels::par_threshold) schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nn); ++i) {
            const double next = pn ? pn[i] : 0.0;
            ob[i] = pt[i] - next + ht * (a * lgpd[i] + b * fp(ut[i]) * gpd[i]);
        }
    }
}

SpaceTimeVec apply_DF_transpose(const WindowProblem& prob, const SpaceTimeVec& u,
                                const SpaceTimeVec& p) {
    SpaceTimeVec out = SpaceTimeVec::zeros(p.nt, p.ht, p.nx());
    apply_DF_transpose(prob, u, p, out);
    return out;
}

} // namespace rd
