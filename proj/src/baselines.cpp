#include "rd/baselines.hpp"

#include <cmath>

#include "rd/errors.hpp"
#include "rd/kernels.hpp"

namespace rd {

namespace {

void check_krylov(const KrylovParams& kp) {
    if (kp.eta <= 0.0 || kp.max_iter < 1)
        throw domain_error("KrylovParams requires eta > 0 and max_iter >= 1");
}

const SpectralDiag& precond_l(const RDModel& m) {
    return is_spectral(m.l_op) ? spectral_symbol(m.l_op) : m.l_precond;
}

// 1 / (1 + ht (a g l + b c g)) on each mode, the per-block inverse used by
// the preconditioner.
SpectralDiag block_inverse_symbol(const RDModel& m, double ht) {
    const SpectralDiag& g = spectral_symbol(m.g_op);
    const SpectralDiag& l = precond_l(m);
    SpectralDiag out{g.nx, std::vector<double>(g.m.size())};
    for (std::size_t i = 0; i < g.m.size(); ++i)
        out.m[i] = 1.0 / (1.0 + ht * (m.a * g.m[i] * l.m[i] +
                                      m.b * m.reaction.c * g.m[i]));
    return out;
}

Field apply_G(const RDModel& m, const Field& x) { return apply_operator(m.g_op, x); }

// G(a L x + b w) for an already-evaluated pointwise term w.
Field g_of_linear(const RDModel& m, const Field& x, const Field& w) {
    Field lx = apply_operator(m.l_op, x);
    Field mix(x.nx);
    kernels::lincomb(mix.data(), m.a, lx.data(), m.b, w.data(), mix.size());
    return apply_G(m, mix);
}

} // namespace

Field pcg_solve(const LinearApply& apply_A, const LinearApply& apply_Pinv,
                const Field& rhs, const KrylovParams& kp, PcgStats* stats) {
    check_krylov(kp);
    const int nx = rhs.nx;
    Field x(nx), r = rhs, z(nx), p(nx), ap(nx);

    auto true_residual = [&](const Field& xk, Field& out) {
        apply_A(xk, out);
        kernels::lincomb(out.data(), 1.0, rhs.data(), -1.0, out.data(), out.size());
    };

    apply_Pinv(r, z);
    p = z;
    double rz = dot(r, z);
    for (int it = 1; it <= kp.max_iter; ++it) {
        apply_A(p, ap);
        const double curv = dot(p, ap);
        if (!(curv > 0.0) || !std::isfinite(curv))
            throw solve_error("pcg breakdown: non-positive curvature");
        const double alpha = rz / curv;
        add_scaled(x, p, alpha);
        add_scaled(r, ap, -alpha);
        if (norm_inf(r) <= kp.eta) {
            true_residual(x, r); // recurrence drift check
            const double rn = norm_inf(r);
            if (rn <= kp.eta) {
                if (stats) *stats = {it, rn};
                return x;
            }
        }
        apply_Pinv(r, z);
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        kernels::lincomb(p.data(), 1.0, z.data(), beta, p.data(), p.size());
    }
    throw solve_error("pcg did not converge within max_iter");
}

double step_residual_inf(const RDModel& model, const Field& u_t,
                         const Field& u_next, double ht) {
    Field fu(u_next.nx);
    kernels::map(fu.data(), u_next.data(), fu.size(),
                 [&f = model.reaction.f](double v) { return f(v); });
    Field gv = g_of_linear(model, u_next, fu);
    double r = 0.0;
    for (std::size_t i = 0; i < gv.size(); ++i)
        r = std::max(r, std::abs(u_next.v[i] - u_t.v[i] + ht * gv.v[i]));
    return r;
}

Field imex_step(const RDModel& model, const Field& u_t, double ht) {
    if (ht <= 0.0) throw domain_error("imex_step requires ht > 0");
    Field fu(u_t.nx);
    kernels::map(fu.data(), u_t.data(), fu.size(),
                 [&f = model.reaction.f](double v) { return f(v); });
    Field rhs = apply_G(model, fu);
    kernels::lincomb(rhs.data(), 1.0, u_t.data(), -model.b * ht, rhs.data(),
                     rhs.size());

    const SpectralDiag& g = spectral_symbol(model.g_op);
    if (is_spectral(model.l_op)) {
        const SpectralDiag& l = spectral_symbol(model.l_op);
        SpectralDiag inv{g.nx, std::vector<double>(g.m.size())};
        for (std::size_t i = 0; i < g.m.size(); ++i)
            inv.m[i] = 1.0 / (1.0 + model.a * ht * g.m[i] * l.m[i]);
        return apply_diag(inv, rhs);
    }

    const SpectralDiag& lp = model.l_precond;
    SpectralDiag pinv{g.nx, std::vector<double>(g.m.size())};
    for (std::size_t i = 0; i < g.m.size(); ++i)
        pinv.m[i] = 1.0 / (1.0 + model.a * ht * g.m[i] * lp.m[i]);

    const double a_ht = model.a * ht;
    LinearApply apply_A = [&model, a_ht](const Field& in, Field& out) {
        Field gl = apply_G(model, apply_operator(model.l_op, in));
        kernels::lincomb(out.data(), 1.0, in.data(), a_ht, gl.data(), out.size());
    };
    LinearApply apply_P = [&pinv](const Field& in, Field& out) {
        apply_diag(pinv, in, out);
    };
    return pcg_solve(apply_A, apply_P, rhs, {1e-10, 2000});
}

Field fixed_point_solve(const RDModel& model, const Field& u_t, double ht,
                        double tol, int max_iter, int* iters) {
    if (ht <= 0.0 || tol <= 0.0 || max_iter < 1)
        throw domain_error("fixed_point_solve requires positive ht, tol, max_iter");
    const double c = model.reaction.c;
    const SpectralDiag inv = block_inverse_symbol(model, ht);
    const bool spectral = is_spectral(model.l_op);

    Field u = u_t;
    for (int k = 0; k <= max_iter; ++k) {
        if (iters) *iters = k;
        if (step_residual_inf(model, u_t, u, ht) < tol) return u;
        if (k == max_iter) break;

        Field w(u.nx); // f(U) - c U
        kernels::map(w.data(), u.data(), w.size(),
                     [&f = model.reaction.f, c](double v) { return f(v) - c * v; });
        Field rhs = apply_G(model, w);
        kernels::lincomb(rhs.data(), 1.0, u_t.data(), -model.b * ht, rhs.data(),
                         rhs.size());
        if (spectral) {
            apply_diag(inv, rhs, u);
        } else {
            const double bc = model.b * c;
            LinearApply apply_A = [&model, ht, bc](const Field& in, Field& out) {
                Field lx = apply_operator(model.l_op, in);
                Field gl = apply_G(model, lincomb(model.a, lx, bc, in));
                kernels::lincomb(out.data(), 1.0, in.data(), ht, gl.data(),
                                 out.size());
            };
            LinearApply apply_P = [&inv](const Field& in, Field& out) {
                apply_diag(inv, in, out);
            };
            u = pcg_solve(apply_A, apply_P, rhs, {1e-10, 2000});
        }
    }
    throw solve_error("fixed-point iteration did not converge");
}

Field nonlinear_sor_solve(const RDModel& model, const Field& u_t, double ht,
                          double omega_sor, double tol, int* sweeps) {
    if (ht <= 0.0 || tol <= 0.0 || omega_sor <= 0.0)
        throw domain_error("nonlinear_sor_solve requires positive ht, tol, omega_sor");
    const bool identity_g =
        model.kind == ModelKind::allen_cahn || model.kind == ModelKind::var_coeff;
    if (!identity_g)
        throw domain_error("nonlinear SOR requires an identity-mobility model");
    const MobilityStencil* mob =
        is_spectral(model.l_op) ? nullptr : &std::get<MobilityStencil>(model.l_op);

    const int nx = u_t.nx;
    const double hx = model.grid.hx();
    const double inv_h2 = 1.0 / (hx * hx);
    const auto& f = model.reaction.f;
    const auto& fp = model.reaction.f_prime;
    const double a = model.a, b = model.b;

    constexpr int max_sweeps = 20000;
    Field u = u_t;
    for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
        if (step_residual_inf(model, u_t, u, ht) < tol) {
            if (sweeps) *sweeps = sweep;
            return u;
        }
        if (sweep == max_sweeps) break;

        for (int i = 0; i < nx; ++i) {
            const int ip = (i + 1) % nx, im = (i + nx - 1) % nx;
            for (int j = 0; j < nx; ++j) {
                const int jp = (j + 1) % nx, jm = (j + nx - 1) % nx;
                const double we = mob ? mob->sx[static_cast<std::size_t>(i) * nx + j] : 1.0;
                const double ww = mob ? mob->sx[static_cast<std::size_t>(im) * nx + j] : 1.0;
                const double wn = mob ? mob->sy[static_cast<std::size_t>(i) * nx + j] : 1.0;
                const double ws = mob ? mob->sy[static_cast<std::size_t>(i) * nx + jm] : 1.0;
                const double nb = we * u(ip, j) + ww * u(im, j) + wn * u(i, jp) +
                                  ws * u(i, jm);
                const double diag = we + ww + wn + ws;
                const double rhs = u_t(i, j);

                double x = u(i, j);
                bool ok = false;
                for (int it = 0; it < 50; ++it) {
                    const double g = x + ht * (a * (diag * x - nb) * inv_h2 + b * f(x)) - rhs;
                    if (std::abs(g) <= 1e-10) {
                        ok = true;
                        break;
                    }
                    const double gp = 1.0 + ht * (a * diag * inv_h2 + b * fp(x));
                    x -= g / gp;
                }
                if (!ok)
                    throw solve_error("nonlinear SOR: scalar Newton failed at a node");
                u(i, j) = (1.0 - omega_sor) * u(i, j) + omega_sor * x;
            }
        }
    }
    throw solve_error("nonlinear SOR did not converge");
}

Field newton_solve(const RDModel& model, const Field& u_t, double ht,
                   const KrylovParams& kp, double tol,
                   std::vector<double>* residuals) {
    if (ht <= 0.0 || tol <= 0.0)
        throw domain_error("newton_solve requires positive ht and tol");
    check_krylov(kp);
    if (residuals) residuals->clear();

    const bool symmetric =
        model.kind == ModelKind::allen_cahn || model.kind == ModelKind::var_coeff;
    const SpectralDiag binv = block_inverse_symbol(model, ht);
    SpectralDiag binv2{binv.nx, std::vector<double>(binv.m.size())};
    for (std::size_t i = 0; i < binv.m.size(); ++i) binv2.m[i] = binv.m[i] * binv.m[i];

    constexpr int max_outer = 50;
    const int nx = u_t.nx;
    Field u = u_t;
    for (int outer = 0; outer <= max_outer; ++outer) {
        Field fu(nx);
        kernels::map(fu.data(), u.data(), fu.size(),
                     [&f = model.reaction.f](double v) { return f(v); });
        Field res = g_of_linear(model, u, fu);
        for (std::size_t i = 0; i < res.size(); ++i)
            res.v[i] = u.v[i] - u_t.v[i] + ht * res.v[i];
        const double rn = norm_inf(res);
        if (residuals) residuals->push_back(rn);
        if (rn < tol) return u;
        if (outer == max_outer) break;

        Field fpu(nx);
        kernels::map(fpu.data(), u.data(), fpu.size(),
                     [&fp = model.reaction.f_prime](double v) { return fp(v); });

        auto apply_J = [&](const Field& in, Field& out) {
            Field w(nx);
            for (std::size_t i = 0; i < w.size(); ++i) w.v[i] = fpu.v[i] * in.v[i];
            Field gl = g_of_linear(model, in, w);
            kernels::lincomb(out.data(), 1.0, in.data(), ht, gl.data(), out.size());
        };
        auto apply_Jt = [&](const Field& in, Field& out) {
            Field gp = apply_G(model, in);
            Field lgp = apply_operator(model.l_op, gp);
            for (std::size_t i = 0; i < out.size(); ++i)
                out.v[i] = in.v[i] + ht * (model.a * lgp.v[i] +
                                           model.b * fpu.v[i] * gp.v[i]);
        };

        Field step(nx);
        if (symmetric) {
            Field rhs = res;
            scale(rhs, -1.0);
            LinearApply apply_P = [&binv](const Field& in, Field& out) {
                apply_diag(binv, in, out);
            };
            step = pcg_solve(apply_J, apply_P, rhs, kp);
        } else {
            Field rhs(nx);
            apply_Jt(res, rhs);
            scale(rhs, -1.0);
            LinearApply apply_N = [&](const Field& in, Field& out) {
                Field ji(nx);
                apply_J(in, ji);
                apply_Jt(ji, out);
            };
            LinearApply apply_P = [&binv2](const Field& in, Field& out) {
                apply_diag(binv2, in, out);
            };
            step = pcg_solve(apply_N, apply_P, rhs, kp);
        }
        add_scaled(u, step, 1.0);
    }
    throw solve_error("newton iteration did not converge");
}

} // namespace rd
