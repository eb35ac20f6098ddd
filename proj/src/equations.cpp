#include "rd/equations.hpp"

#include <cmath>

#include "rd/errors.hpp"
#include "rd/kernels.hpp"

namespace rd {

namespace {
const double pi = std::acos(-1.0);
}

ReactionValues reaction_eval(const ReactionSpec& spec, double u) {
    return {spec.f(u), spec.f_prime(u), spec.w(u), spec.f(u) - spec.c * u};
}

ReactionSpec double_well() {
    ReactionSpec s;
    s.f = [](double u) { return u * u * u - u; };
    s.f_prime = [](double u) { return 3.0 * u * u - 1.0; };
    s.w = [](double u) {
        const double t = u * u - 1.0;
        return 0.25 * t * t;
    };
    s.c = 2.0;
    s.lip_r = 3.0;
    s.lip_phi = 2.0;
    s.u_equilibria = {-1.0, 0.0, 1.0};
    return s;
}

MobilityStencil build_mobility(const Grid2D& grid, double mu) {
    MobilityStencil st;
    st.nx = grid.nx;
    st.hx = grid.hx();
    const std::size_t nn = static_cast<std::size_t>(grid.nx) * grid.nx;
    st.sx.resize(nn);
    st.sy.resize(nn);
    auto sigma = [mu](double x, double y) {
        const double sx = std::sin(x), sy = std::sin(y);
        return 1.0 + 0.5 * mu * (sx * sx + sy * sy);
    };
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.nx; ++j) {
            st.sx[static_cast<std::size_t>(i) * grid.nx + j] =
                sigma((i + 0.5) * st.hx, j * st.hx);
            st.sy[static_cast<std::size_t>(i) * grid.nx + j] =
                sigma(i * st.hx, (j + 0.5) * st.hx);
        }
    return st;
}

void apply_operator(const LinearOp& op, const Field& in, Field& out) {
    if (const auto* sd = std::get_if<SpectralDiag>(&op)) {
        apply_diag(*sd, in, out);
        return;
    }
    const auto& st = std::get<MobilityStencil>(op);
    if (in.nx != st.nx || out.nx != st.nx)
        throw dim_error("apply_operator: field/stencil size mismatch");
    kernels::mobility_apply(out.v.data(), in.v.data(), st.sx.data(), st.sy.data(),
                            st.nx, st.hx);
}

Field apply_operator(const LinearOp& op, const Field& in) {
    Field out(in.nx);
    apply_operator(op, in, out);
    return out;
}

bool is_spectral(const LinearOp& op) {
    return std::holds_alternative<SpectralDiag>(op);
}

const SpectralDiag& spectral_symbol(const LinearOp& op) {
    if (const auto* sd = std::get_if<SpectralDiag>(&op)) return *sd;
    throw domain_error("operator has no spectral symbol (variable-coefficient stencil)");
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "allen_cahn") return ModelKind::allen_cahn;
    if (name == "cahn_hilliard") return ModelKind::cahn_hilliard;
    if (name == "var_coeff") return ModelKind::var_coeff;
    if (name == "sixth_order") return ModelKind::sixth_order;
    throw domain_error("unknown equation kind: " + name);
}

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::allen_cahn: return "allen_cahn";
        case ModelKind::cahn_hilliard: return "cahn_hilliard";
        case ModelKind::var_coeff: return "var_coeff";
        case ModelKind::sixth_order: return "sixth_order";
    }
    throw domain_error("unknown equation kind");
}

ModelParams default_params(ModelKind kind) {
    ModelParams p;
    switch (kind) {
        case ModelKind::allen_cahn: p.eps0 = 0.01; break;
        case ModelKind::cahn_hilliard: p.eps0 = 0.1; break;
        case ModelKind::var_coeff: p.eps0 = 0.01; break;
        case ModelKind::sixth_order: p.eps0 = 0.18; break;
    }
    p.mu = 5.0;
    return p;
}

RDModel build_model(ModelKind kind, int nx, ModelParams params) {
    if (nx < 2) throw domain_error("build_model: n_x must be at least 2");
    const double eps0 = params.eps0 > 0.0 ? params.eps0 : default_params(kind).eps0;
    if (eps0 <= 0.0) throw domain_error("build_model: eps0 must be positive");

    RDModel m;
    m.kind = kind;
    m.name = model_kind_name(kind);
    m.reaction = double_well();
    m.eps0 = eps0;
    m.mu = params.mu;

    switch (kind) {
        case ModelKind::allen_cahn: {
            m.grid = Grid2D{nx, 0.5};
            m.a = eps0;
            m.b = 1.0 / eps0;
            m.g_op = ones_symbol(m.grid);
            SpectralDiag lap = build_neg_laplacian(m.grid);
            m.l_precond = lap;
            m.l_op = std::move(lap);
            break;
        }
        case ModelKind::cahn_hilliard: {
            m.grid = Grid2D{nx, 2.0 * pi};
            m.a = eps0 * eps0;
            m.b = 1.0;
            SpectralDiag lap = build_neg_laplacian(m.grid);
            m.g_op = lap;
            m.l_precond = lap;
            m.l_op = std::move(lap);
            break;
        }
        case ModelKind::var_coeff: {
            m.grid = Grid2D{nx, 2.0 * pi};
            m.a = eps0;
            m.b = 1.0 / eps0;
            m.g_op = ones_symbol(m.grid);
            m.l_op = build_mobility(m.grid, params.mu);
            const double sigma_bar = 1.0 + 0.5 * params.mu;
            m.l_precond = map_symbol(build_neg_laplacian(m.grid),
                                     [sigma_bar](double x) { return sigma_bar * x; });
            break;
        }
        case ModelKind::sixth_order: {
            m.grid = Grid2D{nx, 2.0 * pi};
            m.a = 1.0;
            m.b = 1.0;
            const double e2 = eps0 * eps0;
            SpectralDiag lap = build_neg_laplacian(m.grid);
            m.g_op = map_symbol(lap, [e2](double x) { return x * (e2 * x + 2.0 - e2); });
            m.l_precond = map_symbol(lap, [e2](double x) { return e2 * x; });
            m.l_op = m.l_precond;
            break;
        }
    }
    return m;
}

Field initial_field(ModelKind kind, const Grid2D& grid) {
    const int n = grid.nx;
    const double h = grid.hx();
    Field u(n);
    switch (kind) {
        case ModelKind::allen_cahn: {
            // 2*indicator(B((0.25,0.25), 0.2)) - 1
            const double r2 = 0.2 * 0.2;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double dx = i * h - 0.25, dy = j * h - 0.25;
                    u(i, j) = (dx * dx + dy * dy < r2) ? 1.0 : -1.0;
                }
            break;
        }
        case ModelKind::cahn_hilliard: {
            const double xs[7] = {pi / 2, pi / 4, pi / 2, pi, 3 * pi / 2, pi, 3 * pi / 2};
            const double ys[7] = {pi / 2, 3 * pi / 4, 5 * pi / 4, pi / 4, pi / 4, pi,
                                  3 * pi / 2};
            const double rs[7] = {pi / 5, 2 * pi / 15, pi / 15, pi / 10, pi / 10, pi / 4,
                                  pi / 4};
            const double eps = 0.1;
            auto bump = [eps](double s) {
                return s < 0.0 ? 2.0 * std::exp(-eps * eps / (s * s)) : 0.0;
            };
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double x = i * h, y = j * h;
                    double v = -1.0;
                    for (int k = 0; k < 7; ++k) {
                        const double d = std::hypot(x - xs[k], y - ys[k]);
                        v += bump(d - rs[k]);
                    }
                    u(i, j) = v;
                }
            break;
        }
        case ModelKind::var_coeff: {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    u(i, j) = 0.5 * (std::cos(4.0 * i * h) + std::cos(4.0 * j * h));
            break;
        }
        case ModelKind::sixth_order: {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double s = std::sin(i * h) + std::sin(j * h);
                    u(i, j) = 2.0 * std::exp(s - 2.0) + 2.2 * std::exp(-s - 2.0) - 1.0;
                }
            break;
        }
    }
    return u;
}

} // namespace rd
