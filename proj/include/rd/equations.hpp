#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "rd/field.hpp"
#include "rd/spectral.hpp"

namespace rd {

struct ReactionSpec {
    std::function<double(double)> f;       // W'
    std::function<double(double)> f_prime;
    std::function<double(double)> w;       // potential with W' = f
    double c = 0.0;                        // linearization constant, J_f = cI
    double lip_r = 0.0;                    // sup |R'| on the working range [-1,1]
    double lip_phi = 0.0;                  // Lipschitz bound of the non-monotone part of f
    std::vector<double> u_equilibria;
};

struct ReactionValues {
    double f, f_prime, w, r;
};

ReactionValues reaction_eval(const ReactionSpec& spec, double u);

// f(u) = u^3 - u, W(u) = (u^2-1)^2/4, c = 2, R(u) = u^3 - 3u.
ReactionSpec double_well();

// Variable-coefficient mobility -div(sigma grad .), sigma sampled at the
// east/north faces of each node: sx(i,j) at ((i+1/2)h, j h), sy(i,j) at
// (i h, (j+1/2)h).
struct MobilityStencil {
    int nx = 0;
    double hx = 0.0;
    std::vector<double> sx, sy;
};

// sigma(x,y) = 1 + (mu/2)(sin^2 x + sin^2 y)
MobilityStencil build_mobility(const Grid2D& grid, double mu);

using LinearOp = std::variant<SpectralDiag, MobilityStencil>;

void apply_operator(const LinearOp& op, const Field& in, Field& out);
Field apply_operator(const LinearOp& op, const Field& in);
bool is_spectral(const LinearOp& op);
const SpectralDiag& spectral_symbol(const LinearOp& op); // throws domain_error on stencil

enum class ModelKind { allen_cahn, cahn_hilliard, var_coeff, sixth_order };

ModelKind parse_model_kind(const std::string& name); // throws domain_error on unknown name
std::string model_kind_name(ModelKind kind);

struct ModelParams {
    double eps0 = -1.0; // negative selects the per-model default
    double mu = 5.0;
};

ModelParams default_params(ModelKind kind);

struct RDModel {
    ModelKind kind{};
    std::string name;
    Grid2D grid{};
    double a = 0.0, b = 0.0;
    LinearOp g_op, l_op;
    SpectralDiag l_precond; // spectral surrogate of l_op, used only in the preconditioner
    ReactionSpec reaction;
    double eps0 = 0.0, mu = 0.0;
};

RDModel build_model(ModelKind kind, int nx, ModelParams params = {});

// Benchmark initial data for each model on its native domain.
Field initial_field(ModelKind kind, const Grid2D& grid);

} // namespace rd
