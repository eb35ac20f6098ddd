#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dense_oracle.hpp"
#include "rd/errors.hpp"
#include "rd/system.hpp"
#include "testutil.hpp"

using rd::Field;
using rd::ModelKind;
using rd::SpaceTimeVec;

namespace {

rd::RDModel linear_model(double a) {
    rd::RDModel m = rd::build_model(ModelKind::allen_cahn, 8);
    m.a = a;
    m.b = 0.0;
    return m;
}

} // namespace

TEST_CASE("assemble_v places u0 in the first block only") {
    Field c(4, 2.5);
    SpaceTimeVec v = rd::assemble_v(c, 3, 0.1);
    for (double x : v.blocks[0].v) CHECK(x == 2.5);
    for (int t : {1, 2})
        for (double x : v.blocks[t].v) CHECK(x == 0.0);

    Field r = rdtest::random_field(4, 17);
    SpaceTimeVec v1 = rd::assemble_v(r, 1, 0.1);
    CHECK(rdtest::max_abs_diff(v1.blocks[0], r) == 0.0);
}

TEST_CASE("equilibrium state is an exact root for Allen-Cahn") {
    rd::RDModel m = rd::build_model(ModelKind::allen_cahn, 8);
    Field ones(8, 1.0);
    rd::WindowProblem prob = rd::make_window(m, ones, 2, 0.01);
    SpaceTimeVec u = SpaceTimeVec::replicate(2, 0.01, ones);
    SpaceTimeVec F = rd::eval_F(prob, u);
    CHECK(rd::norm_inf(F) < 1e-12);
    CHECK(rd::residual_inf(prob, u) < 1e-10);
}

TEST_CASE("a=b=0 reduces F to the pure time difference") {
    rd::RDModel m = linear_model(0.0);
    m.grid = rd::Grid2D{2, 0.5};
    m.g_op = rd::ones_symbol(m.grid);
    m.l_op = rd::build_neg_laplacian(m.grid);
    m.l_precond = rd::spectral_symbol(m.l_op);
    Field u0 = rdtest::random_field(2, 1);
    rd::WindowProblem prob = rd::make_window(m, u0, 1, 0.25);
    SpaceTimeVec u = rdtest::random_stvec(1, 0.25, 2, 2);
    SpaceTimeVec F = rd::eval_F(prob, u);
    for (int i = 0; i < 4; ++i)
        CHECK(F.blocks[0].v[i] == doctest::Approx(u.blocks[0].v[i] - u0.v[i]).epsilon(1e-15));
}

TEST_CASE("eval_F matches the dense Kronecker oracle") {
    rd::RDModel m = rd::build_model(ModelKind::allen_cahn, 4);
    Field u0 = rdtest::random_field(4, 5);
    rd::WindowProblem prob = rd::make_window(m, u0, 2, 0.002);
    SpaceTimeVec u = rdtest::random_stvec(2, 0.002, 4, 6);
    Eigen::VectorXd dense = rdtest::dense_eval_F(prob, u);
    Eigen::VectorXd fast = rdtest::flatten(rd::eval_F(prob, u));
    CHECK((dense - fast).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("residual_inf definition and h_t scaling") {
    rd::RDModel m = rd::build_model(ModelKind::cahn_hilliard, 8);
    Field u0 = rdtest::random_field(8, 7);
    rd::WindowProblem prob = rd::make_window(m, u0, 2, 0.01);
    SpaceTimeVec u = rdtest::random_stvec(2, 0.01, 8, 8);
    const double finf = rd::norm_inf(rd::eval_F(prob, u));
    CHECK(rd::residual_inf(prob, u) == doctest::Approx(finf / 0.01).epsilon(1e-14));
    CHECK(finf / (2.0 * 0.01) == doctest::Approx(rd::residual_inf(prob, u) / 2.0).epsilon(1e-14));
}

TEST_CASE("exact linear-root windows chain consistently") {
    rd::RDModel m = linear_model(0.01);
    const rd::SpectralDiag& lap = rd::spectral_symbol(m.l_op);
    const double ht = 0.01, a = m.a;
    auto solve_step = [&](const Field& prev) {
        return rd::apply_symbol(lap, [&](double lam) { return 1.0 / (1.0 + ht * a * lam); },
                                prev);
    };
    Field u0 = rdtest::random_field(8, 11);
    Field u1 = solve_step(u0);
    Field u2 = solve_step(u1);

    rd::WindowProblem w1 = rd::make_window(m, u0, 1, ht);
    CHECK(rd::residual_inf(w1, SpaceTimeVec::replicate(1, ht, u1)) < 1e-12);

    // re-assembling V from the window-1 root gives the window-2 problem
    rd::WindowProblem w2 = rd::make_window(m, u1, 1, ht);
    CHECK(rd::residual_inf(w2, SpaceTimeVec::replicate(1, ht, u2)) < 1e-12);

    // one two-step window agrees with the chained single steps
    rd::WindowProblem w12 = rd::make_window(m, u0, 2, ht);
    SpaceTimeVec both = SpaceTimeVec::zeros(2, ht, 8);
    both.blocks[0] = u1;
    both.blocks[1] = u2;
    CHECK(rd::residual_inf(w12, both) < 1e-12);
}

TEST_CASE("DF transpose: pure time-difference case") {
    rd::RDModel m = linear_model(0.0);
    Field u0 = rdtest::random_field(8, 3);
    rd::WindowProblem prob = rd::make_window(m, u0, 3, 0.1);
    SpaceTimeVec u = rdtest::random_stvec(3, 0.1, 8, 4);
    SpaceTimeVec p = rdtest::random_stvec(3, 0.1, 8, 5);
    SpaceTimeVec out = rd::apply_DF_transpose(prob, u, p);
    for (int t = 0; t < 3; ++t)
        for (int i = 0; i < 64; ++i) {
            const double expect =
                p.blocks[t].v[i] - (t + 1 < 3 ? p.blocks[t + 1].v[i] : 0.0);
            CHECK(out.blocks[t].v[i] == doctest::Approx(expect).epsilon(1e-15));
        }
}

TEST_CASE("DF transpose matches the dense Jacobian oracle") {
    rd::RDModel m = rd::build_model(ModelKind::allen_cahn, 4);
    Field u0 = rdtest::random_field(4, 20);
    rd::WindowProblem prob = rd::make_window(m, u0, 2, 0.002);
    SpaceTimeVec u = rdtest::random_stvec(2, 0.002, 4, 21);
    SpaceTimeVec p = rdtest::random_stvec(2, 0.002, 4, 22);
    Eigen::MatrixXd J = rdtest::dense_jacobian(prob, u);
    Eigen::VectorXd dense = J.transpose() * rdtest::flatten(p);
    Eigen::VectorXd fast = rdtest::flatten(rd::apply_DF_transpose(prob, u, p));
    CHECK((dense - fast).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("adjoint consistency across all models and window sizes") {
    const double ht = 0.002;
    for (ModelKind kind : {ModelKind::allen_cahn, ModelKind::cahn_hilliard,
                           ModelKind::var_coeff, ModelKind::sixth_order}) {
        rd::RDModel m = rd::build_model(kind, 8);
        Field u0 = rdtest::random_field(8, 30);
        for (int nt : {1, 2, 3}) {
            rd::WindowProblem prob = rd::make_window(m, u0, nt, ht);
            SpaceTimeVec u = rdtest::random_stvec(nt, ht, 8, 31u + nt);
            SpaceTimeVec w = rdtest::random_stvec(nt, ht, 8, 41u + nt);
            SpaceTimeVec p = rdtest::random_stvec(nt, ht, 8, 51u + nt);
            Eigen::MatrixXd J = rdtest::dense_jacobian(prob, u);
            Eigen::VectorXd wf = rdtest::flatten(w), pf = rdtest::flatten(p);

            // directional finite difference of eval_F validates the Jacobian
            const double eps = 1e-6;
            SpaceTimeVec up = u, um = u;
            rd::add_scaled(up, w, eps);
            rd::add_scaled(um, w, -eps);
            Eigen::VectorXd fd = (rdtest::flatten(rd::eval_F(prob, up)) -
                                  rdtest::flatten(rd::eval_F(prob, um))) /
                                 (2.0 * eps);
            CHECK((fd - J * wf).lpNorm<Eigen::Infinity>() < 1e-6);

            // adjoint identity <DF w, p> = <w, DF^T p> at 1e-10
            const double lhs = (J * wf).dot(pf);
            const double rhs = wf.dot(rdtest::flatten(rd::apply_DF_transpose(prob, u, p)));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("F is affine in u when b=0 (three-point collinearity)") {
    rd::RDModel m = linear_model(0.05);
    Field u0 = rdtest::random_field(8, 60);
    rd::WindowProblem prob = rd::make_window(m, u0, 2, 0.01);
    SpaceTimeVec u1 = rdtest::random_stvec(2, 0.01, 8, 61);
    SpaceTimeVec u2 = rdtest::random_stvec(2, 0.01, 8, 62);
    const double alpha = 0.3;
    SpaceTimeVec mix = rd::lincomb(alpha, u1, 1.0 - alpha, u2);
    SpaceTimeVec fmix = rd::eval_F(prob, mix);
    SpaceTimeVec expected =
        rd::lincomb(alpha, rd::eval_F(prob, u1), 1.0 - alpha, rd::eval_F(prob, u2));
    for (int t = 0; t < 2; ++t)
        CHECK(rdtest::max_abs_diff(fmix.blocks[t], expected.blocks[t]) < 1e-10);
}

TEST_CASE("VarCoeff eval_F uses the true mobility stencil") {
    rd::RDModel m = rd::build_model(ModelKind::var_coeff, 8);
    Field u0 = rdtest::random_field(8, 70);
    rd::WindowProblem prob = rd::make_window(m, u0, 1, 0.01);
    SpaceTimeVec u = rdtest::random_stvec(1, 0.01, 8, 71);

    // oracle built from the stencil operator itself
    Eigen::VectorXd dense = rdtest::dense_eval_F(prob, u);
    Eigen::VectorXd fast = rdtest::flatten(rd::eval_F(prob, u));
    CHECK((dense - fast).lpNorm<Eigen::Infinity>() < 1e-10);

    // swapping in the spectral surrogate changes the answer
    rd::RDModel surrogate = m;
    surrogate.l_op = m.l_precond;
    rd::WindowProblem sprob = rd::make_window(surrogate, u0, 1, 0.01);
    SpaceTimeVec fs = rd::eval_F(sprob, u);
    SpaceTimeVec ft = rd::eval_F(prob, u);
    CHECK(rdtest::max_abs_diff(fs.blocks[0], ft.blocks[0]) > 1e-6);
}

TEST_CASE("shape mismatches raise dim_error") {
    rd::RDModel m = rd::build_model(ModelKind::allen_cahn, 8);
    Field u0 = rdtest::random_field(8, 80);
    rd::WindowProblem prob = rd::make_window(m, u0, 2, 0.01);
    SpaceTimeVec wrong_nt = rdtest::random_stvec(3, 0.01, 8, 81);
    CHECK_THROWS_AS(rd::eval_F(prob, wrong_nt), rd::dim_error);
    SpaceTimeVec wrong_nx = rdtest::random_stvec(2, 0.01, 4, 82);
    CHECK_THROWS_AS(rd::eval_F(prob, wrong_nx), rd::dim_error);
    CHECK_THROWS_AS(rd::make_window(m, Field(4), 2, 0.01), rd::dim_error);
}
