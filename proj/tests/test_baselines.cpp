#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dense_oracle.hpp"
#include "rd/baselines.hpp"
#include "rd/errors.hpp"
#include "rd/pdhg.hpp"
#include "rd/theory.hpp"
#include "testutil.hpp"

using namespace rd;
using rdtest::dense_operator;
using rdtest::random_field;

namespace {

Field smooth_field(const Grid2D& grid) {
    Field u(grid.nx);
    const double k = 2.0 * M_PI / grid.length;
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.nx; ++j)
            u(i, j) = 0.4 * std::cos(k * i * grid.hx()) *
                          std::sin(k * j * grid.hx()) +
                      0.1;
    return u;
}

Eigen::VectorXd to_eigen(const Field& f) {
    Eigen::VectorXd x(static_cast<long>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) x[static_cast<long>(i)] = f.v[i];
    return x;
}

Field from_eigen(const Eigen::VectorXd& x, int nx) {
    Field f(nx);
    for (std::size_t i = 0; i < f.size(); ++i) f.v[i] = x[static_cast<long>(i)];
    return f;
}

// Root of the one-step implicit system via the space-time solver with nt = 1.
Field pdhg_root(const RDModel& m, const Field& u_t, double ht, double abs_tol) {
    const WindowProblem prob = make_window(m, u_t, 1, ht);
    const Precond pc = build_precond(m, 1, ht);
    PdhgParams pp;
    pp.tol = abs_tol / ht; // solver tolerance is on the ht-scaled residual
    pp.max_iter = 20000;
    auto [u, stats] = solve_window(prob, pc, pp);
    REQUIRE(stats.converged);
    return u.blocks[0];
}

} // namespace

TEST_CASE("imex step fixes constants and equilibria") {
    RDModel free_model = build_model(ModelKind::allen_cahn, 8);
    free_model.b = 0.0;
    Field c(8, 0.7);
    const Field out = imex_step(free_model, c, 1e-2);
    CHECK(rdtest::max_abs_diff(out, c) < 1e-13);

    const RDModel ac = build_model(ModelKind::allen_cahn, 8);
    Field one(8, 1.0);
    CHECK(rdtest::max_abs_diff(imex_step(ac, one, 1e-3), one) < 1e-13);
}

TEST_CASE("imex step matches the dense direct solve") {
    const int nx = 4;
    const double ht = 1e-3;
    for (ModelKind kind : {ModelKind::allen_cahn, ModelKind::cahn_hilliard,
                           ModelKind::sixth_order, ModelKind::var_coeff}) {
        const RDModel m = build_model(kind, nx);
        const Field u = random_field(nx, 7);

        const long N = nx * nx;
        const Eigen::MatrixXd G = dense_operator(m.g_op, nx);
        const Eigen::MatrixXd L = dense_operator(m.l_op, nx);
        const Eigen::MatrixXd A =
            Eigen::MatrixXd::Identity(N, N) + m.a * ht * G * L;
        Eigen::VectorXd fu(N);
        for (long i = 0; i < N; ++i) fu[i] = m.reaction.f(u.v[i]);
        const Eigen::VectorXd rhs = to_eigen(u) - m.b * ht * (G * fu);
        const Eigen::VectorXd want = A.partialPivLu().solve(rhs);

        const Field got = imex_step(m, u, ht);
        CHECK((to_eigen(got) - want).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("imex step is second-order consistent with explicit Euler") {
    const RDModel m = build_model(ModelKind::allen_cahn, 8);
    const Field u = smooth_field(m.grid);

    auto euler_gap = [&](double ht) {
        Field fu(8);
        for (std::size_t i = 0; i < fu.size(); ++i) fu.v[i] = m.reaction.f(u.v[i]);
        Field lu = apply_operator(m.l_op, u);
        Field mix = lincomb(m.a, lu, m.b, fu);
        Field gu = apply_operator(m.g_op, mix);
        Field euler = lincomb(1.0, u, -ht, gu);
        return rdtest::max_abs_diff(imex_step(m, u, ht), euler);
    };
    const double e1 = euler_gap(1e-5);
    const double e2 = euler_gap(5e-6);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("pcg solves the identity in one iteration") {
    const Field rhs = random_field(5, 3);
    const LinearApply id = [](const Field& in, Field& out) { out = in; };
    PcgStats st;
    const Field x = pcg_solve(id, id, rhs, {1e-10, 10}, &st);
    CHECK(rdtest::max_abs_diff(x, rhs) < 1e-14);
    CHECK(st.iterations == 1);
    CHECK(st.res_inf <= 1e-10);
}

TEST_CASE("pcg matches a dense SPD direct solve") {
    const int nx = 3;
    const long N = nx * nx;
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::MatrixXd B(N, N);
    for (long i = 0; i < N; ++i)
        for (long j = 0; j < N; ++j) B(i, j) = dist(rng);
    const Eigen::MatrixXd A = B.transpose() * B + Eigen::MatrixXd::Identity(N, N);

    const Field rhs = random_field(nx, 5);
    const LinearApply apply_A = [&](const Field& in, Field& out) {
        out = from_eigen(A * to_eigen(in), nx);
    };
    const LinearApply id = [](const Field& in, Field& out) { out = in; };

    PcgStats st;
    const Field x = pcg_solve(apply_A, id, rhs, {1e-10, 200}, &st);
    const Eigen::VectorXd want = A.partialPivLu().solve(to_eigen(rhs));
    CHECK((to_eigen(x) - want).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((A * to_eigen(x) - to_eigen(rhs)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("pcg reports breakdown and non-convergence") {
    const Field rhs = random_field(4, 9);
    const LinearApply neg = [](const Field& in, Field& out) {
        out = in;
        scale(out, -1.0);
    };
    const LinearApply id = [](const Field& in, Field& out) { out = in; };
    CHECK_THROWS_AS(pcg_solve(neg, id, rhs, {1e-10, 10}), solve_error);

    // Laplacian-dominated SPD system, one iteration only.
    const RDModel m = build_model(ModelKind::allen_cahn, 16);
    const LinearApply apply_A = [&](const Field& in, Field& out) {
        Field lu = apply_operator(m.l_op, in);
        kernels::lincomb(out.data(), 1.0, in.data(), 1.0, lu.data(), out.size());
    };
    CHECK_THROWS_AS(pcg_solve(apply_A, id, random_field(16, 10), {1e-12, 1}),
                    solve_error);
    CHECK_THROWS_AS(pcg_solve(apply_A, id, random_field(16, 10), {-1.0, 10}),
                    domain_error);
}

TEST_CASE("preconditioned pcg iteration count is grid independent") {
    // Newton's first Jacobian system for AC, preconditioned by the exact
    // constant-coefficient block inverse; diag(f') vs c is the only mismatch.
    std::vector<int> counts;
    for (int nx : {32, 64, 128}) {
        const RDModel m = build_model(ModelKind::allen_cahn, nx);
        const double ht = 2e-3;
        const Field u = initial_field(ModelKind::allen_cahn, m.grid);
        Field fpu(nx);
        for (std::size_t i = 0; i < fpu.size(); ++i)
            fpu.v[i] = m.reaction.f_prime(u.v[i]);

        const LinearApply apply_J = [&](const Field& in, Field& out) {
            Field lu = apply_operator(m.l_op, in);
            for (std::size_t i = 0; i < out.size(); ++i)
                out.v[i] = in.v[i] + ht * (m.a * lu.v[i] +
                                           m.b * fpu.v[i] * in.v[i]);
        };
        const SpectralDiag& l = spectral_symbol(m.l_op);
        const SpectralDiag inv = map_symbol(l, [&](double lam) {
            return 1.0 / (1.0 + ht * (m.a * lam + m.b * m.reaction.c));
        });
        const LinearApply apply_P = [&](const Field& in, Field& out) {
            apply_diag(inv, in, out);
        };
        PcgStats st;
        pcg_solve(apply_J, apply_P, random_field(nx, 13), {1e-10, 500}, &st);
        counts.push_back(st.iterations);
    }
    for (int c : counts) {
        CHECK(std::abs(c - counts[0]) <= 3);
    }
}

TEST_CASE("fixed point solves a linear reaction in one pass") {
    RDModel m = build_model(ModelKind::allen_cahn, 8);
    m.reaction.f = [](double u) { return 2.0 * u; };
    m.reaction.f_prime = [](double) { return 2.0; };
    const double ht = 1e-3;
    const Field u0 = smooth_field(m.grid);

    const Field got = fixed_point_solve(m, u0, ht, 1e-11, 1);
    const SpectralDiag& l = spectral_symbol(m.l_op);
    const SpectralDiag inv = map_symbol(l, [&](double lam) {
        return 1.0 / (1.0 + ht * (m.a * lam + m.b * 2.0));
    });
    CHECK(rdtest::max_abs_diff(got, apply_diag(inv, u0)) < 1e-12);

    const RDModel ac = build_model(ModelKind::allen_cahn, 8);
    Field one(8, 1.0);
    CHECK(rdtest::max_abs_diff(fixed_point_solve(ac, one, 1e-3, 1e-12, 5), one) ==
          0.0);
}

TEST_CASE("nonlinear SOR handles equilibria and linear limits") {
    const RDModel ac = build_model(ModelKind::allen_cahn, 8);
    Field one(8, 1.0);
    int sweeps = -1;
    CHECK(rdtest::max_abs_diff(nonlinear_sor_solve(ac, one, 1e-3, 1.0, 1e-12, &sweeps),
                               one) == 0.0);
    CHECK(sweeps <= 1);

    // f == 0 reduces the sweep to Gauss-Seidel on (I + ht a L) U = u^t.
    RDModel lin = build_model(ModelKind::allen_cahn, 8);
    lin.reaction.f = [](double) { return 0.0; };
    lin.reaction.f_prime = [](double) { return 0.0; };
    const double ht = 1e-3;
    const Field u0 = smooth_field(lin.grid);
    const Field got = nonlinear_sor_solve(lin, u0, ht, 1.0, 1e-9);
    const SpectralDiag inv = map_symbol(
        spectral_symbol(lin.l_op),
        [&](double lam) { return 1.0 / (1.0 + ht * lin.a * lam); });
    CHECK(rdtest::max_abs_diff(got, apply_diag(inv, u0)) < 1e-8);

    const RDModel ch = build_model(ModelKind::cahn_hilliard, 8);
    CHECK_THROWS_AS(nonlinear_sor_solve(ch, u0, 1e-4, 1.0, 1e-8), domain_error);
}

TEST_CASE("newton converges immediately at an equilibrium") {
    const RDModel ac = build_model(ModelKind::allen_cahn, 8);
    Field one(8, 1.0);
    std::vector<double> hist;
    const Field got = newton_solve(ac, one, 1e-3, {}, 1e-10, &hist);
    CHECK(rdtest::max_abs_diff(got, one) == 0.0);
    CHECK(hist.size() == 1);
}

TEST_CASE("newton outer residuals decay quadratically") {
    const RDModel m = build_model(ModelKind::allen_cahn, 32);
    const Field u0 = initial_field(ModelKind::allen_cahn, m.grid);
    std::vector<double> hist;
    newton_solve(m, u0, 2e-3, {}, 1e-12, &hist);
    REQUIRE(hist.size() >= 3);
    for (std::size_t k = 0; k + 1 < hist.size(); ++k) {
        CHECK(hist[k + 1] < hist[k]);
        if (hist[k + 1] > 1e-9) // above the eta = 1e-10 inner-solve floor
            CHECK(hist[k + 1] <= 20.0 * hist[k] * hist[k]);
    }
}

TEST_CASE("newton agrees with the space-time solver on Cahn-Hilliard") {
    const RDModel m = build_model(ModelKind::cahn_hilliard, 32, {0.1, 5.0});
    const Field u0 = initial_field(ModelKind::cahn_hilliard, m.grid);
    const double ht = 5e-5;
    const Field newton = newton_solve(m, u0, ht, {}, 1e-10);
    const Field pdhg = pdhg_root(m, u0, ht, 1e-9);
    CHECK(rdtest::max_abs_diff(newton, pdhg) < 1e-6);
}

TEST_CASE("SOR agrees with the space-time solver on the benchmark setting") {
    const RDModel m = build_model(ModelKind::allen_cahn, 64, {0.1, 5.0});
    const Field u0 = initial_field(ModelKind::allen_cahn, m.grid);
    const double ht = 5e-3;
    const Field sor = nonlinear_sor_solve(m, u0, ht, 1.0, 1e-9);
    const Field pdhg = pdhg_root(m, u0, ht, 1e-9);
    CHECK(rdtest::max_abs_diff(sor, pdhg) < 1e-6);
}

TEST_CASE("SOR and newton agree on the variable-mobility model") {
    const RDModel m = build_model(ModelKind::var_coeff, 16);
    const Field u0 = initial_field(ModelKind::var_coeff, m.grid);
    const double ht = 1e-3;
    const Field sor = nonlinear_sor_solve(m, u0, ht, 1.0, 5e-9);
    const Field newton = newton_solve(m, u0, ht, {}, 1e-10);
    CHECK(rdtest::max_abs_diff(sor, newton) < 1e-7);
}

TEST_CASE("all solvers land on the unique implicit root") {
    const RDModel m = build_model(ModelKind::allen_cahn, 32, {0.1, 5.0});
    const Field u0 = initial_field(ModelKind::allen_cahn, m.grid);
    const double ht = 2e-6; // small enough that the IMEX O(ht^2) gap vanishes
    REQUIRE(ht < existence_ht_max(m));

    std::vector<Field> roots;
    roots.push_back(imex_step(m, u0, ht));
    roots.push_back(fixed_point_solve(m, u0, ht, 1e-9, 500));
    roots.push_back(nonlinear_sor_solve(m, u0, ht, 1.0, 1e-9));
    roots.push_back(newton_solve(m, u0, ht, {}, 1e-9));
    roots.push_back(pdhg_root(m, u0, ht, 1e-9));
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            CHECK(rdtest::max_abs_diff(roots[i], roots[j]) < 1e-6);
}
