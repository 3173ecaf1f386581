#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <set>

#include "saddle/dense_eigen.hpp"
#include "saddle/generate.hpp"
#include "saddle/krylov.hpp"
#include "saddle/preconditioner.hpp"
#include "saddle/theory.hpp"
#include "test_support.hpp"

using namespace saddle;
using saddle::testing::random_problem;
using saddle::testing::scalar_problem;

TEST_CASE("preconditioner application") {
    SECTION("scalar instance by forward substitution") {
        auto pr = scalar_problem();
        const auto pc = Preconditioner::gsor_lower(pr, 1.0, 1.0);
        const Vec v = pc.apply({2.0, 0.0, 0.0});
        REQUIRE(v[0] == Catch::Approx(1.0));
        REQUIRE(v[1] == Catch::Approx(1.0));
        REQUIRE(v[2] == Catch::Approx(1.0));
    }
    SECTION("inverse round trip") {
        auto pr = random_problem(800, 24, 60);
        Rng rng(3);
        for (auto kind : {0, 1, 2}) {
            const Preconditioner pc =
                kind == 0   ? Preconditioner::gsor_lower(pr, 0.8, 1.3)
                : kind == 1 ? Preconditioner::block_diagonal(pr)
                            : Preconditioner::block_triangular(pr);
            const DenseMatrix M = pc.dense();
            Vec v(pr.total());
            for (auto& t : v) t = rng.uniform(-1, 1);
            const Vec back = pc.apply(M.apply(v));
            for (int i = 0; i < pr.total(); ++i)
                REQUIRE(back[i] == Catch::Approx(v[i]).margin(1e-10 * std::max(1.0, norm_inf(v))));
        }
    }
    SECTION("three SPD solves per application") {
        auto pr = random_problem(801, 24, 60);
        const auto pc = Preconditioner::gsor_lower(pr, 1.0, 1.0);
        Vec r(pr.total(), 1.0);
        const auto before = spd_solve_count();
        pc.apply(r);
        REQUIRE(spd_solve_count() - before == 3);
    }
}

TEST_CASE("both layouts precondition to the identical matrix") {
    auto pr = random_problem(802, 24, 60);
    const auto sym = Preconditioner::gsor_lower(pr, 0.7, 1.2, BlockLayout::Symmetric);
    const auto unsym = Preconditioner::gsor_lower(pr, 0.7, 1.2, BlockLayout::Unsymmetric);
    const DenseMatrix lhs = preconditioned_matrix(sym);
    const DenseMatrix rhs = preconditioned_matrix(unsym);
    REQUIRE(max_abs_diff(lhs, rhs) <= 1e-12 * std::max(1.0, lhs.max_abs()));
}

TEST_CASE("preconditioned spectrum structure") {
    auto pr = random_problem(803, 30, 70);
    for (double tau : {0.5, 1.0})
        for (double theta : {0.5, 1.0}) {
            const auto pc = Preconditioner::gsor_lower(pr, tau, theta);
            const auto spectrum = preconditioned_spectrum(pc);
            const auto si = preconditioned_interval(spectral_data(pr), tau, theta);
            int ones = 0;
            for (const auto& ev : spectrum) {
                REQUIRE(std::abs(ev.imag()) <= 1e-8);  // real
                REQUIRE(ev.real() > 0.0);              // positive
                if (std::abs(ev - std::complex<double>(1.0, 0.0)) <= 1e-8) {
                    ++ones;
                    continue;
                }
                CAPTURE(tau, theta, ev.real());
                REQUIRE(ev.real() >= si.lambda_lower - 1e-8);
                REQUIRE(ev.real() <= si.lambda_upper + 1e-8);
            }
            REQUIRE(ones >= pr.n());
        }
}

TEST_CASE("identity-block problem spectrum") {
    // A = I, B = I, C = 0, D = I with m = n: the preconditioned matrix has
    // eigenvalue 1 (n-fold) plus tau and theta clusters from the oracle
    const int n = 6;
    auto pr = DoubleSaddleProblem(SparseMatrix::identity(n), SparseMatrix::identity(n),
                                  SparseMatrix(2, n), SparseMatrix::identity(2),
                                  SparseMatrix::identity(n), Vec(n, 0.0), Vec(n, 0.0),
                                  Vec(2, 0.0));
    const auto pc = Preconditioner::gsor_lower(pr, 1.0, 1.0);
    int ones = 0;
    for (const auto& ev : preconditioned_spectrum(pc))
        if (std::abs(ev - std::complex<double>(1.0, 0.0)) <= 1e-8) ++ones;
    REQUIRE(ones >= n);
}

TEST_CASE("gmres basics") {
    SECTION("identity operator converges in one iteration") {
        const auto op = make_operator(DenseMatrix::identity(8));
        Vec b(8, 0.0);
        b[3] = 2.0;
        const auto [x, report] = gmres_solve(op, nullptr, b);
        REQUIRE(report.status == SolveStatus::Converged);
        REQUIRE(report.iterations == 1);
        REQUIRE(x[3] == Catch::Approx(2.0).epsilon(1e-10));
    }
    SECTION("zero right-hand side") {
        const auto op = make_operator(DenseMatrix::identity(5));
        const auto [x, report] = gmres_solve(op, nullptr, Vec(5, 0.0));
        REQUIRE(report.status == SolveStatus::Converged);
        REQUIRE(report.iterations == 0);
        REQUIRE(report.residual_absolute);
    }
}

TEST_CASE("preconditioned gmres hits the clustering bound") {
    for (std::uint64_t seed : {810ull, 811ull, 812ull}) {
        auto pr = random_problem(seed, 40, 120);
        const auto pc = Preconditioner::gsor_lower(pr, 1.0, 1.0);
        const auto op = make_operator(assemble(pr, BlockLayout::Symmetric));
        KrylovOptions opts;
        opts.tol = 1e-10;
        opts.restart = pr.total() + 10;  // the bound argument needs an unrestarted cycle
        const auto [x, report] = gmres_solve(op, &pc, pr.rhs(), opts);
        CAPTURE(seed, pr.n(), pr.m(), pr.p(), report.iterations);
        REQUIRE(report.status == SolveStatus::Converged);
        REQUIRE(report.final_res <= 1e-10);
        REQUIRE(report.iterations <= pr.m() + pr.p() + 6);
        REQUIRE(residual_norm(pr, x) <= 1e-10);
    }
}

TEST_CASE("left-preconditioned gmres matches plain gmres on the preconditioned system") {
    auto pr = random_problem(820, 24, 50);
    const auto pc = Preconditioner::gsor_lower(pr, 1.0, 1.0);
    const auto sym = assemble(pr, BlockLayout::Symmetric);

    KrylovOptions opts;
    opts.tol = 1e-9;
    opts.restart = pr.total() + 10;
    const auto [x1, r1] = gmres_solve(make_operator(sym), &pc, pr.rhs(), opts);

    // explicitly preconditioned dense system with an identity preconditioner
    const DenseMatrix PA = preconditioned_matrix(pc);
    const Vec pb = pc.apply(pr.rhs());
    KrylovOptions opts2 = opts;
    opts2.max_iter = r1.iterations;  // same Krylov depth
    opts2.tol = 1e-300;
    const auto [x2, r2] = gmres_solve(make_operator(PA), nullptr, pb, opts2);

    for (int i = 0; i < pr.total(); ++i)
        REQUIRE(x1[i] == Catch::Approx(x2[i]).margin(1e-9 * std::max(1.0, norm_inf(x1))));
}

TEST_CASE("gmres with comparison preconditioners") {
    auto pr = random_problem(830, 30, 70);
    const auto op = make_operator(assemble(pr, BlockLayout::Symmetric));
    for (int kind = 0; kind < 2; ++kind) {
        const Preconditioner pc = kind == 0 ? Preconditioner::block_diagonal(pr)
                                            : Preconditioner::block_triangular(pr);
        const auto [x, report] = gmres_solve(op, &pc, pr.rhs());
        CAPTURE(kind);
        REQUIRE(report.status == SolveStatus::Converged);
        REQUIRE(residual_norm(pr, x) <= 1e-8);
    }
}

TEST_CASE("minres basics") {
    SECTION("diagonal SPD operator converges in as many iterations as distinct values") {
        const int n = 30;
        DenseMatrix d(n, n);
        for (int i = 0; i < n; ++i) d(i, i) = 1.0 + (i % 3);  // values 1, 2, 3
        Rng rng(9);
        Vec b(n);
        for (auto& v : b) v = rng.uniform(-1, 1);
        const auto [x, report] = minres_solve(make_operator(d), nullptr, b);
        REQUIRE(report.status == SolveStatus::Converged);
        REQUIRE(report.iterations <= 3);
    }
    SECTION("zero right-hand side") {
        const auto [x, report] = minres_solve(make_operator(DenseMatrix::identity(4)), nullptr,
                                              Vec(4, 0.0));
        REQUIRE(report.status == SolveStatus::Converged);
        REQUIRE(report.iterations == 0);
        REQUIRE(x == Vec(4, 0.0));
    }
    SECTION("non-SPD preconditioner kinds are rejected") {
        auto pr = random_problem(840, 24, 40);
        const auto op = make_operator(assemble(pr, BlockLayout::Symmetric));
        const auto bad = Preconditioner::gsor_lower(pr, 1.0, 1.0);
        REQUIRE_THROWS_AS(minres_solve(op, &bad, pr.rhs()), Error);
        const auto bad2 = Preconditioner::block_triangular(pr);
        REQUIRE_THROWS_AS(minres_solve(op, &bad2, pr.rhs()), Error);
    }
}

TEST_CASE("block-diagonal preconditioned minres solves desk problems") {
    for (std::uint64_t seed : {850ull, 851ull}) {
        auto pr = random_problem(seed, 30, 90);
        const auto pc = Preconditioner::block_diagonal(pr);
        const auto op = make_operator(assemble(pr, BlockLayout::Symmetric));
        const auto [x, report] = minres_solve(op, &pc, pr.rhs());
        CAPTURE(seed, report.iterations, report.final_res);
        REQUIRE(report.status == SolveStatus::Converged);
        REQUIRE(residual_norm(pr, x) <= 1e-8);
    }
}

TEST_CASE("unpreconditioned minres on the symmetric saddle system") {
    auto pr = random_problem(860, 24, 40);
    const auto op = make_operator(assemble(pr, BlockLayout::Symmetric));
    KrylovOptions opts;
    opts.max_iter = 20000;
    const auto [x, report] = minres_solve(op, nullptr, pr.rhs(), opts);
    REQUIRE(report.status == SolveStatus::Converged);
    REQUIRE(residual_norm(pr, x) <= 1e-8);
}
