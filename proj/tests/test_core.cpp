#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <sstream>

#include "saddle/dense.hpp"
#include "saddle/dense_eigen.hpp"
#include "saddle/factor.hpp"
#include "saddle/lanczos.hpp"
#include "saddle/matrix_market.hpp"
#include "saddle/rng.hpp"
#include "saddle/sparse.hpp"

using namespace saddle;

namespace {

SparseMatrix random_spd(Rng& rng, int n, double density = 0.25) {
    // A = L L^T + n I with random sparse L keeps things safely SPD
    std::vector<Triplet> trips;
    for (int i = 0; i < n; ++i) {
        trips.push_back({i, i, rng.uniform(0.5, 1.5)});
        for (int j = 0; j < i; ++j)
            if (rng.next_double() < density) trips.push_back({i, j, rng.uniform(-1.0, 1.0)});
    }
    auto L = SparseMatrix::from_triplets(n, n, std::move(trips));
    std::vector<Triplet> out;
    DenseMatrix Ld = DenseMatrix::from_sparse(L);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = i == j ? 0.1 : 0.0;
            for (int k = 0; k < n; ++k) s += Ld(i, k) * Ld(j, k);
            if (s != 0.0) out.push_back({i, j, s});
        }
    return SparseMatrix::from_triplets(n, n, std::move(out));
}

}  // namespace

TEST_CASE("sparse canonical form") {
    auto m = SparseMatrix::from_triplets(
        2, 3, {{1, 2, 3.0}, {0, 1, 1.0}, {1, 2, -1.0}, {0, 0, 2.0}, {1, 0, 0.0}});
    // duplicates summed, zeros dropped, columns increasing
    REQUIRE(m.nnz() == 3);
    REQUIRE(m.coeff(0, 0) == 2.0);
    REQUIRE(m.coeff(0, 1) == 1.0);
    REQUIRE(m.coeff(1, 2) == 2.0);
    REQUIRE(m.coeff(1, 0) == 0.0);
    for (int i = 0; i < m.rows(); ++i)
        for (int k = m.row_ptr()[i] + 1; k < m.row_ptr()[i + 1]; ++k)
            REQUIRE(m.col_idx()[k] > m.col_idx()[k - 1]);
}

TEST_CASE("spmv examples") {
    auto id = SparseMatrix::identity(3);
    REQUIRE(id.apply({1.0, 2.0, 3.0}) == Vec{1.0, 2.0, 3.0});

    SparseMatrix zero(3, 3);
    REQUIRE(zero.apply({4.0, 5.0, 6.0}) == Vec{0.0, 0.0, 0.0});

    auto m = SparseMatrix::from_triplets(2, 2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}});
    REQUIRE(m.apply({1.0, 1.0}) == Vec{3.0, 4.0});

    REQUIRE_THROWS_AS(m.apply({1.0, 2.0, 3.0}), DimensionError);
}

TEST_CASE("spmv transpose agrees with explicit transpose") {
    Rng rng(7);
    auto m = SparseMatrix::from_triplets(
        5, 7, {{0, 6, 1.5}, {2, 0, -2.0}, {4, 3, 0.5}, {1, 1, 3.0}, {3, 2, -1.0}});
    Vec x(5);
    for (auto& v : x) v = rng.uniform(-1, 1);
    const Vec a = m.apply_transpose(x);
    const Vec b = m.transpose().apply(x);
    for (int i = 0; i < 7; ++i) REQUIRE(a[i] == Catch::Approx(b[i]).margin(1e-15));
}

TEST_CASE("cholesky examples") {
    SECTION("identity") {
        auto f = cholesky_factor(SparseMatrix::identity(2));
        REQUIRE(f.kind() == FactorKind::Tridiagonal);  // bandwidth 0 takes the O(n) path
        REQUIRE(cholesky_solve(f, {5.0, -3.0}) == Vec{5.0, -3.0});
    }
    SECTION("diagonal") {
        auto f = cholesky_factor(SparseMatrix::diagonal({2.0, 4.0}));
        REQUIRE(cholesky_solve(f, {2.0, 4.0}) == Vec{1.0, 1.0});
    }
    SECTION("dense 2x2 hand factorization") {
        auto m = SparseMatrix::from_triplets(
            2, 2, {{0, 0, 4.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 3.0}});
        // force the dense path to inspect L itself
        auto f = CholeskyFactor::dense_from_sparse(m);
        const auto& L = f.dense_lower();
        REQUIRE(L[0] == Catch::Approx(2.0));
        REQUIRE(L[2] == Catch::Approx(1.0));
        REQUIRE(L[3] == Catch::Approx(std::sqrt(2.0)));
        // L L^T reconstructs the input
        DenseMatrix Ld(2, 2);
        Ld(0, 0) = L[0];
        Ld(1, 0) = L[2];
        Ld(1, 1) = L[3];
        const DenseMatrix R = Ld.multiply(Ld.transpose());
        REQUIRE(max_abs_diff(R, DenseMatrix::from_sparse(m)) <=
                1e-12 * DenseMatrix::from_sparse(m).frobenius_norm());
        const Vec sol = cholesky_solve(f, {6.0, 5.0});
        REQUIRE(sol[0] == Catch::Approx(1.0).epsilon(1e-12));
        REQUIRE(sol[1] == Catch::Approx(1.0).epsilon(1e-12));
    }
    SECTION("indefinite rejected") {
        auto m = SparseMatrix::from_triplets(
            2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 1.0}});
        REQUIRE_THROWS_AS(cholesky_factor(m), NotPositiveDefiniteError);
    }
    SECTION("asymmetric rejected, not symmetrized") {
        auto m = SparseMatrix::from_triplets(
            2, 2, {{0, 0, 4.0}, {0, 1, 2.0}, {1, 0, 2.5}, {1, 1, 3.0}});
        REQUIRE_THROWS_AS(cholesky_factor(m), SymmetryError);
    }
}

TEST_CASE("tridiagonal path") {
    Rng rng(11);
    const int n = 40;
    std::vector<Triplet> t;
    Vec diag(n), off(n - 1);
    for (int i = 0; i < n; ++i) diag[i] = rng.uniform(2.0, 3.0);
    for (int i = 0; i + 1 < n; ++i) off[i] = rng.uniform(-0.5, 0.5);
    for (int i = 0; i < n; ++i) t.push_back({i, i, diag[i]});
    for (int i = 0; i + 1 < n; ++i) {
        t.push_back({i, i + 1, off[i]});
        t.push_back({i + 1, i, off[i]});
    }
    auto m = SparseMatrix::from_triplets(n, n, std::move(t));
    REQUIRE(m.bandwidth() == 1);
    auto f = cholesky_factor(m);
    REQUIRE(f.kind() == FactorKind::Tridiagonal);

    Vec b(n);
    for (auto& v : b) v = rng.uniform(-1, 1);
    const Vec x = cholesky_solve(f, b);
    Vec r = m.apply(x);
    axpy(-1.0, b, r);
    REQUIRE(norm2(r) <= 1e-10 * norm2(b));

    // unit-lower times U reconstructs the matrix
    DenseMatrix L = DenseMatrix::identity(n), U(n, n);
    for (int i = 0; i + 1 < n; ++i) L(i + 1, i) = f.tri_sub()[i];
    for (int i = 0; i < n; ++i) U(i, i) = f.tri_diag()[i];
    for (int i = 0; i + 1 < n; ++i) U(i, i + 1) = f.tri_super()[i];
    REQUIRE(max_abs_diff(L.multiply(U), DenseMatrix::from_sparse(m)) <=
            1e-12 * DenseMatrix::from_sparse(m).frobenius_norm());
}

TEST_CASE("cholesky solve round trip property") {
    Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_below(30));
        auto m = random_spd(rng, n);
        auto f = cholesky_factor(m);
        Vec b(n);
        for (auto& v : b) v = rng.uniform(-2, 2);
        const Vec x = cholesky_solve(f, b);
        Vec r = m.apply(x);
        axpy(-1.0, b, r);
        REQUIRE(norm2(r) <= 1e-10 * std::max(norm2(b), 1e-30));
    }
}

TEST_CASE("factorization reconstructs input") {
    Rng rng(31);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_below(20));
        auto m = random_spd(rng, n);
        auto f = CholeskyFactor::dense_from_sparse(m);
        DenseMatrix L(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) L(i, j) = f.dense_lower()[i * n + j];
        const DenseMatrix R = L.multiply(L.transpose());
        const DenseMatrix M = DenseMatrix::from_sparse(m);
        REQUIRE(max_abs_diff(R, M) <= 1e-12 * M.frobenius_norm());
    }
}

TEST_CASE("dense eigenvalues examples") {
    SECTION("diagonal") {
        DenseMatrix m(3, 3);
        m(0, 0) = 1;
        m(1, 1) = 2;
        m(2, 2) = 3;
        auto ev = dense_eigenvalues(m);
        std::vector<double> re;
        for (auto& e : ev) re.push_back(e.real());
        std::sort(re.begin(), re.end());
        REQUIRE(re[0] == Catch::Approx(1.0).epsilon(1e-10));
        REQUIRE(re[1] == Catch::Approx(2.0).epsilon(1e-10));
        REQUIRE(re[2] == Catch::Approx(3.0).epsilon(1e-10));
    }
    SECTION("rotation has eigenvalues +-i") {
        DenseMatrix m(2, 2);
        m(0, 1) = -1;
        m(1, 0) = 1;
        auto ev = dense_eigenvalues(m);
        std::sort(ev.begin(), ev.end(),
                  [](auto a, auto b) { return a.imag() < b.imag(); });
        REQUIRE(ev[0].real() == Catch::Approx(0.0).margin(1e-10));
        REQUIRE(ev[0].imag() == Catch::Approx(-1.0).epsilon(1e-10));
        REQUIRE(ev[1].imag() == Catch::Approx(1.0).epsilon(1e-10));
    }
    SECTION("companion of a triple root") {
        // lambda^3 - 1.5 lambda^2 + 0.75 lambda - 0.125 = (lambda - 0.5)^3.
        // A defective triple eigenvalue is only computable to ~eps^(1/3); the
        // mean is accurate to rounding.
        DenseMatrix m(3, 3);
        m(0, 2) = 0.125;
        m(1, 2) = -0.75;
        m(2, 2) = 1.5;
        m(1, 0) = 1;
        m(2, 1) = 1;
        auto ev = dense_eigenvalues(m);
        std::complex<double> mean = 0;
        for (auto& e : ev) {
            REQUIRE(std::abs(e - std::complex<double>(0.5, 0.0)) < 1e-4);
            mean += e / 3.0;
        }
        REQUIRE(std::abs(mean - std::complex<double>(0.5, 0.0)) < 1e-10);
    }
    SECTION("guards") {
        REQUIRE_THROWS_AS(dense_eigenvalues(DenseMatrix(2, 3)), DimensionError);
        REQUIRE_THROWS_AS(dense_eigenvalues(DenseMatrix(2001, 2001)), DenseThresholdError);
    }
}

TEST_CASE("dense eigenvalues validated against characteristic roots, order <= 4") {
    // fixed small matrices whose characteristic polynomials factor by hand
    SECTION("order 2") {
        DenseMatrix m(2, 2);
        m(0, 0) = 1;
        m(0, 1) = 2;
        m(1, 0) = 2;
        m(1, 1) = 1;  // eigenvalues 3, -1
        auto ev = dense_eigenvalues(m);
        std::vector<double> re{ev[0].real(), ev[1].real()};
        std::sort(re.begin(), re.end());
        REQUIRE(re[0] == Catch::Approx(-1.0).epsilon(1e-8));
        REQUIRE(re[1] == Catch::Approx(3.0).epsilon(1e-8));
    }
    SECTION("order 4 block diagonal") {
        DenseMatrix m(4, 4);
        m(0, 0) = 2;                  // 2
        m(1, 1) = -5;                 // -5
        m(2, 2) = 0;
        m(2, 3) = -4;
        m(3, 2) = 1;
        m(3, 3) = 0;                  // +-2i
        auto ev = dense_eigenvalues(m);
        double found2 = 0, foundm5 = 0, foundim = 0;
        for (auto& e : ev) {
            if (std::abs(e - std::complex<double>(2, 0)) < 1e-8) found2++;
            if (std::abs(e - std::complex<double>(-5, 0)) < 1e-8) foundm5++;
            if (std::abs(std::abs(e.imag()) - 2.0) < 1e-8 && std::abs(e.real()) < 1e-8)
                foundim++;
        }
        REQUIRE(found2 == 1);
        REQUIRE(foundm5 == 1);
        REQUIRE(foundim == 2);
    }
}

TEST_CASE("transpose spectrum multiset property") {
    Rng rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_below(12));
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1, 1);
        auto a = dense_eigenvalues(m);
        auto b = dense_eigenvalues(m.transpose());
        auto key = [](const std::complex<double>& x, const std::complex<double>& y) {
            if (x.real() != y.real()) return x.real() < y.real();
            return x.imag() < y.imag();
        };
        std::sort(a.begin(), a.end(), key);
        std::sort(b.begin(), b.end(), key);
        for (int i = 0; i < n; ++i) REQUIRE(std::abs(a[i] - b[i]) < 1e-8);
    }
}

TEST_CASE("extremal symmetric eigenvalue") {
    SECTION("diagonal operator") {
        const auto op = [](const Vec& in, Vec& out) {
            out = in;
            out[0] *= 1.0;
            out[1] *= 2.0;
            out[2] *= 3.0;
        };
        auto top = extremal_symmetric_eigenvalue(op, 3, Extremal::Largest);
        REQUIRE(top.converged);
        REQUIRE(top.value == Catch::Approx(3.0).epsilon(1e-9));
        auto bottom = extremal_symmetric_eigenvalue(op, 3, Extremal::Smallest);
        REQUIRE(bottom.converged);
        REQUIRE(bottom.value == Catch::Approx(1.0).epsilon(1e-9));
    }
    SECTION("zero operator") {
        const auto op = [](const Vec& in, Vec& out) { out.assign(in.size(), 0.0); };
        auto est = extremal_symmetric_eigenvalue(op, 5, Extremal::Largest);
        REQUIRE(est.converged);
        REQUIRE(est.value == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("scalar Schur operator of the 1x1 instance") {
        // P^{-1/2} B A^{-1} B^T P^{-1/2} with A=2, B=1, P=1
        const auto op = [](const Vec& in, Vec& out) {
            out = in;
            out[0] *= 0.5;
        };
        auto est = extremal_symmetric_eigenvalue(op, 1, Extremal::Largest);
        REQUIRE(est.converged);
        REQUIRE(est.value == Catch::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("iteration cap returns the best estimate with a cleared flag") {
    // a wide geometric spectrum cannot settle in two iterations
    DenseMatrix d(40, 40);
    for (int i = 0; i < 40; ++i) d(i, i) = std::pow(1.3, i);
    const auto op = [&](const Vec& in, Vec& out) { out = d.apply(in); };
    const auto est = extremal_symmetric_eigenvalue(op, 40, Extremal::Smallest, 1e-10, 2);
    REQUIRE_FALSE(est.converged);
    REQUIRE(est.iterations == 2);
    REQUIRE(std::isfinite(est.value));
}

TEST_CASE("lanczos agrees with dense oracle on symmetric matrices") {
    Rng rng(55);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(49));
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                const double v = rng.uniform(-1, 1);
                m(i, j) = m(j, i) = v;
            }
        // shift to make it PSD-ish; extremal values shift along
        DenseMatrix shifted = m;
        for (int i = 0; i < n; ++i) shifted(i, i) += n;
        const auto op = [&](const Vec& in, Vec& out) { out = shifted.apply(in); };
        auto top = extremal_symmetric_eigenvalue(op, n, Extremal::Largest);
        auto bottom = extremal_symmetric_eigenvalue(op, n, Extremal::Smallest);
        double lo = 1e300, hi = -1e300;
        for (auto& e : dense_eigenvalues(shifted)) {
            lo = std::min(lo, e.real());
            hi = std::max(hi, e.real());
        }
        REQUIRE(top.value == Catch::Approx(hi).margin(1e-8 * std::max(1.0, std::abs(hi))));
        REQUIRE(bottom.value == Catch::Approx(lo).margin(1e-8 * std::max(1.0, std::abs(lo))));
    }
}

TEST_CASE("matrix market round trip") {
    Rng rng(61);
    std::vector<Triplet> t;
    for (int k = 0; k < 40; ++k)
        t.push_back({static_cast<int>(rng.next_below(9)), static_cast<int>(rng.next_below(7)),
                     rng.uniform(-1, 1)});
    auto m = SparseMatrix::from_triplets(9, 7, std::move(t));

    std::ostringstream first;
    write_matrix_market(first, m);
    std::istringstream in(first.str());
    auto back = read_matrix_market(in);
    REQUIRE(back.rows() == m.rows());
    REQUIRE(back.cols() == m.cols());
    REQUIRE(back.nnz() == m.nnz());
    REQUIRE(back.values() == m.values());  // bit-exact round trip
    REQUIRE(back.col_idx() == m.col_idx());

    std::ostringstream second;
    write_matrix_market(second, back);
    REQUIRE(second.str() == first.str());  // byte-identical re-export
}

TEST_CASE("matrix market symmetric storage") {
    auto m = SparseMatrix::from_triplets(
        3, 3, {{0, 0, 2.0}, {1, 1, 3.0}, {2, 2, 4.0}, {0, 1, 0.5}, {1, 0, 0.5}});
    std::ostringstream out;
    write_matrix_market(out, m, /*as_symmetric=*/true);
    REQUIRE(out.str().find("symmetric") != std::string::npos);
    std::istringstream in(out.str());
    auto back = read_matrix_market(in);
    REQUIRE(back.nnz() == m.nnz());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) REQUIRE(back.coeff(i, j) == m.coeff(i, j));
}

TEST_CASE("matrix market vector round trip") {
    Vec v{1.0, -0.333333333333333314829616256247390992939472198486328125, 7e-300, 42.5};
    std::ostringstream out;
    write_vector_market(out, v);
    std::istringstream in(out.str());
    REQUIRE(read_vector_market(in) == v);
}

TEST_CASE("matrix market rejects malformed input") {
    std::istringstream bad1("not a header\n1 1 1\n1 1 2.0\n");
    REQUIRE_THROWS_AS(read_matrix_market(bad1), IoError);
    std::istringstream bad2("%%MatrixMarket matrix coordinate real general\n2 2 1\n5 1 2.0\n");
    REQUIRE_THROWS_AS(read_matrix_market(bad2), IoError);
    std::istringstream bad3("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 2 3\n");
    REQUIRE_THROWS_AS(read_matrix_market(bad3), IoError);
}
