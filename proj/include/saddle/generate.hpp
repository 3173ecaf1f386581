#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "saddle/dense_eigen.hpp"
#include "saddle/errors.hpp"
#include "saddle/factor.hpp"
#include "saddle/problem.hpp"
#include "saddle/rng.hpp"
#include "saddle/sparse.hpp"

namespace saddle {

/// Eigenvalue layout of the generated SPD tridiagonal blocks.
enum class SpectrumShape { Uniform, Clustered, IllConditioned };

/// How the scaling matrix P of a generated problem is chosen.
enum class PChoice {
    SchurDefault,    // leave P unset; the problem defaults it to B A^{-1} B^T
    DiagSchur,       // P = diag(B A^{-1} B^T)
    ScaledIdentity,  // P = (trace(B A^{-1} B^T)/m) I
};

struct GeneratorOptions {
    SpectrumShape shape = SpectrumShape::Uniform;
    PChoice p_choice = PChoice::SchurDefault;
    double b_fill = 0.2;      // expected extra nonzeros per B row, as a fraction of n
    double c_fill = 0.2;      // expected nonzeros per C row, as a fraction of n
    double target_nu = -1.0;  // > 0: rescale C so nu_max hits this value
};

enum class StructuredFamily { LcLike, DarcyLike };

/// A generated problem together with the solution it was planted from.
struct GeneratedProblem {
    DoubleSaddleProblem problem;
    Vec solution;  // stacked (x, y, z)
};

namespace detail {

/// SPD tridiagonal with spectrum inside [lo, hi] (Gershgorin-enclosed).
inline SparseMatrix spd_tridiagonal(Rng& rng, int n, double lo, double hi,
                                    SpectrumShape shape) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(3) * n);
    const double margin = 0.1 * (hi - lo);
    Vec diag(n);
    switch (shape) {
        case SpectrumShape::Uniform:
            for (int i = 0; i < n; ++i) diag[i] = rng.uniform(lo + 2 * margin, hi - 2 * margin);
            break;
        case SpectrumShape::Clustered:
            for (int i = 0; i < n; ++i) {
                const double c = rng.next_double() < 0.5 ? lo + 2 * margin : hi - 2 * margin;
                diag[i] = c + rng.uniform(-0.25 * margin, 0.25 * margin);
            }
            break;
        case SpectrumShape::IllConditioned:
            // log-spaced diagonal; off-diagonals kept small relative to the
            // local diagonal so diagonal dominance preserves definiteness
            for (int i = 0; i < n; ++i)
                diag[i] = lo * std::pow(hi / lo, rng.next_double());
            break;
    }
    for (int i = 0; i < n; ++i) t.push_back({i, i, diag[i]});
    for (int i = 0; i + 1 < n; ++i) {
        double e;
        if (shape == SpectrumShape::IllConditioned)
            e = 0.1 * std::min(diag[i], diag[i + 1]) * rng.next_double();
        else
            e = rng.uniform(0.0, 0.45 * margin);
        if (e != 0.0) {
            t.push_back({i, i + 1, e});
            t.push_back({i + 1, i, e});
        }
    }
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

/// Random m x n sparse matrix with a staggered pivot in every row; square
/// inputs get an upper bidiagonal instead. Structural full row rank by
/// construction, verified numerically by the caller.
inline SparseMatrix coupling_matrix(Rng& rng, int m, int n, double fill) {
    std::vector<Triplet> t;
    if (m == n) {
        for (int i = 0; i < n; ++i) {
            t.push_back({i, i, rng.uniform(1.0, 2.0)});
            if (i + 1 < n) t.push_back({i, i + 1, rng.uniform(-0.5, 0.5)});
        }
        return SparseMatrix::from_triplets(m, n, std::move(t));
    }
    const int extras = std::max(1, static_cast<int>(fill * n));
    for (int i = 0; i < m; ++i) {
        const int pivot = static_cast<int>((static_cast<std::int64_t>(i) * n) / m);
        t.push_back({i, pivot, rng.uniform(1.0, 2.0)});
        for (int e = 0; e < extras; ++e) {
            const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            t.push_back({i, j, rng.uniform(-0.5, 0.5)});
        }
    }
    return SparseMatrix::from_triplets(m, n, std::move(t));
}

inline SparseMatrix random_sparse(Rng& rng, int rows, int cols, double fill) {
    std::vector<Triplet> t;
    const int per_row = std::max(1, static_cast<int>(fill * cols));
    for (int i = 0; i < rows; ++i)
        for (int e = 0; e < per_row; ++e) {
            const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cols)));
            t.push_back({i, j, rng.uniform(-1.0, 1.0)});
        }
    return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

/// Largest eigenvalue of D^{-1} C A^{-1} C^T for block candidates, used to
/// rescale C toward a target before the problem is assembled.
inline double raw_nu_max(const SparseMatrix& A, const SparseMatrix& C, const SparseMatrix& D) {
    if (C.nnz() == 0) return 0.0;
    const CholeskyFactor af = cholesky_factor(A);
    const CholeskyFactor df = CholeskyFactor::dense_from_sparse(D);
    const auto nu_op = [&](const Vec& in, Vec& out) {
        const Vec tdown = df.solve_lower_transpose(in);
        const Vec s = C.apply_transpose(tdown);
        const Vec q = af.solve(s);
        const Vec r = C.apply(q);
        out = df.solve_lower(r);
    };
    return extremal_symmetric_eigenvalue(nu_op, D.rows(), Extremal::Largest).value;
}

inline GeneratedProblem build_problem(Rng rng, int n, int m, int p,
                                      const GeneratorOptions& opts) {
    if (m > n) throw DimensionError("generate: m must not exceed n");
    if (m < 1 || p < 1 || n < 1) throw DimensionError("generate: dimensions must be positive");

    Rng a_rng = rng.fork(1);
    // the ill-conditioned regime stays within the range where the dense
    // eigenvalue oracle can still resolve unit clusters to 1e-8
    const double a_lo = opts.shape == SpectrumShape::IllConditioned ? 0.05 : 1.0;
    const double a_hi = opts.shape == SpectrumShape::IllConditioned ? 20.0 : 4.0;
    SparseMatrix A = spd_tridiagonal(a_rng, n, a_lo, a_hi, opts.shape);
    Rng d_rng = rng.fork(2);
    SparseMatrix D = spd_tridiagonal(d_rng, p, 0.5, 1.5, SpectrumShape::Uniform);

    // full-row-rank B, with rejection retries on the (unlikely) rank failure
    SparseMatrix B;
    bool rank_ok = false;
    for (int attempt = 0; attempt < 10 && !rank_ok; ++attempt) {
        Rng b_rng = rng.fork(100 + static_cast<std::uint64_t>(attempt));
        B = coupling_matrix(b_rng, m, n, opts.b_fill);
        rank_ok = dense_rank(DenseMatrix::from_sparse(B.transpose())) == m;
    }
    if (!rank_ok) throw RankDeficientError("generate: rank rejection after 10 retries");

    Rng c_rng = rng.fork(3);
    SparseMatrix C = random_sparse(c_rng, p, n, opts.c_fill);
    if (opts.target_nu > 0.0) {
        if (C.nnz() == 0) C = SparseMatrix::from_triplets(p, n, {{0, 0, 1.0}});
        const double nu0 = raw_nu_max(A, C, D);
        if (nu0 > 0.0) C = C.scaled(std::sqrt(opts.target_nu / nu0));
    }

    std::optional<SparseMatrix> P;
    if (opts.p_choice != PChoice::SchurDefault) {
        const CholeskyFactor af = cholesky_factor(A);
        Vec diag(m, 0.0);
        Vec bi(n, 0.0);
        for (int i = 0; i < m; ++i) {
            bi.assign(n, 0.0);
            for (int k = B.row_ptr()[i]; k < B.row_ptr()[i + 1]; ++k)
                bi[B.col_idx()[k]] = B.values()[k];
            diag[i] = dot(bi, af.solve(bi));
        }
        if (opts.p_choice == PChoice::DiagSchur) {
            P = SparseMatrix::diagonal(diag);
        } else {
            double tr = 0.0;
            for (double v : diag) tr += v;
            P = SparseMatrix::identity(m).scaled(tr / m);
        }
    }

    // plant a solution so the exact answer is known
    Rng w_rng = rng.fork(4);
    Vec xs(n), ys(m), zs(p);
    for (double& v : xs) v = w_rng.uniform(-1.0, 1.0);
    for (double& v : ys) v = w_rng.uniform(-1.0, 1.0);
    for (double& v : zs) v = w_rng.uniform(-1.0, 1.0);

    Vec f = A.apply(xs);
    B.apply_transpose_add(ys, f, 1.0);
    C.apply_transpose_add(zs, f, 1.0);
    Vec g = B.apply(xs);
    Vec h = C.apply(xs);
    D.apply_add(zs, h, -1.0);

    Vec solution = stack3(xs, ys, zs);
    return {DoubleSaddleProblem(std::move(A), std::move(B), std::move(C), std::move(D),
                                std::move(P), std::move(f), std::move(g), std::move(h)),
            std::move(solution)};
}

}  // namespace detail

inline GeneratedProblem generate_synthetic_with_solution(std::uint64_t seed, int n, int m,
                                                         int p, const GeneratorOptions& opts) {
    return detail::build_problem(Rng(seed), n, m, p, opts);
}

inline DoubleSaddleProblem generate_synthetic(std::uint64_t seed, int n, int m, int p,
                                              const GeneratorOptions& opts) {
    return detail::build_problem(Rng(seed), n, m, p, opts).problem;
}

inline DoubleSaddleProblem generate_synthetic(std::uint64_t seed, int n, int m, int p,
                                              SpectrumShape shape = SpectrumShape::Uniform) {
    GeneratorOptions opts;
    opts.shape = shape;
    return generate_synthetic(seed, n, m, p, opts);
}

/// Structured families mimicking the dimension patterns of the two test
/// problem classes: lc-like has n = 3N, m = p = N, tridiagonal A, and
/// nu_max tuned below 1; darcy-like has n = 2(2N+1)^2, m = (N+1)^2,
/// p = (2N+1)^2 and nu_max tuned slightly above 1.
inline DoubleSaddleProblem generate_structured(std::uint64_t seed, int N,
                                               StructuredFamily family) {
    if (N < 2) throw DimensionError("generate_structured: N must be at least 2");
    GeneratorOptions opts;
    if (family == StructuredFamily::LcLike) {
        opts.target_nu = 0.175;
        opts.p_choice = PChoice::SchurDefault;
        return detail::build_problem(Rng(seed), 3 * N, N, N, opts).problem;
    }
    const int side = 2 * N + 1;
    opts.target_nu = 1.05;
    opts.p_choice = PChoice::DiagSchur;
    return detail::build_problem(Rng(seed), 2 * side * side, (N + 1) * (N + 1), side * side,
                                 opts)
        .problem;
}

}  // namespace saddle
