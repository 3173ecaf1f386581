#pragma once

#include <utility>

#include "saddle/dense.hpp"
#include "saddle/dense_eigen.hpp"
#include "saddle/errors.hpp"
#include "saddle/gsor.hpp"
#include "saddle/problem.hpp"

namespace saddle {

namespace detail {

inline void check_dense_threshold(const DoubleSaddleProblem& problem, const char* what) {
    if (problem.total() > kDenseOracleMaxOrder)
        throw DenseThresholdError(std::string(what) + ": order exceeds dense threshold");
}

}  // namespace detail

/// Dense iteration operator T of the three-parameter SOR scheme together with
/// the constant term c, so that one iteration is w -> T w + c. Built from the
/// block lower/upper splitting of the unsymmetric layout:
///
///   T = (Dg - Om L)^{-1} [ (I - Om) Dg + Om U ]
///
/// where Dg = diag(A, P, D), L carries the -B, -C rows, U the -B^T, -C^T
/// columns and the P row, and Om = diag(omega I, tau I, theta I).
inline std::pair<DenseMatrix, Vec> gsor_affine_map(const DoubleSaddleProblem& problem,
                                                   const GsorParams& params) {
    params.validate();
    detail::check_dense_threshold(problem, "gsor_affine_map");
    const int n = problem.n(), m = problem.m(), p = problem.p();
    const int total = n + m + p;

    // right factor (I - Om) Dg + Om U, assembled densely
    DenseMatrix R(total, total);
    R.set_block(0, 0, problem.A(), 1.0 - params.omega);
    R.set_block_transpose(0, n, problem.B(), -params.omega);
    R.set_block_transpose(0, n + m, problem.C(), -params.omega);
    R.set_block(n, n, problem.P(), 1.0);
    R.set_block(n + m, n + m, problem.D(), 1.0 - params.theta);

    // (Dg - Om L) X = R column by column, by block forward substitution:
    //   A x1 = r1;  P x2 = r2 + tau B x1;  D x3 = r3 + theta C x1
    const auto block_solve = [&](const Vec& r, Vec& out) {
        Vec r1(r.begin(), r.begin() + n);
        Vec r2(r.begin() + n, r.begin() + n + m);
        Vec r3(r.begin() + n + m, r.end());
        const Vec x1 = problem.factor_a().solve(r1);
        problem.B().apply_add(x1, r2, params.tau);
        const Vec x2 = problem.factor_p().solve(r2);
        problem.C().apply_add(x1, r3, params.theta);
        const Vec x3 = problem.factor_d().solve(r3);
        out = stack3(x1, x2, x3);
    };

    DenseMatrix T(total, total);
    Vec col(total), solved;
    for (int j = 0; j < total; ++j) {
        for (int i = 0; i < total; ++i) col[i] = R(i, j);
        block_solve(col, solved);
        for (int i = 0; i < total; ++i) T(i, j) = solved[i];
    }

    // constant term: (Dg - Om L)^{-1} Om bhat with bhat = (f, -g, -h)
    Vec ob(total);
    for (int i = 0; i < n; ++i) ob[i] = params.omega * problem.f()[i];
    for (int i = 0; i < m; ++i) ob[n + i] = -params.tau * problem.g()[i];
    for (int i = 0; i < p; ++i) ob[n + m + i] = -params.theta * problem.h()[i];
    Vec c;
    block_solve(ob, c);
    return {std::move(T), std::move(c)};
}

inline DenseMatrix gsor_iteration_operator(const DoubleSaddleProblem& problem,
                                           const GsorParams& params) {
    return gsor_affine_map(problem, params).first;
}

/// The M - N splitting of the symmetric system that induces the same
/// iteration:
///
///   M = [ (1/omega) A   0             0           ]
///       [ B             -(1/tau) P    0           ]
///       [ C             0             -(1/theta) D ]
///
/// and N = M - (symmetric system matrix).
struct Splitting {
    DenseMatrix m_matrix;
    DenseMatrix n_matrix;
};

inline Splitting splitting_matrices(const DoubleSaddleProblem& problem,
                                    const GsorParams& params) {
    params.validate();
    detail::check_dense_threshold(problem, "splitting_matrices");
    const int n = problem.n(), m = problem.m(), p = problem.p();
    const int total = n + m + p;

    DenseMatrix M(total, total);
    M.set_block(0, 0, problem.A(), 1.0 / params.omega);
    M.set_block(n, 0, problem.B());
    M.set_block(n, n, problem.P(), -1.0 / params.tau);
    M.set_block(n + m, 0, problem.C());
    M.set_block(n + m, n + m, problem.D(), -1.0 / params.theta);

    const DenseMatrix A = assemble(problem, BlockLayout::Symmetric).dense();
    return {M, M - A};
}

/// Dense M^{-1} N of a splitting, solved blockwise through the cached factors.
inline DenseMatrix splitting_iteration_matrix(const DoubleSaddleProblem& problem,
                                              const GsorParams& params) {
    params.validate();
    detail::check_dense_threshold(problem, "splitting_iteration_matrix");
    const Splitting s = splitting_matrices(problem, params);
    const int n = problem.n(), m = problem.m(), p = problem.p();
    const int total = n + m + p;

    // M u = r by block forward substitution:
    //   x = omega A^{-1} r1; y = tau P^{-1} (B x - r2); z = theta D^{-1} (C x - r3)
    DenseMatrix out(total, total);
    Vec r1(n), r2(m), r3(p);
    for (int j = 0; j < total; ++j) {
        for (int i = 0; i < n; ++i) r1[i] = s.n_matrix(i, j);
        for (int i = 0; i < m; ++i) r2[i] = s.n_matrix(n + i, j);
        for (int i = 0; i < p; ++i) r3[i] = s.n_matrix(n + m + i, j);
        Vec x = problem.factor_a().solve(r1);
        scale(params.omega, x);
        Vec sy = problem.B().apply(x);
        axpy(-1.0, r2, sy);
        Vec y = problem.factor_p().solve(sy);
        scale(params.tau, y);
        Vec sz = problem.C().apply(x);
        axpy(-1.0, r3, sz);
        Vec z = problem.factor_d().solve(sz);
        scale(params.theta, z);
        for (int i = 0; i < n; ++i) out(i, j) = x[i];
        for (int i = 0; i < m; ++i) out(n + i, j) = y[i];
        for (int i = 0; i < p; ++i) out(n + m + i, j) = z[i];
    }
    return out;
}

}  // namespace saddle
