#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "saddle/dense.hpp"
#include "saddle/errors.hpp"
#include "saddle/sparse.hpp"
#include "saddle/vec.hpp"

namespace saddle {

namespace detail {
inline thread_local std::uint64_t g_spd_solve_count = 0;
}

/// Number of SPD system solves performed on this thread so far. Tests and
/// reports take deltas around solver loops.
inline std::uint64_t spd_solve_count() { return detail::g_spd_solve_count; }

enum class FactorKind { DenseCholesky, Tridiagonal };

/// Pivot threshold, relative to the largest diagonal entry, below which the
/// input is declared not positive definite.
inline constexpr double kSpdPivotRelTol = 1e-14;

/// Relative tolerance of the symmetry precheck; failing inputs are rejected,
/// never symmetrized.
inline constexpr double kSymmetryRelTol = 1e-12;

/// Factorization of an SPD matrix. Inputs with bandwidth <= 1 take an O(n)
/// tridiagonal LU path (no pivoting); everything else gets a dense Cholesky.
class CholeskyFactor {
public:
    /// Factor a symmetric positive definite sparse matrix, picking the path
    /// automatically from the bandwidth.
    static CholeskyFactor compute(const SparseMatrix& m) {
        check_symmetric(m);
        if (m.bandwidth() <= 1) return tridiagonal_from_sparse(m);
        return dense_cholesky(DenseMatrix::from_sparse(m));
    }

    /// Dense Cholesky regardless of sparsity. Used where triangular-factor
    /// access is required (symmetric similarity transforms).
    static CholeskyFactor dense_from_sparse(const SparseMatrix& m) {
        check_symmetric(m);
        return dense_cholesky(DenseMatrix::from_sparse(m));
    }

    /// Dense Cholesky of an already dense symmetric matrix (Schur complements).
    static CholeskyFactor dense_from_dense(const DenseMatrix& m) {
        if (m.rows() != m.cols()) throw DimensionError("cholesky: matrix not square");
        return dense_cholesky(m);
    }

    FactorKind kind() const { return kind_; }
    int order() const { return n_; }

    /// Solve M x = b.
    Vec solve(const Vec& b) const {
        if (static_cast<int>(b.size()) != n_)
            throw DimensionError("CholeskyFactor::solve: length mismatch");
        ++detail::g_spd_solve_count;
        if (n_ == 0) return {};
        if (kind_ == FactorKind::Tridiagonal) return solve_tridiagonal(b);
        Vec y = forward_subst(b);
        return backward_subst(y);
    }

    /// Solve L y = b (dense kind only).
    Vec solve_lower(const Vec& b) const {
        require_dense("solve_lower");
        return forward_subst(b);
    }

    /// Solve L^T y = b (dense kind only).
    Vec solve_lower_transpose(const Vec& b) const {
        require_dense("solve_lower_transpose");
        return backward_subst(b);
    }

    /// Dense lower factor, row-major n*n (dense kind only).
    const std::vector<double>& dense_lower() const {
        require_dense("dense_lower");
        return lower_;
    }

    // Tridiagonal LU pieces: unit sub-diagonal multipliers, U diagonal, and
    // the U super-diagonal (equal to the input super-diagonal).
    const std::vector<double>& tri_sub() const { return tri_sub_; }
    const std::vector<double>& tri_diag() const { return tri_diag_; }
    const std::vector<double>& tri_super() const { return tri_super_; }

private:
    CholeskyFactor() = default;

    static void check_symmetric(const SparseMatrix& m) {
        if (m.rows() != m.cols()) throw DimensionError("cholesky: matrix not square");
        if (!m.is_symmetric(kSymmetryRelTol))
            throw SymmetryError("cholesky: matrix not symmetric within tolerance");
    }

    static CholeskyFactor dense_cholesky(const DenseMatrix& a) {
        const int n = a.rows();
        double max_diag = 0.0;
        for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
        const double pivot_tol = kSpdPivotRelTol * std::max(max_diag, 1e-300);

        CholeskyFactor f;
        f.kind_ = FactorKind::DenseCholesky;
        f.n_ = n;
        f.lower_.assign(static_cast<std::size_t>(n) * n, 0.0);
        auto L = [&f, n](int i, int j) -> double& {
            return f.lower_[static_cast<std::size_t>(i) * n + j];
        };
        for (int j = 0; j < n; ++j) {
            double d = a(j, j);
            for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
            if (d <= pivot_tol)
                throw NotPositiveDefiniteError("cholesky: nonpositive pivot at index " +
                                               std::to_string(j));
            const double ljj = std::sqrt(d);
            L(j, j) = ljj;
            for (int i = j + 1; i < n; ++i) {
                double s = a(i, j);
                for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
                L(i, j) = s / ljj;
            }
        }
        return f;
    }

    static CholeskyFactor tridiagonal_from_sparse(const SparseMatrix& m) {
        const int n = m.rows();
        CholeskyFactor f;
        f.kind_ = FactorKind::Tridiagonal;
        f.n_ = n;
        Vec diag(n, 0.0), super(std::max(n - 1, 0), 0.0);
        double max_diag = 0.0;
        for (int i = 0; i < n; ++i) {
            diag[i] = m.coeff(i, i);
            max_diag = std::max(max_diag, std::abs(diag[i]));
            if (i + 1 < n) super[i] = m.coeff(i, i + 1);
        }
        const double pivot_tol = kSpdPivotRelTol * std::max(max_diag, 1e-300);
        f.tri_diag_.assign(n, 0.0);
        f.tri_sub_.assign(std::max(n - 1, 0), 0.0);
        f.tri_super_ = super;
        if (n == 0) return f;
        double u = diag[0];
        for (int i = 0;; ++i) {
            if (u <= pivot_tol)
                throw NotPositiveDefiniteError("cholesky: nonpositive pivot at index " +
                                               std::to_string(i));
            f.tri_diag_[i] = u;
            if (i + 1 >= n) break;
            const double l = m.coeff(i + 1, i) / u;
            f.tri_sub_[i] = l;
            u = diag[i + 1] - l * super[i];
        }
        return f;
    }

    Vec solve_tridiagonal(const Vec& b) const {
        Vec x(b);
        for (int i = 1; i < n_; ++i) x[i] -= tri_sub_[i - 1] * x[i - 1];
        x[n_ - 1] /= tri_diag_[n_ - 1];
        for (int i = n_ - 2; i >= 0; --i) x[i] = (x[i] - tri_super_[i] * x[i + 1]) / tri_diag_[i];
        return x;
    }

    Vec forward_subst(const Vec& b) const {
        Vec y(n_, 0.0);
        for (int i = 0; i < n_; ++i) {
            double s = b[i];
            const double* row = lower_.data() + static_cast<std::size_t>(i) * n_;
            for (int k = 0; k < i; ++k) s -= row[k] * y[k];
            y[i] = s / row[i];
        }
        return y;
    }

    Vec backward_subst(const Vec& b) const {
        Vec x(b);
        for (int i = n_ - 1; i >= 0; --i) {
            double s = x[i];
            for (int k = i + 1; k < n_; ++k)
                s -= lower_[static_cast<std::size_t>(k) * n_ + i] * x[k];
            x[i] = s / lower_[static_cast<std::size_t>(i) * n_ + i];
        }
        return x;
    }

    void require_dense(const char* what) const {
        if (kind_ != FactorKind::DenseCholesky)
            throw Error(std::string("CholeskyFactor::") + what + ": dense factor required");
    }

    FactorKind kind_ = FactorKind::DenseCholesky;
    int n_ = 0;
    std::vector<double> lower_;
    std::vector<double> tri_sub_, tri_diag_, tri_super_;
};

inline CholeskyFactor cholesky_factor(const SparseMatrix& m) {
    return CholeskyFactor::compute(m);
}

inline Vec cholesky_solve(const CholeskyFactor& f, const Vec& b) { return f.solve(b); }

}  // namespace saddle
