#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "saddle/dense.hpp"
#include "saddle/dense_eigen.hpp"
#include "saddle/errors.hpp"
#include "saddle/factor.hpp"
#include "saddle/lanczos.hpp"
#include "saddle/sparse.hpp"
#include "saddle/vec.hpp"

namespace saddle {

/// Extremal eigenvalues governing the convergence and preconditioning theory:
/// mu_min, mu_max of P^{-1} B A^{-1} B^T and nu_max of D^{-1} C A^{-1} C^T.
struct SpectralData {
    double mu_min = 0.0;
    double mu_max = 0.0;
    double nu_max = 0.0;
    bool converged = true;
};

/// Block 3x3 double saddle-point problem
///
///   [ A   B^T  C^T ] [x]   [f]
///   [ B   0    0   ] [y] = [g]
///   [ C   0   -D   ] [z]   [h]
///
/// with A (n x n) and D (p x p) SPD, B (m x n) full row rank, C (p x n)
/// arbitrary, and an SPD scaling matrix P (m x m) used by the solvers. When P
/// is not supplied it defaults to B A^{-1} B^T (densified at desk scale).
/// Immutable after construction; factorizations of A, P, D are computed once
/// here and shared by every solver run.
class DoubleSaddleProblem {
public:
    DoubleSaddleProblem(SparseMatrix A, SparseMatrix B, SparseMatrix C, SparseMatrix D,
                        std::optional<SparseMatrix> P, Vec f, Vec g, Vec h)
        : n_(A.rows()),
          m_(B.rows()),
          p_(C.rows()),
          A_(std::move(A)),
          B_(std::move(B)),
          C_(std::move(C)),
          D_(std::move(D)),
          f_(std::move(f)),
          g_(std::move(g)),
          h_(std::move(h)) {
        validate_shapes();
        factor_a_ = std::make_shared<const CholeskyFactor>(cholesky_factor(A_));
        factor_d_ = std::make_shared<const CholeskyFactor>(cholesky_factor(D_));
        verify_full_row_rank();  // before P: the default P needs full rank to be SPD
        if (P.has_value()) {
            P_ = std::move(*P);
            if (P_.rows() != m_ || P_.cols() != m_)
                throw DimensionError("problem: P must be m x m");
            p_defaulted_ = false;
        } else {
            P_ = default_scaling_matrix();
            p_defaulted_ = true;
        }
        factor_p_ = std::make_shared<const CholeskyFactor>(cholesky_factor(P_));
    }

    int n() const { return n_; }
    int m() const { return m_; }
    int p() const { return p_; }
    int total() const { return n_ + m_ + p_; }

    const SparseMatrix& A() const { return A_; }
    const SparseMatrix& B() const { return B_; }
    const SparseMatrix& C() const { return C_; }
    const SparseMatrix& D() const { return D_; }
    const SparseMatrix& P() const { return P_; }
    const Vec& f() const { return f_; }
    const Vec& g() const { return g_; }
    const Vec& h() const { return h_; }
    bool p_defaulted() const { return p_defaulted_; }

    const CholeskyFactor& factor_a() const { return *factor_a_; }
    const CholeskyFactor& factor_p() const { return *factor_p_; }
    const CholeskyFactor& factor_d() const { return *factor_d_; }

    /// Stacked right-hand side (f, g, h) of the symmetric layout.
    Vec rhs() const { return stack3(f_, g_, h_); }

private:
    void validate_shapes() const {
        if (A_.rows() != n_ || A_.cols() != n_) throw DimensionError("problem: A must be square");
        if (m_ < 1 || p_ < 1)
            throw DimensionError("problem: all three blocks must be present (m, p >= 1)");
        if (m_ > n_) throw DimensionError("problem: m must not exceed n");
        if (B_.cols() != n_) throw DimensionError("problem: B must be m x n");
        if (C_.cols() != n_) throw DimensionError("problem: C must be p x n");
        if (D_.rows() != p_ || D_.cols() != p_) throw DimensionError("problem: D must be p x p");
        if (static_cast<int>(f_.size()) != n_ || static_cast<int>(g_.size()) != m_ ||
            static_cast<int>(h_.size()) != p_)
            throw DimensionError("problem: right-hand side lengths must be (n, m, p)");
    }

    /// Dense Schur product S = B A^{-1} B^T, symmetrized to kill rounding skew.
    DenseMatrix schur_product_dense() const {
        DenseMatrix S(m_, m_);
        Vec bi(n_, 0.0);
        for (int j = 0; j < m_; ++j) {
            bi.assign(n_, 0.0);
            for (int k = B_.row_ptr()[j]; k < B_.row_ptr()[j + 1]; ++k)
                bi[B_.col_idx()[k]] = B_.values()[k];
            const Vec w = factor_a_->solve(bi);
            const Vec col = B_.apply(w);
            for (int i = 0; i < m_; ++i) S(i, j) = col[i];
        }
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < i; ++j) {
                const double v = 0.5 * (S(i, j) + S(j, i));
                S(i, j) = S(j, i) = v;
            }
        return S;
    }

    SparseMatrix default_scaling_matrix() const {
        if (m_ <= kDenseOracleMaxOrder) {
            const DenseMatrix S = schur_product_dense();
            std::vector<Triplet> t;
            t.reserve(static_cast<std::size_t>(m_) * m_);
            for (int i = 0; i < m_; ++i)
                for (int j = 0; j < m_; ++j)
                    if (S(i, j) != 0.0) t.push_back({i, j, S(i, j)});
            return SparseMatrix::from_triplets(m_, m_, std::move(t));
        }
        // beyond desk scale: diagonal of B A^{-1} B^T by per-row probing
        Vec diag(m_, 0.0);
        Vec bi(n_, 0.0);
        for (int i = 0; i < m_; ++i) {
            bi.assign(n_, 0.0);
            for (int k = B_.row_ptr()[i]; k < B_.row_ptr()[i + 1]; ++k)
                bi[B_.col_idx()[k]] = B_.values()[k];
            diag[i] = dot(bi, factor_a_->solve(bi));
        }
        return SparseMatrix::diagonal(diag);
    }

    void verify_full_row_rank() const {
        if (m_ <= kDenseOracleMaxOrder) {
            const DenseMatrix bt = DenseMatrix::from_sparse(B_.transpose());
            if (dense_rank(bt) != m_)
                throw RankDeficientError("problem: B does not have full row rank");
        } else {
            // SPD check of B A^{-1} B^T decides rank at scale
            try {
                CholeskyFactor::dense_from_dense(schur_product_dense());
            } catch (const NotPositiveDefiniteError&) {
                throw RankDeficientError("problem: B does not have full row rank");
            }
        }
    }

    int n_, m_, p_;
    SparseMatrix A_, B_, C_, D_, P_;
    Vec f_, g_, h_;
    bool p_defaulted_ = false;
    std::shared_ptr<const CholeskyFactor> factor_a_, factor_p_, factor_d_;
};

enum class BlockLayout { Symmetric, Unsymmetric };

/// The assembled 3x3 block operator, either the symmetric form or the
/// equivalent unsymmetric one (B and C rows negated, D block sign flipped,
/// right-hand side (f, -g, -h)).
class AssembledOperator {
public:
    AssembledOperator(const DoubleSaddleProblem& problem, BlockLayout layout)
        : problem_(std::make_shared<const DoubleSaddleProblem>(problem)), layout_(layout) {}

    int dim() const { return problem_->total(); }
    BlockLayout layout() const { return layout_; }
    const DoubleSaddleProblem& problem() const { return *problem_; }

    Vec apply(const Vec& w) const {
        const auto& pr = *problem_;
        if (static_cast<int>(w.size()) != pr.total())
            throw DimensionError("AssembledOperator::apply: length mismatch");
        Vec x, y, z;
        unstack3(w, pr.n(), pr.m(), pr.p(), x, y, z);
        const double s = layout_ == BlockLayout::Symmetric ? 1.0 : -1.0;

        Vec r1 = pr.A().apply(x);
        pr.B().apply_transpose_add(y, r1, 1.0);
        pr.C().apply_transpose_add(z, r1, 1.0);
        Vec r2 = pr.B().apply(x);
        scale(s, r2);
        Vec r3 = pr.C().apply(x);
        scale(s, r3);
        pr.D().apply_add(z, r3, -s);
        return stack3(r1, r2, r3);
    }

    /// Right-hand side matching this layout.
    Vec rhs() const {
        const auto& pr = *problem_;
        Vec g = pr.g(), h = pr.h();
        if (layout_ == BlockLayout::Unsymmetric) {
            scale(-1.0, g);
            scale(-1.0, h);
        }
        return stack3(pr.f(), g, h);
    }

    DenseMatrix dense() const {
        const auto& pr = *problem_;
        if (pr.total() > kDenseOracleMaxOrder)
            throw DenseThresholdError("AssembledOperator::dense: order exceeds threshold");
        const double s = layout_ == BlockLayout::Symmetric ? 1.0 : -1.0;
        DenseMatrix M(pr.total(), pr.total());
        M.set_block(0, 0, pr.A());
        M.set_block_transpose(0, pr.n(), pr.B());
        M.set_block_transpose(0, pr.n() + pr.m(), pr.C());
        M.set_block(pr.n(), 0, pr.B(), s);
        M.set_block(pr.n() + pr.m(), 0, pr.C(), s);
        M.set_block(pr.n() + pr.m(), pr.n() + pr.m(), pr.D(), -s);
        return M;
    }

private:
    std::shared_ptr<const DoubleSaddleProblem> problem_;
    BlockLayout layout_;
};

inline AssembledOperator assemble(const DoubleSaddleProblem& problem, BlockLayout layout) {
    return AssembledOperator(problem, layout);
}

struct ResidualValue {
    double value = 0.0;
    bool is_absolute = false;  // set when the right-hand side is zero
};

/// Relative 2-norm residual of the symmetric system; absolute (flagged) when
/// the right-hand side is zero.
inline ResidualValue residual_value(const DoubleSaddleProblem& problem, const Vec& w) {
    if (static_cast<int>(w.size()) != problem.total())
        throw DimensionError("residual_value: length mismatch");
    Vec x, y, z;
    unstack3(w, problem.n(), problem.m(), problem.p(), x, y, z);

    Vec r1 = problem.f();
    problem.A().apply_add(x, r1, -1.0);
    problem.B().apply_transpose_add(y, r1, -1.0);
    problem.C().apply_transpose_add(z, r1, -1.0);
    Vec r2 = problem.g();
    problem.B().apply_add(x, r2, -1.0);
    Vec r3 = problem.h();
    problem.C().apply_add(x, r3, -1.0);
    problem.D().apply_add(z, r3, 1.0);

    double rr = dot(r1, r1) + dot(r2, r2) + dot(r3, r3);
    const double bnorm =
        std::sqrt(dot(problem.f(), problem.f()) + dot(problem.g(), problem.g()) +
                  dot(problem.h(), problem.h()));
    ResidualValue out;
    out.value = std::sqrt(rr);
    if (bnorm > 0.0)
        out.value /= bnorm;
    else
        out.is_absolute = true;
    return out;
}

inline double residual_norm(const DoubleSaddleProblem& problem, const Vec& w) {
    return residual_value(problem, w).value;
}

/// Extremal eigenvalues of P^{-1} B A^{-1} B^T (mu) and D^{-1} C A^{-1} C^T
/// (nu), computed via Lanczos on the symmetric similarity transforms
/// L^{-1} (.) L^{-T}. Cross-checkable against the dense oracle at desk scale.
inline SpectralData spectral_data(const DoubleSaddleProblem& problem, double rel_tol = 1e-10) {
    SpectralData sd;

    // dense Cholesky factors expose the triangular halves needed below
    const CholeskyFactor pf = problem.factor_p().kind() == FactorKind::DenseCholesky
                                  ? problem.factor_p()
                                  : CholeskyFactor::dense_from_sparse(problem.P());
    const CholeskyFactor df = problem.factor_d().kind() == FactorKind::DenseCholesky
                                  ? problem.factor_d()
                                  : CholeskyFactor::dense_from_sparse(problem.D());

    const auto mu_op = [&](const Vec& in, Vec& out) {
        const Vec t = pf.solve_lower_transpose(in);
        const Vec s = problem.B().apply_transpose(t);
        const Vec q = problem.factor_a().solve(s);
        const Vec r = problem.B().apply(q);
        out = pf.solve_lower(r);
    };
    const auto mu_max = extremal_symmetric_eigenvalue(mu_op, problem.m(), Extremal::Largest,
                                                      rel_tol);
    const auto mu_min = extremal_symmetric_eigenvalue(mu_op, problem.m(), Extremal::Smallest,
                                                      rel_tol);
    sd.mu_max = mu_max.value;
    sd.mu_min = mu_min.value;
    sd.converged = mu_max.converged && mu_min.converged;

    if (problem.C().nnz() == 0) {
        sd.nu_max = 0.0;
        return sd;
    }
    const auto nu_op = [&](const Vec& in, Vec& out) {
        const Vec t = df.solve_lower_transpose(in);
        const Vec s = problem.C().apply_transpose(t);
        const Vec q = problem.factor_a().solve(s);
        const Vec r = problem.C().apply(q);
        out = df.solve_lower(r);
    };
    const auto nu_max = extremal_symmetric_eigenvalue(nu_op, problem.p(), Extremal::Largest,
                                                      rel_tol);
    sd.nu_max = nu_max.value;
    sd.converged = sd.converged && nu_max.converged;
    return sd;
}

}  // namespace saddle
