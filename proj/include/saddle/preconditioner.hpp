#pragma once

#include <complex>
#include <memory>
#include <utility>
#include <vector>

#include "saddle/dense.hpp"
#include "saddle/dense_eigen.hpp"
#include "saddle/errors.hpp"
#include "saddle/factor.hpp"
#include "saddle/problem.hpp"

namespace saddle {

enum class PreconditionerKind {
    GsorLowerTriangular,  // block lower triangular factor of the SOR splitting
    BlockDiagonal,        // diag(A, B A^{-1} B^T, D + C A^{-1} C^T), SPD
    BlockTriangular,      // upper block triangular with the two Schur blocks
};

inline const char* to_string(PreconditionerKind k) {
    switch (k) {
        case PreconditionerKind::GsorLowerTriangular: return "gsor-lower-triangular";
        case PreconditionerKind::BlockDiagonal: return "block-diagonal";
        case PreconditionerKind::BlockTriangular: return "block-triangular";
    }
    return "unknown";
}

/// A preconditioner with its factorizations cached at construction. The
/// SOR-induced kind applies
///
///   P_g = [ A   0           0            ]        (symmetric layout)
///         [ B   -(1/tau) P  0            ]
///         [ C   0           -(1/theta) D ]
///
/// by block forward substitution: one A solve, one P solve, one D solve. The
/// unsymmetric-layout variant negates the B, C rows and flips the sign of the
/// trailing blocks; its preconditioned matrix is identical. The two
/// comparison kinds densify B A^{-1} B^T and D + C A^{-1} C^T once;
/// fidelity over scalability, desk scale only.
class Preconditioner {
public:
    static Preconditioner gsor_lower(const DoubleSaddleProblem& problem, double tau,
                                     double theta,
                                     BlockLayout layout = BlockLayout::Symmetric) {
        if (!(tau > 0.0) || !(theta > 0.0))
            throw Error("Preconditioner: tau, theta must be positive");
        Preconditioner pc(problem, PreconditionerKind::GsorLowerTriangular);
        pc.tau_ = tau;
        pc.theta_ = theta;
        pc.layout_ = layout;
        return pc;
    }

    static Preconditioner block_diagonal(const DoubleSaddleProblem& problem) {
        Preconditioner pc(problem, PreconditionerKind::BlockDiagonal);
        pc.build_schur_factors();
        return pc;
    }

    static Preconditioner block_triangular(const DoubleSaddleProblem& problem) {
        Preconditioner pc(problem, PreconditionerKind::BlockTriangular);
        pc.build_schur_factors();
        return pc;
    }

    PreconditionerKind kind() const { return kind_; }
    BlockLayout layout() const { return layout_; }
    bool is_spd() const { return kind_ == PreconditionerKind::BlockDiagonal; }
    int dim() const { return problem_->total(); }
    double tau() const { return tau_; }
    double theta() const { return theta_; }
    const DoubleSaddleProblem& problem() const { return *problem_; }

    /// v = (preconditioner)^{-1} r
    Vec apply(const Vec& r) const {
        const auto& pr = *problem_;
        if (static_cast<int>(r.size()) != pr.total())
            throw DimensionError("Preconditioner::apply: length mismatch");
        Vec r1, r2, r3;
        unstack3(r, pr.n(), pr.m(), pr.p(), r1, r2, r3);
        switch (kind_) {
            case PreconditionerKind::GsorLowerTriangular: {
                const double s = layout_ == BlockLayout::Symmetric ? 1.0 : -1.0;
                const Vec x = pr.factor_a().solve(r1);
                Vec ry = pr.B().apply(x);
                scale(s, ry);
                axpy(-1.0, r2, ry);
                Vec y = pr.factor_p().solve(ry);
                scale(s * tau_, y);
                Vec rz = pr.C().apply(x);
                scale(s, rz);
                axpy(-1.0, r3, rz);
                Vec z = pr.factor_d().solve(rz);
                scale(s * theta_, z);
                return stack3(x, y, z);
            }
            case PreconditionerKind::BlockDiagonal: {
                return stack3(pr.factor_a().solve(r1), schur_b_->solve(r2),
                              schur_d_->solve(r3));
            }
            case PreconditionerKind::BlockTriangular: {
                // [ A  B^T  C^T ] [x]   [r1]
                // [ 0  -Sb  0   ] [y] = [r2]   backward block substitution
                // [ 0  0    -Sd ] [z]   [r3]
                Vec z = schur_d_->solve(r3);
                scale(-1.0, z);
                Vec y = schur_b_->solve(r2);
                scale(-1.0, y);
                Vec rx = r1;
                pr.B().apply_transpose_add(y, rx, -1.0);
                pr.C().apply_transpose_add(z, rx, -1.0);
                return stack3(pr.factor_a().solve(rx), y, z);
            }
        }
        throw Error("Preconditioner::apply: unreachable");
    }

    /// Densified preconditioner matrix (oracle checks).
    DenseMatrix dense() const {
        const auto& pr = *problem_;
        if (pr.total() > kDenseOracleMaxOrder)
            throw DenseThresholdError("Preconditioner::dense: order exceeds threshold");
        const int n = pr.n(), m = pr.m();
        DenseMatrix M(pr.total(), pr.total());
        switch (kind_) {
            case PreconditionerKind::GsorLowerTriangular: {
                const double s = layout_ == BlockLayout::Symmetric ? 1.0 : -1.0;
                M.set_block(0, 0, pr.A());
                M.set_block(n, 0, pr.B(), s);
                M.set_block(n, n, pr.P(), -s / tau_);
                M.set_block(n + m, 0, pr.C(), s);
                M.set_block(n + m, n + m, pr.D(), -s / theta_);
                break;
            }
            case PreconditionerKind::BlockDiagonal: {
                M.set_block(0, 0, pr.A());
                M.set_block(n, n, *schur_b_dense_);
                M.set_block(n + m, n + m, *schur_d_dense_);
                break;
            }
            case PreconditionerKind::BlockTriangular: {
                M.set_block(0, 0, pr.A());
                M.set_block_transpose(0, n, pr.B());
                M.set_block_transpose(0, n + m, pr.C());
                M.set_block(n, n, *schur_b_dense_, -1.0);
                M.set_block(n + m, n + m, *schur_d_dense_, -1.0);
                break;
            }
        }
        return M;
    }

private:
    Preconditioner(const DoubleSaddleProblem& problem, PreconditionerKind kind)
        : problem_(std::make_shared<const DoubleSaddleProblem>(problem)), kind_(kind) {}

    void build_schur_factors() {
        const auto& pr = *problem_;
        if (pr.total() > kDenseOracleMaxOrder)
            throw DenseThresholdError("Preconditioner: comparison kinds are desk scale only");
        const int n = pr.n(), m = pr.m(), p = pr.p();

        DenseMatrix Sb(m, m);
        Vec unit(n, 0.0);
        for (int j = 0; j < m; ++j) {
            unit.assign(n, 0.0);
            for (int k = pr.B().row_ptr()[j]; k < pr.B().row_ptr()[j + 1]; ++k)
                unit[pr.B().col_idx()[k]] = pr.B().values()[k];
            const Vec col = pr.B().apply(pr.factor_a().solve(unit));
            for (int i = 0; i < m; ++i) Sb(i, j) = col[i];
        }
        DenseMatrix Sd = DenseMatrix::from_sparse(pr.D());
        for (int j = 0; j < p; ++j) {
            unit.assign(n, 0.0);
            for (int k = pr.C().row_ptr()[j]; k < pr.C().row_ptr()[j + 1]; ++k)
                unit[pr.C().col_idx()[k]] = pr.C().values()[k];
            const Vec col = pr.C().apply(pr.factor_a().solve(unit));
            for (int i = 0; i < p; ++i) Sd(i, j) += col[i];
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < i; ++j) {
                const double v = 0.5 * (Sb(i, j) + Sb(j, i));
                Sb(i, j) = Sb(j, i) = v;
            }
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < i; ++j) {
                const double v = 0.5 * (Sd(i, j) + Sd(j, i));
                Sd(i, j) = Sd(j, i) = v;
            }
        schur_b_dense_ = std::make_shared<const DenseMatrix>(Sb);
        schur_d_dense_ = std::make_shared<const DenseMatrix>(Sd);
        schur_b_ = std::make_shared<const CholeskyFactor>(CholeskyFactor::dense_from_dense(Sb));
        schur_d_ = std::make_shared<const CholeskyFactor>(CholeskyFactor::dense_from_dense(Sd));
    }

    std::shared_ptr<const DoubleSaddleProblem> problem_;
    PreconditionerKind kind_;
    BlockLayout layout_ = BlockLayout::Symmetric;
    double tau_ = 1.0;
    double theta_ = 1.0;
    std::shared_ptr<const CholeskyFactor> schur_b_, schur_d_;
    std::shared_ptr<const DenseMatrix> schur_b_dense_, schur_d_dense_;
};

/// Dense preconditioned matrix P^{-1} A for the layout the preconditioner was
/// built against, assembled column by column through the exact block solves.
inline DenseMatrix preconditioned_matrix(const Preconditioner& pc) {
    const auto& pr = pc.problem();
    if (pr.total() > kDenseOracleMaxOrder)
        throw DenseThresholdError("preconditioned_matrix: order exceeds threshold");
    const AssembledOperator op = assemble(pr, pc.layout());
    const int total = pr.total();
    DenseMatrix out(total, total);
    Vec e(total, 0.0);
    for (int j = 0; j < total; ++j) {
        e.assign(total, 0.0);
        e[j] = 1.0;
        const Vec col = pc.apply(op.apply(e));
        for (int i = 0; i < total; ++i) out(i, j) = col[i];
    }
    return out;
}

/// Eigenvalues of the preconditioned matrix, for spectrum dumps and the
/// enclosure checks. The preconditioner carries the problem it was built for.
inline std::vector<std::complex<double>> preconditioned_spectrum(const Preconditioner& pc) {
    return dense_eigenvalues(preconditioned_matrix(pc));
}

}  // namespace saddle
