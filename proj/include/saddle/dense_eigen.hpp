#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "saddle/dense.hpp"
#include "saddle/errors.hpp"

namespace saddle {

/// Largest order accepted by the dense oracle operations. Verification is a
/// desk-scale activity; bigger requests are refused instead of thrashing.
inline constexpr int kDenseOracleMaxOrder = 2000;

namespace detail {

inline Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(m.data().data(), m.rows(),
                                                            m.cols());
}

}  // namespace detail

/// All eigenvalues of a general square matrix. Oracle for every spectral
/// claim in the library; the iteration operators are nonsymmetric, so a
/// general solver is required.
inline std::vector<std::complex<double>> dense_eigenvalues(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("dense_eigenvalues: matrix not square");
    if (m.rows() > kDenseOracleMaxOrder)
        throw DenseThresholdError("dense_eigenvalues: order exceeds dense threshold");
    if (m.rows() == 0) return {};
    Eigen::EigenSolver<Eigen::MatrixXd> es(detail::to_eigen(m), /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw Error("dense_eigenvalues: QR iteration failed");
    std::vector<std::complex<double>> out(m.rows());
    for (int i = 0; i < m.rows(); ++i) out[i] = es.eigenvalues()[i];
    return out;
}

inline double spectral_radius(const DenseMatrix& m) {
    double r = 0.0;
    for (const auto& ev : dense_eigenvalues(m)) r = std::max(r, std::abs(ev));
    return r;
}

/// Numerical rank via column-pivoted Householder QR.
inline int dense_rank(const DenseMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(detail::to_eigen(m));
    return static_cast<int>(qr.rank());
}

}  // namespace saddle
