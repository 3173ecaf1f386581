#pragma once

#include <cmath>
#include <vector>

#include "saddle/errors.hpp"
#include "saddle/sparse.hpp"
#include "saddle/vec.hpp"

namespace saddle {

/// Row-major dense matrix used for desk-scale oracle computations.
class DenseMatrix {
public:
    DenseMatrix() : rows_(0), cols_(0) {}

    DenseMatrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw DimensionError("DenseMatrix: negative dimension");
    }

    static DenseMatrix identity(int n) {
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static DenseMatrix from_sparse(const SparseMatrix& s) {
        DenseMatrix m(s.rows(), s.cols());
        for (int i = 0; i < s.rows(); ++i)
            for (int k = s.row_ptr()[i]; k < s.row_ptr()[i + 1]; ++k)
                m(i, s.col_idx()[k]) = s.values()[k];
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    const std::vector<double>& data() const { return data_; }

    Vec apply(const Vec& x) const {
        if (static_cast<int>(x.size()) != cols_)
            throw DimensionError("DenseMatrix::apply: length mismatch");
        Vec y(rows_, 0.0);
        for (int i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    DenseMatrix multiply(const DenseMatrix& b) const {
        if (cols_ != b.rows_) throw DimensionError("DenseMatrix::multiply: shape mismatch");
        DenseMatrix c(rows_, b.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                double a = (*this)(i, k);
                if (a == 0.0) continue;
                for (int j = 0; j < b.cols_; ++j) c(i, j) += a * b(k, j);
            }
        return c;
    }

    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    /// Write `coeff * block` at offset (r0, c0).
    void set_block(int r0, int c0, const SparseMatrix& block, double coeff = 1.0) {
        check_block(r0, c0, block.rows(), block.cols());
        for (int i = 0; i < block.rows(); ++i)
            for (int k = block.row_ptr()[i]; k < block.row_ptr()[i + 1]; ++k)
                (*this)(r0 + i, c0 + block.col_idx()[k]) = coeff * block.values()[k];
    }

    void set_block(int r0, int c0, const DenseMatrix& block, double coeff = 1.0) {
        check_block(r0, c0, block.rows(), block.cols());
        for (int i = 0; i < block.rows(); ++i)
            for (int j = 0; j < block.cols(); ++j)
                (*this)(r0 + i, c0 + j) = coeff * block(i, j);
    }

    /// Write `coeff * block^T` at offset (r0, c0).
    void set_block_transpose(int r0, int c0, const SparseMatrix& block, double coeff = 1.0) {
        check_block(r0, c0, block.cols(), block.rows());
        for (int i = 0; i < block.rows(); ++i)
            for (int k = block.row_ptr()[i]; k < block.row_ptr()[i + 1]; ++k)
                (*this)(r0 + block.col_idx()[k], c0 + i) = coeff * block.values()[k];
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

    double max_abs() const {
        double s = 0.0;
        for (double v : data_) s = std::max(s, std::abs(v));
        return s;
    }

    DenseMatrix operator-(const DenseMatrix& b) const {
        if (rows_ != b.rows_ || cols_ != b.cols_)
            throw DimensionError("DenseMatrix::operator-: shape mismatch");
        DenseMatrix c(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) c.data_[i] = data_[i] - b.data_[i];
        return c;
    }

private:
    void check_block(int r0, int c0, int br, int bc) const {
        if (r0 < 0 || c0 < 0 || r0 + br > rows_ || c0 + bc > cols_)
            throw DimensionError("DenseMatrix: block out of range");
    }

    int rows_, cols_;
    std::vector<double> data_;
};

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    return (a - b).max_abs();
}

}  // namespace saddle
