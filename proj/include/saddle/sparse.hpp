#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <tuple>
#include <vector>

#include "saddle/errors.hpp"
#include "saddle/vec.hpp"

namespace saddle {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed-sparse-row matrix. Canonical form: column indices strictly
/// increasing within each row, duplicates summed, exact zeros dropped.
class SparseMatrix {
public:
    SparseMatrix() : rows_(0), cols_(0), row_ptr_{0} {}

    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {
        if (rows < 0 || cols < 0) throw DimensionError("SparseMatrix: negative dimension");
    }

    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> trips) {
        SparseMatrix m(rows, cols);
        for (const auto& t : trips) {
            if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
                throw DimensionError("from_triplets: index out of range");
        }
        std::sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        std::vector<int> counts(rows, 0);
        std::size_t i = 0;
        std::vector<int> cols_out;
        std::vector<double> vals_out;
        cols_out.reserve(trips.size());
        vals_out.reserve(trips.size());
        while (i < trips.size()) {
            int r = trips[i].row, c = trips[i].col;
            double v = 0.0;
            while (i < trips.size() && trips[i].row == r && trips[i].col == c) {
                v += trips[i].value;
                ++i;
            }
            if (v != 0.0) {
                cols_out.push_back(c);
                vals_out.push_back(v);
                ++counts[r];
            }
        }
        m.col_idx_ = std::move(cols_out);
        m.values_ = std::move(vals_out);
        for (int r = 0; r < rows; ++r) m.row_ptr_[r + 1] = m.row_ptr_[r] + counts[r];
        return m;
    }

    static SparseMatrix identity(int n) {
        std::vector<Triplet> t;
        t.reserve(n);
        for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
        return from_triplets(n, n, std::move(t));
    }

    static SparseMatrix diagonal(const Vec& d) {
        std::vector<Triplet> t;
        t.reserve(d.size());
        for (int i = 0; i < static_cast<int>(d.size()); ++i) t.push_back({i, i, d[i]});
        return from_triplets(static_cast<int>(d.size()), static_cast<int>(d.size()),
                             std::move(t));
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }
    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    double coeff(int i, int j) const {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            if (col_idx_[k] == j) return values_[k];
        return 0.0;
    }

    /// out = A * x
    void apply(const Vec& x, Vec& out) const {
        check_apply(x, cols_);
        out.assign(rows_, 0.0);
        apply_add(x, out, 1.0);
    }

    Vec apply(const Vec& x) const {
        Vec out;
        apply(x, out);
        return out;
    }

    /// out += coeff * A * x
    void apply_add(const Vec& x, Vec& out, double coeff = 1.0) const {
        check_apply(x, cols_);
        if (static_cast<int>(out.size()) != rows_)
            throw DimensionError("apply_add: output length mismatch");
        for (int i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                s += values_[k] * x[col_idx_[k]];
            out[i] += coeff * s;
        }
    }

    /// out = A^T * x
    void apply_transpose(const Vec& x, Vec& out) const {
        check_apply(x, rows_);
        out.assign(cols_, 0.0);
        apply_transpose_add(x, out, 1.0);
    }

    Vec apply_transpose(const Vec& x) const {
        Vec out;
        apply_transpose(x, out);
        return out;
    }

    /// out += coeff * A^T * x
    void apply_transpose_add(const Vec& x, Vec& out, double coeff = 1.0) const {
        check_apply(x, rows_);
        if (static_cast<int>(out.size()) != cols_)
            throw DimensionError("apply_transpose_add: output length mismatch");
        for (int i = 0; i < rows_; ++i) {
            double xi = coeff * x[i];
            if (xi == 0.0) continue;
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                out[col_idx_[k]] += values_[k] * xi;
        }
    }

    SparseMatrix transpose() const {
        std::vector<Triplet> t;
        t.reserve(nnz());
        for (int i = 0; i < rows_; ++i)
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                t.push_back({col_idx_[k], i, values_[k]});
        return from_triplets(cols_, rows_, std::move(t));
    }

    SparseMatrix scaled(double s) const {
        SparseMatrix m = *this;
        for (double& v : m.values_) v *= s;
        // scaling by zero would leave explicit zeros behind
        if (s == 0.0) m = SparseMatrix(rows_, cols_);
        return m;
    }

    /// Maximum |i - j| over stored entries; 0 for diagonal or empty matrices.
    int bandwidth() const {
        int b = 0;
        for (int i = 0; i < rows_; ++i)
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                b = std::max(b, std::abs(i - col_idx_[k]));
        return b;
    }

    double max_abs() const {
        double s = 0.0;
        for (double v : values_) s = std::max(s, std::abs(v));
        return s;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : values_) s += v * v;
        return std::sqrt(s);
    }

    /// Value symmetry within rel_tol * max_abs(); structural asymmetry with
    /// matching values is accepted.
    bool is_symmetric(double rel_tol = 1e-12) const {
        if (rows_ != cols_) return false;
        const SparseMatrix t = transpose();
        const double tol = rel_tol * std::max(max_abs(), 1e-300);
        for (int i = 0; i < rows_; ++i) {
            int ka = row_ptr_[i], kb = t.row_ptr_[i];
            const int ea = row_ptr_[i + 1], eb = t.row_ptr_[i + 1];
            while (ka < ea || kb < eb) {
                int ca = ka < ea ? col_idx_[ka] : cols_;
                int cb = kb < eb ? t.col_idx_[kb] : cols_;
                double va = 0.0, vb = 0.0;
                if (ca <= cb) va = values_[ka++];
                if (cb <= ca) vb = t.values_[kb++];
                if (std::abs(va - vb) > tol) return false;
            }
        }
        return true;
    }

private:
    static void check_apply(const Vec& x, int expected) {
        if (static_cast<int>(x.size()) != expected)
            throw DimensionError("SparseMatrix: vector length mismatch");
    }

    int rows_, cols_;
    std::vector<int> row_ptr_;
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

}  // namespace saddle
