#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "saddle/errors.hpp"

namespace saddle {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

/// y += alpha * x
inline void axpy(double alpha, const Vec& x, Vec& y) {
    if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, Vec& x) {
    for (double& v : x) v *= alpha;
}

inline bool all_finite(const Vec& x) {
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

/// Concatenate three blocks into one stacked vector.
inline Vec stack3(const Vec& a, const Vec& b, const Vec& c) {
    Vec w;
    w.reserve(a.size() + b.size() + c.size());
    w.insert(w.end(), a.begin(), a.end());
    w.insert(w.end(), b.begin(), b.end());
    w.insert(w.end(), c.begin(), c.end());
    return w;
}

/// Split a stacked vector into three blocks of the given lengths.
inline void unstack3(const Vec& w, std::size_t n, std::size_t m, std::size_t p,
                     Vec& a, Vec& b, Vec& c) {
    if (w.size() != n + m + p) throw DimensionError("unstack3: length mismatch");
    a.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n));
    b.assign(w.begin() + static_cast<std::ptrdiff_t>(n),
             w.begin() + static_cast<std::ptrdiff_t>(n + m));
    c.assign(w.begin() + static_cast<std::ptrdiff_t>(n + m), w.end());
}

}  // namespace saddle
