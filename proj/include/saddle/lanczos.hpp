#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "saddle/errors.hpp"
#include "saddle/rng.hpp"
#include "saddle/vec.hpp"

namespace saddle {

enum class Extremal { Largest, Smallest };

struct EigenEstimate {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Operator callback: out = Op * in. Must represent a symmetric positive
/// semidefinite operator.
using SymmetricOperator = std::function<void(const Vec& in, Vec& out)>;

namespace detail {

/// Number of eigenvalues of the symmetric tridiagonal (alpha, beta) strictly
/// below x, by Sturm sequence count.
inline int sturm_count_below(const std::vector<double>& alpha, const std::vector<double>& beta,
                             double x) {
    int count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double bb = i == 0 ? 0.0 : beta[i - 1] * beta[i - 1];
        d = alpha[i] - x - bb / (d == 0.0 ? 1e-300 : d);
        if (d < 0.0) ++count;
    }
    return count;
}

/// Extremal eigenvalue of the symmetric tridiagonal (alpha, beta) by bisection.
inline double tridiag_extremal(const std::vector<double>& alpha, const std::vector<double>& beta,
                               Extremal which) {
    const int k = static_cast<int>(alpha.size());
    double lo = alpha[0], hi = alpha[0];
    for (int i = 0; i < k; ++i) {
        const double r = (i > 0 ? std::abs(beta[i - 1]) : 0.0) +
                         (i + 1 < k ? std::abs(beta[i]) : 0.0);
        lo = std::min(lo, alpha[i] - r);
        hi = std::max(hi, alpha[i] + r);
    }
    const double span = std::max(hi - lo, 1e-300);
    lo -= 1e-12 * span;
    hi += 1e-12 * span;
    // eigenvalue index to isolate: 0-based from below
    const int target = which == Extremal::Largest ? k - 1 : 0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi));
         ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count_below(alpha, beta, mid) > target)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Extremal eigenvalue of a symmetric PSD operator given only as a callback.
/// Lanczos with full reorthogonalization; at desk scale the Krylov space
/// reaches full dimension and the estimate is exact to rounding. Returns the
/// best estimate with a convergence flag when the cap is hit first.
inline EigenEstimate extremal_symmetric_eigenvalue(const SymmetricOperator& apply, int dim,
                                                   Extremal which, double rel_tol = 1e-10,
                                                   int max_iter = 0) {
    if (dim <= 0) throw DimensionError("extremal_symmetric_eigenvalue: dim must be positive");
    const int cap = max_iter > 0 ? std::min(max_iter, dim) : std::min(dim, 400);

    Rng rng(0x5EED5EED5EEDULL ^ (static_cast<std::uint64_t>(dim) << 17));
    Vec v(dim);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    scale(1.0 / std::max(norm2(v), 1e-300), v);

    std::vector<Vec> basis;
    basis.push_back(v);
    std::vector<double> alpha, beta;
    Vec w(dim);

    EigenEstimate est;
    double prev = 0.0;
    bool have_prev = false;
    int stall = 0;
    double op_scale = 0.0;

    for (int k = 0; k < cap; ++k) {
        apply(basis[k], w);
        if (static_cast<int>(w.size()) != dim)
            throw DimensionError("extremal_symmetric_eigenvalue: callback output length");
        const double a = dot(w, basis[k]);
        alpha.push_back(a);
        // three-term recurrence, then full reorthogonalization (two passes)
        axpy(-a, basis[k], w);
        if (k > 0) axpy(-beta[k - 1], basis[k - 1], w);
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec& q : basis) axpy(-dot(w, q), q, w);

        op_scale = std::max({op_scale, std::abs(a), k > 0 ? std::abs(beta[k - 1]) : 0.0});
        est.value = detail::tridiag_extremal(alpha, beta, which);
        est.iterations = k + 1;

        const double b = norm2(w);
        const bool invariant = b <= 1e-14 * std::max(op_scale, 1e-300);
        const bool full = k + 1 == dim;
        if (have_prev &&
            std::abs(est.value - prev) <= rel_tol * std::max(1.0, std::abs(est.value)))
            ++stall;
        else
            stall = 0;
        prev = est.value;
        have_prev = true;
        if (stall >= 2 || invariant || full) {
            est.converged = true;
            return est;
        }
        beta.push_back(b);
        Vec next = w;
        scale(1.0 / b, next);
        basis.push_back(std::move(next));
    }
    est.converged = false;  // cap reached; best estimate returned
    return est;
}

}  // namespace saddle
