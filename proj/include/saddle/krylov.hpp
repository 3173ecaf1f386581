#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "saddle/errors.hpp"
#include "saddle/gsor.hpp"
#include "saddle/preconditioner.hpp"
#include "saddle/problem.hpp"
#include "saddle/vec.hpp"

namespace saddle {

struct KrylovOptions {
    int restart = 100;
    double tol = 1e-8;
    long max_iter = 100000;
    bool record_history = false;

    void validate() const {
        if (restart < 1) throw Error("KrylovOptions: restart must be at least 1");
        if (!(tol > 0.0)) throw Error("KrylovOptions: tol must be positive");
        if (max_iter < 1) throw Error("KrylovOptions: max_iter must be at least 1");
    }
};

/// Square operator given as a callback.
struct LinearOperator {
    int dim = 0;
    std::function<Vec(const Vec&)> apply;
};

inline LinearOperator make_operator(const AssembledOperator& op) {
    return {op.dim(), [op](const Vec& v) { return op.apply(v); }};
}

inline LinearOperator make_operator(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("make_operator: matrix not square");
    return {m.rows(), [m](const Vec& v) { return m.apply(v); }};
}

namespace detail {

/// Orthogonality loss triggering the second modified Gram-Schmidt pass.
inline constexpr double kReorthTol = 1e-8;

inline Vec apply_precond(const Preconditioner* pc, const Vec& v) {
    return pc ? pc->apply(v) : v;
}

}  // namespace detail

/// Restarted GMRES, left preconditioning, modified Gram-Schmidt with one
/// reorthogonalization pass whenever the loss of orthogonality exceeds 1e-8.
/// Convergence is declared on the true relative residual of the original
/// system, recomputed whenever the inner estimate crosses the target and at
/// every restart; a lucky breakdown triggers the same check-then-restart.
inline std::pair<Vec, SolveReport> gmres_solve(const LinearOperator& op,
                                               const Preconditioner* precond, const Vec& b,
                                               const KrylovOptions& opts = {}) {
    opts.validate();
    const int dim = op.dim;
    if (static_cast<int>(b.size()) != dim) throw DimensionError("gmres_solve: length mismatch");

    SolveReport report;
    const detail::Stopwatch clock;
    Vec x(dim, 0.0);

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        report.status = SolveStatus::Converged;
        report.final_res = 0.0;
        report.residual_absolute = true;
        if (opts.record_history) report.history.push_back(0.0);
        report.solve_seconds = clock.seconds();
        return {x, report};
    }

    const auto true_res = [&](const Vec& cand) {
        Vec r = b;
        axpy(-1.0, op.apply(cand), r);
        return norm2(r) / bnorm;
    };

    double res = true_res(x);
    report.final_res = res;
    if (opts.record_history) report.history.push_back(res);
    if (res <= opts.tol) {
        report.status = SolveStatus::Converged;
        report.solve_seconds = clock.seconds();
        return {x, report};
    }

    const double zb_norm = norm2(detail::apply_precond(precond, b));
    const int restart = static_cast<int>(std::min<long>(opts.restart, opts.max_iter));
    std::vector<Vec> V;
    std::vector<std::vector<double>> H;  // H[j] holds the triangularized column j
    Vec g, cs, sn;
    double inner_target = opts.tol;
    long iter = 0;
    report.status = SolveStatus::MaxIter;

    // y from the triangular least-squares system, then x + V y
    const auto form_candidate = [&](int cols) {
        Vec y(cols, 0.0);
        for (int i = cols - 1; i >= 0; --i) {
            double s = g[i];
            for (int k = i + 1; k < cols; ++k) s -= H[k][i] * y[k];
            y[i] = s / H[i][i];
        }
        Vec cand = x;
        for (int k = 0; k < cols; ++k) axpy(y[k], V[k], cand);
        return cand;
    };

    while (iter < opts.max_iter) {
        Vec r = b;
        axpy(-1.0, op.apply(x), r);
        Vec z = detail::apply_precond(precond, r);
        const double beta = norm2(z);
        if (beta == 0.0) break;  // preconditioned residual exactly zero
        V.assign(1, z);
        scale(1.0 / beta, V[0]);
        H.clear();
        g.assign(static_cast<std::size_t>(restart) + 1, 0.0);
        g[0] = beta;
        cs.assign(restart, 0.0);
        sn.assign(restart, 0.0);

        int cols = 0;
        bool converged = false, breakdown = false;
        for (int j = 0; j < restart && iter < opts.max_iter; ++j) {
            ++iter;
            Vec w = detail::apply_precond(precond, op.apply(V[j]));
            if (!all_finite(w)) {
                report.status = SolveStatus::Diverged;
                report.iterations = iter;
                report.final_res = res;
                report.solve_seconds = clock.seconds();
                return {x, report};
            }
            std::vector<double> h(static_cast<std::size_t>(j) + 2, 0.0);
            for (int i = 0; i <= j; ++i) {
                h[i] = dot(w, V[i]);
                axpy(-h[i], V[i], w);
            }
            double wnorm = norm2(w);
            double loss = 0.0;
            for (int i = 0; i <= j; ++i) loss = std::max(loss, std::abs(dot(w, V[i])));
            if (loss > detail::kReorthTol * std::max(wnorm, 1e-300)) {
                for (int i = 0; i <= j; ++i) {
                    const double corr = dot(w, V[i]);
                    h[i] += corr;
                    axpy(-corr, V[i], w);
                }
                wnorm = norm2(w);
            }
            h[j + 1] = wnorm;
            breakdown = wnorm <= 1e-14 * std::max(1.0, beta);
            if (!breakdown) {
                Vec v = w;
                scale(1.0 / wnorm, v);
                V.push_back(std::move(v));
            }

            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            const double denom = std::hypot(h[j], h[j + 1]);
            cs[j] = denom == 0.0 ? 1.0 : h[j] / denom;
            sn[j] = denom == 0.0 ? 0.0 : h[j + 1] / denom;
            h[j] = denom;
            h[j + 1] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            H.push_back(std::move(h));
            cols = j + 1;

            if (opts.record_history) report.history.push_back(true_res(form_candidate(cols)));

            const double est = std::abs(g[j + 1]) / zb_norm;
            if (est <= inner_target || breakdown) {
                const Vec cand = form_candidate(cols);
                res = true_res(cand);
                if (res <= opts.tol) {
                    x = cand;
                    converged = true;
                    break;
                }
                inner_target *= 0.25;  // estimate was optimistic; tighten it
                if (breakdown) {
                    x = cand;
                    break;  // restart from the recomputed true residual
                }
            }
        }
        if (converged) {
            report.status = SolveStatus::Converged;
            break;
        }
        if (!breakdown && cols > 0) {
            x = form_candidate(cols);
            res = true_res(x);
            if (res <= opts.tol) {
                report.status = SolveStatus::Converged;
                break;
            }
        }
        if (breakdown && res <= opts.tol) {
            report.status = SolveStatus::Converged;
            break;
        }
    }

    if (res <= opts.tol) report.status = SolveStatus::Converged;
    report.iterations = iter;
    report.final_res = res;
    report.solve_seconds = clock.seconds();
    return {x, report};
}

/// Preconditioned MINRES for the symmetric layout (Paige-Saunders recurrence
/// in the preconditioner inner product). The preconditioner must be SPD, so
/// only the block-diagonal kind (or none) is accepted. Termination is on the
/// true relative residual, evaluated every iteration at desk scale.
inline std::pair<Vec, SolveReport> minres_solve(const LinearOperator& op,
                                                const Preconditioner* precond, const Vec& b,
                                                const KrylovOptions& opts = {}) {
    opts.validate();
    if (precond && !precond->is_spd())
        throw Error("minres_solve: preconditioner must be SPD (block-diagonal kind)");
    const int dim = op.dim;
    if (static_cast<int>(b.size()) != dim) throw DimensionError("minres_solve: length mismatch");

    SolveReport report;
    const detail::Stopwatch clock;
    Vec x(dim, 0.0);

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        report.status = SolveStatus::Converged;
        report.residual_absolute = true;
        if (opts.record_history) report.history.push_back(0.0);
        report.solve_seconds = clock.seconds();
        return {x, report};
    }

    const auto true_res = [&](const Vec& cand) {
        Vec r = b;
        axpy(-1.0, op.apply(cand), r);
        return norm2(r) / bnorm;
    };

    double res = true_res(x);
    if (opts.record_history) report.history.push_back(res);
    report.final_res = res;
    if (res <= opts.tol) {
        report.status = SolveStatus::Converged;
        report.solve_seconds = clock.seconds();
        return {x, report};
    }

    // u_j: unpreconditioned Lanczos vectors; z = M^{-1} u_j; gamma_j the
    // M^{-1}-norm of u_j
    Vec u_prev(dim, 0.0);
    Vec u = b;
    Vec z = detail::apply_precond(precond, u);
    double gamma_sq = dot(z, u);
    if (!(gamma_sq > 0.0)) throw Error("minres_solve: preconditioner is not positive definite");
    double gamma = std::sqrt(gamma_sq), gamma_prev = 1.0;
    double eta = gamma;
    double c_prev2 = 1.0, c_prev = 1.0, s_prev2 = 0.0, s_prev = 0.0;
    Vec w_prev2(dim, 0.0), w_prev(dim, 0.0);

    report.status = SolveStatus::MaxIter;
    for (long j = 1; j <= opts.max_iter; ++j) {
        Vec zhat = z;
        scale(1.0 / gamma, zhat);
        const Vec az = op.apply(zhat);
        const double delta = dot(zhat, az);

        Vec u_next = az;
        axpy(-delta / gamma, u, u_next);
        if (j > 1) axpy(-gamma / gamma_prev, u_prev, u_next);
        Vec z_next = detail::apply_precond(precond, u_next);
        double g2 = dot(z_next, u_next);
        if (g2 < 0.0) g2 = 0.0;
        const double gamma_next = std::sqrt(g2);

        const double a0 = c_prev * delta - c_prev2 * s_prev * gamma;
        const double a1 = std::hypot(a0, gamma_next);
        const double a2 = s_prev * delta + c_prev2 * c_prev * gamma;
        const double a3 = s_prev2 * gamma;
        const double a1_safe = a1 == 0.0 ? 1e-300 : a1;
        const double c = a0 / a1_safe;
        const double s = gamma_next / a1_safe;

        Vec w = zhat;
        axpy(-a3, w_prev2, w);
        axpy(-a2, w_prev, w);
        scale(1.0 / a1_safe, w);

        axpy(c * eta, w, x);
        eta = -s * eta;

        res = true_res(x);
        if (opts.record_history) report.history.push_back(res);
        report.iterations = j;
        report.final_res = res;
        if (!std::isfinite(res) || !all_finite(x)) {
            report.status = SolveStatus::Diverged;
            break;
        }
        if (res <= opts.tol) {
            report.status = SolveStatus::Converged;
            break;
        }
        if (gamma_next <= 1e-300) break;  // Krylov space exhausted

        w_prev2 = w_prev;
        w_prev = w;
        u_prev = u;
        u = u_next;
        z = z_next;
        gamma_prev = gamma;
        gamma = gamma_next;
        c_prev2 = c_prev;
        c_prev = c;
        s_prev2 = s_prev;
        s_prev = s;
    }

    report.solve_seconds = clock.seconds();
    return {x, report};
}

}  // namespace saddle
