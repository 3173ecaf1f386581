#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "saddle/errors.hpp"
#include "saddle/factor.hpp"
#include "saddle/problem.hpp"
#include "saddle/vec.hpp"

namespace saddle {

/// Relaxation triple of the three-parameter SOR iteration. Positivity is a
/// structural requirement; the convergence region proper is checked by the
/// theory predicates.
struct GsorParams {
    double omega = 1.0;
    double tau = 1.0;
    double theta = 1.0;

    void validate() const {
        if (!(omega > 0.0) || !(tau > 0.0) || !(theta > 0.0) || !std::isfinite(omega) ||
            !std::isfinite(tau) || !std::isfinite(theta))
            throw Error("GsorParams: omega, tau, theta must be positive and finite");
    }
};

struct SolveOptions {
    double tol = 1e-8;
    long max_iter = 100000;
    bool record_history = false;
    double divergence_threshold = 1e8;

    void validate() const {
        if (!(tol > 0.0)) throw Error("SolveOptions: tol must be positive");
        if (max_iter < 1) throw Error("SolveOptions: max_iter must be at least 1");
    }
};

enum class SolveStatus { Converged, MaxIter, Diverged };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIter: return "max-iter";
        case SolveStatus::Diverged: return "diverged";
    }
    return "unknown";
}

struct SolveReport {
    SolveStatus status = SolveStatus::MaxIter;
    long iterations = 0;
    double final_res = 0.0;
    std::vector<double> history;  // residual per iteration, index 0 = initial guess
    double setup_seconds = 0.0;
    double solve_seconds = 0.0;
    std::uint64_t spd_solves = 0;        // SPD system solves inside the iteration loop
    std::uint64_t setup_spd_solves = 0;  // SPD system solves spent in setup
    bool residual_absolute = false;
};

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Three-parameter SOR iteration for the double saddle-point problem:
///
///   x_{k+1} = x_k + omega A^{-1} (f - A x_k - B^T y_k - C^T z_k)
///   y_{k+1} = y_k + tau   P^{-1} (B x_{k+1} - g)
///   z_{k+1} = z_k + theta D^{-1} (C x_{k+1} - D z_k - h)
///
/// Exactly three SPD solves per iteration; the factorizations of A, P, D are
/// reused from the problem. Terminates on the relative residual of the
/// symmetric system, the iteration cap, or a divergence guard.
inline std::pair<Vec, SolveReport> gsor_solve(const DoubleSaddleProblem& problem,
                                              const GsorParams& params,
                                              const SolveOptions& opts = {},
                                              const Vec& w0 = {}) {
    params.validate();
    opts.validate();

    SolveReport report;
    const detail::Stopwatch setup_clock;
    const std::uint64_t solves_at_entry = spd_solve_count();

    const int n = problem.n(), m = problem.m(), p = problem.p();
    Vec x, y, z;
    if (w0.empty()) {
        x.assign(n, 0.0);
        y.assign(m, 0.0);
        z.assign(p, 0.0);
    } else {
        unstack3(w0, n, m, p, x, y, z);
    }

    const CholeskyFactor& fa = problem.factor_a();
    const CholeskyFactor& fp = problem.factor_p();
    const CholeskyFactor& fd = problem.factor_d();

    Vec r1(n), r2(m), r3(p);
    const auto residual = [&] { return residual_value(problem, stack3(x, y, z)); };

    ResidualValue res = residual();
    report.residual_absolute = res.is_absolute;
    if (opts.record_history) report.history.push_back(res.value);
    report.setup_seconds = setup_clock.seconds();
    report.setup_spd_solves = spd_solve_count() - solves_at_entry;

    const detail::Stopwatch loop_clock;
    const std::uint64_t solves_at_loop = spd_solve_count();

    if (res.value <= opts.tol) {
        report.status = SolveStatus::Converged;
        report.final_res = res.value;
        report.solve_seconds = loop_clock.seconds();
        return {stack3(x, y, z), report};
    }

    for (long k = 1; k <= opts.max_iter; ++k) {
        // x-update uses y_k, z_k
        r1 = problem.f();
        problem.A().apply_add(x, r1, -1.0);
        problem.B().apply_transpose_add(y, r1, -1.0);
        problem.C().apply_transpose_add(z, r1, -1.0);
        axpy(params.omega, fa.solve(r1), x);

        // y- and z-updates use x_{k+1}
        problem.B().apply(x, r2);
        axpy(-1.0, problem.g(), r2);
        axpy(params.tau, fp.solve(r2), y);

        problem.C().apply(x, r3);
        problem.D().apply_add(z, r3, -1.0);
        axpy(-1.0, problem.h(), r3);
        axpy(params.theta, fd.solve(r3), z);

        res = residual();
        if (opts.record_history) report.history.push_back(res.value);
        report.iterations = k;
        report.final_res = res.value;

        if (!std::isfinite(res.value) || res.value > opts.divergence_threshold ||
            !all_finite(x) || !all_finite(y) || !all_finite(z)) {
            report.status = SolveStatus::Diverged;
            break;
        }
        if (res.value <= opts.tol) {
            report.status = SolveStatus::Converged;
            break;
        }
        if (k == opts.max_iter) report.status = SolveStatus::MaxIter;
    }

    report.solve_seconds = loop_clock.seconds();
    report.spd_solves = spd_solve_count() - solves_at_loop;
    return {stack3(x, y, z), report};
}

/// The classical single-parameter special case: omega = 1, theta = 1.
inline std::pair<Vec, SolveReport> uzawa_solve(const DoubleSaddleProblem& problem, double tau,
                                               const SolveOptions& opts = {},
                                               const Vec& w0 = {}) {
    return gsor_solve(problem, GsorParams{1.0, tau, 1.0}, opts, w0);
}

}  // namespace saddle
