#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "saddle/factor.hpp"
#include "saddle/gsor.hpp"
#include "saddle/problem.hpp"

namespace saddle {

/// Midpoint of the convergence interval for the block-SOR baseline:
/// s / 2 with s = 2 / (1 + sqrt(nu_max)).
inline double gbsor_default_omega(const SpectralData& sd) {
    return 1.0 / (1.0 + std::sqrt(sd.nu_max));
}

/// Single-parameter block-SOR baseline from the splitting
///
///   M = (1/omega) [ A        B^T  0  ]      N = M - (symmetric system)
///                 [ B        0    0  ]
///                 [ omega C  0   -D  ]
///
/// Each step solves M u = N w_k + b through the (x, y) saddle sub-block via
/// the Schur complement B A^{-1} B^T, then one D solve: four SPD solves per
/// iteration (A twice, Schur once, D once). The Schur complement is formed
/// densely and factorized once at setup.
inline std::pair<Vec, SolveReport> gbsor_solve(const DoubleSaddleProblem& problem,
                                               std::optional<double> omega_opt = std::nullopt,
                                               const SolveOptions& opts = {},
                                               const Vec& w0 = {}) {
    opts.validate();

    SolveReport report;
    const detail::Stopwatch setup_clock;
    const std::uint64_t solves_at_entry = spd_solve_count();

    const double omega =
        omega_opt.has_value() ? *omega_opt : gbsor_default_omega(spectral_data(problem));
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw Error("gbsor_solve: omega must be positive and finite");

    const int n = problem.n(), m = problem.m(), p = problem.p();
    const CholeskyFactor& fa = problem.factor_a();
    const CholeskyFactor& fd = problem.factor_d();

    // dense Schur complement S = B A^{-1} B^T, factorized once
    DenseMatrix S(m, m);
    {
        Vec bi(n, 0.0);
        for (int j = 0; j < m; ++j) {
            bi.assign(n, 0.0);
            for (int k = problem.B().row_ptr()[j]; k < problem.B().row_ptr()[j + 1]; ++k)
                bi[problem.B().col_idx()[k]] = problem.B().values()[k];
            const Vec col = problem.B().apply(fa.solve(bi));
            for (int i = 0; i < m; ++i) S(i, j) = col[i];
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < i; ++j) {
                const double v = 0.5 * (S(i, j) + S(j, i));
                S(i, j) = S(j, i) = v;
            }
    }
    const CholeskyFactor fs = CholeskyFactor::dense_from_dense(S);

    Vec x, y, z;
    if (w0.empty()) {
        x.assign(n, 0.0);
        y.assign(m, 0.0);
        z.assign(p, 0.0);
    } else {
        unstack3(w0, n, m, p, x, y, z);
    }

    ResidualValue res = residual_value(problem, stack3(x, y, z));
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

    const double c = (1.0 - omega) / omega;
    Vec r1(n), r2(m), r3(p);
    for (long k = 1; k <= opts.max_iter; ++k) {
        // rhs = N w_k + b, evaluated blockwise
        r1 = problem.f();
        problem.A().apply_add(x, r1, c);
        problem.B().apply_transpose_add(y, r1, c);
        problem.C().apply_transpose_add(z, r1, -1.0);
        r2 = problem.g();
        problem.B().apply_add(x, r2, c);
        r3 = problem.h();
        problem.D().apply_add(z, r3, -c);

        // M u = rhs: saddle sub-block by Schur elimination, then the D row
        scale(omega, r1);
        scale(omega, r2);
        const Vec t = fa.solve(r1);                 // A solve #1
        Vec sy = problem.B().apply(t);
        axpy(-1.0, r2, sy);
        y = fs.solve(sy);                           // Schur solve
        Vec rx = r1;
        problem.B().apply_transpose_add(y, rx, -1.0);
        x = fa.solve(rx);                           // A solve #2
        Vec rz = problem.C().apply(x);
        axpy(-1.0, r3, rz);
        scale(omega, rz);
        z = fd.solve(rz);                           // D solve

        res = residual_value(problem, stack3(x, y, z));
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

}  // namespace saddle
