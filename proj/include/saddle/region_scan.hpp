#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "saddle/dense_eigen.hpp"
#include "saddle/errors.hpp"
#include "saddle/gsor.hpp"
#include "saddle/iteration_matrix.hpp"
#include "saddle/problem.hpp"

namespace saddle {

enum class ScanParam { Omega, Tau, Theta };

inline const char* to_string(ScanParam p) {
    switch (p) {
        case ScanParam::Omega: return "omega";
        case ScanParam::Tau: return "tau";
        case ScanParam::Theta: return "theta";
    }
    return "unknown";
}

struct GridAxis {
    ScanParam param = ScanParam::Omega;
    double lo = 0.0;
    double hi = 0.0;
    int steps = 1;

    double value(int i) const {
        return steps <= 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
    }
};

/// Grid scan over two of the three parameters with the third held fixed.
/// Empirical mode runs the solver per cell (the default, capped at 5000
/// iterations); spectral mode additionally reports the iteration-operator
/// spectral radius from the dense oracle.
struct RegionScanConfig {
    GridAxis axis1;
    GridAxis axis2;
    double fixed_value = 1.0;
    SolveOptions opts = [] {
        SolveOptions o;
        o.max_iter = 5000;
        return o;
    }();
    bool spectral_mode = false;
    int threads = 0;  // 0: hardware concurrency
};

struct RegionCell {
    double p1 = 0.0;
    double p2 = 0.0;
    bool converged = false;
    long iterations = 0;
    double rho = std::numeric_limits<double>::quiet_NaN();  // spectral mode only
};

namespace detail {

inline ScanParam fixed_param_of(const RegionScanConfig& cfg) {
    const bool used[3] = {
        cfg.axis1.param == ScanParam::Omega || cfg.axis2.param == ScanParam::Omega,
        cfg.axis1.param == ScanParam::Tau || cfg.axis2.param == ScanParam::Tau,
        cfg.axis1.param == ScanParam::Theta || cfg.axis2.param == ScanParam::Theta,
    };
    if (cfg.axis1.param == cfg.axis2.param)
        throw Error("region_scan: the two grid axes must differ");
    if (!used[0]) return ScanParam::Omega;
    if (!used[1]) return ScanParam::Tau;
    return ScanParam::Theta;
}

inline void set_param(GsorParams& params, ScanParam which, double value) {
    switch (which) {
        case ScanParam::Omega: params.omega = value; break;
        case ScanParam::Tau: params.tau = value; break;
        case ScanParam::Theta: params.theta = value; break;
    }
}

}  // namespace detail

/// Cells are independent: each one runs its own solve against the shared
/// immutable problem, so the grid parallelizes trivially. Output order is
/// row-major over (axis1, axis2) regardless of thread count.
inline std::vector<RegionCell> region_scan(const DoubleSaddleProblem& problem,
                                           const RegionScanConfig& cfg) {
    if (cfg.axis1.steps < 1 || cfg.axis2.steps < 1)
        throw Error("region_scan: steps must be at least 1");
    const ScanParam fixed = detail::fixed_param_of(cfg);
    const int n1 = cfg.axis1.steps, n2 = cfg.axis2.steps;
    std::vector<RegionCell> cells(static_cast<std::size_t>(n1) * n2);

    const auto run_cell = [&](int idx) {
        const int i = idx / n2, j = idx % n2;
        RegionCell& cell = cells[idx];
        cell.p1 = cfg.axis1.value(i);
        cell.p2 = cfg.axis2.value(j);
        GsorParams params;
        detail::set_param(params, cfg.axis1.param, cell.p1);
        detail::set_param(params, cfg.axis2.param, cell.p2);
        detail::set_param(params, fixed, cfg.fixed_value);
        const auto [w, report] = gsor_solve(problem, params, cfg.opts);
        cell.converged = report.status == SolveStatus::Converged;
        cell.iterations = report.iterations;
        if (cfg.spectral_mode)
            cell.rho = spectral_radius(gsor_iteration_operator(problem, params));
    };

    const int total = n1 * n2;
    int workers = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, total));
    if (workers == 1) {
        for (int idx = 0; idx < total; ++idx) run_cell(idx);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (int idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1))
                    run_cell(idx);
            });
        for (auto& th : pool) th.join();
    }
    return cells;
}

/// CSV schema: header then one row per cell, row-major.
inline void write_region_csv(std::ostream& out, const std::vector<RegionCell>& cells,
                             const RegionScanConfig& cfg) {
    const auto fmt = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << to_string(cfg.axis1.param) << "," << to_string(cfg.axis2.param)
        << ",converged,iters";
    if (cfg.spectral_mode) out << ",rho";
    out << "\n";
    for (const auto& c : cells) {
        out << fmt(c.p1) << "," << fmt(c.p2) << "," << (c.converged ? 1 : 0) << ","
            << c.iterations;
        if (cfg.spectral_mode) out << "," << fmt(c.rho);
        out << "\n";
    }
}

}  // namespace saddle
