#pragma once

#include <algorithm>
#include <cmath>

#include "saddle/errors.hpp"
#include "saddle/gsor.hpp"
#include "saddle/problem.hpp"

namespace saddle {

/// Slack applied to every strict inequality in the root-location and
/// convergence predicates; values within the slack of a boundary are treated
/// as outside. Roots with modulus this close to 1 are genuinely undecidable
/// in double precision.
inline constexpr double kBoundarySlack = 1e-12;

struct QuadraticCoeffs {
    double a1 = 0.0;
    double a0 = 0.0;
};

struct CubicCoeffs {
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;
};

/// Both roots of lambda^2 + a1 lambda + a0 lie in the open unit disk iff
/// |a1| < 1 + a0 < 2 (Schur-type coefficient test).
inline bool quadratic_schur_test(const QuadraticCoeffs& c, double slack = kBoundarySlack) {
    return std::abs(c.a1) < 1.0 + c.a0 - slack && 1.0 + c.a0 < 2.0 - slack;
}

/// All roots of lambda^3 + a2 lambda^2 + a1 lambda + a0 lie in the open unit
/// disk iff the three coefficient inequalities below hold.
inline bool cubic_schur_test(const CubicCoeffs& c, double slack = kBoundarySlack) {
    return std::abs(c.a2 + c.a0) < 1.0 + c.a1 - slack &&
           std::abs(c.a2 - 3.0 * c.a0) < 3.0 - c.a1 - slack &&
           c.a0 * c.a0 + c.a1 - c.a0 * c.a2 < 1.0 - slack;
}

/// Sufficient convergence region of the three-parameter iteration for a given
/// (theta, tau): omega must stay below
///   4 (2 - theta) / [ (2 - theta)(2 + tau mu_max) + 2 theta nu_max ].
inline double gsor_omega_upper(const SpectralData& sd, double theta, double tau) {
    if (!(theta > 0.0) || !(theta < 2.0)) throw Error("gsor_omega_upper: theta must be in (0,2)");
    if (!(tau > 0.0)) throw Error("gsor_omega_upper: tau must be positive");
    return 4.0 * (2.0 - theta) /
           ((2.0 - theta) * (2.0 + tau * sd.mu_max) + 2.0 * theta * sd.nu_max);
}

/// Companion tau bound of the same region for a given (omega, theta):
///   4 (omega + theta - omega theta) / (omega theta mu_max).
inline double gsor_tau_upper(const SpectralData& sd, double omega, double theta) {
    if (!(omega > 0.0) || !(theta > 0.0)) throw Error("gsor_tau_upper: parameters must be positive");
    return 4.0 * (omega + theta - omega * theta) / (omega * theta * sd.mu_max);
}

/// Upper end of the guaranteed-nonempty tau selection interval for a given
/// theta: 2 (2 - theta) / (theta mu_max). Any tau below it leaves room for a
/// positive omega.
inline double tau_selection_upper(const SpectralData& sd, double theta) {
    if (!(theta > 0.0) || !(theta < 2.0))
        throw Error("tau_selection_upper: theta must be in (0,2)");
    return 2.0 * (2.0 - theta) / (theta * sd.mu_max);
}

struct ParamBounds {
    double theta_lo = 0.0;   // open interval (theta_lo, theta_hi)
    double theta_hi = 2.0;
    double tau_upper = 0.0;  // tau selection interval upper end for this theta
    double omega_upper = 0.0;
};

inline ParamBounds gsor_convergence_bounds(const SpectralData& sd, double theta, double tau) {
    ParamBounds b;
    b.tau_upper = tau_selection_upper(sd, theta);
    b.omega_upper = gsor_omega_upper(sd, theta, tau);
    return b;
}

/// Strict membership in the sufficient convergence region.
inline bool gsor_region_contains(const SpectralData& sd, const GsorParams& params,
                                 double slack = kBoundarySlack) {
    if (!(params.theta > slack) || !(params.theta < 2.0 - slack)) return false;
    if (!(params.omega > slack) || !(params.tau > slack)) return false;
    if (!(params.omega < gsor_omega_upper(sd, params.theta, params.tau) - slack)) return false;
    return params.tau < gsor_tau_upper(sd, params.omega, params.theta) - slack;
}

/// Reproducible interior choice: tau at the midpoint of the selection
/// interval, then omega at half its upper bound. Satisfies the convergence
/// conditions by construction.
inline GsorParams select_params(const SpectralData& sd, double theta) {
    if (!(theta > 0.0) || !(theta < 2.0)) throw Error("select_params: theta must be in (0,2)");
    GsorParams p;
    p.theta = theta;
    p.tau = 0.5 * tau_selection_upper(sd, theta);
    p.omega = 0.5 * gsor_omega_upper(sd, theta, p.tau);
    return p;
}

/// Theta bound of the omega = 1 special case: 2 / (1 + nu_max).
inline double omega1_theta_upper(const SpectralData& sd) { return 2.0 / (1.0 + sd.nu_max); }

/// Tau bound of the omega = 1 special case:
///   2 (2 - theta - theta nu_max) / ((2 - theta) mu_max).
inline double omega1_tau_upper(const SpectralData& sd, double theta) {
    return 2.0 * (2.0 - theta - theta * sd.nu_max) / ((2.0 - theta) * sd.mu_max);
}

/// Convergence conditions of the omega = 1 case (strict).
inline bool omega1_conditions(const SpectralData& sd, double theta, double tau,
                              double slack = kBoundarySlack) {
    if (!(theta > slack) || !(theta < omega1_theta_upper(sd) - slack)) return false;
    return tau > slack && tau < omega1_tau_upper(sd, theta) - slack;
}

/// Tau bound of the omega = theta = 1 (classical) case: 2 (1 - nu_max) / mu_max.
inline double uzawa_tau_upper(const SpectralData& sd) {
    return 2.0 * (1.0 - sd.nu_max) / sd.mu_max;
}

/// Convergence conditions of the omega = theta = 1 case: requires nu_max < 1,
/// so it fails for every tau once nu_max >= 1.
inline bool uzawa_conditions(const SpectralData& sd, double tau, double slack = kBoundarySlack) {
    if (!(sd.nu_max < 1.0 - slack)) return false;
    return tau > slack && tau < uzawa_tau_upper(sd) - slack;
}

/// Eigenvalue enclosure of the preconditioned matrix: apart from eigenvalue 1
/// (multiplicity at least n), the spectrum lies in [lambda_lower,
/// lambda_upper].
struct SpectralInterval {
    double lambda_lower = 0.0;
    double lambda_upper = 0.0;
    double Lambda_low = 0.0;   // theta (1 + nu_max) + tau mu_min
    double Lambda_high = 0.0;  // theta (1 + nu_max) + tau mu_max
};

inline SpectralInterval preconditioned_interval(const SpectralData& sd, double tau,
                                                double theta) {
    if (!(tau > 0.0) || !(theta > 0.0))
        throw Error("preconditioned_interval: tau, theta must be positive");
    SpectralInterval si;
    si.Lambda_low = theta * (1.0 + sd.nu_max) + tau * sd.mu_min;
    si.Lambda_high = theta * (1.0 + sd.nu_max) + tau * sd.mu_max;
    // discriminants are nonnegative by AM-GM; clamp rounding noise
    const double disc_low =
        std::max(0.0, si.Lambda_low * si.Lambda_low - 4.0 * tau * theta * sd.mu_min);
    const double disc_high =
        std::max(0.0, si.Lambda_high * si.Lambda_high - 4.0 * tau * theta * sd.mu_max);
    si.lambda_lower = 0.5 * (si.Lambda_low - std::sqrt(disc_low));
    si.lambda_upper = 0.5 * (si.Lambda_high + std::sqrt(disc_high));
    return si;
}

/// Condition-number bounds for the preconditioned matrix: the literal bound
/// max{ upper, upper / lower } from the interval endpoints, and the coarser
/// closed-form overestimate
///   (theta/tau)(1+nu)^2/mu_min + (tau/theta) mu_max + (1+nu)(1 + mu_max/mu_min).
struct ConditionBound {
    double literal = 0.0;
    double simplified = 0.0;
};

inline ConditionBound condition_number_bound(const SpectralData& sd, double tau, double theta) {
    if (!(sd.mu_min > 0.0)) throw Error("condition_number_bound: mu_min must be positive");
    const SpectralInterval si = preconditioned_interval(sd, tau, theta);
    ConditionBound cb;
    cb.literal = std::max(si.lambda_upper, si.lambda_upper / si.lambda_lower);
    const double nu1 = 1.0 + sd.nu_max;
    cb.simplified = (theta / tau) * nu1 * nu1 / sd.mu_min + (tau / theta) * sd.mu_max +
                    nu1 * (1.0 + sd.mu_max / sd.mu_min);
    return cb;
}

}  // namespace saddle
