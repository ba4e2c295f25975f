#ifndef WITHINHOST_ANALYSIS_HPP
#define WITHINHOST_ANALYSIS_HPP

#include "withinhost/params.hpp"
#include "withinhost/pde_model.hpp"
#include "withinhost/state.hpp"

namespace withinhost {

/// Fraction of parasitized cells among all red blood cells.
/// Throws NumericalError on an all-zero denominator.
double parasitemia(double total_prbc, double total_urbc);
double parasitemia(const OdeState& state);
double parasitemia(const PdeState& state, const AgeMesh& mesh);

/// Multiplicative factors of the within-host reproduction number: expected
/// offspring of one newly parasitized cell in an uninfected host.
///   invasion    probability a free merozoite invades before decaying,
///               beta*sum(R*) / (mu_mero + beta*sum(R*))
///   offspring   asexual merozoites per rupture, (1 - alpha_g) * r
///   production  probability a surviving cell releases merozoites
///               (1 for the stage chain, mu_bar/(mu_bar + d0) for the
///               age-structured model)
///   survival    probability the cell survives development
///               (prod_i mu_i/(mu_i + d_i), or exp(-dev_time*d0))
struct R0Breakdown {
    double invasion = 0.0;
    double offspring = 0.0;
    double production = 0.0;
    double survival = 0.0;
    double sum_r_star = 0.0;
    double r0 = 0.0;
};

R0Breakdown r0_breakdown_ode(const ModelParams& params);
/// production_factor_one drops the mu_bar/(mu_bar+d0) factor; used by the
/// large-K consistency check between the two model families.
R0Breakdown r0_breakdown_pde(const ModelParams& params,
                             bool production_factor_one = false);

double r0_ode(const ModelParams& params);
double r0_pde(const ModelParams& params);

/// Two-regime log-log power-law fit of gametocyte density against
/// parasitemia: G(t) = k1*P(t-lag)^theta1 up to the change point t0, then
/// G(t) = k2*P(t)^theta2. Uncertainties are ordinary-least-squares standard
/// errors of the log10-scale regressions.
struct RegressionFit {
    double log10_k1 = 0.0;
    double theta1 = 0.0;
    double log10_k2 = 0.0;
    double theta2 = 0.0;
    double t0_days = 0.0;
    double r2_first = 0.0;
    double r2_second = 0.0;
    double lag_days = 2.0;
    double se_log10_k1 = 0.0;
    double se_theta1 = 0.0;
    double se_log10_k2 = 0.0;
    double se_theta2 = 0.0;
};

/// Exhaustive change-point search over the trajectory's own sample times
/// within [search_lo, search_hi] days: for each candidate t0, OLS of
/// log10 G(t) on log10 P(t-lag) over [window_lo, t0] and of log10 G(t) on
/// log10 P(t) over (t0, window_hi]; the candidate with the smallest total
/// squared residual wins, ties broken toward the earliest t0. P at lagged
/// times is linearly interpolated when it falls between samples.
/// Throws ConfigError when a regime has fewer than 3 points for every
/// candidate, or when any G or P sample in the window is nonpositive.
RegressionFit fit_two_regime(const Trajectory& traj, double lag_days = 2.0,
                             double window_lo_days = 2.0,
                             double window_hi_days = 30.0,
                             double search_lo_days = 4.0,
                             double search_hi_days = 28.0);

/// Earliest sample time, in days, with strictly positive gametocytes and
/// parasitemia. Simulations started from a parasite-free age grid keep
/// gametocytes at exactly zero for one full development time, so a log-log
/// window anchored at day 2 lands on an undefined log; clamp the window start
/// to this value. Throws ConfigError when no sample qualifies.
double first_loggable_day(const Trajectory& traj);

/// Fixed coefficients of the clinical two-regime formula and its
/// relative-error propagation bound |dG/G|^2 <= err2_const + err2_slope*|dP/P|^2.
namespace clinical {
constexpr double k1 = 3.843e7;
constexpr double theta1 = 1.0304;
constexpr double k2 = 2.981e9;
constexpr double theta2 = -0.0470;
constexpr double t0_days = 14.5636;
constexpr double err2_const = 2.3884e-4;
constexpr double err2_slope = 1.0617;
} // namespace clinical

/// Gametocyte density estimated from parasitemia via the fixed clinical
/// formula. p must be the parasitemia at (t - 2) days while t <= t0_days and
/// at t afterwards; valid for t in (2, 30]. Throws ConfigError outside the
/// validity window or for p outside (0, 1).
double clinical_gametocytes(double p, double t_days);

} // namespace withinhost

#endif
