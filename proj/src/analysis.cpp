#include "withinhost/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "withinhost/errors.hpp"
#include "withinhost/rbc.hpp"
#include "withinhost/units.hpp"

namespace withinhost {

double parasitemia(double total_prbc, double total_urbc) {
    const double denom = total_prbc + total_urbc;
    if (!(denom > 0.0)) {
        throw NumericalError("parasitemia: total cell density is zero");
    }
    return total_prbc / denom;
}

double parasitemia(const OdeState& state) {
    double sum_p = 0.0;
    for (double v : state.p) {
        sum_p += v;
    }
    return parasitemia(sum_p, state.r_r + state.r_m + state.r_s);
}

double parasitemia(const PdeState& state, const AgeMesh& mesh) {
    double mass = 0.0;
    for (double v : state.p_grid) {
        mass += v;
    }
    mass *= mesh.da;
    return parasitemia(mass, state.r_r + state.r_m + state.r_s);
}

namespace {

double invasion_probability(const ModelParams& params, double sum_r_star) {
    const double captured = params.beta * sum_r_star;
    return captured / (params.mu_mero + captured);
}

double gamma_weighted_equilibrium(const ModelParams& params) {
    const RbcEquilibrium eq = equilibrium(params);
    return params.gamma_r * eq.r_r_star + params.gamma_m * eq.r_m_star +
           params.gamma_s * eq.r_s_star;
}

} // namespace

R0Breakdown r0_breakdown_ode(const ModelParams& params) {
    validate(params);
    R0Breakdown b;
    b.sum_r_star = gamma_weighted_equilibrium(params);
    b.invasion = invasion_probability(params, b.sum_r_star);
    b.offspring = (1.0 - params.alpha_g) * params.r_burst;
    b.production = 1.0;
    // prod_i mu_i/(mu_i+d_i) in log form so K ~ 1e4 keeps full precision.
    double log_survival = 0.0;
    for (std::size_t i = 0; i < params.mu_i.size(); ++i) {
        log_survival -= std::log1p(params.d_i[i] / params.mu_i[i]);
    }
    b.survival = std::exp(log_survival);
    b.r0 = b.invasion * b.offspring * b.production * b.survival;
    return b;
}

R0Breakdown r0_breakdown_pde(const ModelParams& params, bool production_factor_one) {
    validate(params);
    R0Breakdown b;
    b.sum_r_star = gamma_weighted_equilibrium(params);
    b.invasion = invasion_probability(params, b.sum_r_star);
    b.offspring = (1.0 - params.alpha_g) * params.r_burst;
    b.production = production_factor_one
                       ? 1.0
                       : params.mu_bar / (params.mu_bar + params.d0);
    b.survival = std::exp(-params.dev_time * params.d0);
    b.r0 = b.invasion * b.offspring * b.production * b.survival;
    return b;
}

double r0_ode(const ModelParams& params) { return r0_breakdown_ode(params).r0; }

double r0_pde(const ModelParams& params) { return r0_breakdown_pde(params).r0; }

namespace {

struct OlsFit {
    double intercept = 0.0;
    double slope = 0.0;
    double sse = 0.0;
    double r2 = 1.0;
    double se_intercept = 0.0;
    double se_slope = 0.0;
};

OlsFit ols(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    OlsFit fit;
    if (sxx <= 0.0) {
        // Degenerate abscissa: horizontal fit through the mean.
        fit.slope = 0.0;
        fit.intercept = mean_y;
        fit.sse = syy;
        fit.r2 = syy <= 0.0 ? 1.0 : 0.0;
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    fit.sse = std::max(0.0, syy - fit.slope * sxy);
    fit.r2 = syy <= 0.0 ? 1.0 : 1.0 - fit.sse / syy;
    if (x.size() > 2) {
        const double sigma2 = fit.sse / (n - 2.0);
        fit.se_slope = std::sqrt(sigma2 / sxx);
        fit.se_intercept = std::sqrt(sigma2 * (1.0 / n + mean_x * mean_x / sxx));
    }
    return fit;
}

// Linear interpolation of a sampled series at time t (hours); times strictly
// increasing. Returns false when t is outside the sampled range.
bool interp_at(const std::vector<double>& times, const std::vector<double>& values,
               double t, double* out) {
    if (times.empty() || t < times.front() - 1e-9 || t > times.back() + 1e-9) {
        return false;
    }
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - times.begin());
    if (hi >= times.size()) {
        hi = times.size() - 1;
    }
    if (std::abs(times[hi] - t) <= 1e-9) {
        *out = values[hi];
        return true;
    }
    if (hi == 0) {
        *out = values[0];
        return true;
    }
    const std::size_t lo = hi - 1;
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    *out = values[lo] + w * (values[hi] - values[lo]);
    return true;
}

} // namespace

RegressionFit fit_two_regime(const Trajectory& traj, double lag_days,
                             double window_lo_days, double window_hi_days,
                             double search_lo_days, double search_hi_days) {
    if (traj.size() < 6) {
        throw ConfigError("fit_two_regime: trajectory has too few samples");
    }

    // Collect usable samples: t inside the window with P(t - lag) available.
    const double lag_h = days_to_hours(lag_days);
    std::vector<double> t_days, log_g, log_p_lagged, log_p_now;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        const double td = hours_to_days(t);
        if (td < window_lo_days - 1e-12 || td > window_hi_days + 1e-12) {
            continue;
        }
        double p_lag = 0.0;
        if (!interp_at(traj.times, traj.parasitemia, t - lag_h, &p_lag)) {
            continue;
        }
        const double g = traj.gametocytes[i];
        const double p_now = traj.parasitemia[i];
        if (!(g > 0.0) || !(p_now > 0.0) || !(p_lag > 0.0)) {
            throw ConfigError("fit_two_regime: nonpositive gametocyte or parasitemia "
                              "sample inside the fit window");
        }
        t_days.push_back(td);
        log_g.push_back(std::log10(g));
        log_p_lagged.push_back(std::log10(p_lag));
        log_p_now.push_back(std::log10(p_now));
    }

    const std::size_t n = t_days.size();
    RegressionFit best;
    double best_total = std::numeric_limits<double>::infinity();
    bool found = false;

    for (std::size_t c = 0; c < n; ++c) {
        const double t0 = t_days[c];
        if (t0 < search_lo_days - 1e-12 || t0 > search_hi_days + 1e-12) {
            continue;
        }
        std::vector<double> x1, y1, x2, y2;
        for (std::size_t i = 0; i < n; ++i) {
            if (t_days[i] <= t0 + 1e-12) {
                x1.push_back(log_p_lagged[i]);
                y1.push_back(log_g[i]);
            } else {
                x2.push_back(log_p_now[i]);
                y2.push_back(log_g[i]);
            }
        }
        if (x1.size() < 3 || x2.size() < 3) {
            continue;
        }
        const OlsFit f1 = ols(x1, y1);
        const OlsFit f2 = ols(x2, y2);
        const double total = f1.sse + f2.sse;
        if (total < best_total) {  // strict: ties keep the earliest t0
            best_total = total;
            best.log10_k1 = f1.intercept;
            best.theta1 = f1.slope;
            best.log10_k2 = f2.intercept;
            best.theta2 = f2.slope;
            best.t0_days = t0;
            best.r2_first = f1.r2;
            best.r2_second = f2.r2;
            best.lag_days = lag_days;
            best.se_log10_k1 = f1.se_intercept;
            best.se_theta1 = f1.se_slope;
            best.se_log10_k2 = f2.se_intercept;
            best.se_theta2 = f2.se_slope;
            found = true;
        }
    }
    if (!found) {
        throw ConfigError("fit_two_regime: no change point leaves at least 3 "
                          "points in both regimes");
    }
    return best;
}

double first_loggable_day(const Trajectory& traj) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.gametocytes[i] > 0.0 && traj.parasitemia[i] > 0.0) {
            return hours_to_days(traj.times[i]);
        }
    }
    throw ConfigError("first_loggable_day: no sample has positive gametocytes "
                      "and parasitemia");
}

double clinical_gametocytes(double p, double t_days) {
    if (!(t_days > 2.0) || t_days > 30.0) {
        throw ConfigError("clinical_gametocytes: t must lie in (2, 30] days");
    }
    if (!(p > 0.0) || p > 1.0) {
        throw ConfigError("clinical_gametocytes: parasitemia must lie in (0, 1]");
    }
    if (t_days <= clinical::t0_days) {
        return clinical::k1 * std::pow(p, clinical::theta1);
    }
    return clinical::k2 * std::pow(p, clinical::theta2);
}

} // namespace withinhost
