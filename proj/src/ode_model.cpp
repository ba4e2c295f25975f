#include "withinhost/ode_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "withinhost/errors.hpp"
#include "withinhost/immunity.hpp"
#include "withinhost/rbc.hpp"

namespace withinhost {

namespace {

void check_dimensions(const OdeState& state, const ModelParams& params) {
    const auto k = static_cast<std::size_t>(params.k_stages);
    if (state.p.size() != k || params.mu_i.size() != k || params.d_i.size() != k) {
        throw ConfigError("ode_rhs: state.p, mu_i, d_i must all have length k_stages");
    }
}

// deriv = state-shaped derivative; cum_m excluded from the Runge-Kutta flow.
void rhs_unchecked(const OdeState& s, double t, const ModelParams& pr, OdeState& d) {
    const std::size_t k = s.p.size();
    d.p.resize(k);

    const double sum_gamma_r = pr.gamma_r * s.r_r + pr.gamma_m * s.r_m + pr.gamma_s * s.r_s;
    const double infection = pr.beta * s.m * sum_gamma_r;

    d.r_r = pr.lambda0 - s.r_r / pr.dur_r - pr.beta * s.m * pr.gamma_r * s.r_r;
    d.r_m = s.r_r / pr.dur_r - s.r_m / pr.dur_m - pr.beta * s.m * pr.gamma_m * s.r_m;
    d.r_s = s.r_m / pr.dur_m - s.r_s / pr.dur_s - pr.beta * s.m * pr.gamma_s * s.r_s;

    d.p[0] = infection - (pr.mu_i[0] + pr.d_i[0]) * s.p[0];
    for (std::size_t i = 1; i < k; ++i) {
        d.p[i] = pr.mu_i[i - 1] * s.p[i - 1] - (pr.mu_i[i] + pr.d_i[i]) * s.p[i];
    }

    const double release = pr.r_burst * pr.mu_i[k - 1] * s.p[k - 1];
    const double s_i = innate_response(s.m, pr.si_star);
    const double s_a = adaptive_response(t, s.cum_m, pr.sa_star, pr.delta0, pr.delta1);
    const double innate_term = pr.innate_scaled_by_m ? s_i * s.m : s_i;

    d.m = (1.0 - pr.alpha_g) * release
          - (pr.mu_mero + pr.beta * sum_gamma_r + s_a) * s.m - innate_term;
    d.g = pr.alpha_g * release - pr.mu_g * s.g;
    d.cum_m = 0.0;
}

// out = base + factor * slope over the flowing components.
void saxpy(const OdeState& base, double factor, const OdeState& slope, OdeState& out) {
    const std::size_t k = base.p.size();
    out.p.resize(k);
    out.r_r = base.r_r + factor * slope.r_r;
    out.r_m = base.r_m + factor * slope.r_m;
    out.r_s = base.r_s + factor * slope.r_s;
    for (std::size_t i = 0; i < k; ++i) {
        out.p[i] = base.p[i] + factor * slope.p[i];
    }
    out.m = base.m + factor * slope.m;
    out.g = base.g + factor * slope.g;
    out.cum_m = base.cum_m;
}

bool finite_state(const OdeState& s) {
    if (!std::isfinite(s.r_r) || !std::isfinite(s.r_m) || !std::isfinite(s.r_s) ||
        !std::isfinite(s.m) || !std::isfinite(s.g)) {
        return false;
    }
    for (double v : s.p) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

void clamp_state(OdeState& s, SimStats* stats) {
    auto clamp_one = [stats](double& v) {
        if (v < 0.0) {
            if (stats != nullptr) {
                ++stats->clamp_events;
                stats->min_component = std::min(stats->min_component, v);
            }
            v = 0.0;
        }
    };
    clamp_one(s.r_r);
    clamp_one(s.r_m);
    clamp_one(s.r_s);
    for (double& v : s.p) {
        clamp_one(v);
    }
    clamp_one(s.m);
    clamp_one(s.g);
}

void track_min(const OdeState& s, SimStats* stats) {
    if (stats == nullptr) {
        return;
    }
    double lo = std::min({s.r_r, s.r_m, s.r_s, s.m, s.g});
    for (double v : s.p) {
        lo = std::min(lo, v);
    }
    stats->min_component = std::min(stats->min_component, lo);
}

long checked_stride(double interval, double dt, const char* what) {
    const double ratio = interval / dt;
    const long stride = std::lround(ratio);
    if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio) {
        throw ConfigError(std::string("simulate: ") + what +
                          " must be a positive integer multiple of dt");
    }
    return stride;
}

} // namespace

void ode_rhs(const OdeState& state, double t, const ModelParams& params, OdeState& deriv) {
    check_dimensions(state, params);
    rhs_unchecked(state, t, params, deriv);
}

OdeState ode_rhs(const OdeState& state, double t, const ModelParams& params) {
    OdeState deriv;
    ode_rhs(state, t, params, deriv);
    return deriv;
}

OdeState default_ode_init(const ModelParams& params) {
    const RbcEquilibrium eq = equilibrium(params);
    OdeState init;
    init.r_r = eq.r_r_star;
    init.r_m = eq.r_m_star;
    init.r_s = eq.r_s_star;
    init.p.assign(static_cast<std::size_t>(params.k_stages), 0.0);
    init.m = params.m0;
    init.g = 0.0;
    init.cum_m = 0.0;
    return init;
}

Trajectory simulate_ode(const OdeState& init, const SimConfig& config,
                        const ModelParams& params, SimStats* stats) {
    validate(params);
    check_dimensions(init, params);
    if (!(config.dt > 0.0)) {
        throw ConfigError("simulate_ode: dt must be positive");
    }
    const long record_stride = checked_stride(config.record_every, config.dt, "record_every");
    const long n_steps = config.t_end <= 0.0
                             ? 0
                             : checked_stride(config.t_end, config.dt, "t_end");

    OdeState state = init;
    OdeState k1, k2, k3, k4, scratch;
    Trajectory traj;

    auto record = [&traj, &state](double t) {
        double sum_p = 0.0;
        for (double v : state.p) {
            sum_p += v;
        }
        const double sum_r = state.r_r + state.r_m + state.r_s;
        const double denom = sum_p + sum_r;
        traj.times.push_back(t);
        traj.gametocytes.push_back(state.g);
        traj.merozoites.push_back(state.m);
        traj.parasitemia.push_back(denom > 0.0 ? sum_p / denom : 0.0);
        traj.total_prbc.push_back(sum_p);
        traj.total_urbc.push_back(sum_r);
    };

    record(0.0);
    const double dt = config.dt;
    for (long step = 0; step < n_steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        const double m_at_step_start = state.m;

        rhs_unchecked(state, t, params, k1);
        saxpy(state, 0.5 * dt, k1, scratch);
        rhs_unchecked(scratch, t + 0.5 * dt, params, k2);
        saxpy(state, 0.5 * dt, k2, scratch);
        rhs_unchecked(scratch, t + 0.5 * dt, params, k3);
        saxpy(state, dt, k3, scratch);
        rhs_unchecked(scratch, t + dt, params, k4);

        const std::size_t k = state.p.size();
        const double w = dt / 6.0;
        state.r_r += w * (k1.r_r + 2.0 * k2.r_r + 2.0 * k3.r_r + k4.r_r);
        state.r_m += w * (k1.r_m + 2.0 * k2.r_m + 2.0 * k3.r_m + k4.r_m);
        state.r_s += w * (k1.r_s + 2.0 * k2.r_s + 2.0 * k3.r_s + k4.r_s);
        for (std::size_t i = 0; i < k; ++i) {
            state.p[i] += w * (k1.p[i] + 2.0 * k2.p[i] + 2.0 * k3.p[i] + k4.p[i]);
        }
        state.m += w * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m);
        state.g += w * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g);

        // Windowed cumulative merozoite load; left-rectangle rule.
        state.cum_m = accumulate(ImmuneState{state.cum_m}, t, dt, m_at_step_start,
                                 params.delta0, params.delta1)
                          .cum_m;

        if (!finite_state(state)) {
            throw NumericalError("simulate_ode: non-finite state at t = " +
                                 std::to_string(t + dt) + " h");
        }
        if (config.clamp_negative) {
            clamp_state(state, stats);
        } else {
            track_min(state, stats);
        }
        if (stats != nullptr) {
            ++stats->steps;
        }
        if ((step + 1) % record_stride == 0) {
            record(static_cast<double>(step + 1) * dt);
        }
    }
    return traj;
}

double chain_survival(int k, double a, double dev_time) {
    if (k < 1) {
        throw ConfigError("chain_survival: k must be >= 1");
    }
    if (!(dev_time > 0.0)) {
        throw ConfigError("chain_survival: dev_time must be positive");
    }
    if (a <= 0.0) {
        return 1.0;
    }
    // Tail of Gamma(k, dev_time/k) at a == P(Poisson(lambda) <= k-1).
    const double lambda = a * static_cast<double>(k) / dev_time;
    const double log_lambda = std::log(lambda);

    // Largest Poisson term inside the summation range; anchoring the
    // log-scaled sum there keeps the result accurate for k in the thousands.
    const int j_peak = std::min(k - 1, static_cast<int>(std::floor(lambda)));
    const double log_peak = -lambda + static_cast<double>(j_peak) * log_lambda -
                            std::lgamma(static_cast<double>(j_peak) + 1.0);

    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
        const double log_term = -lambda + static_cast<double>(j) * log_lambda -
                                std::lgamma(static_cast<double>(j) + 1.0);
        sum += std::exp(log_term - log_peak);
    }
    const double result = std::exp(log_peak) * sum;
    return std::clamp(result, 0.0, 1.0);
}

} // namespace withinhost
