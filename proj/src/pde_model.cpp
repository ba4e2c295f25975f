#include "withinhost/pde_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "withinhost/errors.hpp"
#include "withinhost/immunity.hpp"
#include "withinhost/rbc.hpp"

namespace withinhost {

namespace {

bool is_integer_multiple(double value, double step) {
    const double ratio = value / step;
    return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio);
}

void check_step(double dt, double da, const ModelParams& params,
                const RuptureFunction& rf) {
    if (!(dt > 0.0)) {
        throw ConfigError("pde_step: dt must be positive");
    }
    if (dt > da * (1.0 + 1e-12)) {
        throw ConfigError("pde_step: Courant condition requires dt <= da");
    }
    // Explicit sink update stays nonnegative only while the removal per step
    // cannot exceed the cell content.
    if ((rf.mu_bar + params.d0) * dt > 1.0 + 1e-9) {
        throw ConfigError("pde_step: (mu_bar + d0) * dt must not exceed 1");
    }
}

struct StepWorkspace {
    std::vector<double> next_p;
};

// One explicit step; writes the advanced state into `next` (p buffer reused).
void step_unchecked(const PdeState& s, double t, double dt, const ModelParams& pr,
                    const AgeMesh& mesh, const RuptureFunction& rf, PdeState& next) {
    const std::size_t n = s.p_grid.size();
    next.p_grid.resize(n);

    const double sum_gamma_r = pr.gamma_r * s.r_r + pr.gamma_m * s.r_m + pr.gamma_s * s.r_s;
    const double inflow = pr.beta * s.m * sum_gamma_r;  // boundary density, cells/ml/h

    // Rupture release rate: r * integral of mu(a) p(t,a) da over cells.
    double rupture_mass_rate = 0.0;
    const int first_rupture_cell = static_cast<int>(std::llround(rf.dev_time / mesh.da));
    for (std::size_t i = static_cast<std::size_t>(first_rupture_cell); i < n; ++i) {
        rupture_mass_rate += s.p_grid[i];
    }
    rupture_mass_rate *= rf.mu_bar * mesh.da;
    const double release = pr.r_burst * rupture_mass_rate;

    const double s_i = innate_response(s.m, pr.si_star);
    const double s_a = adaptive_response(t, s.cum_m, pr.sa_star, pr.delta0, pr.delta1);
    const double innate_term = pr.innate_scaled_by_m ? s_i * s.m : s_i;

    next.m = s.m + dt * ((1.0 - pr.alpha_g) * release -
                         (pr.mu_mero + pr.beta * sum_gamma_r + s_a) * s.m - innate_term);
    next.g = s.g + dt * (pr.alpha_g * release - pr.mu_g * s.g);

    next.r_r = s.r_r + dt * (pr.lambda0 - s.r_r / pr.dur_r -
                             pr.beta * s.m * pr.gamma_r * s.r_r);
    next.r_m = s.r_m + dt * (s.r_r / pr.dur_r - s.r_m / pr.dur_m -
                             pr.beta * s.m * pr.gamma_m * s.r_m);
    next.r_s = s.r_s + dt * (s.r_m / pr.dur_m - s.r_s / pr.dur_s -
                             pr.beta * s.m * pr.gamma_s * s.r_s);

    // Removal by the source cell's own hazard, then upwind transport of the
    // damped values. The ordering matters: the release term above sums the
    // same pre-step densities the sink acts on, so every cell removed by the
    // rupture hazard is credited to merozoite release in the step it is
    // removed, and a cohort's total release telescopes to exactly
    // mass * mu_bar / (mu_bar + d0) at any resolution. Both substeps are
    // convex combinations under the validated step bounds, so cells cannot
    // go negative.
    const double nu = dt / mesh.da;
    double damped_upstream = inflow;  // boundary value entering cell 0
    for (std::size_t i = 0; i < n; ++i) {
        const double sink = rupture_rate(mesh.cell_center(static_cast<int>(i)), rf) + pr.d0;
        const double damped_self = s.p_grid[i] * (1.0 - dt * sink);
        next.p_grid[i] = damped_self + nu * (damped_upstream - damped_self);
        damped_upstream = damped_self;
    }

    next.cum_m = accumulate(ImmuneState{s.cum_m}, t, dt, s.m, pr.delta0, pr.delta1).cum_m;
}

bool finite_state(const PdeState& s) {
    if (!std::isfinite(s.r_r) || !std::isfinite(s.r_m) || !std::isfinite(s.r_s) ||
        !std::isfinite(s.m) || !std::isfinite(s.g)) {
        return false;
    }
    for (double v : s.p_grid) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

void clamp_state(PdeState& s, SimStats* stats) {
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
    for (double& v : s.p_grid) {
        clamp_one(v);
    }
    clamp_one(s.m);
    clamp_one(s.g);
}

} // namespace

AgeMesh AgeMesh::make(double da, double a_max, double dev_time) {
    if (!(da > 0.0) || !(a_max > 0.0)) {
        throw ConfigError("AgeMesh: da and a_max must be positive");
    }
    if (a_max < dev_time + 6.0) {
        throw ConfigError("AgeMesh: a_max must be at least dev_time + 6 h");
    }
    if (!is_integer_multiple(a_max, da)) {
        throw ConfigError("AgeMesh: da must divide a_max");
    }
    if (!is_integer_multiple(dev_time, da)) {
        throw ConfigError("AgeMesh: the rupture age must fall on a cell boundary "
                          "(da must divide dev_time)");
    }
    AgeMesh mesh;
    mesh.da = da;
    mesh.a_max = a_max;
    mesh.n_cells = static_cast<int>(std::llround(a_max / da));
    return mesh;
}

PdeState default_pde_init(const ModelParams& params, const AgeMesh& mesh) {
    const RbcEquilibrium eq = equilibrium(params);
    PdeState init;
    init.r_r = eq.r_r_star;
    init.r_m = eq.r_m_star;
    init.r_s = eq.r_s_star;
    init.p_grid.assign(static_cast<std::size_t>(mesh.n_cells), 0.0);
    init.m = params.m0;
    init.g = 0.0;
    init.cum_m = 0.0;
    return init;
}

PdeState pde_step(const PdeState& state, double t, double dt, const ModelParams& params,
                  const AgeMesh& mesh, const RuptureFunction& rf) {
    validate(params);
    check_step(dt, mesh.da, params, rf);
    if (state.p_grid.size() != static_cast<std::size_t>(mesh.n_cells)) {
        throw ConfigError("pde_step: state.p_grid length must equal mesh.n_cells");
    }
    PdeState next;
    step_unchecked(state, t, dt, params, mesh, rf, next);
    if (!finite_state(next)) {
        throw NumericalError("pde_step: non-finite state at t = " +
                             std::to_string(t + dt) + " h");
    }
    return next;
}

Trajectory simulate_pde(const PdeState& init, const SimConfig& config,
                        const ModelParams& params, const AgeMesh& mesh,
                        const RuptureFunction& rf, SimStats* stats) {
    validate(params);
    check_step(config.dt, mesh.da, params, rf);
    if (init.p_grid.size() != static_cast<std::size_t>(mesh.n_cells)) {
        throw ConfigError("simulate_pde: init.p_grid length must equal mesh.n_cells");
    }
    const double dt = config.dt;
    const double ratio_rec = config.record_every / dt;
    const long record_stride = std::lround(ratio_rec);
    if (record_stride < 1 ||
        std::abs(ratio_rec - static_cast<double>(record_stride)) > 1e-9 * ratio_rec) {
        throw ConfigError("simulate_pde: record_every must be a positive integer "
                          "multiple of dt");
    }
    long n_steps = 0;
    if (config.t_end > 0.0) {
        const double ratio_end = config.t_end / dt;
        n_steps = std::lround(ratio_end);
        if (n_steps < 1 ||
            std::abs(ratio_end - static_cast<double>(n_steps)) > 1e-9 * ratio_end) {
            throw ConfigError("simulate_pde: t_end must be a positive integer "
                              "multiple of dt");
        }
    }

    PdeState state = init;
    PdeState next;
    next.p_grid.resize(state.p_grid.size());
    Trajectory traj;

    auto record = [&traj, &state, &mesh](double t) {
        double mass = 0.0;
        for (double v : state.p_grid) {
            mass += v;
        }
        mass *= mesh.da;
        const double sum_r = state.r_r + state.r_m + state.r_s;
        const double denom = mass + sum_r;
        traj.times.push_back(t);
        traj.gametocytes.push_back(state.g);
        traj.merozoites.push_back(state.m);
        traj.parasitemia.push_back(denom > 0.0 ? mass / denom : 0.0);
        traj.total_prbc.push_back(mass);
        traj.total_urbc.push_back(sum_r);
    };

    record(0.0);
    for (long step = 0; step < n_steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        step_unchecked(state, t, dt, params, mesh, rf, next);
        std::swap(state, next);
        if (!finite_state(state)) {
            throw NumericalError("simulate_pde: non-finite state at t = " +
                                 std::to_string(t + dt) + " h");
        }
        if (config.clamp_negative) {
            clamp_state(state, stats);
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

} // namespace withinhost
