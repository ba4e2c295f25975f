#ifndef WITHINHOST_PDE_MODEL_HPP
#define WITHINHOST_PDE_MODEL_HPP

#include <cmath>

#include "withinhost/params.hpp"
#include "withinhost/state.hpp"

namespace withinhost {

/// Uniform finite-volume mesh over infection age [0, a_max]. The rupture
/// threshold (dev_time) must land on a cell boundary so the piecewise
/// rupture rate is never smeared across a cell.
struct AgeMesh {
    double da = 0.05;
    double a_max = 54.0;
    int n_cells = 1080;

    /// Validating constructor. Requires da > 0, a_max >= dev_time + 6 so the
    /// post-rupture tail is resolved, and both a_max and dev_time integer
    /// multiples of da. Throws ConfigError otherwise.
    static AgeMesh make(double da, double a_max, double dev_time = 48.0);

    double cell_center(int i) const { return (static_cast<double>(i) + 0.5) * da; }
};

/// Piecewise-constant rupture hazard: zero before dev_time, mu_bar after.
struct RuptureFunction {
    double dev_time = 48.0;
    double mu_bar = 10.0;
};

inline double rupture_rate(double a, const RuptureFunction& rf) {
    return a < rf.dev_time ? 0.0 : rf.mu_bar;
}

/// Probability that a parasitized cell has not yet ruptured at age a:
/// 1 up to dev_time, exponential decay at rate mu_bar beyond.
inline double pde_survival(double a, const RuptureFunction& rf) {
    return a <= rf.dev_time ? 1.0 : std::exp(-rf.mu_bar * (a - rf.dev_time));
}

/// Standard initial condition: uRBC at equilibrium, empty age density,
/// m = m0, G = 0.
PdeState default_pde_init(const ModelParams& params, const AgeMesh& mesh);

/// One explicit step of the coupled system. Age transport uses first-order
/// upwind fluxes with the boundary density beta*m*sum(gamma_j R_j) imposed as
/// a flux into the first cell; rupture and natural death are applied to the
/// post-transport values, which keeps every cell nonnegative as long as
/// dt <= da and (mu_bar + d0)*dt <= 1 (both are validated). Merozoite,
/// gametocyte, and uRBC updates are explicit Euler from the pre-step state;
/// the rupture source is r * mu_bar * (pRBC mass at ages >= dev_time).
PdeState pde_step(const PdeState& state, double t, double dt,
                  const ModelParams& params, const AgeMesh& mesh,
                  const RuptureFunction& rf);

/// Fixed-step integration built on pde_step, sampling like simulate_ode.
/// config.dt is forced onto the mesh: dt <= da required, dt == da (unit
/// Courant number) recommended since transport is then an exact shift.
Trajectory simulate_pde(const PdeState& init, const SimConfig& config,
                        const ModelParams& params, const AgeMesh& mesh,
                        const RuptureFunction& rf, SimStats* stats = nullptr);

} // namespace withinhost

#endif
