#ifndef WITHINHOST_ODE_MODEL_HPP
#define WITHINHOST_ODE_MODEL_HPP

#include "withinhost/params.hpp"
#include "withinhost/state.hpp"

namespace withinhost {

using OdeSimConfig = SimConfig;

/// Full right-hand side of the K-compartment model written into deriv:
/// uRBC classes with the infection drain -beta*m*gamma_j*R_j, the maturation
/// chain p_1..p_K, the merozoite equation with both immune responses, and the
/// gametocyte equation. deriv.cum_m is always 0; the cumulative merozoite
/// integral advances by rectangle rule outside the Runge-Kutta stages.
/// Throws ConfigError when k_stages and the state/stage vectors disagree.
void ode_rhs(const OdeState& state, double t, const ModelParams& params,
             OdeState& deriv);

OdeState ode_rhs(const OdeState& state, double t, const ModelParams& params);

/// Standard initial condition: uRBC at the parasite-free equilibrium, no
/// parasitized cells, m = m0, G = 0.
OdeState default_ode_init(const ModelParams& params);

/// Fixed-step classical Runge-Kutta (4th order) integration. Samples the
/// trajectory every config.record_every hours (must be a multiple of dt, as
/// must t_end). Negative excursions are clamped to zero after each step when
/// config.clamp_negative is set; occurrences are counted in stats.
/// Throws NumericalError with the failing time when the state blows up.
Trajectory simulate_ode(const OdeState& init, const SimConfig& config,
                        const ModelParams& params, SimStats* stats = nullptr);

/// Probability that the total K-stage transit time exceeds a, i.e. the tail
/// of a Gamma(K, dev_time/K) law, evaluated through the Poisson-sum identity
/// P(Poisson(a*K/dev_time) <= K-1) with log-scaled terms so large K stays
/// accurate.
double chain_survival(int k, double a, double dev_time = 48.0);

} // namespace withinhost

#endif
