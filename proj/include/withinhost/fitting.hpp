#ifndef WITHINHOST_FITTING_HPP
#define WITHINHOST_FITTING_HPP

#include <array>
#include <limits>

#include "withinhost/params.hpp"
#include "withinhost/state.hpp"

namespace withinhost {

enum class ObjectiveScale { log10, linear };

/// Least-squares estimation setup for one patient. The three free parameters
/// are (alpha_g, m0, mu_g), bounded by `bounds` (row order as listed); the
/// stage count K is searched exhaustively over k_range when fitting the
/// compartment model. Every other parameter comes from base_params.
struct FitProblem {
    PatientSeries data;
    ModelKind model_kind = ModelKind::ode;
    /// {lo, hi} per free parameter: [0] alpha_g, [1] m0, [2] mu_g.
    std::array<std::array<double, 2>, 3> bounds = {{{1e-9, 1.0},
                                                    {1e4, 1e9},
                                                    {1e-5, 1e-1}}};
    std::array<int, 2> k_range = {1, 100};
    ObjectiveScale objective_scale = ObjectiveScale::log10;
    ModelParams base_params;

    // Integration controls for objective evaluations. dt must divide 24 h so
    // simulated gametocytes exist exactly at observation days.
    double dt = 0.05;
    double da = 0.05;     ///< age mesh width for the PDE branch (dt = da there)
    double a_max = 54.0;
    int max_evals_per_start = 200;  ///< simplex-search budget per start point
};

struct FitResult {
    double alpha_g = 0.0;
    double m0 = 0.0;
    double mu_g = 0.0;
    int k_opt = 0;  ///< 0 when the PDE model was fitted (no stage count)
    double sse = std::numeric_limits<double>::infinity();
    bool converged = false;
    long evaluations = 0;
};

/// Sum of squared residuals between the simulated and observed gametocyte
/// series on the configured scale (log10 of density + 1, or linear). A
/// simulation blow-up yields +infinity rather than an exception so the
/// optimizer can route around bad parameter regions.
double objective(const std::array<double, 3>& free_params, int k,
                 const FitProblem& problem);

/// Minimizes the objective over the free parameters with a bounded
/// Nelder-Mead simplex search in log10 parameter space, restarted from a
/// deterministic 8-point lattice over the bounds, outer loop exhaustive over
/// k_range (compartment model only; K evaluations run concurrently).
/// Deterministic: identical problems produce identical results. When no
/// start reaches the f-spread tolerance the best point found is still
/// returned with converged = false.
FitResult fit(const FitProblem& problem);

} // namespace withinhost

#endif
