#ifndef WITHINHOST_PARAMS_HPP
#define WITHINHOST_PARAMS_HPP

#include <cstddef>
#include <vector>

#include "withinhost/units.hpp"

namespace withinhost {

/// All fixed and fitted model parameters in canonical units (hours, cells/ml).
///
/// Published values quoted per day (beta, d0, mu_mero, the mature-stage
/// duration) are stored already converted; default_params() performs the
/// conversion in one place.
struct ModelParams {
    // Uninfected red blood cell (uRBC) production and maturation.
    double lambda0 = 1.73e6;  ///< RBC production rate, cells/ml/h
    double dur_r = 36.0;      ///< mean reticulocyte stage duration, h
    double dur_m = 116.5 * hours_per_day;  ///< mean mature stage duration, h
    double dur_s = 48.0;                   ///< mean senescent stage duration, h

    // Infection kinetics.
    double beta = 6.27e-10 / hours_per_day;  ///< uRBC infection rate, ml/cell/h
    double d0 = 0.00833 / hours_per_day;     ///< natural RBC death rate, 1/h
    double mu_mero = 48.0 / hours_per_day;   ///< free merozoite decay rate, 1/h
    double r_burst = 16.0;                   ///< merozoites released per rupture
    double alpha_g = 0.05;  ///< fraction of released merozoites committed to gametocytes
    double mu_g = 1.25e-3;  ///< mature gametocyte clearance rate, 1/h

    // Target-cell age preference switches (1 = that uRBC class is invadable).
    double gamma_r = 1.0;
    double gamma_m = 1.0;
    double gamma_s = 1.0;

    // Immune responses.
    double si_star = 2.755e6;  ///< innate half-effect merozoite density, cells/ml
    double sa_star = 2.04e4;   ///< adaptive half-effect cumulative density, cells/ml*h
    double delta0 = 16.0 * hours_per_day;  ///< adaptive-response activation delay, h
    double delta1 = 8.0 * hours_per_day;   ///< adaptive-response accumulation window, h
    /// Verbatim model form subtracts the dimensionless innate factor S_I from
    /// dm/dt directly. Setting this switch replaces that term with -S_I*m for
    /// sensitivity checks.
    bool innate_scaled_by_m = false;

    // Intracellular development.
    double mu_bar = 10.0;    ///< rupture intensity beyond dev_time, 1/h
    double dev_time = 48.0;  ///< intracellular development time, h

    // Initial condition and stage discretization.
    double m0 = 2.5e7;  ///< initial merozoite density, cells/ml
    int k_stages = 50;  ///< number of ODE maturation compartments K

    std::vector<double> mu_i;  ///< per-stage exit rates, 1/h, length k_stages
    std::vector<double> d_i;   ///< per-stage death rates, 1/h, length k_stages

    /// Replaces the stage vectors with K equal stages: mu_i = K/dev_time so
    /// that sum(1/mu_i) == dev_time exactly, and d_i = d0.
    void set_equal_stages(int k) {
        k_stages = k;
        mu_i.assign(static_cast<std::size_t>(k), static_cast<double>(k) / dev_time);
        d_i.assign(static_cast<std::size_t>(k), d0);
    }
};

/// The published fixed parameter set, hour-canonical, with k equal stages.
ModelParams default_params(int k_stages = 50);

/// Throws std::invalid_argument when any ModelParams invariant is violated:
/// nonpositive rates or durations, alpha_g outside [0,1], gamma switches not
/// in {0,1}, or stage vectors inconsistent with k_stages.
void validate(const ModelParams& params);

} // namespace withinhost

#endif
