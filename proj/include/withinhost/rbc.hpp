#ifndef WITHINHOST_RBC_HPP
#define WITHINHOST_RBC_HPP

#include <array>

#include "withinhost/params.hpp"

namespace withinhost {

/// Parasite-free homeostatic equilibrium of the uRBC maturation chain.
/// Each class equals production rate times its mean stage duration.
struct RbcEquilibrium {
    double r_r_star = 0.0;
    double r_m_star = 0.0;
    double r_s_star = 0.0;

    double total() const { return r_r_star + r_m_star + r_s_star; }
};

/// Right-hand side of the parasite-free uRBC maturation system:
///   dR_r = lambda0 - R_r/dur_r
///   dR_m = R_r/dur_r - R_m/dur_m
///   dR_s = R_m/dur_m - R_s/dur_s
/// The infection drain -beta*m*gamma_j*R_j belongs to the coupled models,
/// not here; this subsystem is what the equilibrium oracle is checked on.
inline std::array<double, 3> urbc_derivatives(const std::array<double, 3>& state,
                                              const ModelParams& params) {
    const double out_r = state[0] / params.dur_r;
    const double out_m = state[1] / params.dur_m;
    const double out_s = state[2] / params.dur_s;
    return {params.lambda0 - out_r, out_r - out_m, out_m - out_s};
}

/// (lambda0*dur_r, lambda0*dur_m, lambda0*dur_s); annihilates
/// urbc_derivatives exactly.
inline RbcEquilibrium equilibrium(const ModelParams& params) {
    return {params.lambda0 * params.dur_r,
            params.lambda0 * params.dur_m,
            params.lambda0 * params.dur_s};
}

} // namespace withinhost

#endif
