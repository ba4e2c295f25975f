#ifndef WITHINHOST_IMMUNITY_HPP
#define WITHINHOST_IMMUNITY_HPP

#include <algorithm>

namespace withinhost {

/// Saturating innate response S_I = m/(m + si_star), dimensionless in [0,1).
/// si_star is the merozoite density at which the response reaches one half.
inline double innate_response(double m, double si_star) {
    if (m <= 0.0) {
        return 0.0;
    }
    return m / (m + si_star);
}

/// Cumulative merozoite load driving the adaptive response. The load only
/// grows while t lies inside [delta0, delta0+delta1] and is constant after
/// the window closes.
struct ImmuneState {
    double cum_m = 0.0;
};

/// Saturating adaptive response. Zero before the activation delay delta0;
/// afterwards cum_m/(cum_m + sa_star), where cum_m must be the integral of
/// m over [delta0, min(t, delta0+delta1)].
inline double adaptive_response(double t, double cum_m, double sa_star,
                                double delta0, double /*delta1*/) {
    if (t < delta0 || cum_m <= 0.0) {
        return 0.0;
    }
    return cum_m / (cum_m + sa_star);
}

/// Advances the cumulative load by rectangle rule over the step [t, t+dt],
/// counting only the part of the step inside [delta0, delta0+delta1]. The
/// quadrature matches the fixed-step integrators so the accumulated integral
/// has the same resolution as the state itself.
inline ImmuneState accumulate(ImmuneState prev, double t, double dt, double m,
                              double delta0, double delta1) {
    const double lo = std::max(t, delta0);
    const double hi = std::min(t + dt, delta0 + delta1);
    if (hi > lo) {
        prev.cum_m += m * (hi - lo);
    }
    return prev;
}

} // namespace withinhost

#endif
