#ifndef WITHINHOST_STATE_HPP
#define WITHINHOST_STATE_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace withinhost {

/// Which of the two model families an operation should run.
enum class ModelKind { ode, pde };

/// State of the K-compartment model. All densities in cells/ml; cum_m is the
/// windowed integral of merozoite density (cells/ml*h) feeding the adaptive
/// immune response.
struct OdeState {
    double r_r = 0.0;
    double r_m = 0.0;
    double r_s = 0.0;
    std::vector<double> p;  ///< parasitized RBC per maturation stage, length K
    double m = 0.0;
    double g = 0.0;
    double cum_m = 0.0;
};

/// State of the age-structured model. p_grid holds cell-averaged densities
/// (cells/ml/h of age) on the mesh defined alongside the simulation.
struct PdeState {
    double r_r = 0.0;
    double r_m = 0.0;
    double r_s = 0.0;
    std::vector<double> p_grid;
    double m = 0.0;
    double g = 0.0;
    double cum_m = 0.0;
};

/// Time-indexed series of derived observables. times in hours, densities in
/// cells/ml, parasitemia a fraction in [0,1].
struct Trajectory {
    std::vector<double> times;
    std::vector<double> gametocytes;
    std::vector<double> merozoites;
    std::vector<double> parasitemia;
    std::vector<double> total_prbc;
    std::vector<double> total_urbc;

    std::size_t size() const { return times.size(); }
};

/// Daily gametocyte-density observations for one patient, densities in
/// cells/ml. Days strictly increasing.
struct PatientSeries {
    std::string patient_id;
    std::vector<int> days;
    std::vector<double> gametocyte_density;
};

/// Fixed-step simulation controls shared by both models. For the
/// age-structured model dt must also satisfy dt <= da (Courant condition).
struct SimConfig {
    double dt = 0.05;            ///< step size, h
    double t_end = 960.0;        ///< final time, h (40 days)
    double record_every = 1.0;   ///< sampling interval, h; must be >= dt
    bool clamp_negative = true;  ///< clamp small negative excursions to zero
};

/// Optional per-run diagnostics filled by the integrators.
struct SimStats {
    long steps = 0;
    long clamp_events = 0;
    double min_component = 0.0;  ///< most negative value seen before clamping
};

} // namespace withinhost

#endif
