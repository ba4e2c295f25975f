#ifndef WITHINHOST_DATA_IO_HPP
#define WITHINHOST_DATA_IO_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "withinhost/analysis.hpp"
#include "withinhost/fitting.hpp"
#include "withinhost/params.hpp"
#include "withinhost/state.hpp"

namespace withinhost {

/// Density unit declared by a dataset; everything is normalized to cells/ml
/// on load (per-microliter values are scaled by 1000).
enum class DensityUnit { per_ml, per_ul };

/// Parses a patient CSV with header `day,gametocytes_per_ml` into a series in
/// cells/ml. Throws ConfigError with the offending line number on malformed
/// rows, with the offending day on duplicates or nonmonotone days, and on
/// negative densities.
PatientSeries load_patient_csv(const std::string& path,
                               DensityUnit unit = DensityUnit::per_ml,
                               const std::string& patient_id = "");

/// Key-value manifest enumerating patient files:
///   units = cells/ml | cells/ul
///   source = <free text>
///   patient.<id> = <path relative to the manifest>
struct DatasetManifest {
    std::vector<std::pair<std::string, std::string>> patients;  ///< (id, resolved path)
    DensityUnit unit = DensityUnit::per_ml;
    std::string source;
};

DatasetManifest load_manifest(const std::string& path);

/// Simulates the chosen model from its standard initial condition and samples
/// gametocyte density daily over 40 days (days 1..40), then applies
/// multiplicative lognormal noise with the given coefficient of variation.
/// Deterministic for a fixed seed via the repository's counter-based
/// generator; noise_cv = 0 returns exact model samples.
PatientSeries generate_synthetic(const ModelParams& params, ModelKind kind,
                                 double noise_cv, std::uint64_t seed);

/// Columns `t_hours,gametocytes,merozoites,parasitemia,total_prbc,total_urbc`
/// at full double precision (%.17g), so write/read round-trips are lossless.
/// All writers below go through a temporary file plus rename, never leaving a
/// partially written output in place.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

/// One row per patient: patient_id,alpha_g,m0,mu_g,k_opt,sse,converged.
void write_fit_results_csv(
    const std::vector<std::pair<std::string, FitResult>>& results,
    const std::string& path);

/// One row per series: id, the four power-law coefficients with their
/// standard errors, the change point, and the per-regime R^2.
void write_regression_csv(
    const std::vector<std::pair<std::string, RegressionFit>>& fits,
    const std::string& path);

/// Persists a series in the same format load_patient_csv reads.
void write_patient_csv(const PatientSeries& series, const std::string& path);

} // namespace withinhost

#endif
