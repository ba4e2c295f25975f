#include "withinhost/data_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "withinhost/errors.hpp"
#include "withinhost/ode_model.hpp"
#include "withinhost/pde_model.hpp"
#include "withinhost/rng.hpp"

namespace withinhost {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& field, const std::string& path, long line) {
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || errno == ERANGE) {
        throw ConfigError(path + ":" + std::to_string(line) +
                          ": malformed numeric field '" + field + "'");
    }
    return value;
}

long parse_int(const std::string& field, const std::string& path, long line) {
    errno = 0;
    char* end = nullptr;
    const long value = std::strtol(field.c_str(), &end, 10);
    if (end == field.c_str() || *end != '\0' || errno == ERANGE) {
        throw ConfigError(path + ":" + std::to_string(line) +
                          ": malformed integer field '" + field + "'");
    }
    return value;
}

std::vector<std::string> split_csv_row(const std::string& row) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(row);
    while (std::getline(stream, field, ',')) {
        fields.push_back(trim(field));
    }
    return fields;
}

/// Writes through a sibling temporary file and renames into place, so readers
/// never observe a partially written output.
class AtomicWriter {
  public:
    explicit AtomicWriter(const std::string& path)
        : final_path_(path), tmp_path_(path + ".tmp"), out_(tmp_path_, std::ios::trunc) {
        if (!out_) {
            throw ConfigError("cannot open '" + tmp_path_ + "' for writing");
        }
    }

    std::ofstream& stream() { return out_; }

    void commit() {
        out_.flush();
        if (!out_) {
            throw ConfigError("write failed for '" + tmp_path_ + "'");
        }
        out_.close();
        std::error_code ec;
        std::filesystem::rename(tmp_path_, final_path_, ec);
        if (ec) {
            throw ConfigError("cannot rename '" + tmp_path_ + "' to '" + final_path_ +
                              "': " + ec.message());
        }
        committed_ = true;
    }

    ~AtomicWriter() {
        if (!committed_) {
            std::error_code ec;
            std::filesystem::remove(tmp_path_, ec);
        }
    }

  private:
    std::string final_path_;
    std::string tmp_path_;
    std::ofstream out_;
    bool committed_ = false;
};

std::string format_full(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

} // namespace

PatientSeries load_patient_csv(const std::string& path, DensityUnit unit,
                               const std::string& patient_id) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open patient file '" + path + "'");
    }
    PatientSeries series;
    series.patient_id =
        patient_id.empty() ? std::filesystem::path(path).stem().string() : patient_id;

    std::string row;
    long line = 0;
    if (!std::getline(in, row)) {
        throw ConfigError(path + ": empty file");
    }
    ++line;
    if (trim(row) != "day,gametocytes_per_ml") {
        throw ConfigError(path + ":1: expected header 'day,gametocytes_per_ml'");
    }
    const double scale = unit == DensityUnit::per_ul ? 1e3 : 1.0;
    while (std::getline(in, row)) {
        ++line;
        if (trim(row).empty()) {
            continue;
        }
        const auto fields = split_csv_row(row);
        if (fields.size() != 2) {
            throw ConfigError(path + ":" + std::to_string(line) +
                              ": expected 2 fields, got " + std::to_string(fields.size()));
        }
        const long day = parse_int(fields[0], path, line);
        const double density = parse_double(fields[1], path, line);
        if (density < 0.0) {
            throw ConfigError(path + ":" + std::to_string(line) +
                              ": negative gametocyte density");
        }
        if (!series.days.empty()) {
            if (day == series.days.back()) {
                throw ConfigError(path + ": duplicate day " + std::to_string(day));
            }
            if (day < series.days.back()) {
                throw ConfigError(path + ":" + std::to_string(line) +
                                  ": days must be strictly increasing");
            }
        }
        series.days.push_back(static_cast<int>(day));
        series.gametocyte_density.push_back(density * scale);
    }
    return series;
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open manifest '" + path + "'");
    }
    DatasetManifest manifest;
    const auto base_dir = std::filesystem::path(path).parent_path();
    std::set<std::string> seen;

    std::string row;
    long line = 0;
    while (std::getline(in, row)) {
        ++line;
        const std::string text = trim(row);
        if (text.empty() || text[0] == '#') {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key == "units") {
            if (value == "cells/ml") {
                manifest.unit = DensityUnit::per_ml;
            } else if (value == "cells/ul") {
                manifest.unit = DensityUnit::per_ul;
            } else {
                throw ConfigError(path + ":" + std::to_string(line) +
                                  ": units must be 'cells/ml' or 'cells/ul'");
            }
        } else if (key == "source") {
            manifest.source = value;
        } else if (key.rfind("patient.", 0) == 0) {
            const std::string id = trim(key.substr(8));
            if (id.empty()) {
                throw ConfigError(path + ":" + std::to_string(line) +
                                  ": empty patient id");
            }
            if (!seen.insert(id).second) {
                throw ConfigError(path + ": duplicate patient id '" + id + "'");
            }
            manifest.patients.emplace_back(id, (base_dir / value).string());
        } else {
            throw ConfigError(path + ":" + std::to_string(line) + ": unknown key '" +
                              key + "'");
        }
    }
    return manifest;
}

PatientSeries generate_synthetic(const ModelParams& params, ModelKind kind,
                                 double noise_cv, std::uint64_t seed) {
    if (!(noise_cv >= 0.0 && noise_cv < 1.0)) {
        throw ConfigError("generate_synthetic: noise_cv must lie in [0, 1)");
    }
    SimConfig config;
    config.dt = 0.05;
    config.t_end = 40.0 * 24.0;
    config.record_every = 24.0;

    Trajectory traj;
    if (kind == ModelKind::ode) {
        traj = simulate_ode(default_ode_init(params), config, params);
    } else {
        const AgeMesh mesh = AgeMesh::make(0.05, 54.0, params.dev_time);
        const RuptureFunction rf{params.dev_time, params.mu_bar};
        traj = simulate_pde(default_pde_init(params, mesh), config, params, mesh, rf);
    }

    PatientSeries series;
    series.patient_id = std::string("synthetic-") +
                        (kind == ModelKind::ode ? "ode" : "pde") + "-seed" +
                        std::to_string(seed);
    CounterRng rng(seed);
    for (int day = 1; day <= 40; ++day) {
        series.days.push_back(day);
        const double g = traj.gametocytes[static_cast<std::size_t>(day)];
        series.gametocyte_density.push_back(g * rng.next_lognormal_factor(noise_cv));
    }
    return series;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    AtomicWriter writer(path);
    auto& out = writer.stream();
    out << "t_hours,gametocytes,merozoites,parasitemia,total_prbc,total_urbc\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << format_full(traj.times[i]) << ',' << format_full(traj.gametocytes[i])
            << ',' << format_full(traj.merozoites[i]) << ','
            << format_full(traj.parasitemia[i]) << ',' << format_full(traj.total_prbc[i])
            << ',' << format_full(traj.total_urbc[i]) << '\n';
    }
    writer.commit();
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open trajectory file '" + path + "'");
    }
    Trajectory traj;
    std::string row;
    long line = 0;
    if (!std::getline(in, row)) {
        throw ConfigError(path + ": empty file");
    }
    ++line;
    if (trim(row) != "t_hours,gametocytes,merozoites,parasitemia,total_prbc,total_urbc") {
        throw ConfigError(path + ":1: unexpected trajectory header");
    }
    while (std::getline(in, row)) {
        ++line;
        if (trim(row).empty()) {
            continue;
        }
        const auto fields = split_csv_row(row);
        if (fields.size() != 6) {
            throw ConfigError(path + ":" + std::to_string(line) +
                              ": expected 6 fields, got " + std::to_string(fields.size()));
        }
        traj.times.push_back(parse_double(fields[0], path, line));
        traj.gametocytes.push_back(parse_double(fields[1], path, line));
        traj.merozoites.push_back(parse_double(fields[2], path, line));
        traj.parasitemia.push_back(parse_double(fields[3], path, line));
        traj.total_prbc.push_back(parse_double(fields[4], path, line));
        traj.total_urbc.push_back(parse_double(fields[5], path, line));
        if (traj.times.size() > 1 &&
            traj.times[traj.times.size() - 2] >= traj.times.back()) {
            throw ConfigError(path + ":" + std::to_string(line) +
                              ": times must be strictly increasing");
        }
    }
    return traj;
}

void write_fit_results_csv(
    const std::vector<std::pair<std::string, FitResult>>& results,
    const std::string& path) {
    AtomicWriter writer(path);
    auto& out = writer.stream();
    out << "patient_id,alpha_g,m0,mu_g,k_opt,sse,converged\n";
    for (const auto& [id, fit] : results) {
        out << id << ',' << format_full(fit.alpha_g) << ',' << format_full(fit.m0)
            << ',' << format_full(fit.mu_g) << ',' << fit.k_opt << ','
            << format_full(fit.sse) << ',' << (fit.converged ? 1 : 0) << '\n';
    }
    writer.commit();
}

void write_regression_csv(
    const std::vector<std::pair<std::string, RegressionFit>>& fits,
    const std::string& path) {
    AtomicWriter writer(path);
    auto& out = writer.stream();
    out << "series_id,log10_k1,se_log10_k1,theta1,se_theta1,log10_k2,se_log10_k2,"
           "theta2,se_theta2,t0_days,r2_first,r2_second,lag_days\n";
    for (const auto& [id, fit] : fits) {
        out << id << ',' << format_full(fit.log10_k1) << ','
            << format_full(fit.se_log10_k1) << ',' << format_full(fit.theta1) << ','
            << format_full(fit.se_theta1) << ',' << format_full(fit.log10_k2) << ','
            << format_full(fit.se_log10_k2) << ',' << format_full(fit.theta2) << ','
            << format_full(fit.se_theta2) << ',' << format_full(fit.t0_days) << ','
            << format_full(fit.r2_first) << ',' << format_full(fit.r2_second) << ','
            << format_full(fit.lag_days) << '\n';
    }
    writer.commit();
}

void write_patient_csv(const PatientSeries& series, const std::string& path) {
    AtomicWriter writer(path);
    auto& out = writer.stream();
    out << "day,gametocytes_per_ml\n";
    for (std::size_t i = 0; i < series.days.size(); ++i) {
        out << series.days[i] << ',' << format_full(series.gametocyte_density[i]) << '\n';
    }
    writer.commit();
}

} // namespace withinhost
