// Command-line front end: simulate, fit, compare, regress, survival, r0.
// All quantities cross this boundary in canonical units (hours, cells/ml);
// duration flags accept a d or h suffix.

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "withinhost/analysis.hpp"
#include "withinhost/data_io.hpp"
#include "withinhost/errors.hpp"
#include "withinhost/fitting.hpp"
#include "withinhost/ode_model.hpp"
#include "withinhost/params.hpp"
#include "withinhost/pde_model.hpp"
#include "withinhost/rbc.hpp"

namespace fs = std::filesystem;
using namespace withinhost;

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

/// "40d" -> 960, "48h" -> 48, "36.5" -> 36.5 (bare numbers are hours).
double parse_duration(const std::string& text, const char* name) {
    const std::string body = trim(text);
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(body.c_str(), &end);
    const std::string suffix = trim(end);
    if (end == body.c_str() || errno == ERANGE || !(value >= 0.0)) {
        throw ConfigError(std::string(name) + ": cannot parse duration '" + text + "'");
    }
    if (suffix == "d") {
        return value * hours_per_day;
    }
    if (suffix.empty() || suffix == "h") {
        return value;
    }
    throw ConfigError(std::string(name) + ": unknown duration suffix '" + suffix + "'");
}

std::vector<int> parse_k_list(const std::string& text) {
    std::vector<int> ks;
    std::string field;
    std::istringstream stream(text);
    while (std::getline(stream, field, ',')) {
        const std::string body = trim(field);
        errno = 0;
        char* end = nullptr;
        const long k = std::strtol(body.c_str(), &end, 10);
        if (end == body.c_str() || *end != '\0' || errno == ERANGE || k < 1) {
            throw ConfigError("--k: '" + field + "' is not a positive stage count");
        }
        ks.push_back(static_cast<int>(k));
    }
    if (ks.empty()) {
        throw ConfigError("--k: expected a comma-separated list of stage counts");
    }
    return ks;
}

struct Options {
    std::string model;  // empty means per-command default
    std::string k_list;
    std::string t_end = "40d";
    std::string dt;  // empty: 0.05 h for the chain, da for the age grid
    std::string da = "0.05";
    std::vector<std::string> overrides;
    std::string data;
    std::string out = ".";
    std::uint64_t seed = 1;
    std::string objective = "log";
};

const std::map<std::string, double ModelParams::*> kParamFields = {
    {"lambda0", &ModelParams::lambda0},   {"dur_r", &ModelParams::dur_r},
    {"dur_m", &ModelParams::dur_m},       {"dur_s", &ModelParams::dur_s},
    {"beta", &ModelParams::beta},         {"d0", &ModelParams::d0},
    {"mu_mero", &ModelParams::mu_mero},   {"r_burst", &ModelParams::r_burst},
    {"alpha_g", &ModelParams::alpha_g},   {"mu_g", &ModelParams::mu_g},
    {"gamma_r", &ModelParams::gamma_r},   {"gamma_m", &ModelParams::gamma_m},
    {"gamma_s", &ModelParams::gamma_s},   {"si_star", &ModelParams::si_star},
    {"sa_star", &ModelParams::sa_star},   {"delta0", &ModelParams::delta0},
    {"delta1", &ModelParams::delta1},     {"mu_bar", &ModelParams::mu_bar},
    {"dev_time", &ModelParams::dev_time}, {"m0", &ModelParams::m0},
};

/// Applies `name=value` overrides, rebuilds the equal-stage vectors, and
/// validates. Overrides must name real parameters; values are canonical units.
ModelParams make_params(const Options& opt) {
    ModelParams params = default_params();
    for (const std::string& entry : opt.overrides) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set: expected name=value, got '" + entry + "'");
        }
        const std::string name = trim(entry.substr(0, eq));
        const std::string value_text = trim(entry.substr(eq + 1));
        errno = 0;
        char* end = nullptr;
        const double value = std::strtod(value_text.c_str(), &end);
        if (end == value_text.c_str() || *end != '\0' || errno == ERANGE) {
            throw ConfigError("--set " + name + ": cannot parse value '" + value_text + "'");
        }
        if (const auto it = kParamFields.find(name); it != kParamFields.end()) {
            params.*(it->second) = value;
        } else if (name == "k_stages") {
            if (value < 1.0 || value != static_cast<double>(static_cast<int>(value))) {
                throw ConfigError("--set k_stages: expected a positive integer");
            }
            params.k_stages = static_cast<int>(value);
        } else if (name == "innate_scaled_by_m") {
            if (value != 0.0 && value != 1.0) {
                throw ConfigError("--set innate_scaled_by_m: expected 0 or 1");
            }
            params.innate_scaled_by_m = value == 1.0;
        } else {
            throw ConfigError("--set: unknown parameter '" + name + "'");
        }
    }
    params.set_equal_stages(params.k_stages);
    validate(params);
    return params;
}

std::string model_or(const Options& opt, const char* fallback) {
    return opt.model.empty() ? fallback : opt.model;
}

/// Sampling cadence: the largest multiple of dt not exceeding one hour.
SimConfig make_sim_config(double dt, double t_end) {
    SimConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.record_every = dt >= 1.0 ? dt : dt * std::floor((1.0 + 1e-9) / dt);
    return cfg;
}

double chain_dt(const Options& opt) {
    return opt.dt.empty() ? 0.05 : parse_duration(opt.dt, "--dt");
}

double grid_dt(const Options& opt, double da) {
    return opt.dt.empty() ? da : parse_duration(opt.dt, "--dt");
}

Trajectory run_pde(const ModelParams& params, const Options& opt, double t_end) {
    const double da = parse_duration(opt.da, "--da");
    const AgeMesh mesh = AgeMesh::make(da, 54.0, params.dev_time);
    const RuptureFunction rf{params.dev_time, params.mu_bar};
    const SimConfig cfg = make_sim_config(grid_dt(opt, da), t_end);
    return simulate_pde(default_pde_init(params, mesh), cfg, params, mesh, rf);
}

Trajectory run_ode(const ModelParams& params, const Options& opt, double t_end) {
    const SimConfig cfg = make_sim_config(chain_dt(opt), t_end);
    return simulate_ode(default_ode_init(params), cfg, params);
}

void write_text_atomic(const std::string& path, const std::string& body) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << body;
        if (!out) {
            throw ConfigError("cannot write '" + tmp + "'");
        }
    }
    fs::rename(tmp, path);
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        const double d = a[i] - b[i];
        num += d * d;
        den += b[i] * b[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

// ------------------------------------------------------------------ commands

int cmd_simulate(const Options& opt, double noise_cv) {
    const ModelParams base = make_params(opt);
    const double t_end = parse_duration(opt.t_end, "--t-end");
    const std::string model = model_or(opt, "ode");
    fs::create_directories(opt.out);

    if (model == "ode") {
        const std::vector<int> ks =
            opt.k_list.empty() ? std::vector<int>{base.k_stages} : parse_k_list(opt.k_list);
        for (int k : ks) {
            ModelParams p = base;
            p.set_equal_stages(k);
            const Trajectory traj = run_ode(p, opt, t_end);
            const std::string path =
                opt.out + "/trajectory_ode_k" + std::to_string(k) + ".csv";
            write_trajectory_csv(traj, path);
            std::printf("wrote %s (%zu samples)\n", path.c_str(), traj.size());
        }
    } else {
        const Trajectory traj = run_pde(base, opt, t_end);
        const std::string path = opt.out + "/trajectory_pde.csv";
        write_trajectory_csv(traj, path);
        std::printf("wrote %s (%zu samples)\n", path.c_str(), traj.size());
    }

    if (noise_cv >= 0.0) {
        const ModelKind kind = model == "ode" ? ModelKind::ode : ModelKind::pde;
        const PatientSeries series = generate_synthetic(base, kind, noise_cv, opt.seed);
        const std::string path = opt.out + "/series_" + model + "_seed" +
                                 std::to_string(opt.seed) + ".csv";
        write_patient_csv(series, path);
        std::printf("wrote %s (%zu daily samples, cv %.3f)\n", path.c_str(),
                    series.days.size(), noise_cv);
    }
    return 0;
}

int cmd_fit(const Options& opt, bool pipeline) {
    if (opt.data.empty()) {
        throw ConfigError("fit requires --data <manifest>");
    }
    const DatasetManifest manifest = load_manifest(opt.data);
    if (manifest.patients.empty()) {
        throw ConfigError("manifest lists no patients");
    }
    fs::create_directories(opt.out);

    FitProblem problem;
    problem.base_params = make_params(opt);
    problem.model_kind = model_or(opt, "ode") == "pde" ? ModelKind::pde : ModelKind::ode;
    problem.objective_scale =
        opt.objective == "linear" ? ObjectiveScale::linear : ObjectiveScale::log10;
    problem.dt = chain_dt(opt);
    problem.da = parse_duration(opt.da, "--da");
    if (!opt.k_list.empty()) {
        const std::vector<int> ks = parse_k_list(opt.k_list);
        problem.k_range = {ks.front(), ks.back()};
        for (int k : ks) {
            problem.k_range[0] = std::min(problem.k_range[0], k);
            problem.k_range[1] = std::max(problem.k_range[1], k);
        }
    }
    if (pipeline && problem.model_kind != ModelKind::ode) {
        throw ConfigError("--pipeline fits the stage chain first; use --model ode");
    }

    std::vector<std::pair<std::string, FitResult>> rows;
    for (const auto& [id, path] : manifest.patients) {
        problem.data = load_patient_csv(path, manifest.unit, id);
        const FitResult result = fit(problem);
        std::printf("patient %s: alpha_g=%.4e m0=%.4e mu_g=%.4e K=%d sse=%.6g "
                    "converged=%d evals=%ld\n",
                    id.c_str(), result.alpha_g, result.m0, result.mu_g, result.k_opt,
                    result.sse, result.converged ? 1 : 0, result.evaluations);
        rows.emplace_back(id, result);

        if (pipeline) {
            // Chain-fitted parameters re-run through the age-structured model.
            ModelParams transferred = problem.base_params;
            transferred.alpha_g = result.alpha_g;
            transferred.m0 = result.m0;
            transferred.mu_g = result.mu_g;
            const double horizon =
                hours_per_day * static_cast<double>(problem.data.days.back() + 1);
            Options grid_opt = opt;
            grid_opt.dt.clear();  // unit Courant step; a chain --dt may exceed da
            const Trajectory traj = run_pde(transferred, grid_opt, horizon);
            const std::string out_path = opt.out + "/trajectory_pde_" + id + ".csv";
            write_trajectory_csv(traj, out_path);

            FitProblem check = problem;
            check.model_kind = ModelKind::pde;
            const double sse =
                objective({result.alpha_g, result.m0, result.mu_g}, 0, check);
            std::printf("pipeline %s: pde sse=%.6g, wrote %s\n", id.c_str(), sse,
                        out_path.c_str());
        }
    }
    const std::string fits_path = opt.out + "/fits.csv";
    write_fit_results_csv(rows, fits_path);
    std::printf("wrote %s (%zu patients)\n", fits_path.c_str(), rows.size());
    return 0;
}

int cmd_compare(const Options& opt) {
    const ModelParams base = make_params(opt);
    const double t_end = parse_duration(opt.t_end, "--t-end");
    const std::vector<int> ks =
        opt.k_list.empty() ? std::vector<int>{1, 10, 100} : parse_k_list(opt.k_list);
    fs::create_directories(opt.out);

    const Trajectory pde = run_pde(base, opt, t_end);

    std::string body = "k,rel_l2_gametocytes,rel_l2_parasitemia\n";
    for (int k : ks) {
        ModelParams p = base;
        p.set_equal_stages(k);
        const Trajectory ode = run_ode(p, opt, t_end);
        const double dist_g = rel_l2(ode.gametocytes, pde.gametocytes);
        const double dist_p = rel_l2(ode.parasitemia, pde.parasitemia);
        std::printf("K=%d rel_l2_gametocytes=%.6f rel_l2_parasitemia=%.6f\n", k, dist_g,
                    dist_p);
        char row[128];
        std::snprintf(row, sizeof(row), "%d,%.17g,%.17g\n", k, dist_g, dist_p);
        body += row;
    }
    const std::string path = opt.out + "/compare.csv";
    write_text_atomic(path, body);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_regress(const Options& opt, const std::vector<std::string>& files) {
    fs::create_directories(opt.out);
    // A run started from a parasite-free grid has no gametocytes until the
    // first cohort ruptures; open the log-log window at the first positive
    // sample instead of the nominal day 2.
    const auto fit_traj = [](const Trajectory& traj) {
        return fit_two_regime(traj, 2.0, std::max(2.0, first_loggable_day(traj)));
    };
    std::vector<std::pair<std::string, RegressionFit>> rows;
    if (files.empty()) {
        const std::string model = model_or(opt, "pde");
        const ModelParams params = make_params(opt);
        const double t_end = parse_duration(opt.t_end, "--t-end");
        const Trajectory traj = model == "pde" ? run_pde(params, opt, t_end)
                                               : run_ode(params, opt, t_end);
        rows.emplace_back(model, fit_traj(traj));
    } else {
        for (const std::string& file : files) {
            const Trajectory traj = read_trajectory_csv(file);
            rows.emplace_back(fs::path(file).stem().string(), fit_traj(traj));
        }
    }
    for (const auto& [id, fit] : rows) {
        std::printf("%s: theta1=%.4f (se %.4f) theta2=%.4f (se %.4f) t0=%.2f d "
                    "log10_k1=%.4f log10_k2=%.4f r2=%.4f/%.4f\n",
                    id.c_str(), fit.theta1, fit.se_theta1, fit.theta2, fit.se_theta2,
                    fit.t0_days, fit.log10_k1, fit.log10_k2, fit.r2_first,
                    fit.r2_second);
    }
    const std::string path = opt.out + "/regression.csv";
    write_regression_csv(rows, path);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_survival(const Options& opt, const std::string& at_text) {
    const ModelParams params = make_params(opt);
    const RuptureFunction rf{params.dev_time, params.mu_bar};
    const std::vector<int> ks =
        opt.k_list.empty() ? std::vector<int>{1, 10, 50} : parse_k_list(opt.k_list);

    if (!at_text.empty()) {
        const double at = parse_duration(at_text, "--at");
        for (int k : ks) {
            std::printf("chain_survival(K=%d, %g h) = %.6f\n", k, at,
                        chain_survival(k, at, params.dev_time));
        }
        std::printf("pde_survival(%g h) = %.6f\n", at, pde_survival(at, rf));
        return 0;
    }

    std::printf("age_hours");
    for (int k : ks) {
        std::printf(",chain_k%d", k);
    }
    std::printf(",age_structured\n");
    const double horizon = params.dev_time + 12.0;
    for (double a = 0.0; a <= horizon + 1e-9; a += 1.0) {
        std::printf("%g", a);
        for (int k : ks) {
            std::printf(",%.6f", chain_survival(k, a, params.dev_time));
        }
        std::printf(",%.6f\n", pde_survival(a, rf));
    }
    return 0;
}

int cmd_r0(const Options& opt) {
    const ModelParams params = make_params(opt);
    const std::string model = model_or(opt, "both");
    const auto print = [](const char* name, const R0Breakdown& b) {
        std::printf("model=%s r0 = %.6f invasion = %.6f offspring = %.6f "
                    "production = %.6f survival = %.6f\n",
                    name, b.r0, b.invasion, b.offspring, b.production, b.survival);
    };
    if (model != "pde") {
        print("ode", r0_breakdown_ode(params));
    }
    if (model != "ode") {
        print("pde", r0_breakdown_pde(params));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"within-host malaria dynamics: simulation, fitting, regression"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--model", opt.model, "model family: ode (stage chain) or pde (age grid)")
        ->check(CLI::IsMember({"ode", "pde"}));
    app.add_option("--k", opt.k_list, "comma-separated stage counts");
    app.add_option("--t-end", opt.t_end, "horizon, hours unless suffixed d (default 40d)");
    app.add_option("--dt", opt.dt, "time step in hours (default 0.05, or the mesh width)");
    app.add_option("--da", opt.da, "age mesh width in hours (default 0.05)");
    app.add_option("--set", opt.overrides,
                   "override a parameter, name=value in hour/ml units, repeatable");
    app.add_option("--data", opt.data, "dataset manifest path");
    app.add_option("--out", opt.out, "output directory (default .)");
    app.add_option("--seed", opt.seed, "seed for synthetic series sampling");
    app.add_option("--objective", opt.objective, "fit objective scale: log or linear")
        ->check(CLI::IsMember({"log", "linear"}));
    app.set_config("--config", "", "flat key=value configuration file");

    auto* sim = app.add_subcommand("simulate", "integrate a model, write trajectory CSVs");
    double noise_cv = -1.0;
    sim->add_option("--noise-cv", noise_cv,
                    "also write a noisy daily gametocyte series (uses --seed)");
    auto* fit_cmd = app.add_subcommand("fit", "least-squares fit of patient series");
    bool pipeline = false;
    fit_cmd->add_flag("--pipeline", pipeline,
                      "after the chain fit, rerun the fitted parameters through the age grid");
    auto* compare = app.add_subcommand("compare", "chain-vs-age-grid trajectory distances");
    auto* regress =
        app.add_subcommand("regress", "two-regime gametocyte/parasitemia power-law fit");
    std::vector<std::string> regress_files;
    regress->add_option("files", regress_files, "trajectory CSVs (default: simulate first)");
    auto* survival = app.add_subcommand("survival", "rupture survival probabilities");
    std::string at_text;
    survival->add_option("--at", at_text, "evaluate at one age instead of a table");
    auto* r0 = app.add_subcommand("r0", "reproduction number factor breakdown");

    for (auto* sub : {sim, fit_cmd, compare, regress, survival, r0}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: config: " << e.what() << std::endl;
        return 2;
    }

    try {
        if (*sim) {
            return cmd_simulate(opt, noise_cv);
        }
        if (*fit_cmd) {
            return cmd_fit(opt, pipeline);
        }
        if (*compare) {
            return cmd_compare(opt);
        }
        if (*regress) {
            return cmd_regress(opt, regress_files);
        }
        if (*survival) {
            return cmd_survival(opt, at_text);
        }
        if (*r0) {
            return cmd_r0(opt);
        }
    } catch (const NumericalError& e) {
        std::cerr << "error: numerical: " << e.what() << std::endl;
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: config: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: runtime: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
