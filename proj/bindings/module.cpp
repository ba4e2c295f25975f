// Python bindings for the within-host model library. ConfigError maps to
// ValueError and NumericalError to RuntimeError through the standard
// exception translation.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "withinhost/analysis.hpp"
#include "withinhost/data_io.hpp"
#include "withinhost/fitting.hpp"
#include "withinhost/immunity.hpp"
#include "withinhost/ode_model.hpp"
#include "withinhost/params.hpp"
#include "withinhost/pde_model.hpp"
#include "withinhost/rbc.hpp"
#include "withinhost/units.hpp"

namespace py = pybind11;
using namespace withinhost;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Within-host malaria dynamics: stage-chain and age-structured "
              "models, survival analysis, reproduction numbers, fitting.";

    py::enum_<ModelKind>(m, "ModelKind")
        .value("ode", ModelKind::ode)
        .value("pde", ModelKind::pde);

    py::enum_<ObjectiveScale>(m, "ObjectiveScale")
        .value("log10", ObjectiveScale::log10)
        .value("linear", ObjectiveScale::linear);

    py::enum_<DensityUnit>(m, "DensityUnit")
        .value("per_ml", DensityUnit::per_ml)
        .value("per_ul", DensityUnit::per_ul);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("lambda0", &ModelParams::lambda0)
        .def_readwrite("dur_r", &ModelParams::dur_r)
        .def_readwrite("dur_m", &ModelParams::dur_m)
        .def_readwrite("dur_s", &ModelParams::dur_s)
        .def_readwrite("beta", &ModelParams::beta)
        .def_readwrite("d0", &ModelParams::d0)
        .def_readwrite("mu_mero", &ModelParams::mu_mero)
        .def_readwrite("r_burst", &ModelParams::r_burst)
        .def_readwrite("alpha_g", &ModelParams::alpha_g)
        .def_readwrite("mu_g", &ModelParams::mu_g)
        .def_readwrite("gamma_r", &ModelParams::gamma_r)
        .def_readwrite("gamma_m", &ModelParams::gamma_m)
        .def_readwrite("gamma_s", &ModelParams::gamma_s)
        .def_readwrite("si_star", &ModelParams::si_star)
        .def_readwrite("sa_star", &ModelParams::sa_star)
        .def_readwrite("delta0", &ModelParams::delta0)
        .def_readwrite("delta1", &ModelParams::delta1)
        .def_readwrite("innate_scaled_by_m", &ModelParams::innate_scaled_by_m)
        .def_readwrite("mu_bar", &ModelParams::mu_bar)
        .def_readwrite("dev_time", &ModelParams::dev_time)
        .def_readwrite("m0", &ModelParams::m0)
        .def_readwrite("k_stages", &ModelParams::k_stages)
        .def_readwrite("mu_i", &ModelParams::mu_i)
        .def_readwrite("d_i", &ModelParams::d_i)
        .def("set_equal_stages", &ModelParams::set_equal_stages, py::arg("k"),
             "Rebuild the stage vectors with K equal stages (sum of mean "
             "stage times equals dev_time exactly).");

    m.def("default_params", &default_params, py::arg("k_stages") = 50,
          "Published fixed parameter set in hour/ml units.");
    m.def("validate", &validate, py::arg("params"),
          "Raises ValueError on out-of-range or inconsistent parameters.");

    py::class_<RbcEquilibrium>(m, "RbcEquilibrium")
        .def_readonly("r_r_star", &RbcEquilibrium::r_r_star)
        .def_readonly("r_m_star", &RbcEquilibrium::r_m_star)
        .def_readonly("r_s_star", &RbcEquilibrium::r_s_star)
        .def("total", &RbcEquilibrium::total);

    m.def("equilibrium", &equilibrium, py::arg("params"),
          "Parasite-free homeostatic uRBC class densities.");
    m.def("urbc_derivatives", &urbc_derivatives, py::arg("state"), py::arg("params"),
          "Right-hand side of the parasite-free uRBC chain at (R_r, R_m, R_s).");

    m.def("innate_response", &innate_response, py::arg("m"), py::arg("si_star"));
    m.def("adaptive_response", &adaptive_response, py::arg("t"), py::arg("cum_m"),
          py::arg("sa_star"), py::arg("delta0"), py::arg("delta1"));

    m.def("chain_survival", &chain_survival, py::arg("k"), py::arg("a"),
          py::arg("dev_time") = 48.0,
          "Probability that a K-stage Erlang maturation time exceeds age a.");

    py::class_<RuptureFunction>(m, "RuptureFunction")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("dev_time"), py::arg("mu_bar"))
        .def_readwrite("dev_time", &RuptureFunction::dev_time)
        .def_readwrite("mu_bar", &RuptureFunction::mu_bar);

    m.def("rupture_rate", &rupture_rate, py::arg("a"), py::arg("rf"));
    m.def("pde_survival", &pde_survival, py::arg("a"), py::arg("rf"),
          "Survival under the piecewise-constant rupture hazard.");

    py::class_<AgeMesh>(m, "AgeMesh")
        .def_static("make", &AgeMesh::make, py::arg("da"), py::arg("a_max"),
                    py::arg("dev_time") = 48.0)
        .def_readonly("da", &AgeMesh::da)
        .def_readonly("a_max", &AgeMesh::a_max)
        .def_readonly("n_cells", &AgeMesh::n_cells)
        .def("cell_center", &AgeMesh::cell_center, py::arg("i"));

    py::class_<OdeState>(m, "OdeState")
        .def(py::init<>())
        .def_readwrite("r_r", &OdeState::r_r)
        .def_readwrite("r_m", &OdeState::r_m)
        .def_readwrite("r_s", &OdeState::r_s)
        .def_readwrite("p", &OdeState::p)
        .def_readwrite("m", &OdeState::m)
        .def_readwrite("g", &OdeState::g)
        .def_readwrite("cum_m", &OdeState::cum_m);

    py::class_<PdeState>(m, "PdeState")
        .def(py::init<>())
        .def_readwrite("r_r", &PdeState::r_r)
        .def_readwrite("r_m", &PdeState::r_m)
        .def_readwrite("r_s", &PdeState::r_s)
        .def_readwrite("p_grid", &PdeState::p_grid)
        .def_readwrite("m", &PdeState::m)
        .def_readwrite("g", &PdeState::g)
        .def_readwrite("cum_m", &PdeState::cum_m);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t_end", &SimConfig::t_end)
        .def_readwrite("record_every", &SimConfig::record_every)
        .def_readwrite("clamp_negative", &SimConfig::clamp_negative);

    py::class_<Trajectory>(m, "Trajectory")
        .def(py::init<>())
        .def_readwrite("times", &Trajectory::times)
        .def_readwrite("gametocytes", &Trajectory::gametocytes)
        .def_readwrite("merozoites", &Trajectory::merozoites)
        .def_readwrite("parasitemia", &Trajectory::parasitemia)
        .def_readwrite("total_prbc", &Trajectory::total_prbc)
        .def_readwrite("total_urbc", &Trajectory::total_urbc)
        .def("__len__", &Trajectory::size);

    m.def("default_ode_init", &default_ode_init, py::arg("params"));
    m.def("default_pde_init", &default_pde_init, py::arg("params"), py::arg("mesh"));
    m.def(
        "simulate_ode",
        [](const OdeState& init, const SimConfig& config, const ModelParams& params) {
            return simulate_ode(init, config, params);
        },
        py::arg("init"), py::arg("config"), py::arg("params"),
        "RK4 integration of the K-compartment model.");
    m.def(
        "simulate_pde",
        [](const PdeState& init, const SimConfig& config, const ModelParams& params,
           const AgeMesh& mesh, const RuptureFunction& rf) {
            return simulate_pde(init, config, params, mesh, rf);
        },
        py::arg("init"), py::arg("config"), py::arg("params"), py::arg("mesh"),
        py::arg("rf"), "Upwind integration of the age-structured model.");

    m.def("parasitemia",
          py::overload_cast<double, double>(&parasitemia),
          py::arg("total_prbc"), py::arg("total_urbc"),
          "Infected fraction pRBC / (pRBC + uRBC).");

    py::class_<R0Breakdown>(m, "R0Breakdown")
        .def_readonly("invasion", &R0Breakdown::invasion)
        .def_readonly("offspring", &R0Breakdown::offspring)
        .def_readonly("production", &R0Breakdown::production)
        .def_readonly("survival", &R0Breakdown::survival)
        .def_readonly("sum_r_star", &R0Breakdown::sum_r_star)
        .def_readonly("r0", &R0Breakdown::r0);

    m.def("r0_breakdown_ode", &r0_breakdown_ode, py::arg("params"));
    m.def("r0_breakdown_pde", &r0_breakdown_pde, py::arg("params"),
          py::arg("production_factor_one") = false);
    m.def("r0_ode", &r0_ode, py::arg("params"));
    m.def("r0_pde", &r0_pde, py::arg("params"));

    py::class_<RegressionFit>(m, "RegressionFit")
        .def_readonly("log10_k1", &RegressionFit::log10_k1)
        .def_readonly("theta1", &RegressionFit::theta1)
        .def_readonly("log10_k2", &RegressionFit::log10_k2)
        .def_readonly("theta2", &RegressionFit::theta2)
        .def_readonly("t0_days", &RegressionFit::t0_days)
        .def_readonly("r2_first", &RegressionFit::r2_first)
        .def_readonly("r2_second", &RegressionFit::r2_second)
        .def_readonly("lag_days", &RegressionFit::lag_days)
        .def_readonly("se_log10_k1", &RegressionFit::se_log10_k1)
        .def_readonly("se_theta1", &RegressionFit::se_theta1)
        .def_readonly("se_log10_k2", &RegressionFit::se_log10_k2)
        .def_readonly("se_theta2", &RegressionFit::se_theta2);

    m.def("fit_two_regime", &fit_two_regime, py::arg("traj"),
          py::arg("lag_days") = 2.0, py::arg("window_lo_days") = 2.0,
          py::arg("window_hi_days") = 30.0, py::arg("search_lo_days") = 4.0,
          py::arg("search_hi_days") = 28.0,
          "Two-regime log-log power-law fit with exhaustive change-point search.");

    m.def("clinical_gametocytes", &clinical_gametocytes, py::arg("p"),
          py::arg("t_days"),
          "Gametocyte density predicted from parasitemia by the fitted "
          "two-regime power law.");
    auto clin = m.def_submodule("clinical", "Fitted two-regime coefficients.");
    clin.attr("k1") = clinical::k1;
    clin.attr("theta1") = clinical::theta1;
    clin.attr("k2") = clinical::k2;
    clin.attr("theta2") = clinical::theta2;
    clin.attr("t0_days") = clinical::t0_days;
    clin.attr("err2_const") = clinical::err2_const;
    clin.attr("err2_slope") = clinical::err2_slope;

    py::class_<PatientSeries>(m, "PatientSeries")
        .def(py::init<>())
        .def_readwrite("patient_id", &PatientSeries::patient_id)
        .def_readwrite("days", &PatientSeries::days)
        .def_readwrite("gametocyte_density", &PatientSeries::gametocyte_density);

    py::class_<FitProblem>(m, "FitProblem")
        .def(py::init<>())
        .def_readwrite("data", &FitProblem::data)
        .def_readwrite("model_kind", &FitProblem::model_kind)
        .def_readwrite("bounds", &FitProblem::bounds)
        .def_readwrite("k_range", &FitProblem::k_range)
        .def_readwrite("objective_scale", &FitProblem::objective_scale)
        .def_readwrite("base_params", &FitProblem::base_params)
        .def_readwrite("dt", &FitProblem::dt)
        .def_readwrite("da", &FitProblem::da)
        .def_readwrite("a_max", &FitProblem::a_max)
        .def_readwrite("max_evals_per_start", &FitProblem::max_evals_per_start);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("alpha_g", &FitResult::alpha_g)
        .def_readonly("m0", &FitResult::m0)
        .def_readonly("mu_g", &FitResult::mu_g)
        .def_readonly("k_opt", &FitResult::k_opt)
        .def_readonly("sse", &FitResult::sse)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("evaluations", &FitResult::evaluations);

    m.def("objective", &objective, py::arg("free_params"), py::arg("k"),
          py::arg("problem"),
          "Sum of squared residuals for (alpha_g, m0, mu_g) at stage count k.");
    m.def("fit", &fit, py::arg("problem"),
          py::call_guard<py::gil_scoped_release>(),
          "Bounded Nelder-Mead over (alpha_g, m0, mu_g), exhaustive over K.");

    m.def("load_patient_csv", &load_patient_csv, py::arg("path"),
          py::arg("unit") = DensityUnit::per_ml, py::arg("patient_id") = "");
    m.def("generate_synthetic", &generate_synthetic, py::arg("params"),
          py::arg("kind"), py::arg("noise_cv"), py::arg("seed"),
          "Daily synthetic gametocyte series with lognormal noise; "
          "deterministic per seed.");
    m.def("write_trajectory_csv", &write_trajectory_csv, py::arg("traj"),
          py::arg("path"));
    m.def("read_trajectory_csv", &read_trajectory_csv, py::arg("path"));
    m.def("write_patient_csv", &write_patient_csv, py::arg("series"), py::arg("path"));

    m.def("days_to_hours", &days_to_hours, py::arg("days"));
    m.def("hours_to_days", &hours_to_days, py::arg("hours"));
}
