#include "doctest.h"

#include <cmath>
#include <vector>

#include "withinhost/analysis.hpp"
#include "withinhost/errors.hpp"
#include "withinhost/ode_model.hpp"
#include "withinhost/params.hpp"

using namespace withinhost;

namespace {

// Trajectory whose gametocyte channel follows the fixed clinical formula of
// its own parasitemia channel, with samples every half day from 0 to 30 d.
Trajectory clinical_formula_trajectory() {
    Trajectory traj;
    for (int i = 0; i <= 60; ++i) {
        const double t_days = 0.5 * static_cast<double>(i);
        traj.times.push_back(t_days * 24.0);
        // Smoothly decaying parasitemia: 1e-2 at t=0 down to ~1e-4 at t=30.
        const double p = 1e-2 * std::pow(10.0, -t_days / 15.0);
        traj.parasitemia.push_back(p);
        traj.total_prbc.push_back(p * 5e9);
        traj.total_urbc.push_back((1.0 - p) * 5e9);
        traj.merozoites.push_back(0.0);
        double g;
        if (t_days <= clinical::t0_days) {
            const double lagged =
                1e-2 * std::pow(10.0, -std::max(0.0, t_days - 2.0) / 15.0);
            g = clinical::k1 * std::pow(lagged, clinical::theta1);
        } else {
            g = clinical::k2 * std::pow(p, clinical::theta2);
        }
        traj.gametocytes.push_back(g);
    }
    return traj;
}

}  // namespace

TEST_CASE("parasitemia is the parasitized fraction") {
    CHECK(parasitemia(0.0, 5e9) == 0.0);
    CHECK(parasitemia(2.5e9, 2.5e9) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(parasitemia(5e7, 4.95e9) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK_THROWS_AS(parasitemia(0.0, 0.0), NumericalError);
}

TEST_CASE("parasitemia overloads agree with the scalar form") {
    const ModelParams p = default_params(4);
    OdeState s = default_ode_init(p);
    s.p.assign(4, 1e7);
    const double total_r = s.r_r + s.r_m + s.r_s;
    CHECK(parasitemia(s) == doctest::Approx(parasitemia(4e7, total_r)).epsilon(1e-15));

    const AgeMesh mesh = AgeMesh::make(0.5, 54.0);
    PdeState q;
    q.r_r = 1e9;
    q.r_m = 2e9;
    q.r_s = 0.5e9;
    q.p_grid.assign(static_cast<std::size_t>(mesh.n_cells), 2e6);
    // mass = 2e6 * 108 cells * 0.5 h = 1.08e8
    CHECK(parasitemia(q, mesh) == doctest::Approx(parasitemia(1.08e8, 3.5e9)).epsilon(1e-12));
}

TEST_CASE("reproduction number factors take their frozen default values") {
    const ModelParams p = default_params();
    const R0Breakdown b = r0_breakdown_ode(p);
    CHECK(b.sum_r_star == doctest::Approx(4.9824e9).epsilon(1e-12));
    CHECK(b.invasion == doctest::Approx(0.0611056833).epsilon(1e-8));
    CHECK(b.offspring == doctest::Approx(0.95 * 16.0).epsilon(1e-12));
    CHECK(b.production == 1.0);
    CHECK(b.survival == doctest::Approx(0.9834807394).epsilon(1e-8));
    CHECK(b.r0 == doctest::Approx(0.9134631908).epsilon(1e-8));
    CHECK(r0_ode(p) == doctest::Approx(b.r0).epsilon(1e-15));

    const R0Breakdown a = r0_breakdown_pde(p);
    CHECK(a.production == doctest::Approx(10.0 / (10.0 + p.d0)).epsilon(1e-12));
    CHECK(a.survival == doctest::Approx(std::exp(-48.0 * p.d0)).epsilon(1e-12));
    CHECK(r0_pde(p) == doctest::Approx(0.9134289524).epsilon(1e-8));
}

TEST_CASE("reproduction number vanishes with the transmission routes") {
    ModelParams p = default_params();
    p.beta = 0.0;
    CHECK(r0_ode(p) == 0.0);
    CHECK(r0_pde(p) == 0.0);

    p = default_params();
    p.alpha_g = 1.0;  // every rupture product is sexual: no onward invasion
    CHECK(r0_ode(p) == 0.0);
}

TEST_CASE("reproduction number decreases in the death rate") {
    ModelParams p = default_params();
    double prev = 2.0;
    for (double d0 : {0.0, 1e-4, 1e-3, 1e-2}) {
        p.d0 = d0;
        p.set_equal_stages(p.k_stages);
        const double r = r0_ode(p);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("many stages collapse to the exponential survival factor") {
    // (1 + dev*d0/K)^-K -> exp(-dev*d0); at K = 100 the gap is under 1e-3.
    ModelParams p = default_params(100);
    const R0Breakdown b = r0_breakdown_ode(p);
    const double exact = std::exp(-48.0 * p.d0);
    CHECK(std::fabs(b.survival - exact) / exact < 1e-3);

    ModelParams q = default_params(10000);
    const double chain = r0_ode(q);
    const double sharp = r0_breakdown_pde(q, true).r0;
    CHECK(std::fabs(chain - sharp) / sharp < 1e-3);
}

TEST_CASE("change-point regression recovers the clinical coefficients exactly") {
    const Trajectory traj = clinical_formula_trajectory();
    const RegressionFit fit = fit_two_regime(traj);
    CHECK(fit.log10_k1 == doctest::Approx(std::log10(clinical::k1)).epsilon(1e-9));
    CHECK(fit.theta1 == doctest::Approx(clinical::theta1).epsilon(1e-9));
    CHECK(fit.log10_k2 == doctest::Approx(std::log10(clinical::k2)).epsilon(1e-9));
    CHECK(fit.theta2 == doctest::Approx(clinical::theta2).epsilon(1e-7));
    // True switch at 14.5636 d with half-day sampling: the best pure split is
    // the last regime-one sample at 14.5 d.
    CHECK(std::fabs(fit.t0_days - clinical::t0_days) <= 0.5);
    CHECK(fit.r2_first >= 0.999999);
    CHECK(fit.r2_second >= 0.999999);
    CHECK(fit.lag_days == 2.0);
    CHECK(fit.se_theta1 <= 1e-6);
}

TEST_CASE("a single power law fits with a near-zero second-regime contrast") {
    // G = k * P(t-2)^theta throughout: regime one should be exact regardless
    // of where the change point lands.
    Trajectory traj;
    for (int i = 0; i <= 60; ++i) {
        const double t_days = 0.5 * static_cast<double>(i);
        traj.times.push_back(t_days * 24.0);
        const double p = 5e-3 * std::pow(10.0, -t_days / 20.0);
        traj.parasitemia.push_back(p);
        traj.total_prbc.push_back(p * 5e9);
        traj.total_urbc.push_back((1.0 - p) * 5e9);
        traj.merozoites.push_back(0.0);
        const double lagged = 5e-3 * std::pow(10.0, -std::max(0.0, t_days - 2.0) / 20.0);
        traj.gametocytes.push_back(2e6 * std::pow(lagged, 0.9));
    }
    const RegressionFit fit = fit_two_regime(traj);
    CHECK(fit.theta1 == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(fit.log10_k1 == doctest::Approx(std::log10(2e6)).epsilon(1e-9));
    CHECK(fit.r2_first >= 0.999999);
}

TEST_CASE("regression rejects degenerate windows") {
    Trajectory traj;
    for (int i = 0; i <= 60; ++i) {
        const double t_days = 0.5 * static_cast<double>(i);
        traj.times.push_back(t_days * 24.0);
        traj.parasitemia.push_back(1e-3);
        traj.gametocytes.push_back(0.0);  // nonpositive inside the window
        traj.total_prbc.push_back(5e6);
        traj.total_urbc.push_back(5e9);
        traj.merozoites.push_back(0.0);
    }
    CHECK_THROWS_AS(fit_two_regime(traj), ConfigError);

    Trajectory tiny;
    for (int i = 0; i <= 3; ++i) {
        tiny.times.push_back(static_cast<double>(i) * 240.0);
        tiny.parasitemia.push_back(1e-3);
        tiny.gametocytes.push_back(1e5);
        tiny.total_prbc.push_back(5e6);
        tiny.total_urbc.push_back(5e9);
        tiny.merozoites.push_back(0.0);
    }
    CHECK_THROWS_AS(fit_two_regime(tiny), ConfigError);
}

TEST_CASE("clinical formula evaluates its frozen anchor points") {
    CHECK(clinical_gametocytes(1.0, 10.0) == doctest::Approx(3.843e7).epsilon(1e-12));
    CHECK(clinical_gametocytes(0.01, 10.0) == doctest::Approx(3.3409531413e5).epsilon(1e-9));
    CHECK(clinical_gametocytes(0.01, 20.0) == doctest::Approx(3.7013655289e9).epsilon(1e-9));
    CHECK(clinical_gametocytes(1e-4, 14.5636) == doctest::Approx(2.9044933366e3).epsilon(1e-9));
}

TEST_CASE("clinical formula enforces its validity window") {
    CHECK_THROWS_AS(clinical_gametocytes(0.01, 2.0), ConfigError);
    CHECK_THROWS_AS(clinical_gametocytes(0.01, 31.0), ConfigError);
    CHECK_THROWS_AS(clinical_gametocytes(0.0, 10.0), ConfigError);
    CHECK_THROWS_AS(clinical_gametocytes(-0.1, 10.0), ConfigError);
    CHECK_THROWS_AS(clinical_gametocytes(1.5, 10.0), ConfigError);
}

TEST_CASE("a 5% parasitemia error moves the estimate less than 5.38%") {
    const double cap =
        std::sqrt(clinical::err2_const + clinical::err2_slope * 0.05 * 0.05);
    CHECK(cap == doctest::Approx(0.0538).epsilon(1e-2));
    for (double p : {1e-4, 1e-3, 1e-2, 1e-1}) {
        for (double t : {10.0, 20.0}) {
            const double g = clinical_gametocytes(p, t);
            const double g_up = clinical_gametocytes(1.05 * p, t);
            const double rel = std::fabs(g_up - g) / g;
            CHECK(rel < 0.0538);
            CHECK(rel <= cap);
        }
    }
}
