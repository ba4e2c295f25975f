#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "withinhost/errors.hpp"
#include "withinhost/ode_model.hpp"
#include "withinhost/params.hpp"
#include "withinhost/rbc.hpp"

using namespace withinhost;

namespace {

double max_gametocyte_gap(const Trajectory& coarse, const Trajectory& fine) {
    // Both trajectories must be sampled on the same recording grid.
    REQUIRE(coarse.times.size() == fine.times.size());
    double gap = 0.0;
    for (std::size_t i = 0; i < coarse.times.size(); ++i) {
        REQUIRE(coarse.times[i] == doctest::Approx(fine.times[i]).epsilon(1e-12));
        gap = std::max(gap, std::fabs(coarse.gametocytes[i] - fine.gametocytes[i]));
    }
    return gap;
}

}  // namespace

TEST_CASE("transit-time survival matches the frozen closed-form values") {
    CHECK(chain_survival(1, 48.0) == doctest::Approx(0.367879441171442).epsilon(1e-9));
    CHECK(chain_survival(10, 48.0) == doctest::Approx(0.457929714471852).epsilon(1e-9));
    CHECK(chain_survival(50, 48.0) == doctest::Approx(0.481191684527957).epsilon(1e-9));
    CHECK(chain_survival(10000, 48.0) == doctest::Approx(0.498670191664369).epsilon(1e-9));
    CHECK(chain_survival(10, 24.0) == doctest::Approx(0.968171942693795).epsilon(1e-9));
    CHECK(chain_survival(50, 60.0) == doctest::Approx(0.045989932379151).epsilon(1e-9));
}

TEST_CASE("transit-time survival basic shape") {
    for (int k : {1, 3, 50, 500}) {
        CHECK(chain_survival(k, 0.0) == 1.0);
        double prev = 1.0;
        for (double a : {12.0, 24.0, 48.0, 72.0, 120.0, 240.0}) {
            const double s = chain_survival(k, a);
            CHECK(s <= prev);
            CHECK(s >= 0.0);
            prev = s;
        }
        CHECK(chain_survival(k, 2000.0) < 1e-8);
    }
    CHECK_THROWS_AS(chain_survival(0, 10.0), ConfigError);
}

TEST_CASE("survival-curve quadrature reproduces the stage-law moments") {
    // mean = integral of S, E[T^2] = 2 * integral of a*S; exact values are
    // dev_time and dev_time^2/K + dev_time^2.
    struct Case {
        int k;
        double a_max;
    };
    for (const Case c : {Case{1, 2000.0}, Case{10, 400.0}}) {
        const double h = 0.01;
        const long n = std::lround(c.a_max / h);
        double mean = 0.0;
        double second = 0.0;
        for (long i = 0; i <= n; ++i) {
            const double a = static_cast<double>(i) * h;
            const double w = (i == 0 || i == n) ? 0.5 : 1.0;
            const double s = chain_survival(c.k, a);
            mean += w * s * h;
            second += w * 2.0 * a * s * h;
        }
        const double var = second - mean * mean;
        CHECK(mean == doctest::Approx(48.0).epsilon(1e-6));
        CHECK(var == doctest::Approx(48.0 * 48.0 / c.k).epsilon(1e-4));
    }
}

TEST_CASE("rhs rejects mismatched stage dimensions") {
    const ModelParams p = default_params(10);
    OdeState s = default_ode_init(p);
    s.p.resize(9);
    CHECK_THROWS_AS(ode_rhs(s, 0.0, p), ConfigError);
}

TEST_CASE("rhs vanishes at the disease-free equilibrium") {
    const ModelParams p = default_params();
    ModelParams q = p;
    q.m0 = 0.0;
    const OdeState s = default_ode_init(q);
    const OdeState d = ode_rhs(s, 0.0, p);
    CHECK(std::fabs(d.r_r) <= 1e-9 * p.lambda0);
    CHECK(std::fabs(d.r_m) <= 1e-9 * p.lambda0);
    CHECK(std::fabs(d.r_s) <= 1e-9 * p.lambda0);
    CHECK(d.m == 0.0);
    CHECK(d.g == 0.0);
    for (double v : d.p) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("single-stage rupture splits between merozoites and gametocytes") {
    ModelParams p = default_params(1);
    OdeState s = default_ode_init(p);
    s.m = 0.0;
    s.p[0] = 1e4;
    const OdeState d = ode_rhs(s, 0.0, p);
    const double release = 16.0 * (1.0 / 48.0) * 1e4;
    CHECK(d.g == doctest::Approx(0.05 * release).epsilon(1e-12));
    CHECK(d.m == doctest::Approx(0.95 * release).epsilon(1e-12));
    CHECK(d.p[0] == doctest::Approx(-(1.0 / 48.0 + p.d0) * 1e4).epsilon(1e-12));
}

TEST_CASE("all burst output becomes gametocytes when alpha_g is one") {
    ModelParams p = default_params(5);
    p.alpha_g = 1.0;
    OdeState s = default_ode_init(p);
    s.m = 0.0;
    s.p.back() = 2e3;
    const OdeState d = ode_rhs(s, 0.0, p);
    CHECK(d.m == 0.0);
    CHECK(d.g == doctest::Approx(16.0 * p.mu_i.back() * 2e3).epsilon(1e-12));
}

TEST_CASE("merozoites decay exponentially when invasion is off") {
    ModelParams p = default_params(10);
    p.beta = 0.0;
    p.si_star = 1e300;  // push the innate term to zero: pure linear decay
    SimConfig cfg;
    // Per-step relative error of RK4 on dm = -mu*m is (mu*dt)^5/120; at
    // dt = 0.01 the accumulated bound over 4800 steps is 1.3e-7, inside the
    // 1e-6 check below. dt = 0.05 would sit at 8e-5 and mask real defects.
    cfg.dt = 0.01;
    cfg.t_end = 48.0;
    cfg.record_every = 1.0;
    const Trajectory traj = simulate_ode(default_ode_init(p), cfg, p);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double expected = p.m0 * std::exp(-p.mu_mero * traj.times[i]);
        CHECK(traj.merozoites[i] == doctest::Approx(expected).epsilon(1e-6));
        CHECK(traj.gametocytes[i] == 0.0);
        CHECK(traj.total_prbc[i] == 0.0);
        CHECK(traj.total_urbc[i] == doctest::Approx(4.9824e9).epsilon(1e-9));
    }
}

TEST_CASE("the innate sink only perturbs the decay at the ppm level") {
    ModelParams p = default_params(10);
    p.beta = 0.0;
    SimConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 3.0;
    cfg.record_every = 3.0;
    const Trajectory traj = simulate_ode(default_ode_init(p), cfg, p);
    const double expected = p.m0 * std::exp(-p.mu_mero * 3.0);
    CHECK(traj.merozoites.back() == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("no inoculum means the trajectory stays at the disease-free point") {
    ModelParams p = default_params();
    p.m0 = 0.0;
    SimConfig cfg;
    cfg.dt = 0.5;
    cfg.t_end = 480.0;
    cfg.record_every = 24.0;
    const Trajectory traj = simulate_ode(default_ode_init(p), cfg, p);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(traj.gametocytes[i] == 0.0);
        CHECK(traj.merozoites[i] == 0.0);
        CHECK(traj.parasitemia[i] == 0.0);
        CHECK(traj.total_urbc[i] == doctest::Approx(4.9824e9).epsilon(1e-12));
    }
}

TEST_CASE("a unit cohort reproduces the stage-law survival curve") {
    for (int k : {1, 10, 50}) {
        ModelParams p = default_params(k);
        p.beta = 0.0;  // no re-invasion: the cohort just matures and ruptures
        p.m0 = 0.0;
        p.d_i.assign(static_cast<std::size_t>(k), 0.0);
        OdeState init = default_ode_init(p);
        init.p[0] = 1.0;
        SimConfig cfg;
        cfg.dt = 0.05;
        cfg.t_end = 120.0;
        cfg.record_every = 1.0;
        cfg.clamp_negative = false;
        const Trajectory traj = simulate_ode(init, cfg, p);
        double worst = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const double oracle = chain_survival(k, traj.times[i]);
            worst = std::max(worst, std::fabs(traj.total_prbc[i] - oracle));
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("halving dt converges at fourth order before the adaptive window") {
    ModelParams p = default_params(10);
    SimConfig base;
    base.t_end = 240.0;
    base.record_every = 24.0;
    base.clamp_negative = false;

    SimConfig c1 = base;
    c1.dt = 0.2;
    SimConfig c2 = base;
    c2.dt = 0.1;
    SimConfig c3 = base;
    c3.dt = 0.05;

    const OdeState init = default_ode_init(p);
    const Trajectory t1 = simulate_ode(init, c1, p);
    const Trajectory t2 = simulate_ode(init, c2, p);
    const Trajectory t3 = simulate_ode(init, c3, p);

    const double e1 = max_gametocyte_gap(t1, t2);
    const double e2 = max_gametocyte_gap(t2, t3);
    REQUIRE(e2 > 0.0);
    const double rate = std::log2(e1 / e2);
    CHECK(rate >= 3.5);
}

TEST_CASE("nominal runs stay essentially nonnegative") {
    const ModelParams p = default_params();
    SimConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 960.0;
    cfg.record_every = 24.0;
    cfg.clamp_negative = false;
    SimStats stats;
    const Trajectory traj = simulate_ode(default_ode_init(p), cfg, p, &stats);
    CHECK(stats.steps == 19200);
    CHECK(stats.min_component >= -1e-9 * 4.9824e9);
    CHECK(traj.size() == 41);
}

TEST_CASE("clamping keeps recorded densities nonnegative and counts events") {
    const ModelParams p = default_params();
    SimConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 960.0;
    cfg.record_every = 24.0;
    SimStats stats;
    const Trajectory traj = simulate_ode(default_ode_init(p), cfg, p, &stats);
    CHECK(stats.clamp_events >= 0);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(traj.gametocytes[i] >= 0.0);
        CHECK(traj.merozoites[i] >= 0.0);
        CHECK(traj.parasitemia[i] >= 0.0);
        CHECK(traj.parasitemia[i] <= 1.0);
    }
}

TEST_CASE("a blow-up raises a numerical error instead of returning garbage") {
    ModelParams p = default_params(5);
    p.beta = 1.0;  // absurd coupling far outside the stable-step regime
    ModelParams q = p;
    q.m0 = 1e8;
    SimConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 10.0;
    cfg.record_every = 1.0;
    CHECK_THROWS_AS(simulate_ode(default_ode_init(q), cfg, q), NumericalError);
}

TEST_CASE("grid configuration errors are rejected up front") {
    const ModelParams p = default_params(3);
    const OdeState init = default_ode_init(p);

    SimConfig bad_t_end;
    bad_t_end.dt = 0.05;
    bad_t_end.t_end = 10.03;
    CHECK_THROWS_AS(simulate_ode(init, bad_t_end, p), ConfigError);

    SimConfig bad_record;
    bad_record.dt = 0.05;
    bad_record.t_end = 10.0;
    bad_record.record_every = 0.075;
    CHECK_THROWS_AS(simulate_ode(init, bad_record, p), ConfigError);

    SimConfig bad_dt;
    bad_dt.dt = -0.1;
    CHECK_THROWS_AS(simulate_ode(init, bad_dt, p), ConfigError);
}

TEST_CASE("recording grid is inclusive of both endpoints") {
    const ModelParams p = default_params(2);
    SimConfig cfg;
    cfg.dt = 0.5;
    cfg.t_end = 10.0;
    cfg.record_every = 2.0;
    const Trajectory traj = simulate_ode(default_ode_init(p), cfg, p);
    REQUIRE(traj.size() == 6);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(10.0).epsilon(1e-12));
}
