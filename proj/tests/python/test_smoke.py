import math

import pytest

import withinhost as wh


def test_defaults_validate():
    p = wh.default_params()
    wh.validate(p)
    assert p.k_stages == 50
    assert len(p.mu_i) == 50
    assert math.isclose(sum(1.0 / mu for mu in p.mu_i), p.dev_time, rel_tol=1e-12)


def test_validate_rejects_bad_params():
    p = wh.default_params()
    p.beta = -1.0
    with pytest.raises(ValueError):
        wh.validate(p)


def test_chain_survival_values():
    assert math.isclose(wh.chain_survival(1, 48.0), 0.367879441171442, rel_tol=1e-12)
    assert math.isclose(wh.chain_survival(10, 48.0), 0.457929714471852, rel_tol=1e-12)
    assert math.isclose(wh.chain_survival(50, 48.0), 0.481191684527957, rel_tol=1e-12)


def test_equilibrium_matches_published_values():
    eq = wh.equilibrium(wh.default_params())
    assert abs(eq.r_r_star / 62.50e6 - 1.0) < 0.01
    assert abs(eq.r_m_star / 4.853e9 - 1.0) < 0.01
    assert abs(eq.r_s_star / 83.30e6 - 1.0) < 0.01
    assert abs(eq.total() / 4.99e9 - 1.0) < 0.01


def test_short_chain_run():
    p = wh.default_params(10)
    cfg = wh.SimConfig()
    cfg.t_end = 24.0
    cfg.record_every = 1.0
    traj = wh.simulate_ode(wh.default_ode_init(p), cfg, p)
    assert len(traj) == 25
    assert traj.times[-1] == pytest.approx(24.0)
    assert traj.merozoites[0] == pytest.approx(p.m0)
    assert all(g >= 0.0 for g in traj.gametocytes)
    assert 0.0 <= traj.parasitemia[-1] < 1.0


def test_short_age_structured_run():
    p = wh.default_params()
    # 0.05 h cells: the sink bound (mu_bar + d0) * dt <= 1 rules out 0.1 h
    mesh = wh.AgeMesh.make(0.05, 54.0, p.dev_time)
    rf = wh.RuptureFunction(p.dev_time, p.mu_bar)
    cfg = wh.SimConfig()
    cfg.dt = 0.05
    cfg.t_end = 24.0
    cfg.record_every = 1.0
    traj = wh.simulate_pde(wh.default_pde_init(p, mesh), cfg, p, mesh, rf)
    assert len(traj) == 25
    assert traj.merozoites[0] == pytest.approx(p.m0)
    assert traj.total_prbc[-1] > 0.0


def test_r0_breakdown():
    b = wh.r0_breakdown_pde(wh.default_params())
    assert 0.99 < b.production <= 1.0
    assert b.r0 == pytest.approx(b.invasion * b.offspring * b.production * b.survival)
    assert abs(wh.r0_ode(wh.default_params()) - b.r0) < 1e-3


def test_two_regime_fit_recovers_generating_formula():
    times, gams, paras = [], [], []
    for i in range(61):
        td = 0.5 * i
        p_now = 1e-2 * 10.0 ** (-td / 15.0)
        p_lag = 1e-2 * 10.0 ** (-(td - 2.0) / 15.0)
        if td <= wh.clinical.t0_days:
            g = wh.clinical.k1 * p_lag**wh.clinical.theta1
        else:
            g = wh.clinical.k2 * p_now**wh.clinical.theta2
        times.append(24.0 * td)
        gams.append(g)
        paras.append(p_now)
    traj = wh.Trajectory()
    traj.times = times
    traj.gametocytes = gams
    traj.parasitemia = paras
    fit = wh.fit_two_regime(traj)
    assert fit.theta1 == pytest.approx(wh.clinical.theta1, abs=1e-6)
    assert fit.theta2 == pytest.approx(wh.clinical.theta2, abs=1e-6)
    assert fit.log10_k1 == pytest.approx(math.log10(wh.clinical.k1), abs=1e-6)
    assert fit.log10_k2 == pytest.approx(math.log10(wh.clinical.k2), abs=1e-6)
    assert abs(fit.t0_days - wh.clinical.t0_days) <= 0.5


def test_clinical_formula_continuity_scale():
    g = wh.clinical_gametocytes(1e-2, 10.0)
    assert g > 0.0
    assert math.isclose(
        g, wh.clinical.k1 * (1e-2) ** wh.clinical.theta1, rel_tol=1e-12
    )


def test_synthetic_series_deterministic_per_seed():
    p = wh.default_params(10)
    a = wh.generate_synthetic(p, wh.ModelKind.ode, 0.2, 7)
    b = wh.generate_synthetic(p, wh.ModelKind.ode, 0.2, 7)
    c = wh.generate_synthetic(p, wh.ModelKind.ode, 0.2, 8)
    assert a.days == list(range(1, 41))
    assert a.gametocyte_density == b.gametocyte_density
    assert a.gametocyte_density != c.gametocyte_density


def test_trajectory_csv_roundtrip(tmp_path):
    p = wh.default_params(5)
    cfg = wh.SimConfig()
    cfg.t_end = 12.0
    traj = wh.simulate_ode(wh.default_ode_init(p), cfg, p)
    path = str(tmp_path / "traj.csv")
    wh.write_trajectory_csv(traj, path)
    back = wh.read_trajectory_csv(path)
    assert back.times == traj.times
    assert back.gametocytes == traj.gametocytes
