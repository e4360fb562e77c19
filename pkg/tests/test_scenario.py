import json

import pytest

from tsm_control.scenario import (
    ConfigError,
    ScenarioConfig,
    baseline,
    high_leakage,
    load_config,
    low_gain,
)


def test_baseline_values():
    cfg = baseline()
    f, p = cfg.friction, cfg.plant
    assert (f.k_x, f.rho, f.n_exp, f.sigma, f.k_zeta, f.upsilon, f.F0) == (
        0.01083, 54.658, 2.0458, 1.58, 0.14368, 0.02686, 0.0099)
    assert (p.m, p.c, p.k_e, p.r_i, p.r_o) == (0.0349, 0.0105, 0.4185, 0.025, 0.025)
    assert cfg.disturbance.amplitude == 0.2
    assert cfg.reference.amplitude == 0.4
    assert cfg.initial.theta_hat == (0, 0, 0) and cfg.initial.m_hat == 0 and cfg.initial.D_star_hat == 0
    assert (cfg.sim.dt, cfg.sim.integrator, cfg.sim.signal_source) == (1e-3, "rk4", "truth")
    e = cfg.estimator
    assert (e.T, e.tau, e.K, e.cycles) == (0.01, 0.2, 20.0, 3600)


def test_variants():
    g = high_leakage().gains
    assert g.sigma1 == g.sigma2 == g.sigma3 == 0.1
    g = low_gain().gains
    assert (g.alpha_v1, g.alpha_v2, g.k_theta, g.k_m, g.k_D) == (3, 8, 0.25, 0.25, 0.5)
    assert g.sigma1 == 0.01


def test_roundtrip(tmp_path):
    cfg = low_gain()
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    assert load_config(path) == cfg


def test_flat_dotted_keys_override_sections():
    cfg = ScenarioConfig.from_dict({"gains": {"alpha_v1": 4.0}, "gains.alpha_v1": 5.0, "friction.n": 1.5})
    assert cfg.gains.alpha_v1 == 5.0
    assert cfg.friction.n_exp == 1.5


def test_sigma_alias():
    cfg = ScenarioConfig.from_dict({"gains": {"sigma": 0.2}})
    assert (cfg.gains.sigma1, cfg.gains.sigma2, cfg.gains.sigma3) == (0.2, 0.2, 0.2)


@pytest.mark.parametrize("data,key", [
    ({"sim": {"dt": 0}}, "sim.dt"),
    ({"sim": {"dt": 0.1, "duration": 0.01}}, "sim.duration"),
    ({"sim": {"integrator": "rk45"}}, "sim.integrator"),
    ({"sim": {"signal_source": "gps"}}, "sim.signal_source"),
    ({"friction": {"rho": -1}}, "friction.rho"),
    ({"plant": {"m": 0}}, "plant.m"),
    ({"gains": {"epsilon": 0}}, "gains.epsilon"),
    ({"gains": {"alpha_v1": "fast"}}, "gains.alpha_v1"),
    ({"plant": {"mass": 1}}, "plant.mass"),
    ({"bogus": 1}, "bogus"),
])
def test_validation_names_key(data, key):
    with pytest.raises(ConfigError) as exc:
        ScenarioConfig.from_dict(data)
    assert exc.value.key == key
    assert key.split(".")[-1] in str(exc.value)


def test_nonpositive_gain_rejected_on_validate():
    cfg = baseline().with_overrides({"gains.k_m": 0.0})
    with pytest.raises(ConfigError) as exc:
        cfg.validate()
    assert exc.value.key == "gains.k_m"
    cfg.validate(require_positive_gains=False)


def test_estimator_period_must_be_multiple_of_dt():
    with pytest.raises(ConfigError) as exc:
        baseline().with_overrides({"sim.dt": 3e-3}).validate()
    assert exc.value.key == "estimator.T"


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    arr = tmp_path / "arr.json"
    arr.write_text(json.dumps([1, 2]))
    with pytest.raises(ConfigError):
        load_config(arr)


def test_name_defaults_to_file_stem(tmp_path):
    path = tmp_path / "my_run.json"
    path.write_text("{}")
    assert load_config(path).name == "my_run"
