import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsm_control.controller import ControllerGains, ReferenceTrajectory
from tsm_control.engine import run_scenario
from tsm_control.friction import FrictionParams
from tsm_control.plant import DisturbanceModel, PlantParams
from tsm_control.scenario import baseline
from tsm_control.stability import (
    TANH_CONSTANT,
    CertificateInputs,
    GroundTruth,
    check_decrease,
    disturbance_bound,
    lyapunov_value,
    psi_rho,
    tanh_inequality_check,
    ultimate_bound,
    young_gaps,
)
from tsm_control.trace import TRACE_COLUMNS, Trace

G = ControllerGains()
TRUTH = GroundTruth.from_models(FrictionParams(), PlantParams(), ReferenceTrajectory(), DisturbanceModel(), G)


def _ci(**kw):
    base = dict(Theta=TRUTH.Theta, m=TRUTH.m, D_star=TRUTH.D_star, gains=G,
                Theta_hat=TRUTH.Theta, m_hat=TRUTH.m, D_star_hat=TRUTH.D_star, xi1=0.0, xi2=0.0)
    base.update(kw)
    return CertificateInputs(**base)


def test_disturbance_bound_value():
    # 0.025*(0.14368 + 0.0099) + 0.4185*1.5*0.4 + 0.2
    assert TRUTH.D_star == pytest.approx(0.4549395, rel=1e-14)


def test_lyapunov_zero_at_truth():
    assert lyapunov_value(_ci()) == 0.0


def test_lyapunov_unit_error():
    assert lyapunov_value(_ci(xi1=1.0)) == pytest.approx(0.5)


def test_lyapunov_initial_baseline_value():
    # all estimates zero, plant at rest: xi2(0) = -ydot_r(0) = -0.16*pi; 40-digit mpmath value
    v0 = lyapunov_value(_ci(Theta_hat=np.zeros(3), m_hat=0.0, D_star_hat=0.0, xi2=-0.16 * math.pi))
    assert v0 == pytest.approx(3.2173633342074115779, rel=1e-13)


def test_lyapunov_rejects_nonpositive_mass():
    with pytest.raises(ValueError):
        lyapunov_value(_ci(m=0.0))


def test_decay_rate_reference_gains():
    _, rho = psi_rho(G, TRUTH.Theta, TRUTH.m, TRUTH.D_star)
    assert rho == 0.01


def test_psi_zero_without_leakage_and_smoothing():
    g = object.__new__(ControllerGains)  # epsilon == 0 is outside the constructor's domain
    for f in dataclasses.fields(ControllerGains):
        object.__setattr__(g, f.name, getattr(G, f.name))
    for name in ("sigma1", "sigma2", "sigma3", "epsilon"):
        object.__setattr__(g, name, 0.0)
    psi, _ = psi_rho(g, TRUTH.Theta, TRUTH.m, TRUTH.D_star)
    assert psi == 0.0


def test_psi_reference_value():
    # term by term, written out independently
    m, D = 0.0349, 0.4549395
    th = [-0.025 * 0.01083 / m, -0.025 * 0.02686 / m, -0.0105 / m]
    tt = sum(x * x for x in th)
    expected = 0.01 / 1.0 * tt + 0.2785 * 0.05 * D / m + 0.01 / 1.0 * m + 0.01 / (2 * m) * D * D
    psi, _ = psi_rho(G, TRUTH.Theta, TRUTH.m, TRUTH.D_star)
    assert psi == pytest.approx(expected, rel=1e-13)
    assert psi == pytest.approx(0.21242988092715874664, rel=1e-13)


@pytest.mark.parametrize("psi,rho,r", [(0.0, 1.0, 0.0), (0.5, 1.0, 1.0)])
def test_ultimate_bound_examples(psi, rho, r):
    assert ultimate_bound(psi, rho) == pytest.approx(r)


def test_ultimate_bound_reference_value():
    psi, rho = psi_rho(G, TRUTH.Theta, TRUTH.m, TRUTH.D_star)
    assert ultimate_bound(psi, rho) == pytest.approx(6.5181267389819714466, rel=1e-12)


@pytest.mark.parametrize("name", ["sigma1", "sigma2", "sigma3", "epsilon"])
def test_ultimate_bound_monotone(name):
    # raising one leakage alone leaves the decay rate at the smallest sigma
    radii = []
    for scale in (1.0, 2.0, 4.0):
        g = dataclasses.replace(G, **{name: getattr(G, name) * scale})
        radii.append(ultimate_bound(*psi_rho(g, TRUTH.Theta, TRUTH.m, TRUTH.D_star)))
    assert radii[0] <= radii[1] <= radii[2]


def test_ultimate_bound_requires_positive_rate():
    with pytest.raises(ValueError):
        ultimate_bound(1.0, 0.0)


def test_tanh_inequality_examples():
    eps = 0.05
    assert tanh_inequality_check([0.0], eps) == pytest.approx(-TANH_CONSTANT * eps)
    assert tanh_inequality_check([1e6, -1e6], eps) == pytest.approx(-TANH_CONSTANT * eps)
    grid = np.linspace(-10, 10, 200001)
    assert tanh_inequality_check(grid, eps) <= 0.0
    lhs = np.abs(grid) - grid * np.tanh(grid / eps)
    # u*(1 - tanh u) peaks at u = 0.63923... with value 0.27846..., found by mpmath root-finding
    k = int(np.argmax(lhs))
    assert abs(grid[k]) / eps == pytest.approx(0.639232271380, abs=2e-3)
    assert lhs[k] / eps == pytest.approx(0.278464542761, rel=1e-6)
    assert lhs[k] <= TANH_CONSTANT * eps


@given(st.floats(-1e3, 1e3), st.floats(1e-3, 10))
def test_tanh_inequality_property(x, eps):
    assert tanh_inequality_check([x], eps) <= 1e-15


def _synthetic_trace(n, xi1=0.0, xi2=0.0, truth=TRUTH, est=None):
    cols = {c: np.zeros(n) for c in TRACE_COLUMNS}
    cols["t"] = np.arange(n) * 1e-3
    cols["xi1"][:] = xi1
    cols["xi2"][:] = xi2
    th, m, d = (truth.Theta, truth.m, truth.D_star) if est is None else est
    cols["theta_hat_1"][:], cols["theta_hat_2"][:], cols["theta_hat_3"][:] = th
    cols["m_hat"][:] = m
    cols["D_star_hat"][:] = d
    return Trace(cols, 1e-3, truth=truth)


def test_equilibrium_trace_certifies():
    rep = check_decrease(_synthetic_trace(100))
    assert np.all(rep.V == 0)
    assert rep.violations == []


def test_trace_without_truth_rejected():
    tr = _synthetic_trace(10)
    tr.truth = None
    with pytest.raises(ValueError):
        check_decrease(tr)


def test_growing_energy_is_flagged():
    tr = _synthetic_trace(1000)
    tr.columns["xi1"][:] = np.linspace(0, 3, 1000)
    assert check_decrease(tr).violations


def test_baseline_certifies(baseline_run):
    _, metrics, rep = baseline_run
    assert rep.violations == []
    assert rep.final_error_max <= rep.ultimate_bound
    assert rep.D_realized_max <= rep.D_star
    assert metrics.certify_pass


def _sabotaged(duration=0.3):
    return baseline().with_overrides({"gains.alpha_v1": -10.0, "sim.duration": duration})


def test_negated_gain_is_uncertifiable():
    _, _, rep = run_scenario(_sabotaged(), check_gains=False)
    assert rep.rho_cert < 0
    assert rep.violations and not rep.passed


def test_negated_gain_violates_nominal_envelope():
    # monitor configured for the nominal design, controller running corrupted gains
    trace, _, _ = run_scenario(_sabotaged(0.5), check_gains=False)
    trace.truth = dataclasses.replace(trace.truth, gains=G)
    rep = check_decrease(trace)
    assert rep.violations


def test_young_gaps_nonnegative(scenario_runs):
    for trace, _, _ in scenario_runs.values():
        assert np.min(young_gaps(trace)) >= -1e-12


@settings(max_examples=200)
@given(st.lists(st.floats(-10, 10), min_size=5, max_size=5))
def test_young_gaps_property(est):
    tr = _synthetic_trace(1, est=(np.array(est[:3]), est[3], est[4]))
    assert np.min(young_gaps(tr)) >= -1e-12


@pytest.mark.slow
def test_violation_does_not_grow_when_dt_halves():
    cfg = baseline().with_overrides({"sim.duration": 5.0})
    worst = []
    for dt in (2e-3, 1e-3, 5e-4):
        tr, _, rep = run_scenario(cfg.with_overrides({"sim.dt": dt}))
        worst.append(float(np.max(rep.V - rep.bound)))
    assert worst[1] <= worst[0] + 1e-12 and worst[2] <= worst[1] + 1e-12
