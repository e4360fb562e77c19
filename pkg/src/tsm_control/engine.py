"""Closed-loop simulation of plant, friction, estimator and adaptive controller."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .controller import AdaptiveState, control_law, error_coords
from .estimation import EstimatorState, estimator_step, quantize
from .friction import ActuatorSignal, friction_force, zeta_rate
from .integrators import step as integrate
from .plant import (
    PlantState,
    actuator_kinematics,
    disturbance_torque,
    environment_torque,
    plant_derivative,
)
from .scenario import ScenarioConfig
from .stability import CertificateReport, GroundTruth, check_decrease, decay_envelope, lyapunov_value
from .stability import certificate_inputs
from .trace import TRACE_COLUMNS, Trace

# state vector layout
Y, YDOT, ZETA, TH1, TH2, TH3, MHAT, DHAT = range(8)


class DivergenceError(RuntimeError):
    """The closed loop produced a non-finite state."""

    def __init__(self, t: float, state: np.ndarray, trace: Trace | None = None):
        super().__init__(f"simulation diverged at t={t:.6g} s (state={state.tolist()})")
        self.t = t
        self.state = state
        self.trace = trace


@dataclass
class RunMetrics:
    mse: float
    max_abs_error: float
    sup_estimates: dict[str, float] = field(default_factory=dict)
    certify_pass: bool | None = None

    def to_dict(self) -> dict:
        return {
            "mse": self.mse,
            "max_abs_error": self.max_abs_error,
            "sup_estimates": dict(self.sup_estimates),
            "certify_pass": self.certify_pass,
        }


def mse(errors) -> float:
    e = np.asarray(errors, dtype=float)
    if e.size == 0:
        raise ValueError("mse of an empty sequence")
    return float(np.mean(e * e))


def run_scenario(
    cfg: ScenarioConfig, check_gains: bool = True
) -> tuple[Trace, RunMetrics, CertificateReport]:
    """Simulate ``cfg`` and certify the resulting trace.

    The actuator acceleration entering ``phi`` is sampled once per step from
    the plant derivative at the step start and held over the RK stages, so the
    plant friction and the controller regressor always see the same ``phi``.
    With ``signal_source == "estimated"`` the controller reads the quantised,
    estimated position and velocity (held between estimator samples) while the
    plant keeps its true state.
    """
    cfg.validate(require_positive_gains=check_gains)
    # non-finite states are detected explicitly and raised as DivergenceError
    with np.errstate(over="ignore", invalid="ignore"):
        return _simulate(cfg)


def _simulate(cfg: ScenarioConfig) -> tuple[Trace, RunMetrics, CertificateReport]:
    fp, pp, g = cfg.friction, cfg.plant, cfg.gains
    ref, dist, est = cfg.reference, cfg.disturbance, cfg.estimator
    dt, scheme = cfg.sim.dt, cfg.sim.integrator
    n = cfg.sim.n_steps
    ratio = pp.ratio
    measured = cfg.sim.signal_source == "estimated"
    est_every = int(round(est.T / dt))
    enc = est.encoder

    xdd_hold = 0.0
    meas_state = PlantState(cfg.initial.y, cfg.initial.ydot)
    meas_sig = actuator_kinematics(meas_state, (cfg.initial.ydot, 0.0), pp)

    def evaluate(t: float, S: np.ndarray):
        y, yd, zeta = S[Y], S[YDOT], S[ZETA]
        a = AdaptiveState(S[TH1:MHAT], S[MHAT], S[DHAT])
        ps = PlantState(y, yd)
        sig = ActuatorSignal(ratio * y, ratio * yd, xdd_hold)
        r = ref.at(t)
        if measured:
            u, rates, *_ = control_law(meas_state, r, meas_sig, a, g, pp)
        else:
            u, rates, *_ = control_law(ps, r, sig, a, g, pp)
        F = friction_force(zeta, sig, fp)
        T_e = environment_torque(y, pp.k_e)
        T_d = disturbance_torque(t, dist)
        _, ydd = plant_derivative(ps, u, F, T_e, T_d, pp)
        dS = np.empty(8)
        dS[Y] = yd
        dS[YDOT] = ydd
        dS[ZETA] = zeta_rate(zeta, sig, fp)
        dS[TH1:] = rates
        return dS, (u, F, T_e, T_d, r[0])

    def rhs(t: float, S: np.ndarray) -> np.ndarray:
        return evaluate(t, S)[0]

    S = np.zeros(8)
    S[Y], S[YDOT], S[ZETA] = cfg.initial.y, cfg.initial.ydot, cfg.initial.zeta
    S[TH1:MHAT] = cfg.initial.theta_hat
    S[MHAT], S[DHAT] = cfg.initial.m_hat, cfg.initial.D_star_hat

    x_enc0 = quantize(cfg.initial.y, enc)
    est_state = EstimatorState(x_enc0, x_enc0, 0.0)
    x_enc, x_est, v_est = x_enc0, x_enc0, 0.0

    rows = np.empty((n, len(TRACE_COLUMNS)))
    col = {c: i for i, c in enumerate(TRACE_COLUMNS)}
    diverged_at = None
    for k in range(n):
        t = k * dt
        if k % est_every == 0:
            v_prev = v_est
            x_enc = quantize(S[Y], enc)
            x_est, v_est, est_state = estimator_step(est_state, x_enc, est)
            if measured:
                meas_state = PlantState(x_enc, v_est)
                a_est = (v_est - v_prev) / est.T if k else 0.0
                meas_sig = actuator_kinematics(meas_state, (v_est, a_est), pp)

        try:
            d0, _ = evaluate(t, S)
            xdd_hold = ratio * d0[YDOT]
            k1, (u, F, T_e, T_d, y_r) = evaluate(t, S)
        except (OverflowError, FloatingPointError, ZeroDivisionError):
            diverged_at = (t, S, k)
            break

        ps = PlantState(S[Y], S[YDOT])
        e = error_coords(ps, ref.at(t), g)
        row = rows[k]
        row[col["t"]] = t
        row[col["y_r"]] = y_r
        row[col["y"]] = S[Y]
        row[col["e_r"]] = S[Y] - y_r
        row[col["u"]] = u
        row[col["F"]] = F
        row[col["zeta"]] = S[ZETA]
        row[col["xi1"]] = e.xi1
        row[col["xi2"]] = e.xi2
        row[col["m_hat"]] = S[MHAT]
        row[col["D_star_hat"]] = S[DHAT]
        row[col["theta_hat_1"]] = S[TH1]
        row[col["theta_hat_2"]] = S[TH2]
        row[col["theta_hat_3"]] = S[TH3]
        row[col["T_e"]] = T_e
        row[col["T_d"]] = T_d
        row[col["x_enc"]] = x_enc
        row[col["x_est"]] = x_est
        row[col["v_est"]] = v_est

        try:
            S_next = integrate(rhs, t, S, dt, scheme, k1=k1)
        except (OverflowError, FloatingPointError, ZeroDivisionError):
            S_next = np.full(8, np.nan)
        if not np.all(np.isfinite(S_next)) or not math.isfinite(u):
            diverged_at = (t + dt, S_next, k + 1)
            break
        S = S_next

    truth = GroundTruth.from_models(fp, pp, ref, dist, g, cfg.initial.zeta)
    n_rows = diverged_at[2] if diverged_at else n
    columns = {c: rows[:n_rows, i].copy() for c, i in col.items()}
    trace = Trace(columns, dt, truth=truth, friction=fp, plant=pp,
                  meta={"name": cfg.name, "signal_source": cfg.sim.signal_source})
    _fill_lyapunov(trace)
    if diverged_at:
        raise DivergenceError(diverged_at[0], diverged_at[1], trace)

    report = check_decrease(trace)
    metrics = compute_metrics(trace, report)
    return trace, metrics, report


def _fill_lyapunov(trace: Trace) -> None:
    c = trace.columns
    if len(c["t"]) == 0:
        c["V"] = c["V_bound"] = np.empty(0)
        return
    ci = certificate_inputs(trace)
    V = np.asarray(lyapunov_value(ci), dtype=float)
    from .stability import psi_rho

    psi, rho = psi_rho(ci.gains, ci.Theta, ci.m, ci.D_star)
    c["V"] = V
    if rho > 0:
        c["V_bound"] = decay_envelope(c["t"] - c["t"][0], float(V[0]), psi, rho)
    else:
        c["V_bound"] = np.full_like(V, np.nan)


def compute_metrics(trace: Trace, report: CertificateReport | None = None) -> RunMetrics:
    c = trace.columns
    th = np.column_stack([c["theta_hat_1"], c["theta_hat_2"], c["theta_hat_3"]])
    sup = {
        "xi1": float(np.max(np.abs(c["xi1"]))),
        "xi2": float(np.max(np.abs(c["xi2"]))),
        "theta_hat_norm": float(np.max(np.linalg.norm(th, axis=1))),
        "m_hat": float(np.max(np.abs(c["m_hat"]))),
        "D_star_hat": float(np.max(np.abs(c["D_star_hat"]))),
    }
    return RunMetrics(
        mse=mse(c["e_r"]),
        max_abs_error=float(np.max(np.abs(c["e_r"]))),
        sup_estimates=sup,
        certify_pass=None if report is None else report.passed,
    )
