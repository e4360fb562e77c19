"""Lyapunov certificate for the closed loop, evaluated on simulated traces.

With true parameters known (simulation only), the energy

    V = xi1^2/2 + xi2^2/2 + |Theta~|^2/(2 k_Theta) + m~^2/(2 m k_m) + D~^2/(2 m k_D)

satisfies ``V' <= -varrho*V + Psi`` and therefore

    V(t) <= (V(0) - Psi/varrho) * exp(-varrho t) + Psi/varrho

which bounds the tracking error asymptotically by ``sqrt(2 Psi / varrho)``.
The monitor checks the integrated inequality, never a numerical ``V'``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .controller import ControllerGains, ReferenceTrajectory
from .friction import FrictionParams
from .plant import DisturbanceModel, PlantParams, lumped_disturbance, true_theta

if TYPE_CHECKING:
    from .trace import Trace

TANH_CONSTANT = 0.2785
# safety factor on the environment torque when sizing D*
ENV_MARGIN = 1.5


@dataclass(frozen=True)
class GroundTruth:
    """True plant quantities that the adaptive laws estimate."""

    Theta: np.ndarray
    m: float
    D_star: float
    gains: ControllerGains

    @classmethod
    def from_models(
        cls,
        fp: FrictionParams,
        pp: PlantParams,
        ref: ReferenceTrajectory,
        dist: DisturbanceModel,
        gains: ControllerGains,
        zeta0: float = 0.0,
    ) -> GroundTruth:
        return cls(true_theta(fp, pp), pp.m, disturbance_bound(fp, pp, ref, dist, zeta0), gains)


@dataclass(frozen=True)
class CertificateInputs:
    Theta: np.ndarray
    m: float
    D_star: float
    gains: ControllerGains
    Theta_hat: np.ndarray
    m_hat: float | np.ndarray
    D_star_hat: float | np.ndarray
    xi1: float | np.ndarray
    xi2: float | np.ndarray

    @property
    def Theta_tilde(self) -> np.ndarray:
        return np.asarray(self.Theta) - np.asarray(self.Theta_hat)

    @property
    def m_tilde(self):
        return self.m - np.asarray(self.m_hat)

    @property
    def D_star_tilde(self):
        return self.D_star - np.asarray(self.D_star_hat)


@dataclass
class CertificateReport:
    t: np.ndarray
    V: np.ndarray
    bound: np.ndarray
    Psi: float
    rho_cert: float
    ultimate_bound: float
    tolerance: float
    violations: list[tuple[float, float, float]] = field(default_factory=list)
    final_error_max: float = float("nan")
    D_realized_max: float = float("nan")
    D_star: float = float("nan")

    @property
    def bound_holds(self) -> bool:
        return not self.violations

    @property
    def error_inside(self) -> bool:
        return self.final_error_max <= self.ultimate_bound

    @property
    def passed(self) -> bool:
        return self.bound_holds and self.error_inside

    def to_dict(self, series: bool = False) -> dict:
        d = {
            "Psi": self.Psi,
            "rho_cert": self.rho_cert,
            "ultimate_bound": self.ultimate_bound,
            "tolerance": self.tolerance,
            "V0": float(self.V[0]) if len(self.V) else float("nan"),
            "V_max": float(np.max(self.V)) if len(self.V) else float("nan"),
            "n_violations": len(self.violations),
            "violations": [list(v) for v in self.violations[:100]],
            "final_error_max": self.final_error_max,
            "D_realized_max": self.D_realized_max,
            "D_star": self.D_star,
            "bound_holds": self.bound_holds,
            "error_inside": self.error_inside,
            "passed": self.passed,
        }
        if series:
            d["t"] = self.t.tolist()
            d["V"] = self.V.tolist()
            d["bound"] = self.bound.tolist()
        return d


def disturbance_bound(
    fp: FrictionParams,
    pp: PlantParams,
    ref: ReferenceTrajectory,
    dist: DisturbanceModel,
    zeta0: float = 0.0,
) -> float:
    """Concrete ``D*`` dominating ``|D|`` along well-tracked trajectories."""
    zeta_max = max(abs(zeta0), 1.0)
    return (
        pp.r_o * (abs(fp.k_zeta) * zeta_max + abs(fp.F0))
        + pp.k_e * ENV_MARGIN * abs(ref.amplitude)
        + dist.amplitude
    )


def lyapunov_value(ci: CertificateInputs):
    """Lyapunov energy; vectorises over leading axes of the estimate arrays."""
    if not ci.m > 0:
        raise ValueError(f"m must be > 0, got {ci.m}")
    g = ci.gains
    th = ci.Theta_tilde
    return (
        0.5 * np.asarray(ci.xi1) ** 2
        + 0.5 * np.asarray(ci.xi2) ** 2
        + np.sum(th * th, axis=-1) / (2.0 * g.k_theta)
        + ci.m_tilde**2 / (2.0 * ci.m * g.k_m)
        + ci.D_star_tilde**2 / (2.0 * ci.m * g.k_D)
    )


def psi_rho(g: ControllerGains, Theta: np.ndarray, m: float, D_star: float) -> tuple[float, float]:
    Theta = np.asarray(Theta, dtype=float)
    psi = (
        g.sigma1 / (2.0 * g.k_theta) * float(Theta @ Theta)
        + TANH_CONSTANT * g.epsilon * D_star / m
        + g.sigma2 / (2.0 * g.k_m) * m
        + g.sigma3 / (2.0 * m * g.k_D) * D_star**2
    )
    rho = min(2.0 * g.alpha_v1, 2.0 * g.alpha_v2, g.sigma1, g.sigma2, g.sigma3)
    return psi, rho


def ultimate_bound(psi: float, rho: float) -> float:
    if not rho > 0:
        raise ValueError(f"decay rate must be > 0, got {rho}")
    return math.sqrt(2.0 * psi / rho)


def decay_envelope(t: np.ndarray, V0: float, psi: float, rho: float) -> np.ndarray:
    return (V0 - psi / rho) * np.exp(-rho * np.asarray(t)) + psi / rho


def tanh_inequality_check(xi2, epsilon: float) -> float:
    """Max over samples of ``|x| - x*tanh(x/eps) - 0.2785*eps`` (should be <= 0)."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    x = np.asarray(xi2, dtype=float)
    return float(np.max(np.abs(x) - x * np.tanh(x / epsilon) - TANH_CONSTANT * epsilon))


def certificate_inputs(trace: Trace) -> CertificateInputs:
    if trace.truth is None:
        raise ValueError("trace carries no ground truth; certification needs true parameters")
    c = trace.columns
    th_hat = np.column_stack([c["theta_hat_1"], c["theta_hat_2"], c["theta_hat_3"]])
    tr = trace.truth
    return CertificateInputs(
        Theta=tr.Theta, m=tr.m, D_star=tr.D_star, gains=tr.gains,
        Theta_hat=th_hat, m_hat=c["m_hat"], D_star_hat=c["D_star_hat"],
        xi1=c["xi1"], xi2=c["xi2"],
    )


def young_gaps(trace: Trace) -> np.ndarray:
    """Per-sample slack of the three leakage-term inequalities (columns >= 0)."""
    ci = certificate_inputs(trace)
    g, m = ci.gains, ci.m
    th_t = ci.Theta_tilde
    th_hat = np.asarray(ci.Theta_hat)
    theta = np.asarray(ci.Theta)
    lhs1 = g.sigma1 * np.sum(th_t * th_hat, axis=-1) / g.k_theta
    rhs1 = g.sigma1 * float(theta @ theta) / (2 * g.k_theta) - g.sigma1 * np.sum(th_t * th_t, axis=-1) / (2 * g.k_theta)
    m_t, m_hat = ci.m_tilde, np.asarray(ci.m_hat)
    lhs2 = g.sigma2 * m_t * m_hat / (m * g.k_m)
    rhs2 = g.sigma2 * m**2 / (2 * m * g.k_m) - g.sigma2 * m_t**2 / (2 * m * g.k_m)
    d_t, d_hat = ci.D_star_tilde, np.asarray(ci.D_star_hat)
    lhs3 = g.sigma3 * d_t * d_hat / (m * g.k_D)
    rhs3 = g.sigma3 * ci.D_star**2 / (2 * m * g.k_D) - g.sigma3 * d_t**2 / (2 * m * g.k_D)
    return np.column_stack([rhs1 - lhs1, rhs2 - lhs2, rhs3 - lhs3])


def check_decrease(trace: Trace, final_window: float = 1.0) -> CertificateReport:
    """Verify the integrated Lyapunov envelope at every sample of ``trace``.

    A sample violates when ``V > bound + tol`` with
    ``tol = 1e-6 + 1e-3*V(0)``. If the gains give a non-positive decay rate
    the certificate does not apply and every sample is reported.
    """
    ci = certificate_inputs(trace)
    t = np.asarray(trace.columns["t"])
    V = np.asarray(lyapunov_value(ci), dtype=float)
    psi, rho = psi_rho(ci.gains, ci.Theta, ci.m, ci.D_star)
    if rho > 0:
        bound = decay_envelope(t - t[0], float(V[0]), psi, rho)
        radius = ultimate_bound(psi, rho)
    else:
        # gains outside the certified region: no envelope exists
        bound = np.full_like(V, np.nan)
        radius = float("nan")
    tol = 1e-6 + 1e-3 * float(V[0])
    bad = np.nonzero(~(V <= bound + tol))[0]
    violations = [(float(t[k]), float(V[k]), float(bound[k])) for k in bad]

    e_r = np.abs(np.asarray(trace.columns["e_r"]))
    tail = t >= t[-1] - final_window
    final_err = float(np.max(e_r[tail])) if np.any(tail) else float("nan")

    d_max = float("nan")
    if trace.friction is not None and trace.plant is not None:
        c = trace.columns
        D = lumped_disturbance(c["zeta"], c["T_e"], c["T_d"], trace.friction, trace.plant)
        d_max = float(np.max(np.abs(D)))

    return CertificateReport(
        t=t, V=V, bound=bound, Psi=psi, rho_cert=rho, ultimate_bound=radius,
        tolerance=tol, violations=violations, final_error_max=final_err,
        D_realized_max=d_max, D_star=ci.D_star,
    )


__all__ = [
    "CertificateInputs", "CertificateReport", "GroundTruth", "TANH_CONSTANT",
    "check_decrease", "decay_envelope", "disturbance_bound", "lyapunov_value",
    "psi_rho", "tanh_inequality_check", "ultimate_bound", "young_gaps",
]
