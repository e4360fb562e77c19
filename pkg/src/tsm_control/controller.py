"""Adaptive backstepping position controller with sigma-modified update laws.

Error coordinates::

    xi1 = y - y_r
    xi2 = y' - y_r' + alpha_v1*xi1          (so xi1' = xi2 - alpha_v1*xi1)

Control::

    ubar = y_r'' - alpha_v1*xi1' - xi1 - alpha_v2*xi2 - Theta_hat . varphi
    u    = (r_i/r_o) * (m_hat*ubar - D_hat*tanh(xi2/epsilon))

Adaptation::

    Theta_hat' = k_Theta*xi2*varphi - sigma1*Theta_hat
    m_hat'     = -k_m*xi2*ubar      - sigma2*m_hat
    D_hat'     = k_D*xi2*tanh(xi2/epsilon) - sigma3*D_hat
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import NamedTuple

import numpy as np

from .friction import ActuatorSignal
from .integrators import step as integrate
from .plant import PlantParams, PlantState, regressor


@dataclass(frozen=True)
class ControllerGains:
    alpha_v1: float = 10.0
    alpha_v2: float = 15.0
    k_theta: float = 0.5
    k_m: float = 0.5
    k_D: float = 1.0
    sigma1: float = 0.01
    sigma2: float = 0.01
    sigma3: float = 0.01
    epsilon: float = 0.05

    def __post_init__(self) -> None:
        # strict positivity is required by the stability argument, but
        # certification tests need sabotaged gains, so only epsilon is enforced
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise ValueError(f"gain {f.name} must be finite")

    @property
    def all_positive(self) -> bool:
        return all(getattr(self, f.name) > 0 for f in fields(self))


@dataclass(frozen=True)
class AdaptiveState:
    Theta_hat: np.ndarray = field(default_factory=lambda: np.zeros(3))
    m_hat: float = 0.0
    D_star_hat: float = 0.0

    def to_array(self) -> np.ndarray:
        return np.array([*np.asarray(self.Theta_hat, dtype=float), self.m_hat, self.D_star_hat])

    @classmethod
    def from_array(cls, a: np.ndarray) -> AdaptiveState:
        return cls(np.array(a[:3], dtype=float), float(a[3]), float(a[4]))


@dataclass(frozen=True)
class ReferenceTrajectory:
    """``y_r(t) = amplitude * sin(omega * t)``."""

    amplitude: float = 0.4
    omega: float = 0.4 * math.pi

    def at(self, t: float) -> tuple[float, float, float]:
        a, w = self.amplitude, self.omega
        s, c = math.sin(w * t), math.cos(w * t)
        return a * s, a * w * c, -a * w * w * s


class ErrorCoordinates(NamedTuple):
    xi1: float
    xi2: float
    xi1_dot: float


def error_coords(s: PlantState, ref: tuple[float, float, float], g: ControllerGains) -> ErrorCoordinates:
    y_r, yd_r, _ = ref
    xi1 = s.y - y_r
    xi2 = s.ydot - yd_r + g.alpha_v1 * xi1
    return ErrorCoordinates(xi1, xi2, xi2 - g.alpha_v1 * xi1)


def virtual_control(
    e: ErrorCoordinates,
    ref: tuple[float, float, float],
    varphi: np.ndarray,
    a: AdaptiveState,
    g: ControllerGains,
) -> float:
    th = a.Theta_hat
    theta_phi = th[0] * varphi[0] + th[1] * varphi[1] + th[2] * varphi[2]
    return ref[2] - g.alpha_v1 * e.xi1_dot - e.xi1 - g.alpha_v2 * e.xi2 - theta_phi


def control_input(
    ubar: float, e: ErrorCoordinates, a: AdaptiveState, g: ControllerGains, p: PlantParams
) -> float:
    return (p.r_i / p.r_o) * (a.m_hat * ubar - a.D_star_hat * math.tanh(e.xi2 / g.epsilon))


def adapt_rates(
    a: AdaptiveState, e: ErrorCoordinates, varphi: np.ndarray, ubar: float, g: ControllerGains
) -> tuple[np.ndarray, float, float]:
    """Return ``(Theta_hat', m_hat', D_star_hat')``."""
    xi2 = e.xi2
    theta_dot = g.k_theta * xi2 * np.asarray(varphi, dtype=float) - g.sigma1 * np.asarray(a.Theta_hat)
    m_dot = -g.k_m * xi2 * ubar - g.sigma2 * a.m_hat
    d_dot = g.k_D * xi2 * math.tanh(xi2 / g.epsilon) - g.sigma3 * a.D_star_hat
    return theta_dot, m_dot, d_dot


def control_law(
    s: PlantState,
    ref: tuple[float, float, float],
    sig: ActuatorSignal,
    a: AdaptiveState,
    g: ControllerGains,
    p: PlantParams,
) -> tuple[float, np.ndarray, ErrorCoordinates, np.ndarray, float]:
    """Evaluate the full law at one instant.

    Returns ``(u, adaptive_rate_vector, error_coords, varphi, ubar)``; the rate
    vector is laid out like :meth:`AdaptiveState.to_array`.
    """
    e = error_coords(s, ref, g)
    varphi = regressor(sig, s)
    ubar = virtual_control(e, ref, varphi, a, g)
    u = control_input(ubar, e, a, g, p)
    th_dot, m_dot, d_dot = adapt_rates(a, e, varphi, ubar, g)
    rates = np.array([th_dot[0], th_dot[1], th_dot[2], m_dot, d_dot])
    return u, rates, e, varphi, ubar


def controller_step(
    s: PlantState,
    ref: ReferenceTrajectory,
    t: float,
    sig: ActuatorSignal,
    a: AdaptiveState,
    g: ControllerGains,
    p: PlantParams,
    dt: float,
    scheme: str = "rk4",
) -> tuple[float, AdaptiveState]:
    """Compute ``u`` at ``t`` and advance the estimates over ``dt``.

    Plant measurements are held over the step; the reference is evaluated at
    the integrator's stage times.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    u, *_ = control_law(s, ref.at(t), sig, a, g, p)

    def rhs(tau: float, x: np.ndarray) -> np.ndarray:
        return control_law(s, ref.at(tau), sig, AdaptiveState.from_array(x), g, p)[1]

    nxt = integrate(rhs, t, a.to_array(), dt, scheme)
    if not (math.isfinite(u) and np.all(np.isfinite(nxt))):
        raise FloatingPointError(f"controller state became non-finite at t={t}")
    return u, AdaptiveState.from_array(nxt)
