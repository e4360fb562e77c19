"""Dynamic friction model for a tendon-sheath pair.

The friction force combines a stiffness term shaped by ``phi``, a bounded
Bouc-Wen-type internal state ``zeta``, a viscous term and a constant offset::

    F         = k_x * phi * x_i + k_zeta * zeta + upsilon * xdot_i + F0
    zeta_dot  = rho * (xdot_i - sigma*|xdot_i|*|zeta|^(n-1)*zeta
                       + (sigma - 1)*xdot_i*|zeta|^n)
    phi       = (exp(2 xdot_i) + tanh(x_i) tanh(xddot_i)) / (exp(2 xdot_i) + 1)

All quantities are actuator-side (``x_i`` in rad).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class FrictionParams:
    """Coefficients of the TSM friction model.

    Defaults are the identified values used in the reference simulations.
    """

    k_x: float = 0.01083
    k_zeta: float = 0.14368
    rho: float = 54.658
    sigma: float = 1.58
    n_exp: float = 2.0458
    upsilon: float = 0.02686
    F0: float = 0.0099

    def __post_init__(self) -> None:
        if not self.rho > 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")
        if not self.sigma > 0.5:
            raise ValueError(f"sigma must be > 0.5, got {self.sigma}")
        if not self.n_exp >= 1:
            raise ValueError(f"n_exp must be >= 1, got {self.n_exp}")
        for name in ("k_x", "k_zeta", "rho", "sigma", "n_exp", "upsilon", "F0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class FrictionState:
    zeta: float = 0.0


class ActuatorSignal(NamedTuple):
    """Actuator-side position (rad), velocity (rad/s), acceleration (rad/s^2)."""

    x_i: float
    xdot_i: float
    xddot_i: float


def shape_phi(sig: ActuatorSignal) -> float:
    """Shape factor ``phi`` in overflow-safe form.

    ``exp(2v)/(exp(2v)+1) == (1+tanh v)/2`` and ``1/(exp(2v)+1) == (1-tanh v)/2``,
    so the printed quotient is evaluated without ever forming ``exp(2v)``.
    """
    tv = math.tanh(sig.xdot_i)
    return 0.5 * ((1.0 + tv) + math.tanh(sig.x_i) * math.tanh(sig.xddot_i) * (1.0 - tv))


def shape_phi_naive(sig: ActuatorSignal) -> float:
    """Literal quotient form of ``phi``; overflows for ``xdot_i`` above ~355."""
    e2 = math.exp(2.0 * sig.xdot_i)
    return (e2 + math.tanh(sig.x_i) * math.tanh(sig.xddot_i)) / (e2 + 1.0)


def zeta_rate(state: FrictionState | float, sig: ActuatorSignal, p: FrictionParams) -> float:
    """Time derivative of the internal hysteresis state.

    Evaluated in the regrouped form
    ``rho*(v*(1 - |z|^n) + sigma*|z|^n*(v - |v|*sign(z)))``, identical to the
    model equation, so that ``z = +1`` (``v > 0``) and ``z = -1`` (``v < 0``)
    are fixed points in floating point too. ``|z|^(n-1)*z`` is read as
    ``sign(z)*|z|^n``, which is 0 at ``z = 0``.
    """
    zeta = state.zeta if isinstance(state, FrictionState) else float(state)
    v = sig.xdot_i
    zn = abs(zeta) ** p.n_exp
    if zeta > 0.0:
        slip = v - abs(v)
    elif zeta < 0.0:
        slip = v + abs(v)
    else:
        slip = v
    return p.rho * (v * (1.0 - zn) + p.sigma * zn * slip)


def friction_force(state: FrictionState | float, sig: ActuatorSignal, p: FrictionParams) -> float:
    zeta = state.zeta if isinstance(state, FrictionState) else float(state)
    return p.k_x * shape_phi(sig) * sig.x_i + p.k_zeta * zeta + p.upsilon * sig.xdot_i + p.F0


def hysteresis_loop(
    p: FrictionParams,
    amplitude: float,
    freq: float,
    cycles: int,
    dt: float,
    zeta0: float = 0.0,
    scheme: str = "rk4",
) -> np.ndarray:
    """Drive the friction model with ``x_i = amplitude*sin(2*pi*freq*t)``.

    Returns an ``(N, 2)`` array of ``(x_i, F)`` rows, one per integration step,
    covering ``cycles`` full periods (endpoint included). ``amplitude == 0`` is
    allowed and yields a constant ``F0`` trace.
    """
    from .integrators import step as integrate

    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not amplitude >= 0:
        raise ValueError(f"amplitude must be >= 0, got {amplitude}")
    if not freq > 0:
        raise ValueError(f"freq must be > 0, got {freq}")
    if cycles < 2:
        raise ValueError(f"cycles must be >= 2, got {cycles}")

    w = 2.0 * math.pi * freq
    n_steps = int(round(cycles / (freq * dt)))

    def signal(t: float) -> ActuatorSignal:
        return ActuatorSignal(
            amplitude * math.sin(w * t),
            amplitude * w * math.cos(w * t),
            -amplitude * w * w * math.sin(w * t),
        )

    def rhs(t: float, z: float) -> float:
        return zeta_rate(z, signal(t), p)

    out = np.empty((n_steps + 1, 2))
    z = float(zeta0)
    for k in range(n_steps + 1):
        t = k * dt
        sig = signal(t)
        out[k, 0] = sig.x_i
        out[k, 1] = friction_force(z, sig, p)
        if k < n_steps:
            z = integrate(rhs, t, z, dt, scheme)
    return out
