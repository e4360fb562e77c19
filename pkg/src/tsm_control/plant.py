"""Distal-joint dynamics driven through the tendon-sheath transmission.

Torque balance at the joint::

    m*y'' + c*y' = r_o*(u/r_i - F) - T_e - T_d

and its linear-in-parameters rewrite::

    y'' = ((r_o/r_i)*u + D)/m + Theta . varphi
    varphi = [phi*x_i, xdot_i, y']
    D      = -r_o*(k_zeta*zeta + F0) - T_e - T_d
    Theta  = [-r_o*k_x/m, -r_o*upsilon/m, -c/m]
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .friction import ActuatorSignal, FrictionParams, shape_phi


@dataclass(frozen=True)
class PlantParams:
    m: float = 0.0349
    c: float = 0.0105
    r_i: float = 0.025
    r_o: float = 0.025
    k_e: float = 0.4185

    def __post_init__(self) -> None:
        if not self.m > 0:
            raise ValueError(f"m must be > 0, got {self.m}")
        if not self.r_i > 0 or not self.r_o > 0:
            raise ValueError("pulley radii r_i and r_o must be > 0")
        if not self.c >= 0:
            raise ValueError(f"c must be >= 0, got {self.c}")
        if not self.k_e >= 0:
            raise ValueError(f"k_e must be >= 0, got {self.k_e}")

    @property
    def ratio(self) -> float:
        """Joint-to-actuator angle ratio ``r_o / r_i``."""
        return self.r_o / self.r_i


class PlantState(NamedTuple):
    y: float = 0.0
    ydot: float = 0.0


@dataclass(frozen=True)
class DisturbanceModel:
    """``T_d(t) = amplitude * sin(omega * t)``."""

    amplitude: float = 0.2
    omega: float = 0.2 * math.pi

    def __post_init__(self) -> None:
        if not self.amplitude >= 0:
            raise ValueError(f"disturbance amplitude must be >= 0, got {self.amplitude}")


@dataclass(frozen=True)
class RegressorDecomposition:
    varphi: np.ndarray
    D: float
    Theta: np.ndarray


def environment_torque(y: float, k_e: float) -> float:
    return k_e * y


def disturbance_torque(t: float, d: DisturbanceModel) -> float:
    return d.amplitude * math.sin(d.omega * t)


def plant_derivative(
    s: PlantState, u: float, F: float, T_e: float, T_d: float, p: PlantParams
) -> tuple[float, float]:
    """Return ``(y', y'')`` of the joint."""
    if not p.m > 0:
        raise ValueError(f"m must be > 0, got {p.m}")
    ydd = (p.r_o * (u / p.r_i - F) - T_e - T_d - p.c * s.ydot) / p.m
    return s.ydot, ydd


def regressor(sig: ActuatorSignal, s: PlantState) -> np.ndarray:
    return np.array([shape_phi(sig) * sig.x_i, sig.xdot_i, s.ydot])


def actuator_kinematics(s: PlantState, sdot: tuple[float, float], p: PlantParams) -> ActuatorSignal:
    """Rigid-transmission map from joint motion to actuator-side motion.

    ``sdot`` is ``(y', y'')``; every component is scaled by ``r_o / r_i``.
    """
    k = p.ratio
    return ActuatorSignal(k * s.y, k * sdot[0], k * sdot[1])


def true_theta(fp: FrictionParams, p: PlantParams) -> np.ndarray:
    return np.array([-p.r_o * fp.k_x / p.m, -p.r_o * fp.upsilon / p.m, -p.c / p.m])


def lumped_disturbance(zeta: float, T_e: float, T_d: float, fp: FrictionParams, p: PlantParams) -> float:
    return -p.r_o * (fp.k_zeta * zeta + fp.F0) - T_e - T_d


def decompose(
    sig: ActuatorSignal,
    s: PlantState,
    zeta: float,
    T_e: float,
    T_d: float,
    fp: FrictionParams,
    p: PlantParams,
) -> RegressorDecomposition:
    return RegressorDecomposition(
        varphi=regressor(sig, s),
        D=lumped_disturbance(zeta, T_e, T_d, fp, p),
        Theta=true_theta(fp, p),
    )
