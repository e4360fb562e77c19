"""Encoder quantisation and a low-noise velocity estimator.

The estimator is a dead-zone tracking loop followed by a filtered
differentiator ``G(s) = s / (tau*s + 1)``::

    e      = x_enc - x_est
    x_est += T * K * dead_zone(e, deadband)
    v_est  = G(z) applied to x_est

The dead-zone hides encoder steps from the loop so the position estimate, and
hence the velocity, is free of the quantisation spikes that plain differencing
produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

FILTER_DISC = ("backward", "tustin")


@dataclass(frozen=True)
class EncoderModel:
    cycles_per_rev: int = 3600

    def __post_init__(self) -> None:
        if self.cycles_per_rev < 1:
            raise ValueError(f"cycles_per_rev must be >= 1, got {self.cycles_per_rev}")

    @property
    def quantization_step(self) -> float:
        # quadrature decoding: four counts per cycle
        return 2.0 * math.pi / (4 * self.cycles_per_rev)

    @property
    def counts_per_rev(self) -> int:
        return 4 * self.cycles_per_rev


@dataclass(frozen=True)
class EstimatorParams:
    T: float = 0.01
    tau: float = 0.2
    K: float = 20.0
    cycles: int = 3600
    filter_disc: str = "backward"

    def __post_init__(self) -> None:
        for name in ("T", "tau", "K"):
            if not getattr(self, name) > 0:
                raise ValueError(f"estimator.{name} must be > 0, got {getattr(self, name)}")
        if not self.K * self.T < 2:
            raise ValueError(f"estimator loop unstable: K*T = {self.K * self.T} must be < 2")
        if self.cycles < 1:
            raise ValueError(f"estimator.cycles must be >= 1, got {self.cycles}")
        if self.filter_disc not in FILTER_DISC:
            raise ValueError(f"estimator.filter_disc must be one of {FILTER_DISC}, got {self.filter_disc!r}")

    @property
    def deadband(self) -> float:
        return math.pi / (2 * self.cycles)

    @property
    def encoder(self) -> EncoderModel:
        return EncoderModel(self.cycles)


class EstimatorState(NamedTuple):
    x_est: float = 0.0
    x_prev: float = 0.0  # filter memory: previous filter input
    v_est: float = 0.0   # filter memory: previous filter output


def quantize(y, enc: EncoderModel):
    """Incremental-encoder reading: ``floor(y/step)*step``."""
    q = enc.quantization_step
    if isinstance(y, np.ndarray):
        return np.floor(y / q) * q
    return math.floor(y / q) * q


def dead_zone(e, deadband: float):
    if deadband < 0:
        raise ValueError(f"deadband must be >= 0, got {deadband}")
    if isinstance(e, np.ndarray):
        return np.where(np.abs(e) <= deadband, 0.0, e - np.sign(e) * deadband)
    if abs(e) <= deadband:
        return 0.0
    return e - math.copysign(deadband, e)


def estimator_step(
    st: EstimatorState, x_encoder: float, p: EstimatorParams
) -> tuple[float, float, EstimatorState]:
    """One sample period; returns ``(x_est, v_est, new_state)``."""
    x_est = st.x_est + p.T * p.K * dead_zone(x_encoder - st.x_est, p.deadband)
    dx = x_est - st.x_prev
    if p.filter_disc == "backward":
        v = (p.tau * st.v_est + dx) / (p.tau + p.T)
    else:
        v = (2.0 * dx + (2.0 * p.tau - p.T) * st.v_est) / (2.0 * p.tau + p.T)
    return x_est, v, EstimatorState(x_est, x_est, v)


def estimate_velocity(
    x_encoder: np.ndarray, p: EstimatorParams, st: EstimatorState | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Run the estimator over a sampled encoder sequence."""
    if st is None:
        x0 = float(x_encoder[0]) if len(x_encoder) else 0.0
        st = EstimatorState(x0, x0, 0.0)
    xs = np.empty(len(x_encoder))
    vs = np.empty(len(x_encoder))
    for k, xe in enumerate(x_encoder):
        xs[k], vs[k], st = estimator_step(st, float(xe), p)
    return xs, vs


def raw_difference(x: np.ndarray, T: float) -> np.ndarray:
    """Backward difference ``(x[k] - x[k-1]) / T``; first sample is 0."""
    v = np.zeros(len(x))
    v[1:] = np.diff(x) / T
    return v
