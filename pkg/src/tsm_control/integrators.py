"""Fixed-step explicit integrators shared by every time-stepping loop."""

from __future__ import annotations

from typing import Callable, TypeVar

S = TypeVar("S")  # float or np.ndarray

SCHEMES = ("euler", "rk4")


def euler_step(f: Callable[[float, S], S], t: float, y: S, dt: float, k1: S | None = None) -> S:
    if k1 is None:
        k1 = f(t, y)
    return y + dt * k1


def rk4_step(f: Callable[[float, S], S], t: float, y: S, dt: float, k1: S | None = None) -> S:
    """Classical RK4; pass ``k1`` when ``f(t, y)`` is already known."""
    h = 0.5 * dt
    if k1 is None:
        k1 = f(t, y)
    k2 = f(t + h, y + h * k1)
    k3 = f(t + h, y + h * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(
    f: Callable[[float, S], S], t: float, y: S, dt: float, scheme: str = "rk4", k1: S | None = None
) -> S:
    """Advance ``y' = f(t, y)`` by one step of size ``dt``."""
    if scheme == "rk4":
        return rk4_step(f, t, y, dt, k1)
    if scheme == "euler":
        return euler_step(f, t, y, dt, k1)
    raise ValueError(f"unknown integrator {scheme!r}; expected one of {SCHEMES}")
