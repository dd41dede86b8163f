"""Classical fourth-order Runge-Kutta time stepping."""

from __future__ import annotations

from collections.abc import Callable, Iterator
from dataclasses import dataclass

import numpy as np

RHSFunction = Callable[[np.ndarray, float], np.ndarray]


class DivergenceError(ArithmeticError):
    """The state became non-finite."""

    def __init__(self, t: float) -> None:
        super().__init__(f"non-finite state at t = {t:.6g}")
        self.t = t


@dataclass(frozen=True)
class TimeLoopConfig:
    dt: float
    t_final: float
    record_every: int = 100

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError(f"time step must be positive: {self.dt}")
        if self.t_final < 0:
            raise ValueError(f"final time must be non-negative: {self.t_final}")
        if self.record_every < 1:
            raise ValueError(f"record cadence must be positive: {self.record_every}")

    @property
    def n_steps(self) -> int:
        # guard against 3 / 1e-4 = 29999.999...
        return int(round(self.t_final / self.dt))


def rk4_step(u: np.ndarray, rhs: RHSFunction, t: float, dt: float) -> np.ndarray:
    k1 = rhs(u, t)
    k2 = rhs(u + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = rhs(u + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = rhs(u + dt * k3, t + dt)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    u0: np.ndarray,
    rhs: RHSFunction,
    config: TimeLoopConfig,
    *,
    t0: float = 0.0,
    coordinates: np.ndarray | None = None,
) -> Iterator[tuple[int, float, np.ndarray]]:
    """Yield ``(step, t, u)`` at step 0, every *record_every* steps and the end.

    If *coordinates* is an invertible matrix :math:`V`, the stepper advances
    :math:`a` with :math:`u = V a` (applied per row) and yields :math:`u`.
    Runge-Kutta methods commute with linear changes of variables, so only
    the accumulation of rounding in the stored state differs.

    Raises :class:`DivergenceError` as soon as the state is non-finite.
    """
    if coordinates is not None:
        v, v_inv = coordinates, np.linalg.inv(coordinates)
        inner = integrate(
            u0 @ v_inv.T,
            lambda a, t: rhs(a @ v.T, t) @ v_inv.T,
            config,
            t0=t0,
        )
        for step, t, a in inner:
            yield step, t, a @ v.T
        return

    u = u0
    n = config.n_steps
    yield 0, t0, u

    for step in range(1, n + 1):
        t = t0 + (step - 1) * config.dt
        u = rk4_step(u, rhs, t, config.dt)
        t = t0 + step * config.dt
        if step % config.record_every == 0 or step == n:
            if not np.all(np.isfinite(u)):
                raise DivergenceError(t)
            yield step, t, u
