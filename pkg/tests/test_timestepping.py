from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from esfr_split.timestepping import DivergenceError, TimeLoopConfig, integrate, rk4_step


def test_zero_rhs_leaves_state():
    u = np.array([1.0, -2.0, 3.0])
    assert np.array_equal(rk4_step(u, lambda v, t: np.zeros_like(v), 0.0, 0.1), u)


def test_decay_one_step():
    # exp(-0.1) Taylor series through dt^4 / 24
    dt = 0.1
    expected = 1 - dt + dt**2 / 2 - dt**3 / 6 + dt**4 / 24
    result = rk4_step(np.array([1.0]), lambda v, t: -v, 0.0, dt)[0]
    assert result == pytest.approx(expected, rel=1e-15)
    assert result == pytest.approx(0.9048375, abs=1e-7)


def test_constant_state_under_advection_surrogate():
    # periodic upwind difference of a constant is zero
    u = np.full(16, 2.5)
    rhs = lambda v, t: -(v - np.roll(v, 1))  # noqa: E731
    assert np.array_equal(rk4_step(u, rhs, 0.0, 0.01), u)


def test_fourth_order_local_truncation():
    # u' = cos(t) u, u(0) = 1, exact exp(sin t)
    rhs = lambda v, t: math.cos(t) * v  # noqa: E731
    errors = []
    for dt in (0.1, 0.05):
        u = rk4_step(np.array([1.0]), rhs, 0.3, dt)[0]
        errors.append(abs(u - math.exp(math.sin(0.3 + dt) - math.sin(0.3))))
    assert errors[0] / errors[1] == pytest.approx(32.0, rel=0.2)


def test_stage_times():
    seen = []

    def rhs(v, t):
        seen.append(t)
        return np.zeros_like(v)

    rk4_step(np.zeros(1), rhs, 1.0, 0.5)
    assert seen == [1.0, 1.25, 1.25, 1.5]


def test_time_dependent_rhs_exact_for_cubic():
    # u' = t^3 integrates exactly with Simpson-type weights
    u = rk4_step(np.array([0.0]), lambda v, t: np.array([t**3]), 0.0, 1.0)
    assert u[0] == pytest.approx(0.25, rel=1e-15)


def test_integrate_records():
    cfg = TimeLoopConfig(dt=0.1, t_final=1.0, record_every=3)
    steps = [(s, t) for s, t, _ in integrate(np.array([1.0]), lambda v, t: -v, cfg)]
    assert [s for s, _ in steps] == [0, 3, 6, 9, 10]
    assert steps[-1][1] == pytest.approx(1.0)


@given(n=st.integers(1, 6))
def test_integrate_coordinates_equivalent(n):
    rng = np.random.default_rng(n)
    a = rng.standard_normal((n, n))
    u0 = rng.standard_normal((3, n))
    coords = np.eye(n) + 0.1 * rng.standard_normal((n, n))
    cfg = TimeLoopConfig(dt=0.01, t_final=0.2, record_every=5)
    rhs = lambda v, t: v @ a.T  # noqa: E731

    plain = [u for _, _, u in integrate(u0, rhs, cfg)]
    mapped = [u for _, _, u in integrate(u0, rhs, cfg, coordinates=coords)]
    assert len(plain) == len(mapped)
    for x, y in zip(plain, mapped):
        assert np.max(np.abs(x - y)) <= 1e-11 * max(1.0, np.max(np.abs(x)))


def test_divergence_detected():
    cfg = TimeLoopConfig(dt=1.0, t_final=1000.0, record_every=1)
    with pytest.raises(DivergenceError) as excinfo, np.errstate(over="ignore", invalid="ignore"):
        for _ in integrate(np.array([1.0]), lambda v, t: v * v * 1e100, cfg):
            pass
    assert excinfo.value.t > 0


def test_step_count_rounding():
    assert TimeLoopConfig(1e-4, 3.0).n_steps == 30000
    assert TimeLoopConfig(1e-4, 1.0).n_steps == 10000


def test_invalid_time_loops():
    with pytest.raises(ValueError):
        TimeLoopConfig(0.0, 1.0)
    with pytest.raises(ValueError):
        TimeLoopConfig(0.1, -1.0)
    with pytest.raises(ValueError):
        TimeLoopConfig(0.1, 1.0, record_every=0)
