"""Gauss-Legendre and Gauss-Lobatto-Legendre rules on :math:`[-1, 1]`."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

MAX_NEWTON_ITERATIONS = 100
NEWTON_TOLERANCE = 1.0e-14


class QuadratureKind(enum.Enum):
    GL = "GL"
    GLL = "GLL"


class QuadratureError(RuntimeError):
    """Raised when the node iteration fails to converge."""


@dataclass(frozen=True)
class QuadratureRule:
    kind: QuadratureKind
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def exactness(self) -> int:
        """Highest polynomial degree integrated exactly."""
        if self.kind is QuadratureKind.GL:
            return 2 * self.n - 1
        return 2 * self.n - 3

    @property
    def label(self) -> str:
        return f"{self.kind.value}({self.n})"

    def integrate(self, values: np.ndarray) -> float:
        return float(self.weights @ values)


def legendre_eval(p: int, x):
    """Return :math:`(P_p(x), P_p'(x))` using the three-term recurrence.

    Works elementwise on arrays. The derivative uses
    :math:`(1 - x^2) P_p' = p (P_{p-1} - x P_p)` away from the endpoints
    and :math:`P_p'(\\pm 1) = (\\pm 1)^{p - 1} p (p + 1) / 2` at them.
    """
    if p < 0:
        raise ValueError(f"degree must be non-negative: {p}")

    x = np.asarray(x, dtype=np.float64)
    p_prev = np.ones_like(x)
    if p == 0:
        return p_prev, np.zeros_like(x)

    p_curr = x.copy()
    dp_prev = np.zeros_like(x)
    dp_curr = np.ones_like(x)
    for k in range(1, p):
        p_next = ((2 * k + 1) * x * p_curr - k * p_prev) / (k + 1)
        # P'_{k+1} = P'_{k-1} + (2k + 1) P_k is exact at the endpoints too
        dp_next = dp_prev + (2 * k + 1) * p_curr
        p_prev, p_curr = p_curr, p_next
        dp_prev, dp_curr = dp_curr, dp_next

    return p_curr, dp_curr


def _legendre_second_derivative(p: int, x: np.ndarray) -> np.ndarray:
    # Legendre ODE: (1 - x^2) P'' = 2 x P' - p (p + 1) P
    value, deriv = legendre_eval(p, x)
    return (2.0 * x * deriv - p * (p + 1) * value) / (1.0 - x**2)


def _symmetrize(nodes: np.ndarray) -> np.ndarray:
    return 0.5 * (nodes - nodes[::-1])


def gauss_legendre(n: int) -> QuadratureRule:
    """Gauss-Legendre rule with *n* points (exact up to degree :math:`2n - 1`)."""
    if n < 1:
        raise ValueError(f"Gauss-Legendre needs at least one point: {n}")

    # Chebyshev-Gauss initial guesses, ascending
    k = np.arange(n)
    x = -np.cos((2 * k + 1) * np.pi / (2 * n))

    for _ in range(MAX_NEWTON_ITERATIONS):
        value, deriv = legendre_eval(n, x)
        dx = value / deriv
        x = x - dx
        if np.max(np.abs(dx)) < NEWTON_TOLERANCE:
            break
    else:
        raise QuadratureError(f"Gauss-Legendre({n}) did not converge")

    x = _symmetrize(x)
    _, deriv = legendre_eval(n, x)
    weights = 2.0 / ((1.0 - x**2) * deriv**2)

    return QuadratureRule(QuadratureKind.GL, x, weights)


def gauss_lobatto_legendre(n: int) -> QuadratureRule:
    """Gauss-Lobatto-Legendre rule with *n* points (exact up to :math:`2n - 3`)."""
    if n < 2:
        raise ValueError(f"Gauss-Lobatto-Legendre needs at least two points: {n}")

    p = n - 1
    x = -np.cos(np.pi * np.arange(n) / p)

    interior = x[1:-1]
    for _ in range(MAX_NEWTON_ITERATIONS):
        if interior.size == 0:
            break
        _, deriv = legendre_eval(p, interior)
        dx = deriv / _legendre_second_derivative(p, interior)
        interior = interior - dx
        if np.max(np.abs(dx)) < NEWTON_TOLERANCE:
            break
    else:
        raise QuadratureError(f"Gauss-Lobatto-Legendre({n}) did not converge")

    x = np.concatenate([[-1.0], interior, [1.0]])
    x = _symmetrize(x)
    x[0], x[-1] = -1.0, 1.0

    value, _ = legendre_eval(p, x)
    weights = 2.0 / (n * p * value**2)

    return QuadratureRule(QuadratureKind.GLL, x, weights)


def make_rule(kind: QuadratureKind | str, n: int) -> QuadratureRule:
    kind = QuadratureKind(kind)
    if kind is QuadratureKind.GL:
        return gauss_legendre(n)
    return gauss_lobatto_legendre(n)
