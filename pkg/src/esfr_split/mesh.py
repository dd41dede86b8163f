"""Uniform periodic one-dimensional mesh."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Mesh1D:
    x_left: float
    x_right: float
    n_elements: int

    def __post_init__(self) -> None:
        if self.n_elements < 1:
            raise ValueError(f"need at least one element: {self.n_elements}")
        if not self.x_right > self.x_left:
            raise ValueError(f"empty domain: [{self.x_left}, {self.x_right}]")

    @property
    def length(self) -> float:
        return self.x_right - self.x_left

    @property
    def dx(self) -> float:
        return self.length / self.n_elements

    @property
    def J(self) -> float:
        """Constant Jacobian determinant of the affine element map."""
        return self.dx / 2.0

    @property
    def element_left(self) -> np.ndarray:
        return self.x_left + self.dx * np.arange(self.n_elements)

    def map_to_physical(self, m, xi):
        """Physical coordinate of reference point *xi* in element *m*.

        *m* may be an integer or an index array; for arrays the result has
        shape ``(len(m), len(xi))``.
        """
        m_arr = np.asarray(m)
        if np.any(m_arr < 0) or np.any(m_arr >= self.n_elements):
            raise IndexError(f"element index out of range: {m}")

        xi = np.asarray(xi, dtype=np.float64)
        left = self.x_left + m_arr * self.dx
        if m_arr.ndim == 0:
            return left + (xi + 1.0) * self.J
        return left[:, None] + (xi[None, :] + 1.0) * self.J

    def physical_nodes(self, xi: np.ndarray) -> np.ndarray:
        """Physical coordinates of *xi* in every element, ``(n_elements, len(xi))``."""
        return self.map_to_physical(np.arange(self.n_elements), xi)

    def neighbor(self, m: int, side: str) -> int:
        if side == "left":
            return (m - 1) % self.n_elements
        if side == "right":
            return (m + 1) % self.n_elements
        raise ValueError(f"unknown side: {side!r}")
