"""Energy, conservation and error diagnostics."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from esfr_split.operators import OperatorSet, lagrange_matrix
from esfr_split.quadrature import gauss_legendre
from esfr_split.schemes import SolutionField

#: extra points over p used when measuring errors
ERROR_OVERINTEGRATION = 10


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    energy: float
    conserved: float
    l2_error: float | None = None


def _sobolev_inner(field: SolutionField, a: np.ndarray, b: np.ndarray) -> float:
    # K_m is rank one; expanding it avoids cancellation against its large
    # entries when c is large
    ops = field.ops
    mass = np.einsum("mi,ij,mj->", a, ops.M_m, b)
    correction = ops.k_scale * np.dot(a @ ops.dp_row, b @ ops.dp_row)
    return float(mass + correction)


def energy(field: SolutionField) -> float:
    r"""Broken Sobolev energy :math:`\sum_m \hat{u}_m (M_m + K_m) \hat{u}_m^T`."""
    return _sobolev_inner(field, field.u_hat, field.u_hat)


def energy_rate(field: SolutionField, du_hat: np.ndarray) -> float:
    r""":math:`\frac{d}{dt} E = 2 \sum_m \hat{u}_m (M_m + K_m) \dot{\hat{u}}_m^T`."""
    return 2.0 * _sobolev_inner(field, field.u_hat, du_hat)


def modal_energy(ops: OperatorSet, a: np.ndarray) -> float:
    """:func:`energy` of the state with orthonormal modal coefficients *a*."""
    return ops.modal.inner(a, a)


def modal_energy_rate(ops: OperatorSet, a: np.ndarray, da: np.ndarray) -> float:
    """:func:`energy_rate` in orthonormal modal coordinates.

    With a rate from :meth:`~esfr_split.schemes.Discretization.rhs_modal`
    this stays at rounding level for any :math:`c`, while the nodal
    evaluation loses digits in proportion to :math:`c`.
    """
    return 2.0 * ops.modal.inner(a, da)


def conserved_quantity(field: SolutionField) -> float:
    r""":math:`\sum_m \hat{1} (M_m + K_m) \hat{u}_m^T` with :math:`\hat{1}` all ones.

    :math:`K_m \hat{1} = 0` since the p-th derivative of a constant
    vanishes, so only the mass matrix contributes.
    """
    return float(np.sum(field.u_hat @ field.ops.M_m))


def conservation_rate(field: SolutionField, du_hat: np.ndarray) -> float:
    return float(np.sum(du_hat @ field.ops.M_m))


def l2_error(
    field: SolutionField,
    exact: Callable[[np.ndarray, float], np.ndarray],
    solution_nodes: np.ndarray,
    t: float | None = None,
) -> float:
    """L2 error against *exact* on a GL(p + 10) rule in every element.

    *solution_nodes* are the Lagrange construction points of the basis.
    """
    if t is None:
        t = field.t

    p = field.ops.p
    rule = gauss_legendre(p + ERROR_OVERINTEGRATION)
    interp = lagrange_matrix(solution_nodes, rule.nodes)

    x = field.mesh.physical_nodes(rule.nodes)
    diff = field.u_hat @ interp.T - exact(x, t)
    return math.sqrt(float(np.sum(diff**2 * rule.weights)) * field.mesh.J)


def ooa_slopes(errors: Sequence[float], dxs: Sequence[float]) -> list[float]:
    """Observed orders between consecutive refinements; NaN if undefined."""
    if len(errors) != len(dxs):
        raise ValueError("errors and dxs must have the same length")
    if len(errors) < 2:
        raise ValueError("need at least two refinement levels")

    slopes = []
    for (e0, e1), (h0, h1) in zip(zip(errors, errors[1:]), zip(dxs, dxs[1:])):
        if e0 <= 0 or e1 <= 0 or not (math.isfinite(e0) and math.isfinite(e1)):
            slopes.append(math.nan)
        else:
            slopes.append(math.log(e0 / e1) / math.log(h0 / h1))
    return slopes


def is_monotone_nonincreasing(values: Sequence[float], tol: float) -> bool:
    """True if no sample exceeds the running minimum by more than *tol*.

    Since the running minimum is at most every earlier sample, this is the
    same as no sample exceeding *any* earlier sample by more than *tol*.
    """
    running = math.inf
    for v in values:
        if not math.isfinite(v) or v > running + tol:
            return False
        running = min(running, v)
    return True
