r"""Reference-element operators for nodal ESFR discretizations.

The solution basis is the Lagrange basis on the GLL points of degree
:math:`p`, evaluated at an arbitrary volume cubature rule. With
:math:`\chi` the basis evaluated at the volume nodes and :math:`W` the
quadrature weights, the operators are

.. math::

    M = \chi^T W \chi, \quad
    S_\xi = \chi^T W \partial_\xi \chi, \quad
    D^p = (M^{-1} S_\xi)^p, \quad
    K_m = c \, (D^p)^T M_m D^p,

with :math:`M_m = J M` on an affine element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
import numpy.linalg as la

from esfr_split.quadrature import QuadratureRule, gauss_lobatto_legendre, legendre_eval

#: face reference coordinates and outward normals, (left, right)
FACE_COORDS = (-1.0, 1.0)
FACE_NORMALS = (-1.0, 1.0)


class InsufficientQuadratureError(ValueError):
    pass


# {{{ Lagrange basis


def barycentric_weights(points: np.ndarray) -> np.ndarray:
    diff = points[:, None] - points[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def lagrange_matrix(points: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Values of the Lagrange polynomials on *points* at *x*, shape ``(x.size, n)``."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    w = barycentric_weights(points)

    diff = x[:, None] - points[None, :]
    # snapping points within a few ulps of a node avoids overflow in w / diff
    exact = np.abs(diff) <= 4.0 * np.finfo(np.float64).eps
    diff[exact] = 1.0
    tmp = w / diff
    result = tmp / np.sum(tmp, axis=1, keepdims=True)

    rows = np.any(exact, axis=1)
    result[rows] = exact[rows].astype(np.float64)

    return result


def lagrange_derivative_matrix(points: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Derivatives of the Lagrange polynomials on *points* at *x*.

    Uses the nodal differentiation matrix on *points* and interpolates its
    columns, which is exact since the derivatives are polynomials of
    degree :math:`n - 2`.
    """
    w = barycentric_weights(points)
    diff = points[:, None] - points[None, :]
    np.fill_diagonal(diff, 1.0)
    dmat = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(dmat, 0.0)
    np.fill_diagonal(dmat, -np.sum(dmat, axis=1))

    return lagrange_matrix(points, x) @ dmat


# }}}


# {{{ basis


@dataclass(frozen=True)
class BasisSet:
    """Lagrange basis on GLL construction points evaluated at a volume rule.

    .. attribute:: chi_v

        Basis values at the volume nodes, shape ``(n_vp, n_p)``.

    .. attribute:: dchi_v

        Reference derivatives at the volume nodes, shape ``(n_vp, n_p)``.

    .. attribute:: chi_f

        Face trace rows, shape ``(2, n_p)`` ordered (left, right).
    """

    p: int
    solution_nodes: np.ndarray
    chi_v: np.ndarray
    dchi_v: np.ndarray
    chi_f: np.ndarray

    face_normals: tuple[float, float] = FACE_NORMALS
    face_weights: tuple[float, float] = (1.0, 1.0)

    @property
    def n_p(self) -> int:
        return self.p + 1


def build_basis(p: int, volume_rule: QuadratureRule) -> BasisSet:
    if p < 1:
        raise ValueError(f"polynomial degree must be at least 1: {p}")
    if volume_rule.n < p + 1 or volume_rule.exactness < 2 * p - 1:
        raise InsufficientQuadratureError(
            f"{volume_rule.label} is too weak for p = {p}: need at least "
            f"p + 1 points exact for degree 2p - 1"
        )

    points = gauss_lobatto_legendre(p + 1).nodes
    return BasisSet(
        p=p,
        solution_nodes=points,
        chi_v=lagrange_matrix(points, volume_rule.nodes),
        dchi_v=lagrange_derivative_matrix(points, volume_rule.nodes),
        chi_f=lagrange_matrix(points, np.array(FACE_COORDS)),
    )


# }}}


# {{{ operators


@dataclass(frozen=True)
class ModalFrame:
    r"""Orthonormal Legendre coordinates, :math:`\hat{u} = V a` in every element.

    The :math:`p`-th derivative only sees the top mode, so
    :math:`V^T K_m V = s\, e_p e_p^T` with ``stiffness`` :math:`s` exactly.
    Solving with :math:`V^T (M_m + K_m) V` through the Schur complement of the
    top mode never cancels against :math:`s`, which a nodal lift must do.
    Arrays hold one element per row, as in the rest of the package.
    """

    V: np.ndarray
    V_inv: np.ndarray
    mass: np.ndarray
    stiffness: float

    # Schur complement data of ``mass`` for the top mode
    lower_inv: np.ndarray
    coupling: np.ndarray
    schur: float

    @classmethod
    def build(cls, V: np.ndarray, M_m: np.ndarray, stiffness: float) -> ModalFrame:
        mass = V.T @ M_m @ V
        mass = 0.5 * (mass + mass.T)
        lower_inv = la.inv(mass[:-1, :-1])
        coupling = mass[:-1, -1]
        return cls(
            V=V,
            V_inv=la.inv(V),
            mass=mass,
            stiffness=float(stiffness),
            lower_inv=lower_inv,
            coupling=coupling,
            schur=float(mass[-1, -1] - coupling @ lower_inv @ coupling),
        )

    def to_modal(self, u_hat: np.ndarray) -> np.ndarray:
        return u_hat @ self.V_inv.T

    def to_nodal(self, a: np.ndarray) -> np.ndarray:
        return a @ self.V.T

    def dual(self, r: np.ndarray) -> np.ndarray:
        """Map a nodal residual (tested against the Lagrange basis) to modal."""
        return r @ self.V

    def solve(self, r: np.ndarray, filtered: bool = True) -> np.ndarray:
        r"""Solve :math:`V^T L V x = r` per row, :math:`L = M_m + K_m` or :math:`M_m`."""
        s = self.stiffness if filtered else 0.0
        low, top = r[..., :-1], r[..., -1]
        x_top = (top - low @ (self.lower_inv @ self.coupling)) / (self.schur + s)
        x_low = (low - np.multiply.outer(x_top, self.coupling)) @ self.lower_inv.T
        return np.concatenate([x_low, x_top[..., None]], axis=-1)

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        r""":math:`\sum_m a_m V^T (M_m + K_m) V b_m^T`."""
        mass = np.einsum("mi,ij,mj->", a, self.mass, b)
        return float(mass + self.stiffness * np.dot(a[..., -1], b[..., -1]))


@dataclass(frozen=True)
class OperatorSet:
    M: np.ndarray
    M_m: np.ndarray
    S_xi: np.ndarray
    Pi: np.ndarray
    Dp: np.ndarray
    K_m: np.ndarray
    filter_inv: np.ndarray
    M_m_inv: np.ndarray
    c: float
    J: float
    p: int

    #: constant p-th derivative of each basis function, and the scale
    #: ``k`` with ``K_m = k * outer(dp_row, dp_row)``
    dp_row: np.ndarray
    k_scale: float

    modal: ModalFrame


def pth_derivative_row(basis: BasisSet) -> np.ndarray:
    r"""Constant :math:`\partial_\xi^p \chi_j`, i.e. :math:`p!` times each leading coefficient.

    Every row of :math:`(M^{-1} S_\xi)^p` equals this vector; forming it
    directly keeps :math:`D^p` exactly rank one, which matters once
    :math:`c` is large enough for :math:`M_m + K_m` to be ill-conditioned.
    """
    return math.factorial(basis.p) * barycentric_weights(basis.solution_nodes)


def build_operators(
    basis: BasisSet, rule: QuadratureRule, J: float, c: float
) -> OperatorSet:
    if J <= 0:
        raise ValueError(f"Jacobian must be positive: {J}")
    if c < 0:
        raise ValueError(f"correction parameter must be non-negative: {c}")

    chi, dchi, w = basis.chi_v, basis.dchi_v, rule.weights
    p = basis.p

    M = chi.T @ (w[:, None] * chi)
    S_xi = chi.T @ (w[:, None] * dchi)
    M_m = J * M
    M_m_inv = la.inv(M_m)
    Pi = M_m_inv @ (chi.T * (w * J)[None, :])

    d = pth_derivative_row(basis)
    Dp = np.outer(np.ones(p + 1), d)
    # K_m = c Dp^T M_m Dp = c (1^T M_m 1) d d^T
    k_scale = c * J * float(np.sum(w))
    K_m = k_scale * np.outer(d, d)

    # rank-one Sherman-Morrison update, valid for any volume rule
    v = M_m_inv @ d
    filter_inv = M_m_inv - (k_scale / (1.0 + k_scale * (d @ v))) * np.outer(v, v)

    # p-th derivative of the top orthonormal Legendre polynomial
    g = math.factorial(p) * legendre_leading_coefficient(p) * math.sqrt((2 * p + 1) / 2)
    modal = ModalFrame.build(orthonormal_vandermonde(basis), M_m, k_scale * g * g)

    return OperatorSet(
        M=M,
        M_m=M_m,
        S_xi=S_xi,
        Pi=Pi,
        Dp=Dp,
        K_m=K_m,
        filter_inv=filter_inv,
        M_m_inv=M_m_inv,
        c=float(c),
        J=float(J),
        p=p,
        dp_row=d,
        k_scale=k_scale,
        modal=modal,
    )


def differentiation_power(ops: OperatorSet) -> np.ndarray:
    r""":math:`(M^{-1} S_\xi)^p` by repeated products, for cross-checking ``Dp``."""
    return la.matrix_power(la.solve(ops.M, ops.S_xi), ops.p)


def dense_filter_inverse(ops: OperatorSet, *, digits: int = 40) -> np.ndarray:
    """:math:`(M_m + K_m)^{-1}` by pivoted LU in extended precision.

    For large :math:`c` the condition number reaches :math:`10^{13}`, so a
    double precision factorization would lose most digits. :math:`K_m` is
    re-formed from ``dp_row`` and ``k_scale`` at the working precision, since
    rounding its entries to double alone perturbs the inverse by
    :math:`\kappa \epsilon`.
    """
    with mpmath.workdps(digits):
        d = mpmath.matrix(ops.dp_row.tolist())
        a = mpmath.matrix(ops.M_m.tolist()) + mpmath.mpf(ops.k_scale) * (d * d.T)
        inv = mpmath.inverse(a)
        return np.array(inv.tolist(), dtype=np.float64)


def boundary_matrix(basis: BasisSet) -> np.ndarray:
    r""":math:`\sum_f \chi_f^T W_f \hat{n} \chi_f`."""
    return sum(
        wf * nf * np.outer(basis.chi_f[i], basis.chi_f[i])
        for i, (wf, nf) in enumerate(zip(basis.face_weights, basis.face_normals))
    )


def verify_sbp(ops: OperatorSet, basis: BasisSet) -> float:
    """Max-norm defect of the discrete integration by parts identity."""
    defect = ops.S_xi + ops.S_xi.T - boundary_matrix(basis)
    return float(np.max(np.abs(defect)))


def legendre_leading_coefficient(p: int) -> float:
    r""":math:`(2p)! / (2^p (p!)^2)`, leading coefficient of :math:`P_p`."""
    return math.factorial(2 * p) / (2**p * math.factorial(p) ** 2)


def sherman_morrison_denominator(p: int, c: float) -> float:
    cp = legendre_leading_coefficient(p)
    return 1.0 + c * (2 * p + 1) * (math.factorial(p) * cp) ** 2


def sherman_morrison_filter_inverse(ops: OperatorSet) -> np.ndarray:
    """Closed-form :math:`(M_m + K_m)^{-1}` on an affine element."""
    denom = sherman_morrison_denominator(ops.p, ops.c)
    return ops.M_m_inv - (ops.M_m_inv @ ops.K_m @ ops.M_m_inv) / denom


def verify_kd_annihilation(ops: OperatorSet) -> float:
    """Max-norm of :math:`K_m M_m^{-1} S_\\xi`; zero for affine elements."""
    return float(np.max(np.abs(ops.K_m @ ops.M_m_inv @ ops.S_xi)))


def relative_kd_defect(ops: OperatorSet) -> float:
    r""":math:`\|K_m M_m^{-1} S_\xi\| / (\|K_m\| \|M_m^{-1} S_\xi\|)`, zero if :math:`K_m = 0`."""
    diff = ops.M_m_inv @ ops.S_xi
    scale = la.norm(ops.K_m) * la.norm(diff)
    if scale == 0.0:
        return 0.0
    return float(la.norm(ops.K_m @ diff) / scale)


def filter_inverse_residual(ops: OperatorSet, inverse: np.ndarray | None = None) -> float:
    r"""Normwise residual :math:`\|A X - I\| / (\|A\| \|X\|)` with :math:`A = M_m + K_m`.

    This is the backward error of *inverse* (``filter_inv`` by default); the
    forward error can be larger by up to the condition number of :math:`A`.
    """
    x = ops.filter_inv if inverse is None else inverse
    a = ops.M_m + ops.K_m
    resid = a @ x - np.eye(ops.p + 1)
    return float(la.norm(resid) / (la.norm(a) * la.norm(x)))


def orthonormal_vandermonde(basis: BasisSet) -> np.ndarray:
    """Orthonormal Legendre polynomials at the solution nodes.

    Maps orthonormal modal coefficients to nodal ones, ``u_hat = V a``. The
    last modal coefficient alone carries the :math:`p`-th derivative, so in
    these coordinates the stiff correction term never mixes with rounding
    of the remaining modes.
    """
    x = basis.solution_nodes
    return np.stack(
        [legendre_eval(j, x)[0] * math.sqrt((2 * j + 1) / 2) for j in range(basis.n_p)],
        axis=1,
    )


# }}}


# {{{ correction parameter values


def c_hu(p: int) -> float:
    """Huynh's g2 correction parameter in the normalized-Legendre convention."""
    scale = (math.factorial(p) * legendre_leading_coefficient(p)) ** 2
    return (p + 1) / ((2 * p + 1) * p * scale)


# largest stable c before losing an order of accuracy, tabulated in the
# orthogonal-Legendre convention; halved for the normalized convention
_C_PLUS_ORTHOGONAL = {
    2: 1.86e-1,
    3: 3.67e-3,
    4: 4.79e-5,
    5: 4.24e-7,
}


def c_plus(p: int) -> float:
    try:
        return _C_PLUS_ORTHOGONAL[p] / 2.0
    except KeyError:
        raise ValueError(f"no tabulated c+ for p = {p}; set it explicitly") from None


# }}}
