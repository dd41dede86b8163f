r"""Semi-discrete residuals for DG, ESFR and split-form ESFR on Burgers.

All residuals are assembled for every element at once. Arrays of modal
coefficients have shape ``(n_elements, n_p)``; element-local matrices act
on the trailing axis, so ``u @ A.T`` applies :math:`A` to every element.

Each edge ``e`` joins element ``e`` (on its left) and element ``e + 1``
(on its right, periodically). A single numerical flux is computed per edge
and shared by both elements, which is what makes the conservation sum
telescope.
"""

from __future__ import annotations

import enum
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from esfr_split.fluxes import FluxKind, InterfaceState, numerical_flux, physical_flux
from esfr_split.mesh import Mesh1D
from esfr_split.operators import (
    BasisSet,
    OperatorSet,
    build_basis,
    build_operators,
)
from esfr_split.quadrature import QuadratureRule, make_rule

SourceFunction = Callable[[np.ndarray, float], np.ndarray]


class Variant(enum.Enum):
    CONS_DG_STRONG = "ConsDGStrong"
    DG_WEAK = "DGWeak"
    ESFR_STRONG = "ESFRStrong"
    ESFR_WEAK = "ESFRWeak"
    SPLIT_STRONG = "SplitStrong"
    SPLIT_WEAK = "SplitWeak"
    CLASSICAL_SPLIT = "ClassicalSplit"
    LUMPED_LOBATTO = "LumpedLobatto"

    @classmethod
    def parse(cls, name: str | Variant) -> Variant:
        if isinstance(name, Variant):
            return name
        for v in cls:
            if v.value.lower() == name.strip().lower():
                return v
        raise ValueError(f"unknown scheme variant: {name!r}")


class VolumeRule(enum.Enum):
    """Volume cubature choices: collocated GLL(p+1), GL(p+1), GL(p+3)."""

    GLL = "GLL"
    GL = "GL"
    GL_OVER = "GL+2"

    @classmethod
    def parse(cls, name: str | VolumeRule) -> VolumeRule:
        if isinstance(name, VolumeRule):
            return name
        key = name.strip().upper()
        aliases = {"GLL": "GLL", "GL": "GL", "GL+2": "GL+2", "GL_OVER": "GL+2",
                   "OVERINTEGRATED": "GL+2"}
        try:
            return cls(aliases[key])
        except KeyError:
            raise ValueError(f"unknown volume rule: {name!r}") from None

    def rule(self, p: int) -> QuadratureRule:
        if self is VolumeRule.GLL:
            return make_rule("GLL", p + 1)
        if self is VolumeRule.GL:
            return make_rule("GL", p + 1)
        return make_rule("GL", p + 3)


_DG_VARIANTS = {Variant.CONS_DG_STRONG, Variant.DG_WEAK, Variant.LUMPED_LOBATTO}


@dataclass(frozen=True)
class SchemeConfig:
    variant: Variant
    p: int
    c: float = 0.0
    alpha: float = 2.0 / 3.0
    flux: FluxKind = FluxKind.LLF
    volume_rule: VolumeRule = VolumeRule.GL

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        object.__setattr__(self, "flux", FluxKind.parse(self.flux))
        object.__setattr__(self, "volume_rule", VolumeRule.parse(self.volume_rule))

        if self.variant in _DG_VARIANTS:
            object.__setattr__(self, "c", 0.0)
        if self.variant is Variant.LUMPED_LOBATTO:
            object.__setattr__(self, "volume_rule", VolumeRule.GLL)

        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"split parameter outside [0, 1]: {self.alpha}")
        if self.c < 0.0:
            raise ValueError(f"correction parameter must be non-negative: {self.c}")
        if self.p < 1:
            raise ValueError(f"polynomial degree must be at least 1: {self.p}")


@dataclass
class SolutionField:
    u_hat: np.ndarray
    mesh: Mesh1D
    ops: OperatorSet
    t: float = 0.0

    def __post_init__(self) -> None:
        expected = (self.mesh.n_elements, self.ops.p + 1)
        if self.u_hat.shape != expected:
            raise ValueError(f"coefficients have shape {self.u_hat.shape}, expected {expected}")


@dataclass(frozen=True)
class Traces:
    """Per-element solution traces and per-edge interface states."""

    left: np.ndarray
    right: np.ndarray

    @property
    def edges(self) -> InterfaceState:
        # edge e: left element e's right trace, right element e+1's left trace
        return InterfaceState(v_p=self.right, w_0=np.roll(self.left, -1))


@dataclass
class Discretization:
    """A scheme on a mesh: operators plus the residual for its variant.

    *source* is an optional forcing :math:`q(x, t)`; it is projected onto the
    basis at the volume nodes and lifted with the same filter as the rest of
    the residual (``source_lift="filter"``) or with the plain mass matrix
    (``source_lift="mass"``).
    """

    config: SchemeConfig
    mesh: Mesh1D
    source: SourceFunction | None = None
    source_lift: str = "filter"

    rule: QuadratureRule = field(init=False)
    basis: BasisSet = field(init=False)
    ops: OperatorSet = field(init=False)

    def __post_init__(self) -> None:
        if self.source_lift not in ("filter", "mass"):
            raise ValueError(f"unknown source lift: {self.source_lift!r}")

        self.rule = self.config.volume_rule.rule(self.config.p)
        self.basis = build_basis(self.config.p, self.rule)
        self.ops = build_operators(self.basis, self.rule, self.mesh.J, self.config.c)

    @cached_property
    def x_volume(self) -> np.ndarray:
        """Physical volume cubature nodes, ``(n_elements, n_vp)``."""
        return self.mesh.physical_nodes(self.rule.nodes)

    def field(self, u_hat: np.ndarray, t: float = 0.0) -> SolutionField:
        return SolutionField(u_hat, self.mesh, self.ops, t)

    def with_config(self, **changes) -> Discretization:
        return Discretization(
            replace(self.config, **changes), self.mesh, self.source, self.source_lift
        )

    # {{{ building blocks

    def volume_values(self, u_hat: np.ndarray) -> np.ndarray:
        return u_hat @ self.basis.chi_v.T

    def volume_flux_coefficients(self, u_hat: np.ndarray) -> np.ndarray:
        r""":math:`\hat{f} = \Pi (u_v^2 / 2)` in every element."""
        return physical_flux(self.volume_values(u_hat)) @ self.ops.Pi.T

    def compute_traces(self, u_hat: np.ndarray) -> Traces:
        chi_f = self.basis.chi_f
        return Traces(left=u_hat @ chi_f[0], right=u_hat @ chi_f[1])

    def edge_fluxes(self, traces: Traces) -> np.ndarray:
        return numerical_flux(traces.edges, self.config.flux)

    def lift_faces(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        r""":math:`\sum_f \chi_f^T W_f \hat{n} b_f` for per-element face values."""
        chi_f = self.basis.chi_f
        (wl, wr), (nl, nr) = self.basis.face_weights, self.basis.face_normals
        return (wl * nl * left)[:, None] * chi_f[0] + (wr * nr * right)[:, None] * chi_f[1]

    def nonconservative_volume(self, u_hat: np.ndarray) -> np.ndarray:
        r""":math:`\chi^T U W \partial_\xi \chi \hat{u}`."""
        b, w = self.basis, self.rule.weights
        u_v = u_hat @ b.chi_v.T
        du_v = u_hat @ b.dchi_v.T
        return (u_v * du_v * w) @ b.chi_v

    def nonconservative_volume_weak(self, u_hat: np.ndarray) -> np.ndarray:
        r""":math:`\chi^T U \Pi^T S_\xi^T \hat{u}`."""
        b, ops = self.basis, self.ops
        u_v = u_hat @ b.chi_v.T
        return (u_v * (u_hat @ ops.S_xi @ ops.Pi)) @ b.chi_v

    def _lift(self, rhs: np.ndarray, filtered: bool) -> np.ndarray:
        inv = self.ops.filter_inv if filtered else self.ops.M_m_inv
        return rhs @ inv.T

    def source_dual(self, t: float) -> np.ndarray:
        r"""Forcing tested against the basis, :math:`\chi^T W J q`."""
        w = self.rule.weights * self.ops.J
        return (self.source(self.x_volume, t) * w) @ self.basis.chi_v

    def source_term(self, t: float) -> np.ndarray:
        r"""Lifted projection of the forcing, :math:`L^{-1} \chi^T W J q`."""
        if self.source is None:
            return np.zeros((self.mesh.n_elements, self.ops.p + 1))
        return self._lift(self.source_dual(t), self.source_lift == "filter")

    # }}}

    # {{{ residuals

    def _strong_conservative(self, u_hat: np.ndarray) -> np.ndarray:
        f_hat = self.volume_flux_coefficients(u_hat)
        traces = self.compute_traces(u_hat)
        fstar = self.edge_fluxes(traces)
        chi_f = self.basis.chi_f

        face = self.lift_faces(
            np.roll(fstar, 1) - f_hat @ chi_f[0],
            fstar - f_hat @ chi_f[1],
        )
        return f_hat @ self.ops.S_xi.T + face

    def _weak_conservative(self, u_hat: np.ndarray) -> np.ndarray:
        f_hat = self.volume_flux_coefficients(u_hat)
        fstar = self.edge_fluxes(self.compute_traces(u_hat))

        face = self.lift_faces(np.roll(fstar, 1), fstar)
        return -(f_hat @ self.ops.S_xi) + face

    def residual_cons_dg_strong(self, u_hat: np.ndarray) -> np.ndarray:
        return -self._lift(self._strong_conservative(u_hat), filtered=False)

    def residual_dg_weak(self, u_hat: np.ndarray) -> np.ndarray:
        return -self._lift(self._weak_conservative(u_hat), filtered=False)

    def residual_esfr(self, u_hat: np.ndarray, form: str = "strong") -> np.ndarray:
        if form == "strong":
            return -self._lift(self._strong_conservative(u_hat), filtered=True)
        if form == "weak":
            return -self._lift(self._weak_conservative(u_hat), filtered=True)
        raise ValueError(f"unknown form: {form!r}")

    def split_strong_parts(self, u_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Volume and face contributions of the strong split form (unlifted)."""
        alpha = self.config.alpha
        chi_f = self.basis.chi_f

        f_hat = self.volume_flux_coefficients(u_hat)
        traces = self.compute_traces(u_hat)
        fstar = self.edge_fluxes(traces)

        volume = alpha * (f_hat @ self.ops.S_xi.T)
        volume = volume + (1.0 - alpha) * self.nonconservative_volume(u_hat)

        face = self.lift_faces(
            np.roll(fstar, 1)
            - alpha * (f_hat @ chi_f[0])
            - (1.0 - alpha) * physical_flux(traces.left),
            fstar
            - alpha * (f_hat @ chi_f[1])
            - (1.0 - alpha) * physical_flux(traces.right),
        )
        return volume, face

    def residual_split_strong(self, u_hat: np.ndarray) -> np.ndarray:
        volume, face = self.split_strong_parts(u_hat)
        return -self._lift(volume + face, filtered=True)

    def residual_split_weak(self, u_hat: np.ndarray) -> np.ndarray:
        return -self._lift(self._split_weak(u_hat), filtered=True)

    def _split_weak(self, u_hat: np.ndarray) -> np.ndarray:
        """Weak split form obtained by discrete integration by parts.

        Integrating the non-conservative volume term by parts leaves the
        surface term :math:`\\chi^T U \\Pi^T B \\hat{u} - \\sum_f \\chi_f^T
        \\hat{n} f_f`, which only vanishes for the full face flux splitting,
        so it is kept here; see :meth:`residual_split_weak_reduced`.
        """
        alpha = self.config.alpha
        b, ops = self.basis, self.ops

        f_hat = self.volume_flux_coefficients(u_hat)
        traces = self.compute_traces(u_hat)
        fstar = self.edge_fluxes(traces)

        u_v = u_hat @ b.chi_v.T
        boundary = self.lift_faces(traces.left, traces.right)
        lifted_boundary = (u_v * (boundary @ ops.Pi)) @ b.chi_v
        face_flux = self.lift_faces(physical_flux(traces.left), physical_flux(traces.right))

        rhs = (
            -alpha * (f_hat @ ops.S_xi)
            - (1.0 - alpha) * self.nonconservative_volume_weak(u_hat)
            + (1.0 - alpha) * (lifted_boundary - face_flux)
            + self.lift_faces(np.roll(fstar, 1), fstar)
        )
        return rhs

    def residual_split_weak_reduced(self, u_hat: np.ndarray) -> np.ndarray:
        """Weak split form with only the numerical flux on the faces.

        This drops the surface remainder of the non-conservative term and is
        therefore not algebraically equivalent to the strong split form.
        """
        alpha = self.config.alpha
        f_hat = self.volume_flux_coefficients(u_hat)
        fstar = self.edge_fluxes(self.compute_traces(u_hat))

        rhs = (
            -alpha * (f_hat @ self.ops.S_xi)
            - (1.0 - alpha) * self.nonconservative_volume_weak(u_hat)
            + self.lift_faces(np.roll(fstar, 1), fstar)
        )
        return -self._lift(rhs, filtered=True)

    def residual_classical_split(self, u_hat: np.ndarray) -> np.ndarray:
        volume, face = self.split_strong_parts(u_hat)
        return -self._lift(volume, filtered=False) - self._lift(face, filtered=True)

    def dual_residual(self, u_hat: np.ndarray) -> tuple[np.ndarray | None, np.ndarray | None]:
        r"""Unlifted residual as ``(mass_part, filtered_part)``.

        The spatial residual is :math:`-M_m^{-1} r_M - (M_m + K_m)^{-1} r_K`;
        either part may be *None*.
        """
        v = self.config.variant
        if v is Variant.CONS_DG_STRONG:
            return self._strong_conservative(u_hat), None
        if v is Variant.DG_WEAK:
            return self._weak_conservative(u_hat), None
        if v is Variant.ESFR_STRONG:
            return None, self._strong_conservative(u_hat)
        if v is Variant.ESFR_WEAK:
            return None, self._weak_conservative(u_hat)
        if v in (Variant.SPLIT_STRONG, Variant.LUMPED_LOBATTO):
            volume, face = self.split_strong_parts(u_hat)
            return None, volume + face
        if v is Variant.SPLIT_WEAK:
            return None, self._split_weak(u_hat)
        if v is Variant.CLASSICAL_SPLIT:
            return self.split_strong_parts(u_hat)
        raise AssertionError(v)

    def spatial_residual(self, u_hat: np.ndarray) -> np.ndarray:
        mass, filtered = self.dual_residual(u_hat)
        du = np.zeros_like(u_hat)
        if mass is not None:
            du = du - self._lift(mass, filtered=False)
        if filtered is not None:
            du = du - self._lift(filtered, filtered=True)
        return du

    def rhs(self, u_hat: np.ndarray, t: float = 0.0) -> np.ndarray:
        du = self.spatial_residual(u_hat)
        if self.source is not None:
            du = du + self.source_term(t)
        return du

    def rhs_modal(self, a: np.ndarray, t: float = 0.0) -> np.ndarray:
        """:meth:`rhs` in the orthonormal modal coordinates of ``ops.modal``.

        Same semi-discretization, but the filter is applied without the
        cancellation a nodal lift suffers once :math:`c` is large.
        """
        frame = self.ops.modal
        mass, filtered = self.dual_residual(frame.to_nodal(a))
        da = np.zeros_like(a)
        if mass is not None:
            da = da - frame.solve(frame.dual(mass), filtered=False)
        if filtered is not None:
            da = da - frame.solve(frame.dual(filtered), filtered=True)
        if self.source is not None:
            da = da + frame.solve(
                frame.dual(self.source_dual(t)), filtered=self.source_lift == "filter"
            )
        return da

    # }}}
