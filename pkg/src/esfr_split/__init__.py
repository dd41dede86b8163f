"""Split-form energy stable flux reconstruction for the 1D Burgers equation."""

from esfr_split.diagnostics import (
    conserved_quantity,
    energy,
    energy_rate,
    l2_error,
    modal_energy,
    modal_energy_rate,
    ooa_slopes,
)
from esfr_split.fluxes import FluxKind, InterfaceState, numerical_flux
from esfr_split.mesh import Mesh1D
from esfr_split.operators import (
    BasisSet,
    ModalFrame,
    OperatorSet,
    build_basis,
    build_operators,
    c_hu,
    c_plus,
)
from esfr_split.quadrature import (
    QuadratureKind,
    QuadratureRule,
    gauss_legendre,
    gauss_lobatto_legendre,
    make_rule,
)
from esfr_split.schemes import (
    Discretization,
    SchemeConfig,
    SolutionField,
    Variant,
    VolumeRule,
)
from esfr_split.timestepping import TimeLoopConfig, integrate, rk4_step

__all__ = [
    "BasisSet",
    "Discretization",
    "FluxKind",
    "InterfaceState",
    "Mesh1D",
    "ModalFrame",
    "OperatorSet",
    "QuadratureKind",
    "QuadratureRule",
    "SchemeConfig",
    "SolutionField",
    "TimeLoopConfig",
    "Variant",
    "VolumeRule",
    "build_basis",
    "build_operators",
    "c_hu",
    "c_plus",
    "conserved_quantity",
    "energy",
    "energy_rate",
    "gauss_legendre",
    "gauss_lobatto_legendre",
    "integrate",
    "l2_error",
    "make_rule",
    "modal_energy",
    "modal_energy_rate",
    "numerical_flux",
    "ooa_slopes",
    "rk4_step",
]
