r"""Burgers fluxes and interface numerical fluxes.

At an edge, ``v_p`` is the trace from the element on the left and ``w_0``
the trace from the element on the right. Both numerical fluxes have the form

.. math::

    f^* = \frac{1}{2}\left(\frac{w_0^2}{2} + \frac{v_p^2}{2}\right)
        - \lambda (w_0 - v_p),

with :math:`\lambda = (w_0 - v_p) / 12` for the energy conserving flux and
:math:`\lambda = \max(|w_0|, |v_p|) / 2` for local Lax-Friedrichs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class FluxKind(enum.Enum):
    ECON = "ECON"
    LLF = "LLF"

    @classmethod
    def parse(cls, name: str | FluxKind) -> FluxKind:
        if isinstance(name, FluxKind):
            return name
        key = name.strip().upper()
        if key in ("LF", "LAX-FRIEDRICHS"):
            key = "LLF"
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown numerical flux: {name!r}") from None


@dataclass(frozen=True)
class InterfaceState:
    v_p: float | np.ndarray
    w_0: float | np.ndarray


def physical_flux(u):
    return 0.5 * u * u


def dissipation_coefficient(v_p, w_0, kind: FluxKind):
    if kind is FluxKind.ECON:
        return (w_0 - v_p) / 12.0
    if kind is FluxKind.LLF:
        return 0.5 * np.maximum(np.abs(w_0), np.abs(v_p))
    raise ValueError(f"unknown flux: {kind}")


def numerical_flux(s: InterfaceState, kind: FluxKind):
    v_p, w_0 = s.v_p, s.w_0
    lam = dissipation_coefficient(v_p, w_0, kind)
    return 0.5 * (physical_flux(w_0) + physical_flux(v_p)) - lam * (w_0 - v_p)


def surface_energy_contribution(v_p, w_0, kind: FluxKind):
    """Energy production of one edge, :math:`(w_0 - v_p)^2 ((w_0 - v_p)/12 - \\lambda)`."""
    jump = w_0 - v_p
    return jump**2 * (jump / 12.0 - dissipation_coefficient(v_p, w_0, kind))


def face_correction_terms(
    s: InterfaceState,
    interpolated_flux,
    alpha: float,
    *,
    own_trace=None,
    kind: FluxKind = FluxKind.ECON,
):
    r"""Split face flux :math:`f^* - \alpha \chi_f \hat{f} - (1 - \alpha) f_f`.

    *interpolated_flux* is the volume flux interpolated to the face and
    *own_trace* the owning element's solution trace (defaults to ``v_p``,
    i.e. the right face of the left element).
    """
    if own_trace is None:
        own_trace = s.v_p

    fstar = numerical_flux(s, kind)
    return fstar - alpha * interpolated_flux - (1.0 - alpha) * physical_flux(own_trace)
