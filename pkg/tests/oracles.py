"""Reference implementations used only as test oracles."""

from __future__ import annotations

import numpy as np
import numpy.polynomial.legendre as npleg

from esfr_split.fluxes import physical_flux


def collocated_split_oracle(u, p, dx, flux):
    """Skew-symmetric collocated split form on GLL nodes, built from numpy alone."""
    interior = npleg.Legendre.basis(p).deriv().roots()
    x = np.concatenate([[-1.0], np.sort(interior.real), [1.0]])
    w = 2.0 / (p * (p + 1) * npleg.legval(x, np.eye(p + 1)[p]) ** 2)

    vander = npleg.legvander(x, p)
    dvander = np.stack([npleg.legval(x, npleg.legder(np.eye(p + 1)[j])) for j in range(p + 1)], 1)
    dmat = dvander @ np.linalg.inv(vander)

    jac = dx / 2
    ul, ur = u[:, 0], u[:, -1]
    # edge e between element e (left) and e + 1 (right)
    vp, w0 = ur, np.roll(ul, -1)
    if flux == "ECON":
        lam = (w0 - vp) / 12
    else:
        lam = 0.5 * np.maximum(np.abs(w0), np.abs(vp))
    fstar = 0.25 * (w0**2 + vp**2) - lam * (w0 - vp)

    vol = (u**2 @ dmat.T + u * (u @ dmat.T)) / 3
    du = -vol / jac
    du[:, 0] -= -(np.roll(fstar, 1) - ul**2 / 2) / (jac * w[0])
    du[:, -1] -= (fstar - ur**2 / 2) / (jac * w[-1])
    return du


def surface_energy_rate(disc, u_hat):
    """Surface-only rate: -sum over element faces of n u_f (f* - u_f^2 / 6)."""
    traces = disc.compute_traces(u_hat)
    fstar = disc.edge_fluxes(traces)
    left = -traces.left * (np.roll(fstar, 1) - physical_flux(traces.left) / 3)
    right = traces.right * (fstar - physical_flux(traces.right) / 3)
    return -float(np.sum(left + right))
