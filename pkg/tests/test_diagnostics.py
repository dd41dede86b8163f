from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from esfr_split.diagnostics import (
    ERROR_OVERINTEGRATION,
    conserved_quantity,
    energy,
    is_monotone_nonincreasing,
    l2_error,
    modal_energy,
    ooa_slopes,
)
from esfr_split.harness import initial_project
from esfr_split.mesh import Mesh1D
from esfr_split.operators import lagrange_matrix
from esfr_split.quadrature import gauss_legendre
from esfr_split.schemes import Discretization, SchemeConfig


def make_disc(p=4, c=0.0, m=8, rule="GL"):
    return Discretization(SchemeConfig("SplitStrong", p, c=c, volume_rule=rule), Mesh1D(0.0, 2.0, m))


def project(fn, disc):
    return initial_project(fn, disc)


# {{{ energy


@pytest.mark.parametrize("c", [0.0, 1.0, 1.0e4])
@pytest.mark.parametrize("rule", ["GLL", "GL", "GL+2"])
def test_energy_of_constant(c, rule):
    field = project(lambda x, t: np.ones_like(x), make_disc(c=c, rule=rule))
    assert energy(field) == pytest.approx(2.0, rel=1e-14)


def test_energy_of_sine():
    field = project(lambda x, t: np.sin(np.pi * x), make_disc(m=32))
    assert energy(field) == pytest.approx(1.0, abs=1e-9)


@given(seed=st.integers(0, 2**32 - 1), c=st.sampled_from([0.0, 1e-3, 1e4]))
def test_energy_is_quadratic_and_psd(seed, c):
    disc = make_disc(c=c)
    u = np.random.default_rng(seed).standard_normal((8, 5))
    e = energy(disc.field(u))
    assert e >= 0.0
    assert energy(disc.field(2.0 * u)) == pytest.approx(4.0 * e, rel=1e-14)

    # adding the correction never lowers the energy
    mass_only = float(np.einsum("mi,ij,mj->", u, disc.ops.M_m, u))
    assert e >= mass_only * (1 - 1e-14)
    if c == 0.0:
        assert e == pytest.approx(mass_only, rel=1e-14)


@given(seed=st.integers(0, 2**32 - 1), c=st.sampled_from([0.0, 1e-3, 1e4]),
       rule=st.sampled_from(["GLL", "GL", "GL+2"]))
def test_modal_energy_matches_nodal(seed, c, rule):
    disc = make_disc(c=c, rule=rule)
    u = np.random.default_rng(seed).standard_normal((8, 5))
    a = disc.ops.modal.to_modal(u)
    assert modal_energy(disc.ops, a) == pytest.approx(energy(disc.field(u)), rel=1e-10)


# }}}


# {{{ conserved quantity


def test_conserved_quantity_of_constant():
    field = project(lambda x, t: np.full_like(x, 3.5), make_disc())
    assert conserved_quantity(field) == pytest.approx(7.0, rel=1e-14)


def test_conserved_quantity_of_offset_sine():
    field = project(lambda x, t: np.sin(np.pi * x) + 0.01, make_disc())
    assert conserved_quantity(field) == pytest.approx(0.02, abs=1e-14)


@given(seed=st.integers(0, 2**32 - 1))
def test_conserved_quantity_independent_of_c(seed):
    u = np.random.default_rng(seed).standard_normal((8, 5))
    q0 = conserved_quantity(make_disc(c=0.0).field(u))
    q1 = conserved_quantity(make_disc(c=1e4).field(u))
    assert abs(q0 - q1) <= 1e-12


# }}}


# {{{ errors


def test_l2_error_of_own_interpolant():
    disc = make_disc()
    field = project(lambda x, t: np.cos(np.pi * x), disc)
    nodes = disc.basis.solution_nodes
    # exact solution evaluated as the discrete polynomial itself
    def own(x, t):
        rule = gauss_legendre(4 + ERROR_OVERINTEGRATION)
        return field.u_hat @ lagrange_matrix(nodes, rule.nodes).T

    assert l2_error(field, own, nodes) <= 1e-14


def test_l2_error_of_zero_against_one():
    disc = make_disc()
    field = disc.field(np.zeros((8, 5)))
    err = l2_error(field, lambda x, t: np.ones_like(x), disc.basis.solution_nodes)
    assert err == pytest.approx(math.sqrt(2.0), rel=1e-14)


def legendre_projection_error(p, m):
    """Best piecewise degree-p L2 approximation error of cos(pi x), by Legendre modes."""
    rule = gauss_legendre(30)
    h = 2.0 / m
    total = 0.0
    for k in range(m):
        x = k * h + (rule.nodes + 1) * h / 2
        f = np.cos(np.pi * x)
        vander = np.polynomial.legendre.legvander(rule.nodes, p)
        coef = (vander.T @ (rule.weights * f)) * (2 * np.arange(p + 1) + 1) / 2
        total += np.sum(rule.weights * (f - vander @ coef) ** 2) * h / 2
    return math.sqrt(total)


def test_projection_error_oracle():
    errors = []
    for m in (80, 160):
        disc = make_disc(m=m)
        field = project(lambda x, t: np.cos(np.pi * x), disc)
        err = l2_error(field, lambda x, t: np.cos(np.pi * x), disc.basis.solution_nodes)
        assert err == pytest.approx(legendre_projection_error(4, m), rel=1e-4)
        errors.append(err)

    # value frozen from the independent Legendre projection oracle
    assert errors[0] == pytest.approx(2.98e-11, rel=0.01)
    assert math.log2(errors[0] / errors[1]) == pytest.approx(5.0, abs=0.05)


# }}}


# {{{ slopes and monotonicity


def test_ooa_slopes_examples():
    assert ooa_slopes([1e-2, 1e-4], [0.1, 0.01]) == pytest.approx([2.0])
    assert ooa_slopes([7.82e-06, 1.94e-07], [2.50e-02, 1.25e-02]) == pytest.approx([5.33], abs=0.005)
    assert ooa_slopes([3e-5, 3e-5], [0.2, 0.1]) == [0.0]


def test_ooa_slopes_undefined():
    slopes = ooa_slopes([1e-3, 0.0, 1e-5, math.nan], [0.4, 0.2, 0.1, 0.05])
    assert all(math.isnan(s) for s in slopes)
    with pytest.raises(ValueError):
        ooa_slopes([1.0], [0.1])
    with pytest.raises(ValueError):
        ooa_slopes([1.0, 0.5], [0.1])


@given(order=st.floats(0.5, 8.0), e0=st.floats(1e-8, 1.0))
def test_ooa_slopes_recover_power_law(order, e0):
    dxs = [0.1 / 2**k for k in range(4)]
    errors = [e0 * (dx / dxs[0]) ** order for dx in dxs]
    assert ooa_slopes(errors, dxs) == pytest.approx([order] * 3, rel=1e-9)


def test_monotone_check():
    assert is_monotone_nonincreasing([3.0, 2.0, 2.0, 1.0], 0.0)
    assert is_monotone_nonincreasing([1.0, 1.0 + 1e-12, 0.5], 1e-10)
    assert not is_monotone_nonincreasing([1.0, 0.5, 0.9], 1e-10)
    assert not is_monotone_nonincreasing([1.0, math.inf], 1e-10)
    assert not is_monotone_nonincreasing([1.0, math.nan], 1e-10)


@given(values=st.lists(st.floats(0.0, 10.0), min_size=1, max_size=30))
def test_monotone_check_matches_pairwise(values):
    tol = 1e-3
    pairwise = all(values[j] <= values[i] + tol for i in range(len(values)) for j in range(i, len(values)))
    assert is_monotone_nonincreasing(values, tol) == pairwise


# }}}
