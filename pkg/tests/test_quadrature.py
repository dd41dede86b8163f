from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esfr_split.quadrature import (
    QuadratureKind,
    gauss_legendre,
    gauss_lobatto_legendre,
    legendre_eval,
    make_rule,
)


def monomial_integral(k: int) -> float:
    return 0.0 if k % 2 else 2.0 / (k + 1)


# {{{ Legendre evaluation


def test_legendre_low_degrees():
    assert legendre_eval(0, 0.7) == (1.0, 0.0)

    value, deriv = legendre_eval(1, 0.3)
    assert value == pytest.approx(0.3)
    assert deriv == pytest.approx(1.0)

    value, deriv = legendre_eval(2, 1 / math.sqrt(3))
    assert value == pytest.approx(0.0, abs=1e-15)
    assert deriv == pytest.approx(math.sqrt(3), rel=1e-14)


@given(p=st.integers(0, 20), x=st.floats(-1.0, 1.0))
def test_legendre_matches_numpy(p, x):
    coef = np.zeros(p + 1)
    coef[p] = 1.0
    ref = np.polynomial.legendre.Legendre(coef)

    value, deriv = legendre_eval(p, x)
    assert value == pytest.approx(ref(x), abs=1e-12)
    assert deriv == pytest.approx(ref.deriv()(x), abs=1e-10 * max(1, p * p))


def test_legendre_endpoint_values():
    for p in range(12):
        value, deriv = legendre_eval(p, np.array([-1.0, 1.0]))
        assert value == pytest.approx([(-1) ** p, 1.0])
        assert deriv == pytest.approx([(-1) ** (p - 1) * p * (p + 1) / 2, p * (p + 1) / 2])


def test_legendre_rejects_negative_degree():
    with pytest.raises(ValueError):
        legendre_eval(-1, 0.0)


# }}}


# {{{ rules


def test_gauss_legendre_small_rules():
    rule = gauss_legendre(1)
    assert rule.nodes == pytest.approx([0.0])
    assert rule.weights == pytest.approx([2.0])

    rule = gauss_legendre(2)
    assert rule.nodes == pytest.approx([-1 / math.sqrt(3), 1 / math.sqrt(3)], abs=1e-15)
    assert rule.weights == pytest.approx([1.0, 1.0], abs=1e-15)

    assert gauss_legendre(3).integrate(gauss_legendre(3).nodes ** 4) == pytest.approx(
        2 / 5, abs=1e-13
    )


def test_gauss_lobatto_small_rules():
    rule = gauss_lobatto_legendre(2)
    assert rule.nodes == pytest.approx([-1.0, 1.0])
    assert rule.weights == pytest.approx([1.0, 1.0])

    rule = gauss_lobatto_legendre(3)
    assert rule.nodes == pytest.approx([-1.0, 0.0, 1.0], abs=1e-15)
    assert rule.weights == pytest.approx([1 / 3, 4 / 3, 1 / 3], abs=1e-15)

    rule = gauss_lobatto_legendre(5)
    assert rule.integrate(rule.nodes**6) == pytest.approx(2 / 7, abs=1e-13)


def test_gauss_lobatto_five_points_closed_form():
    rule = gauss_lobatto_legendre(5)
    r = math.sqrt(3 / 7)
    assert rule.nodes == pytest.approx([-1, -r, 0, r, 1], abs=1e-15)
    assert rule.weights == pytest.approx([1 / 10, 49 / 90, 32 / 45, 49 / 90, 1 / 10], abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13, 21, 40, 64])
def test_gauss_legendre_matches_numpy(n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    rule = gauss_legendre(n)
    assert rule.nodes == pytest.approx(nodes, abs=1e-14)
    assert rule.weights == pytest.approx(weights, abs=1e-14)


@pytest.mark.parametrize("kind", list(QuadratureKind))
@pytest.mark.parametrize("n", range(2, 17))
def test_rule_invariants(kind, n):
    rule = make_rule(kind, n)

    assert rule.n == n
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(rule.weights > 0)
    assert abs(np.sum(rule.weights) - 2.0) <= 1e-13
    assert np.max(np.abs(rule.nodes + rule.nodes[::-1])) <= 1e-13

    for k in range(rule.exactness + 1):
        assert abs(rule.integrate(rule.nodes**k) - monomial_integral(k)) <= 1e-12

    if kind is QuadratureKind.GLL:
        assert rule.nodes[0] == -1.0
        assert rule.nodes[-1] == 1.0


@pytest.mark.parametrize("kind", list(QuadratureKind))
@pytest.mark.parametrize("n", range(2, 12))
def test_exactness_is_sharp(kind, n):
    rule = make_rule(kind, n)
    k = rule.exactness + 1
    # the next even degree is no longer integrated exactly
    k += k % 2
    assert abs(rule.integrate(rule.nodes**k) - monomial_integral(k)) > 1e-8


@pytest.mark.parametrize("n", range(4, 16))
def test_gl_and_gll_interiors_differ(n):
    # for odd n both rules contain the origin, which is the only shared node
    gl = gauss_legendre(n).nodes
    gll = gauss_lobatto_legendre(n).nodes[1:-1]
    gl, gll = gl[np.abs(gl) > 1e-14], gll[np.abs(gll) > 1e-14]
    assert np.min(np.abs(gl[:, None] - gll[None, :])) > 1e-6


@settings(max_examples=30)
@given(n=st.integers(1, 64))
def test_gauss_legendre_nodes_are_roots(n):
    rule = gauss_legendre(n)
    value, _ = legendre_eval(n, rule.nodes)
    assert np.max(np.abs(value)) <= 1e-13


def test_labels_and_errors():
    assert gauss_legendre(5).label == "GL(5)"
    assert gauss_lobatto_legendre(5).label == "GLL(5)"
    assert gauss_legendre(5).exactness == 9
    assert gauss_lobatto_legendre(5).exactness == 7

    with pytest.raises(ValueError):
        gauss_legendre(0)
    with pytest.raises(ValueError):
        gauss_lobatto_legendre(1)
    with pytest.raises(ValueError):
        make_rule("GR", 3)


# }}}
