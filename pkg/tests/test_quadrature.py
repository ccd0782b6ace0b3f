from fractions import Fraction
from math import sqrt

import numpy as np
import pytest

from igablend.errors import InvalidParameter, UnsupportedError
from igablend.quadrature import (
    QuadratureSpec,
    blend,
    gauss,
    lobatto,
    optimal_blend,
    parse_rule,
    rational_moments,
)
from igablend.reference import TAU


def test_gauss_small():
    assert np.allclose(gauss(2).nodes, [-1 / sqrt(3), 1 / sqrt(3)], atol=1e-15)
    assert np.allclose(gauss(2).weights, [1, 1], atol=1e-15)
    assert np.allclose(gauss(3).nodes, [-sqrt(0.6), 0, sqrt(0.6)], atol=1e-15)
    assert np.allclose(gauss(3).weights, [5 / 9, 8 / 9, 5 / 9], atol=1e-15)


def test_lobatto_small():
    assert np.allclose(lobatto(2).nodes, [-1, 1])
    assert np.allclose(lobatto(3).weights, [1 / 3, 4 / 3, 1 / 3], atol=1e-15)
    assert np.allclose(lobatto(4).nodes, [-1, -1 / sqrt(5), 1 / sqrt(5), 1], atol=1e-15)


@pytest.mark.parametrize("n", range(1, 9))
def test_gauss_matches_numpy(n):
    x, w = np.polynomial.legendre.leggauss(n)
    assert np.allclose(gauss(n).nodes, x, atol=1e-15, rtol=0)
    assert np.allclose(gauss(n).weights, w, atol=1e-15, rtol=0)


@pytest.mark.parametrize("rule", [gauss(n) for n in range(1, 9)] + [lobatto(n) for n in range(2, 9)])
def test_rule_invariants(rule):
    x, w = rule.nodes, rule.weights
    assert np.all(np.diff(x) > 0)
    assert np.allclose(x, -x[::-1], atol=0) and np.allclose(w, w[::-1], atol=0)
    assert abs(w.sum() - 2) < 1e-14
    m = rational_moments(rule, rule.exactness + 1).moments
    for k in range(rule.exactness + 1):
        exact = Fraction(2, k + 1) if k % 2 == 0 else 0
        assert m[k] == exact
        assert abs(np.dot(w, x**k) - float(exact)) < 1e-14
    assert m[rule.exactness + 1] != Fraction(2, rule.exactness + 2)


def test_moment_examples():
    m = rational_moments(gauss(2), 4).moments
    assert (m[0], m[2], m[4]) == (2, Fraction(2, 3), Fraction(2, 9))
    assert rational_moments(lobatto(3), 4)[4] == Fraction(2, 3)
    assert rational_moments(gauss(3), 6)[6] == Fraction(6, 25)


def test_moments_match_float_nodes():
    for rule in (gauss(7), lobatto(8)):
        m = rational_moments(rule, 16).moments
        for k, v in enumerate(m):
            assert abs(float(v) - np.dot(rule.weights, rule.nodes**k)) < 1e-14


def test_moment_order_limit():
    with pytest.raises(UnsupportedError):
        rational_moments(gauss(3), 17)


def test_rule_ranges():
    with pytest.raises(InvalidParameter):
        gauss(9)
    with pytest.raises(InvalidParameter):
        lobatto(1)


def test_blend_identity_and_sum():
    g3 = gauss(3)
    assert blend(1, g3, lobatto(3)).terms == ((Fraction(1), g3),)
    b = blend(Fraction(1, 3), g3, lobatto(3))
    assert dict((r.name, c) for c, r in b.terms) == {"G3": Fraction(1, 3), "GL3": Fraction(2, 3)}
    with pytest.raises(InvalidParameter):
        QuadratureSpec(((Fraction(1, 2), g3),))


def test_cubic_blend():
    b = optimal_blend(3)
    assert dict((r.name, c) for c, r in b.terms) == {"G4": Fraction(-3, 2), "GL4": Fraction(5, 2)}


def test_optimal_blend_p4_and_p1():
    assert dict((r.name, c) for c, r in optimal_blend(4).terms) == {
        "G5": Fraction(-79, 5), "GL5": Fraction(84, 5)
    }
    assert dict((r.name, c) for c, r in optimal_blend(1).terms) == {
        "G2": Fraction(1, 2), "GL2": Fraction(1, 2)
    }


def test_optimal_blend_exactness():
    # the blend keeps the common exactness of its constituents
    for p in range(2, 8):
        assert optimal_blend(p).exactness == 2 * p - 1


@pytest.mark.parametrize("p", range(2, 8))
def test_blend_coefficient_relation(p):
    c1 = 1 - TAU[(p, f"G{p + 1}", f"GL{p + 1}")]
    c2 = TAU[(p, f"G{p + 1}", f"G{p}")] - 1
    assert p * c2 - (p + 1) * c1 == 0


def test_under_integration_signature():
    assert rational_moments(gauss(2), 4)[4] == Fraction(2, 9) != Fraction(2, 5)
    assert rational_moments(lobatto(3), 4)[4] == Fraction(2, 3) != Fraction(2, 5)


def test_parse_rule():
    assert parse_rule("g+1", 2).rules == (gauss(3),)
    assert parse_rule("gl+1", 3).rules == (lobatto(4),)
    assert parse_rule("g+0", 2).rules == (gauss(2),)
    assert parse_rule("GL5", 2).rules == (lobatto(5),)
    assert parse_rule("opt", 2) == optimal_blend(2)
    b = parse_rule("blend:2:g+1:g+0", 2)
    assert dict((r.name, c) for c, r in b.terms) == {"G3": 2, "G2": -1}
    for bad in ("x", "blend:1:g+1", "g+9"):
        with pytest.raises(InvalidParameter):
            parse_rule(bad, 2)
