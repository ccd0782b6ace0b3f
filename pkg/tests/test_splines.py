import random
from fractions import Fraction

import pytest

from igablend.errors import DomainError, InvalidParameter
from igablend.splines import (
    element_polynomials,
    element_tables,
    eval_basis,
    make_space,
)


def test_space_dimensions():
    s = make_space(1, 2)
    assert (s.dim, s.interior_dim) == (3, 1)
    s = make_space(2, 20)
    assert s.dim == 22 and s.h == Fraction(1, 20)


def test_open_knots_p7():
    s = make_space(7, 10)
    assert s.dim == 17
    assert s.knots[:8] == (Fraction(0),) * 8
    assert s.knots[-8:] == (Fraction(1),) * 8
    assert s.knots[8:-8] == tuple(Fraction(k, 10) for k in range(1, 10))


@pytest.mark.parametrize("p,N", [(0, 4), (8, 4), (2, 1)])
def test_invalid_space(p, N):
    with pytest.raises(InvalidParameter):
        make_space(p, N)


def test_eval_outside_domain():
    with pytest.raises(DomainError):
        eval_basis(make_space(2, 4), Fraction(5, 4))


def test_quadratic_boundary_element_midpoint():
    # open knots: the first element is not a uniform B-spline element
    vals = [v for _, v, _ in eval_basis(make_space(2, 2), Fraction(1, 4))]
    assert vals == [Fraction(1, 4), Fraction(5, 8), Fraction(1, 8)]


def test_quadratic_interior_element_midpoint():
    vals = [v for _, v, _ in eval_basis(make_space(2, 8), Fraction(9, 16))]
    assert vals == [Fraction(1, 8), Fraction(3, 4), Fraction(1, 8)]


def test_hat_nodal_value():
    out = eval_basis(make_space(1, 4), Fraction(1, 4))
    vals = {i: v for i, v, _ in out}
    assert vals.get(1) == 1
    assert all(v == 0 for i, v in vals.items() if i != 1)


def test_endpoint_closed():
    out = eval_basis(make_space(3, 5), Fraction(1))
    assert out[-1][0] == 7 and out[-1][1] == 1


@pytest.mark.parametrize("p", range(1, 8))
def test_partition_of_unity(p):
    rng = random.Random(p)
    s = make_space(p, 9)
    for _ in range(200):
        x = Fraction(rng.randint(0, 10**6), 10**6)
        assert sum(v for _, v, _ in eval_basis(s, x)) == 1
        xf = float(x)
        assert abs(sum(v for _, v, _ in eval_basis(s, xf)) - 1) <= 1e-14
        assert all(v >= 0 for _, v, _ in eval_basis(s, x))


@pytest.mark.parametrize("p", [1, 2, 3, 5])
def test_derivative_matches_finite_difference(p):
    s = make_space(p, 7)
    step = 1e-6
    for x in (0.13, 0.37, 0.61, 0.88):
        plus = {i: v for i, v, _ in eval_basis(s, x + step)}
        minus = {i: v for i, v, _ in eval_basis(s, x - step)}
        for i, _, d in eval_basis(s, x):
            fd = (plus.get(i, 0.0) - minus.get(i, 0.0)) / (2 * step)
            assert abs(fd - d) <= 1e-6 * max(1.0, abs(d))


def test_linear_element_polynomials():
    polys = element_polynomials(make_space(1, 4), 2)
    assert polys == ((Fraction(1, 2), Fraction(-1, 2)), (Fraction(1, 2), Fraction(1, 2)))


def test_quadratic_interior_polynomials_at_zero():
    polys = element_polynomials(make_space(2, 8), 4)
    assert tuple(c[0] for c in polys) == (Fraction(1, 8), Fraction(3, 4), Fraction(1, 8))


@pytest.mark.parametrize("p", range(1, 8))
def test_translation_invariance_and_unity(p):
    N = 3 * p + 2
    s = make_space(p, N)
    ref = element_polynomials(s, p)
    for e in range(p, N - p):
        assert element_polynomials(s, e) == ref
    for e in range(N):
        polys = element_polynomials(s, e)
        total = [sum(c[k] for c in polys) for k in range(p + 1)]
        assert total == [1] + [0] * p


def test_element_tables_match_eval():
    s = make_space(3, 6)
    t = [-0.5, 0.25]
    V, D = element_tables(s, 2, t)
    h = 1 / 6
    for row, tt in enumerate(t):
        x = (2 + (tt + 1) / 2) * h
        for i, v, d in eval_basis(s, x):
            assert abs(V[row, i - 2] - v) < 1e-14
            assert abs(D[row, i - 2] * 2 / h - d) < 1e-11
