from fractions import Fraction
from math import cos, pi, sqrt

import numpy as np
import pytest

from igablend.dispersion import (
    cosine_relation,
    dispersion_curve,
    spectrum_curve,
    symbol,
    verify_closed_forms,
)
from igablend.errors import InvalidParameter, OutOfBandError
from igablend.assembly import stencil
from igablend.quadrature import gauss, standard_rules


def test_spectrum_closed_form_g3():
    sym = symbol(2, "g+1")
    for t in (0.1, 0.5, 1.3):
        c = cos(t)
        expect = sqrt((40 - 20 * c - 20 * c * c) / (16 + 13 * c + c * c))
        assert abs(spectrum_curve(sym, t) - expect) < 1e-14
    # leading-order value; the next term is about 1.2e-6
    assert abs(spectrum_curve(sym, 0.5) - 0.500021701) < 2e-6


def test_spectrum_small_theta():
    sym = symbol(2, "g+1")
    assert abs(spectrum_curve(sym, 1e-4) / 1e-4 - 1) < 1e-8


def test_spectrum_optimal():
    d = spectrum_curve(symbol(2, "opt"), 0.5) - 0.5
    assert abs(d - 11 / 120960 * 0.5**7) < 1e-7 * 0.1


def test_dispersion_g3():
    assert abs(dispersion_curve(symbol(2, "g+1"), 0.5) - 0.499978297) < 2e-6
    assert abs(dispersion_curve(symbol(2, "g+1"), 1e-3) - 1e-3) < 1e-16


@pytest.mark.parametrize("p", [1, 2, 3, 5, 7])
def test_round_trip(p):
    for name in standard_rules(p):
        sym = symbol(p, name)
        for t in (0.1, 0.5, 1.0):
            assert abs(dispersion_curve(sym, spectrum_curve(sym, t)) - t) <= 1e-12


@pytest.mark.parametrize("p", range(1, 8))
def test_symbol_properties_and_monotonicity(p):
    for name in standard_rules(p):
        sym = symbol(p, name)
        assert abs(sym.s_hat(0.0)) < 1e-13 and abs(sym.m_hat(0.0) - 1) < 1e-14
        grid = np.linspace(pi / 200, pi * (1 - 1e-3), 200)
        assert all(sym.s_hat(t) > 0 for t in grid)
        vals = [spectrum_curve(sym, t) for t in grid]
        assert all(b > a for a, b in zip(vals, vals[1:])), name


@pytest.mark.parametrize("p", range(1, 8))
def test_duality_sign(p):
    for name in standard_rules(p):
        sym = symbol(p, name)
        t = 0.6
        s = spectrum_curve(sym, t) - t
        d = dispersion_curve(sym, t) - t
        assert s != 0 and np.sign(s) == -np.sign(d)


def test_out_of_band():
    with pytest.raises(OutOfBandError):
        dispersion_curve(symbol(2, "g+1"), 10.0)
    with pytest.raises(InvalidParameter):
        spectrum_curve(symbol(2, "g+1"), 4.0)


def test_closed_forms():
    for p, scales in ((2, 4), (3, 3)):
        report = verify_closed_forms(p)
        assert len(report) == scales and all(r.ok for r in report)
    with pytest.raises(InvalidParameter):
        verify_closed_forms(4)


def test_cosine_relation_g3():
    rel = cosine_relation(stencil(2, gauss(3)))
    scale = rel[0][0] / 20
    assert [(a / scale, b / scale) for a, b in rel] == [(20, 1), (20, 13), (-40, 16)]
