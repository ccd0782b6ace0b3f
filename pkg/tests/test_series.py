from fractions import Fraction

import pytest

from igablend.assembly import stencil
from igablend.errors import DegenerateSymbolError, InvalidParameter, NoSolutionError
from igablend.quadrature import QuadratureSpec, blend, gauss, lobatto, optimal_blend, parse_rule, standard_rules
from igablend.reference import O3_ALTERNATIVES, TAU
from igablend.series import (
    Poly,
    RationalSeries,
    blend_mass_series,
    dispersion_coefficients,
    expand_dispersion,
    expand_spectrum,
    find_optimal_mass,
    find_optimal_tau,
    format_coefficient,
)

F = Fraction


def _rule(name):
    kind = name.rstrip("0123456789")
    return (gauss if kind == "G" else lobatto)(int(name[len(kind):]))


def test_series_arithmetic():
    x = RationalSeries.identity(8)
    one = RationalSeries([1], 8)
    inv = (one + x).reciprocal()
    assert inv.coeffs[:4] == [1, -1, 1, -1]
    sq = (one + x).sqrt()
    assert (sq * sq).coeffs[:9] == (one + x).coeffs[:9]
    c = RationalSeries.cos(1, 8)
    assert c.coeffs[:5] == [1, 0, F(-1, 2), 0, F(1, 24)]


def test_reversion_roundtrip():
    f = RationalSeries([0, 1, 0, F(1, 3), 0, F(2, 15)], 9)
    g = f.reversion()
    assert f.compose(g).coeffs[:10] == RationalSeries.identity(9).coeffs[:10]


def test_poly_ring():
    a, b = Poly.var("a"), Poly.var("b")
    e = (a + b) * (a - b)
    assert e == a * a - b * b
    assert e.subs({"a": F(3), "b": F(1)}) == 8
    assert (a * 2 / 4) == a * F(1, 2)


def test_quadratic_spectrum():
    s = expand_spectrum(stencil(2, gauss(3)))
    assert s.coeffs[1] == 1 and s.coeffs[5] == F(1, 1440)
    assert all(c == 0 for c in s.coeffs[0::2])
    assert expand_spectrum(stencil(2, lobatto(3))).coeffs[5] == F(-1, 2880)


def test_quadratic_dispersion():
    d = expand_dispersion(stencil(2, gauss(3)))
    assert d.coeffs[:8] == [0, 1, 0, 0, 0, F(-1, 1440), 0, F(-1, 6720)]
    d = expand_dispersion(stencil(2, optimal_blend(2)))
    assert (d.coeffs[7], d.coeffs[9]) == (F(-11, 120960), F(-1, 345600))


def test_o7_spectrum():
    s = expand_spectrum(stencil(7, optimal_blend(7)), 17)
    from math import factorial

    assert s.coeffs[17] == F(91067, 15 * factorial(17))
    assert all(c == 0 for c in s.coeffs[2:17])


@pytest.mark.parametrize("p", range(1, 8))
def test_inverse_and_duality(p):
    for name, rule in standard_rules(p).items():
        sym = stencil(p, rule)
        s, d = expand_spectrum(sym), expand_dispersion(sym)
        assert s.compose(d).coeffs == RationalSeries.identity(s.order).coeffs
        lead = 2 * p + 3 if name == "opt" else 2 * p + 1
        assert all(c == 0 for c in d.coeffs[2:lead]), name
        assert d.coeffs[lead] != 0
        assert d.coeffs[lead] == -s.coeffs[lead]


def test_tau_values():
    for (p, a, b), tau in TAU.items():
        assert find_optimal_tau(p, _rule(a), _rule(b)) == tau
    assert find_optimal_tau(1, gauss(2), lobatto(2)) == F(1, 2)


def test_tau_needs_dependence():
    with pytest.raises(NoSolutionError):
        find_optimal_tau(2, gauss(3), gauss(4))


def test_blend_family_p2():
    # (3 tau - 1) / 2880 at L^5 and (5 + 7 tau) / 80640 at L^7, negated
    tau = F(1, 5)
    d = dispersion_coefficients(2, blend(tau, gauss(3), lobatto(3)))
    assert d.coeffs[5] == -(3 * tau - 1) / 2880
    assert d.coeffs[7] == -(5 + 7 * tau) / 80640


def test_optimal_mass():
    params, ser = find_optimal_mass(2)
    assert params == {"alpha": F(7, 720), "beta": F(19, 90)}
    assert ser.coeffs[7] == F(-11, 120960)
    params3, ser3 = find_optimal_mass(3)
    o3 = expand_dispersion(stencil(3, optimal_blend(3)), 9)
    assert ser3.coeffs[:10] == o3.coeffs[:10]
    with pytest.raises(InvalidParameter):
        find_optimal_mass(4)


def test_weighted_sum_rule_quadratic():
    c = {n: dispersion_coefficients(2, _rule(n)) for n in ("G3", "GL3", "G2")}
    o2 = dispersion_coefficients(2, optimal_blend(2))
    for (_, a, b), tau in ((k, v) for k, v in TAU.items() if k[0] == 2):
        spec = blend(tau, _rule(a), _rule(b))
        assert spec.terms and dispersion_coefficients(2, spec).coeffs == o2.coeffs
        at7 = tau * c[a].coeffs[7] + (1 - tau) * c[b].coeffs[7]
        at9 = tau * c[a].coeffs[9] + (1 - tau) * c[b].coeffs[9]
        assert at7 == o2.coeffs[7]
        assert at9 != o2.coeffs[9]


def test_three_rule_cubic_blends():
    o3 = blend_mass_series(3, optimal_blend(3), 9)
    for terms in O3_ALTERNATIVES:
        spec = QuadratureSpec(tuple((w, _rule(n)) for w, n in terms))
        assert blend_mass_series(3, spec, 9).coeffs == o3.coeffs


def test_degenerate_symbol():
    from igablend.assembly import StencilSymbol

    with pytest.raises(DegenerateSymbolError):
        expand_spectrum(StencilSymbol(2, (F(-1), F(1, 3), F(1, 6)), (F(1), F(0), F(0))))
    with pytest.raises(InvalidParameter):
        expand_spectrum(stencil(2, gauss(3)), 25)


def test_format_coefficient():
    assert format_coefficient(F(-11, 120960)) == "-11/120960"
    assert format_coefficient(parse_rule("opt", 2).terms[0][0]) == "1/3"
