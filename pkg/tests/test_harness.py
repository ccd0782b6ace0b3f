import math

import pytest

from igablend.errors import InvalidParameter, UnsafeRuleError
from igablend.harness import (
    CSV_HEADER,
    degradation_probe,
    ef_error_study,
    ev_error_study,
    exact_spectrum_position,
    fit_order,
    write_csv,
)


def test_fit_order_exact_powers():
    hs = [1 / 20, 1 / 40, 1 / 80, 1 / 160]
    assert fit_order([(h, 3 * h**2) for h in hs]) == pytest.approx(2.0, abs=1e-12)
    assert fit_order([(h, h**6) for h in hs]) == pytest.approx(6.0, abs=1e-12)
    with pytest.raises(InvalidParameter):
        fit_order([(0.1, 1), (0.05, 0.5)])


def test_ev_orders_quadratic():
    assert abs(ev_error_study(2, "opt", 1, 3).order - 6) <= 0.2
    assert abs(ev_error_study(2, "g+1", 1, 3).order - 4) <= 0.1


def test_error_ordering():
    for j in (3, 11):
        e = {r: ev_error_study(2, r, 1, j, [40, 80, 160]).rows[0][3] for r in ("gl+1", "g+1", "g+0")}
        assert e["gl+1"] < e["g+1"] < e["g+0"]


def test_ev_rows_sorted_and_positive():
    res = ev_error_study(2, "g+1", 1, 3, [80, 20, 40])
    assert [r[0] for r in res.rows] == [20, 40, 80]
    assert all(r[3] > 0 for r in res.rows)


def test_unresolvable_mode():
    with pytest.raises(InvalidParameter):
        ev_error_study(2, "g+1", 1, 30, [20, 40, 80])


def test_ef_orders():
    assert abs(ef_error_study(2, "opt", mode=3).order - 2.01) <= 0.05
    assert abs(ef_error_study(2, "opt", mode=3, norm="L2").order - 3) <= 0.1
    with pytest.raises(InvalidParameter):
        ef_error_study(2, "opt", d=2, mode=(1, 1))


def test_two_dimensional_order():
    res = ev_error_study(2, "opt", 2, (2, 2))
    assert abs(res.order - 6) <= 0.3


def test_degradation_probe():
    with pytest.raises(UnsafeRuleError):
        degradation_probe()
    assert degradation_probe(unsafe_rule=True).order < 3.5
    assert abs(ev_error_study(2, "g+1", 1, 3).order - 4) < 0.1


def test_exact_spectrum_position():
    assert exact_spectrum_position((1, 1), 4) == 0
    assert exact_spectrum_position((1, 2), 4) == 1
    assert exact_spectrum_position((2, 1), 4) == 2
    assert exact_spectrum_position((2, 2), 4) == 3


def test_csv_determinism():
    a = write_csv([ev_error_study(2, "opt", 1, 3, [20, 40, 80])])
    b = write_csv([ev_error_study(2, "opt", 1, 3, [20, 40, 80])])
    assert a == b
    assert a.splitlines()[0] == ",".join(CSV_HEADER)
    assert a.splitlines()[1].startswith("EV,2,O2,1,3,20,5.00000000000000028e-02,")
