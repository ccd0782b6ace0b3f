"""Convergence studies: eigenvalue, eigenfunction and effectivity errors."""
import csv
import io
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .assembly import assemble_1d, assemble_tensor
from .eigensolve import (
    refined_eigenvalue,
    refined_tensor_eigenvalue,
    solve_dense,
    solve_gevp,
    solve_tensor,
)
from .errors import InvalidParameter, UnsafeRuleError
from .estimator import eigenfunction_errors, exact_matrices, orient
from .quadrature import as_spec, parse_rule
from .splines import make_space

EV, EF_H1, EF_L2, EI = "EV", "EF_H1", "EF_L2", "EI"
DEFAULT_NS_1D = (20, 40, 80, 160, 320)
DEFAULT_NS_2D = (4, 8, 16, 32, 64)
DENSE_CHECK_MAX = 1600
CSV_HEADER = ("study", "p", "rule", "dim", "mode", "N", "h", "value", "error", "order_hint")

mpmath.mp.dps = 40


def fit_order(rows):
    """Least-squares slope of log(error) against log(h) for ``[(h, error), ...]``."""
    rows = list(rows)
    if len(rows) < 3:
        raise InvalidParameter(f"need at least 3 rows to fit an order, got {len(rows)}")
    h = np.log([float(r[0]) for r in rows])
    e = np.log([float(r[1]) for r in rows])
    return float(np.polyfit(h, e, 1)[0])


@dataclass
class StudyResult:
    """Rows ``(N, h, value, error)`` sorted by decreasing h, plus the fitted order."""

    kind: str
    p: int
    rule: str
    dim: int
    mode: tuple
    rows: list
    order: float = float("nan")
    fit_rows: int = 0
    timings: dict = field(default_factory=dict)

    def fit(self, last=None):
        rows = [(r[1], r[3]) for r in self.rows]
        if last:
            rows = rows[-last:]
        self.order = fit_order(rows)
        self.fit_rows = len(rows)
        return self.order

    @property
    def errors(self):
        return [r[3] for r in self.rows]


def _spec(rule, p):
    return parse_rule(rule, p) if isinstance(rule, str) else as_spec(rule)


def _mode_tuple(mode, d):
    m = (mode,) if isinstance(mode, int) else tuple(mode)
    if len(m) != d:
        raise InvalidParameter(f"mode {mode} does not match dimension {d}")
    if any(k < 1 for k in m):
        raise InvalidParameter(f"mode indices are 1-based, got {mode}")
    return m


def default_fit_rows(p, kind=EV):
    """Rows used for the order fit: the three finest meshes for p >= 4."""
    return 3 if p >= 4 else None


def exact_spectrum_position(mode, n_axis):
    """Index of ``mode`` in the ascending exact tensor spectrum (ties lexicographic)."""
    import itertools

    keys = sorted(
        (sum(k * k for k in m), m)
        for m in itertools.product(range(1, n_axis + 1), repeat=len(mode))
    )
    return [m for _, m in keys].index(tuple(mode))


def _rel_error(value, exact):
    v = mpmath.mpf(value.numerator) / value.denominator if isinstance(value, Fraction) else mpmath.mpf(value)
    return float(abs(v - exact) / exact)


def eigenvalue_1d(p, rule, N, j, stiffness_rule=None, allow_unsafe=False):
    """Refined discrete eigenvalue j (exact Rayleigh quotient, a Fraction)."""
    spec = _spec(rule, p)
    kspec = spec if stiffness_rule is None else _spec(stiffness_rule, p)
    space = make_space(p, N)
    if not 1 <= j <= space.interior_dim:
        raise InvalidParameter(f"mode {j} unresolvable with {space.interior_dim} DOFs at N={N}")
    K, M = assemble_1d(space, kspec, spec, exact=True, allow_unsafe=allow_unsafe)
    sol = solve_gevp(K, M)
    return refined_eigenvalue(K, M, sol, j - 1)


def eigenvalue_tensor(p, rule, N, mode, dense=False):
    """Discrete eigenvalue paired with exact ``mode`` by sorted position.

    Returns ``(value, axis_modes)``; the value is an exact sum of refined axis
    eigenvalues, or a float from the dense materialized solve when ``dense``.
    """
    spec = _spec(rule, p)
    d = len(mode)
    space = make_space(p, N)
    n = space.interior_dim
    if max(mode) > n:
        raise InvalidParameter(f"mode {mode} unresolvable with {n} DOFs per axis at N={N}")
    op = assemble_tensor([space] * d, spec, spec, exact=True)
    pos = exact_spectrum_position(mode, n)
    if dense:
        if op.dim > DENSE_CHECK_MAX:
            raise InvalidParameter(f"dense cross-check limited to dimension {DENSE_CHECK_MAX}")
        Kd, Md = op.to_dense()
        return float(solve_dense(Kd, Md).eigenvalues[pos]), None
    sol = solve_tensor(op)
    return refined_tensor_eigenvalue(op, sol, pos), sol.modes[pos]


def ev_error_study(p, rule, d=1, mode=3, Ns=None, fit_last=None, stiffness_rule=None, allow_unsafe=False):
    """Relative eigenvalue errors |lam_h - lam| / lam over a mesh sequence."""
    m = _mode_tuple(mode, d)
    if d not in (1, 2, 3):
        raise InvalidParameter(f"dimension must be 1, 2 or 3, got {d}")
    Ns = sorted(Ns or (DEFAULT_NS_1D if d == 1 else DEFAULT_NS_2D))
    exact = mpmath.pi**2 * sum(k * k for k in m)
    rows, timings = [], {}
    for N in Ns:
        t0 = time.perf_counter()
        if d == 1:
            value = eigenvalue_1d(p, rule, N, m[0], stiffness_rule, allow_unsafe)
        else:
            value, _ = eigenvalue_tensor(p, rule, N, m)
        timings[N] = time.perf_counter() - t0
        rows.append((N, 1.0 / N, float(value), _rel_error(value, exact)))
    label = str(_spec(rule, p)) if stiffness_rule is None else f"{_spec(stiffness_rule, p)}/{_spec(rule, p)}"
    res = StudyResult(EV, p, label, d, m, rows, timings=timings)
    res.fit(fit_last if fit_last is not None else default_fit_rows(p))
    return res


def eigenfunction(p, rule, N, j, normalization="l2"):
    """Oriented discrete eigenvector j; ``normalization`` is ``"b"`` (quadrature mass) or ``"l2"``."""
    spec = _spec(rule, p)
    space = make_space(p, N)
    if not 1 <= j <= space.interior_dim:
        raise InvalidParameter(f"mode {j} unresolvable with {space.interior_dim} DOFs at N={N}")
    K, M = assemble_1d(space, spec, spec, exact=True)
    sol = solve_gevp(K, M)
    u = orient(space, sol.vector(j - 1), j)
    if normalization == "l2":
        _, Me = exact_matrices(p, N)
        u = u / np.sqrt(Me.to_float().quadratic_form(u))
    elif normalization != "b":
        raise InvalidParameter(f"normalization must be 'b' or 'l2', got {normalization!r}")
    return space, u


def ef_error_study(p, rule, d=1, mode=3, Ns=None, norm="H1", normalization="l2", fit_last=None):
    """Eigenfunction errors in the H1 seminorm or the L2 norm."""
    if d != 1:
        raise InvalidParameter("eigenfunction studies are one-dimensional")
    if norm not in ("H1", "L2"):
        raise InvalidParameter(f"norm must be H1 or L2, got {norm!r}")
    (j,) = _mode_tuple(mode, 1)
    Ns = sorted(Ns or DEFAULT_NS_1D)
    rows, timings = [], {}
    for N in Ns:
        t0 = time.perf_counter()
        space, u = eigenfunction(p, rule, N, j, normalization)
        h1, l2 = eigenfunction_errors(space, u, j)
        err = h1 if norm == "H1" else l2
        timings[N] = time.perf_counter() - t0
        rows.append((N, 1.0 / N, err, err))
    kind = EF_H1 if norm == "H1" else EF_L2
    res = StudyResult(kind, p, str(_spec(rule, p)), 1, (j,), rows, timings=timings)
    res.fit(fit_last if fit_last is not None else default_fit_rows(p))
    return res


def ei_study(p, rule="opt", mode=1, Ns=(5, 10, 20, 40)):
    """Effectivity indices as a StudyResult; the fitted order is that of |EI - 1|."""
    from .estimator import estimate

    rows, timings = [], {}
    for N in sorted(Ns):
        t0 = time.perf_counter()
        r = estimate(p, rule, N, mode)
        timings[N] = time.perf_counter() - t0
        rows.append((N, 1.0 / N, r.EI, abs(r.EI - 1)))
    res = StudyResult(EI, p, str(_spec(rule, p)), 1, (mode,), rows, timings=timings)
    res.fit()
    return res


def degradation_probe(p=2, stiffness_rule="GL2", mass_rule="g+1", mode=3, Ns=None, unsafe_rule=False):
    """EV study with an under-integrated stiffness form; needs ``unsafe_rule=True``."""
    if not unsafe_rule:
        raise UnsafeRuleError("the degradation probe under-integrates stiffness; pass unsafe_rule=True")
    return ev_error_study(p, mass_rule, 1, mode, Ns, stiffness_rule=stiffness_rule, allow_unsafe=True)


def _mode_label(mode):
    return ";".join(str(k) for k in mode)


def write_csv(results, stream=None):
    """Canonical CSV of study rows; returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for res in sorted(results, key=lambda r: (r.kind, r.p, r.rule, r.dim, r.mode)):
        for N, h, value, err in res.rows:
            w.writerow(
                (res.kind, res.p, res.rule, res.dim, _mode_label(res.mode), N,
                 f"{h:.17e}", f"{value:.17e}", f"{err:.17e}", f"{res.order:.17e}")
            )
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text
