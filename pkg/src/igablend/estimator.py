"""A posteriori eigenpair error estimator and effectivity indices.

For a discrete eigenpair (lam, u) normalized in the quadrature mass
b~(u, u) = 1 the estimator is

    R = sqrt(|a(u, u) - lam b(u, u)|),

with a and b integrated exactly.  Both quadratic forms and the residual
are evaluated in rational arithmetic: R^2 is a difference of O(1)
numbers that can be as small as 1e-12.

Errors against the exact eigenfunctions sqrt(2) sin(j pi x) use a
10-point Gauss rule per element, evaluated element-locally.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import pi, sqrt

import numpy as np

from .assembly import assemble_1d
from .eigensolve import rayleigh_quotient, solve_gevp
from .errors import InvalidParameter
from .quadrature import as_spec, gauss, parse_rule
from .splines import element_tables, make_space

ERROR_POINTS = 10
UNRELIABLE_ERROR = 1e-13


@lru_cache(maxsize=None)
def exact_matrices(p, N):
    """Exactly integrated (K, M) for degree p on N elements (rational)."""
    rule = gauss(p + 1)
    return assemble_1d(make_space(p, N), rule, rule, exact=True)


@lru_cache(maxsize=None)
def _matrices(p, N, spec):
    return assemble_1d(make_space(p, N), spec, spec, exact=True)


def exact_eigenvalue(j):
    return (j * pi) ** 2


def _full(space, u):
    u = np.asarray(u, dtype=float)
    if len(u) != space.interior_dim:
        raise InvalidParameter(f"vector length {len(u)} != {space.interior_dim} interior DOFs")
    return np.concatenate(([0.0], u, [0.0]))


def sample(space, u, points=ERROR_POINTS):
    """Discrete function on a per-element Gauss grid.

    Returns ``(x, w, uh, duh)``, each of shape (N, points).
    """
    t, wt = np.polynomial.legendre.leggauss(points)
    h = float(space.h)
    p, N = space.degree, space.elements
    c = _full(space, u)
    x = (np.arange(N)[:, None] + (t[None, :] + 1) / 2) * h
    w = np.tile(wt * h / 2, (N, 1))
    uh = np.empty((N, points))
    duh = np.empty((N, points))
    for e in range(N):
        V, D = element_tables(space, e, t)
        loc = c[e : e + p + 1]
        uh[e] = V @ loc
        duh[e] = (D @ loc) * (2 / h)
    return x, w, uh, duh


def _mode(j, x):
    s = sqrt(2.0)
    return s * np.sin(j * pi * x), s * j * pi * np.cos(j * pi * x)


def orient(space, u, j):
    """Flip ``u`` so that b(u_j, u) > 0."""
    x, w, uh, _ = sample(space, u)
    ue, _ = _mode(j, x)
    return -np.asarray(u) if np.sum(w * ue * uh) < 0 else np.asarray(u)


def eigenfunction_errors(space, u, j):
    """(H1-seminorm, L2) errors of ``u`` against sqrt(2) sin(j pi x).

    The H1 seminorm equals the energy norm of this problem.
    """
    x, w, uh, duh = sample(space, u)
    ue, due = _mode(j, x)
    if np.sum(w * ue * uh) < 0:
        uh, duh = -uh, -duh
    return sqrt(np.sum(w * (due - duh) ** 2)), sqrt(np.sum(w * (ue - uh) ** 2))


def residual(space, lambda_h, u_h, rule=None):
    """Estimator R for the discrete pair (lambda_h, u_h).

    ``u_h`` is scaled to b~(u, u) = 1.  When ``rule`` (the quadrature of the
    discrete problem) is given, lambda_h is replaced by the exact Rayleigh
    quotient of u_h for that rule, removing float round-off from R.
    """
    p, N = space.degree, space.elements
    if len(u_h) != space.interior_dim:
        raise InvalidParameter(f"vector length {len(u_h)} != {space.interior_dim} interior DOFs")
    K, M = exact_matrices(p, N)
    x = [Fraction(float(v)) for v in u_h]
    if rule is not None:
        Kt, Mt = _matrices(p, N, as_spec(rule))
        bt = Mt.quadratic_form(x)
        lam = Kt.quadratic_form(x) / bt
    else:
        bt = None
        lam = Fraction(lambda_h)
    a = K.quadratic_form(x)
    b = M.quadratic_form(x)
    r2 = abs(a - lam * b)
    if bt is not None:
        r2 /= bt
    return sqrt(float(r2))


@dataclass(frozen=True)
class EstimatorReport:
    p: int
    rule: str
    N: int
    mode: int
    h: float
    lambda_h: float
    R: float
    energy_error: float
    EI: float
    reliable: bool


def estimate(p, rule, N, j):
    """Estimator report for mode ``j`` of degree ``p`` with ``rule`` on both forms."""
    spec = parse_rule(rule, p) if isinstance(rule, str) else as_spec(rule)
    space = make_space(p, N)
    if not 1 <= j <= space.interior_dim:
        raise InvalidParameter(f"mode {j} not resolvable with {space.interior_dim} DOFs")
    K, M = _matrices(p, N, spec)
    sol = solve_gevp(K, M)
    u = orient(space, sol.vector(j - 1), j)
    lam = rayleigh_quotient(K, M, u)
    R = residual(space, lam, u, rule=spec)
    err, _ = eigenfunction_errors(space, u, j)
    reliable = err > UNRELIABLE_ERROR and R > 0
    EI = R / err if err > 0 else float("nan")
    return EstimatorReport(p, str(spec), N, j, 1.0 / N, float(lam), R, err, EI, reliable)


@dataclass(frozen=True)
class EffectivityStudy:
    reports: tuple
    orders: dict


def effectivity_study(p, rule, modes, Ns):
    """EI for every (mode, N) and the fitted order of |EI - 1| per mode."""
    from .harness import fit_order

    reports = tuple(estimate(p, rule, N, j) for j in modes for N in sorted(Ns))
    orders = {}
    for j in modes:
        rows = [(r.h, abs(r.EI - 1)) for r in reports if r.mode == j and r.reliable]
        orders[j] = fit_order(rows) if len(rows) >= 3 else float("nan")
    return EffectivityStudy(reports, orders)


def pythagorean_identity(p, N, rule, j):
    """Both sides of the generalized Pythagorean eigenvalue identity.

    Discrete mode j (b~-normalized, oriented) against u_j = sqrt(2) sin(j pi x):

      |u - u~|_E^2  =  lam~ - lam + lam |u - u~|_0^2
                       + (|u~|_E^2 - |u~|_{E,h}^2) + lam (1 - |u~|_0^2)
    """
    spec = parse_rule(rule, p) if isinstance(rule, str) else as_spec(rule)
    space = make_space(p, N)
    Kt, Mt = _matrices(p, N, spec)
    K, M = exact_matrices(p, N)
    sol = solve_gevp(Kt, Mt)
    u = orient(space, sol.vector(j - 1), j)
    x = [Fraction(float(v)) for v in u]
    bt = Mt.quadratic_form(x)
    scale = 1 / bt
    lam_t = float(Kt.quadratic_form(x) / bt)
    energy_h = float(Kt.quadratic_form(x) * scale)
    energy = float(K.quadratic_form(x) * scale)
    mass = float(M.quadratic_form(x) * scale)
    u = u / sqrt(float(bt))
    e_E, e_0 = eigenfunction_errors(space, u, j)
    lam = exact_eigenvalue(j)
    lhs = e_E**2
    rhs = lam_t - lam + lam * e_0**2 + (energy - energy_h) + lam * (1 - mass)
    return lhs, rhs
