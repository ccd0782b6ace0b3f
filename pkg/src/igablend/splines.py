"""Uniform open-knot B-spline spaces on [0, 1].

Knots are stored as exact rationals.  Evaluation follows the Cox-de Boor
recursion and works in whatever arithmetic the evaluation point carries:
pass a :class:`~fractions.Fraction` to get exact values, a float to get
floating-point values.

Element-local representations map element ``e`` = [e h, (e+1) h] onto the
reference interval [-1, 1] via ``x = (e + (t + 1)/2) h``.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .errors import DomainError, InvalidParameter

MAX_DEGREE = 7


@dataclass(frozen=True)
class SplineSpace:
    """Maximal-continuity B-spline space of degree ``degree`` on ``elements`` cells."""

    degree: int
    elements: int

    def __post_init__(self):
        if not isinstance(self.degree, (int, np.integer)) or not 1 <= self.degree <= MAX_DEGREE:
            raise InvalidParameter(f"degree must be in 1..{MAX_DEGREE}, got {self.degree!r}")
        if not isinstance(self.elements, (int, np.integer)) or self.elements < 2:
            raise InvalidParameter(f"need at least 2 elements, got {self.elements!r}")

    @property
    def continuity(self):
        return self.degree - 1

    @property
    def h(self):
        return Fraction(1, self.elements)

    @property
    def dim(self):
        return self.elements + self.degree

    @property
    def interior_dim(self):
        """Dimension after eliminating the two boundary functions."""
        return self.dim - 2

    @cached_property
    def knots(self):
        p, N = self.degree, self.elements
        return (
            (Fraction(0),) * (p + 1)
            + tuple(Fraction(k, N) for k in range(1, N))
            + (Fraction(1),) * (p + 1)
        )

    def element_of(self, x):
        """Index of the element containing ``x``; x = 1 belongs to the last one."""
        e = int(np.floor(x * self.elements))
        return min(max(e, 0), self.elements - 1)


def make_space(p, N):
    return SplineSpace(int(p), int(N))


def _basis_funs(knots, span, x, p):
    """Nonzero degree-``p`` functions at ``x`` plus the degree ``p-1`` ones.

    Standard triangular Cox-de Boor scheme (no divisions by zero since
    the span has positive length).
    """
    one = x * 0 + 1
    N = [one]
    lower = N
    left = [None] * (p + 1)
    right = [None] * (p + 1)
    for j in range(1, p + 1):
        left[j] = x - knots[span + 1 - j]
        right[j] = knots[span + j] - x
        saved = x * 0
        new = []
        for r in range(j):
            temp = N[r] / (right[r + 1] + left[j - r])
            new.append(saved + right[r + 1] * temp)
            saved = left[j - r] * temp
        new.append(saved)
        lower, N = N, new
    return N, lower


def _local_eval(space, e, x):
    p = space.degree
    knots = space.knots if isinstance(x, Fraction) else tuple(float(k) for k in space.knots)
    span = e + p
    vals, lower = _basis_funs(knots, span, x, p)
    ders = []
    for i in range(p + 1):
        # B'_{a,p} = p B_{a,p-1}/(t_{a+p}-t_a) - p B_{a+1,p-1}/(t_{a+p+1}-t_{a+1})
        a = span - p + i
        d = x * 0
        if i >= 1:
            d = d + p * lower[i - 1] / (knots[a + p] - knots[a])
        if i < p:
            d = d - p * lower[i] / (knots[a + p + 1] - knots[a + 1])
        ders.append(d)
    return vals, ders


def eval_basis(space, x):
    """Return ``[(index, value, derivative), ...]`` for the p+1 functions alive at x.

    Indices refer to the unreduced basis 0..dim-1.  Exact when ``x`` is a
    Fraction.
    """
    if not 0 <= x <= 1:
        raise DomainError(f"x = {x!r} outside [0, 1]")
    e = space.element_of(x)
    vals, ders = _local_eval(space, e, x)
    return [(e + i, v, d) for i, (v, d) in enumerate(zip(vals, ders))]


def _knot_signature(space, e):
    """Element-local knot window, normalised so the element is [0, 1]."""
    p = space.degree
    k = space.knots
    window = k[e + 1 : e + 2 * p + 1]
    return tuple((t - k[e + p]) * space.elements for t in window)


@lru_cache(maxsize=None)
def _element_polys_cached(p, signature):
    # Rebuild a representative space/element with the same local knot pattern
    # and interpolate the basis at p+1 rational reference points.
    ts = [Fraction(2 * (k + 1), p + 2) - 1 for k in range(p + 1)]
    # Local Cox-de Boor on the normalised window; the element is [0, 1].
    knots = (None,) + signature  # span index p maps to knots[p] = 0
    rows = [[None] * (p + 1) for _ in range(p + 1)]
    for col, t in enumerate(ts):
        x = (t + 1) / 2
        vals, _ = _basis_funs(knots, p, x, p)
        for i in range(p + 1):
            rows[i][col] = vals[i]
    V = [[t**k for k in range(p + 1)] for t in ts]
    return tuple(tuple(_solve_exact(V, rows[i])) for i in range(p + 1))


def _solve_exact(A, b):
    """Gauss-Jordan elimination over the rationals."""
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [v * inv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [vr - f * vc for vr, vc in zip(M[r], M[c])]
    return [M[i][n] for i in range(n)]


def element_polynomials(space, e):
    """Exact coefficients of the p+1 local basis polynomials on element ``e``.

    Row ``i`` holds the ascending-power coefficients in the reference
    variable t in [-1, 1] of global function ``e + i``.
    """
    if not 0 <= e < space.elements:
        raise InvalidParameter(f"element index {e} out of range 0..{space.elements - 1}")
    return _element_polys_cached(space.degree, _knot_signature(space, e))


def element_signature(space, e):
    """Hashable key identifying elements with identical local polynomials."""
    return (space.degree, _knot_signature(space, e))


def poly_derivative(coeffs):
    return tuple(k * c for k, c in enumerate(coeffs))[1:]


@lru_cache(maxsize=None)
def _float_tables(p, signature, t_key):
    polys = _element_polys_cached(p, signature)
    t = np.asarray(t_key, dtype=float)
    V = np.empty((len(t), p + 1))
    D = np.empty((len(t), p + 1))
    for i, c in enumerate(polys):
        cf = np.array([float(v) for v in c])
        V[:, i] = np.polynomial.polynomial.polyval(t, cf)
        D[:, i] = np.polynomial.polynomial.polyval(t, np.polynomial.polynomial.polyder(cf))
    V.setflags(write=False)
    D.setflags(write=False)
    return V, D


def element_tables(space, e, t):
    """Float values and t-derivatives of the local basis at reference points ``t``.

    Returns ``(V, D)`` with shape ``(len(t), p+1)``.  Multiply ``D`` by
    ``2/h`` to get x-derivatives.
    """
    key = tuple(float(v) for v in np.atleast_1d(t))
    return _float_tables(space.degree, _knot_signature(space, e), key)
