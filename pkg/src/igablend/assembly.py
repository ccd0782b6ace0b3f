"""Stiffness / mass assembly for uniform B-spline spaces.

Blended rules are assembled as the signed sum of single-rule assemblies.
Two scalar modes exist: ``exact=True`` produces matrices of Fractions
using the rules' rational moments, ``exact=False`` evaluates element
polynomials at float nodes.  Boundary conditions are homogeneous
Dirichlet, imposed by dropping the first and last basis functions.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce

import numpy as np

from .errors import InvalidParameter, UnsafeRuleError
from .quadrature import as_spec, rational_moments
from .splines import (
    SplineSpace,
    _element_polys_cached,
    _knot_signature,
    element_tables,
    make_space,
    poly_derivative,
)

MAX_DENSE = 5000


class BandedSymMatrix:
    """Symmetric band matrix stored by diagonal offset 0..bandwidth.

    ``bands[k][i]`` is entry (i, i+k).  In exact mode entries are
    Fractions held in lists, otherwise float numpy arrays.
    """

    def __init__(self, bands, exact=False):
        self.exact = exact
        if exact:
            self.bands = [list(b) for b in bands]
        else:
            self.bands = [np.asarray(b, dtype=float) for b in bands]
        self.n = len(self.bands[0])
        self.bandwidth = len(self.bands) - 1
        for k, b in enumerate(self.bands):
            if len(b) != max(self.n - k, 0):
                raise InvalidParameter("band lengths inconsistent with dimension")

    @classmethod
    def zeros(cls, n, bandwidth, exact=False):
        if exact:
            bands = [[Fraction(0)] * max(n - k, 0) for k in range(bandwidth + 1)]
        else:
            bands = [np.zeros(max(n - k, 0)) for k in range(bandwidth + 1)]
        return cls(bands, exact)

    def __getitem__(self, ij):
        i, j = ij
        if i > j:
            i, j = j, i
        k = j - i
        if k > self.bandwidth:
            return Fraction(0) if self.exact else 0.0
        return self.bands[k][i]

    def to_dense(self):
        if self.n > MAX_DENSE:
            raise InvalidParameter(f"dense materialization limited to {MAX_DENSE} rows")
        if self.exact:
            A = np.empty((self.n, self.n), dtype=object)
            A.fill(Fraction(0))
        else:
            A = np.zeros((self.n, self.n))
        for k, b in enumerate(self.bands):
            for i in range(self.n - k):
                A[i, i + k] = b[i]
                A[i + k, i] = b[i]
        return A

    def to_float(self):
        if not self.exact:
            return self
        return BandedSymMatrix([np.array([float(v) for v in b]) for b in self.bands])

    def row(self, i):
        """Full row ``i`` as a list (length n)."""
        return [self[i, j] for j in range(self.n)]

    def matvec(self, x):
        if self.exact:
            y = [Fraction(0)] * self.n
            for k, b in enumerate(self.bands):
                for i, v in enumerate(b):
                    if v:
                        y[i] += v * x[i + k]
                        if k:
                            y[i + k] += v * x[i]
            return y
        x = np.asarray(x, dtype=float)
        y = self.bands[0] * x
        for k in range(1, self.bandwidth + 1):
            b = self.bands[k]
            y[:-k] += b * x[k:]
            y[k:] += b * x[:-k]
        return y

    def quadratic_form(self, x):
        """x^T A x; exact when the matrix is exact and x holds Fractions."""
        if self.exact:
            total = Fraction(0)
            for k, b in enumerate(self.bands):
                w = 1 if k == 0 else 2
                s = Fraction(0)
                for i, v in enumerate(b):
                    if v:
                        s += v * x[i] * x[i + k]
                total += w * s
            return total
        return float(np.dot(x, self.matvec(x)))

    def total(self):
        """Sum of all entries."""
        if self.exact:
            return sum(b_sum for b_sum in (sum(b, Fraction(0)) * (1 if k == 0 else 2)
                                           for k, b in enumerate(self.bands)))
        return float(sum(b.sum() * (1 if k == 0 else 2) for k, b in enumerate(self.bands)))

    def _combine(self, other, fa, fb):
        if self.exact != other.exact or self.n != other.n:
            raise InvalidParameter("incompatible matrices")
        w = max(self.bandwidth, other.bandwidth)
        out = BandedSymMatrix.zeros(self.n, w, self.exact)
        for k in range(w + 1):
            a = self.bands[k] if k <= self.bandwidth else None
            b = other.bands[k] if k <= other.bandwidth else None
            if self.exact:
                out.bands[k] = [
                    fa * (a[i] if a else 0) + fb * (b[i] if b else 0)
                    for i in range(self.n - k)
                ]
            else:
                out.bands[k] = fa * (a if a is not None else 0) + fb * (b if b is not None else 0)
        return out

    def __add__(self, other):
        return self._combine(other, 1, 1)

    def __sub__(self, other):
        return self._combine(other, 1, -1)

    def __mul__(self, c):
        if self.exact:
            return BandedSymMatrix([[c * v for v in b] for b in self.bands], True)
        return BandedSymMatrix([float(c) * b for b in self.bands])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BandedSymMatrix) or self.n != other.n:
            return NotImplemented
        w = max(self.bandwidth, other.bandwidth)
        return all(self[i, i + k] == other[i, i + k] for k in range(w + 1) for i in range(self.n - k))

    def __repr__(self):
        return f"BandedSymMatrix(n={self.n}, bandwidth={self.bandwidth}, exact={self.exact})"


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def _ref_matrices_exact(p, signature, rule):
    """Reference-element integrals of B_a' B_b' and B_a B_b under ``rule`` (t-variable)."""
    polys = _element_polys_cached(p, signature)
    ders = [poly_derivative(c) for c in polys]
    m = rational_moments(rule, 2 * p).moments
    S = [[Fraction(0)] * (p + 1) for _ in range(p + 1)]
    Mm = [[Fraction(0)] * (p + 1) for _ in range(p + 1)]
    for a in range(p + 1):
        for b in range(a, p + 1):
            s = sum((c * m[k] for k, c in enumerate(_poly_mul(ders[a], ders[b]))), Fraction(0)) if ders[a] else Fraction(0)
            q = sum((c * m[k] for k, c in enumerate(_poly_mul(polys[a], polys[b]))), Fraction(0))
            S[a][b] = S[b][a] = s
            Mm[a][b] = Mm[b][a] = q
    return S, Mm


def _ref_matrices_float(space, e, rule):
    V, D = element_tables(space, e, rule.nodes)
    w = rule.weights
    return (D * w[:, None]).T @ D, (V * w[:, None]).T @ V


@lru_cache(maxsize=None)
def _blend_ref_exact(p, signature, spec):
    S = [[Fraction(0)] * (p + 1) for _ in range(p + 1)]
    Mm = [[Fraction(0)] * (p + 1) for _ in range(p + 1)]
    for c, rule in spec.terms:
        Sr, Mr = _ref_matrices_exact(p, signature, rule)
        for a in range(p + 1):
            for b in range(p + 1):
                S[a][b] += c * Sr[a][b]
                Mm[a][b] += c * Mr[a][b]
    return S, Mm


def _assemble_spec(space, spec, exact, which):
    """Assemble one form under ``spec``.

    Single rules in float mode use float nodes.  Signed blends are formed
    on the reference element in rational arithmetic first: their weights
    reach 1e5 for p = 7, and summing float assemblies would lose as many
    digits to cancellation.
    """
    spec = as_spec(spec)
    p, N = space.degree, space.elements
    h = space.h
    A = BandedSymMatrix.zeros(space.dim, p, exact)
    single = len(spec.terms) == 1 and spec.terms[0][0] == 1
    cache = {}
    for e in range(N):
        sig = _knot_signature(space, e)
        if sig not in cache:
            if single and not exact:
                S, Mm = _ref_matrices_float(space, e, spec.terms[0][1])
            elif single:
                S, Mm = _ref_matrices_exact(p, sig, spec.terms[0][1])
            else:
                S, Mm = _blend_ref_exact(p, sig, spec)
            loc, scale = (S, 2 / h) if which == "K" else (Mm, h / 2)
            cache[sig] = [
                [scale * loc[a][b] if exact else float(scale * Fraction(loc[a][b])) for b in range(p + 1)]
                for a in range(p + 1)
            ]
        loc = cache[sig]
        for a in range(p + 1):
            for b in range(a, p + 1):
                A.bands[b - a][e + a] += loc[a][b]
    return A


def _reduce(A):
    """Drop the first and last rows/columns (Dirichlet elimination)."""
    n = A.n - 2
    bands = []
    for k, b in enumerate(A.bands):
        seg = b[1 : 1 + max(n - k, 0)]
        bands.append(list(seg) if A.exact else np.array(seg))
    return BandedSymMatrix(bands, A.exact)


def check_stiffness_rule(space, spec, allow_unsafe=False):
    """Refuse stiffness rules that cannot integrate degree 2p-2 exactly."""
    spec = as_spec(spec)
    need = 2 * space.degree - 2
    if spec.exactness < need and not allow_unsafe:
        raise UnsafeRuleError(
            f"stiffness rule {spec} is exact to degree {spec.exactness} < {need}; "
            "pass allow_unsafe=True to use it anyway"
        )


def assemble_1d(space, stiffness_rule, mass_rule, exact=False, dirichlet=True, allow_unsafe=False):
    """Assemble (K, M) for ``space``; reduced to interior DOFs when ``dirichlet``."""
    check_stiffness_rule(space, stiffness_rule, allow_unsafe)
    K = _assemble_spec(space, stiffness_rule, exact, "K")
    M = _assemble_spec(space, mass_rule, exact, "M")
    if dirichlet:
        K, M = _reduce(K), _reduce(M)
    return K, M


@dataclass(frozen=True)
class StencilSymbol:
    """Repeating interior row: stiffness scaled by h, mass scaled by 1/h.

    ``stiffness[k]`` / ``mass[k]`` are the entries at offset k from the
    diagonal, k = 0..p.
    """

    p: int
    stiffness: tuple
    mass: tuple
    exact: bool = True

    def stiffness_row_sum(self):
        return self.stiffness[0] + 2 * sum(self.stiffness[1:])

    def mass_row_sum(self):
        return self.mass[0] + 2 * sum(self.mass[1:])

    def to_float(self):
        return StencilSymbol(self.p, tuple(map(float, self.stiffness)), tuple(map(float, self.mass)), False)


def stencil_elements(p):
    """Mesh size used for stencil extraction: leaves a fully uniform central row."""
    return 3 * p + 3


def interior_stencil(space, stiffness_rule, mass_rule, exact=True):
    """Extract the translation-invariant interior row of K and M.

    A row i (unreduced numbering) is interior when all basis functions
    i-p..i+p are uniform B-splines, i.e. 2p <= i <= N-1-p.
    """
    if isinstance(space, int):
        space = make_space(space, stencil_elements(space))
    p, N = space.degree, space.elements
    if N < 3 * p + 1:
        raise InvalidParameter(f"need N >= {3 * p + 1} elements for an interior row, got {N}")
    K, M = assemble_1d(space, stiffness_rule, mass_rule, exact=exact, dirichlet=False)
    i = (2 * p + N - 1 - p) // 2
    h = space.h if exact else float(space.h)
    s = tuple(K[i, i + k] * h for k in range(p + 1))
    m = tuple(M[i, i + k] / h for k in range(p + 1))
    return StencilSymbol(p, s, m, exact)


def stencil(p, rule, exact=True):
    """Interior stencil with the same rule on both forms."""
    return interior_stencil(make_space(p, stencil_elements(p)), rule, rule, exact=exact)


class TensorOperator:
    """Kronecker-structured K_d, M_d built from per-axis 1D pairs.

    K_d = sum_l M_1 x ... x K_l x ... x M_d,   M_d = M_1 x ... x M_d.
    Axis 0 is the slowest-varying index in the flattened ordering.
    """

    def __init__(self, axes, spaces=None):
        self.source_axes = tuple(axes)
        self.axes = [(K.to_float(), M.to_float()) for K, M in axes]
        self.spaces = spaces

    @property
    def d(self):
        return len(self.axes)

    @property
    def shape(self):
        return tuple(K.n for K, _ in self.axes)

    @property
    def dim(self):
        return int(np.prod(self.shape))

    def _apply_axis(self, X, A, axis):
        Xm = np.moveaxis(X, axis, 0)
        flat = Xm.reshape(Xm.shape[0], -1)
        out = np.column_stack([A.matvec(flat[:, j]) for j in range(flat.shape[1])]) if flat.shape[1] else flat
        return np.moveaxis(out.reshape(Xm.shape), 0, axis)

    def apply(self, x):
        """Return ``(K_d x, M_d x)`` without materializing K_d, M_d."""
        X = np.asarray(x, dtype=float).reshape(self.shape)
        Mx = X
        for ax, (_, M) in enumerate(self.axes):
            Mx = self._apply_axis(Mx, M, ax)
        Kx = np.zeros_like(X)
        for l in range(self.d):
            Y = X
            for ax, (K, M) in enumerate(self.axes):
                Y = self._apply_axis(Y, K if ax == l else M, ax)
            Kx += Y
        return Kx.ravel(), Mx.ravel()

    def to_dense(self):
        if self.dim > MAX_DENSE:
            raise InvalidParameter(
                f"dense materialization of dimension {self.dim} exceeds {MAX_DENSE}"
            )
        Ks = [K.to_dense() for K, _ in self.axes]
        Ms = [M.to_dense() for _, M in self.axes]
        Md = reduce(np.kron, Ms)
        Kd = np.zeros_like(Md)
        for l in range(self.d):
            Kd += reduce(np.kron, [Ks[ax] if ax == l else Ms[ax] for ax in range(self.d)])
        return Kd, Md


def assemble_tensor(spaces, stiffness_rule, mass_rule, exact=False, allow_unsafe=False):
    """Per-axis assembly wrapped in a :class:`TensorOperator` (d = 2 or 3)."""
    if len(spaces) not in (2, 3):
        raise InvalidParameter(f"tensor operators need 2 or 3 axes, got {len(spaces)}")
    for s in spaces:
        if not isinstance(s, SplineSpace):
            raise InvalidParameter(f"not a SplineSpace: {s!r}")
    axes = [
        assemble_1d(s, stiffness_rule, mass_rule, exact=exact, allow_unsafe=allow_unsafe)
        for s in spaces
    ]
    return TensorOperator(axes, spaces=tuple(spaces))
