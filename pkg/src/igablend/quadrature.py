"""Gauss-Legendre / Gauss-Lobatto rules and signed blends of them.

Rules live on the reference interval [-1, 1].  Besides float nodes and
weights every rule exposes exact rational moments

    m_k = sum_i w_i x_i^k,

which are rational even though nodes and weights are not.  They are
computed without touching the nodes: reduce ``x^k`` modulo the node
polynomial (whose roots are the nodes) and integrate the remainder, which
has degree below the rule's exactness degree.
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .errors import InvalidParameter, UnsupportedError

GAUSS = "G"
LOBATTO = "GL"
MAX_POINTS = 8
MAX_MOMENT_ORDER = 16


def _legendre(n, x):
    """P_n(x) and P_{n-1}(x) by the three-term recurrence."""
    p0, p1 = np.ones_like(x), x
    if n == 0:
        return p0, np.zeros_like(x)
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    return p1, p0


def _newton(f_df, x, tol=1e-15, maxiter=100):
    for _ in range(maxiter):
        f, df = f_df(x)
        dx = f / df
        x = x - dx
        if np.max(np.abs(dx)) < tol:
            break
    f, df = f_df(x)
    return x - f / df


@lru_cache(maxsize=None)
def _gauss_nodes(n):
    k = np.arange(1, n + 1)
    x0 = -np.cos(np.pi * (k - 0.25) / (n + 0.5))

    def f_df(x):
        pn, pm = _legendre(n, x)
        return pn, n * (x * pn - pm) / (x * x - 1)

    x = _newton(f_df, x0)
    pn, pm = _legendre(n, x)
    dp = n * (x * pn - pm) / (x * x - 1)
    w = 2 / ((1 - x * x) * dp * dp)
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


@lru_cache(maxsize=None)
def _lobatto_nodes(n):
    m = n - 1
    if n == 2:
        x = np.array([-1.0, 1.0])
    else:
        # interior nodes are the roots of P'_m, i.e. of (P_{m-1} - x P_m)
        k = np.arange(1, n - 1)
        x0 = -np.cos(np.pi * k / m)

        def f_df(x):
            pm, pmm = _legendre(m, x)
            # P_{m-1} - x P_m = (1 - x^2) P'_m / m, derivative -(m+1) P_m
            return pmm - x * pm, -(m + 1) * pm

        x = np.concatenate(([-1.0], _newton(f_df, x0), [1.0]))
    pm, _ = _legendre(m, x)
    w = 2 / (n * (n - 1) * pm * pm)
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


# --- exact polynomial helpers (ascending Fraction coefficient lists) -------

@lru_cache(maxsize=None)
def legendre_coeffs(n):
    p0, p1 = (Fraction(1),), (Fraction(0), Fraction(1))
    if n == 0:
        return p0
    for k in range(2, n + 1):
        a = [Fraction(0)] + [Fraction(2 * k - 1, k) * c for c in p1]
        b = [Fraction(k - 1, k) * c for c in p0] + [Fraction(0)] * 2
        p0, p1 = p1, tuple(x - y for x, y in zip(a, b))
    return p1


def _poly_mod(num, den):
    num = list(num)
    lead = den[-1]
    d = len(den) - 1
    while len(num) - 1 >= d:
        c = num[-1] / lead
        if c:
            shift = len(num) - 1 - d
            for i, v in enumerate(den):
                num[shift + i] -= c * v
        num.pop()
    return num


def _integrate(coeffs):
    return sum((2 * c / (k + 1) for k, c in enumerate(coeffs) if k % 2 == 0), Fraction(0))


@dataclass(frozen=True)
class ReferenceRule:
    """An n-point Gauss-Legendre (``"G"``) or Gauss-Lobatto (``"GL"``) rule."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in (GAUSS, LOBATTO):
            raise InvalidParameter(f"unknown rule kind {self.kind!r}")
        lo = 1 if self.kind == GAUSS else 2
        if not lo <= self.n <= MAX_POINTS:
            raise InvalidParameter(f"{self.kind}{self.n}: points must be in {lo}..{MAX_POINTS}")

    @property
    def name(self):
        return f"{self.kind}{self.n}"

    def __str__(self):
        return self.name

    @property
    def exactness(self):
        return 2 * self.n - 1 if self.kind == GAUSS else 2 * self.n - 3

    @property
    def nodes(self):
        return (_gauss_nodes if self.kind == GAUSS else _lobatto_nodes)(self.n)[0]

    @property
    def weights(self):
        return (_gauss_nodes if self.kind == GAUSS else _lobatto_nodes)(self.n)[1]

    @cached_property
    def node_polynomial(self):
        """Monic-up-to-scale rational polynomial vanishing exactly at the nodes."""
        if self.kind == GAUSS:
            return legendre_coeffs(self.n)
        # (1 - x^2) P'_{n-1}
        dp = [k * c for k, c in enumerate(legendre_coeffs(self.n - 1))][1:]
        out = [Fraction(0)] * (len(dp) + 2)
        for k, c in enumerate(dp):
            out[k] += c
            out[k + 2] -= c
        return tuple(out)

    def integrate(self, f):
        return float(np.dot(self.weights, f(self.nodes)))


def gauss(n):
    return ReferenceRule(GAUSS, int(n))


def lobatto(n):
    return ReferenceRule(LOBATTO, int(n))


@dataclass(frozen=True)
class RationalMoments:
    rule: ReferenceRule
    moments: tuple

    def __getitem__(self, k):
        return self.moments[k]


@lru_cache(maxsize=None)
def _moments(rule, K):
    omega = rule.node_polynomial
    out = []
    for k in range(K + 1):
        mono = [Fraction(0)] * k + [Fraction(1)]
        out.append(_integrate(_poly_mod(mono, omega)))
    return tuple(out)


def rational_moments(rule, K):
    """Exact moments m_0..m_K of ``rule``."""
    if not 0 <= K <= MAX_MOMENT_ORDER:
        raise UnsupportedError(f"moment order {K} outside 0..{MAX_MOMENT_ORDER}")
    return RationalMoments(rule, _moments(rule, K))


@dataclass(frozen=True)
class QuadratureSpec:
    """Signed combination ``sum c_i Q_i`` of reference rules.

    Coefficients are exact rationals summing to one.
    """

    terms: tuple
    label: str = None

    def __post_init__(self):
        terms = tuple((Fraction(c), r) for c, r in self.terms)
        object.__setattr__(self, "terms", terms)
        if sum(c for c, _ in terms) != 1:
            raise InvalidParameter(f"blend coefficients must sum to 1: {self}")

    @property
    def rules(self):
        return tuple(r for _, r in self.terms)

    def __str__(self):
        if self.label:
            return self.label
        parts = []
        for c, r in self.terms:
            parts.append(f"{c}*{r.name}" if c != 1 else r.name)
        return " + ".join(parts)

    def moments(self, K):
        out = [Fraction(0)] * (K + 1)
        for c, r in self.terms:
            for k, m in enumerate(rational_moments(r, K).moments):
                out[k] += c * m
        return tuple(out)

    @property
    def exactness(self):
        """Largest degree d such that every monomial up to d is integrated exactly."""
        ms = self.moments(MAX_MOMENT_ORDER)
        for k, m in enumerate(ms):
            exact = Fraction(2, k + 1) if k % 2 == 0 else 0
            if m != exact:
                return k - 1
        return MAX_MOMENT_ORDER

    def integrate(self, f):
        return sum(float(c) * r.integrate(f) for c, r in self.terms)


def as_spec(q):
    if isinstance(q, QuadratureSpec):
        return q
    if isinstance(q, ReferenceRule):
        return QuadratureSpec(((Fraction(1), q),), label=q.name)
    raise InvalidParameter(f"not a quadrature: {q!r}")


def blend(tau, q1, q2, label=None):
    """``tau * q1 + (1 - tau) * q2`` with terms merged by rule identity."""
    tau = Fraction(tau)
    q1, q2 = as_spec(q1), as_spec(q2)
    merged = {}
    order = []
    for w, spec in ((tau, q1), (1 - tau, q2)):
        for c, r in spec.terms:
            if r not in merged:
                merged[r] = Fraction(0)
                order.append(r)
            merged[r] += w * c
    terms = tuple((merged[r], r) for r in order if merged[r] != 0)
    if tau == 1 and label is None:
        label = q1.label
    return QuadratureSpec(terms, label=label)


# tau on (G_{p+1}, GL_{p+1}); p = 1 is derived by the series module
_OPTIMAL_TAU = {
    2: Fraction(1, 3),
    3: Fraction(-3, 2),
    4: Fraction(-79, 5),
    5: Fraction(-174),
    6: Fraction(-91177, 35),
    7: Fraction(-105103, 2),
}


@lru_cache(maxsize=None)
def optimal_blend(p):
    """The dispersion-optimal blend O_p of G_{p+1} and GL_{p+1}."""
    if not 1 <= p <= 7:
        raise InvalidParameter(f"optimal blends exist for p = 1..7, got {p}")
    if p == 1:
        from .series import find_optimal_tau

        tau = find_optimal_tau(1, gauss(2), lobatto(2))
    else:
        tau = _OPTIMAL_TAU[p]
    return blend(tau, gauss(p + 1), lobatto(p + 1), label=f"O{p}")


def standard_rules(p):
    """The four standard rules, keyed by CLI name."""
    return {
        "g+1": as_spec(gauss(p + 1)),
        "gl+1": as_spec(lobatto(p + 1)),
        "g+0": as_spec(gauss(p)),
        "opt": optimal_blend(p),
    }


_REL = re.compile(r"^(gl|g)([+-]\d+)$")
_ABS = re.compile(r"^(GL|G)(\d+)$")


def _parse_single(token, p):
    m = _REL.match(token)
    if m:
        kind = LOBATTO if m.group(1) == "gl" else GAUSS
        return as_spec(ReferenceRule(kind, p + int(m.group(2))))
    m = _ABS.match(token)
    if m:
        return as_spec(ReferenceRule(m.group(1), int(m.group(2))))
    if token == "opt":
        return optimal_blend(p)
    raise InvalidParameter(f"cannot parse rule {token!r}")


def parse_rule(name, p):
    """Resolve a rule name such as ``g+1``, ``GL4``, ``opt`` or ``blend:1/3:g+1:gl+1``."""
    if name.startswith("blend:"):
        try:
            _, tau, r1, r2 = name.split(":")
            tau = Fraction(tau)
        except ValueError as exc:
            raise InvalidParameter(f"bad blend spec {name!r}") from exc
        return blend(tau, _parse_single(r1, p), _parse_single(r2, p), label=name)
    return _parse_single(name, p)
