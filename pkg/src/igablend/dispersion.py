"""Discrete dispersion and spectrum curves from interior stencils."""
from dataclasses import dataclass
from fractions import Fraction
from math import cos, pi, sin, sqrt

from .assembly import StencilSymbol, stencil
from .errors import DegenerateSymbolError, InvalidParameter, NumericalError, OutOfBandError
from .quadrature import parse_rule


@dataclass(frozen=True)
class SymbolFunctions:
    """Cosine symbols s(theta), m(theta) of an interior stencil.

    Evaluated as s = s(0) - 4 sum s_k sin^2(k theta / 2), which avoids the
    cancellation of the plain cosine sum for small theta.
    """

    source: StencilSymbol

    def __post_init__(self):
        f = self.source
        s0 = float(f.stiffness_row_sum())
        m0 = float(f.mass_row_sum())
        object.__setattr__(self, "_s", (s0, tuple(map(float, f.stiffness[1:]))))
        object.__setattr__(self, "_m", (m0, tuple(map(float, f.mass[1:]))))

    @staticmethod
    def _value(band, theta):
        base, offs = band
        return base - 4 * sum(c * sin(k * theta / 2) ** 2 for k, c in enumerate(offs, 1))

    @staticmethod
    def _deriv(band, theta):
        return -2 * sum(k * c * sin(k * theta) for k, c in enumerate(band[1], 1))

    def s_hat(self, theta):
        return self._value(self._s, theta)

    def m_hat(self, theta):
        return self._value(self._m, theta)

    def ds_hat(self, theta):
        return self._deriv(self._s, theta)

    def dm_hat(self, theta):
        return self._deriv(self._m, theta)


def symbol(p, rule):
    """SymbolFunctions for degree ``p`` with ``rule`` (name or spec) on both forms."""
    if isinstance(rule, str):
        rule = parse_rule(rule, p)
    return SymbolFunctions(stencil(p, rule))


def spectrum_curve(sym, theta):
    """sqrt(lambda_h) h at exact wavenumber ``theta``: sqrt(s/m)."""
    if not 0 < theta < pi:
        raise InvalidParameter(f"theta must lie in (0, pi), got {theta}")
    m = sym.m_hat(theta)
    if m <= 0:
        raise DegenerateSymbolError(f"mass symbol {m:.3e} <= 0 at theta = {theta}")
    s = sym.s_hat(theta)
    if s < 0:
        raise DegenerateSymbolError(f"stiffness symbol {s:.3e} < 0 at theta = {theta}")
    return sqrt(s / m)


def dispersion_curve(sym, Lambda, tol=1e-14):
    """mu h in (0, pi) solving s(mu h) = Lambda^2 m(mu h).

    Bisection on the sign change, then Newton polish.
    """
    if not Lambda > 0:
        raise InvalidParameter(f"Lambda must be positive, got {Lambda}")
    L2 = Lambda * Lambda

    def f(t):
        return sym.s_hat(t) - L2 * sym.m_hat(t)

    lo, hi = 0.0, pi
    if f(hi) <= 0:
        raise OutOfBandError(f"Lambda = {Lambda} lies above the acoustic branch")
    # f(0) = -Lambda^2 < 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-10:
            break
    t = 0.5 * (lo + hi)
    for _ in range(50):
        val = f(t)
        if abs(val) <= tol * 1e-2:
            break
        step = val / (sym.ds_hat(t) - L2 * sym.dm_hat(t))
        t_new = t - step
        if not lo <= t_new <= hi:
            break
        t = t_new
        if abs(step) < 1e-17:
            break
    if abs(f(t)) > tol:
        raise NumericalError(f"dispersion root residual {f(t):.3e} above {tol}")
    return t


# Published cosine-polynomial forms of the interior relations.  Each entry
# lists, for descending powers of cos(mu h), the pair
# (constant part, coefficient of Lambda^2).
PUBLISHED_RELATIONS = {
    (2, "g+1"): [(20, 1), (20, 13), (-40, 16)],
    (2, "gl+1"): [(16, 1), (16, 10), (-32, 13)],
    (2, "g+0"): [(24, 1), (24, 16), (-48, 19)],
    (2, "opt"): [(120, 7), (120, 76), (-240, 97)],
    (3, "g+1"): [(42, 1), (504, 60), (126, 297), (-672, 272)],
    (3, "gl+1"): [(90, 2), (1080, 129), (270, 636), (-1440, 583)],
    (3, "g+0"): [(120, 3), (1440, 171), (360, 849), (-1920, 777)],
}


def _cheb(k):
    polys = [[Fraction(1)], [Fraction(0), Fraction(1)]]
    while len(polys) <= k:
        a, b = polys[-2], polys[-1]
        nxt = [Fraction(0)] + [2 * c for c in b]
        for i, c in enumerate(a):
            nxt[i] -= c
        polys.append(nxt)
    return polys[k]


def cosine_relation(sym):
    """The relation s(theta) - Lambda^2 m(theta) as a polynomial in c = cos(theta).

    Returns ``[(const_k, lambda2_k)]`` for descending powers c^p .. c^0,
    using cos(k theta) = T_k(cos theta).
    """
    p = sym.p
    const = [Fraction(0)] * (p + 1)
    lam = [Fraction(0)] * (p + 1)
    for k in range(p + 1):
        w = 1 if k == 0 else 2
        for i, c in enumerate(_cheb(k)):
            const[i] += w * sym.stiffness[k] * c
            lam[i] -= w * sym.mass[k] * c
    return [(const[i], lam[i]) for i in range(p, -1, -1)]


@dataclass
class ClosedFormCheck:
    p: int
    rule: str
    computed: list
    published: list
    scale: Fraction
    ok: bool


def verify_closed_forms(p):
    """Compare stencil-derived cosine relations against the published ones.

    A match means computed = scale * published for one rational scale.
    Raises NumericalError on any mismatch.
    """
    if p not in (2, 3):
        raise InvalidParameter(f"published relations exist for p in (2, 3), got {p}")
    report = []
    for (pp, name), pub in sorted(PUBLISHED_RELATIONS.items()):
        if pp != p:
            continue
        comp = cosine_relation(stencil(p, parse_rule(name, p)))
        scale = None
        ok = True
        for (c0, c1), (q0, q1) in zip(comp, pub):
            for a, b in ((c0, q0), (c1, q1)):
                if b == 0:
                    ok &= a == 0
                    continue
                r = Fraction(a) / b
                if scale is None:
                    scale = r
                ok &= r == scale
        report.append(ClosedFormCheck(p, name, comp, pub, scale, ok))
        if not ok:
            raise NumericalError(
                f"p={p} {name}: computed relation {comp} is not a multiple of {pub}"
            )
    return report
