"""Exact truncated power series in Lambda over the rationals.

Coefficients are :class:`~fractions.Fraction` objects, or :class:`Poly`
objects (multivariate polynomials over Q) when a stencil carries unknown
parameters such as a blending weight ``tau`` or free mass entries.  All
arithmetic is exact; only divisions by rational units occur, so the
polynomial ring is closed under every operation used here.

The spectrum series is sqrt(s(L)/m(L)) where s, m are the cosine symbols
of the interior stiffness and mass stencils; the dispersion series is its
compositional inverse.
"""
from fractions import Fraction
from math import factorial, isqrt

from .assembly import StencilSymbol, stencil
from .errors import DegenerateSymbolError, InvalidParameter, NoSolutionError, NumericalError
from .quadrature import as_spec, gauss, lobatto

ZERO = Fraction(0)
ONE = Fraction(1)


class Poly:
    """Sparse multivariate polynomial with Fraction coefficients.

    Monomials are tuples of ``(variable, exponent)`` pairs sorted by name.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def var(cls, name):
        return cls({((name, 1),): ONE})

    @classmethod
    def const(cls, c):
        return cls({(): Fraction(c)})

    @staticmethod
    def lift(x):
        return x if isinstance(x, Poly) else Poly.const(x)

    def is_constant(self):
        return all(m == () for m in self.terms)

    def constant(self):
        return self.terms.get((), ZERO)

    @property
    def variables(self):
        return sorted({v for m in self.terms for v, _ in m})

    def degree(self, name=None):
        if not self.terms:
            return -1
        if name is None:
            return max(sum(e for _, e in m) for m in self.terms)
        return max(dict(m).get(name, 0) for m in self.terms)

    def __add__(self, other):
        other = Poly.lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, ZERO) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-Poly.lift(other))

    def __rsub__(self, other):
        return Poly.lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            other = Fraction(other)
            return Poly({m: c * other for m, c in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                d = dict(m1)
                for v, e in m2:
                    d[v] = d.get(v, 0) + e
                m = tuple(sorted(d.items()))
                out[m] = out.get(m, ZERO) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant():
                raise InvalidParameter("division by a non-constant polynomial")
            other = other.constant()
        return self * (1 / Fraction(other))

    def __pow__(self, n):
        out = Poly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def coefficients(self, name):
        """Coefficients (as Polys) of powers 0..deg of ``name``."""
        deg = max(self.degree(name), 0)
        out = [dict() for _ in range(deg + 1)]
        for m, c in self.terms.items():
            d = dict(m)
            e = d.pop(name, 0)
            out[e][tuple(sorted(d.items()))] = c
        return [Poly(t) for t in out]

    def subs(self, values):
        """Substitute ``{name: Fraction | Poly}``."""
        out = Poly()
        for m, c in self.terms.items():
            term = Poly.const(c)
            for v, e in m:
                term = term * (Poly.lift(values[v]) ** e if v in values else Poly({((v, e),): ONE}))
            out = out + term
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


def _rational(c):
    """Coerce a constant coefficient to Fraction (or fail)."""
    if isinstance(c, Poly):
        if not c.is_constant():
            raise InvalidParameter(f"expected a constant, got {c!r}")
        return c.constant()
    return Fraction(c)


def _simplify(c):
    if isinstance(c, Poly) and c.is_constant():
        return c.constant()
    return c


def _rational_sqrt(q):
    q = Fraction(q)
    if q <= 0:
        raise DegenerateSymbolError(f"cannot take the square root of {q}")
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a != q.numerator or b * b != q.denominator:
        raise DegenerateSymbolError(f"{q} is not the square of a rational")
    return Fraction(a, b)


class RationalSeries:
    """c_0 + c_1 L + ... + c_K L^K + O(L^{K+1})."""

    def __init__(self, coeffs, order=None):
        coeffs = [_simplify(c) for c in coeffs]
        if order is None:
            order = len(coeffs) - 1
        coeffs = coeffs[: order + 1]
        coeffs += [ZERO] * (order + 1 - len(coeffs))
        self.coeffs = coeffs
        self.order = order

    @classmethod
    def identity(cls, order):
        return cls([ZERO, ONE], order)

    @classmethod
    def cos(cls, k, order):
        """cos(k L) truncated at L^order."""
        c = [ZERO] * (order + 1)
        for n in range(0, order + 1, 2):
            c[n] = Fraction((-1) ** (n // 2) * k**n, factorial(n))
        return cls(c, order)

    def __getitem__(self, n):
        return self.coeffs[n] if n <= self.order else None

    def __len__(self):
        return self.order + 1

    def truncate(self, order):
        if order > self.order:
            raise InvalidParameter("cannot extend a truncated series")
        return RationalSeries(self.coeffs[: order + 1], order)

    def _coerce(self, other):
        if isinstance(other, RationalSeries):
            return other
        return RationalSeries([other], self.order)

    def __add__(self, other):
        other = self._coerce(other)
        K = min(self.order, other.order)
        return RationalSeries([self.coeffs[i] + other.coeffs[i] for i in range(K + 1)], K)

    __radd__ = __add__

    def __neg__(self):
        return RationalSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RationalSeries):
            return RationalSeries([c * other for c in self.coeffs], self.order)
        K = min(self.order, other.order)
        out = []
        for n in range(K + 1):
            s = ZERO
            for i in range(n + 1):
                a, b = self.coeffs[i], other.coeffs[n - i]
                if a and b:
                    s = s + a * b
            out.append(s)
        return RationalSeries(out, K)

    __rmul__ = __mul__

    def reciprocal(self):
        c0 = _rational(self.coeffs[0])
        if c0 == 0:
            raise NumericalError("series with zero constant term has no reciprocal")
        inv = 1 / c0
        b = [inv]
        for n in range(1, self.order + 1):
            s = ZERO
            for k in range(1, n + 1):
                if self.coeffs[k]:
                    s = s + self.coeffs[k] * b[n - k]
            b.append(-s * inv)
        return RationalSeries(b, self.order)

    def __truediv__(self, other):
        if isinstance(other, RationalSeries):
            return self * other.reciprocal()
        return self * (1 / Fraction(other))

    def sqrt(self):
        """Square root with positive constant term (must be a rational square)."""
        b0 = _rational_sqrt(_rational(self.coeffs[0]))
        b = [b0]
        for n in range(1, self.order + 1):
            s = self.coeffs[n]
            for k in range(1, n):
                s = s - b[k] * b[n - k]
            b.append(s / (2 * b0))
        return RationalSeries(b, self.order)

    def shift_down(self, m):
        """Divide by L^m; the first m coefficients must vanish."""
        if any(self.coeffs[:m]):
            raise NumericalError(f"series is not divisible by L^{m}")
        return RationalSeries(self.coeffs[m:], self.order - m)

    def shift_up(self, m):
        return RationalSeries([ZERO] * m + self.coeffs, self.order + m)

    def compose(self, g):
        """self(g(L)); g must have zero constant term."""
        if g.coeffs[0]:
            raise InvalidParameter("inner series must vanish at 0")
        K = min(self.order, g.order)
        g = g.truncate(K)
        out = RationalSeries([self.coeffs[K]], K)
        for n in range(K - 1, -1, -1):
            out = out * g + self.coeffs[n]
        return out

    def power(self, n):
        out = RationalSeries([ONE], self.order)
        for _ in range(n):
            out = out * self
        return out

    def reversion(self):
        """Compositional inverse of L + c_2 L^2 + ... by Lagrange inversion.

        [L^n] g = (1/n) [L^{n-1}] (L / f(L))^n.
        """
        if self.coeffs[0] or _rational(self.coeffs[1]) != 1:
            raise InvalidParameter("reversion needs f(0) = 0 and f'(0) = 1")
        K = self.order
        phi = self.shift_down(1).reciprocal()  # L / f(L), order K-1
        out = [ZERO, ONE]
        pw = phi
        for n in range(2, K + 1):
            pw = pw * phi
            out.append(pw.coeffs[n - 1] / n)
        return RationalSeries(out, K)

    def leading_error(self):
        """First nonzero coefficient past the linear term: ``(power, coeff)``."""
        for n in range(2, self.order + 1):
            if self.coeffs[n]:
                return n, self.coeffs[n]
        return None, ZERO

    def subs(self, values):
        return RationalSeries(
            [c.subs(values) if isinstance(c, Poly) else c for c in self.coeffs], self.order
        )

    def __eq__(self, other):
        if not isinstance(other, RationalSeries):
            return NotImplemented
        K = min(self.order, other.order)
        return all(_simplify(Poly.lift(a) - b) == 0 for a, b in zip(self.coeffs[: K + 1], other.coeffs[: K + 1]))

    def __repr__(self):
        terms = [f"({c})*L^{n}" for n, c in enumerate(self.coeffs) if c]
        return " + ".join(terms or ["0"]) + f" + O(L^{self.order + 1})"


def default_order(p):
    return 2 * p + 5


def _symbol_series(band, order):
    """band_0 + 2 sum_k band_k cos(k L) as a series."""
    out = RationalSeries([band[0]], order)
    for k in range(1, len(band)):
        out = out + RationalSeries.cos(k, order) * (2 * band[k])
    return out


def _check_symbol(sym):
    if not isinstance(sym, StencilSymbol) or not sym.exact:
        raise InvalidParameter("series expansion needs an exact (rational) stencil")


def expand_spectrum(sym, order=None):
    """sqrt(lambda_h) h as a series in L, from an exact stencil."""
    _check_symbol(sym)
    K = default_order(sym.p) if order is None else order
    if not 1 <= K <= 24:
        raise InvalidParameter(f"series order must be in 1..24, got {K}")
    s = _symbol_series(sym.stiffness, K + 1)
    m = _symbol_series(sym.mass, K - 1)
    lead = s.coeffs[2]
    if isinstance(lead, Poly) and not lead.is_constant():
        raise DegenerateSymbolError("stiffness symbol depends on free parameters")
    if _rational(lead) <= 0:
        raise DegenerateSymbolError(f"stiffness symbol has non-positive L^2 coefficient {lead}")
    g = s.shift_down(2) / m
    return g.sqrt().shift_up(1)


def expand_dispersion(sym, order=None):
    """mu h as a series in L: the compositional inverse of the spectrum series."""
    return expand_spectrum(sym, order).reversion()


# --- parametric stencils ---------------------------------------------------

def param_stencil(p, mass_band, stiffness=None):
    """Stencil with mass entries given as Polys/Fractions (centre first)."""
    if stiffness is None:
        stiffness = stencil(p, gauss(p + 1)).stiffness
    return StencilSymbol(p, tuple(stiffness), tuple(mass_band), True)


def _blend_stencil(p, q1, q2, name="tau"):
    s1 = stencil(p, as_spec(q1))
    s2 = stencil(p, as_spec(q2))
    if s1.stiffness != s2.stiffness:
        raise NoSolutionError(f"{q1} and {q2} give different stiffness stencils for p={p}")
    tau = Poly.var(name)
    mass = tuple(tau * a + (1 - tau) * b for a, b in zip(s1.mass, s2.mass))
    return param_stencil(p, mass, s1.stiffness)


def _solve_linear(poly, name):
    c = poly.coefficients(name)
    if len(c) != 2 or not c[1]:
        return None
    return _simplify(-c[0] / c[1]) if c[1].is_constant() else None


def find_optimal_tau(p, q1, q2):
    """Rational tau such that tau q1 + (1 - tau) q2 kills the L^{2p+1} error term."""
    if not 1 <= p <= 7:
        raise InvalidParameter(f"p must be in 1..7, got {p}")
    sym = _blend_stencil(p, q1, q2)
    ser = expand_dispersion(sym, 2 * p + 3)
    for n in range(3, 2 * p + 1, 2):
        if ser.coeffs[n]:
            raise NoSolutionError(f"L^{n} coefficient {ser.coeffs[n]} is nonzero for {q1}/{q2}")
    lead = Poly.lift(ser.coeffs[2 * p + 1])
    if lead.degree("tau") < 1:
        raise NoSolutionError(f"L^{2 * p + 1} coefficient does not depend on tau: {lead}")
    if lead.degree("tau") > 1:
        raise NoSolutionError(f"L^{2 * p + 1} coefficient is not linear in tau: {lead}")
    tau = _solve_linear(lead, "tau")
    nxt = _simplify(Poly.lift(ser.coeffs[2 * p + 3]).subs({"tau": tau}))
    if nxt == 0:
        raise NumericalError(f"tau = {tau} also kills L^{2 * p + 3}; unexpected order gain")
    return Fraction(tau)


MASS_PARAMETERS = {2: ("alpha", "beta"), 3: ("alpha", "beta", "gamma")}


def mass_parameter_stencil(p):
    """Interior stencil with free mass entries: offset 1 = beta, 2 = alpha, 3 = gamma."""
    if p not in MASS_PARAMETERS:
        raise InvalidParameter(f"free-mass optimisation is available for p in (2, 3), got {p}")
    by_offset = {1: Poly.var("beta"), 2: Poly.var("alpha"), 3: Poly.var("gamma")}
    off = [by_offset[k] for k in range(1, p + 1)]
    centre = 1 - 2 * sum(off, Poly())
    return param_stencil(p, (centre, *off))


def _rational_roots(coeffs):
    """Rational roots of a univariate polynomial with Fraction coefficients."""
    from sympy import Poly as SPoly, Rational, roots, symbols

    x = symbols("x")
    expr = sum(Rational(c.numerator, c.denominator) * x**k for k, c in enumerate(coeffs))
    found = roots(SPoly(expr, x))
    return sorted(Fraction(int(r.p), int(r.q)) for r in found if r.is_Rational)


def solve_triangular(equations, names):
    """Solve polynomial equations by successive elimination.

    Each equation, after substituting the variables found so far, must be
    linear in some remaining variable, or univariate with a unique rational
    root.
    """
    sol = {}
    pending = list(equations)
    while pending:
        progress = False
        for eq in list(pending):
            e = eq.subs(sol) if isinstance(eq, Poly) else Poly.const(eq)
            # substitute symbolic solutions repeatedly
            free = [v for v in e.variables if v in names]
            if not free:
                if e != 0:
                    raise NoSolutionError(f"inconsistent system: residual {e!r}")
                pending.remove(eq)
                progress = True
                continue
            for v in sorted(free, key=lambda v: names.index(v)):
                c = e.coefficients(v)
                if len(c) == 2 and c[1].is_constant():
                    sol = {k: Poly.lift(val).subs({v: -c[0] / c[1]}) for k, val in sol.items()}
                    sol[v] = -c[0] / c[1]
                    pending.remove(eq)
                    progress = True
                    break
            else:
                if len(free) == 1:
                    v = free[0]
                    coeffs = [_rational(c) for c in e.coefficients(v)]
                    rts = _rational_roots(coeffs)
                    if len(rts) != 1:
                        raise NoSolutionError(
                            f"{v}: polynomial {e!r} has rational roots {rts}; need exactly one"
                        )
                    sol = {k: Poly.lift(val).subs({v: rts[0]}) for k, val in sol.items()}
                    sol[v] = Poly.const(rts[0])
                    pending.remove(eq)
                    progress = True
            if progress:
                break
        if not progress:
            raise NoSolutionError(f"cannot eliminate: {[repr(e) for e in pending]}")
    out = {}
    for v in names:
        if v not in sol:
            raise NoSolutionError(f"{v} left undetermined")
        val = Poly.lift(sol[v])
        if not val.is_constant():
            raise NoSolutionError(f"{v} left undetermined: {val!r}")
        out[v] = val.constant()
    return out


def find_optimal_mass(p):
    """Free mass entries killing the L^3 .. L^{2p+1} dispersion terms.

    Returns ``(params, series)`` where ``series`` is the dispersion series
    of the optimised stencil through L^{2p+3}.
    """
    names = MASS_PARAMETERS.get(p)
    if names is None:
        raise InvalidParameter(f"free-mass optimisation is available for p in (2, 3), got {p}")
    sym = mass_parameter_stencil(p)
    ser = expand_dispersion(sym, 2 * p + 3)
    eqs = [Poly.lift(ser.coeffs[n]) for n in range(3, 2 * p + 2, 2)]
    params = solve_triangular(eqs, list(names))
    return params, ser.subs(params)


def optimized_mass_band(p):
    params, _ = find_optimal_mass(p)
    sym = mass_parameter_stencil(p)
    return tuple(_rational(Poly.lift(c).subs(params)) for c in sym.mass)


def dispersion_coefficients(p, rule, order=None):
    """Dispersion series for degree p with ``rule`` on both forms."""
    return expand_dispersion(stencil(p, as_spec(rule)), order)


def blend_mass_series(p, spec, order=None, kind="dispersion"):
    """Series for ``spec`` applied to the mass only, stiffness integrated exactly."""
    from .assembly import interior_stencil, stencil_elements
    from .splines import make_space

    space = make_space(p, stencil_elements(p))
    sym = interior_stencil(space, gauss(p + 1), spec)
    f = expand_dispersion if kind == "dispersion" else expand_spectrum
    return f(sym, order)


def format_coefficient(c):
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"
