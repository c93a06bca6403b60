"""Polynomials, reduced rational functions and Mobius maps over F_{q^2}."""
from dataclasses import dataclass

import numpy as np

from .errors import (BothZeroError, CoefficientsNotInBaseField,
                     DegenerateParameters, DeltaInBaseFieldError,
                     GammaNotInMuError, ShapeViolation, ZeroPolynomialError)
from .field_tower import Elt, in_mu


class _Inf:
    """The point at infinity of P^1."""
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("INF")


INF = _Inf()


def point_key(x):
    """Sort key for points of P^1: finite elements by index, then infinity."""
    return (1, 0) if x is INF else (0, x.v)


def point_str(x):
    return "inf" if x is INF else str(x)


class Poly:
    """Univariate polynomial, coefficients lowest degree first."""
    __slots__ = ("t", "c")

    def __init__(self, tower, coeffs):
        self.t = tower
        cs = [tower(x) for x in coeffs]
        while cs and cs[-1].v == 0:
            cs.pop()
        self.c = tuple(cs)

    @classmethod
    def monomial(cls, tower, n, coef=1):
        return cls(tower, [0] * n + [coef])

    @classmethod
    def x(cls, tower):
        return cls(tower, [0, 1])

    @property
    def deg(self):
        """Degree; -1 for the zero polynomial."""
        return len(self.c) - 1

    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def coef(self, i):
        return self.c[i] if 0 <= i < len(self.c) else self.t.zero

    def lc(self):
        if not self.c:
            raise ZeroPolynomialError("zero polynomial has no leading coefficient")
        return self.c[-1]

    def monic(self):
        return self.scale(self.lc().inv())

    def scale(self, a):
        return Poly(self.t, [a * x for x in self.c])

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(tuple(x.v for x in self.c))

    def _lift(self, other):
        if isinstance(other, (Elt, int)):
            return Poly(self.t, [other])
        return other

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.c), len(other.c))
        return Poly(self.t, [self.coef(i) + other.coef(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.t, [-x for x in self.c])

    def __sub__(self, other):
        other = self._lift(other)
        n = max(len(self.c), len(other.c))
        return Poly(self.t, [self.coef(i) - other.coef(i) for i in range(n)])

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (Elt, int)):
            return self.scale(self.t(other))
        if not self.c or not other.c:
            return Poly(self.t, [])
        out = [self.t.zero] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a.v:
                for j, b in enumerate(other.c):
                    out[i + j] = out[i + j] + a * b
        return Poly(self.t, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        r = Poly(self.t, [1])
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def divmod(self, other):
        if not other.c:
            raise ZeroDivisionError("division by zero polynomial")
        rem = list(self.c)
        dq = other.deg
        inv = other.lc().inv()
        quo = [self.t.zero] * max(0, len(rem) - dq)
        for i in range(len(rem) - 1, dq - 1, -1):
            coef = rem[i] * inv
            if coef.v:
                quo[i - dq] = coef
                for j, b in enumerate(other.c):
                    rem[i - dq + j] = rem[i - dq + j] - coef * b
        return Poly(self.t, quo), Poly(self.t, rem[:dq])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __call__(self, x):
        """Horner evaluation at an element."""
        r = self.t.zero
        for a in reversed(self.c):
            r = r * x + a
        return r

    def eval_many(self, xs):
        """Vectorized evaluation on an array of element indices."""
        t = self.t
        xs = np.asarray(xs, dtype=np.int64)
        r = np.zeros_like(xs)
        for a in reversed(self.c):
            r = t.v_add(t.v_mul(r, xs), np.full_like(xs, a.v))
        return r

    def derivative(self):
        return Poly(self.t, [a * i for i, a in enumerate(self.c)][1:])

    def conj(self):
        """Apply x -> x^q to every coefficient."""
        return Poly(self.t, [a.conj() for a in self.c])

    def power_frobenius(self, e):
        """The polynomial P(X)^e for e a power of p, i.e. sum a_i^e X^(e i)."""
        out = [self.t.zero] * (e * self.deg + 1) if self.c else []
        for i, a in enumerate(self.c):
            out[e * i] = a ** e
        return Poly(self.t, out)

    def is_constant(self):
        return len(self.c) <= 1

    def valuation(self):
        """Multiplicity of 0 as a root."""
        for i, a in enumerate(self.c):
            if a.v:
                return i
        raise ZeroPolynomialError("zero polynomial")

    def root_multiplicity(self, a):
        if not self.c:
            raise ZeroPolynomialError("zero polynomial")
        lin = Poly(self.t, [-a, 1])
        m, P = 0, self
        while True:
            quo, rem = P.divmod(lin)
            if rem:
                return m
            m, P = m + 1, quo

    def to_json(self):
        return [str(a) for a in self.c]

    def __repr__(self):
        if not self.c:
            return "0"
        terms = []
        for i, a in enumerate(self.c):
            if a.v:
                terms.append(f"({a})" + ("" if i == 0 else f"X^{i}"))
        return " + ".join(terms)


def poly_gcd(A, B):
    """Monic gcd by the Euclidean algorithm."""
    if not A and not B:
        raise BothZeroError("gcd of two zero polynomials")
    while B:
        A, B = B, A % B
    return A.monic()


def conj_reciprocal(D):
    """X^deg(D) * D^(q)(1/X)."""
    if not D:
        raise ZeroPolynomialError("conjugate reciprocal of zero")
    return Poly(D.t, [a.conj() for a in reversed(D.c)])


def scr_witness(D):
    """alpha in mu with conj_reciprocal(D) = alpha*D, or None."""
    if not D:
        raise ZeroPolynomialError("SCR test of zero")
    if D.c[0].v == 0:
        return None
    H = conj_reciprocal(D)
    if H.deg != D.deg:
        return None
    alpha = H.c[0] / D.c[0]
    if D.scale(alpha) != H:
        return None
    assert in_mu(alpha)
    return alpha


def roots_in_field(P):
    """Roots of P in F_{q^2} with multiplicity, as a sorted list."""
    if not P:
        raise ZeroPolynomialError("roots of zero")
    t = P.t
    vals = P.eval_many(np.arange(t.q2, dtype=np.int64))
    out = []
    for i in np.nonzero(vals == 0)[0]:
        a = t.elt(int(i))
        out += [a] * P.root_multiplicity(a)
    return out


def roots_in_mu(D):
    """Roots of D lying on the unit circle, with multiplicity."""
    if not D:
        raise ZeroPolynomialError("roots of zero")
    out = []
    for a in D.t.mu():
        if D(a).v == 0:
            out += [a] * D.root_multiplicity(a)
    return out


@dataclass(frozen=True)
class QuadProfile:
    kind: str  # MultipleInMu | TwoDistinctInMu | NoneInMu
    roots: tuple
    delta: Elt


def check_quad_shape(D):
    """Return (alpha, beta) for D = alpha X^2 + beta X + conj(alpha)."""
    if not D:
        raise BothZeroError("alpha and beta both zero")
    if D.deg > 2:
        raise ShapeViolation("degree above 2")
    alpha, beta, gamma = D.coef(2), D.coef(1), D.coef(0)
    if not beta.is_base():
        raise ShapeViolation("middle coefficient not in F_q")
    if gamma != alpha.conj():
        raise ShapeViolation("constant term is not the conjugate of the leading term")
    return alpha, beta


def quad_disc(D):
    alpha, beta = check_quad_shape(D)
    return beta * beta - 4 * alpha * alpha.conj()


def quad_roots(D):
    """Both roots of a quadratic of the alpha,beta,conj(alpha) shape.

    A vanishing leading coefficient contributes a root at infinity.
    """
    alpha, beta = check_quad_shape(D)
    t = D.t
    if alpha.v == 0:
        return (t.zero, INF)
    delta = beta * beta - 4 * alpha * alpha.conj()
    s = delta.sqrt()
    assert s is not None  # delta is in F_q, hence a square in F_{q^2}
    two_a = 2 * alpha
    r1, r2 = (-beta + s) / two_a, (-beta - s) / two_a
    return tuple(sorted((r1, r2), key=point_key))


def quad_root_profile(D):
    alpha, beta = check_quad_shape(D)
    delta = beta * beta - 4 * alpha * alpha.conj()
    roots = quad_roots(D)
    if delta.v == 0:
        kind = "MultipleInMu"
        roots = roots[:1]
        assert in_mu(roots[0])
    elif not _fq_square(delta):
        kind = "TwoDistinctInMu"
        assert all(r is not INF and in_mu(r) for r in roots)
    else:
        kind = "NoneInMu"
        assert not any(r is not INF and in_mu(r) for r in roots)
    return QuadProfile(kind, roots, delta)


def _fq_square(x):
    return (x ** ((x.t.q - 1) // 2)).v == 1


class RatFn:
    """Reduced rational function num/den with den monic."""
    __slots__ = ("num", "den")

    def __init__(self, num, den, reduce=True):
        if not den:
            raise ZeroDivisionError("zero denominator")
        if reduce and num:
            g = poly_gcd(num, den)
            if g.deg > 0:
                num, den = num // g, den // g
        if not num:
            den = Poly(den.t, [1])
        lc = den.lc()
        if lc.v != 1:
            inv = lc.inv()
            num, den = num.scale(inv), den.scale(inv)
        self.num, self.den = num, den

    @property
    def t(self):
        return self.num.t

    @property
    def deg(self):
        return max(self.num.deg, self.den.deg, 0)

    def is_constant(self):
        return self.num.deg <= 0 and self.den.deg <= 0

    def __eq__(self, other):
        return isinstance(other, RatFn) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __call__(self, x):
        if x is INF:
            dn, dd = self.num.deg, self.den.deg
            if dn > dd:
                return INF
            if dn < dd:
                return self.t.zero
            return self.num.lc() / self.den.lc()
        d = self.den(x)
        if d.v == 0:
            return INF
        return self.num(x) / d

    def eval_many(self, xs):
        """Values on an array of finite points; -1 marks infinity."""
        t = self.t
        n = self.num.eval_many(xs)
        d = self.den.eval_many(xs)
        dinv = t.v_pow(d, -1)
        return np.where(d == 0, -1, t.v_mul(n, dinv))

    def derivative_num(self):
        """Numerator of the derivative: N'D - ND'."""
        return self.num.derivative() * self.den - self.num * self.den.derivative()

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    def __repr__(self):
        return f"({self.num!r}) / ({self.den!r})"


def _homog(P, n, a, b, c, d):
    """y^n P(x/y) with x = aX+b, y = cX+d."""
    t = P.t
    x = Poly(t, [b, a])
    y = Poly(t, [d, c])
    out = Poly(t, [])
    for i, coef in enumerate(P.c):
        if coef.v:
            out = out + (x ** i) * (y ** (n - i)) * coef
    return out


class Mobius:
    """(aX+b)/(cX+d) with ad - bc nonzero."""
    __slots__ = ("a", "b", "c", "d", "kind")

    def __init__(self, a, b, c, d, kind=None):
        if (a * d - b * c).v == 0:
            raise DegenerateParameters("ad - bc = 0")
        self.a, self.b, self.c, self.d = a, b, c, d
        self.kind = kind if kind is not None else "General"

    @property
    def t(self):
        return self.a.t

    @classmethod
    def identity(cls, t):
        return cls(t.one, t.zero, t.zero, t.one)

    def __call__(self, x):
        a, b, c, d = self.a, self.b, self.c, self.d
        if x is INF:
            return INF if c.v == 0 else a / c
        den = c * x + d
        if den.v == 0:
            return INF
        return (a * x + b) / den

    def inverse(self):
        return Mobius(self.d, -self.b, -self.c, self.a, self.kind_inverse())

    def kind_inverse(self):
        return "PermutesMu" if self.kind == "PermutesMu" else "General"

    def compose(self, other):
        """self o other"""
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return Mobius(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def scaled(self, s):
        """s * self(X)"""
        return Mobius(s * self.a, s * self.b, self.c, self.d, None)

    def as_ratfn(self):
        t = self.t
        return RatFn(Poly(t, [self.b, self.a]), Poly(t, [self.d, self.c]))

    def normalized(self):
        """Scale the four entries so the first nonzero of (c, d) is 1."""
        s = self.c if self.c.v else self.d
        inv = s.inv()
        return (self.a * inv, self.b * inv, self.c * inv, self.d * inv)

    def action_kind(self):
        """Exhaustively determine how the map acts on mu."""
        t = self.t
        mu = t.mu()
        imgs = [self(x) for x in mu]
        if all(y is not INF and in_mu(y) for y in imgs) and len(set(imgs)) == len(mu):
            return "PermutesMu"
        if all(y is INF or y.is_base() for y in imgs) and len(set(imgs)) == len(mu):
            return "MuToP1"
        return "General"

    def verified(self):
        self.kind = self.action_kind()
        return self

    def __repr__(self):
        return f"Mobius(({self.a})X+({self.b}) / ({self.c})X+({self.d}), {self.kind})"


def mobius_permuting_mu(alpha, beta):
    """(conj(beta) X + conj(alpha)) / (alpha X + beta)."""
    if (alpha * alpha.conj() - beta * beta.conj()).v == 0:
        raise DegenerateParameters("alpha*conj(alpha) = beta*conj(beta)")
    m = Mobius(beta.conj(), alpha.conj(), alpha, beta)
    assert m.action_kind() == "PermutesMu"
    m.kind = "PermutesMu"
    return m


def mobius_mu_to_p1(gamma, delta):
    """(delta X + gamma conj(delta)) / (X + gamma), mapping mu onto P^1(F_q)."""
    if not in_mu(gamma):
        raise GammaNotInMuError(f"{gamma} is not in mu")
    if delta.is_base():
        raise DeltaInBaseFieldError(f"{delta} lies in F_q")
    t = gamma.t
    m = Mobius(delta, gamma * delta.conj(), t.one, gamma)
    assert m.action_kind() == "MuToP1"
    m.kind = "MuToP1"
    return m


def post_compose(rho, g):
    """rho o g"""
    a, b, c, d = rho.a, rho.b, rho.c, rho.d
    return RatFn(g.num * a + g.den * b, g.num * c + g.den * d)


def pre_compose(g, tau):
    """g o tau"""
    n = max(g.num.deg, g.den.deg, 0)
    args = (tau.a, tau.b, tau.c, tau.d)
    num = _homog(g.num, n, *args)
    den = _homog(g.den, n, *args)
    return RatFn(num, den)


def conjugate(g, rho, sigma):
    """rho o g o sigma^-1"""
    return post_compose(rho, pre_compose(g, sigma.inverse()))


def conjugate_to_base(g, rho, sigma):
    """rho o g o sigma^-1 for maps rho, sigma taking mu onto P^1(F_q).

    The result must have all coefficients in F_q.
    """
    t = g.t
    for x in t.mu():
        y = g(x)
        if not (y is INF or y.v == 0 or in_mu(y)):
            raise ShapeViolation("g does not map mu into mu plus {0, inf}")
    for m, name in ((rho, "rho"), (sigma, "sigma")):
        if m.kind != "MuToP1" and m.action_kind() != "MuToP1":
            raise ShapeViolation(f"{name} does not map mu onto P^1(F_q)")
    h = conjugate(g, rho, sigma)
    if not all(a.is_base() for a in h.num.c + h.den.c):
        raise CoefficientsNotInBaseField("conjugated map has coefficients outside F_q")
    return h
