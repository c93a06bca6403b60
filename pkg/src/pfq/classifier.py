"""Decision tree, canonical decompositions and planarity verdicts.

The seven linear equivalence classes are

    P0 (x^(Q+1), y^(Q+1))            F0  X^(Q+1)
    F1 X^(Q+q)                       P1  (x^(Q+1), x y^Q + y^(Q+1))
    P2 (x^Q y, x^(Q+1) + e y^(Q+1))  P3  (x^(Q+1) - x^Q y, x y^Q + e y^(Q+1))
    F2 X^(Q+q) + e X^(Q+1)

where biprojective pairs (x, y) -> (u, v) are read on F_{q^2} through
X = x + zeta*y and u + zeta*v.  A witness is a pair of linear bijections
L(X) = s X + t X^q with f_c = L1 o canonical o L2 on all of F_{q^2}.
"""
from dataclasses import dataclass, field
from math import gcd
from typing import Optional

import numpy as np

from .errors import (KDoesNotDivideL, PreconditionViolated,
                     WitnessVerificationFailed)
from .field_tower import in_mu, is_square_in_fq
from .oracle import canonical_coeffs, compose_linear, default_zeta
from .polyring import (INF, Mobius, conjugate, point_key, poly_gcd,
                       quad_roots, roots_in_mu)
from .quad_core import build_quad, f_values, invariants

COARSE = ("ConstantG", "ARootInMu", "MonomialEquiv", "BranchOneQ")
FAMILY_CLASS = {"i1": "P0", "i2": "F0", "i3": "F1",
                "ii1": "P1", "ii2": "P2", "ii3": "P3", "ii4": "F2"}


# ----------------------------------------------------------------------
# small helpers


def solve_norm_ratio(r):
    """Some d != 0 with d^(q-1) = r, for r on the unit circle."""
    t = r.t
    if not in_mu(r):
        raise PreconditionViolated(f"{r} is not on the unit circle")
    if r == t(-1):
        u = t.gen()
        return u - u.conj()
    return 1 + r.inv()


def _mobius_to(a, b, t):
    """d (X - a)/(X - b) with conj(d)/d = a/b; sends a -> 0, b -> inf.

    For a, b on the unit circle the map takes mu onto P^1(F_q).
    """
    d = solve_norm_ratio(a / b)
    return Mobius(d, -d * a, t.one, -b)


def _circle_swap(beta, t):
    """A map permuting mu with beta -> inf and conj(beta)^-1 -> 0."""
    if beta is INF:
        return Mobius.identity(t)
    # -(conj(beta) X - 1)/(X - beta)
    return Mobius(-beta.conj(), t.one, t.one, -beta)


def _has_mu_root(P):
    return bool(P) and bool(roots_in_mu(P))


def _point_set(P):
    return tuple(sorted(set(quad_roots(P)), key=point_key))


def _pick(points):
    """Deterministic choice: infinity if present, else the smallest index."""
    return sorted(points, key=lambda x: (0, 0) if x is INF else (1, x.v))[0]


def _poly_only(P, degs):
    """True if P has nonzero coefficients only in the given degrees."""
    return all(a.v == 0 or i in degs for i, a in enumerate(P.c))


# ----------------------------------------------------------------------
# decision tree


def coarse_case(c):
    qd = build_quad(c)
    inv = invariants(c)
    t = c.t
    if not inv.U and not inv.V:
        assert qd.g.is_constant()
        return "ConstantG"
    assert not qd.g.is_constant()
    mu_root = any(_has_mu_root(P) for P in (inv.U, inv.V) if P)
    rule_hit = mu_root and qd.deg_g != t.Q + 1
    mu = np.array([x.v for x in t.mu()], dtype=np.int64)
    direct = bool(np.any(qd.A.eval_many(mu) == 0))
    assert rule_hit == direct, "A has a root on the unit circle iff the U,V rule fires"
    if rule_hit:
        return "ARootInMu"
    if not inv.U or not inv.V:
        raise AssertionError("U and V must both be nonzero here")
    ratio = inv.U.lc() / inv.V.lc()
    if inv.U == inv.V.scale(ratio):
        return "MonomialEquiv"
    return "BranchOneQ"


def family(c):
    cc = coarse_case(c)
    if cc not in ("MonomialEquiv", "BranchOneQ"):
        raise PreconditionViolated(f"no family for coarse case {cc}")
    inv = invariants(c)
    if cc == "MonomialEquiv":
        gamma = _point_set(inv.V)
        inside = [x is not INF and in_mu(x) for x in gamma]
        if all(inside):
            return "i1"
        assert not any(inside)
        C = build_quad(c).C
        return "i2" if C.deg == 0 else "i3"
    if poly_gcd(inv.U, inv.V).deg > 0:
        return "ii1"
    rs = roots_in_mu(inv.U)
    if not rs:
        return "ii4"
    if len(set(rs)) == 1:
        return "ii2"
    return "ii3"


# ----------------------------------------------------------------------
# canonical decomposition


@dataclass
class ClassLabel:
    tag: str
    epsilon: Optional[object] = None

    def __str__(self):
        return self.tag if self.epsilon is None else f"{self.tag}({self.epsilon})"


@dataclass
class EquivWitness:
    L1: tuple
    L2: tuple
    canonical: object  # CoeffVec of the canonical form (biprojective ones embedded)
    zeta: object = None

    def to_json(self):
        return {"L1": [str(x) for x in self.L1], "L2": [str(x) for x in self.L2],
                "canonical": self.canonical.strs(),
                "zeta": None if self.zeta is None else str(self.zeta)}


def _univariate_L2(sigma):
    """L2 = (s, t) with s = a2, t = a1 for sigma = (conj(a2) X + conj(a1))/(a1 X + a2)."""
    a, b, cc, d = sigma.a, sigma.b, sigma.c, sigma.d
    if d.v:
        k = solve_norm_ratio(a / d.conj())
    else:
        k = solve_norm_ratio(b / cc.conj())
    a1, a2 = k * cc, k * d
    assert (k * a) == a2.conj() and (k * b) == a1.conj()
    return (a2, a1)


def _biprojective_L2(sigma, zeta):
    """L2 for sigma = (alpha X + gamma conj(alpha))/(X + gamma) and the zeta embedding."""
    inv = sigma.c.inv()
    alpha, beta, gamma = sigma.a * inv, sigma.b * inv, sigma.d * inv
    assert beta == gamma * alpha.conj()
    eps = solve_norm_ratio(gamma)
    eb, ab = eps.conj(), alpha.conj()
    return (eb * ab + zeta * eb, eps * alpha + zeta * eps)


def _solve_L1(target, inner):
    """(s, t) with s*inner + t*conj-swap(inner) = target, coefficientwise."""
    t = target.t
    v = list(inner)
    w = [inner[3].conj(), inner[2].conj(), inner[1].conj(), inner[0].conj()]
    r = list(target)
    sol = None
    for i in range(4):
        for j in range(i + 1, 4):
            det = v[i] * w[j] - v[j] * w[i]
            if det.v:
                s = (r[i] * w[j] - r[j] * w[i]) / det
                u = (v[i] * r[j] - v[j] * r[i]) / det
                sol = (s, u)
                break
        if sol:
            break
    if sol is None:
        # inner and its conjugate are proportional; a pure scaling suffices
        i = next(i for i in range(4) if v[i].v)
        sol = (r[i] / v[i], t.zero)
    s, u = sol
    if any(s * v[i] + u * w[i] != r[i] for i in range(4)):
        raise WitnessVerificationFailed("no linear L1 matches the coefficients")
    return sol


def _finish(c, tag, eps, sigma, kind, zeta):
    t = c.t
    canon = canonical_coeffs(t, tag, eps, zeta if kind == "bi" else None)
    if kind == "bi":
        L2 = _biprojective_L2(sigma, zeta)
    else:
        L2 = _univariate_L2(sigma)
    try:
        inner = compose_linear(canon, (t.one, t.zero), L2)
        L1 = _solve_L1(c, inner)
        out = compose_linear(canon, L1, L2)
    except (AssertionError, ZeroDivisionError) as e:
        raise WitnessVerificationFailed(str(e))
    if tuple(out) != tuple(c) or not np.array_equal(f_values(out), f_values(c)):
        raise WitnessVerificationFailed("pointwise identity fails")
    return ClassLabel(tag, eps), EquivWitness(L1, L2, canon, zeta if kind == "bi" else None)


def _base_h(g, rho, sigma):
    h = conjugate(g, rho, sigma)
    if not all(a.is_base() for a in h.num.c + h.den.c):
        raise WitnessVerificationFailed("conjugated map not defined over F_q")
    return h


def canonical_decomposition(c, zeta=None, fam=None):
    fam = family(c) if fam is None else fam
    t, Q = c.t, c.t.Q
    zeta = default_zeta(t) if zeta is None else t(zeta)
    qd = build_quad(c)
    inv = invariants(c)
    g = qd.g
    tag = FAMILY_CLASS[fam]

    if fam == "i1":
        g1, g2 = _point_set(inv.V)
        sigma = _mobius_to(g1, g2, t)
        rho = _mobius_to(g(g1), g(g2), t)
        h = _base_h(g, rho, sigma)
        if not (h.den.deg == 0 and _poly_only(h.num, {Q + 1})):
            raise WitnessVerificationFailed(f"expected kappa X^(Q+1), got {h}")
        return _finish(c, tag, None, sigma, "bi", zeta)

    if fam == "ii1":
        common = poly_gcd(inv.U, inv.V)
        alpha = quad_roots(common.scale(1))[0] if common.deg == 2 else -common.c[0]
        others = [x for x in _point_set(inv.V) if x != alpha]
        beta2 = others[0]
        sig_t = _mobius_to(alpha, beta2, t)
        rho_t = _mobius_to(g(alpha), g(beta2), t)
        h = _base_h(g, rho_t, sig_t)
        # h = lam X^(Q+1)/(X + eps)
        if not (h.den.deg == 1 and _poly_only(h.num, {Q + 1})):
            raise WitnessVerificationFailed(f"unexpected shape {h}")
        eps = h.den.c[0]
        sigma = Mobius(sig_t.a / eps, sig_t.b / eps, sig_t.c, sig_t.d)
        return _finish(c, tag, None, sigma, "bi", zeta)

    if fam == "ii2":
        a1 = roots_in_mu(inv.U)[0]
        a2 = roots_in_mu(inv.V)[0]
        beta = g(a2)
        lam = _point_set(inv.W)
        if beta not in lam or g(a1) != beta:
            raise WitnessVerificationFailed("branch point pairing fails")
        sigma = _mobius_to(a2, a1, t)  # ramified a2 -> 0, a1 -> inf
        d = t.gen()
        rho_t = Mobius(t.one, -beta, d, -beta * d.conj())
        h = _base_h(g, rho_t, sigma)
        # h = X^Q / (c00 X^(Q+1) + c01 X^Q + c02 X + c03)
        if not (_poly_only(h.num, {Q}) and h.num.deg == Q
                and _poly_only(h.den, {Q + 1, Q, 1, 0})):
            raise WitnessVerificationFailed(f"unexpected shape {h}")
        n = h.num.lc()
        D = h.den.scale(n.inv())
        c00, c02, c03 = D.coef(Q + 1), D.coef(1), D.coef(0)
        if c02.v != 0:
            raise WitnessVerificationFailed("linear term of the denominator is nonzero")
        eps = c03 / c00
        return _finish(c, tag, eps, sigma, "bi", zeta)

    if fam == "ii3":
        b1, b2 = _point_set(inv.V)
        sig_t = _mobius_to(b2, b1, t)
        rho_t = _mobius_to(g(b2), g(b1), t)
        h = _base_h(g, rho_t, sig_t)
        # h = lam X^Q (X + e1)/(X + e2)
        if not (h.den.deg == 1 and h.num.deg == Q + 1 and _poly_only(h.num, {Q, Q + 1})):
            raise WitnessVerificationFailed(f"unexpected shape {h}")
        e1 = h.num.coef(Q) / h.num.coef(Q + 1)
        e2 = h.den.c[0]
        eps = -e2 / e1
        m = -e1.inv()
        sigma = Mobius(sig_t.a * m, sig_t.b * m, sig_t.c, sig_t.d)
        return _finish(c, tag, eps, sigma, "bi", zeta)

    # families whose maps permute the unit circle
    gamma = _point_set(inv.V)
    beta = _pick(gamma)
    sigma = _circle_swap(beta, t)
    rho_t = _circle_swap(g(beta), t)
    h = conjugate(g, rho_t, sigma)
    if fam == "i2":
        if not (h.den.deg == 0 and _poly_only(h.num, {Q + 1})):
            raise WitnessVerificationFailed(f"expected kappa X^(Q+1), got {h}")
        return _finish(c, tag, None, sigma, "uni", zeta)
    if fam == "i3":
        if not (h.den.deg == 0 and _poly_only(h.num, {Q - 1})):
            raise WitnessVerificationFailed(f"expected kappa X^(Q-1), got {h}")
        return _finish(c, tag, None, sigma, "uni", zeta)
    # ii4: h = X^Q (n1 X + n0)/(X + d0)
    if not (h.den.deg == 1 and h.num.deg == Q + 1 and _poly_only(h.num, {Q, Q + 1})):
        raise WitnessVerificationFailed(f"unexpected shape {h}")
    n1, n0 = h.num.coef(Q + 1), h.num.coef(Q)
    eps = h.den.c[0]
    if n0.v == 0 or n1 / n0 != eps.conj() or in_mu(eps) or eps.v == 0:
        raise WitnessVerificationFailed("numerator does not match conj(eps) X + 1")
    return _finish(c, tag, eps, sigma, "uni", zeta)


# ----------------------------------------------------------------------
# verdicts


@dataclass
class Verdict:
    planar: bool
    rule: str
    label: Optional[ClassLabel] = None
    coarse: Optional[str] = None
    family: Optional[str] = None
    witness: Optional[EquivWitness] = None
    extra: dict = field(default_factory=dict)

    @property
    def cls(self):
        return self.label.tag if self.label else None

    def epsilon_square_class(self):
        e = self.label.epsilon if self.label else None
        if e is None or not e.is_base() or e.v == 0:
            return None
        return "square" if is_square_in_fq(e) else "nonsquare"

    def to_json(self):
        out = {"planar": self.planar, "rule": self.rule,
               "coarse": self.coarse, "family": self.family,
               "class": self.cls,
               "epsilon": None if not self.label or self.label.epsilon is None
               else str(self.label.epsilon),
               "epsilon_square_class": self.epsilon_square_class()}
        out.update(self.extra)
        return out


def tilde_reduce(c):
    """a = (a0, a1, a2) with f_c = a0 Xb^2 + a1 X Xb + a2 X^2 as functions."""
    t = c.t
    if t.ell % t.k:
        raise KDoesNotDivideL("k does not divide ell")
    c0, c1, c2, c3 = c
    if (t.ell // t.k) % 2:
        return (c2, c0 + c3, c1)
    return (c0, c1 + c2, c3)


def tilde_verdict(c):
    a0, a1, a2 = tilde_reduce(c)
    e = a2 * a2.conj() - a0 * a0.conj()
    th = a1.conj() * a2 - a0.conj() * a1
    d = e * e - th ** (c.t.q + 1)
    assert d.is_base()
    planar = d.v != 0 and is_square_in_fq(d)
    rule = "tilde: discriminant is a nonzero square" if planar else (
        "tilde: discriminant is zero" if d.v == 0 else "tilde: discriminant is a nonsquare")
    return Verdict(planar, rule, ClassLabel("TildeReduced"),
                   extra={"tilde_a": [str(a0), str(a1), str(a2)], "tilde_delta": str(d),
                          "equivalent_to": "X^2" if planar else None})


def verdict_for_class(tag, eps, t):
    """Planarity of a canonical class together with the rule that decides it."""
    k, ell = t.k, t.ell
    d = gcd(k, ell)
    if tag == "P0":
        return False, "P0 is never planar"
    if tag == "F0":
        return (ell // d) % 2 == 0, "X^(Q+1): planar iff ell/gcd(k,ell) even"
    if tag == "F1":
        return (k * ell // (d * d)) % 2 == 1, "X^(Q+q): planar iff k*ell/gcd(k,ell)^2 odd"
    if tag == "P1":
        return False, "P1 is never planar"
    if tag == "P2":
        ok = (k // d) % 2 == 1 and not is_square_in_fq(eps)
        return ok, "P2: planar iff k/gcd(k,ell) odd and epsilon nonsquare"
    if tag == "P3":
        return False, "P3 is not planar when k does not divide ell"
    if tag == "F2":
        return False, "X^(Q+q)+eps X^(Q+1) is not planar when k does not divide ell"
    raise ValueError(tag)


def planar_verdict(c, witness=True, zeta=None):
    t = c.t
    cc = coarse_case(c)
    fam = family(c) if cc in ("MonomialEquiv", "BranchOneQ") else None
    label = wit = None
    if fam is not None:
        label, wit = canonical_decomposition(c, zeta, fam)
    if t.ell % t.k == 0:
        v = tilde_verdict(c)
        v.coarse, v.family = cc, fam
        if label is not None:
            v.label, v.witness = label, wit if witness else None
        return v
    if cc == "ConstantG":
        return Verdict(False, "g constant: not planar", None, cc)
    if cc == "ARootInMu":
        return Verdict(False, "A has a root on the unit circle: not planar", None, cc)
    planar, rule = verdict_for_class(label.tag, label.epsilon, t)
    v = Verdict(planar, rule, label, cc, fam, wit if witness else None)
    if label.tag == "P2" and (t.k // gcd(t.k, t.ell)) % 2 == 0:
        v.extra["epsilon_class_flag"] = "k/gcd(k,ell) even: square class may depend on the decomposition"
    return v
