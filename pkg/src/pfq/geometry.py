"""Ramification of the rational map g attached to a quadrinomial."""
from dataclasses import dataclass, field

from .errors import (BothUVZeroError, ConstantFunctionError, ConstantGError,
                     NonSeparableError, PreimageOutsideWorkingField)
from .field_tower import in_mu
from .polyring import (INF, Mobius, point_key, point_str, poly_gcd,
                       pre_compose, quad_roots, roots_in_field)
from .quad_core import build_quad, invariants


def _flip(G):
    """G(1/X)"""
    t = G.t
    return pre_compose(G, Mobius(t.zero, t.one, t.one, t.zero))


def ram_index(G, alpha):
    """Ramification index of G at a point alpha of P^1."""
    if G.is_constant():
        raise ConstantFunctionError("constant map has no ramification")
    if alpha is INF:
        return ram_index(_flip(G), G.t.zero)
    beta = G(alpha)
    if beta is INF:
        return G.den.root_multiplicity(alpha)
    return (G.num - G.den.scale(beta)).root_multiplicity(alpha)


def ram_multiset(G, beta):
    """Sorted ramification indices over the fibre G^-1(beta)."""
    if G.is_constant():
        raise ConstantFunctionError("constant map")
    if beta is INF:
        H = G.den
    else:
        H = G.num - G.den.scale(beta)
    out = []
    if H:
        rs = roots_in_field(H)
        out = [rs.count(a) for a in sorted(set(rs), key=point_key)]
    if G(INF) == beta:
        out.append(ram_index(G, INF))
    if sum(out) != G.deg:
        raise PreimageOutsideWorkingField(
            f"fibre over {point_str(beta)} is not contained in F_q^2")
    return sorted(out)


def fibre(G, beta):
    """Points of P^1(F_{q^2}) mapping to beta, with their indices."""
    H = G.den if beta is INF else G.num - G.den.scale(beta)
    pts = []
    if H:
        for a in sorted(set(roots_in_field(H)), key=point_key):
            pts.append((a, ram_index(G, a)))
    if G(INF) == beta:
        pts.append((INF, ram_index(G, INF)))
    return pts


def ram_points(G):
    """All ramification points of G with their indices.

    Returns (points, complete) where complete is False if the derivative
    has roots outside F_{q^2}, i.e. some ramification was not located.
    """
    if G.is_constant():
        raise ConstantFunctionError("constant map")
    R = G.derivative_num()
    if not R:
        raise NonSeparableError("derivative vanishes")
    pts = {}
    rs = roots_in_field(R)
    complete = len(rs) == R.deg
    for a in set(rs):
        e = ram_index(G, a)
        if e > 1:
            pts[a] = e
    D = G.den
    if D.deg > 0:
        M = poly_gcd(D, D.derivative()) if D.derivative() else D
        if M.deg > 0:
            mr = roots_in_field(M)
            complete = complete and len(mr) == M.deg
            for a in set(mr):
                pts[a] = ram_index(G, a)
    e = ram_index(G, INF)
    if e > 1:
        pts[INF] = e
    return dict(sorted(pts.items(), key=lambda kv: point_key(kv[0]))), complete


def hurwitz_check(G):
    """2 deg G - 2 >= sum (e - 1), with equality exactly when tame."""
    if G.is_constant():
        raise ConstantFunctionError("constant map")
    if not G.derivative_num():
        raise NonSeparableError("derivative vanishes")
    pts, complete = ram_points(G)
    if not complete:
        raise PreimageOutsideWorkingField("ramification outside F_q^2")
    p = G.t.p
    lhs = 2 * G.deg - 2
    rhs = sum(e - 1 for e in pts.values())
    tame = all(e % p for e in pts.values())
    return {"lhs": lhs, "rhs": rhs, "tame": tame,
            "holds": lhs >= rhs and (lhs == rhs) == tame}


def _point_set(P):
    """Roots of a quadratic of the SCR shape, padded with infinity to size 2."""
    if not P:
        return None
    return tuple(sorted(set(quad_roots(P)), key=point_key))


def _circle_pair(S):
    """True if S is {a, conj(a)^-1} for some a off the unit circle."""
    if len(S) != 2:
        return False
    a, b = S
    if a is INF:
        a, b = b, a
    if a is INF:
        return False
    if a.v == 0:
        return b is INF
    if in_mu(a) or b is INF:
        return False
    return b == a.conj().inv()


def _in_mu_all(S):
    return all(x is not INF and in_mu(x) for x in S)


@dataclass
class RamReport:
    gamma: tuple
    lam: tuple
    sigma: tuple
    ram: dict
    complete: bool
    multisets: dict
    hurwitz: dict
    checks: dict = field(default_factory=dict)

    def ok(self):
        return all(self.checks.values())

    def to_json(self):
        def pts(S):
            return None if S is None else [point_str(x) for x in S]
        return {"gamma": pts(self.gamma), "lambda": pts(self.lam),
                "sigma": pts(self.sigma),
                "ramification": {point_str(a): e for a, e in self.ram.items()},
                "multisets": {point_str(b): m for b, m in self.multisets.items()},
                "hurwitz": self.hurwitz, "checks": self.checks}


def ram_report(c):
    qd = build_quad(c)
    inv = invariants(c)
    if not inv.U and not inv.V:
        raise BothUVZeroError("U = V = 0")
    g = qd.g
    if g.is_constant():
        raise ConstantGError("g is constant")
    if not inv.V:
        # then g' = 0, so g is a p-th power and Hurwitz does not apply
        raise NonSeparableError("V = 0, g is inseparable")
    Q = c.t.Q
    gamma, lam, sig = _point_set(inv.V), _point_set(inv.W), _point_set(inv.U)
    ram, complete = ram_points(g)
    branch = sorted({g(a) for a in ram}, key=point_key)
    multisets = {}
    for b in branch:
        multisets[b] = ram_multiset(g, b)
    checks = {"ramification_located": complete}

    # ramification read off A B' - A' B, which must agree with the roots of V
    R = qd.A * qd.B.derivative() - qd.A.derivative() * qd.B
    if R and inv.V:
        rs = set(roots_in_field(R))
        if R.deg < 2 * Q:
            rs.add(INF)
        checks["E2_roots_match_gamma"] = rs == set(gamma)

    full = bool(inv.U) and bool(inv.V) and bool(inv.W)
    if full:
        d0 = inv.theta1_sq.v == 0
        checks["gamma_lambda_size"] = (len(gamma) == len(lam) and len(gamma) in (1, 2)
                                       and (len(gamma) == 1) == d0)
        checks["gamma_lambda_position"] = (
            (_in_mu_all(gamma) and _in_mu_all(lam))
            or (_circle_pair(gamma) and _circle_pair(lam)))
        checks["gamma_is_ramification"] = set(ram) == set(gamma)
        checks["branch_in_lambda"] = set(branch) <= set(lam)
        if qd.C.deg == 0:
            checks["lambda_is_branch"] = set(branch) == set(lam)
            checks["multisets_shape"] = all(m in ([Q + 1], [1, Q])
                                            for m in multisets.values())
    hw = hurwitz_check(g)
    checks["hurwitz"] = hw["holds"]
    return RamReport(gamma, lam, sig, ram, complete, multisets, hw, checks)
