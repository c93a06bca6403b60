"""Brute-force planarity testing and constructors for the named families.

Function tables are numpy arrays indexed by element index.  A pair
(x, y) in F_q^2 is stored at index x + q*y, which is also the index of
x + u*y in F_{q^2}; so addition of pairs is addition of indices and one
derivative routine serves both kinds of table.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (EpsilonConstraintViolated, SingularLinearMap,
                     ZetaInBaseFieldError)
from .field_tower import in_mu
from .quad_core import CoeffVec, f_values

UNIVARIATE = "Univariate"
BIPROJECTIVE = "Biprojective"


@dataclass
class FnTable:
    tower: object
    values: np.ndarray
    kind: str = UNIVARIATE

    @property
    def n(self):
        return len(self.values)


@dataclass
class BruteResult:
    planar: bool
    witness: Optional[tuple] = None  # (a, b, x1, x2) as element indices


def table_of(c):
    """Table of the quadrinomial f_c."""
    return FnTable(c.t, f_values(c))


def _rows_injective(rows):
    """Index of the first row with a repeated value, or -1."""
    s = np.sort(rows, axis=1)
    bad = np.any(s[:, 1:] == s[:, :-1], axis=1)
    hit = np.nonzero(bad)[0]
    return int(hit[0]) if len(hit) else -1


def derivative_rows(F, dirs):
    t = F.tower
    xs = np.arange(F.n, dtype=np.int64)
    dirs = np.asarray(dirs, dtype=np.int64)
    shifted = t.v_add(xs[None, :], dirs[:, None])
    return t.v_sub(F.values[shifted], F.values[None, :])


def is_planar_bruteforce(F, directions=None, chunk=None):
    """Every derivative x -> F(x+a) - F(x), a != 0, must be a bijection.

    Stops at the first failing direction in canonical order.
    """
    n = F.n
    dirs = np.arange(1, n) if directions is None else np.asarray(directions)
    if chunk is None:
        chunk = max(1, min(len(dirs), 2 ** 20 // max(n, 1)))
    for start in range(0, len(dirs), chunk):
        block = dirs[start:start + chunk]
        rows = derivative_rows(F, block)
        i = _rows_injective(rows)
        if i >= 0:
            a = int(block[i])
            row = rows[i]
            order = np.argsort(row, kind="stable")
            srt = row[order]
            j = int(np.nonzero(srt[1:] == srt[:-1])[0][0])
            x1, x2 = int(order[j]), int(order[j + 1])
            return BruteResult(False, (a, int(srt[j]), x1, x2))
    return BruteResult(True, None)


def verify_witness(F, w):
    t = F.tower
    a, b, x1, x2 = w
    if x1 == x2 or a == 0:
        return False
    for x in (x1, x2):
        if t.sub_i(int(F.values[t.add_i(x, a)]), int(F.values[x])) != b:
            return False
    return True


def is_two_to_one(F):
    """One singleton fibre, every other fibre of size 0 or 2 (odd domain size)."""
    counts = np.bincount(F.values, minlength=F.n)
    ones = int(np.sum(counts == 1))
    return ones == 1 and bool(np.all((counts == 0) | (counts == 1) | (counts == 2)))


def do_planarity_equivalence(F):
    """Compare planarity with being two-to-one with zero kernel {0}."""
    planar = is_planar_bruteforce(F).planar
    zero_kernel = bool(F.values[0] == 0 and np.sum(F.values == 0) == 1)
    ttz = is_two_to_one(F) and zero_kernel
    return {"planar": planar, "two_to_one_with_zero_kernel": ttz,
            "agree": planar == ttz}


# ----------------------------------------------------------------------
# named families

BIPROJ_FORMS = {
    # (first, second) coefficient vectors over x^(Q+1), x^Q y, x y^Q, y^(Q+1)
    "P0": lambda e: ((1, 0, 0, 0), (0, 0, 0, 1)),
    "P1": lambda e: ((1, 0, 0, 0), (0, 0, 1, 1)),
    "P2": lambda e: ((0, 1, 0, 0), (1, 0, 0, e)),
    "P3": lambda e: ((1, -1, 0, 0), (0, 0, 1, e)),
}
UNIVARIATE_FORMS = {
    "F0": lambda e: (0, 0, 0, 1),
    "F1": lambda e: (0, 0, 1, 0),
    "F2": lambda e: (0, 0, 1, e),
}
TAGS = ("P0", "F0", "F1", "P1", "P2", "P3", "F2")


def check_epsilon(tag, eps, tower):
    if tag in ("P2", "P3"):
        if eps is None or eps.v == 0 or not eps.is_base():
            raise EpsilonConstraintViolated(f"{tag} needs epsilon in F_q^*")
        if tag == "P3" and eps == tower(-1):
            raise EpsilonConstraintViolated("P3 needs epsilon != -1")
    elif tag == "F2":
        if eps is None or eps.v == 0 or in_mu(eps):
            raise EpsilonConstraintViolated("F2 needs epsilon nonzero and off the unit circle")


def biprojective_table(tower, first, second):
    """Table of (x, y) -> (sum first_i m_i, sum second_i m_i) on F_q^2."""
    t, q, Q = tower, tower.q, tower.Q
    idx = np.arange(t.q2, dtype=np.int64)
    x, y = idx % q, idx // q
    xQ, yQ = t.v_pow(x, Q), t.v_pow(y, Q)
    monos = [t.v_mul(xQ, x), t.v_mul(xQ, y), t.v_mul(x, yQ), t.v_mul(yQ, y)]
    comps = []
    for coef in (first, second):
        acc = np.zeros_like(idx)
        for a, m in zip(coef, monos):
            a = tower(a)
            if a.v:
                acc = t.v_add(acc, t.v_mul(np.full_like(idx, a.v), m))
        assert np.all(acc < q)
        comps.append(acc)
    return FnTable(tower, comps[0] + q * comps[1], BIPROJECTIVE)


def make_family(tag, epsilon, tower):
    eps = None if epsilon is None else tower(epsilon)
    check_epsilon(tag, eps, tower)
    if tag in BIPROJ_FORMS:
        first, second = BIPROJ_FORMS[tag](eps)
        return biprojective_table(tower, first, second)
    if tag in UNIVARIATE_FORMS:
        return table_of(CoeffVec(tower, UNIVARIATE_FORMS[tag](eps)))
    if tag == "X2":
        return FnTable(tower, tower.power_table(2))
    raise ValueError(f"unknown family {tag}")


def default_zeta(tower):
    return tower.gen()


def embed_biprojective(P, zeta=None):
    """Univariate table of X = x + zeta y -> first + zeta second."""
    t, q = P.tower, P.tower.q
    zeta = default_zeta(t) if zeta is None else t(zeta)
    if zeta.is_base():
        raise ZetaInBaseFieldError("zeta must lie outside F_q")
    idx = np.arange(t.q2, dtype=np.int64)
    x, y = idx % q, idx // q
    z = np.full_like(idx, zeta.v)
    X = t.v_add(x, t.v_mul(z, y))
    v1, v2 = P.values % q, P.values // q
    out = np.empty_like(idx)
    out[X] = t.v_add(v1, t.v_mul(z, v2))
    return FnTable(t, out, UNIVARIATE)


# ----------------------------------------------------------------------
# quadrinomial coefficient algebra


def _mat(c):
    return [[c[0], c[1]], [c[2], c[3]]]


def _mmul(A, B):
    return [[A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in range(2)] for i in range(2)]


def _qtwist_t(A, Q):
    """Entries raised to the Q-th power, transposed."""
    return [[A[j][i] ** Q for j in range(2)] for i in range(2)]


def _check_bijective(L):
    s, t = L
    if (s * s.conj() - t * t.conj()).v == 0:
        raise SingularLinearMap("s conj(s) = t conj(t)")


def linear_values(tower, L, xs):
    s, t = L
    n = len(xs)
    return tower.v_add(tower.v_mul(np.full(n, s.v, dtype=np.int64), xs),
                       tower.v_mul(np.full(n, t.v, dtype=np.int64), tower.v_conj(xs)))


def compose_linear(c, L1, L2, verify=True):
    """c' with f_{c'} = L1 o f_c o L2 for L(X) = s X + t X^q."""
    t = c.t
    L1 = (t(L1[0]), t(L1[1]))
    L2 = (t(L2[0]), t(L2[1]))
    _check_bijective(L1)
    _check_bijective(L2)
    s, u = L2
    T = [[s.conj(), u.conj()], [u, s]]
    M = _mmul(_mmul(_qtwist_t(T, t.Q), _mat(c)), T)
    s1, u1 = L1
    Mb = [[c[3].conj(), c[2].conj()], [c[1].conj(), c[0].conj()]]
    Mb = _mmul(_mmul(_qtwist_t(T, t.Q), Mb), T)
    out = CoeffVec(t, [s1 * M[i // 2][i % 2] + u1 * Mb[i // 2][i % 2] for i in range(4)])
    if verify:
        xs = np.arange(t.q2, dtype=np.int64)
        rhs = linear_values(t, L1, f_values(c, linear_values(t, L2, xs)))
        assert np.array_equal(f_values(out), rhs), "compose_linear mismatch"
    return out


def embedded_coeffs(tower, first, second, zeta=None):
    """Quadrinomial coefficients of the embedding of a biprojective pair."""
    t = tower
    zeta = default_zeta(t) if zeta is None else t(zeta)
    if zeta.is_base():
        raise ZetaInBaseFieldError("zeta must lie outside F_q")
    zb = zeta.conj()
    d = (zeta - zb).inv()
    S = [[zeta * d, -zb * d], [-d, d]]
    f = [t(a) for a in first]
    s2 = [t(a) for a in second]
    N = [[f[0] + zeta * s2[0], f[1] + zeta * s2[1]],
         [f[2] + zeta * s2[2], f[3] + zeta * s2[3]]]
    M = _mmul(_mmul(_qtwist_t(S, t.Q), N), S)
    return CoeffVec(t, [M[0][0], M[0][1], M[1][0], M[1][1]])


def canonical_coeffs(tower, tag, epsilon=None, zeta=None):
    """Quadrinomial coefficients of a canonical form (biprojective ones embedded)."""
    eps = None if epsilon is None else tower(epsilon)
    check_epsilon(tag, eps, tower)
    if tag in UNIVARIATE_FORMS:
        return CoeffVec(tower, UNIVARIATE_FORMS[tag](eps))
    first, second = BIPROJ_FORMS[tag](eps)
    return embedded_coeffs(tower, first, second, zeta)


def random_linear(tower, rng):
    """A random bijection X -> sX + tX^q, drawn from a random.Random."""
    while True:
        s = tower.elt(rng.randrange(tower.q2))
        u = tower.elt(rng.randrange(tower.q2))
        if (s * s.conj() - u * u.conj()).v:
            return (s, u)
