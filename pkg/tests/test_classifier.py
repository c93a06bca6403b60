import itertools

import numpy as np
import pytest

from pfq.classifier import (FAMILY_CLASS, canonical_decomposition,
                            coarse_case, family, planar_verdict,
                            solve_norm_ratio, tilde_reduce, tilde_verdict,
                            verdict_for_class)
from pfq.errors import KDoesNotDivideL, PreconditionViolated
from pfq.field_tower import in_mu, is_square_in_fq
from pfq.oracle import (canonical_coeffs, compose_linear,
                        is_planar_bruteforce, random_linear, table_of)
from pfq.quad_core import CoeffVec, f_values, poly_A

from conftest import random_c, tower


def C(t, *cs):
    return CoeffVec(t, cs)


def test_family_examples(f9):
    t = f9
    assert family(C(t, 0, 0, 0, 1)) == "i2"
    assert canonical_decomposition(C(t, 0, 0, 0, 1))[0].tag == "F0"
    assert family(C(t, 0, 1, 0, 0)) == "i3"
    assert family(C(t, 0, 0, 1, 0)) == "i3"
    assert coarse_case(C(t, 1, 0, 0, 1)) == "ConstantG"
    with pytest.raises(PreconditionViolated):
        family(C(t, 1, 0, 0, 1))


def test_monomial_verdicts():
    t = tower(3, 3, 1)
    # X^30 = X^(Q+q) with q = 27, Q = 3
    v = planar_verdict(C(t, 0, 0, 1, 0))
    assert v.cls == "F1" and v.planar
    t = tower(3, 1, 1)
    v = planar_verdict(C(t, 0, 0, 0, 1))
    assert not v.planar and v.rule.startswith("tilde")
    t = tower(3, 3, 2)
    # X^(Q+1) = X^10 with Q = 9
    v = planar_verdict(C(t, 0, 0, 0, 1))
    assert v.cls == "F0" and v.planar


def test_solve_norm_ratio(rng):
    t = tower(5, 1, 1)
    for r in t.mu():
        d = solve_norm_ratio(r)
        assert d.v and d ** (t.q - 1) == r


def _eps_choices(t, tag, rng):
    if tag in ("P2", "P3"):
        base = [e for e in t.base_elements() if e.v and not (tag == "P3" and e == t(-1))]
        return rng.sample(base, min(3, len(base)))
    if tag == "F2":
        off = [e for e in t.elements() if e.v and not in_mu(e)]
        return rng.sample(off, 3)
    return [None]


@pytest.mark.parametrize("pkl", [(3, 1, 1), (5, 1, 1), (3, 2, 1), (3, 3, 1), (3, 1, 2)])
@pytest.mark.parametrize("tag", ["P0", "F0", "F1", "P1", "P2", "P3", "F2"])
def test_round_trip(pkl, tag, rng):
    t = tower(*pkl)
    odd = (t.k // np.gcd(t.k, t.ell)) % 2 == 1
    for eps in _eps_choices(t, tag, rng):
        base = canonical_coeffs(t, tag, eps)
        for _ in range(4):
            c = compose_linear(base, random_linear(t, rng), random_linear(t, rng))
            label, w = canonical_decomposition(c)
            assert label.tag == tag
            assert FAMILY_CLASS[family(c)] == tag
            # witness checked independently of the classifier
            rebuilt = compose_linear(w.canonical, w.L1, w.L2)
            assert np.array_equal(f_values(rebuilt), f_values(c))
            if tag == "P2" and odd:
                assert is_square_in_fq(label.epsilon) == is_square_in_fq(eps)


def test_a_root_on_circle_matches_scan(rng):
    t = tower(3, 2, 1)
    for _ in range(300):
        c = random_c(t, rng)
        A = poly_A(c)
        hit = any(A(x).v == 0 for x in t.mu())
        cc = coarse_case(c)
        if cc == "ARootInMu":
            assert hit


def test_exhaustive_f9_total():
    # every nonzero coefficient vector over F_9 gets a verdict that matches brute force
    t = tower(3, 1, 1)
    for vals in itertools.product(range(9), repeat=4):
        if not any(vals):
            continue
        c = CoeffVec(t, [t.elt(v) for v in vals])
        v = planar_verdict(c, witness=False)
        if v.family is not None:
            assert v.cls == FAMILY_CLASS[v.family]
        assert v.planar == is_planar_bruteforce(table_of(c)).planar, vals


@pytest.mark.parametrize("pkl", [(5, 1, 1), (3, 2, 1), (3, 1, 2), (3, 3, 1), (3, 1, 3), (3, 2, 3), (7, 1, 2)])
def test_verdict_matches_bruteforce(pkl, rng):
    t = tower(*pkl)
    for _ in range(40):
        c = random_c(t, rng)
        v = planar_verdict(c)
        assert v.planar == is_planar_bruteforce(table_of(c)).planar, (c, v)


@pytest.mark.parametrize("pkl", [(3, 2, 1), (3, 3, 1), (3, 1, 2)])
def test_verdict_sparse_vectors(pkl, rng):
    # zero coefficients exercise the degenerate branches
    t = tower(*pkl)
    done = 0
    while done < 60:
        c = CoeffVec(t, [t.elt(rng.randrange(t.q2)) if rng.random() < 0.4 else t.zero
                         for _ in range(4)])
        if c.is_zero():
            continue
        assert planar_verdict(c).planar == is_planar_bruteforce(table_of(c)).planar
        done += 1


def test_tilde_reduction_is_functional(rng):
    # f_c = a0 conj(X)^2 + a1 X conj(X) + a2 X^2 on F_{q^2} when k divides ell
    for pkl in [(3, 1, 1), (3, 1, 2), (5, 1, 2)]:
        t = tower(*pkl)
        xs = np.arange(t.q2)
        for _ in range(10):
            c = random_c(t, rng)
            a0, a1, a2 = tilde_reduce(c)
            xb = t.v_conj(xs)
            want = t.v_add(t.v_add(
                t.v_mul(np.full_like(xs, a0.v), t.v_mul(xb, xb)),
                t.v_mul(np.full_like(xs, a1.v), t.v_mul(xs, xb))),
                t.v_mul(np.full_like(xs, a2.v), t.v_mul(xs, xs)))
            assert np.array_equal(f_values(c), want)


def test_tilde_examples():
    t = tower(3, 1, 1)
    a = tilde_reduce(C(t, 0, 0, 0, 1))
    assert a == (t.zero, t.one, t.zero)
    assert tilde_verdict(C(t, 0, 0, 0, 1)).planar is False
    with pytest.raises(KDoesNotDivideL):
        tilde_reduce(C(tower(3, 2, 1), 0, 0, 0, 1))


def test_class_rules_table():
    t = tower(3, 3, 1)
    assert verdict_for_class("P0", None, t)[0] is False
    assert verdict_for_class("F0", None, t)[0] is False
    assert verdict_for_class("F1", None, t)[0] is True
    assert verdict_for_class("P2", t(2), t)[0] is True
    assert verdict_for_class("P2", t.one, t)[0] is False


def test_p2_flag_when_square_class_is_not_invariant(rng):
    t = tower(3, 2, 1)
    c = compose_linear(canonical_coeffs(t, "P2", t.prim_q), random_linear(t, rng), random_linear(t, rng))
    v = planar_verdict(c)
    assert v.cls == "P2" and "epsilon_class_flag" in v.extra and not v.planar


def test_verdict_json(f9):
    v = planar_verdict(C(f9, 0, 0, 0, 1))
    js = v.to_json()
    assert js["class"] == "F0" and js["planar"] is False
    assert "tilde_delta" in js
