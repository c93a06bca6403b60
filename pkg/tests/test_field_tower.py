import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import ZZ
from sympy.polys.galoistools import gf_add, gf_mul, gf_rem, gf_sub

from pfq.errors import (EvenCharacteristicError, NonPrimeError,
                        NotInBaseFieldError, ParseError, ZeroInputError)
from pfq.field_tower import (FieldTower, frobenius, gcd_power_forms,
                             in_mu, inv_frobenius_power, is_square_in_fq,
                             make_tower)

from conftest import tower


# independent reference arithmetic: F_q as F_p[x]/(m) via sympy's galoistools,
# F_{q^2} as pairs (a0, a1) meaning a0 + a1 u with u^2 = -m1 u - m0


def _fq_poly(t, n):
    ds = []
    for _ in range(t.k):
        ds.append(n % t.p)
        n //= t.p
    return [ZZ(d) for d in reversed(ds)]  # high to low for galoistools


def _fq_int(t, poly):
    poly = list(reversed(poly))
    return sum(int(d) * t.p ** i for i, d in enumerate(poly))


def _ref_mul(t, a, b):
    p = t.p
    mod = [ZZ(d) for d in reversed(t.modulus_q)]

    def fm(x, y):
        return gf_rem(gf_mul(x, y, p, ZZ), mod, p, ZZ)

    a0, a1 = _fq_poly(t, a % t.q), _fq_poly(t, a // t.q)
    b0, b1 = _fq_poly(t, b % t.q), _fq_poly(t, b // t.q)
    m0, m1 = _fq_poly(t, t.m0), _fq_poly(t, t.m1)
    # (a0 + a1 u)(b0 + b1 u) = a0 b0 + (a0 b1 + a1 b0) u + a1 b1 u^2
    hh = fm(a1, b1)
    lo = gf_sub(fm(a0, b0), fm(hh, m0), p, ZZ)
    hi = gf_sub(gf_add(fm(a0, b1), fm(a1, b0), p, ZZ), fm(hh, m1), p, ZZ)
    return _fq_int(t, lo) + t.q * _fq_int(t, hi)


def test_default_f9_modulus():
    t = make_tower(3, 1, 1)
    # X^2 + 1 has no root mod 3
    assert t.modulus_q2 == (1, 0, 1)
    assert all((x * x + 1) % 3 for x in range(3))
    assert (t.q, t.Q, t.q2, t.delta) == (3, 3, 9, 1)


def test_parameters_331():
    t = tower(3, 3, 1)
    assert (t.q, t.Q, t.delta) == (27, 3, 1)
    assert len(t.modulus_q) == 4 and t.modulus_q[-1] == 1


@pytest.mark.parametrize("p, exc", [(2, EvenCharacteristicError), (4, NonPrimeError),
                                    (9, NonPrimeError), (1, NonPrimeError)])
def test_bad_characteristic(p, exc):
    with pytest.raises(exc):
        FieldTower(p, 1, 1)


@pytest.mark.parametrize("pkl", [(3, 1, 1), (5, 1, 1), (3, 2, 1), (3, 3, 1), (7, 1, 2)])
def test_multiplication_matches_reference(pkl, rng):
    t = tower(*pkl)
    for _ in range(300):
        a, b = rng.randrange(t.q2), rng.randrange(t.q2)
        assert t.mul_i(a, b) == _ref_mul(t, a, b)


def test_multiplication_f9_exhaustive():
    t = tower(3, 1, 1)
    for a, b in itertools.product(range(9), repeat=2):
        # u^2 = -1: Gaussian integers mod 3
        a0, a1, b0, b1 = a % 3, a // 3, b % 3, b // 3
        want = (a0 * b0 - a1 * b1) % 3 + 3 * ((a0 * b1 + a1 * b0) % 3)
        assert t.mul_i(a, b) == want


@pytest.mark.parametrize("pkl", [(3, 1, 1), (3, 3, 1), (5, 2, 1)])
def test_field_axioms(pkl, rng):
    t = tower(*pkl)
    for _ in range(200):
        x, y = t.elt(rng.randrange(t.q2)), t.elt(rng.randrange(t.q2))
        assert x + y - y == x
        assert x * (y + 1) == x * y + x
        if y.v:
            assert x / y * y == x
            assert y * y.inv() == t.one
        assert x ** t.q2 == x


def test_primitive_elements():
    t = tower(3, 2, 1)
    g = t.elt(t.prim_q2)
    seen = {(g ** i).v for i in range(t.q2 - 1)}
    assert len(seen) == t.q2 - 1
    h = t.elt(t.prim_q)
    assert h.is_base()
    assert len({(h ** i).v for i in range(t.q - 1)}) == t.q - 1


@pytest.mark.parametrize("pkl", [(3, 1, 1), (3, 3, 1), (5, 1, 1)])
def test_frobenius_is_an_involution(pkl):
    t = tower(*pkl)
    for x in t.elements():
        assert frobenius(frobenius(x)) == x
        assert x.conj() == x ** t.q
        assert x.is_base() == (x.conj() == x)


@pytest.mark.parametrize("pkl", [(3, 1, 1), (3, 3, 1), (7, 1, 1)])
def test_mu_is_the_unit_circle(pkl):
    t = tower(*pkl)
    mu = t.mu()
    assert len(mu) == t.q + 1
    for x in t.elements():
        if x.v:
            assert in_mu(x) == ((x ** (t.q + 1)) == t.one) == (x.conj() * x == t.one)
    assert set(x.v for x in mu) == {x.v for x in t.elements() if x.v and in_mu(x)}


def test_mu_f9():
    t = tower(3, 1, 1)
    assert [str(x) for x in t.mu()] == ["1", "2", "0+u*1", "0+u*2"]


@pytest.mark.parametrize("pkl", [(3, 1, 1), (5, 1, 1), (3, 3, 1)])
def test_square_class_is_multiplicative(pkl):
    t = tower(*pkl)
    base = [x for x in t.base_elements() if x.v]
    squares = {(x * x).v for x in base}
    for x in base:
        assert is_square_in_fq(x) == (x.v in squares)
    for x, y in itertools.product(base[:10], base[:10]):
        assert is_square_in_fq(x * y) == (is_square_in_fq(x) == is_square_in_fq(y))


def test_square_class_errors():
    t = tower(3, 1, 1)
    with pytest.raises(NotInBaseFieldError):
        is_square_in_fq(t.gen())
    with pytest.raises(ZeroInputError):
        is_square_in_fq(t.zero)


def test_sqrt():
    t = tower(5, 1, 1)
    for x in t.elements():
        r = x.sqrt()
        if r is not None:
            assert r * r == x
    # every element of F_q is a square in F_{q^2}
    assert all(x.sqrt() is not None for x in t.base_elements())


@pytest.mark.parametrize("p", [3, 5, 7])
def test_gcd_power_forms_exhaustive(p):
    from math import gcd
    for k in range(1, 7):
        for ell in range(1, 7):
            minus, plus = gcd_power_forms(p, k, ell)
            assert minus == gcd(p ** k - 1, p ** ell - 1)
            assert plus == gcd(p ** k + 1, p ** ell - 1)


def test_gcd_power_forms_instances():
    assert gcd_power_forms(3, 2, 4)[0] == 8 == 3 ** 2 - 1
    assert gcd_power_forms(3, 1, 2)[1] == 4 == 3 + 1
    assert gcd_power_forms(3, 3, 1)[1] == 2


def test_inv_frobenius_power_fixed_points():
    t = tower(3, 1, 1)
    for m in range(5):
        assert inv_frobenius_power(t.zero, m) == t.zero
        assert inv_frobenius_power(t.one, m) == t.one
    x = t.parse("1+u*1")
    y = inv_frobenius_power(x, 1)
    assert y ** 3 == x


@given(st.integers(0, 728), st.integers(1, 12))
def test_inv_frobenius_power_roundtrip(v, m):
    t = tower(3, 3, 1)
    x = t.elt(v)
    assert inv_frobenius_power(x, m) ** (t.p ** m) == x


@given(st.integers(0, 728))
def test_parse_roundtrip(v):
    t = tower(3, 3, 1)
    x = t.elt(v)
    assert t.parse(str(x)) == x


def test_parse_forms():
    t = tower(3, 1, 1)
    assert t.parse("u*1") == t.gen()
    assert t.parse("2") == t(-1)
    assert t.parse("-1") == t(-1)
    assert t.parse("1+u*2") == 1 - t.gen()
    with pytest.raises(ParseError):
        t.parse("3")
    with pytest.raises(ParseError):
        t.parse("1+v*1")


def test_json_roundtrip():
    t = tower(3, 3, 2)
    t2 = FieldTower.from_json(t.dumps())
    assert t2.modulus_q == t.modulus_q and t2.modulus_q2 == t.modulus_q2
    assert (t2.k, t2.ell) == (t.k, t.ell)


def test_seeded_modulus_is_deterministic():
    a = make_tower(3, 3, 1, seed=7)
    b = make_tower(3, 3, 1, seed=7)
    assert a.modulus_q == b.modulus_q and a.modulus_q2 == b.modulus_q2


def test_slow_path_agrees_with_tables(rng):
    fast = tower(3, 2, 1)
    slow = FieldTower(3, 2, 1, modulus_q=fast.modulus_q,
                      modulus_q2=fast.modulus_q2[:2], use_tables=False)
    for _ in range(200):
        a, b = rng.randrange(fast.q2), rng.randrange(fast.q2)
        assert fast.mul_i(a, b) == slow.mul_i(a, b)
        assert fast.add_i(a, b) == slow.add_i(a, b)
        assert fast.conj_i(a) == slow.conj_i(a)
        e = rng.randrange(-5, 50)
        if a:
            assert fast.pow_i(a, e) == slow.pow_i(a, e)


def test_vector_ops_match_scalar(rng):
    t = tower(5, 2, 1)
    xs = np.array([rng.randrange(t.q2) for _ in range(100)])
    ys = np.array([rng.randrange(t.q2) for _ in range(100)])
    assert list(t.v_mul(xs, ys)) == [t.mul_i(int(a), int(b)) for a, b in zip(xs, ys)]
    assert list(t.v_add(xs, ys)) == [t.add_i(int(a), int(b)) for a, b in zip(xs, ys)]
    assert list(t.v_conj(xs)) == [t.conj_i(int(a)) for a in xs]
    assert list(t.v_pow(xs, 7)) == [t.pow_i(int(a), 7) for a in xs]
