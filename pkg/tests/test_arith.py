"""arith-core: valuations, q-binomials, Pochhammer symbols, PolyX, CoeffVec, rational reconstruction."""

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermcong.arith import (
    INF,
    BigFloat,
    CoeffVec,
    InsufficientPrecision,
    PolyX,
    ScaledRat,
    pochhammer,
    qbinom,
    rational_reconstruct,
    valuation_rat,
    valuation_vec,
)

C48 = Fraction(-(2**24) * 41, 3**15 * 5 * 19)

rats = st.fractions(max_denominator=10**6).filter(lambda x: x != 0)
primes = st.sampled_from([2, 3, 5, 7, 11, 41])


# ------------------------------------------------------------ valuation_rat


def test_valuation_of_C48_at_3():
    assert valuation_rat(C48, 3) == -15


def test_valuation_of_zero_is_infinite():
    assert valuation_rat(0, 5) == INF


def test_valuation_of_C48_at_41():
    assert valuation_rat(C48, 41) == 1


@given(rats, rats, primes)
def test_valuation_additive_on_products(a, b, p):
    assert valuation_rat(a * b, p) == valuation_rat(a, p) + valuation_rat(b, p)


@given(rats, rats, primes)
def test_valuation_ultrametric(a, b, p):
    assert valuation_rat(a + b, p) >= min(valuation_rat(a, p), valuation_rat(b, p))


# ------------------------------------------------------------ valuation_vec


def _vec(c1, c2):
    return CoeffVec((1,), (), 2, {(1, 0): Fraction(c1), (0, 1): Fraction(c2)})


def test_valuation_vec_minimum():
    assert valuation_vec(_vec(7, 41), 41) == 0


@given(st.integers(1, 10**6), st.integers(1, 10**6), rats, primes)
def test_valuation_vec_homogeneous(a, b, c, p):
    v = _vec(a, b)
    assert valuation_vec(v.scale(c), p) == valuation_vec(v, p) + valuation_rat(c, p)


def test_valuation_vec_rejects_irrational():
    from hermcong.quadfield import KElt

    v = CoeffVec((1,), (), 1, {(1,): KElt(Fraction(0), Fraction(1), 3)})
    with pytest.raises(ValueError):
        valuation_vec(v, 3)


# ------------------------------------------------------------------ qbinom


def test_qbinom_2_1_is_q_plus_1():
    for q in (2, 3, 7, Fraction(1, 2)):
        assert qbinom(2, 1, q) == q + 1


def test_qbinom_4_2_at_2():
    # (2^4-1)(2^3-1)/((2-1)(2^2-1)) = 15*7/3
    assert qbinom(4, 2, 2) == 35


def test_qbinom_t0():
    assert qbinom(5, 0, 3) == 1


def test_qbinom_domain():
    with pytest.raises(ValueError):
        qbinom(2, 3, 2)
    with pytest.raises(ValueError):
        qbinom(2, -1, 2)


@given(st.integers(1, 8), st.data(), st.sampled_from([2, 3, 4, 9, 25]))
def test_qbinom_pascal_and_integrality(s, data, q):
    t = data.draw(st.integers(1, s))
    v = qbinom(s, t, q)
    assert v.denominator == 1 and v > 0
    assert v == qbinom(s, s - t, q)
    prev_t = qbinom(s - 1, t, q) if t <= s - 1 else 0
    assert v == Fraction(q) ** t * prev_t + qbinom(s - 1, t - 1, q)


# -------------------------------------------------------------- pochhammer


def test_pochhammer_examples():
    assert pochhammer(11, 1, "desc") == 11
    assert pochhammer(Fraction(3, 7), 0, "desc") == 1
    assert pochhammer(5, 3, "asc") == 210


@given(st.fractions(max_denominator=50), st.integers(0, 6))
def test_pochhammer_asc_desc_relation(x, r):
    # (x)^(r) = (x+r-1)_(r)
    assert pochhammer(x, r, "asc") == pochhammer(x + r - 1, r, "desc")


# ------------------------------------------------------- rational_reconstruct


def test_reconstruct_one_third():
    with mpmath.workdps(50):
        x = BigFloat(mpmath.mpf(1) / 3, mpmath.mpf(10) ** -40)
        assert rational_reconstruct(x, 10**6) == Fraction(1, 3)


def test_reconstruct_C48_from_50_digits():
    with mpmath.workdps(60):
        v = mpmath.mpf(C48.numerator) / C48.denominator
        x = BigFloat(v, abs(v) * mpmath.mpf(10) ** -50)
        assert rational_reconstruct(x, 10**20) == C48


def test_reconstruct_insufficient_precision():
    x = BigFloat(mpmath.mpf("0.333"), mpmath.mpf("0.001"))
    with pytest.raises(InsufficientPrecision):
        rational_reconstruct(x, 10**6)


@settings(max_examples=200)
@given(st.integers(-(10**9), 10**9), st.integers(1, 10**6))
def test_reconstruct_roundtrip(num, den):
    x = Fraction(num, den)
    with mpmath.workdps(60):
        bf = BigFloat(mpmath.mpf(num) / den, mpmath.mpf(10) ** -45)
        assert rational_reconstruct(bf, 10**6) == x


# ------------------------------------------------------------------- PolyX


def test_polyx_trim_and_degree():
    assert PolyX.of(1, 2, 0, 0).degree == 1
    assert PolyX.of(0).degree == -INF


polys = st.lists(st.fractions(max_denominator=20), min_size=1, max_size=6).map(lambda cs: PolyX(tuple(cs)))


@given(polys, polys)
def test_polyx_exact_division_roundtrip(f, g):
    if g.degree == -INF:
        return
    assert (f * g).exact_div(g) == f


def test_polyx_exact_division_refuses_remainder():
    with pytest.raises(ArithmeticError):
        PolyX.of(1, 0, 1).exact_div(PolyX.of(1, 1))


# --------------------------------------------------------------- ScaledRat


def test_scaledrat_exponents_add_and_cancel():
    a = ScaledRat(Fraction(3), 2, 1, 3)
    b = ScaledRat(Fraction(1, 2), -2, 1, 3)
    assert (a * b).to_rat() == Fraction(9, 2)  # sqrt(3)^2 = 3
    with pytest.raises(ValueError):
        a.to_rat()
