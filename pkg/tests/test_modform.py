"""modform-q: Eisenstein series, eigenforms, twists, Hecke relations."""

from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hermcong.modform import (
    QExpansion,
    UnsupportedWeight,
    delta_eta_product,
    delta_qexp,
    eigenform,
    eisenstein_qexp,
    hecke_check,
    twist,
)
from hermcong.quadfield import Character

WEIGHTS = (12, 16, 18, 20, 22, 26)
N = 120


def test_eisenstein_coefficients():
    assert eisenstein_qexp(4, 5).a(1) == 240
    assert eisenstein_qexp(6, 5).a(1) == -504
    for k in (4, 6, 8, 10):
        assert eisenstein_qexp(k, 3).a(0) == 1


def test_eigenform_examples():
    assert eigenform(12, 10).a(2) == -24
    assert eigenform(22, 10).a(1) == 1
    assert eigenform(22, 10).a(2) == -288


def test_eigenform_unsupported_weight():
    with pytest.raises(UnsupportedWeight):
        eigenform(24, 10)


def test_twist_examples():
    chi = Character(3)
    g = twist(eigenform(22, 10), chi)
    assert g.a(3) == 0
    assert g.a(1) == 1
    assert g.a(2) == 288
    assert g.level == 9


def test_hecke_check_examples():
    d = eigenform(12, 20)
    assert d.a(4) == -1472
    assert hecke_check(d, 4)
    assert hecke_check(d, 1)
    bad = QExpansion(12, d.coeffs[:4] + (d.coeffs[4] + 1,) + d.coeffs[5:])
    assert not hecke_check(bad, 4)


def test_hecke_check_truncation_error():
    with pytest.raises(IndexError):
        hecke_check(eigenform(12, 10), 40)


@pytest.mark.parametrize("k", WEIGHTS)
def test_multiplicativity(k):
    f = eigenform(k, N)
    for m in range(1, N + 1):
        for n in range(1, N // m + 1):
            if gcd(m, n) == 1:
                assert f.a(m * n) == f.a(m) * f.a(n)


@pytest.mark.parametrize("k", WEIGHTS)
def test_hecke_relations(k):
    f = eigenform(k, N)
    assert all(hecke_check(f, n) for n in range(1, N // 2))


def test_delta_two_constructions_agree():
    assert [int(c) for c in delta_qexp(300).coeffs] == delta_eta_product(301)[:301]


@given(st.integers(1, N))
def test_twist_coefficients(n):
    chi = Character(3)
    f = eigenform(22, N)
    assert twist(f, chi).a(n) == chi(n) * f.a(n)


@pytest.mark.parametrize("k", WEIGHTS)
def test_deligne_bound(k):
    f = eigenform(k, N)
    for n in range(1, N + 1):
        d = sum(1 for j in range(1, n + 1) if n % j == 0)
        assert float(abs(f.a(n))) <= d * n ** ((k - 1) / 2) * (1 + 1e-12)
