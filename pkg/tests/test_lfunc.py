"""lfunc-numeric: L-values, Petersson norms, exact reconstruction of LL and C."""

from fractions import Fraction

import mpmath
import pytest

from hermcong.arith import valuation_rat
from hermcong.lfunc import LDatum, LFunctionError, bbL_exact, completed_L, fe_residual, lvalue, petersson_norm
from hermcong.modform import QExpansion, eigenform, twist
from hermcong.quadfield import Character, LF_product, QuadField

K3 = QuadField(3)

# (Delta, Delta) for Delta of weight 12, a widely tabulated constant
PETERSSON_DELTA = "1.035362056804320922347e-6"


def test_functional_equation_residual_at_edge():
    L = LDatum.from_form(eigenform(12, 400), 50)
    with mpmath.workdps(75):
        lam = completed_L(L, mpmath.mpf(7))
        lam_dual = completed_L(L, mpmath.mpf(12 - 7))
        assert abs(lam.value - L.root_number * lam_dual.value) < mpmath.mpf(10) ** -45
    assert fe_residual(L, 7) < mpmath.mpf(10) ** -45


def test_L14_delta22_positive():
    v = lvalue(LDatum.from_form(eigenform(22, 400), 50), 14)
    assert v.value > 0 and v.err < mpmath.mpf(10) ** -40


def test_truncation_levels_agree():
    a = lvalue(LDatum.from_form(eigenform(22, 300), 50), 13)
    b = lvalue(LDatum.from_form(eigenform(22, 600), 50), 13)
    assert abs(a.value - b.value) < mpmath.mpf(10) ** -48


def test_insufficient_truncation_is_an_error():
    with pytest.raises(LFunctionError):
        lvalue(LDatum.from_form(eigenform(22, 10), 50), 13)


def test_L_value_matches_direct_dirichlet_series():
    """Far right of the critical line the Dirichlet series converges fast: independent oracle."""
    f = eigenform(22, 3000)
    v = lvalue(LDatum.from_form(f, 40), 20)
    with mpmath.workdps(40):
        direct = sum(mpmath.mpf(int(f.a(n))) / mpmath.mpf(n) ** 20 for n in range(1, 3001))
        assert abs(v.value - direct) < mpmath.mpf(10) ** -20


def test_twisted_L_functional_equation():
    g = twist(eigenform(22, 600), Character(3))
    v = lvalue(LDatum.from_form(g, 40), 14)  # raises if the root number were wrong
    assert v.err < mpmath.mpf(10) ** -30


def test_petersson_methods_agree():
    r = petersson_norm(eigenform(12, 400), 50)
    assert r.agree_digits >= 30
    assert r.value.value > 0
    with mpmath.workdps(60):
        assert abs(r.value.value - mpmath.mpf(PETERSSON_DELTA)) < mpmath.mpf(10) ** -25


def test_petersson_bilinear():
    f = eigenform(12, 400)
    a = petersson_norm(f, 40).value.value
    b = petersson_norm(f.scale(3), 40).value.value
    with mpmath.workdps(60):
        assert abs(b - 9 * a) < abs(a) * mpmath.mpf(10) ** -30


def test_LL_example1():
    pkg = bbL_exact(22, Fraction(7, 2), 8, K3, (7,), (7,), digits=50, n_for_C=4)
    assert pkg.LL_value == Fraction(2**25 * 7 * 41, 3**12 * 5 * 19)
    assert pkg.C_value == Fraction(-(2**24) * 41, 3**15 * 5 * 19)
    assert pkg.C_value == LF_product(4, 8, K3) / LF_product(2, 8, K3) * pkg.LL_value
    assert valuation_rat(pkg.C_value, 41) == 1
    assert pkg.provenance["petersson_agreement_digits"] >= 30


def test_C6_12_properties():
    """Identity C = (LL_F ratio) LL and v_809(C) = 1; the published value itself is an acceptance criterion."""
    pkg = bbL_exact(12, Fraction(11, 2), 12, K3, (0,), (0,), digits=50, n_for_C=6)
    assert pkg.C_value == LF_product(6, 12, K3) / LF_product(2, 12, K3) * pkg.LL_value
    assert valuation_rat(pkg.C_value, 809) == 1
