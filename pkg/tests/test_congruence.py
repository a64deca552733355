"""congruence-kit: constants, M_r, config handling, report assembly."""

import json
from fractions import Fraction

import pytest

from hermcong.arith import CoeffVec, ScaledRat, primes_upto, valuation_rat
from hermcong.congruence import (
    EXTERNAL,
    FAILED,
    VERIFIED,
    CongruenceConfig,
    CongruenceError,
    example_config,
    outer_valuation,
    theorem_report,
)
from hermcong.constants import ConstantError, M_r, c_r, c_r_scaled, c_small

W70 = ((7, 0), (7, 0))


def test_c_small_examples():
    assert c_small(12, 1) == ScaledRat(Fraction(2**10, 11), 1, 0)
    assert c_small(8, 1, *W70) == ScaledRat(Fraction(2**20 * 5040**2, 21), 1, 0)
    for mu in (8, 10, 14):
        # empty weights: the Pochhammer denominator is (mu - 1)_(1) = mu - 1
        assert c_small(mu, 1).r == Fraction(2 ** (-2 + mu), mu - 1)
    with pytest.raises(ConstantError):
        c_small(7, 1)


def test_M_r_examples():
    assert M_r(8, 1, *W70, D=3) == 21
    assert M_r(12, 1, D=3) == 12
    for mu in range(4, 31, 2):
        for r in (1, 2):
            assert M_r(mu, r, D=3) >= mu


def test_c_r_ledger_cancels_for_r1():
    for mu, w in [(8, W70), (12, ((), ())), (20, ((), ())), (10, ((2, 0), (2, 0)))]:
        ledger = {}
        c = c_r(mu, 1, *w, D=3, ledger=ledger)
        assert ledger["pi_pow"] == 0 and ledger["sqrtD_pow"] == 0
        assert isinstance(c, Fraction)


def test_c_r_example_p_units():
    assert valuation_rat(c_r(8, 1, *W70, D=3), 41) == 0
    assert valuation_rat(c_r(12, 1, D=3), 809) == 0


def test_c_r_pi_exponent_r_squared_minus_r():
    for mu in (12, 16, 20):
        for r in (1, 2, 3):
            assert c_r_scaled(mu, r).pi_pow == r * r - r
    with pytest.raises(ConstantError):
        c_r(12, 2)


@pytest.mark.parametrize("w", [((), ()), ((2, 0), (2, 0)), W70, ((4, 2), (4, 2))])
def test_c_r_p_unit_above_M_r(w):
    """v_p(c_r) = 0 for every prime M_r < p <= 200 (rational coefficient for r >= 2)."""
    checked = 0
    for mu in range(4, 41, 2):
        for r in (1, 2, 3):
            try:
                c = c_r_scaled(mu, r, *w)
            except (ConstantError, ValueError, ZeroDivisionError):
                continue
            Mr = M_r(mu, r, *w)
            for p in primes_upto(200):
                if p > Mr:
                    assert valuation_rat(c.r, p) == 0, (mu, r, w, p)
                    checked += 1
    assert checked > 100


def test_outer_valuation():
    A = CoeffVec((1,), (1,), 2, {(1, 0, 1): Fraction(1, 41), (0, 1, 1): Fraction(2)})
    assert outer_valuation(Fraction(41), A, 41) == -1
    assert outer_valuation(Fraction(41**2), A, 41) == 0


# ------------------------------------------------------------ configuration


def test_config_json_roundtrip():
    for which in (1, 2):
        cfg = example_config(which)
        back = CongruenceConfig.from_json(json.loads(json.dumps(cfg.to_json())))
        assert back.to_json() == cfg.to_json()
        assert back.weight_f == cfg.weight_f and back.matrices() == cfg.matrices()


def test_config_rejects_unknown_keys():
    raw = example_config(1).to_json()
    raw["extra"] = 1
    with pytest.raises(CongruenceError):
        CongruenceConfig.from_json(raw)


def test_unknown_example():
    with pytest.raises(CongruenceError):
        example_config(3)


def test_non_collapsing_r_sum_is_an_error():
    raw = example_config(1).to_json()
    raw["f_weight"] = 24
    with pytest.raises(CongruenceError):
        theorem_report(CongruenceConfig.from_json(raw))


@pytest.mark.slow
def test_p3_report_not_applicable():
    raw = example_config(1).to_json()
    raw["prime"] = 3
    rep = theorem_report(CongruenceConfig.from_json(raw)).to_json()
    assert rep["conditions"]["4b"]["status"] == FAILED
    assert rep["conditions"]["4a"]["status"] == FAILED
    assert rep["applicability"]["corollary"] == "not-applicable"
    assert "4b" in rep["applicability"]["failed"]
    for c in ("2", "3", "4c"):
        assert rep["conditions"][c]["status"] == EXTERNAL


@pytest.mark.slow
def test_example1_report_structure():
    rep = theorem_report(example_config(1)).to_json()
    conds = rep["conditions"]
    assert set(conds) == {"1", "2", "3", "4a", "4b", "4c", "4d", "4e", "4f"}
    assert conds["1"]["value"] == -1 and rep["alpha"] == 1
    for c in ("1", "4a", "4b", "4d", "4e", "4f"):
        assert conds[c]["status"] == VERIFIED, c
    assert rep["applicability"]["corollary"] == "applicable"
    C = Fraction(rep["constants"]["C"])
    assert C == Fraction(-(2**24) * 41, 3**15 * 5 * 19)
    assert valuation_rat(C, 41) == 1
