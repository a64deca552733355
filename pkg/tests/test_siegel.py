"""siegel-series: degrees, forced rule, validators, character-sum oracle, provider chain."""

import json
from fractions import Fraction

import numpy as np
import pytest

from hermcong.arith import PolyX
from hermcong.lattice import PD, HermitianMatrix, det_scaled, is_psd
from hermcong.quadfield import KElt, QuadField, QuadInt
from hermcong.siegel import (
    F3_FIXTURES,
    FpProvider,
    MissingLocalDatum,
    SiegelError,
    b_histogram,
    fe_validate,
    fixture_polys,
    fp_degree,
    fp_forced,
    fp_lookup,
    fp_oracle,
    integrality_validate,
    load_supplemental,
)

D = 3
H = HermitianMatrix
I3 = H.identity(3, D)


def test_fp_degree_examples():
    assert fp_degree(I3, 3) == 1
    assert fp_degree(H.diag((1, 1, 1, 3), D), 3) == 3
    assert fp_degree(H.diag((1, 2), D), 5) == 0


def test_forced_examples():
    assert fp_forced(I3, 3).poly == PolyX.of(1, 27)
    assert fp_forced(H.diag((1, 2), D), 5).poly == PolyX.of(1)
    assert fp_forced(H.diag((1, 1, 2), D), 2).poly == PolyX.of(1, 8)
    assert fp_forced(H.diag((1, 4), D), 2) is None


def test_oracle_examples():
    assert fp_oracle(H.diag((2,), D), 2).poly == PolyX.of(1, 2)
    assert fp_oracle(H.diag((2,), D), 2).poly == fp_forced(H.diag((2,), D), 2).poly


def test_oracle_diag12_sign_is_the_local_character():
    """n even: the sign is eta_2(-det S) with eta_2 the local norm character at the inert 2.

    eta_2(-2) = (-1)^{v_2(-2)} = -1, whereas the global Kronecker value chi_{-3}(-2) is +1;
    the character sum and the forced rule agree on the local value.
    """
    S = H.diag((1, 2), D)
    assert fp_oracle(S, 2).poly == fp_forced(S, 2).poly == PolyX.of(1, -4)


def test_oracle_stabilizes_in_J():
    for S, p in [(H.diag((1, 2), D), 2), (H.diag((1, 3), D), 3), (H.diag((1, 4), D), 2), (H.diag((3,), D), 3)]:
        assert fp_oracle(S, p, J=2).poly == fp_oracle(S, p, J=3).poly


def _rank2_lattices(max_diag=4):
    """Positive definite 2 x 2 matrices [[a, x/sqrt(-3)], [., c]] with a, c <= max_diag."""
    sq = KElt(Fraction(0), Fraction(1), D)
    out = []
    for a in range(1, max_diag + 1):
        for c in range(a, max_diag + 1):
            for xa in range(-3, 4):
                for xb in range(-3, 4):
                    x = QuadInt(xa, xb, D)
                    if 3 * a * c - x.norm() <= 0:
                        continue
                    b = x.to_kelt() / sq
                    out.append(H(D, ((a, b), (b.conj(), c))))
    return out


@pytest.mark.parametrize("p", [2, 3, 5])
def test_oracle_matches_forced_rank_le_2(p):
    seen = 0
    mats = [H.diag((a,), D) for a in range(1, 11)] + _rank2_lattices()
    for S in mats:
        assert is_psd(S) == PD
        if fp_degree(S, p) > 1:
            continue
        assert fp_oracle(S, p).poly == fp_forced(S, p).poly, S
        seen += 1
    assert seen >= 10


# ------------------------------------------------------------- validators


def test_fe_validate_examples():
    assert fe_validate(PolyX.of(1, -54, 729), 3, 3, 2)
    assert fe_validate(PolyX.of(1, 0, 81), 3, 2, 2)
    assert not fe_validate(PolyX.of(1, 5), 3, 2, 1)


def test_integrality_examples():
    assert integrality_validate(PolyX.of(1, 2 * 3**5, 3**8), 3, 4)
    assert integrality_validate(PolyX.of(1, 2**3), 2, 3)
    assert not integrality_validate(PolyX.of(1, 1), 2, 1)


def test_fixture_table_verbatim_and_valid():
    assert [(name, diag, coeffs) for name, diag, coeffs in F3_FIXTURES] == [
        ("I_3", (1, 1, 1), (1, 27)),
        ("I_4", (1, 1, 1, 1), (1, 486, 6561)),
        ("diag(1,3)", (1, 3), (1, 0, 81)),
        ("diag(1,1,3)", (1, 1, 3), (1, -54, 729)),
        ("diag(1,1,1,3)", (1, 1, 1, 3), (1, 243, 19683, 531441)),
    ]
    for name, S, sp in fixture_polys(D):
        assert fe_validate(sp) and integrality_validate(sp), name
        assert sp.poly.degree == fp_degree(S, 3)


def test_forced_reproduces_I3_fixture():
    fixture = dict((name, sp) for name, _, sp in fixture_polys(D))["I_3"]
    assert fp_forced(I3, 3).poly == fixture.poly


# ---------------------------------------------------------------- lookup


def test_fp_lookup_examples():
    prov = FpProvider(D)
    assert fp_lookup(prov, I3, 3, 8) == 244
    assert fp_lookup(prov, H.diag((1, 2), D), 5, 8) == 1


def test_missing_datum_is_an_error():
    prov = FpProvider(D, use_oracle=False)
    with pytest.raises(MissingLocalDatum) as err:
        fp_lookup(prov, H.diag((1, 1, 1, 8), D), 2, 12)
    assert err.value.keys[0].d == 3 and err.value.keys[0].n == 4


def test_served_polynomials_are_valid():
    prov = FpProvider(D)
    for S, p in [(I3, 3), (H.diag((1, 4), D), 2), (H.diag((1, 3), D), 3), (H(D, ((2, 1), (1, 2))), 3)]:
        sp = prov.get(S, p)
        assert fe_validate(sp) and integrality_validate(sp)


def test_supplemental_loader_rejects_invalid(tmp_path):
    bad = [{"p": 2, "splitting": "inert", "n": 4, "d": 2, "det_class": 1, "coeffs": ["1", "5", "3"]}]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    with pytest.raises(SiegelError):
        load_supplemental(path)


def test_supplemental_is_served(tmp_path):
    S = H.diag((1, 1, 1, 8), D)
    from hermcong.siegel import local_key

    k = local_key(S, 2)
    # any polynomial passing both validators is accepted as user data
    coeffs = ["1", "0", "0", str(-(2 ** (4 * 3)))] if k.det_class == -1 else ["1", "0", "0", str(2 ** (4 * 3))]
    entry = [{"p": 2, "splitting": "inert", "n": 4, "d": 3, "det_class": k.det_class, "coeffs": coeffs, "source": "test"}]
    path = tmp_path / "supp.json"
    path.write_text(json.dumps(entry))
    supp = load_supplemental(path)
    prov = FpProvider(D, supplemental=supp, use_oracle=False)
    sp = prov.get(S, 2)
    assert sp.provenance == "supplemental"


def test_oracle_independent_of_partitioning():
    S = H(D, ((2, 1, 0), (1, 2, 0), (0, 0, 2)))
    a = b_histogram(S, 2, 1, chunks=1, workers=1)
    b = b_histogram(S, 2, 1, chunks=4, workers=1)
    c = b_histogram(S, 2, 1, chunks=4, workers=2)
    assert np.array_equal(a, b) and np.array_equal(a, c)


def test_oracle_rejects_indefinite_and_degenerate():
    with pytest.raises(SiegelError):
        fp_oracle(H.diag((1, 0), D), 2)
