"""The nine acceptance criteria, each at its stated tolerance and runtime bound.

Every test records one PASS/FAIL line (printed in the terminal summary) before
asserting, so a failing criterion still reports what was and was not matched.
"""

import time
from fractions import Fraction

import pytest

from hermcong.arith import factor_rat_str, valuation_rat
from hermcong.cli import default_eigen_matrices
from hermcong.congruence import VERIFIED, dumps, example_config, theorem_report
from hermcong.constants import c_r
from hermcong.eisenstein import WeightData, build_P, equivariance_check, pluriharmonic_check
from hermcong.hecke import (
    LocalRing,
    b_counts,
    b_set_count_enum,
    eigen_ratios,
    same_left_coset,
    tau_pattern_count,
    tau_reps,
    ttilde_expand,
)
from hermcong.lattice import HermitianMatrix
from hermcong.lfunc import bbL_exact
from hermcong.quadfield import Character, LF_product, QuadField, dirichlet_L_nonpos, gen_bernoulli
from hermcong.siegel import FpProvider, fe_validate, fixture_polys, fp_degree, fp_forced, fp_oracle, integrality_validate

from oracles import L_nonpos_mpmath, bernoulli_conductor_sum

D = 3
K3 = QuadField(D)
CHI = Character(D)
H = HermitianMatrix

# ----------------------------------------------------------- published data

C1_EX1 = Fraction(2**9 * 3**3, 11**2 * 13**2)
C1_EX2 = Fraction(2**7 * 3**11 * 5, 13)
C48 = Fraction(-(2**24) * 41, 3**15 * 5 * 19)
C612 = Fraction(2**19 * 7**2 * 13 * 809, 3**15 * 691)
EX2_SCALAR = Fraction(-(2**6) * 7**2 * 79 * 89 * 57202544699, 3**3)

N_EX1 = 2**9 * 3**7 * 5**3 * 7**3 * 11 * 13 * 52140059
_EX1_GROUPS = [
    (-3 * 107 * 7333 * 9623, ["u1^7*v1^7", "u2^7*v2^7"]),
    (2**3 * 3 * 5**4 * 7 * 11 * 17 * 22350173, ["u1^7*v1^4*v2^3", "u1^4*u2^3*v1^7", "u1^3*u2^4*v2^7", "u2^7*v1^3*v2^4"]),
    (-(2**3) * 7 * 17 * 6257 * 20696549, ["u1^7*v1*v2^6", "u1^6*u2*v2^7", "u1*u2^6*v1^7", "u2^7*v1^6*v2"]),
    (-(2**3) * 3 * 7**4 * 17 * 5647 * 24113, ["u1^6*u2*v1^6*v2", "u1*u2^6*v1*v2^6"]),
    (5**2 * 7**2 * 49277 * 22350173, ["u1^6*u2*v1^3*v2^4", "u1^4*u2^3*v1*v2^6", "u1^3*u2^4*v1^6*v2", "u1*u2^6*v1^4*v2^3"]),
    (-(2**2) * 3 * 7**2 * 324908052197, ["u1^5*u2^2*v1^5*v2^2", "u1^2*u2^5*v1^2*v2^5"]),
    (2 * 3**3 * 7 * 19 * 16603 * 22350173, ["u1^5*u2^2*v1^2*v2^5", "u1^2*u2^5*v1^5*v2^2"]),
    (-(2**4) * 5 * 7**2 * 131 * 709 * 15756253, ["u1^4*u2^3*v1^4*v2^3", "u1^3*u2^4*v1^3*v2^4"]),
]
EX1_VECTOR = {m: Fraction(c, N_EX1) for c, ms in _EX1_GROUPS for m in ms}


# ----------------------------------------------------------- shared reports


@pytest.fixture(scope="module")
def report1():
    t = time.perf_counter()
    rep = theorem_report(example_config(1))
    return rep, time.perf_counter() - t


@pytest.fixture(scope="module")
def report2():
    t = time.perf_counter()
    rep = theorem_report(example_config(2))
    return rep, time.perf_counter() - t


def _mpf_of(x: Fraction):
    import mpmath

    return mpmath.mpf(x.numerator) / x.denominator


# ----------------------------------------------------------- criteria


def test_criterion_1_bernoulli_foundation(acceptance):
    import mpmath

    t = time.perf_counter()
    checks = {
        "B_{5,chi_-3} = -10/3": gen_bernoulli(5, CHI) == Fraction(-10, 3) == bernoulli_conductor_sum(5, D),
        "zeta(-5) = -1/252": dirichlet_L_nonpos(6) == Fraction(-1, 252) == -bernoulli_conductor_sum(6, None) / 6,
        "L(-4,chi_-3) = 2/3": dirichlet_L_nonpos(5, CHI) == Fraction(2, 3) == -bernoulli_conductor_sum(5, D) / 5,
        "zeta(-7) = 1/240": dirichlet_L_nonpos(8) == Fraction(1, 240) == -bernoulli_conductor_sum(8, None) / 8,
        "LL_F(4,8)/LL_F(2,8) = -1/378": LF_product(4, 8, K3) / LF_product(2, 8, K3) == Fraction(-1, 378),
    }
    with mpmath.workdps(40):
        checks["Hurwitz cross-check"] = all(
            abs(_mpf_of(dirichlet_L_nonpos(m, Character(d))) - L_nonpos_mpmath(m, d)) < mpmath.mpf(10) ** -30
            for m, d in [(6, None), (5, 3), (8, None)]
        )
    dt = time.perf_counter() - t
    ok = all(checks.values()) and dt < 1.0
    bad = [k for k, v in checks.items() if not v]
    acceptance.record(1, ok, "Bernoulli/L foundation", "all exact values match" if not bad else f"mismatch: {bad}", dt)
    assert ok, bad


def test_criterion_2_constants(acceptance):
    t = time.perf_counter()
    l1, l2 = {}, {}
    c1 = c_r(8, 1, (7, 0), (7, 0), D, ledger=l1)
    c2 = c_r(12, 1, (), (), D, ledger=l2)
    dt = time.perf_counter() - t
    ledgers_ok = all(lg["pi_pow"] == 0 and lg["sqrtD_pow"] == 0 for lg in (l1, l2))
    ok1, ok2 = c1 == C1_EX1, c2 == C1_EX2
    ok = ok1 and ok2 and ledgers_ok and dt < 1.0
    detail = (
        f"ledgers cancel={ledgers_ok}; example 1 c_1={factor_rat_str(c1)} "
        f"({'match' if ok1 else 'published ' + factor_rat_str(C1_EX1)}, ratio {c1 / C1_EX1}); "
        f"example 2 c_1={factor_rat_str(c2)} ({'match' if ok2 else 'published ' + factor_rat_str(C1_EX2)}, ratio {c2 / C1_EX2})"
    )
    acceptance.record(2, ok, "constants c_1", detail, dt)
    assert ok, detail


def test_criterion_3_L_value_reconstruction(acceptance):
    t = time.perf_counter()
    p1 = bbL_exact(22, Fraction(7, 2), 8, K3, (7,), (7,), digits=50, n_for_C=4)
    p2 = bbL_exact(12, Fraction(11, 2), 12, K3, (0,), (0,), digits=50, n_for_C=6)
    dt = time.perf_counter() - t
    prov_ok = all(
        p.provenance["digits"] >= 50 and p.provenance["guard_digits"] >= 10 and p.provenance["petersson_agreement_digits"] >= 30
        for p in (p1, p2)
    )
    ok1, ok2 = p1.C_value == C48, p2.C_value == C612
    ok = ok1 and ok2 and prov_ok and dt <= 600
    detail = (
        f"C_(4,8)={'match' if ok1 else factor_rat_str(p1.C_value)}; "
        f"C_(6,12)={factor_rat_str(p2.C_value)} ({'match' if ok2 else 'published ' + factor_rat_str(C612) + f', ratio {C612 / p2.C_value}'}); "
        f"v_809(C_(6,12))={valuation_rat(p2.C_value, 809)}; Petersson agreement "
        f"{p1.provenance['petersson_agreement_digits']}/{p2.provenance['petersson_agreement_digits']} digits"
    )
    acceptance.record(3, ok, "L-value reconstruction", detail, dt)
    assert ok, detail


def _rank_le2_mats():
    from hermcong.quadfield import KElt, QuadInt

    sq = KElt(Fraction(0), Fraction(1), D)
    out = [H.diag((a,), D) for a in range(1, 11)]
    for a in range(1, 5):
        for c in range(a, 5):
            for xa in range(-3, 4):
                for xb in range(-3, 4):
                    x = QuadInt(xa, xb, D)
                    if 3 * a * c - x.norm() > 0:
                        b = x.to_kelt() / sq
                        out.append(H(D, ((a, b), (b.conj(), c))))
    return out


def test_criterion_4_siegel_validators(acceptance):
    t = time.perf_counter()
    fx = fixture_polys(D)
    fixtures_ok = len(fx) == 5 and all(fe_validate(sp) and integrality_validate(sp) for _, _, sp in fx)
    forced_ok = fp_forced(H.identity(3, D), 3).poly == dict((n, sp) for n, _, sp in fx)["I_3"].poly
    agree = compared = 0
    for p in (2, 3, 5):
        for S in _rank_le2_mats():
            if fp_degree(S, p) > 1:
                continue
            compared += 1
            agree += fp_oracle(S, p).poly == fp_forced(S, p).poly
    stab = all(
        fp_oracle(S, p, J=2).poly == fp_oracle(S, p, J=3).poly
        for S, p in [(H.diag((1, 2), D), 2), (H.diag((1, 3), D), 3), (H.diag((3,), D), 3)]
    )
    dt = time.perf_counter() - t
    ok = fixtures_ok and forced_ok and agree == compared and compared > 0 and stab and dt <= 300
    detail = f"fixtures valid={fixtures_ok}; forced I_3={forced_ok}; oracle=forced on {agree}/{compared}; J-stable={stab}"
    acceptance.record(4, ok, "Siegel-series validators", detail, dt)
    assert ok, detail


def test_criterion_5_example1_end_to_end(acceptance, report1):
    rep, dt = report1
    j = rep.to_json()
    ours = {m: Fraction(v) for m, v in j["klingen_product"].items()}
    group_ok = [all(ours.get(m) == Fraction(c, N_EX1) for m in ms) for c, ms in _EX1_GROUPS]
    support_ok = set(ours) == set(EX1_VECTOR)
    conds = j["conditions"]
    checkable = all(conds[c]["status"] == VERIFIED for c in ("1", "4a", "4b", "4d", "4e", "4f"))
    v41 = j["condition_1_valuation"]
    ok = all(group_ok) and support_ok and v41 == -1 and checkable and dt <= 1800
    ratio = ours.get("u1^7*v1^7", Fraction(0)) / EX1_VECTOR["u1^7*v1^7"]
    detail = (
        f"published coefficients matched {sum(group_ok)}/8; same monomial support={support_ok}; "
        f"u1^7v1^7 ratio ours/published={ratio}; v_41={v41}; checkable conditions pass={checkable}"
    )
    acceptance.record(5, ok, "example (1) end to end", detail, dt)
    assert ok, detail


def test_criterion_6_example2(acceptance, report2):
    rep, dt = report2
    j = rep.to_json()
    t = time.perf_counter()
    c1 = c_r(12, 1, (), (), D)
    C = Fraction(j["constants"]["C"])
    dt += time.perf_counter() - t
    uncond = {"c_1": c1 == C1_EX2, "C": C == C612, "v_809(C)=+1": valuation_rat(C, 809) == 1}
    supplied = j["inputs"]["supplemental_table"] is not None
    scalar = Fraction(j["klingen_product"].get("1", "0"))
    cond = {"scalar": scalar == EX2_SCALAR, "v_809(CAA)=-1": j["condition_1_valuation"] == -1}
    ok = all(uncond.values()) and supplied and all(cond.values())
    detail = (
        f"unconditional {[k for k, v in uncond.items() if v]} hold, {[k for k, v in uncond.items() if not v]} do not; "
        f"with the shipped oracle-generated F_2 table: {[k for k, v in cond.items() if v]} hold, "
        f"{[k for k, v in cond.items() if not v]} do not (scalar ours={factor_rat_str(scalar)}, "
        f"published={factor_rat_str(EX2_SCALAR)})"
    )
    acceptance.record(6, ok, "example (2)", detail, dt)
    assert ok, detail


def test_criterion_7_operator_properties(acceptance):
    t = time.perf_counter()
    P = build_P(WeightData(8, (7, 0), (7, 0)), 2, 1)
    ph = pluriharmonic_check(P, 8, trials=20)
    eq = equivariance_check(P, trials=10)
    bad = P.perturbed()
    ph_bad = pluriharmonic_check(bad, 8, trials=20)
    eq_bad = equivariance_check(bad, trials=10)
    dt = time.perf_counter() - t
    ok = ph and eq and not ph_bad and not eq_bad and dt <= 120
    detail = f"pluriharmonic={ph}, equivariant={eq}; perturbed: pluriharmonic={ph_bad}, equivariant={eq_bad}"
    acceptance.record(7, ok, "differential-operator properties", detail, dt)
    assert ok, detail


def test_criterion_8_hecke_cosets(acceptance):
    import itertools

    t = time.perf_counter()
    disjoint = True
    counts_ok = True
    for n in (1, 2):
        for p in (2, 3):
            R = LocalRing(D, p)
            for s in range(n + 1):
                reps = tau_reps(n, s, p)
                disjoint &= not any(same_left_coset(a.matrix, b.matrix, R) for a, b in itertools.combinations(reps, 2))
                if R.typ == "inert":
                    for pat in itertools.product((0, 1), repeat=n):
                        if sum(pat) == s:
                            counts_ok &= sum(1 for r in reps if r.pattern == pat) == tau_pattern_count(n, s, p, pat)
    bcounts = all(
        b_set_count_enum(n, s, u, p) == b_counts(n, s, u, p, "Ttilde")
        for n in (1, 2)
        for s in range(n + 1)
        for u in range(n + 1 - s)
        for p in (2, 5)
    )
    from hermcong.arith import qbinom

    ttilde = all(
        ttilde_expand(i, n, q).as_dict() == {f"T_{j}(p^2)": int(qbinom(n - j, i - j, q * q)) for j in range(1, i + 1)}
        for n in (1, 2, 3)
        for i in range(1, n + 1)
        for q in (2, 3)
    )
    mats = default_eigen_matrices(D)[:3]
    ratios = eigen_ratios(2, 2, 12, mats, FpProvider(D, use_fixtures=False))
    constant = len(set(ratios)) == 1
    with_fixtures = eigen_ratios(2, 2, 12, mats, FpProvider(D))
    dt = time.perf_counter() - t
    ok = disjoint and counts_ok and bcounts and ttilde and constant and dt <= 300
    detail = (
        f"disjoint={disjoint}, Remark counts={counts_ok}, b-counts={bcounts}, T~ assembly={ttilde}; "
        f"eigen-ratio (computed local data) {'constant ' + str(ratios[0]) if constant else ratios}; "
        f"with the diag(1,3) fixture served: constant={len(set(with_fixtures)) == 1}"
    )
    acceptance.record(8, ok, "Hecke-coset properties", detail, dt)
    assert ok, detail


def test_criterion_9_determinism(acceptance, report1):
    from hermcong.congruence import CongruenceConfig

    t = time.perf_counter()
    first = report1[0].dumps()
    again = theorem_report(example_config(1)).dumps()
    raw = example_config(1).to_json()
    raw["workers"] = 2
    two = theorem_report(CongruenceConfig.from_json(raw)).dumps()
    e1 = dumps(sorted(str(r) for r in eigen_ratios(2, 2, 12, default_eigen_matrices(D)[:3], FpProvider(D, use_fixtures=False))))
    e2 = dumps(sorted(str(r) for r in eigen_ratios(2, 2, 12, default_eigen_matrices(D)[:3], FpProvider(D, use_fixtures=False))))
    dt = time.perf_counter() - t
    ok = first == again == two and e1 == e2
    detail = f"example (1) report byte-identical across runs={first == again}, across workers 1/2={first == two}"
    acceptance.record(9, ok, "determinism", detail, dt)
    assert ok, detail
