"""Local Hecke coset data on U(n,n) at inert and ramified primes, q-binomial
composite operators, character-sum membership, and the inert T(p) action on
Fourier coefficients of the normalized Eisenstein series.

Local model: K_p is the completion of K = Q(sqrt(-D)) at p.  For inert p the
uniformizer is p itself and O/p is the field with q^2 elements (q = p); for a
ramified p | D the uniformizer is sqrt(-D) (D = p) and O/varpi has q = p
elements.  Matrices are tuples of rows of :class:`KElt`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import qbinom, valuation_rat
from .lattice import PD, HermitianMatrix, LatticeError, _det, conj_t, is_psd, kelt_val, mat_mul
from .quadfield import KElt, QuadField, QuadInt


class HeckeError(ValueError):
    pass


# ------------------------------------------------------------ local ring


@dataclass(frozen=True)
class LocalRing:
    """O_{K_p} for an inert or ramified prime p (exact global representatives)."""

    D: int
    p: int

    def __post_init__(self):
        typ = QuadField(self.D).splitting_type(self.p)
        if typ == "split":
            raise HeckeError("split primes are handled only combinatorially (see n_AD)")
        if typ == "ramified" and self.D != self.p:
            raise HeckeError("ramified model needs D = p (uniformizer sqrt(-D))")
        object.__setattr__(self, "_typ", typ)

    @property
    def typ(self) -> str:
        return self._typ  # type: ignore[attr-defined]

    @property
    def q(self) -> int:
        """Cardinality of the residue field of F_v = Q_p."""
        return self.p

    @property
    def residue_size(self) -> int:
        """#(O_K / varpi)."""
        return self.p * self.p if self.typ == "inert" else self.p

    @property
    def uniformizer(self) -> KElt:
        if self.typ == "inert":
            return KElt(Fraction(self.p), Fraction(0), self.D)
        return KElt(Fraction(0), Fraction(1), self.D)

    def val(self, x: KElt) -> float | int:
        return kelt_val(x, self.p, self.typ)

    def reps(self, k: int) -> list[KElt]:
        """A complete set O^{(k)} of representatives of O_K / varpi^k (O^{(0)} = {0})."""
        D = self.D
        if k == 0:
            return [KElt(Fraction(0), Fraction(0), D)]
        if self.typ == "inert":
            m = self.p**k
            return [QuadInt(a, b, D).to_kelt() for a in range(m) for b in range(m)]
        pi = self.uniformizer
        out = []
        for digits in itertools.product(range(self.p), repeat=k):
            x = KElt(Fraction(0), Fraction(0), D)
            for i, c in enumerate(digits):
                x = x + c * pi**i
            out.append(x)
        return out

    def zero(self) -> KElt:
        return KElt(Fraction(0), Fraction(0), self.D)

    def one(self) -> KElt:
        return KElt(Fraction(1), Fraction(0), self.D)


def _mat_val(R: LocalRing, M) -> float | int:
    return min(R.val(x) for r in M for x in r)


def _minors_val(R: LocalRing, M, k: int) -> float | int:
    n = len(M)
    best = math.inf
    for rows in itertools.combinations(range(n), k):
        for cols in itertools.combinations(range(n), k):
            sub = tuple(tuple(M[i][j] for j in cols) for i in rows)
            best = min(best, R.val(_det(sub, R.D)))
    return best


def elementary_divisors(R: LocalRing, M) -> tuple:
    """Exponents e_1 <= ... <= e_n of the Smith form of M over O_{K_p} (determinantal divisors)."""
    n = len(M)
    d_prev = 0
    out = []
    for k in range(1, n + 1):
        d = _minors_val(R, M, k)
        if d == math.inf:
            raise HeckeError("singular matrix has no finite Smith form")
        out.append(d - d_prev)
        d_prev = d
    return tuple(out)


def mat_inv(M, D: int):
    n = len(M)
    A = [[M[i][j] for j in range(n)] + [KElt(Fraction(int(i == j)), Fraction(0), D) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c].re or A[r][c].im), None)
        if piv is None:
            raise HeckeError("singular matrix")
        A[c], A[piv] = A[piv], A[c]
        inv = KElt(Fraction(1), Fraction(0), D) / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and (A[r][c].re or A[r][c].im):
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return tuple(tuple(A[i][n:]) for i in range(n))


# ------------------------------------------------------------- coset reps


@dataclass(frozen=True)
class CosetRep:
    """An upper-triangular representative of a left GL_n(O_{K_p}) coset."""

    matrix: tuple
    stratum: tuple  # (s,) or (s, t)
    p: int
    splitting: str
    pattern: tuple  # diagonal exponents k_1..k_n

    def to_json(self) -> dict:
        rows = [[_kelt_str(x) for x in r] for r in self.matrix]
        return {"p": self.p, "splitting": self.splitting, "stratum": list(self.stratum), "pattern": list(self.pattern), "matrix": rows}


def _kelt_str(x: KElt) -> str:
    try:
        qi = x.to_quadint()
        return f"{qi.a}{qi.b:+d}*w"
    except ValueError:
        return repr(x)


def _upper_family(R: LocalRing, pattern: Sequence[int], zero_rule=None):
    """All upper-triangular matrices with diagonal varpi^{k_j} and a_uv in O^{(k_v)}."""
    n = len(pattern)
    pi = R.uniformizer
    slots = []
    for u in range(n):
        for v in range(u + 1, n):
            if zero_rule is not None and zero_rule(pattern[u], pattern[v]):
                slots.append(((u, v), [R.zero()]))
            else:
                slots.append(((u, v), R.reps(pattern[v])))
    diag = [pi ** pattern[j] for j in range(n)]
    for choice in itertools.product(*(s[1] for s in slots)):
        M = [[R.zero() for _ in range(n)] for _ in range(n)]
        for j in range(n):
            M[j][j] = diag[j]
        for ((u, v), _), a in zip(slots, choice):
            M[u][v] = a
        yield tuple(tuple(r) for r in M)


def tau_reps(n: int, s: int, p: int, D: int = 3) -> list[CosetRep]:
    """Representatives of GL_n(O) \\ GL_n(O) diag(1_{n-s}, varpi 1_s) GL_n(O) (explicit family).

    k_j in {0,1} with sum s; a_uv in O^{(k_v)}; a_uv = 0 if k_u = k_v = 1.
    """
    if not 0 <= s <= n:
        raise HeckeError("need 0 <= s <= n")
    R = LocalRing(D, p)
    out = []
    for pattern in _patterns01(n, s):
        for M in _upper_family(R, pattern, zero_rule=lambda ku, kv: ku == 1 and kv == 1):
            out.append(CosetRep(M, (s,), p, R.typ, pattern))
    return out


def _patterns01(n: int, s: int):
    for pat in itertools.product((0, 1), repeat=n):
        if sum(pat) == s:
            yield pat


def tau_pattern_count(n: int, s: int, q: int, pattern: Sequence[int]) -> Fraction:
    """q^{-s(s+1)} prod_j q^{2 j k_j}: the per-pattern count for inert p (residue field of size q^2)."""
    e = -s * (s + 1) + sum(2 * (j + 1) * k for j, k in enumerate(pattern))
    return Fraction(q) ** e


def hnf_reps(n: int, det_exp: int, p: int, D: int = 3) -> list[tuple]:
    """All left-GL_n(O) Hermite normal forms (upper triangular, a_uv in O^{(k_v)}) with det valuation det_exp."""
    R = LocalRing(D, p)
    out = []
    for pattern in itertools.product(range(det_exp + 1), repeat=n):
        if sum(pattern) != det_exp:
            continue
        for M in _upper_family(R, pattern):
            out.append((pattern, M))
    return out


def tau_st_reps(n: int, s: int, t: int, p: int, D: int = 3) -> list[CosetRep]:
    """Representatives of GL_n(O) diag(1_{n-s-t}, varpi 1_s, varpi^2 1_t) GL_n(O) / left GL_n(O):
    Hermite normal forms filtered by their Smith form."""
    if s < 0 or t < 0 or s + t > n:
        raise HeckeError("need s, t >= 0 and s + t <= n")
    R = LocalRing(D, p)
    target = tuple([0] * (n - s - t) + [1] * s + [2] * t)
    out = []
    for pattern, M in hnf_reps(n, s + 2 * t, p, D):
        if elementary_divisors(R, M) == target:
            out.append(CosetRep(M, (s, t), p, R.typ, pattern))
    return out


def hnf_total_count(n: int, det_exp: int, residue_size: int) -> int:
    """Number of Hermite normal forms with det valuation det_exp: sum over patterns of prod_j Q^{(j-1) k_j}."""
    tot = 0
    for pattern in itertools.product(range(det_exp + 1), repeat=n):
        if sum(pattern) == det_exp:
            tot += residue_size ** sum(j * k for j, k in enumerate(pattern))
    return tot


def same_left_coset(A, B, R: LocalRing) -> bool:
    """True iff B A^{-1} lies in GL_n(O_{K_p})."""
    X = mat_mul(B, mat_inv(A, R.D), R.D)
    if _mat_val(R, X) < 0:
        return False
    return R.val(_det(X, R.D)) == 0


# ---------------------------------------------------------------- counts


def b_counts(n: int, s: int, t: int, q: int, op: str = "T") -> int:
    """#(B(A, T(varpi))/~) = q^{(n-s)^2} (op="T", t ignored) or #B(A,s,t) = q^{2(n-s-t)(n-t)+s^2} (op="Ttilde")."""
    if op == "T":
        return q ** ((n - s) ** 2)
    if op == "Ttilde":
        return q ** (2 * (n - s - t) * (n - t) + s * s)
    raise HeckeError("op must be 'T' or 'Ttilde'")


def her_mod_count(R: LocalRing, m: int, k: int) -> int:
    """#Her_m(O) / varpi^k Her_m(O) by enumeration: rational diagonal residues times
    off-diagonal residues in O/varpi^k."""
    if m == 0:
        return 1
    reps = R.reps(k)
    ndiag = sum(1 for x in reps if x.im == 0)
    return ndiag**m * len(reps) ** (m * (m - 1) // 2)


def b_set_count_enum(n: int, s: int, t: int, p: int, D: int = 3) -> int:
    """Enumeration count of B(A,s,t) for inert p: Her_{n-s-t}/varpi^2 x M_{n-s-t,s}/varpi x Her_s/varpi."""
    R = LocalRing(D, p)
    if R.typ != "inert":
        raise HeckeError("inert only")
    a = n - s - t
    return her_mod_count(R, a, 2) * len(R.reps(1)) ** (a * s) * her_mod_count(R, s, 1)


# ---------------------------------------------------------- Hecke algebra


@dataclass(frozen=True)
class HeckeElement:
    """Formal Z-linear combination of named generators, e.g. {"T_1(p^2)": 1, "T_2(p^2)": 5}."""

    terms: tuple  # sorted ((name, coeff), ...)

    @staticmethod
    def of(d: dict) -> "HeckeElement":
        return HeckeElement(tuple(sorted((k, int(v)) for k, v in d.items() if v)))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def to_json(self) -> dict:
        return {k: v for k, v in self.terms}


def ttilde_expand(i: int, n: int, q: int, splitting: str = "inert") -> HeckeElement:
    """T~_i = sum_j [n-j choose i-j]_{Q} T_j with Q = q^2 (inert, j >= 1) or Q = q (ramified, j >= 0)."""
    if splitting == "inert":
        if not 1 <= i <= n:
            raise HeckeError("inert T~_i needs 1 <= i <= n")
        base, lo, name = q * q, 1, "T_{}(p^2)"
    elif splitting == "ramified":
        if not 0 <= i <= n:
            raise HeckeError("ramified T~_i needs 0 <= i <= n")
        base, lo, name = q, 0, "T_{}(p)"
    else:
        raise HeckeError("splitting must be 'inert' or 'ramified'")
    out = {}
    for j in range(lo, i + 1):
        c = qbinom(n - j, i - j, base)
        if c.denominator != 1:
            raise HeckeError("q-binomial is not integral")
        out[name.format(j)] = int(c)
    return HeckeElement.of(out)


def n_AD(i: int, n: int, q: int, kA: Sequence[int], kD: Sequence[int]) -> Fraction:
    """Split-case weight n(A,D) = q^{-i(i+1)/2} prod_{j<=2n} q^{j k_j} - q^{-s(s+1)/2} prod_{j<=n} q^{j k_j}
    - q^{-(i-s)(i-s+1)/2} prod_{j>n} q^{j k_j}, with k = kA + kD, s = |kA|."""
    k = list(kA) + list(kD)
    if len(kA) != n or len(kD) != n or sum(k) != i:
        raise HeckeError("need len(kA) = len(kD) = n and sum k = i")
    s = sum(kA)
    Q = Fraction(q)
    full = Q ** (-i * (i + 1) // 2 + sum((j + 1) * kj for j, kj in enumerate(k)))
    a = Q ** (-s * (s + 1) // 2 + sum((j + 1) * kj for j, kj in enumerate(kA)))
    d = Q ** (-(i - s) * (i - s + 1) // 2 + sum((n + j + 1) * kj for j, kj in enumerate(kD)))
    return full - a - d


# ------------------------------------------------------ membership / action


def _her_mod_p(R: LocalRing, n: int):
    """Hermitian n x n matrices over O with entries from O^{(1)} (diagonal rational residues)."""
    diag = [KElt(Fraction(c), Fraction(0), R.D) for c in range(R.p)]
    off = R.reps(1)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for dg in itertools.product(diag, repeat=n):
        for od in itertools.product(off, repeat=len(pairs)):
            M = [[R.zero() for _ in range(n)] for _ in range(n)]
            for i in range(n):
                M[i][i] = dg[i]
            for (i, j), x in zip(pairs, od):
                M[i][j] = x
                M[j][i] = x.conj()
            yield tuple(tuple(r) for r in M)


def b_module_generators(A, R: LocalRing) -> list:
    """Generators H = A^{-1} B of the B-module B(A, T(varpi)) / ~_D (inert p).

    With D = varpi A^{*-1}, B ~ B + Y D (Y in Her_n(O)) becomes H ~ H + N with
    N = varpi A^{-1} Her_n(O) A^{*-1}.  Every class has an integral
    representative (the module is V^{-1}(Her_n(O) + N_diag)V^{-*} for a Smith
    decomposition A = U diag V), so the Z-basis elements of Her_n(O) that are
    not in N generate it.
    """
    if R.typ != "inert":
        raise HeckeError("B-module generators are implemented for inert p")
    n = len(A)
    D = R.D
    zero, one = R.zero(), R.one()
    w = QuadInt(0, 1, D).to_kelt()
    basis = []
    for i in range(n):
        for j in range(i, n):
            for c in ([one] if i == j else [one, w]):
                E = [[zero] * n for _ in range(n)]
                E[i][j] = c
                E[j][i] = c.conj()
                basis.append(tuple(tuple(r) for r in E))
    Astar = conj_t(A)
    return [E for E in basis if _mat_val(R, mat_mul(mat_mul(A, E, D), Astar, D)) < 1]


def lifted_module_generators(A, R: LocalRing) -> list:
    """Elements H = H0/varpi (H0 in Her_n(O) mod varpi) with A H integral, i.e. the
    module {A^{-1} B} taken modulo Her_n(O) instead of modulo N.  The character
    e(tr(S H)) is trivial on it iff it is well defined on B/~_D and trivial there,
    which happens iff p^{-1} S[alpha_A] lies in Lambda_n."""
    if R.typ != "inert":
        raise HeckeError("B-module generators are implemented for inert p")
    n = len(A)
    pinv = Fraction(1, R.p)
    out = []
    for H0 in _her_mod_p(R, n):
        if all(x.re == 0 and x.im == 0 for r in H0 for x in r):
            continue
        AH = mat_mul(A, H0, R.D)
        if _mat_val(R, AH) >= 1:
            out.append(tuple(tuple(x * pinv for x in r) for r in H0))
    return out


def _tr(X, Y, D: int) -> KElt:
    n = len(X)
    s = KElt(Fraction(0), Fraction(0), D)
    for i in range(n):
        for j in range(n):
            s = s + X[i][j] * Y[j][i]
    return s


def _character_trivial(S: HermitianMatrix, gens, p: int) -> bool:
    for H in gens:
        tr = _tr(S.rows, H, S.D)
        if not tr.is_rational():
            raise HeckeError("trace of a product of Hermitian matrices is not rational")
        if valuation_rat(tr.rational(), p) < 0:
            return False
    return True


def qs_member(S: HermitianMatrix, rep: CosetRep, p: int) -> int:
    """sum_{B in B(A,T(varpi))/~_D} e(-tr(S A^{-1} B)): #B if tr(S A^{-1} B) is in Z_p
    for every generator B of the module, else 0 (character-sum dichotomy)."""
    R = LocalRing(S.D, p)
    if not _character_trivial(S, b_module_generators(rep.matrix, R), p):
        return 0
    return b_counts(S.n, rep.stratum[0], 0, R.q, "T")


def lifted_character_trivial(S: HermitianMatrix, rep: CosetRep, p: int) -> bool:
    """Character test on the lifted module (see :func:`lifted_module_generators`)."""
    R = LocalRing(S.D, p)
    return _character_trivial(S, lifted_module_generators(rep.matrix, R), p)


def alpha_of(rep: CosetRep, R: LocalRing):
    """alpha_A = varpi A^{-1}."""
    Ainv = mat_inv(rep.matrix, R.D)
    return tuple(tuple(x * R.uniformizer for x in r) for r in Ainv)


def hecke_target(S: HermitianMatrix, rep: CosetRep, p: int) -> HermitianMatrix:
    """p^{-1} S[alpha_A] with S[alpha] = alpha^* S alpha."""
    R = LocalRing(S.D, p)
    al = alpha_of(rep, R)
    T = S.transform(al)
    return HermitianMatrix(S.D, tuple(tuple(x * Fraction(1, p) for x in r) for r in T.rows))


@dataclass
class HeckeTerm:
    s: int
    pattern: tuple
    target: HermitianMatrix
    weight: Fraction
    coeff: Fraction


@dataclass
class HeckeResult:
    value: Fraction
    terms: list = field(default_factory=list)
    strata_counts: dict = field(default_factory=dict)


def hecke_apply_eis(p: int, n: int, mu: int, S: HermitianMatrix, provider, coeff=None) -> HeckeResult:
    """A_{T(varpi) E~}(1, S) at an inert p, h = 1, scalar weight det^{mu/2} (x) det^{mu/2}:

    q^{2 r_n + n^2} sum_s q^{(n-s)^2} sum_{A in Q_s(S)} N(det alpha_A)^{-mu/2} A~(p^{-1} S[alpha_A]),
    r_n = n mu/2 - n^2.
    """
    from .eisenstein import eis_coeff_any

    if coeff is None:
        coeff = lambda T: eis_coeff_any(n, mu, T, provider)  # noqa: E731
    R = LocalRing(S.D, p)
    if R.typ != "inert":
        raise HeckeError("only the inert T(varpi) action on forms is implemented")
    if S.n != n or is_psd(S) != PD:
        raise HeckeError("S must be a positive definite n x n matrix")
    q = R.q
    r_n = n * mu // 2 - n * n
    total = Fraction(0)
    terms = []
    counts = {}
    for s in range(n + 1):
        reps = tau_reps(n, s, p, S.D)
        counts[s] = len(reps)
        for rep in reps:
            m = qs_member(S, rep, p)
            if not m:
                continue
            if m != q ** ((n - s) ** 2):
                raise HeckeError("membership count is not the B-set cardinality")
            T = hecke_target(S, rep, p)
            if not T.in_lambda():
                continue  # Fourier coefficients vanish off Lambda_n
            al = alpha_of(rep, R)
            Ndet = _det(al, S.D).norm()
            w = Fraction(Ndet) ** (-(mu // 2))
            c = coeff(T)
            terms.append(HeckeTerm(s, rep.pattern, T, w * q ** ((n - s) ** 2), c))
            total += q ** ((n - s) ** 2) * w * c
    total *= Fraction(q) ** (2 * r_n + n * n)
    return HeckeResult(total, terms, counts)


def eigen_ratios(p: int, n: int, mu: int, matrices: Sequence[HermitianMatrix], provider) -> list[Fraction]:
    """hecke_apply_eis(S) / A~(S) for each S (an Eisenstein eigenform gives one constant)."""
    from .eisenstein import eis_coeff_any

    memo: dict = {}

    def coeff(T):
        k = T.key()
        if k not in memo:
            memo[k] = eis_coeff_any(n, mu, T, provider)
        return memo[k]

    out = []
    for S in matrices:
        base = coeff(S)
        if base == 0:
            raise HeckeError("A~(S) = 0: ratio undefined")
        out.append(hecke_apply_eis(p, n, mu, S, provider, coeff).value / base)
    return out


__all__ = [
    "CosetRep",
    "HeckeElement",
    "HeckeError",
    "LatticeError",
    "LocalRing",
    "b_counts",
    "conj_t",
    "eigen_ratios",
    "elementary_divisors",
    "hecke_apply_eis",
    "hnf_reps",
    "lifted_character_trivial",
    "n_AD",
    "qs_member",
    "same_left_coset",
    "tau_reps",
    "tau_st_reps",
    "ttilde_expand",
]
