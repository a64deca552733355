"""Hermitian matrices in Lambda_n = Her_n(K) cap M_n(d^{-1}).

Entries are exact elements of K (:class:`KElt`).  Off-diagonal entries of a
lattice matrix are written x/sqrt(-D) with x in O_K; JSON serializes them as
"(a+b*w)/sqrt(-D)".
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import to_rat, vp_int
from .quadfield import KElt, QuadField, QuadInt, complete_to_unimodular, parse_quadint


class LatticeError(ValueError):
    pass


class UnsupportedEnumeration(LatticeError):
    pass


Matrix = tuple  # tuple of tuples of KElt


def _k(x, D: int) -> KElt:
    if isinstance(x, KElt):
        return x
    if isinstance(x, QuadInt):
        return x.to_kelt()
    return KElt(to_rat(x), Fraction(0), D)


def mat_mul(A, B, D: int):
    n, m, k = len(A), len(B[0]), len(B)
    zero = KElt(Fraction(0), Fraction(0), D)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = zero
            for t in range(k):
                a = A[i][t]
                b = B[t][j]
                if (a.re or a.im) and (b.re or b.im):
                    s = s + a * b
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def conj_t(A):
    return tuple(tuple(A[i][j].conj() for i in range(len(A))) for j in range(len(A[0])))


@dataclass(frozen=True)
class HermitianMatrix:
    """An n x n Hermitian matrix over K = Q(sqrt(-D))."""

    D: int
    rows: Matrix

    def __post_init__(self):
        rows = tuple(tuple(_k(x, self.D) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        n = len(rows)
        for r in rows:
            if len(r) != n:
                raise LatticeError("matrix is not square")
        for i in range(n):
            for j in range(n):
                if rows[i][j] != rows[j][i].conj():
                    raise LatticeError(f"not Hermitian at ({i},{j})")

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij) -> KElt:
        return self.rows[ij[0]][ij[1]]

    # ---------------------------------------------------------- constructors
    @staticmethod
    def zero(n: int, D: int) -> "HermitianMatrix":
        return HermitianMatrix(D, tuple(tuple(0 for _ in range(n)) for _ in range(n)))

    @staticmethod
    def identity(n: int, D: int) -> "HermitianMatrix":
        return HermitianMatrix(D, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @staticmethod
    def diag(entries: Sequence, D: int) -> "HermitianMatrix":
        n = len(entries)
        return HermitianMatrix(D, tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @staticmethod
    def from_numerators(diag: Sequence[int], off: dict, D: int) -> "HermitianMatrix":
        """diag entries and {(i,j): QuadInt x} (i<j) meaning s_ij = x/sqrt(-D)."""
        n = len(diag)
        sq = KElt(Fraction(0), Fraction(1), D)
        rows = [[KElt(Fraction(0), Fraction(0), D) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            rows[i][i] = _k(diag[i], D)
        for (i, j), x in off.items():
            if i >= j:
                raise LatticeError("off-diagonal keys must satisfy i < j")
            v = _k(x, D) / sq
            rows[i][j] = v
            rows[j][i] = v.conj()
        return HermitianMatrix(D, tuple(tuple(r) for r in rows))

    def transform(self, U) -> "HermitianMatrix":
        """U* S U."""
        U = tuple(tuple(_k(x, self.D) for x in r) for r in U)
        return HermitianMatrix(self.D, mat_mul(mat_mul(conj_t(U), self.rows, self.D), U, self.D))

    def block(self, B, S2: "HermitianMatrix") -> "HermitianMatrix":
        """[[self, B], [B*, S2]] for an n1 x n2 block B."""
        n1, n2 = self.n, S2.n
        B = tuple(tuple(_k(x, self.D) for x in r) for r in B)
        rows = []
        for i in range(n1):
            rows.append(self.rows[i] + B[i])
        for j in range(n2):
            rows.append(tuple(B[i][j].conj() for i in range(n1)) + S2.rows[j])
        return HermitianMatrix(self.D, tuple(rows))

    def direct_sum(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return self.block(tuple(tuple(0 for _ in range(other.n)) for _ in range(self.n)), other)

    # -------------------------------------------------------------- queries
    def numerator(self, i: int, j: int) -> QuadInt:
        """x with s_ij = x/sqrt(-D) (raises if not in O_K)."""
        return (self.rows[i][j] * KElt(Fraction(0), Fraction(1), self.D)).to_quadint()

    def in_lambda(self) -> bool:
        for i in range(self.n):
            d = self.rows[i][i]
            if not d.is_rational() or d.rational().denominator != 1:
                return False
            for j in range(i + 1, self.n):
                try:
                    self.numerator(i, j)
                except ValueError:
                    return False
        return True

    def is_integral(self) -> bool:
        """All entries in O_K."""
        return all(x.is_integral() for r in self.rows for x in r)

    def det(self) -> Fraction:
        return _det(self.rows, self.D).rational()

    def key(self) -> str:
        """Canonical string used for memoization and deterministic ordering."""
        return ";".join(",".join(f"{x.re}:{x.im}" for x in r) for r in self.rows)

    def to_json(self) -> list:
        out = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                if i == j:
                    row.append(str(self.rows[i][i].rational()))
                else:
                    try:
                        x = self.numerator(i, j)
                        row.append(f"({x.a}{x.b:+d}*w)/sqrt(-{self.D})")
                    except ValueError:
                        e = self.rows[i][j]
                        row.append(f"{e.re}+({e.im})*sqrt(-{self.D})")
            out.append(row)
        return out

    @staticmethod
    def from_json(rows: list, D: int) -> "HermitianMatrix":
        return HermitianMatrix(D, tuple(tuple(parse_entry(x, D) for x in r) for r in rows))

    def __repr__(self):
        return f"HermitianMatrix(D={self.D}, {self.to_json()})"


LatticeMatrix = HermitianMatrix

_ENTRY_RE = re.compile(r"^\((?P<num>[^)]*)\)/sqrt\(-(?P<D>\d+)\)$")


def parse_entry(x, D: int) -> KElt:
    """int / "p/q" / "(a+b*w)/sqrt(-D)" / "a+b*w" -> KElt."""
    if isinstance(x, (int, Fraction, KElt)):
        return _k(x, D)
    s = str(x).replace(" ", "")
    m = _ENTRY_RE.match(s)
    if m:
        if int(m.group("D")) != D:
            raise LatticeError(f"entry {s} over a different field")
        return parse_quadint(m.group("num"), D).to_kelt() / KElt(Fraction(0), Fraction(1), D)
    if "w" in s:
        return parse_quadint(s, D).to_kelt()
    return _k(Fraction(s), D)


def _det(rows, D: int) -> KElt:
    """Determinant over K by Gaussian elimination."""
    A = [list(r) for r in rows]
    n = len(A)
    det = KElt(Fraction(1), Fraction(0), D)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c].re or A[r][c].im), None)
        if piv is None:
            return KElt(Fraction(0), Fraction(0), D)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = det * A[c][c]
        inv = KElt(Fraction(1), Fraction(0), D) / A[c][c]
        for r in range(c + 1, n):
            if A[r][c].re or A[r][c].im:
                f = A[r][c] * inv
                A[r] = [A[r][j] - f * A[c][j] for j in range(n)]
    return det


def det_scaled(S: HermitianMatrix) -> int:
    """D^{floor(n/2)} det S, which is an integer for S in Lambda_n."""
    v = Fraction(S.D) ** (S.n // 2) * S.det()
    if v.denominator != 1:
        raise LatticeError(f"D^floor(n/2) det S = {v} is not integral: S is not in Lambda_n")
    return int(v)


PD, PSD_SINGULAR, INDEFINITE = "positive-definite", "psd-singular", "indefinite"


def is_psd(S: HermitianMatrix) -> str:
    """Classify S by exact LDL* elimination with diagonal pivoting."""
    A = [list(r) for r in S.rows]
    n = len(A)
    active = list(range(n))
    singular = False
    while active:
        # pick a non-zero diagonal pivot
        piv = next((i for i in active if A[i][i].re != 0), None)
        if piv is None:
            # all remaining diagonals vanish: psd forces the whole block to vanish
            for i in active:
                for j in active:
                    if A[i][j].re or A[i][j].im:
                        return INDEFINITE
            singular = True
            break
        d = A[piv][piv].re
        if d < 0:
            return INDEFINITE
        active.remove(piv)
        for i in active:
            if A[i][piv].re or A[i][piv].im:
                f = A[i][piv] / d
                for j in active:
                    A[i][j] = A[i][j] - f * A[piv][j]
    return PSD_SINGULAR if singular else PD


# ------------------------------------------------------------- completions


def _elements_of_norm_at_most(bound: Fraction, D: int) -> list[QuadInt]:
    """All x in O_K with N(x) <= bound."""
    out = []
    B = int(math.floor(bound))
    if B < 0:
        return out
    # N(a + b w) >= (D/4) b^2 (kind 0) or (D/4) b^2 * 4 (kind 1); bounds on b then a
    bmax = int(math.isqrt(4 * B // D + 1)) + 1
    amax = int(math.isqrt(B)) + bmax + 1
    for b in range(-bmax, bmax + 1):
        for a in range(-amax, amax + 1):
            x = QuadInt(a, b, D)
            if x.norm() <= B:
                out.append(x)
    out.sort(key=lambda x: (x.norm(), x.a, x.b))
    return out


def _schur_ok(S1: HermitianMatrix, B, S2: HermitianMatrix) -> bool:
    return is_psd(S1.block(B, S2)) != INDEFINITE


def completions(S1: HermitianMatrix, S2: HermitianMatrix) -> list[tuple]:
    """All off-diagonal blocks B in M_{n1,n2}(d^{-1}) with [[S1,B],[B*,S2]] psd.

    Each B is returned as a tuple of rows of KElt.  Coordinates are bounded by
    the 2x2 principal minors |b_ij|^2 <= s1_ii s2_jj; the remaining condition is
    tested exactly.  Output is ordered by a canonical key.
    """
    D = S1.D
    if is_psd(S1) == INDEFINITE or is_psd(S2) == INDEFINITE:
        raise LatticeError("completions needs psd S1 and S2")
    n1, n2 = S1.n, S2.n
    S2zero = all(not (x.re or x.im) for r in S2.rows for x in r)
    if S2zero:
        return [tuple(tuple(KElt(Fraction(0), Fraction(0), D) for _ in range(n2)) for _ in range(n1))]
    if is_psd(S1) != PD:
        raise UnsupportedEnumeration("completions: S1 singular with S2 != 0 is not supported")
    sq = KElt(Fraction(0), Fraction(1), D)
    cand = []
    for i in range(n1):
        row = []
        for j in range(n2):
            bound = S1[i, i].rational() * S2[j, j].rational() * D  # |x|^2 = D |b|^2
            row.append([x.to_kelt() / sq for x in _elements_of_norm_at_most(bound, D)])
        cand.append(row)
    flat = [cand[i][j] for i in range(n1) for j in range(n2)]
    out = []
    for combo in itertools.product(*flat):
        B = tuple(tuple(combo[i * n2 + j] for j in range(n2)) for i in range(n1))
        if _schur_ok(S1, B, S2):
            out.append(B)
    out.sort(key=_block_key)
    return out


def completions_boxscan(S1: HermitianMatrix, S2: HermitianMatrix, box: int) -> list[tuple]:
    """Naive oracle: every numerator a+b*w with |a|,|b| <= box, tested by full psd check."""
    D = S1.D
    n1, n2 = S1.n, S2.n
    sq = KElt(Fraction(0), Fraction(1), D)
    elts = [QuadInt(a, b, D).to_kelt() / sq for a in range(-box, box + 1) for b in range(-box, box + 1)]
    out = []
    for combo in itertools.product(elts, repeat=n1 * n2):
        B = tuple(tuple(combo[i * n2 + j] for j in range(n2)) for i in range(n1))
        if is_psd(S1.block(B, S2)) != INDEFINITE:
            out.append(B)
    out.sort(key=_block_key)
    return out


def _block_key(B) -> tuple:
    return tuple((x.re, x.im) for r in B for x in r)


# ------------------------------------------------------------ radical split


def _kernel_vector(S: HermitianMatrix) -> list[KElt] | None:
    """A non-zero v with S v = 0, or None if S is non-degenerate."""
    D = S.D
    n = S.n
    A = [list(r) for r in S.rows]
    pivots = []
    row = 0
    for c in range(n):
        piv = next((r for r in range(row, n) if A[r][c].re or A[r][c].im), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        inv = KElt(Fraction(1), Fraction(0), D) / A[row][c]
        A[row] = [x * inv for x in A[row]]
        for r in range(n):
            if r != row and (A[r][c].re or A[r][c].im):
                f = A[r][c]
                A[r] = [A[r][j] - f * A[row][j] for j in range(n)]
        pivots.append(c)
        row += 1
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    v = [KElt(Fraction(0), Fraction(0), D) for _ in range(n)]
    v[fc] = KElt(Fraction(1), Fraction(0), D)
    for r, c in enumerate(pivots):
        v[c] = -A[r][fc]
    return v


def _primitive(v: list[KElt], K: QuadField) -> list[QuadInt]:
    """Scale v in K^n to a primitive vector of O_K^n."""
    den = 1
    for x in v:
        den = math.lcm(den, x.re.denominator, x.im.denominator)
    w = [(x * (2 * den)).to_quadint() for x in v]
    g = QuadInt(0, 0, K.D)
    for x in w:
        g = K.gcd(g, x)
    return [(x.to_kelt() / g.to_kelt()).to_quadint() for x in w]


def radical_split(S: HermitianMatrix):
    """(U, S', r): U unimodular over O_K with U* S U = diag(S', 0_{n-r}), det S' != 0."""
    D = S.D
    K = QuadField(D)
    n = S.n
    one = QuadInt(1, 0, D)
    zero = QuadInt(0, 0, D)
    U = [[one if i == j else zero for j in range(n)] for i in range(n)]
    cur = S
    m = n  # leading block size still possibly degenerate
    while m > 0:
        lead = HermitianMatrix(D, tuple(tuple(cur.rows[i][j] for j in range(m)) for i in range(m)))
        v = _kernel_vector(lead)
        if v is None:
            break
        w = _primitive(v, K)
        W = complete_to_unimodular(w, K)  # first column is w
        # move the kernel vector to position m-1
        perm = list(range(1, m)) + [0]
        Wp = [[W[i][perm[j]] for j in range(m)] for i in range(m)]
        full = [[(Wp[i][j] if i < m and j < m else (one if i == j else zero)) for j in range(n)] for i in range(n)]
        U = [[sum((U[i][t] * full[t][j] for t in range(n)), zero) for j in range(n)] for i in range(n)]
        cur = S.transform(U)
        m -= 1
    r = m
    Sp = HermitianMatrix(D, tuple(tuple(cur.rows[i][j] for j in range(r)) for i in range(r)))
    # verify
    for i in range(n):
        for j in range(n):
            if (i >= r or j >= r) and (cur.rows[i][j].re or cur.rows[i][j].im):
                raise LatticeError("radical split failed: S is not psd?")
    return tuple(tuple(x for x in row) for row in U), Sp, r


# ----------------------------------------------------------- isometry test


def _real_gram(S: HermitianMatrix) -> list[list[Fraction]]:
    """Gram matrix of the Z-form v -> v* S v on O_K^n = Z^{2n} (basis 1, w per coordinate)."""
    D = S.D
    n = S.n
    basis = []
    for i in range(n):
        for b in (QuadInt(1, 0, D), QuadInt(0, 1, D)):
            vec = [QuadInt(0, 0, D)] * n
            vec = list(vec)
            vec[i] = b
            basis.append([x.to_kelt() for x in vec])
    G = []
    for u in basis:
        row = []
        for v in basis:
            s = KElt(Fraction(0), Fraction(0), D)
            for i in range(n):
                for j in range(n):
                    s = s + u[i].conj() * S.rows[i][j] * v[j]
            row.append(s.trace() / 2)  # real part of u* S v
        G.append(row)
    return G


def short_vectors(S: HermitianMatrix, bound: Fraction) -> list[tuple[list[QuadInt], Fraction]]:
    """All non-zero v in O_K^n with v* S v <= bound (S positive definite), exact."""
    G = _real_gram(S)
    m = len(G)
    # Cholesky (exact rationals) q_ii, q_ij
    Q = [[Fraction(0)] * m for _ in range(m)]
    A = [row[:] for row in G]
    for i in range(m):
        Q[i][i] = A[i][i]
        for j in range(i + 1, m):
            Q[i][j] = A[i][j] / A[i][i]
        for j in range(i + 1, m):
            for k in range(j, m):
                A[j][k] -= Q[i][j] * Q[i][k] * A[i][i]
                A[k][j] = A[j][k]
    if any(Q[i][i] <= 0 for i in range(m)):
        raise LatticeError("short_vectors needs a positive definite matrix")
    out = []
    x = [0] * m
    bound = to_rat(bound)

    def rec(i: int, rem: Fraction):
        c = -sum((Q[i][j] * x[j] for j in range(i + 1, m)), Fraction(0))
        r = rem / Q[i][i]
        lo = math.ceil(c - _sqrt_up(r))
        hi = math.floor(c + _sqrt_up(r))
        for t in range(lo, hi + 1):
            x[i] = t
            used = Q[i][i] * (t - c) ** 2
            if used > rem:
                continue
            if i == 0:
                out.append(list(x))
            else:
                rec(i - 1, rem - used)
        x[i] = 0

    rec(m - 1, bound)
    D = S.D
    res = []
    for v in out:
        if any(v):
            qv = [QuadInt(v[2 * i], v[2 * i + 1], D) for i in range(S.n)]
            val = _hval(S, [y.to_kelt() for y in qv])
            if val <= bound:
                res.append((qv, val))
    res.sort(key=lambda t: (t[1], [(y.a, y.b) for y in t[0]]))
    return res


def _sqrt_up(r: Fraction) -> Fraction:
    if r <= 0:
        return Fraction(0)
    s = math.isqrt(r.numerator * r.denominator) + 1
    return Fraction(s, r.denominator)


def _hval(S: HermitianMatrix, v: list[KElt]) -> Fraction:
    s = KElt(Fraction(0), Fraction(0), S.D)
    for i in range(S.n):
        for j in range(S.n):
            s = s + v[i].conj() * S.rows[i][j] * v[j]
    return s.rational()


def _hform(S: HermitianMatrix, u: list[KElt], v: list[KElt]) -> KElt:
    s = KElt(Fraction(0), Fraction(0), S.D)
    for i in range(S.n):
        for j in range(S.n):
            s = s + u[i].conj() * S.rows[i][j] * v[j]
    return s


@dataclass(frozen=True)
class IsometryResult:
    status: str  # "isometric" | "not-isometric" | "unknown"
    U: tuple | None = None
    reason: str = ""


def isometry_test(S: HermitianMatrix, T: HermitianMatrix, max_nodes: int = 200_000) -> IsometryResult:
    """Search U over O_K with U* S U = T by backtracking over short vectors of S."""
    if S.D != T.D or S.n != T.n:
        return IsometryResult("not-isometric", reason="different field or size")
    if is_psd(S) != PD or is_psd(T) != PD:
        raise LatticeError("isometry_test needs positive definite matrices")
    if S.det() != T.det():
        return IsometryResult("not-isometric", reason="determinants differ")
    minS = short_vectors(S, max(S[i, i].rational() for i in range(S.n)))[0][1]
    minT = short_vectors(T, max(T[i, i].rational() for i in range(T.n)))[0][1]
    if minS != minT:
        return IsometryResult("not-isometric", reason=f"minima differ ({minS} vs {minT})")
    n = S.n
    targets = sorted({T[i, i].rational() for i in range(n)})
    pool = short_vectors(S, max(targets))
    by_len = {t: [[y.to_kelt() for y in v] for v, val in pool if val == t] for t in targets}
    chosen: list[list[KElt]] = []
    nodes = [0]

    def rec(i: int) -> bool:
        if i == n:
            return True
        for v in by_len[T[i, i].rational()]:
            nodes[0] += 1
            if nodes[0] > max_nodes:
                raise _Budget()
            if all(_hform(S, chosen[j], v) == T[j, i] for j in range(i)):
                chosen.append(v)
                if rec(i + 1):
                    return True
                chosen.pop()
        return False

    try:
        found = rec(0)
    except _Budget:
        return IsometryResult("unknown", reason=f"search budget of {max_nodes} nodes exhausted")
    if not found:
        return IsometryResult("not-isometric", reason="exhaustive short-vector search")
    U = tuple(tuple(chosen[j][i] for j in range(n)) for i in range(n))
    if S.transform(U).rows != T.rows:
        raise LatticeError("isometry verification failed")
    return IsometryResult("isometric", U)


class _Budget(Exception):
    pass


# ------------------------------------------------------- local invariants


def kelt_val(x: KElt, p: int, typ: str) -> float | int:
    """Valuation of x in K_p normalized by the uniformizer of the prime above p.

    inert: v_p(N x)/2; ramified: v_p(N x); split: the first embedding is not
    canonical here, so the minimum over both primes is returned.
    """
    if x.re == 0 and x.im == 0:
        return math.inf
    N = x.norm()
    vN = vp_int(N.numerator, p) - vp_int(N.denominator, p)
    if typ == "inert":
        return vN // 2
    if typ == "ramified":
        return vN
    raise LatticeError("kelt_val: split primes are not handled")


def jordan_type(S: HermitianMatrix, p: int) -> tuple:
    """Local Jordan invariants of S at an odd (or inert) prime p.

    Returns a tuple of (scale, rank, det_class) with scale the valuation (in
    the uniformizer of K_p) of the Jordan component, and det_class the local
    norm character of the component's unit determinant for even scales at
    ramified p (None otherwise: inert units are all norms, odd ramified
    components are hyperbolic).
    """
    K = QuadField(S.D)
    typ = K.splitting_type(p)
    if typ == "split":
        raise LatticeError("jordan_type is not defined for split primes")
    if typ == "ramified" and p == 2:
        raise LatticeError("jordan_type at a ramified dyadic prime is not supported")
    if S.det() == 0:
        raise LatticeError("jordan_type needs a non-degenerate matrix")
    D = S.D
    A = [list(r) for r in S.rows]
    idx = list(range(S.n))
    comps: dict[int, list] = {}
    one = KElt(Fraction(1), Fraction(0), D)
    while idx:
        vals = {(i, j): kelt_val(A[i][j], p, typ) for i in idx for j in idx}
        m = min(vals.values())
        diag = [i for i in idx if vals[(i, i)] == m]
        if diag:
            i = diag[0]
            block = [i]
        else:
            i, j = next((i, j) for (i, j), v in vals.items() if v == m and i != j)
            if typ == "inert" or m % 2 == 0:
                # e_i <- e_i + lam e_j gives a diagonal entry of valuation m
                lam = _trace_unit(A[i][j], p, typ, D, m)
                for t in idx:  # column op then row op
                    A[t][i] = A[t][i] + A[t][j] * lam
                for t in idx:
                    A[i][t] = A[i][t] + lam.conj() * A[j][t]
                if kelt_val(A[i][i], p, typ) != m:
                    raise LatticeError("Jordan splitting failed to create a diagonal pivot")
                block = [i]
            else:
                block = [i, j]
        rest = [t for t in idx if t not in block]
        if len(block) == 1:
            b = block[0]
            d = A[b][b]
            comps.setdefault(m, []).append(("d", d.rational()))
            inv = one / d
            for s in rest:
                for t in rest:
                    A[s][t] = A[s][t] - A[s][b] * inv * A[b][t]
        else:
            b0, b1 = block
            P = [[A[b0][b0], A[b0][b1]], [A[b1][b0], A[b1][b1]]]
            det = P[0][0] * P[1][1] - P[0][1] * P[1][0]
            Pinv = [[P[1][1] / det, -P[0][1] / det], [-P[1][0] / det, P[0][0] / det]]
            comps.setdefault(m, []).append(("h", det.rational()))
            for s in rest:
                for t in rest:
                    corr = KElt(Fraction(0), Fraction(0), D)
                    for a, ba in enumerate(block):
                        for c, bc in enumerate(block):
                            corr = corr + A[s][ba] * Pinv[a][c] * A[bc][t]
                    A[s][t] = A[s][t] - corr
        idx = rest
    out = []
    for m in sorted(comps):
        parts = comps[m]
        rank = sum(1 if kind == "d" else 2 for kind, _ in parts)
        cls = None
        if typ == "ramified" and m % 2 == 0:
            prod = Fraction(1)
            for _, dv in parts:
                prod *= dv
            unit = prod / Fraction(p) ** (m // 2 * rank)
            cls = K.local_norm_character(unit, p)
        out.append((m, rank, cls))
    return tuple(out)


def _trace_unit(y: KElt, p: int, typ: str, D: int, m: int) -> KElt:
    """lam in O_K with v(Tr(lam * conj(y)))... chosen so Tr(lam y) has valuation m."""
    for a, b in itertools.product(range(0, 3), repeat=2):
        lam = QuadInt(a, b, D).to_kelt()
        if lam.norm() == 0:
            continue
        t = (lam * y).trace()
        vt = kelt_val(KElt(t, Fraction(0), D), p, typ)
        if vt == m and kelt_val(lam, p, typ) == 0:
            return lam
    raise LatticeError("no suitable trace unit found")
