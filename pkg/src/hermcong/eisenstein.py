"""Fourier coefficients of the normalized Hermitian Eisenstein series, the
explicit holomorphic differential operator P_{k,l}(T) with its validators, and
the pullback coefficient sums epsilon_mu(S1, S2).

Conventions (h = 1, F = Q, kappa = nu = mu/2):

* ``eis_coeff_nondeg``:  A~_{n,mu}(S) = 2^n prod_{p in c} F_p(p^{mu-2n}; S).
* ``eis_coeff_any``:     Phi-reduction to the non-degenerate core,
  A~_n(S) = prod_{i=r}^{n-1} L(1-mu+i, chi^i) * A~_r(S').
* ``pullback_coeff``:    sum over completions B of P(S(B)) A~_{n,mu}(S(B)).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .arith import CoeffVec, to_rat
from .lattice import (
    PD,
    HermitianMatrix,
    LatticeError,
    completions,
    det_scaled,
    is_psd,
    radical_split,
)
from .quadfield import Character, KElt, L_value_at
from .siegel import FpProvider, MissingLocalDatum, fp_degree, fp_lookup, relevant_primes, xi_hat


class UnsupportedOperator(ValueError):
    pass


class EisensteinError(ValueError):
    pass


# ------------------------------------------------------------------ weights


@dataclass(frozen=True)
class WeightData:
    mu: int
    k: tuple = ()
    l: tuple = ()

    def __post_init__(self):
        if self.mu % 2:
            raise ValueError("mu must be even")
        for w in (self.k, self.l):
            if any(w[i] < w[i + 1] for i in range(len(w) - 1)) or any(x < 0 for x in w):
                raise ValueError(f"{w} is not a dominant weight")
        if self.len_k + self.len_l > self.mu:
            raise ValueError("l(k) + l(l) must not exceed mu")

    @property
    def kappa(self) -> int:
        return self.mu // 2

    @property
    def nu(self) -> int:
        return self.mu // 2

    @property
    def len_k(self) -> int:
        return sum(1 for x in self.k if x)

    @property
    def len_l(self) -> int:
        return sum(1 for x in self.l if x)

    @property
    def size_k(self) -> int:
        return sum(self.k)

    @property
    def size_l(self) -> int:
        return sum(self.l)

    @property
    def ell(self) -> int:
        return max(self.len_k, self.len_l)

    def rho_size(self, r: int) -> int:
        """|rho_r| = |k| + |l| + r mu."""
        return self.size_k + self.size_l + r * self.mu

    @property
    def is_scalar(self) -> bool:
        return self.size_k == 0 and self.size_l == 0


# ----------------------------------------------------- sparse polynomials


Exp = tuple


@dataclass
class MPoly:
    """Sparse polynomial: {exponent tuple: coefficient} in ``nvars`` variables."""

    nvars: int
    terms: dict = field(default_factory=dict)

    @staticmethod
    def const(c, nvars: int) -> "MPoly":
        return MPoly(nvars, {(0,) * nvars: c} if c else {})

    @staticmethod
    def var(i: int, nvars: int, c=1) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return MPoly(nvars, {tuple(e): c})

    def __add__(self, o: "MPoly") -> "MPoly":
        out = dict(self.terms)
        for e, c in o.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MPoly(self.nvars, out)

    def __neg__(self) -> "MPoly":
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, o: "MPoly") -> "MPoly":
        return self + (-o)

    def scale(self, c) -> "MPoly":
        return MPoly(self.nvars, {e: v * c for e, v in self.terms.items()} if c else {})

    def __mul__(self, o: "MPoly") -> "MPoly":
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MPoly(self.nvars, {e: c for e, c in out.items() if c})

    def __pow__(self, m: int) -> "MPoly":
        out = MPoly.const(1, self.nvars)
        base = self
        while m:
            if m & 1:
                out = out * base
            m >>= 1
            if m:
                base = base * base
        return out

    def diff(self, i: int) -> "MPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return MPoly(self.nvars, out)

    def __call__(self, point: Sequence):
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x**k
            total = total + t
        return total

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)


# --------------------------------------------------------- the operator P


@dataclass
class DiffOpPoly:
    """P(T) on n x n matrices T (n = n1 + n2), valued in Q[u, v].

    ``poly`` has variables t_11, t_12, ..., t_nn (row-major) followed by the
    u-variables (nu of them) and the v-variables (nv).  ``fast_eval`` is an
    optional equivalent evaluator used for the pullback sums.
    """

    n1: int
    n2: int
    weights: WeightData
    nu: int
    nv: int
    poly: MPoly
    fast_eval: Callable | None = None
    label: str = ""

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def nt(self) -> int:
        return self.n * self.n

    def t_index(self, i: int, j: int) -> int:
        return i * self.n + j

    def coeff_weights(self) -> tuple[tuple, tuple]:
        return ((sum(self.weights.k),), (sum(self.weights.l),))

    def _to_coeffvec(self, uv: Mapping) -> CoeffVec:
        return CoeffVec((self.weights.size_k,), (self.weights.size_l,), self.nu, dict(uv))

    def evaluate_generic(self, T: Sequence[Sequence]) -> CoeffVec:
        vals = [T[i][j] for i in range(self.n) for j in range(self.n)]
        out: dict = {}
        cache: dict = {}
        for e, c in self.poly.terms.items():
            te, uve = e[: self.nt], e[self.nt :]
            if te not in cache:
                v = 1
                for x, k in zip(vals, te):
                    if k:
                        v = v * x**k
                cache[te] = v
            out[uve] = out.get(uve, 0) + cache[te] * c
        return self._to_coeffvec(out)

    def evaluate(self, T: Sequence[Sequence]) -> CoeffVec:
        if self.fast_eval is not None:
            return self._to_coeffvec(self.fast_eval(T))
        return self.evaluate_generic(T)

    def perturbed(self, delta=Fraction(1), which: int = 0) -> "DiffOpPoly":
        """A copy with one monomial coefficient changed (fast evaluator dropped)."""
        terms = dict(self.poly.terms)
        e = sorted(terms)[which]
        terms[e] = terms[e] + delta * (terms[e] if terms[e] else 1)
        return DiffOpPoly(self.n1, self.n2, self.weights, self.nu, self.nv, MPoly(self.poly.nvars, terms), None, self.label + "+perturbed")


N0_70 = 2**12 * 3**6 * 5**3 * 7**2 * 11 * 13 * 52140059


def _uvpoly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return out


def _uvpoly_pow(a: dict, m: int, nvars: int) -> dict:
    out = {(0,) * nvars: 1}
    for _ in range(m):
        out = _uvpoly_mul(out, a)
    return out


C_FORMS = ("entry", "minor")


def _c_entry(t, i, j, form):
    if form == "entry":
        return t(i, j) * t(3, 3)
    return t(i, j) * t(3, 3) - t(i, 3) * t(3, j)


def _p70_fast(T, c_form: str = "entry") -> dict:
    """Evaluate P_{(7,0),(7,0)} at a 3 x 3 matrix T via the A, B, C factorization."""
    t = lambda i, j: T[i - 1][j - 1]  # noqa: E731
    # exponent tuples (u1, u2, v1, v2)
    A = {(1, 0, 0, 0): t(1, 3), (0, 1, 0, 0): t(2, 3)}
    B = {(0, 0, 1, 0): t(3, 1), (0, 0, 0, 1): t(3, 2)}
    C = {}
    for i in (1, 2):
        for j in (1, 2):
            e = [0, 0, 0, 0]
            e[i - 1] += 1
            e[1 + j] += 1
            C[tuple(e)] = _c_entry(t, i, j, c_form)
    AB = _uvpoly_mul(A, B)
    out: dict = {}
    for j in range(8):
        c = Fraction((-1) ** j * math.comb(7, j) * math.comb(20 - j, 7 - j), N0_70)
        term = _uvpoly_mul(_uvpoly_pow(AB, 7 - j, 4), _uvpoly_pow(C, j, 4))
        for e, v in term.items():
            out[e] = out.get(e, 0) + v * c
    return out


def build_P(weights: WeightData, n1: int, n2: int, c_form: str = "entry") -> DiffOpPoly:
    """The explicit operator P_{k,l}(T) for the supported cases.

    For k = l = (7, 0), (n1, n2) = (2, 1):
    P = N0^{-1} sum_j (-1)^j C(7,j) C(20-j,7-j) (AB)^{7-j} C^j with
    A = u^t T_13, B = T_31^t v and

    * ``c_form="entry"`` (default): C = t_33 * u^t T_11 v.  This is the
      pluriharmonic choice (checked by :func:`pluriharmonic_check`).
    * ``c_form="minor"``: C = sum u_i v_j (t_ij t_33 - t_i3 t_3j), which is
      equivariant but fails pluriharmonicity; kept for comparison.
    """
    if c_form not in C_FORMS:
        raise ValueError(f"c_form must be one of {C_FORMS}")
    n = n1 + n2
    nt = n * n
    if weights.is_scalar:
        return DiffOpPoly(n1, n2, weights, 0, 0, MPoly.const(Fraction(1), nt), lambda T: {(): Fraction(1)}, "scalar")
    if tuple(weights.k) == (7, 0) and tuple(weights.l) == (7, 0) and (n1, n2) == (2, 1):
        nv = nt + 4
        tv = lambda i, j: MPoly.var((i - 1) * n + (j - 1), nv)  # noqa: E731
        u = [MPoly.var(nt + 0, nv), MPoly.var(nt + 1, nv)]
        v = [MPoly.var(nt + 2, nv), MPoly.var(nt + 3, nv)]
        A = u[0] * tv(1, 3) + u[1] * tv(2, 3)
        B = v[0] * tv(3, 1) + v[1] * tv(3, 2)
        C = MPoly(nv)
        for i in (1, 2):
            for j in (1, 2):
                C = C + u[i - 1] * v[j - 1] * _c_entry(tv, i, j, c_form)
        P = MPoly(nv)
        AB = A * B
        for j in range(8):
            c = Fraction((-1) ** j * math.comb(7, j) * math.comb(20 - j, 7 - j), N0_70)
            P = P + ((AB ** (7 - j)) * (C**j)).scale(c)
        return DiffOpPoly(n1, n2, weights, 2, 2, P, lambda T: _p70_fast(T, c_form), f"P_(7,0),(7,0)[{c_form}]")
    raise UnsupportedOperator(f"no explicit operator for weights k={weights.k}, l={weights.l}, (n1,n2)=({n1},{n2})")


# ------------------------------------------------------------- validators


def _rand_rat(rng: random.Random, span: int = 9) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, span))


def is_pluriharmonic_xy(f: MPoly, n: int, width: int) -> bool:
    """Direct definition for f in the entries of (n, width) matrices X then Y
    (variables x_11..x_{n,width} then y_11..y_{n,width}, row-major)."""
    if f.nvars != 2 * n * width:
        raise ValueError("variable count must be 2 n width")
    for i in range(n):
        for j in range(n):
            acc = MPoly(f.nvars)
            for s in range(width):
                acc = acc + f.diff(i * width + s).diff(n * width + j * width + s)
            if not acc.is_zero():
                return False
    return True


def pluriharmonic_check(P: DiffOpPoly, width: int, trials: int = 20, seed: int = 0) -> bool:
    """Pluriharmonicity of P~(X1,X2,Y1,Y2) = P([[X1 tY1, X1 tY2],[X2 tY1, X2 tY2]])
    in each pair (X_s, Y_s), by the chain rule through the T-entries:

        sum_s d^2 P~ / dX_{is} dY_{js}
          = sum_{a,b} T_ab (d^2 P / dT_aj dT_ib) + width * dP/dT_ij,

    tested at random rational X, Y (T = X tY) and random rational u, v.
    """
    n = P.n
    nt = P.nt
    d1 = {(i, j): P.poly.diff(P.t_index(i, j)) for i in range(n) for j in range(n)}
    blocks = [range(0, P.n1), range(P.n1, n)]
    pairs = [(i, j) for blk in blocks for i in blk for j in blk]
    d2 = {}
    for i, j in pairs:
        for a in range(n):
            for b in range(n):
                d2[(a, j, i, b)] = d1[(a, j)].diff(P.t_index(i, b))
    rng = random.Random(seed)
    for _ in range(trials):
        X = [[_rand_rat(rng) for _ in range(width)] for _ in range(n)]
        Y = [[_rand_rat(rng) for _ in range(width)] for _ in range(n)]
        T = [[sum(X[a][s] * Y[b][s] for s in range(width)) for b in range(n)] for a in range(n)]
        uv = [_rand_rat(rng) for _ in range(P.nu + P.nv)]
        point = [T[a][b] for a in range(n) for b in range(n)] + uv
        for i, j in pairs:
            val = width * d1[(i, j)](point)
            for a in range(n):
                for b in range(n):
                    val += T[a][b] * d2[(a, j, i, b)](point)
            if val != 0:
                return False
    return True


def _rep_apply(uvpoly: Mapping, P: DiffOpPoly, A1, B1, a2, b2) -> dict:
    """(rho_1 (x) rho_2)(A, B) on Q[u, v]: u -> tA1 u, v -> tB1 v, times
    a2^{|k|} b2^{|l|} for the one-dimensional second block.  For the scalar
    operator the representation is trivial."""
    if P.nu == 0:
        return dict(uvpoly)
    if P.n2 != 1 or P.nu != 2 or P.nv != 2:
        raise UnsupportedOperator("representation action implemented for n2 = 1, two u and two v variables")
    # substitute u_i -> sum_m A1[m][i] u_m, v_j -> sum_m B1[m][j] v_m
    lin_u = [{(1, 0, 0, 0): A1[0][i], (0, 1, 0, 0): A1[1][i]} for i in range(2)]
    lin_v = [{(0, 0, 1, 0): B1[0][j], (0, 0, 0, 1): B1[1][j]} for j in range(2)]
    out: dict = {}
    for e, c in uvpoly.items():
        term = {(0, 0, 0, 0): c}
        for i in range(2):
            term = _uvpoly_mul(term, _uvpoly_pow(lin_u[i], e[i], 4))
            term = _uvpoly_mul(term, _uvpoly_pow(lin_v[i], e[2 + i], 4))
        for f, v in term.items():
            out[f] = out.get(f, 0) + v
    scal = Fraction(a2) ** P.weights.size_k * Fraction(b2) ** P.weights.size_l
    return {e: c * scal for e, c in out.items() if c}


def equivariance_check(P: DiffOpPoly, trials: int = 10, seed: int = 1) -> bool:
    """P(diag(A1,A2) T diag(tB1,tB2)) == (rho_1 (x) rho_2)(A, B) P(T) at random rational points."""
    n, n1 = P.n, P.n1
    rng = random.Random(seed)
    for _ in range(trials):
        T = [[_rand_rat(rng) for _ in range(n)] for _ in range(n)]
        A1 = [[_rand_rat(rng) for _ in range(n1)] for _ in range(n1)]
        B1 = [[_rand_rat(rng) for _ in range(n1)] for _ in range(n1)]
        a2 = _rand_rat(rng) or Fraction(2)
        b2 = _rand_rat(rng) or Fraction(3)
        if P.n2 != 1 and not P.weights.is_scalar:
            raise UnsupportedOperator("equivariance check implemented for n2 = 1")
        Ad = [[Fraction(0)] * n for _ in range(n)]
        Bd = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n1):
            for j in range(n1):
                Ad[i][j] = A1[i][j]
                Bd[i][j] = B1[i][j]
        for i in range(n1, n):
            Ad[i][i] = a2 if P.n2 == 1 else _rand_rat(rng) or Fraction(1)
            Bd[i][i] = b2 if P.n2 == 1 else _rand_rat(rng) or Fraction(1)
        # T' = Ad T tBd
        AT = [[sum(Ad[i][m] * T[m][j] for m in range(n)) for j in range(n)] for i in range(n)]
        Tp = [[sum(AT[i][m] * Bd[j][m] for m in range(n)) for j in range(n)] for i in range(n)]
        lhs = P.evaluate_generic(Tp).coeffs
        rhs = _rep_apply(P.evaluate_generic(T).coeffs, P, A1, B1, a2, b2)
        keys = set(lhs) | set(rhs)
        if any(lhs.get(k, 0) != rhs.get(k, 0) for k in keys):
            return False
    return True


def fast_eval_consistent(P: DiffOpPoly, trials: int = 3, seed: int = 2) -> bool:
    """The fast evaluator agrees with the expanded polynomial at random points."""
    if P.fast_eval is None:
        return True
    rng = random.Random(seed)
    for _ in range(trials):
        T = [[_rand_rat(rng) for _ in range(P.n)] for _ in range(P.n)]
        if P.evaluate(T).coeffs != P.evaluate_generic(T).coeffs:
            return False
    return True


# ----------------------------------------------- Eisenstein coefficients


def epsilon_n(n: int) -> int:
    return -1 if n % 4 == 2 else 1


def LL_F(n: int, mu: int, D: int, start: int = 0) -> Fraction:
    """prod_{i=start}^{n-1} L(1-mu+i, chi^i)."""
    chi = Character(D)
    out = Fraction(1)
    for i in range(start, n):
        out *= L_value_at(1 - mu + i, chi.power(i))
    return out


def _check_mu(n: int, mu: int):
    if mu < n or mu == n + 1:
        raise EisensteinError(f"need mu >= n and mu != n+1 (n={n}, mu={mu})")


def eis_coeff_nondeg(n: int, mu: int, S: HermitianMatrix, provider: FpProvider) -> Fraction:
    """A~_{n,mu}(S) = 2^n prod_{p in c} F_p(p^{mu-2n}; S) for S > 0."""
    _check_mu(n, mu)
    if S.n != n:
        raise EisensteinError("size mismatch")
    if is_psd(S) != PD:
        raise EisensteinError("eis_coeff_nondeg needs a positive definite S")
    val = Fraction(2**n)
    missing = []
    for p in relevant_primes(S):
        try:
            val *= fp_lookup(provider, S, p, mu)
        except MissingLocalDatum as exc:
            missing.extend(exc.keys)
    if missing:
        raise MissingLocalDatum(missing)
    return val


def eis_coeff_prop53_form(n: int, mu: int, S: HermitianMatrix, provider: FpProvider) -> Fraction:
    """LL_F(n, mu) times the Shimura form
    eps_n 2^n (D^{floor(n/2)} det S)^{mu-n} LL_F^{-1} prod_{p in c} F_p(p^{-mu}; S)."""
    _check_mu(n, mu)
    val = Fraction(epsilon_n(n) * 2**n) * Fraction(det_scaled(S)) ** (mu - n)
    for p in relevant_primes(S):
        if S.D % p and det_scaled(S) % p:
            continue
        F = provider.get(S, p)
        val *= F.poly(Fraction(1, p**mu))
    return val


def eis_coeff_any(n: int, mu: int, S: HermitianMatrix, provider: FpProvider) -> Fraction:
    """A~_{n,mu}(S) for psd S, via Phi-reduction to the non-degenerate core."""
    _check_mu(n, mu)
    st = is_psd(S)
    if st == PD:
        return eis_coeff_nondeg(n, mu, S, provider)
    if st != "psd-singular":
        raise EisensteinError("S is not positive semi-definite")
    _, Sp, r = radical_split(S)
    factor = LL_F(n, mu, S.D, start=r)
    if r == 0:
        return factor
    return factor * eis_coeff_nondeg(r, mu, Sp, provider)


# --------------------------------------------------------- pullback sums


@dataclass
class EpsilonCoefficient:
    S1: HermitianMatrix
    S2: HermitianMatrix
    value: CoeffVec
    terms: int
    mu: int

    def to_json(self) -> dict:
        return {
            "mu": self.mu,
            "S1": self.S1.to_json(),
            "S2": self.S2.to_json(),
            "completions": self.terms,
            "coefficients": self.value.to_json(),
        }


def _local_items(mats):
    """(core, p) pairs whose F_p values an A~ evaluation will request."""
    for S in mats:
        st = is_psd(S)
        if st != PD:
            if st != "psd-singular":
                continue
            _, S, r = radical_split(S)
            if r == 0:
                continue
        for p in relevant_primes(S):
            if S.D % p and det_scaled(S) % p:
                continue
            yield S, p


def pullback_coeff(
    mu: int,
    n1: int,
    n2: int,
    weights: WeightData,
    S1: HermitianMatrix,
    S2: HermitianMatrix,
    provider: FpProvider,
    P: DiffOpPoly | None = None,
    transpose: bool = False,
    workers: int = 1,
) -> EpsilonCoefficient:
    """epsilon_mu(1, 1; S1, S2) = sum_B P(S(B)) A~_{n,mu}(S(B)).

    ``transpose`` evaluates P at the transpose of S(B) instead (the single
    configuration point of the entry-ordering convention).  Local data that
    needs the oracle is resolved first (in parallel with ``workers`` > 1, in a
    fixed order), so the result does not depend on the worker count.
    """
    n = n1 + n2
    if not (mu > n + 2 or mu == n):
        raise EisensteinError("pullback needs mu > n + 2 or mu = n")
    if P is None:
        P = build_P(weights, n1, n2)
    total: dict = {}
    missing: dict = {}
    Bs = completions(S1, S2)
    provider.prefetch(_local_items(S1.block(B, S2) for B in Bs), workers)
    for B in Bs:
        S = S1.block(B, S2)
        try:
            a = eis_coeff_any(n, mu, S, provider)
        except MissingLocalDatum as exc:
            for k in exc.keys:
                missing[repr(k)] = k
            continue
        if a == 0:
            continue
        rows = S.rows
        T = [[rows[j][i] for j in range(n)] for i in range(n)] if transpose else rows
        pv = P.evaluate(T)
        for m, c in pv.coeffs.items():
            total[m] = total.get(m, 0) + c * a
    if missing:
        raise MissingLocalDatum(list(missing.values()), "unresolved local classes in the pullback sum")
    cv = CoeffVec((weights.size_k,), (weights.size_l,), P.nu, total)
    return EpsilonCoefficient(S1, S2, cv.rational(), len(Bs), mu)


def klingen_side_product(eps: EpsilonCoefficient, weights: WeightData, r: int, D: int, cusp_dim: int = 1) -> CoeffVec:
    """c_r C_{2 n1, mu}(f) A_[f](1, S1) A_[f](1, S2)-bar when the r-sum collapses.

    With eps computed from the normalized series E~_{n,mu} (n = n1 + n2), the
    single surviving term equals
        (sqrt(-1))^{-|rho_r|} * prod_{i=n}^{2 n1 - 1} L(1-mu+i, chi^i) * eps.
    """
    if cusp_dim != 1:
        raise UnsupportedOperator("the r-sum collapses only for one-dimensional cusp spaces")
    mu = weights.mu
    n1 = eps.S1.n
    n = n1 + eps.S2.n
    factor = LL_F(2 * n1, mu, D, start=n)
    if factor == 0:
        raise EisensteinError("vanishing L-factor: division refused")
    rho = weights.rho_size(r)
    if rho % 2:
        raise EisensteinError("odd |rho_r|")
    sign = (-1) ** ((rho // 2) % 2)
    return eps.value.scale(sign * factor)
