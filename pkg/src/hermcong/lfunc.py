"""High-precision L-values and Petersson norms of level-one eigenforms, and
exact reconstruction of the constants LL(s, f) and C_{n,mu}(f) for r = 1."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .arith import BigFloat, ScaledRat, rational_reconstruct
from .modform import QExpansion, eigenform, twist
from .quadfield import Character, LF_product, QuadField, bernoulli


class LFunctionError(RuntimeError):
    pass


class PeterssonMismatch(LFunctionError):
    pass


@dataclass(frozen=True)
class LDatum:
    """Dirichlet coefficients a(1..N) of a weight-k newform of the given level."""

    coeffs: tuple  # a(0..N) as ints
    weight: int
    level: int
    root_number: int
    digits: int = 50

    @staticmethod
    def from_form(f: QExpansion, digits: int = 50) -> "LDatum":
        k = f.weight
        eps = (-1) ** (k // 2)
        if f.level != 1:
            chi = f.character
            # epsilon(f (x) chi) = epsilon(f) chi(-1)^? tau(chi)^2 / q; for real chi, tau(chi)^2 = chi(-1) q
            eps = eps * chi(-1)
        return LDatum(tuple(int(c) for c in f.coeffs), k, f.level, eps, digits)

    def deligne_ok(self, upto: int = 200) -> bool:
        k = self.weight
        for n in range(1, min(upto, len(self.coeffs) - 1) + 1):
            d = sum(1 for m in range(1, n + 1) if n % m == 0)
            if abs(self.coeffs[n]) > d * mpmath.mpf(n) ** (mpmath.mpf(k - 1) / 2) * (1 + mpmath.mpf(10) ** -20):
                return False
        return True


def _term(a_n, n, s, k, A, eps, t):
    """n-th term of the approximate functional equation of Lambda(s) with split t."""
    x = 2 * mpmath.pi * n / A
    return a_n * (
        (A / (2 * mpmath.pi * n)) ** s * mpmath.gammainc(s, x * t)
        + eps * (A / (2 * mpmath.pi * n)) ** (k - s) * mpmath.gammainc(k - s, x / t)
    )


def _tail_bound(n, s, k, A, t):
    a = 2 * mpmath.sqrt(n) * mpmath.mpf(n) ** (mpmath.mpf(k - 1) / 2)
    return abs(_term(a, n, s, k, A, 1, t)) + abs(_term(a, n, s, k, A, -1, t))


def completed_L(L: LDatum, s, t=1) -> BigFloat:
    """Lambda(s) = (sqrt(N)/2pi)^s Gamma(s) L(s) with a certified truncation bound."""
    k = L.weight
    A = mpmath.sqrt(L.level)
    tol = mpmath.mpf(10) ** (-(L.digits + 15))
    total = mpmath.mpf(0)
    n = 1
    while True:
        if n >= len(L.coeffs):
            raise LFunctionError(f"insufficient truncation: need more than {len(L.coeffs) - 1} coefficients")
        if L.coeffs[n]:
            total += _term(L.coeffs[n], n, s, k, A, L.root_number, t)
        if n > 5 and _tail_bound(n + 1, s, k, A, t) < tol:
            break
        n += 1
    # tail: geometric decay; bound by summing bounds for the next 40 terms and doubling
    tail = sum(_tail_bound(m, s, k, A, t) for m in range(n + 1, n + 41)) * 2
    if n + 41 >= len(L.coeffs) + 1000:
        raise LFunctionError("insufficient truncation")
    return BigFloat(total, tail + abs(total) * mpmath.mpf(10) ** (-(L.digits + 15)))


def lvalue(L: LDatum, s) -> BigFloat:
    """L(s) for s in the critical strip, with error bound; self-checks the functional equation."""
    with mpmath.workdps(L.digits + 25):
        s = mpmath.mpf(s)
        lam = completed_L(L, s, 1)
        lam2 = completed_L(L, s, mpmath.mpf(11) / 10)
        if abs(lam.value - lam2.value) > 10 * (lam.err + lam2.err) + mpmath.mpf(10) ** (-(L.digits + 5)):
            raise LFunctionError(
                f"functional-equation self-check failed (residual {mpmath.nstr(abs(lam.value - lam2.value), 5)}): wrong root number or coefficients"
            )
        A = mpmath.sqrt(L.level)
        factor = (A / (2 * mpmath.pi)) ** s * mpmath.gamma(s)
        val = lam.value / factor
        err = (lam.err + abs(lam.value - lam2.value)) / factor
        return BigFloat(+val, err)


def fe_residual(L: LDatum, s) -> mpmath.mpf:
    """|Lambda(s) computed with split t=1 minus Lambda(s) computed with split t=1.1|."""
    with mpmath.workdps(L.digits + 25):
        a = completed_L(L, mpmath.mpf(s), 1)
        b = completed_L(L, mpmath.mpf(s), mpmath.mpf(11) / 10)
        return abs(a.value - b.value)


# ---------------------------------------------------------------- Petersson


def _petersson_direct(f: QExpansion, digits: int) -> BigFloat:
    """(f,f) = int_F |f|^2 y^{k-2} dx dy over the standard fundamental domain.

    The y-integral is done in closed form term by term (upper incomplete gamma);
    the remaining x-integral over [-1/2, 1/2] is computed by Gauss-Legendre
    quadrature at two degrees, whose difference bounds the error.
    """
    k = f.weight
    with mpmath.workdps(digits + 20):
        tol = mpmath.mpf(10) ** (-(digits + 15))
        # truncation: every dropped pair (m, n) has m + n >= M + 2; |a_m| <= m^{k/2}
        M = 2
        while True:
            Nn = M + 2
            bound = mpmath.mpf(4 * M) ** (k + 2) * mpmath.gammainc(k - 1, 2 * mpmath.pi * Nn * mpmath.sqrt(3) / 2) / (
                2 * mpmath.pi * Nn
            ) ** (k - 1)
            if bound < tol:
                break
            M += 1
        if M > f.N:
            raise LFunctionError("insufficient q-expansion for Petersson integration")
        a = [mpmath.mpf(int(f.a(m))) for m in range(M + 1)]
        pref = [mpmath.mpf(0)] + [1 / (2 * mpmath.pi * N) ** (k - 1) for N in range(1, 2 * M + 1)]

        def integrand(x):
            y0 = mpmath.sqrt(1 - x * x)
            G = [mpmath.mpf(0)] + [pref[N] * mpmath.gammainc(k - 1, 2 * mpmath.pi * N * y0) for N in range(1, 2 * M + 1)]
            c = [mpmath.cos(2 * mpmath.pi * j * x) for j in range(M)]
            tot = mpmath.mpf(0)
            for m in range(1, M + 1):
                for n in range(1, M + 1):
                    tot += a[m] * a[n] * c[abs(m - n)] * G[m + n]
            return tot

        # integrand is even in x
        def gl(deg):
            nodes = _gauss_legendre(deg)
            h = mpmath.mpf(1) / 4  # map [-1,1] -> [0,1/2]
            return 2 * sum(w * integrand(h * (u + 1)) for u, w in nodes) * h

        d1 = max(40, digits) + 2 * M
        v1 = gl(d1)
        v2 = gl(d1 + d1 // 2)
        err = abs(v1 - v2) + abs(v2) * mpmath.mpf(10) ** (-(digits + 15))
        return BigFloat(+v2, err)


def _gauss_legendre(deg: int):
    """Nodes and weights of degree-deg Gauss-Legendre quadrature on [-1,1]."""
    nodes = []
    for i in range(1, deg + 1):
        x = mpmath.cos(mpmath.pi * (i - mpmath.mpf(1) / 4) / (deg + mpmath.mpf(1) / 2))
        for _ in range(100):
            p0, p1 = mpmath.mpf(1), x
            for j in range(2, deg + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = deg * (x * p1 - p0) / (x * x - 1)
            dx = p1 / dp
            x -= dx
            if abs(dx) < mpmath.mpf(10) ** (-mpmath.mp.dps + 3):
                break
        p0, p1 = mpmath.mpf(1), x
        for j in range(2, deg + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        dp = deg * (x * p1 - p0) / (x * x - 1)
        nodes.append((x, 2 / ((1 - x * x) * dp * dp)))
    return nodes


def _petersson_rankin(f: QExpansion, digits: int, k1: int = 4) -> BigFloat:
    """(f,f) from the Rankin unfolding of <f, E_{k1} E_{k2}> with k1 + k2 = k.

    <f, E_{k1}E_{k2}> = Gamma(k-1)/(4 pi)^{k-1} c_{k1} L(f,k-1) L(f,k2)/zeta(k2)
    and E_{k1}E_{k2} = E_k + lambda f with lambda = c_{k1} + c_{k2} - c_k,
    where c_j = -2j/B_j.
    """
    k = f.weight
    k2 = k - k1
    if k1 < 4 or k2 < 4 or k1 % 2 or k2 % 2:
        raise ValueError("need even k1, k2 >= 4")
    c = lambda j: Fraction(-2 * j) / bernoulli(j)  # noqa: E731
    lam = c(k1) + c(k2) - c(k)
    if lam == 0:
        raise LFunctionError("E_k1 E_k2 has no cusp component")
    L = LDatum.from_form(f, digits + 10)
    with mpmath.workdps(digits + 20):
        L1 = lvalue(L, k - 1)
        L2 = lvalue(L, k2)
        ck1 = c(k1)
        pref = mpmath.gamma(k - 1) / (4 * mpmath.pi) ** (k - 1) * mpmath.mpf(ck1.numerator) / ck1.denominator
        z = mpmath.zeta(k2)
        num = L1 * L2 * BigFloat(pref, abs(pref) * mpmath.mpf(10) ** (-(digits + 18)))
        den = BigFloat(z * mpmath.mpf(lam.numerator) / lam.denominator, abs(z) * mpmath.mpf(10) ** (-(digits + 18)))
        return num / den


@dataclass(frozen=True)
class PeterssonResult:
    value: BigFloat
    direct: BigFloat
    rankin: BigFloat
    agree_digits: float


def petersson_norm(f: QExpansion, digits: int = 50) -> PeterssonResult:
    """(f,f) by direct integration and by the Rankin-Zagier identity; they must agree to digits-10 digits."""
    a = _petersson_direct(f, digits)
    b = _petersson_rankin(f, digits)
    with mpmath.workdps(digits + 20):
        diff = abs(a.value - b.value)
        agree = float(-mpmath.log10(diff / abs(a.value))) if diff else float(digits + 20)
        if agree < digits - 10:
            raise PeterssonMismatch(f"Petersson methods agree to only {agree:.1f} digits (< {digits - 10})")
        err = max(a.err, b.err) + diff
        return PeterssonResult(BigFloat(+b.value, err), a, b, agree)


# ------------------------------------------------------------ LL and C exact


def gamma_C(s: int) -> ScaledRat:
    """Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s) at a positive integer s."""
    if s < 1 or int(s) != s:
        raise ValueError("gamma_C needs a positive integer argument here")
    from math import factorial

    return ScaledRat(Fraction(2) * Fraction(1, 2) ** s * factorial(s - 1), -s, 0)


@dataclass(frozen=True)
class ExactLPackage:
    LL_value: Fraction
    C_value: Fraction
    inputs: dict
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from .arith import rat_str

        return {"LL": rat_str(self.LL_value), "C": rat_str(self.C_value), "inputs": self.inputs, "provenance": self.provenance}


# sqrt(D) convention in LL(s,f): D^{+1/2} (definition) or D^{-1/2} (worked display); see notes.
SQRT_D_SIGN = -1


def bbL_exact(
    weight: int,
    s0: Fraction,
    mu: int,
    K: QuadField,
    k_wt=(0,),
    l_wt=(0,),
    digits: int = 50,
    terms: int = 400,
    max_den: int = 10**20,
    guard_digits: int = 10,
    n_for_C: int | None = None,
) -> ExactLPackage:
    """Exact LL(s0, f) (r = 1) and, if n_for_C is given, C_{n,mu}(f) = LL_F(n,mu)/LL_F(2,mu) LL(s0,f)."""
    r = 1
    f = eigenform(weight, terms)
    s0 = Fraction(s0)
    k1 = k_wt[0] if k_wt else 0
    l1 = l_wt[0] if l_wt else 0
    # Gamma_C arguments s + mu/2 + k_j - j + 1/2 and s + mu/2 + l_j + r - j - 1/2 at j = 1
    a1 = s0 + Fraction(mu, 2) + k1 - 1 + Fraction(1, 2)
    a2 = s0 + Fraction(mu, 2) + l1 + r - 1 - Fraction(1, 2)
    if a1.denominator != 1 or a2.denominator != 1:
        raise LFunctionError("Gamma_C arguments are not integers")
    m = s0 + Fraction(weight - 1, 2)  # classical argument of L(s, f) L(s, f x chi)
    if m.denominator != 1 or not (0 < m < weight):
        raise LFunctionError(f"classical argument {m} is not critical")
    m = int(m)
    chi = Character(K.D)
    Lf = LDatum.from_form(f, digits + 10)
    Lg = LDatum.from_form(twist(f, chi), digits + 10)
    with mpmath.workdps(digits + 25):
        v1 = lvalue(Lf, m)
        v2 = lvalue(Lg, m)
        pet = petersson_norm(f, digits)
        ratio = v1 * v2 / pet.value
        # period relation: L(m,f) L(m,f x chi)/(f,f) = rational * pi^{2m} * sqrt(D)
        period = ScaledRat(Fraction(1), 2 * m, 1, K.D)
        ledger = ScaledRat(Fraction(1), 0, SQRT_D_SIGN * r, K.D) * gamma_C(int(a1)) * gamma_C(int(a2)) * period
        ledger = ScaledRat(ledger.r, ledger.pi_pow, ledger.sqrtD_pow, K.D)
        if not ledger.is_rational():
            raise LFunctionError(f"pi/sqrt(D) exponents do not cancel: {ledger.ledger()}")
        scale = mpmath.pi ** (2 * m) * mpmath.sqrt(K.D)
        unknown = ratio / BigFloat(scale, abs(scale) * mpmath.mpf(10) ** (-(digits + 20)))
        LL_float = unknown * BigFloat.exact(ledger.to_rat())
        LL = rational_reconstruct(LL_float, max_den, guard_digits)
        # re-evaluation check
        if not LL_float.contains(LL):
            raise LFunctionError("reconstructed rational does not re-evaluate inside the error ball")
    prov = {
        "digits": digits,
        "guard_digits": guard_digits,
        "max_den": str(max_den),
        "L_args": [m, m],
        "gamma_C_args": [int(a1), int(a2)],
        "petersson_agreement_digits": round(pet.agree_digits, 1),
        "LL_rel_digits": round(LL_float.rel_digits(), 1),
        "sqrtD_convention": "D^(-r/2)" if SQRT_D_SIGN < 0 else "D^(+r/2)",
    }
    C = None
    if n_for_C is not None:
        C = LF_product(n_for_C, mu, K) / LF_product(2 * r, mu, K) * LL
    inputs = {"weight": weight, "s0": str(s0), "mu": mu, "r": r, "D": K.D, "k": list(k_wt), "l": list(l_wt), "n": n_for_C}
    return ExactLPackage(LL, C if C is not None else Fraction(0), inputs, prov)
