"""Exact scalars, valuations, polynomials, combinatorial coefficients and
rational reconstruction.

Rationals are :class:`fractions.Fraction` (aliased as :data:`Rat`).  Numeric
values carrying a certified absolute error are :class:`BigFloat`, backed by
``mpmath``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath

Rat = Fraction
INF = math.inf


def to_rat(x) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def rat_str(x: Fraction) -> str:
    """Serialize a rational as "num/den" (denominator always present)."""
    x = to_rat(x)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------- valuations


def vp_int(x: int, p: int) -> float | int:
    """p-adic valuation of an integer; +inf for 0."""
    if x == 0:
        return INF
    x = abs(x)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def valuation_rat(x, p: int) -> float | int:
    """v_p of a rational number; +inf for 0."""
    if p < 2:
        raise ValueError("p must be a prime")
    x = to_rat(x)
    if x == 0:
        return INF
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization of a non-zero integer (absolute value)."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return factorize(n) == {n: 1}


def primes_upto(n: int) -> list[int]:
    sieve = bytearray([1]) * (n + 1)
    sieve[:2] = b"\x00\x00"[: min(2, n + 1)]
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(n + 1) if sieve[i]]


def factor_rat_str(x) -> str:
    """Human-readable signed factorization, e.g. '-2^24*41/(3^15*5*19)'."""
    x = to_rat(x)
    if x == 0:
        return "0"

    def part(n: int) -> str:
        if n == 1:
            return "1"
        f = factorize(n)
        return "*".join(f"{p}^{e}" if e > 1 else f"{p}" for p, e in sorted(f.items()))

    sign = "-" if x < 0 else ""
    num = part(abs(x.numerator))
    if x.denominator == 1:
        return sign + num
    return f"{sign}{num}/({part(x.denominator)})"


# -------------------------------------------------------------- combinatorics


def qbinom(s: int, t: int, q) -> Fraction:
    """Gaussian binomial [s choose t]_q = prod_{k=1..t} (q^{s-k+1}-1)/(q^k-1)."""
    if t < 0 or t > s:
        raise ValueError(f"qbinom needs 0 <= t <= s, got s={s}, t={t}")
    q = to_rat(q)
    num = Fraction(1)
    den = Fraction(1)
    for k in range(1, t + 1):
        num *= q ** (s - k + 1) - 1
        den *= q**k - 1
    if den == 0:
        # q = 1: ordinary binomial coefficient (limit)
        return Fraction(math.comb(s, t))
    return num / den


def pochhammer(x, r: int, direction: str = "asc") -> Fraction:
    """Ascending (x)^{(r)} = x(x+1)...(x+r-1) or descending (x)_{(r)} = x(x-1)...(x-r+1)."""
    if r < 0:
        raise ValueError("pochhammer needs r >= 0")
    if direction not in ("asc", "desc"):
        raise ValueError("direction must be 'asc' or 'desc'")
    x = to_rat(x)
    step = 1 if direction == "asc" else -1
    out = Fraction(1)
    for i in range(r):
        out *= x + step * i
    return out


# ------------------------------------------------------------------ ScaledRat


@dataclass(frozen=True)
class ScaledRat:
    """r * pi^pi_pow * D^(sqrtD_pow/2), kept symbolic in pi and sqrt(D)."""

    r: Fraction
    pi_pow: int = 0
    sqrtD_pow: int = 0
    D: int = 1

    def __post_init__(self):
        object.__setattr__(self, "r", to_rat(self.r))

    def _check(self, other: "ScaledRat"):
        if self.D != other.D and self.sqrtD_pow and other.sqrtD_pow:
            raise ValueError("ScaledRat values over different D")

    def __mul__(self, other):
        if not isinstance(other, ScaledRat):
            return ScaledRat(self.r * to_rat(other), self.pi_pow, self.sqrtD_pow, self.D)
        self._check(other)
        D = self.D if self.sqrtD_pow else other.D
        return ScaledRat(self.r * other.r, self.pi_pow + other.pi_pow, self.sqrtD_pow + other.sqrtD_pow, D)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ScaledRat):
            return ScaledRat(self.r / to_rat(other), self.pi_pow, self.sqrtD_pow, self.D)
        self._check(other)
        D = self.D if self.sqrtD_pow else other.D
        return ScaledRat(self.r / other.r, self.pi_pow - other.pi_pow, self.sqrtD_pow - other.sqrtD_pow, D)

    def __rtruediv__(self, other):
        return ScaledRat(to_rat(other)) / self

    def __pow__(self, e: int):
        return ScaledRat(self.r**e, self.pi_pow * e, self.sqrtD_pow * e, self.D)

    def __neg__(self):
        return ScaledRat(-self.r, self.pi_pow, self.sqrtD_pow, self.D)

    def normalized(self) -> "ScaledRat":
        """Fold even powers of sqrt(D) into the rational part (sqrtD_pow in {0,1})."""
        k, rem = divmod(self.sqrtD_pow, 2)
        return ScaledRat(self.r * Fraction(self.D) ** k, self.pi_pow, rem, self.D)

    def is_rational(self) -> bool:
        n = self.normalized()
        return n.pi_pow == 0 and n.sqrtD_pow == 0

    def to_rat(self) -> Fraction:
        n = self.normalized()
        if n.pi_pow != 0 or n.sqrtD_pow != 0:
            raise ValueError(
                f"pi/sqrt(D) exponents do not cancel (pi^{n.pi_pow}, sqrtD^{n.sqrtD_pow}): normalization bug"
            )
        return n.r

    def to_mpf(self):
        return mpmath.mpf(self.r.numerator) / self.r.denominator * mpmath.pi**self.pi_pow * mpmath.sqrt(self.D) ** self.sqrtD_pow

    def ledger(self) -> dict:
        n = self.normalized()
        return {"rational": rat_str(n.r), "pi_pow": n.pi_pow, "sqrtD_pow": n.sqrtD_pow, "D": self.D}


# ------------------------------------------------------------------- BigFloat


@dataclass(frozen=True)
class BigFloat:
    """A numeric value with a conservative absolute error bound."""

    value: mpmath.mpf
    err: mpmath.mpf

    @staticmethod
    def exact(x) -> "BigFloat":
        if isinstance(x, Fraction):
            return BigFloat(mpmath.mpf(x.numerator) / x.denominator, _ulp(mpmath.mpf(x.numerator) / x.denominator))
        v = mpmath.mpf(x)
        return BigFloat(v, _ulp(v))

    def __add__(self, o):
        o = _bf(o)
        v = self.value + o.value
        return BigFloat(v, self.err + o.err + _ulp(v))

    def __sub__(self, o):
        o = _bf(o)
        v = self.value - o.value
        return BigFloat(v, self.err + o.err + _ulp(v))

    def __mul__(self, o):
        o = _bf(o)
        v = self.value * o.value
        e = abs(self.value) * o.err + abs(o.value) * self.err + self.err * o.err + _ulp(v)
        return BigFloat(v, e)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _bf(o)
        if abs(o.value) <= o.err:
            raise ZeroDivisionError("divisor interval contains 0")
        v = self.value / o.value
        denom_lo = abs(o.value) - o.err
        e = (self.err + abs(v) * o.err) / denom_lo + _ulp(v)
        return BigFloat(v, e)

    def __neg__(self):
        return BigFloat(-self.value, self.err)

    def __pow__(self, k: int):
        out = BigFloat.exact(1)
        base = self if k >= 0 else BigFloat.exact(1) / self
        for _ in range(abs(k)):
            out = out * base
        return out

    def rel_digits(self) -> float:
        if self.err == 0:
            return float("inf")
        if self.value == 0:
            return 0.0
        return float(mpmath.log10(abs(self.value) / self.err))

    def contains(self, x: Fraction) -> bool:
        xv = mpmath.mpf(x.numerator) / x.denominator
        return abs(xv - self.value) <= self.err


def _ulp(v) -> mpmath.mpf:
    if v == 0:
        return mpmath.mpf(2) ** (-mpmath.mp.prec)
    return abs(v) * mpmath.mpf(2) ** (1 - mpmath.mp.prec)


def _bf(x) -> BigFloat:
    return x if isinstance(x, BigFloat) else BigFloat.exact(x)


def mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_  # man_exp drops the sign
    man = -int(man) if sign else int(man)
    if exp >= 0:
        return Fraction(man << int(exp))
    return Fraction(man, 1 << int(-exp))


class InsufficientPrecision(ArithmeticError):
    """Rational reconstruction could not certify a unique answer."""


def _convergents(x: Fraction) -> Iterable[Fraction]:
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    num, den = x.numerator, x.denominator
    while den:
        a, r = divmod(num, den)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield Fraction(h1, k1)
        num, den = den, r


def rational_reconstruct(x: BigFloat, max_den: int, guard_digits: int = 10) -> Fraction:
    """The unique rational of denominator <= max_den inside the error ball of x.

    Accepted only when (i) the candidate lies in the ball, (ii) the ball is
    small enough that no second rational of denominator <= max_den can lie
    in it, and (iii) the next continued-fraction convergent has denominator
    at least max_den * 10^guard_digits.  Otherwise raises InsufficientPrecision.
    """
    if guard_digits < 10:
        raise ValueError("guard_digits must be >= 10")
    mid = mpf_to_fraction(x.value)
    err = mpf_to_fraction(x.err)
    convs = list(_convergents(mid))
    for i, c in enumerate(convs):
        if c.denominator > max_den:
            break
        if abs(mid - c) <= err:
            q = c.denominator
            if 2 * err * q * max_den >= 1:
                raise InsufficientPrecision(
                    f"error ball {float(err):.3g} too large to separate rationals of denominator <= {max_den}"
                )
            if i + 1 < len(convs):
                q_next = convs[i + 1].denominator
                if q_next < max_den * 10**guard_digits:
                    raise InsufficientPrecision("guard-digit margin not met")
            return c
    raise InsufficientPrecision(f"no rational with denominator <= {max_den} within the error ball")


# ---------------------------------------------------------------------- PolyX


@dataclass(frozen=True)
class PolyX:
    """Univariate polynomial with rational coefficients, ascending degree."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = [to_rat(a) for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @staticmethod
    def of(*cs) -> "PolyX":
        return PolyX(tuple(cs))

    @property
    def degree(self) -> float | int:
        return len(self.coeffs) - 1 if self.coeffs else -INF

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __add__(self, o: "PolyX") -> "PolyX":
        n = max(len(self.coeffs), len(o.coeffs))
        return PolyX(tuple(self[i] + o[i] for i in range(n)))

    def __sub__(self, o: "PolyX") -> "PolyX":
        n = max(len(self.coeffs), len(o.coeffs))
        return PolyX(tuple(self[i] - o[i] for i in range(n)))

    def __mul__(self, o) -> "PolyX":
        if not isinstance(o, PolyX):
            return PolyX(tuple(a * to_rat(o) for a in self.coeffs))
        if not self.coeffs or not o.coeffs:
            return PolyX(())
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    out[i + j] += a * b
        return PolyX(tuple(out))

    __rmul__ = __mul__

    def divmod(self, o: "PolyX") -> tuple["PolyX", "PolyX"]:
        if not o.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(o.coeffs)
        if dq < 0:
            return PolyX(()), self
        quo = [Fraction(0)] * (dq + 1)
        lead = o.coeffs[-1]
        for k in range(dq, -1, -1):
            c = rem[k + len(o.coeffs) - 1] / lead
            quo[k] = c
            if c:
                for j, b in enumerate(o.coeffs):
                    rem[k + j] -= c * b
        return PolyX(tuple(quo)), PolyX(tuple(rem))

    def exact_div(self, o: "PolyX") -> "PolyX":
        q, r = self.divmod(o)
        if r.coeffs:
            raise ArithmeticError("non-exact polynomial division")
        return q

    def __call__(self, x) -> Fraction:
        x = to_rat(x)
        acc = Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def scale_var(self, c) -> "PolyX":
        """The polynomial X -> P(c X)."""
        c = to_rat(c)
        return PolyX(tuple(a * c**i for i, a in enumerate(self.coeffs)))

    def truncate(self, n: int) -> "PolyX":
        return PolyX(self.coeffs[:n])

    def to_json(self) -> list[str]:
        return [rat_str(a) for a in self.coeffs]

    @staticmethod
    def from_json(cs: Sequence) -> "PolyX":
        return PolyX(tuple(to_rat(c) if not isinstance(c, int) else Fraction(c) for c in cs))

    def __repr__(self) -> str:
        terms = []
        for i, a in enumerate(self.coeffs):
            if a:
                terms.append(f"{a}" + ("" if i == 0 else ("*X" if i == 1 else f"*X^{i}")))
        return "PolyX(" + (" + ".join(terms) or "0") + ")"


def series_inverse_mul(num: Sequence, den: Sequence, n: int) -> list[Fraction]:
    """First n coefficients of num/den as power series (den[0] != 0)."""
    num = [to_rat(a) for a in num]
    den = [to_rat(a) for a in den]
    out: list[Fraction] = []
    for k in range(n):
        s = num[k] if k < len(num) else Fraction(0)
        for i in range(max(0, k - len(den) + 1), k):
            s -= den[k - i] * out[i]
        out.append(s / den[0])
    return out


# ------------------------------------------------------------------- CoeffVec

Monomial = tuple  # (exponents of u_1..u_a, exponents of v_1..v_b)


@dataclass(frozen=True)
class CoeffVec:
    """Element of Q[U,V]_(k,l): a bihomogeneous polynomial in (u, v) variables.

    ``coeffs`` maps a monomial exponent tuple (u-exponents + v-exponents) to a
    coefficient (Fraction, or an element of K exposing ``is_rational`` and
    ``rational``).  ``nu`` is the number of u-variables.
    """

    weight_k: tuple
    weight_l: tuple
    nu: int
    coeffs: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {m: c for m, c in self.coeffs.items() if c != 0}
        du, dv = sum(self.weight_k), sum(self.weight_l)
        for m in clean:
            if sum(m[: self.nu]) != du or sum(m[self.nu :]) != dv:
                raise ValueError(f"monomial {m} is not of bidegree ({du},{dv})")
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    def scale(self, c) -> "CoeffVec":
        return CoeffVec(self.weight_k, self.weight_l, self.nu, {m: a * c for m, a in self.coeffs.items()})

    def __add__(self, o: "CoeffVec") -> "CoeffVec":
        out = dict(self.coeffs)
        for m, a in o.coeffs.items():
            out[m] = out.get(m, 0) + a
        return CoeffVec(self.weight_k, self.weight_l, self.nu, out)

    def rational(self) -> "CoeffVec":
        """Convert K-valued coefficients to Fractions, asserting they are rational."""
        out = {}
        for m, a in self.coeffs.items():
            if isinstance(a, (int, Fraction)):
                out[m] = to_rat(a)
            elif a.is_rational():
                out[m] = a.rational()
            else:
                raise ValueError(f"coefficient of {m} is not rational: {a}")
        return CoeffVec(self.weight_k, self.weight_l, self.nu, out)

    def monomial_name(self, m: Monomial) -> str:
        parts = []
        for i, e in enumerate(m):
            var = f"u{i + 1}" if i < self.nu else f"v{i - self.nu + 1}"
            if e == 1:
                parts.append(var)
            elif e > 1:
                parts.append(f"{var}^{e}")
        return "*".join(parts) or "1"

    def to_json(self) -> dict:
        return {self.monomial_name(m): rat_str(a) for m, a in self.rational().coeffs.items()}


def valuation_vec(v: CoeffVec, p: int) -> float | int:
    """Minimum p-adic valuation over the monomial-basis coefficients."""
    r = v.rational()
    if not r.coeffs:
        return INF
    return min(valuation_rat(a, p) for a in r.coeffs.values())
