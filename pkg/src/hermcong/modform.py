"""Level-one elliptic modular forms as exact q-expansions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .quadfield import Character, bernoulli

SUPPORTED_EIGEN_WEIGHTS = (12, 16, 18, 20, 22, 26)
DEFAULT_TERMS = 10_000


class UnsupportedWeight(ValueError):
    pass


def _offset(nbytes: int, count: int) -> int:
    half = 1 << (8 * nbytes - 1)
    return int.from_bytes(half.to_bytes(nbytes, "little") * count, "little")


def _pack(coeffs: Sequence[int], nbytes: int) -> int:
    """sum c_i 2^{8 nbytes i} for signed c_i with |c_i| < 2^{8 nbytes - 1} (linear time)."""
    half = 1 << (8 * nbytes - 1)
    raw = b"".join((c + half).to_bytes(nbytes, "little") for c in coeffs)
    return int.from_bytes(raw, "little") - _offset(nbytes, len(coeffs))


def _unpack(x: int, nbytes: int, n: int, total: int) -> list[int]:
    """Signed base-2^{8 nbytes} digits 0..n-1 of x, which has at most `total` digits."""
    half = 1 << (8 * nbytes - 1)
    raw = (x + _offset(nbytes, total)).to_bytes(nbytes * total + 1, "little")
    return [int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") - half for i in range(n)]


def mul_series(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """Product of two integer power series truncated to n terms (Kronecker substitution)."""
    a = list(a[:n])
    b = list(b[:n])
    if not a or not b:
        return [0] * n
    bound = max(1, max(abs(x) for x in a)) * max(1, max(abs(x) for x in b)) * min(len(a), len(b))
    nbytes = (bound.bit_length() + 2) // 8 + 1
    prod = _pack(a, nbytes) * _pack(b, nbytes)
    out = _unpack(prod, nbytes, min(n, len(a) + len(b) - 1), len(a) + len(b))
    return out + [0] * (n - len(out))


@dataclass(frozen=True)
class QExpansion:
    """sum_{m=0}^{N} a(m) q^m, with rational coefficients stored as a common-denominator integer list."""

    weight: int
    coeffs: tuple  # of Fraction
    level: int = 1
    character: Character = Character(None)

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def a(self, m: int) -> Fraction:
        if m > self.N:
            raise IndexError(f"coefficient {m} beyond truncation {self.N}")
        return self.coeffs[m]

    def __mul__(self, o: "QExpansion") -> "QExpansion":
        n = min(len(self.coeffs), len(o.coeffs))
        da = _common_den(self.coeffs)
        db = _common_den(o.coeffs)
        ia = [int(c * da) for c in self.coeffs[:n]]
        ib = [int(c * db) for c in o.coeffs[:n]]
        prod = mul_series(ia, ib, n)
        return QExpansion(self.weight + o.weight, tuple(Fraction(c, da * db) for c in prod))

    def __add__(self, o: "QExpansion") -> "QExpansion":
        if self.weight != o.weight:
            raise ValueError("adding forms of different weight")
        n = min(len(self.coeffs), len(o.coeffs))
        return QExpansion(self.weight, tuple(self.coeffs[i] + o.coeffs[i] for i in range(n)))

    def __sub__(self, o: "QExpansion") -> "QExpansion":
        return self + o.scale(-1)

    def scale(self, c) -> "QExpansion":
        c = Fraction(c)
        return QExpansion(self.weight, tuple(x * c for x in self.coeffs), self.level, self.character)

    def int_coeffs(self) -> list[int]:
        if any(c.denominator != 1 for c in self.coeffs):
            raise ValueError("non-integral coefficients")
        return [int(c) for c in self.coeffs]

    def to_json(self) -> dict:
        return {
            "weight": self.weight,
            "level": self.level,
            "character": self.character.label(),
            "terms": self.N,
            "coefficients": [f"{c.numerator}/{c.denominator}" for c in self.coeffs],
        }


def _common_den(cs) -> int:
    from math import lcm

    d = 1
    for c in cs:
        d = lcm(d, c.denominator)
    return d


def divisor_sigma_table(r: int, N: int) -> list[int]:
    sig = [0] * (N + 1)
    for d in range(1, N + 1):
        dr = d**r
        for m in range(d, N + 1, d):
            sig[m] += dr
    return sig


def eisenstein_qexp(k: int, N: int) -> QExpansion:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n."""
    if k < 4 or k % 2:
        raise ValueError("eisenstein_qexp needs even k >= 4")
    c = Fraction(-2 * k) / bernoulli(k)
    sig = divisor_sigma_table(k - 1, N)
    return QExpansion(k, (Fraction(1),) + tuple(c * sig[m] for m in range(1, N + 1)))


def _eis_int(k: int, N: int) -> list[int]:
    c = Fraction(-2 * k) / bernoulli(k)
    if c.denominator != 1:
        raise ValueError("E_k has non-integral coefficients")
    sig = divisor_sigma_table(k - 1, N)
    return [1] + [int(c) * sig[m] for m in range(1, N + 1)]


def delta_qexp(N: int) -> QExpansion:
    """Delta = (E_4^3 - E_6^2)/1728."""
    n = N + 1
    e4 = _eis_int(4, N)
    e6 = _eis_int(6, N)
    num = [a - b for a, b in zip(mul_series(mul_series(e4, e4, n), e4, n), mul_series(e6, e6, n))]
    if any(x % 1728 for x in num):
        raise ArithmeticError("E_4^3 - E_6^2 not divisible by 1728")
    return QExpansion(12, tuple(Fraction(x // 1728) for x in num))


def delta_eta_product(N: int) -> list[int]:
    """Delta = q prod (1-q^n)^24 via Jacobi's identity prod(1-q^n)^3 = sum (-1)^k (2k+1) q^{k(k+1)/2}."""
    eta3 = [0] * N
    k = 0
    while k * (k + 1) // 2 < N:
        eta3[k * (k + 1) // 2] += (-1) ** k * (2 * k + 1)
        k += 1
    s = eta3
    for _ in range(3):
        s = mul_series(s, s, N)
    return [0] + s[: N]


_EIGEN_RECIPE = {12: (0, 0), 16: (1, 0), 18: (0, 1), 20: (2, 0), 22: (1, 1), 26: (2, 1)}


def eigenform(k: int, N: int = DEFAULT_TERMS) -> QExpansion:
    """The normalized generator of the one-dimensional space S_k(SL_2(Z))."""
    if k not in _EIGEN_RECIPE:
        raise UnsupportedWeight(f"dim S_{k} != 1 (supported weights {SUPPORTED_EIGEN_WEIGHTS})")
    e4, e6 = _EIGEN_RECIPE[k]
    n = N + 1
    f = [int(c) for c in delta_qexp(N).coeffs]
    for _ in range(e4):
        f = mul_series(f, _eis_int(4, N), n)
    for _ in range(e6):
        f = mul_series(f, _eis_int(6, N), n)
    return QExpansion(k, tuple(Fraction(c) for c in f))


def twist(f: QExpansion, chi: Character) -> QExpansion:
    """f (x) chi: a(n) -> chi(n) a(n); level D^2."""
    cs = tuple(f.coeffs[m] * chi(m) if m else Fraction(0) for m in range(len(f.coeffs)))
    return QExpansion(f.weight, cs, level=f.level * chi.conductor**2, character=chi)


def hecke_check(f: QExpansion, n: int) -> bool:
    """a(p)a(n) = a(pn) + p^{k-1} a(n/p) for every prime p | n with pn in range."""
    from .arith import factorize

    if n < 1:
        raise ValueError("n >= 1")
    if n == 1:
        return f.a(1) * f.a(1) == f.a(1) * f.a(1)
    for p in factorize(n):
        if p * n > f.N:
            # use the equivalent form with m = n/p: a(p)a(m) = a(pm) + p^{k-1}a(m/p)
            m = n // p
            rhs = f.a(n) + (p ** (f.weight - 1) * f.a(m // p) if m % p == 0 else 0)
            if f.a(p) * f.a(m) != rhs:
                return False
            continue
        rhs = f.a(p * n) + p ** (f.weight - 1) * f.a(n // p)
        if f.a(p) * f.a(n) != rhs:
            return False
    return True
