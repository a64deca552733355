"""The pullback constants c(mu/2, rho') (closed product), c_r and M_r.

All values are exact: powers of pi and sqrt(D) are tracked symbolically in
:class:`ScaledRat` and must cancel before a rational is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import ScaledRat, pochhammer
from .lfunc import gamma_C
from .quadfield import Character, L_value_at, L_value_pos


class ConstantError(ValueError):
    pass


def _length(w) -> int:
    return sum(1 for x in w if x)


def _weight_factor(w) -> Fraction:
    ell = _length(w)
    num = Fraction(1)
    for i in range(1, ell + 1):
        num *= math.factorial(w[i - 1] + ell - i)
    den = Fraction(1)
    for i in range(1, ell + 1):
        for j in range(i + 1, ell + 1):
            den *= w[i - 1] - w[j - 1] + j - i
    return num / den


def _pad(w, n: int) -> tuple:
    w = tuple(w)
    if _length(w) > n:
        raise ConstantError(f"weight {w} longer than n2={n}")
    return (w + (0,) * n)[:n] if len(w) < n else w[:n]


def c_small(mu: int, n2: int, k=(), l=()) -> ScaledRat:
    """c(mu/2, rho') for F = Q (m = 1), a rational multiple of pi^{n2^2}."""
    if mu % 2:
        raise ConstantError("mu must be even")
    k = _pad(k, n2)
    l = _pad(l, n2)
    e2 = -2 * n2 * n2 - (n2 - 2) * mu + sum(k) + sum(l)
    r = Fraction(2) ** e2 * _weight_factor(k) * _weight_factor(l)
    for i in range(1, n2 + 1):
        d = pochhammer(k[i - 1] + l[i - 1] + mu - i, n2, "desc")
        if d == 0:
            raise ConstantError("descending Pochhammer symbol vanishes (pole)")
        r /= d
    return ScaledRat(r, n2 * n2, 0)


def c_r(mu: int, r: int, k=(), l=(), D: int = 3, ledger: dict | None = None) -> Fraction:
    """The constant c_r of the pullback expansion, as an exact rational.

    (2 pi i)^{-(|k|+|l|)} c(mu/2, rho'_r) D^{-r/2}
      prod_{i<2r} L(1-mu+i, chi^i) / L(mu-i, chi^i)
      / prod_j Gamma_C(mu+k_j-j-r+1) Gamma_C(mu+l_j-j)

    Raises ConstantError when the pi / sqrt(D) exponents do not cancel.
    """
    val = c_r_scaled(mu, r, k, l, D)
    if ledger is not None:
        ledger.update(val.ledger())
    if not val.is_rational():
        raise ConstantError(f"pi/sqrt(D) exponents do not cancel in c_r: {val.ledger()}")
    return val.to_rat()


def c_r_scaled(mu: int, r: int, k=(), l=(), D: int = 3) -> ScaledRat:
    """The same product as :func:`c_r`, kept symbolic in pi and sqrt(D).

    The pi-exponent works out to r^2 - r: the product is rational for r <= 1
    only (see the ledger for the r >= 2 discussion).
    """
    k = _pad(k, r)
    l = _pad(l, r)
    chi = Character(D)
    wt = sum(k) + sum(l)
    # (2 pi i)^{-wt}: i^{-wt} is real for even wt
    if wt % 2:
        raise ConstantError("odd |k|+|l| gives a non-real power of i")
    i_pow = (-1) ** ((wt // 2) % 2)
    val = ScaledRat(Fraction(i_pow, 2**wt), -wt, 0, D)
    val = val * c_small(mu, r, k, l)
    val = val * ScaledRat(Fraction(1), 0, -r, D)
    for i in range(2 * r):
        ch = chi.power(i)
        val = val * L_value_at(1 - mu + i, ch)
        val = val / L_value_pos(mu - i, ch)
    for j in range(1, r + 1):
        val = val / gamma_C(mu + k[j - 1] - j - r + 1)
        val = val / gamma_C(mu + l[j - 1] - j)
    return ScaledRat(val.r, val.pi_pow, val.sqrtD_pow, D).normalized()


def M_r(mu: int, r: int, k=(), l=(), D: int = 3) -> int:
    k = _pad(k, max(r, 1))
    l = _pad(l, max(r, 1))
    cand = [mu, D, k[0] + l[0] + mu - 1]
    for j in range(1, r + 1):
        cand += [mu + k[j - 1] - j - r + 1, mu + l[j - 1] - j]
    return max(cand)


@dataclass(frozen=True)
class ConstantsBundle:
    c_small: ScaledRat
    c_r: Fraction
    M_r: int
