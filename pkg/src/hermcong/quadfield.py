"""Arithmetic of K = Q(sqrt(-D)) (class number one, Euclidean), its quadratic
character, generalized Bernoulli numbers and Dirichlet L-values at
non-positive integers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .arith import to_rat, vp_int

EUCLIDEAN_D = (3, 4, 7, 8, 11)


class UnsupportedField(ValueError):
    pass


# ------------------------------------------------------------------ elements


@dataclass(frozen=True)
class KElt:
    """re + im*sqrt(-D) with rational re, im."""

    re: Fraction
    im: Fraction
    D: int

    def __post_init__(self):
        object.__setattr__(self, "re", to_rat(self.re))
        object.__setattr__(self, "im", to_rat(self.im))

    def _co(self, o) -> "KElt":
        if isinstance(o, KElt):
            if o.D != self.D:
                raise ValueError("elements of different fields")
            return o
        if isinstance(o, QuadInt):
            return o.to_kelt()
        return KElt(to_rat(o), Fraction(0), self.D)

    def __add__(self, o):
        o = self._co(o)
        return KElt(self.re + o.re, self.im + o.im, self.D)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._co(o)
        return KElt(self.re - o.re, self.im - o.im, self.D)

    def __rsub__(self, o):
        return self._co(o) - self

    def __neg__(self):
        return KElt(-self.re, -self.im, self.D)

    def __mul__(self, o):
        o = self._co(o)
        return KElt(self.re * o.re - self.D * self.im * o.im, self.re * o.im + self.im * o.re, self.D)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._co(o)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in K")
        c = self * o.conj()
        return KElt(c.re / n, c.im / n, self.D)

    def __rtruediv__(self, o):
        return self._co(o) / self

    def __pow__(self, e: int):
        out = KElt(Fraction(1), Fraction(0), self.D)
        base = self if e >= 0 else KElt(Fraction(1), Fraction(0), self.D) / self
        for _ in range(abs(e)):
            out = out * base
        return out

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            return self.im == 0 and self.re == o
        if isinstance(o, QuadInt):
            o = o.to_kelt()
        if not isinstance(o, KElt):
            return NotImplemented
        return self.re == o.re and self.im == o.im and (self.D == o.D or (self.im == 0))

    def __hash__(self):
        return hash((self.re, self.im, self.D))

    def conj(self) -> "KElt":
        return KElt(self.re, -self.im, self.D)

    def norm(self) -> Fraction:
        return self.re * self.re + self.D * self.im * self.im

    def trace(self) -> Fraction:
        return 2 * self.re

    def is_rational(self) -> bool:
        return self.im == 0

    def rational(self) -> Fraction:
        if self.im != 0:
            raise ValueError(f"{self} is not rational")
        return self.re

    def is_integral(self) -> bool:
        try:
            self.to_quadint()
            return True
        except ValueError:
            return False

    def to_quadint(self) -> "QuadInt":
        b = 2 * self.im
        if self.D % 4 == 3:
            a = self.re - b / 2
        else:
            a = self.re
        if a.denominator != 1 or b.denominator != 1:
            raise ValueError(f"{self} is not in O_K")
        return QuadInt(int(a), int(b), self.D)

    def __repr__(self):
        if self.im == 0:
            return f"{self.re}"
        return f"({self.re}+{self.im}*sqrt(-{self.D}))"


@dataclass(frozen=True)
class QuadInt:
    """a + b*omega in O_K; omega = (1+sqrt(-D))/2 if D = 3 mod 4, else sqrt(-D/4)."""

    a: int
    b: int
    D: int

    @property
    def kind(self) -> int:
        return 0 if self.D % 4 == 3 else 1

    @property
    def c0(self) -> int:
        """omega^2 = omega - c0 (kind 0) or -c0 (kind 1)."""
        return (1 + self.D) // 4 if self.D % 4 == 3 else self.D // 4

    def to_kelt(self) -> KElt:
        if self.kind == 0:
            return KElt(Fraction(2 * self.a + self.b, 2), Fraction(self.b, 2), self.D)
        return KElt(Fraction(self.a), Fraction(self.b, 2), self.D)

    def __add__(self, o):
        o = _qi(o, self.D)
        return QuadInt(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __sub__(self, o):
        o = _qi(o, self.D)
        return QuadInt(self.a - o.a, self.b - o.b, self.D)

    def __rsub__(self, o):
        return _qi(o, self.D) - self

    def __neg__(self):
        return QuadInt(-self.a, -self.b, self.D)

    def __mul__(self, o):
        o = _qi(o, self.D)
        bd = self.b * o.b
        if self.kind == 0:
            return QuadInt(self.a * o.a - bd * self.c0, self.a * o.b + self.b * o.a + bd, self.D)
        return QuadInt(self.a * o.a - bd * self.c0, self.a * o.b + self.b * o.a, self.D)

    __rmul__ = __mul__

    def conj(self) -> "QuadInt":
        if self.kind == 0:
            return QuadInt(self.a + self.b, -self.b, self.D)
        return QuadInt(self.a, -self.b, self.D)

    def norm(self) -> int:
        if self.kind == 0:
            return self.a * self.a + self.a * self.b + self.c0 * self.b * self.b
        return self.a * self.a + self.c0 * self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def __str__(self):
        return f"{self.a}+{self.b}*w"


def _qi(o, D) -> QuadInt:
    if isinstance(o, QuadInt):
        return o
    if isinstance(o, int):
        return QuadInt(o, 0, D)
    if isinstance(o, KElt):
        return o.to_quadint()
    raise TypeError(f"cannot coerce {o!r} to O_K")


def parse_quadint(s: str, D: int) -> QuadInt:
    """Parse 'a+b*w' (also 'a-b*w', 'a', 'b*w')."""
    t = s.replace(" ", "")
    if "*w" not in t:
        return QuadInt(int(t), 0, D)
    head = t[: t.index("*w")]
    # split head into a and b at the last sign that is not leading
    idx = max(head.rfind("+", 1), head.rfind("-", 1))
    if idx <= 0:
        return QuadInt(0, int(head), D)
    return QuadInt(int(head[:idx]), int(head[idx:]), D)


# --------------------------------------------------------------------- field


@dataclass(frozen=True)
class QuadField:
    D: int

    def __post_init__(self):
        if self.D not in EUCLIDEAN_D:
            raise UnsupportedField(f"D={self.D}: only Euclidean class-number-one fields {EUCLIDEAN_D} are supported")

    @property
    def omega(self) -> QuadInt:
        return QuadInt(0, 1, self.D)

    def elt(self, re, im=0) -> KElt:
        return KElt(to_rat(re), to_rat(im), self.D)

    def sqrt_minus_D(self) -> KElt:
        return KElt(Fraction(0), Fraction(1), self.D)

    def units(self) -> list[QuadInt]:
        D = self.D
        if D == 3:
            w = QuadInt(0, 1, D)
            out, x = [], QuadInt(1, 0, D)
            for _ in range(6):
                out.append(x)
                x = x * w
            return out
        if D == 4:
            i = QuadInt(0, 1, D)
            return [QuadInt(1, 0, D), i, QuadInt(-1, 0, D), -i]
        return [QuadInt(1, 0, D), QuadInt(-1, 0, D)]

    def chi(self, n: int) -> int:
        return kronecker(-self.D, n)

    def splitting_type(self, p: int) -> str:
        if self.D % p == 0:
            return "ramified"
        return "split" if self.chi(p) == 1 else "inert"

    def local_norm_character(self, x, p: int) -> int:
        """eta_p(x) = Hilbert symbol (x, -D)_p: +1 iff x is a local norm from K_p."""
        return hilbert_symbol(to_rat(x), Fraction(-self.D), p)

    def div_round(self, a: QuadInt, b: QuadInt) -> QuadInt:
        """A Euclidean quotient q with N(a - q b) < N(b)."""
        z = a.to_kelt() / b.to_kelt()
        y = 2 * z.im
        x = z.re - y / 2 if self.D % 4 == 3 else z.re
        best = None
        for da in (-1, 0, 1, 2):
            for db in (-1, 0, 1, 2):
                q = QuadInt(math.floor(x) + da, math.floor(y) + db, self.D)
                r = a - q * b
                if best is None or r.norm() < best[0]:
                    best = (r.norm(), q)
        assert best[0] < b.norm()
        return best[1]

    def gcd(self, a: QuadInt, b: QuadInt) -> QuadInt:
        while not b.is_zero():
            q = self.div_round(a, b)
            a, b = b, a - q * b
        return a


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    res = 1
    if n < 0:
        n = -n
        if a < 0:
            res = -res
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            res = -res
    # Jacobi symbol (a/n), n odd positive
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                res = -res
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a %= n
    return res if n == 1 else 0


def hilbert_symbol(a: Fraction, b: Fraction, p: int) -> int:
    """Hilbert symbol (a, b)_p over Q_p for non-zero rationals."""
    a, b = to_rat(a), to_rat(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of 0")

    def split(x: Fraction):
        v = vp_int(x.numerator, p) - vp_int(x.denominator, p)
        u = x / Fraction(p) ** v
        # u is a p-adic unit; represent it modulo p^3 by an integer
        m = p**3
        ui = (u.numerator * pow(u.denominator, -1, m)) % m
        return v, ui

    al, u = split(a)
    be, w = split(b)
    if p != 2:
        eps = (p - 1) // 2
        sign = (-1) ** (al * be * eps % 2)
        lu = kronecker(u, p)
        lw = kronecker(w, p)
        return sign * (lw ** (al % 2)) * (lu ** (be % 2))
    e = lambda x: ((x - 1) // 2) % 2  # noqa: E731
    o = lambda x: ((x * x - 1) // 8) % 2  # noqa: E731
    s = e(u) * e(w) + al * o(w) + be * o(u)
    return -1 if s % 2 else 1


# -------------------------------------------------------- Bernoulli numbers


@lru_cache(maxsize=None)
def bernoulli(m: int) -> Fraction:
    """Bernoulli number B_m with B_1 = -1/2 (defining recurrence)."""
    if m < 0:
        raise ValueError("m >= 0")
    if m == 0:
        return Fraction(1)
    s = Fraction(0)
    for k in range(m):
        s += math.comb(m + 1, k) * bernoulli(k)
    return -s / (m + 1)


def bernoulli_poly(m: int, x) -> Fraction:
    x = to_rat(x)
    return sum((math.comb(m, k) * bernoulli(k) * x ** (m - k) for k in range(m + 1)), Fraction(0))


@dataclass(frozen=True)
class Character:
    """Trivial character (D=None) or the quadratic character chi_{-D}."""

    D: int | None = None

    @property
    def conductor(self) -> int:
        return 1 if self.D is None else self.D

    def __call__(self, n: int) -> int:
        if self.D is None:
            return 1
        return kronecker(-self.D, n)

    @property
    def is_odd(self) -> bool:
        return self.D is not None and self(-1) == -1

    def power(self, i: int) -> "Character":
        return self if i % 2 else Character(None)

    def label(self) -> str:
        return "trivial" if self.D is None else f"chi_-{self.D}"


TRIVIAL = Character(None)


def gen_bernoulli(m: int, chi: Character = TRIVIAL) -> Fraction:
    """B_{m,chi} = f^{m-1} sum_{a=1..f} chi(a) B_m(a/f)."""
    if m < 1:
        raise ValueError("gen_bernoulli needs m >= 1")
    return _gen_bernoulli(m, chi.D)


@lru_cache(maxsize=None)
def _gen_bernoulli(m: int, D: int | None) -> Fraction:
    chi = Character(D)
    f = chi.conductor
    s = Fraction(0)
    for a in range(1, f + 1):
        c = chi(a)
        if c:
            s += c * bernoulli_poly(m, Fraction(a, f))
    return Fraction(f) ** (m - 1) * s


def dirichlet_L_nonpos(m: int, chi: Character = TRIVIAL) -> Fraction:
    """L(1-m, chi) = -B_{m,chi}/m."""
    if m < 1:
        raise ValueError("dirichlet_L_nonpos needs m >= 1")
    return -gen_bernoulli(m, chi) / m


def L_value_at(s: int, chi: Character) -> Fraction:
    """L(s, chi) for an integer s <= 0."""
    if s > 0:
        raise ValueError(f"L({s}, {chi.label()}): argument must be non-positive")
    return dirichlet_L_nonpos(1 - s, chi)


def LF_product(m: int, mu: int, K: QuadField) -> Fraction:
    """LL_F(m, mu) = prod_{i=0}^{m-1} L(1-mu+i, chi_{-D}^i)."""
    chi = Character(K.D)
    out = Fraction(1)
    for i in range(m):
        s = 1 - mu + i
        if s > 0:
            raise ValueError(f"LL_F({m},{mu}): factor at non-negative argument {s}")
        out *= L_value_at(s, chi.power(i))
    return out


# ---------------------------------------------------------------------- HNF


def hnf_basis(vectors: Sequence[Sequence[QuadInt]], K: QuadField) -> tuple[list[list[QuadInt]], int]:
    """Row echelon basis of the O_K-span of the given vectors (Euclidean K)."""
    rows = [[_qi(x, K.D) for x in v] for v in vectors]
    rows = [r for r in rows if any(not x.is_zero() for x in r)]
    if not rows:
        return [], 0
    m = len(rows[0])
    basis: list[list[QuadInt]] = []
    col = 0
    while rows and col < m:
        nz = [r for r in rows if not r[col].is_zero()]
        z = [r for r in rows if r[col].is_zero()]
        if not nz:
            col += 1
            continue
        # Euclid on column `col`
        while len(nz) > 1:
            nz.sort(key=lambda r: r[col].norm())
            piv = nz[0]
            new = [piv]
            for r in nz[1:]:
                q = K.div_round(r[col], piv[col])
                rr = [r[j] - q * piv[j] for j in range(m)]
                if rr[col].is_zero():
                    if any(not x.is_zero() for x in rr):
                        z.append(rr)
                else:
                    new.append(rr)
            nz = new
        basis.append(nz[0])
        rows = z
        col += 1
    return basis, len(basis)


def complete_to_unimodular(v: Sequence[QuadInt], K: QuadField) -> list[list[QuadInt]]:
    """An invertible matrix over O_K whose first column is the primitive vector v."""
    n = len(v)
    v = [_qi(x, K.D) for x in v]
    # Reduce v to e_1 by elementary column operations on a row vector, tracking inverse.
    U = [[QuadInt(int(i == j), 0, K.D) for j in range(n)] for i in range(n)]  # columns are basis
    w = list(v)
    # Apply unimodular row transforms E so that E w = (g,0,...,0); then v = E^{-1} e_1 g.
    E = [[QuadInt(int(i == j), 0, K.D) for j in range(n)] for i in range(n)]
    Einv = [[QuadInt(int(i == j), 0, K.D) for j in range(n)] for i in range(n)]
    for i in range(1, n):
        while not w[i].is_zero():
            if w[0].is_zero() or w[i].norm() < w[0].norm():
                w[0], w[i] = w[i], w[0]
                E[0], E[i] = E[i], E[0]
                for r in Einv:
                    r[0], r[i] = r[i], r[0]
                continue
            q = K.div_round(w[i], w[0])
            w[i] = w[i] - q * w[0]
            E[i] = [E[i][j] - q * E[0][j] for j in range(n)]
            # inverse: column op col0 += q col_i
            for r in Einv:
                r[0] = r[0] + q * r[i]
    if not w[0].is_unit():
        raise ValueError("vector is not primitive")
    # v = Einv e_1 * w0 ; so columns of Einv scaled: first column * w0 is v
    u = w[0]
    for r in Einv:
        r[0] = r[0] * u
    del U
    return Einv


def L_value_pos(m: int, chi: Character):
    """L(m, chi) at a positive integer m with chi(-1) = (-1)^m, as an exact ScaledRat.

    For a real primitive character of conductor f and parity delta,
    L(m, chi) = (-1)^{1+(m-delta)/2} (sqrt(f)/2) (2 pi / f)^m B_{m,chi} / m!.
    """
    from .arith import ScaledRat

    if m < 1:
        raise ValueError("L_value_pos needs m >= 1")
    delta = 1 if chi.is_odd else 0
    if (m - delta) % 2:
        raise ValueError(f"L({m}, {chi.label()}) is not a critical value (parity)")
    if m == 1 and chi.D is None:
        raise ValueError("zeta has a pole at 1")
    f = chi.conductor
    sign = -1 if ((m - delta) // 2) % 2 == 0 else 1
    r = Fraction(sign * 2**m, 2 * math.factorial(m)) * gen_bernoulli(m, chi) / Fraction(f) ** m
    if chi.D is None:
        return ScaledRat(r, m, 0, 1)
    return ScaledRat(r, m, 1, f)
