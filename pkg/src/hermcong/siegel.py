"""The local Siegel series factor F_p(X; S).

Sources, tried in order by :class:`FpProvider`:

* forced  -- degree d <= 1, where the functional equation fixes F uniquely;
* fixture -- the published F_3 table for K = Q(sqrt(-3));
* supplemental -- a user JSON table of literature values;
* oracle  -- an exact character-sum evaluation of the local density b_p.

Normalization of the oracle.  With X = p^{-s} and Y^2 = X,

    b_p(Y; S) = sum_{sigma in p^{-J} Her_n(O_p) / Her_n(O_p)} e_p(-tr S sigma) Y^{w(sigma)},

where p^{w(sigma)} = [O^n + sigma O^n : O^n] (w = f * sum of the elementary
divisor exponents, f the residue degree).  Then

    F_p(X; S) = b_p / prod_{i=0}^{n-1} (1 - chi(p)^i p^i X),

chi(p) = -1 (inert), 0 (ramified), 1 (split).  The X^k coefficients are exact
for k <= J; the remaining ones follow from the functional equation
c_{d-i} = xi p^{n d - 2 n i} c_i with xi = eta_p((-1)^{n/2} det S) for even n
(eta_p the local norm character of K_p/Q_p) and xi = 1 for odd n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numba as nb
import numpy as np

from .arith import PolyX, series_inverse_mul, vp_int
from .lattice import HermitianMatrix, LatticeError, det_scaled, is_psd, isometry_test, jordan_type, PD
from .quadfield import QuadField


class SiegelError(ValueError):
    pass


class MissingLocalDatum(SiegelError):
    def __init__(self, keys: Sequence["LocalClassKey"], detail: str = ""):
        self.keys = list(keys)
        msg = "missing local datum for " + "; ".join(k.describe() for k in self.keys)
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class OracleTooLarge(SiegelError):
    pass


# ------------------------------------------------------------------ keys


@dataclass(frozen=True)
class LocalClassKey:
    """Local invariants of S at p.

    ``det_class`` is eta_p((-1)^{floor(n/2)} det S).  ``jordan`` is the tuple
    of Jordan components (scale, rank, det-class) at odd or inert p, or None
    where it is not computed (split p, dyadic ramified p).
    """

    p: int
    splitting: str
    n: int
    d: int
    det_class: int
    jordan: tuple | None = None

    def coarse(self) -> tuple:
        return (self.p, self.splitting, self.n, self.d, self.det_class)

    def describe(self) -> str:
        s = f"p={self.p} ({self.splitting}), n={self.n}, d={self.d}, det_class={self.det_class:+d}"
        if self.jordan is not None:
            s += f", jordan={list(self.jordan)}"
        return s

    def to_json(self) -> dict:
        out = {"p": self.p, "splitting": self.splitting, "n": self.n, "d": self.d, "det_class": self.det_class}
        if self.jordan is not None:
            out["jordan"] = [list(c) for c in self.jordan]
        return out


def fp_degree(S: HermitianMatrix, p: int) -> int:
    ds = det_scaled(S)
    if ds == 0:
        raise SiegelError("F_p is defined for non-degenerate S only")
    return vp_int(ds, p)


def xi_hat(S: HermitianMatrix, p: int) -> int:
    """The functional-equation sign: eta_p((-1)^{n/2} det S) for even n, 1 for odd n."""
    if S.n % 2:
        return 1
    K = QuadField(S.D)
    x = Fraction(-1) ** (S.n // 2) * S.det()
    return K.local_norm_character(x, p)


def local_key(S: HermitianMatrix, p: int) -> LocalClassKey:
    K = QuadField(S.D)
    typ = K.splitting_type(p)
    d = fp_degree(S, p)
    x = Fraction(-1) ** (S.n // 2) * S.det()
    det_class = K.local_norm_character(x, p)
    jordan = None
    if typ == "inert" or (typ == "ramified" and p != 2):
        jordan = jordan_type(S, p)
    return LocalClassKey(p, typ, S.n, d, det_class, jordan)


# ------------------------------------------------------------- SiegelPoly


@dataclass(frozen=True)
class SiegelPoly:
    p: int
    n: int
    key: LocalClassKey
    poly: PolyX
    provenance: str  # forced | fixture | oracle | supplemental
    notes: tuple = ()

    @property
    def d(self) -> int:
        return self.key.d

    def __call__(self, x) -> Fraction:
        return self.poly(x)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "key": self.key.to_json(),
            "coeffs": self.poly.to_json(),
            "provenance": self.provenance,
            "notes": list(self.notes),
        }


def fe_sign(poly: PolyX, p: int, n: int, d: int) -> int | None:
    """The sign xi with c_{d-i} = xi p^{n d - 2 n i} c_i for all i, or None if no sign works."""
    if poly.degree > d or poly[0] != 1:
        return None
    for xi in (1, -1):
        if all(poly[d - i] == xi * Fraction(p) ** (n * d - 2 * n * i) * poly[i] for i in range(d + 1)):
            return xi
    return None


def fe_validate(F: SiegelPoly | PolyX, p: int | None = None, n: int | None = None, d: int | None = None, xi: int | None = None) -> bool:
    """Functional-equation check c_{d-i} = xi p^{nd-2ni} c_i.

    With ``xi`` omitted, the check passes when some sign xi in {+1,-1} works.
    """
    if isinstance(F, SiegelPoly):
        poly, p, n, d = F.poly, F.p, F.n, F.d
    else:
        poly = F
        if d is None:
            d = int(poly.degree)
    s = fe_sign(poly, p, n, d)
    if s is None:
        return False
    return xi is None or s == xi


def integrality_validate(F: SiegelPoly | PolyX, p: int | None = None, n: int | None = None) -> bool:
    """F(p^{-n} X) in Z[X]: p^{n i} divides c_i."""
    if isinstance(F, SiegelPoly):
        poly, p, n = F.poly, F.p, F.n
    else:
        poly = F
    return all((c / Fraction(p) ** (n * i)).denominator == 1 for i, c in enumerate(poly.coeffs))


# ------------------------------------------------------------------ forced


def fp_forced(S: HermitianMatrix, p: int) -> SiegelPoly | None:
    d = fp_degree(S, p)
    key = local_key(S, p)
    if d == 0:
        return SiegelPoly(p, S.n, key, PolyX((1,)), "forced")
    if d == 1:
        xi = xi_hat(S, p)
        return SiegelPoly(p, S.n, key, PolyX((1, xi * p**S.n)), "forced")
    return None


# ----------------------------------------------------------------- fixtures

# The published F_3 table over K = Q(sqrt(-3)).
F3_FIXTURES = (
    ("I_3", (1, 1, 1), (1, 27)),
    ("I_4", (1, 1, 1, 1), (1, 2 * 3**5, 3**8)),
    ("diag(1,3)", (1, 3), (1, 0, 3**4)),
    ("diag(1,1,3)", (1, 1, 3), (1, -(3**3) * 2, 3**6)),
    ("diag(1,1,1,3)", (1, 1, 1, 3), (1, 3**5, 3**9, 3**12)),
)


def fixture_polys(D: int = 3) -> list[tuple[str, HermitianMatrix, SiegelPoly]]:
    if D != 3:
        return []
    out = []
    for name, diag, coeffs in F3_FIXTURES:
        S = HermitianMatrix.diag(diag, 3)
        out.append((name, S, SiegelPoly(3, S.n, local_key(S, 3), PolyX(coeffs), "fixture", (name,))))
    return out


# ------------------------------------------------------------ supplemental


@dataclass(frozen=True)
class SupplementalEntry:
    p: int
    splitting: str
    n: int
    d: int
    det_class: int
    coeffs: tuple
    jordan: tuple | None = None
    source: str = ""

    def matches(self, key: LocalClassKey) -> bool:
        if (self.p, self.splitting, self.n, self.d, self.det_class) != key.coarse():
            return False
        return self.jordan is None or key.jordan is None or tuple(self.jordan) == tuple(key.jordan)


def load_supplemental(path: str | Path) -> list[SupplementalEntry]:
    """Read a supplemental table: JSON list of {p, splitting, n, d, det_class, coeffs[, jordan, source]}."""
    raw = json.loads(Path(path).read_text())
    if isinstance(raw, dict):
        raw = raw.get("entries", [])
    out = []
    for e in raw:
        jordan = e.get("jordan")
        if jordan is not None:
            jordan = tuple(tuple(c) if not isinstance(c, int) else c for c in jordan)
            jordan = tuple((c[0], c[1], c[2]) for c in jordan)
        entry = SupplementalEntry(
            int(e["p"]),
            str(e["splitting"]),
            int(e["n"]),
            int(e["d"]),
            int(e["det_class"]),
            tuple(Fraction(str(c)) for c in e["coeffs"]),
            jordan,
            str(e.get("source", "")),
        )
        poly = PolyX(entry.coeffs)
        if poly[0] != 1 or not fe_validate(poly, entry.p, entry.n, entry.d) or not integrality_validate(poly, entry.p, entry.n):
            raise SiegelError(f"supplemental entry {e} fails the validators")
        out.append(entry)
    return out


def load_oracle_cache() -> list[SupplementalEntry]:
    """Packaged oracle outputs (regenerate with scripts/make_supplemental.py); empty if absent."""
    path = Path(__file__).resolve().parent / "data" / "oracle_cache.json"
    return load_supplemental(path) if path.exists() else []


def supplemental_to_json(entries: Iterable[SupplementalEntry]) -> list[dict]:
    out = []
    for e in entries:
        d = {"p": e.p, "splitting": e.splitting, "n": e.n, "d": e.d, "det_class": e.det_class, "coeffs": [str(c) for c in e.coeffs]}
        if e.jordan is not None:
            d["jordan"] = [list(c) for c in e.jordan]
        if e.source:
            d["source"] = e.source
        out.append(d)
    return out


# ------------------------------------------------------------------ oracle


@nb.njit(cache=True)
def _mul(a, b, c, d, kind, c0):
    bd = b * d
    if kind == 0:
        return a * c - bd * c0, a * d + b * c + bd
    return a * c - bd * c0, a * d + b * c


@nb.njit(cache=True)
def _conj(a, b, kind):
    if kind == 0:
        return a + b, -b
    return a, -b


@nb.njit(cache=True)
def _vp(x, p, cap):
    if x == 0:
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if v >= cap:
            return cap
    return v


@nb.njit(cache=True)
def _val(a, b, p, ramified, kind, c0, cap):
    if not ramified:
        return min(_vp(a, p, cap), _vp(b, p, cap))
    if kind == 0:
        N = a * a + a * b + b * b * c0
    else:
        N = a * a + c0 * b * b
    return _vp(N, p, cap)


@nb.njit(cache=True)
def _kernel(n, p, J, ramified, kind, c0, Sd, Sa, Sb, offi, offj, masks_by_k, nmasks, lo, hi, hist):
    """Histogram of (w-index, v_p(p^J tr S sigma)) over states lo..hi-1."""
    noff = len(offi)
    q = p**J
    e = 2 if ramified else 1
    Je = J * e
    ndig = n + 2 * noff
    digs = np.zeros(ndig, np.int64)
    Ma = np.zeros((n, n), np.int64)
    Mb = np.zeros((n, n), np.int64)
    nsub = 1 << n
    mina = np.zeros((nsub, nsub), np.int64)
    minb = np.zeros((nsub, nsub), np.int64)
    capv = 1 << 40
    for idx in range(lo, hi):
        x = idx
        for k in range(ndig):
            digs[k] = x % q
            x //= q
        t = 0
        for i in range(n):
            Ma[i, i] = digs[i]
            Mb[i, i] = 0
            t += Sd[i] * digs[i]
        for k in range(noff):
            i = offi[k]
            j = offj[k]
            c = digs[n + 2 * k]
            d = digs[n + 2 * k + 1]
            Ma[i, j] = c
            Mb[i, j] = d
            ca, cb = _conj(c, d, kind)
            Ma[j, i] = ca
            Mb[j, i] = cb
            t += Sb[k] * c - Sa[k] * d
        t %= q
        vt = _vp(t, p, J)
        best = 0
        mina[0, 0] = 1
        minb[0, 0] = 0
        for k in range(1, n + 1):
            dk = capv
            for ir in range(nmasks[k]):
                R = masks_by_k[k, ir]
                r0 = 0
                while not (R >> r0) & 1:
                    r0 += 1
                Rr = R ^ (1 << r0)
                for ic in range(nmasks[k]):
                    C = masks_by_k[k, ic]
                    sa = 0
                    sb = 0
                    sgn = 1
                    for cc in range(n):
                        if (C >> cc) & 1:
                            Cc = C ^ (1 << cc)
                            pa, pb = _mul(Ma[r0, cc], Mb[r0, cc], mina[Rr, Cc], minb[Rr, Cc], kind, c0)
                            sa += sgn * pa
                            sb += sgn * pb
                            sgn = -sgn
                    mina[R, C] = sa
                    minb[R, C] = sb
                    v = _val(sa, sb, p, ramified, kind, c0, capv)
                    if v < dk:
                        dk = v
            if k * Je - dk > best:
                best = k * Je - dk
        hist[best, vt] += 1


def _masks(n: int):
    width = math.comb(n, n // 2)
    mb = np.zeros((n + 1, width), np.int64)
    nm = np.zeros(n + 1, np.int64)
    for m in range(1 << n):
        k = bin(m).count("1")
        mb[k, nm[k]] = m
        nm[k] += 1
    return mb, nm


def oracle_states(n: int, p: int, J: int) -> int:
    return (p**J) ** (n * n)


def _oracle_inputs(S: HermitianMatrix):
    D = S.D
    n = S.n
    kind = 0 if D % 4 == 3 else 1
    c0 = (1 + D) // 4 if kind == 0 else D // 4
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    Sd = []
    for i in range(n):
        v = S[i, i].rational()
        if v.denominator != 1:
            raise SiegelError("diagonal entries must be integers")
        Sd.append(int(v))
    Sa, Sb = [], []
    for i, j in pairs:
        x = S.numerator(i, j)  # s_ij = x / sqrt(-D), x = a + b w
        Sa.append(x.a)
        Sb.append(x.b)
    return kind, c0, pairs, np.array(Sd, np.int64), np.array(Sa, np.int64), np.array(Sb, np.int64)


def b_histogram(S: HermitianMatrix, p: int, J: int, chunks: int = 1, workers: int = 1) -> np.ndarray:
    """The (w-index, valuation) histogram; partitioned into `chunks` ranges (order-free merge)."""
    K = QuadField(S.D)
    typ = K.splitting_type(p)
    if typ == "split":
        raise SiegelError("the character-sum oracle is implemented for inert and ramified p only")
    ramified = typ == "ramified"
    n = S.n
    kind, c0, pairs, Sd, Sa, Sb = _oracle_inputs(S)
    offi = np.array([i for i, _ in pairs], np.int64)
    offj = np.array([j for _, j in pairs], np.int64)
    mb, nm = _masks(n)
    e = 2 if ramified else 1
    total = oracle_states(n, p, J)
    bounds = [total * c // chunks for c in range(chunks + 1)]
    args = (n, p, J, ramified, kind, c0, Sd, Sa, Sb, offi, offj, mb, nm)
    shape = (n * J * e + 1, J + 1)
    if workers > 1 and chunks > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_run_chunk, [(args, shape, bounds[c], bounds[c + 1]) for c in range(chunks)]))
    else:
        parts = [_run_chunk((args, shape, bounds[c], bounds[c + 1])) for c in range(chunks)]
    hist = np.zeros(shape, np.int64)
    for h in parts:
        hist += h
    return hist


def _run_chunk(task):
    args, shape, lo, hi = task
    hist = np.zeros(shape, np.int64)
    _kernel(*args, lo, hi, hist)
    return hist


def b_poly(S: HermitianMatrix, p: int, J: int, chunks: int = 1, workers: int = 1) -> dict[int, int]:
    """Exponent (in Y, X = Y^2) -> coefficient of the truncated local density b_p."""
    K = QuadField(S.D)
    f = 1 if K.splitting_type(p) == "ramified" else 2
    hist = b_histogram(S, p, J, chunks, workers)
    out: dict[int, int] = {}
    for w in range(hist.shape[0]):
        num = int(hist[w, J]) * (p - 1) - (int(hist[w, J - 1]) if J >= 1 else 0)
        if num % (p - 1):
            raise SiegelError("character sum is not a rational integer: inconsistent enumeration")
        c = num // (p - 1)
        if c:
            out[f * w] = c
    return out


def euler_factor(n: int, p: int, typ: str) -> PolyX:
    chi = {"inert": -1, "ramified": 0, "split": 1}[typ]
    E = PolyX((1,))
    for i in range(n):
        E = E * PolyX((1, -(1 if i % 2 == 0 else chi) * p**i))
    return E


def fp_oracle(
    S: HermitianMatrix,
    p: int,
    J: int | None = None,
    max_states: int = 60_000_000,
    chunks: int = 1,
    workers: int = 1,
) -> SiegelPoly:
    """F_p(X; S) from the character-sum oracle at level J (default floor(d/2))."""
    if is_psd(S) != PD:
        raise SiegelError("fp_oracle needs a positive definite S")
    K = QuadField(S.D)
    typ = K.splitting_type(p)
    n = S.n
    d = fp_degree(S, p)
    if J is None:
        J = max(1, d // 2)
    if J < 1:
        raise SiegelError("oracle level J must be >= 1")
    states = oracle_states(n, p, J)
    if states > max_states:
        raise OracleTooLarge(f"oracle needs {states:,} states (n={n}, p={p}, J={J}); limit {max_states:,}")
    b = b_poly(S, p, J, chunks, workers)
    odd = {w: c for w, c in b.items() if w % 2}
    if odd:
        raise SiegelError(f"odd Y-exponents survive in b_p: {odd}")
    bx = [0] * (J + 1)
    for w, c in b.items():
        if w // 2 <= J:
            bx[w // 2] += c
    E = euler_factor(n, p, typ)
    exact = series_inverse_mul(bx, E.coeffs, J + 1)  # coefficients 0..J are exact
    xi = xi_hat(S, p)
    coeffs = [Fraction(0)] * (d + 1)
    for i in range(d + 1):
        j = d - i
        if i <= J:
            coeffs[i] = exact[i]
        elif j <= J:
            coeffs[i] = xi * Fraction(p) ** (n * d - 2 * n * j) * exact[j]
        else:
            raise SiegelError(f"oracle level J={J} too small for degree {d}")
    # consistency between the exact window and the functional equation
    for i in range(J + 1):
        if i > d:
            if exact[i] != 0:
                raise SiegelError(f"oracle coefficient X^{i} beyond degree {d} is {exact[i]}")
        elif coeffs[i] != exact[i]:
            raise SiegelError("oracle window contradicts the functional equation")
    poly = PolyX(tuple(coeffs))
    sp = SiegelPoly(p, n, local_key(S, p), poly, "oracle", (f"J={J}",))
    if not fe_validate(sp, xi=xi) or not integrality_validate(sp):
        raise SiegelError(f"oracle output {poly} fails validation")
    return sp


# ----------------------------------------------------------------- provider


@dataclass
class FpProvider:
    """Resolves F_p(X; S) through forced -> fixtures -> supplemental -> oracle.

    fixture_match: "jordan" (default) serves a fixture only to matrices with
    the same local Jordan invariants; "class" uses the coarse key
    (p, splitting, n, d, det_class) alone.
    """

    D: int = 3
    use_fixtures: bool = True
    fixture_match: str = "jordan"
    supplemental: list = field(default_factory=list)
    cache: list = field(default_factory=list)
    use_oracle: bool = True
    oracle_max_states: int = 60_000_000
    memo: dict = field(default_factory=dict)
    log: list = field(default_factory=list)

    def __post_init__(self):
        if self.fixture_match not in ("jordan", "class", "isometry"):
            raise ValueError("fixture_match must be 'jordan', 'class' or 'isometry'")
        self._fixtures = fixture_polys(self.D) if self.use_fixtures else []

    def _memo_key(self, S: HermitianMatrix, key: LocalClassKey):
        if key.jordan is not None:
            return (key.coarse(), key.jordan)
        return (key.coarse(), S.key())

    def get(self, S: HermitianMatrix, p: int) -> SiegelPoly:
        forced = fp_forced(S, p)
        if forced is not None:
            return forced
        key = local_key(S, p)
        mk = self._memo_key(S, key)
        if mk in self.memo:
            return self.memo[mk]
        sp = self._resolve(S, p, key)
        if not fe_validate(sp) or not integrality_validate(sp):
            raise SiegelError(f"served polynomial fails validation: {sp.to_json()}")
        self.memo[mk] = sp
        self.log.append({"key": key.to_json(), "provenance": sp.provenance, "coeffs": sp.poly.to_json(), "notes": list(sp.notes)})
        return sp

    def _static_match(self, S: HermitianMatrix, p: int, key: LocalClassKey) -> bool:
        for name, F, sp in self._fixtures:
            if sp.p != p or sp.key.coarse() != key.coarse():
                continue
            if self.fixture_match == "class":
                return True
            if self.fixture_match == "jordan" and sp.key.jordan == key.jordan:
                return True
            if self.fixture_match == "isometry" and isometry_test(F, S).status == "isometric":
                return True
        return any(e.matches(key) for e in self.supplemental) or any(e.matches(key) for e in self.cache)

    def prefetch(self, items: Iterable[tuple[HermitianMatrix, int]], workers: int = 1) -> int:
        """Resolve, in parallel, every (S, p) that would fall through to the oracle.

        Results are inserted in sorted memo-key order, so the provider state
        does not depend on the worker count.  Returns the number of oracle runs.
        """
        if not self.use_oracle:
            return 0
        todo: dict = {}
        for S, p in items:
            if fp_forced(S, p) is not None:
                continue
            key = local_key(S, p)
            mk = self._memo_key(S, key)
            if mk in self.memo or mk in todo or self._static_match(S, p, key):
                continue
            if oracle_states(S.n, p, max(1, fp_degree(S, p) // 2)) > self.oracle_max_states:
                continue  # reported as missing by get()
            todo[mk] = S
        order = sorted(todo, key=repr)
        if workers > 1 and len(order) > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=workers) as ex:
                polys = list(ex.map(_oracle_task, [(todo[mk], mk[0][0], self.oracle_max_states) for mk in order]))
        else:
            polys = [_oracle_task((todo[mk], mk[0][0], self.oracle_max_states)) for mk in order]
        for mk, (S, sp) in zip(order, ((todo[m], x) for m, x in zip(order, polys))):
            self.memo[mk] = sp
            self.log.append({"key": sp.key.to_json(), "provenance": sp.provenance, "coeffs": sp.poly.to_json(), "notes": list(sp.notes)})
        return len(order)

    def _resolve(self, S: HermitianMatrix, p: int, key: LocalClassKey) -> SiegelPoly:
        for name, F, sp in self._fixtures:
            if sp.p != p or sp.key.coarse() != key.coarse():
                continue
            if self.fixture_match == "class":
                note = "assumed-class-invariant" if sp.key.jordan != key.jordan else "jordan-match"
                return SiegelPoly(p, S.n, key, sp.poly, "fixture", (name, note))
            if self.fixture_match == "jordan" and sp.key.jordan == key.jordan:
                return SiegelPoly(p, S.n, key, sp.poly, "fixture", (name, "jordan-match"))
            if self.fixture_match == "isometry" and isometry_test(F, S).status == "isometric":
                return SiegelPoly(p, S.n, key, sp.poly, "fixture", (name, "isometric"))
        for e in self.supplemental:
            if e.matches(key):
                return SiegelPoly(p, S.n, key, PolyX(e.coeffs), "supplemental", (e.source,) if e.source else ())
        for e in self.cache:
            if e.matches(key):
                return SiegelPoly(p, S.n, key, PolyX(e.coeffs), "oracle-cache", (e.source,) if e.source else ())
        if self.use_oracle:
            try:
                return fp_oracle(S, p, max_states=self.oracle_max_states)
            except OracleTooLarge as exc:
                raise MissingLocalDatum([key], str(exc)) from exc
            except SiegelError as exc:
                if "split" in str(exc):
                    raise MissingLocalDatum([key], str(exc)) from exc
                raise
        raise MissingLocalDatum([key])


def _oracle_task(task) -> SiegelPoly:
    S, p, max_states = task
    return fp_oracle(S, p, max_states=max_states)


def relevant_primes(S: HermitianMatrix) -> list[int]:
    """The set c: primes dividing D and primes dividing D^{floor(n/2)} det S."""
    from .arith import factorize

    ds = det_scaled(S)
    ps = set(factorize(S.D))
    ps |= set(factorize(ds))
    return sorted(ps)


def fp_lookup(provider: FpProvider, S: HermitianMatrix, p: int, mu: int) -> Fraction:
    """F_p(p^{mu-2n}; S)."""
    n = S.n
    if mu < n:
        raise SiegelError("fp_lookup needs mu >= n")
    if S.D % p and det_scaled(S) % p:
        return Fraction(1)
    F = provider.get(S, p)
    return F.poly(Fraction(p) ** (mu - 2 * n))
