"""Command-line interface: ``hermcong <group> <command> ...``.

All outputs are canonical JSON on stdout (rationals as "num/den").  Exit code
0 means a result was produced; computation errors exit with code 2 and a JSON
error object on stderr (missing local data lists every unresolved class).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .arith import rat_str
from .congruence import CongruenceConfig, dumps, example_config, theorem_report


def _matrix_arg(path: str, D: int):
    from .lattice import HermitianMatrix

    return HermitianMatrix.from_json(json.loads(Path(path).read_text()), D)


def _weights(s: str | None) -> tuple[tuple, tuple]:
    """"7,0;7,0" -> ((7,0),(7,0)); empty -> scalar."""
    if not s:
        return (), ()
    k, _, l = s.partition(";")
    conv = lambda x: tuple(int(t) for t in x.split(",") if t.strip())  # noqa: E731
    return conv(k), conv(l)


def cmd_modform_qexp(a) -> dict:
    from .modform import eigenform

    f = eigenform(a.weight, a.terms)
    return {"weight": a.weight, "terms": a.terms, "coeffs": [rat_str(Fraction(c)) for c in f.coeffs[: a.terms + 1]]}


def cmd_quad_bernoulli(a) -> dict:
    from .quadfield import Character, gen_bernoulli

    chi = Character(a.disc if a.disc else None)
    return {"m": a.m, "disc": a.disc, "B": rat_str(gen_bernoulli(a.m, chi))}


def cmd_lvalue_constant(a) -> dict:
    from .lfunc import bbL_exact
    from .quadfield import QuadField

    if a.example:
        params = {1: (22, 8, (7,), (7,), 4), 2: (12, 12, (0,), (0,), 6)}[a.example]
        weight, mu, k, l, n = params
    else:
        weight, mu, n = a.weight, a.mu, a.n
        k = (a.k,)
        l = (a.l,)
    pkg = bbL_exact(weight, Fraction(mu - 1, 2), mu, QuadField(a.disc), k, l, digits=a.digits, n_for_C=n)
    out = pkg.to_json()
    out["LL_float"] = str(float(pkg.LL_value))
    out["C_float"] = str(float(pkg.C_value))
    return out


def cmd_siegel_fp(a) -> dict:
    from .siegel import FpProvider, fp_oracle, load_supplemental

    S = _matrix_arg(a.matrix, a.disc)
    if a.oracle_level:
        sp = fp_oracle(S, a.p, J=a.oracle_level, max_states=a.max_states)
    else:
        supp = load_supplemental(a.supplemental) if a.supplemental else []
        sp = FpProvider(a.disc, supplemental=supp, oracle_max_states=a.max_states).get(S, a.p)
    return sp.to_json()


def cmd_pullback(a) -> dict:
    from .eisenstein import WeightData, build_P, pullback_coeff
    from .siegel import FpProvider, load_supplemental

    k, l = _weights(a.weights)
    W = WeightData(a.mu, k, l)
    S1 = _matrix_arg(a.S1, a.disc)
    S2 = _matrix_arg(a.S2, a.disc)
    supp = load_supplemental(a.supplemental) if a.supplemental else []
    prov = FpProvider(a.disc, supplemental=supp)
    P = build_P(W, a.n1, a.n2, c_form=a.c_form)
    eps = pullback_coeff(a.mu, a.n1, a.n2, W, S1, S2, prov, P, workers=a.workers)
    return eps.to_json()


def cmd_hecke_reps(a) -> dict:
    from .hecke import tau_reps, tau_st_reps

    reps = tau_st_reps(a.n, a.s, a.t, a.p, a.disc) if a.t is not None else tau_reps(a.n, a.s, a.p, a.disc)
    return {"n": a.n, "s": a.s, "t": a.t, "p": a.p, "count": len(reps), "reps": [r.to_json() for r in reps]}


def default_eigen_matrices(D: int = 3):
    from .lattice import HermitianMatrix as H

    return [H.identity(2, D), H(D, ((2, 1), (1, 2))), H.diag((1, 2), D), H.diag((1, 3), D), H.diag((2, 2), D)]


def cmd_hecke_eigencheck(a) -> dict:
    from .hecke import eigen_ratios
    from .siegel import FpProvider

    mats = default_eigen_matrices(a.disc)[: a.count]
    prov = FpProvider(a.disc, use_fixtures=not a.oracle_only)
    ratios = eigen_ratios(a.p, 2, a.mu, mats, prov)
    return {
        "p": a.p,
        "mu": a.mu,
        "matrices": [S.to_json() for S in mats],
        "ratios": [rat_str(r) for r in ratios],
        "constant": len(set(ratios)) == 1,
    }


def cmd_congruence_check(a) -> dict:
    if a.example:
        cfg = example_config(a.example)
        if a.supplemental:
            cfg = CongruenceConfig.from_json({**_cfg_raw(cfg), "supplemental_table": a.supplemental})
    else:
        cfg = CongruenceConfig.from_json(json.loads(Path(a.config).read_text()))
    if a.workers:
        cfg = CongruenceConfig.from_json({**_cfg_raw(cfg), "workers": a.workers})
    return theorem_report(cfg).to_json()


def _cfg_raw(cfg: CongruenceConfig) -> dict:
    return {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hermcong", description=__doc__.splitlines()[0])
    ap.add_argument("--disc", type=int, default=3, help="D for K = Q(sqrt(-D))")
    ap.add_argument("--output", "-o", help="write JSON here instead of stdout")
    sub = ap.add_subparsers(dest="group", required=True)

    g = sub.add_parser("modform").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("qexp")
    c.add_argument("--weight", type=int, required=True)
    c.add_argument("--terms", type=int, default=20)
    c.set_defaults(func=cmd_modform_qexp)

    g = sub.add_parser("quad").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("bernoulli", help="generalized Bernoulli number B_{m,chi_{-D}} (--disc 0: trivial character)")
    c.add_argument("--m", type=int, required=True)
    c.set_defaults(func=cmd_quad_bernoulli)

    g = sub.add_parser("lvalue").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("constant")
    c.add_argument("--example", type=int, choices=(1, 2))
    c.add_argument("--weight", type=int)
    c.add_argument("--mu", type=int)
    c.add_argument("--n", type=int, help="C_{n,mu}")
    c.add_argument("--r", type=int, default=1)
    c.add_argument("--k", type=int, default=0)
    c.add_argument("--l", type=int, default=0)
    c.add_argument("--digits", type=int, default=50)
    c.set_defaults(func=cmd_lvalue_constant)

    g = sub.add_parser("siegel").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("fp")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--matrix", required=True, help="JSON file with a row-major matrix")
    c.add_argument("--oracle-level", type=int, dest="oracle_level")
    c.add_argument("--supplemental")
    c.add_argument("--max-states", type=int, default=60_000_000, dest="max_states")
    c.set_defaults(func=cmd_siegel_fp)

    c = sub.add_parser("pullback")
    c.add_argument("--mu", type=int, required=True)
    c.add_argument("--n1", type=int, required=True)
    c.add_argument("--n2", type=int, required=True)
    c.add_argument("--weights", default="", help='"k1,k2;l1,l2" (empty = scalar)')
    c.add_argument("--S1", required=True)
    c.add_argument("--S2", required=True)
    c.add_argument("--supplemental")
    c.add_argument("--c-form", default="entry", choices=("entry", "minor"), dest="c_form")
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_pullback)

    g = sub.add_parser("hecke").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("reps")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--s", type=int, required=True)
    c.add_argument("--t", type=int)
    c.add_argument("--p", type=int, required=True)
    c.set_defaults(func=cmd_hecke_reps)
    c = g.add_parser("eigencheck")
    c.add_argument("--mu", type=int, default=12)
    c.add_argument("--p", type=int, default=2)
    c.add_argument("--count", type=int, default=3)
    c.add_argument("--oracle-only", action="store_true", dest="oracle_only", help="ignore the F_3 fixtures")
    c.set_defaults(func=cmd_hecke_eigencheck)

    g = sub.add_parser("congruence").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("check")
    m = c.add_mutually_exclusive_group(required=True)
    m.add_argument("--example", type=int, choices=(1, 2))
    m.add_argument("--config")
    c.add_argument("--supplemental")
    c.add_argument("--workers", type=int, default=0)
    c.set_defaults(func=cmd_congruence_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    try:
        out = a.func(a)
    except Exception as exc:  # report computation errors as JSON, nonzero exit
        err = {"error": type(exc).__name__, "message": str(exc)}
        keys = getattr(exc, "keys", None)
        if keys:
            err["missing"] = [k.to_json() for k in keys]
        sys.stderr.write(dumps(err))
        return 2
    text = dumps(out)
    if a.output:
        Path(a.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
