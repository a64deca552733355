"""Generate local Siegel-series tables with the character-sum oracle.

Writes two files under src/hermcong/data/:

* supplemental_f2.json -- F_2(X; S) for 4 x 4 lattices at the inert prime 2
  with d in {2, 3} (the classes needed by example 2 plus further diagonal
  representatives), in the supplemental-table schema;
* oracle_cache.json -- every other oracle-resolved class met by examples 1
  and 2 (so the examples run in seconds instead of minutes).

Every entry is validated (functional equation + integrality) before writing.

    python scripts/make_supplemental.py [--workers N]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from hermcong.congruence import example_config
from hermcong.eisenstein import _local_items
from hermcong.lattice import HermitianMatrix, completions
from hermcong.siegel import (
    FpProvider,
    SupplementalEntry,
    fe_validate,
    fp_degree,
    fp_oracle,
    integrality_validate,
    local_key,
    supplemental_to_json,
)

DATA = Path(__file__).resolve().parents[1] / "src" / "hermcong" / "data"

EXTRA_F2 = [(1, 1, 1, 4), (1, 1, 2, 2), (1, 1, 1, 8), (1, 1, 2, 4), (1, 2, 2, 2)]


def entry(S: HermitianMatrix, p: int, source: str) -> SupplementalEntry:
    sp = fp_oracle(S, p)
    if not fe_validate(sp) or not integrality_validate(sp):
        raise SystemExit(f"validation failed for {S}")
    k = local_key(S, p)
    return SupplementalEntry(p, k.splitting, S.n, k.d, k.det_class, tuple(str(c) for c in sp.poly.coeffs), k.jordan, source)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.parse_args()
    needed: dict = {}
    for ex in (1, 2):
        cfg = example_config(ex)
        S1, S2 = cfg.matrices()
        prov = FpProvider(cfg.disc)
        for S, p in _local_items(S1.block(B, S2) for B in completions(S1, S2)):
            from hermcong.siegel import fp_forced

            if fp_forced(S, p) is not None:
                continue
            k = local_key(S, p)
            if prov._static_match(S, p, k):
                continue
            needed.setdefault((k.coarse(), k.jordan), S)
    for diag in EXTRA_F2:
        S = HermitianMatrix.diag(diag, 3)
        if fp_degree(S, 2) in (2, 3):
            k = local_key(S, 2)
            needed.setdefault((k.coarse(), k.jordan), S)
    f2, cache = [], []
    for (coarse, jordan), S in sorted(needed.items(), key=lambda kv: repr(kv[0])):
        p = coarse[0]
        if p == 2 and S.n == 4:
            f2.append(entry(S, p, "character-sum oracle J=1 (scripts/make_supplemental.py)"))
        else:
            cache.append(entry(S, p, "oracle-cache J=1 (scripts/make_supplemental.py)"))
        print(coarse, jordan, "done", flush=True)
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "supplemental_f2.json").write_text(json.dumps(supplemental_to_json(f2), indent=1, sort_keys=True) + "\n")
    (DATA / "oracle_cache.json").write_text(json.dumps(supplemental_to_json(cache), indent=1, sort_keys=True) + "\n")
    print(f"wrote {len(f2)} F_2 entries and {len(cache)} cached entries")


if __name__ == "__main__":
    main()
