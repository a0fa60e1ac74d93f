"""Gap statistics of the Pisot subset-sum set for growing exponent cutoffs."""
import argparse
import json
from dataclasses import asdict, dataclass

import numpy as np

from nilmodel import cutproject as cp
from nilmodel.exactfield import Field, embed


@dataclass
class Config:
    a: int = 1
    b: int = 1
    d: int = 2
    cutoffs: tuple = (8, 10, 12, 14)


def run(cfg: Config) -> dict:
    fld = Field(cfg.d)
    gamma = embed(fld(cfg.a) + fld(cfg.b) * fld.sqrt)
    rows = []
    for n in cfg.cutoffs:
        ps = cp.pisot_patch(cfg.a, cfg.b, cfg.d, n)
        x = ps.scheme.principal(cp.sorted_values(ps))[:, 0]
        gaps = np.diff(x)
        rows.append({
            "cutoff": n,
            "points": int(len(x)),
            "min_gap": float(gaps.min()),
            "max_gap": float(gaps.max()),
            "max_gap_over_gamma_n": float(gaps.max() / gamma ** n),
        })
    return {"config": asdict(cfg), "rows": rows}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=int, default=1)
    ap.add_argument("--b", type=int, default=1)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--cutoffs", default="8,10,12,14")
    args = ap.parse_args()
    cfg = Config(args.a, args.b, args.d, tuple(int(t) for t in args.cutoffs.split(",")))
    print(json.dumps(run(cfg), indent=2))
