"""Two-scale Delone and approximate-lattice measurements for a Heisenberg model set."""
import argparse
import json
import time
from dataclasses import asdict, dataclass

from nilmodel import cutproject as cp, verify as vf


@dataclass
class Config:
    window: str = "2,2,4"
    R: int = 20
    d: int = 2
    sep_fraction: float = 0.25
    cover_fraction: float = 0.125
    product_fraction: float = 0.1
    grid_step: float = 0.25


def run(cfg: Config) -> dict:
    scheme = cp.build_scheme("h3", cfg.d, (1, 1, 2))
    W = cp.Window.parse(cfg.window)
    out = {"config": asdict(cfg), "scales": []}
    for R in (cfg.R, 2 * cfg.R):
        t0 = time.time()
        patch = cp.enumerate_model_set(scheme, W, R)
        sep = vf.min_separation(patch, core=R * cfg.sep_fraction)
        cov = vf.covering_radius(patch, cfg.grid_step, R * cfg.cover_fraction)
        cert = vf.approx_certificate(patch, vf.product_patch(patch, 2, R * cfg.product_fraction))
        out["scales"].append({
            "R": R,
            "points": patch.count,
            "min_separation": sep.min_separation,
            "covering_radius": cov.covering_radius_estimate,
            "F_size": cert.size,
            "seconds": round(time.time() - t0, 2),
        })
    a, b = out["scales"]
    out["two_scale"] = {
        "separation_equal": a["min_separation"] == b["min_separation"],
        "cover_within_10pct": vf.two_scale(a["covering_radius"], b["covering_radius"], 0.10),
        "F_equal": a["F_size"] == b["F_size"],
    }
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--window", default=Config.window)
    ap.add_argument("--R", type=int, default=Config.R)
    ap.add_argument("--grid-step", type=float, default=Config.grid_step)
    args = ap.parse_args()
    print(json.dumps(run(Config(window=args.window, R=args.R, grid_step=args.grid_step)), indent=2))
