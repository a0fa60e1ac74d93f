"""Euclidean Delone check of log(Lambda^n0) at two core radii."""
import argparse
import json
from dataclasses import asdict, dataclass

from nilmodel import cutproject as cp, freenilp as fn, verify as vf


@dataclass
class Config:
    window: str = "1/2,1/2,1/2"
    R: int = 12
    cores: tuple = (4.0, 5.0)
    grid_step: float = 0.25
    samples: int = 1000


def run(cfg: Config) -> dict:
    scheme = cp.build_scheme("h3", 2, (1, 1, 2))
    patch = cp.enumerate_model_set(scheme, cp.Window.parse(cfg.window), cfg.R)
    n0 = vf.n0_from_certificates(scheme.G.c)
    wid = vf.check_word_sum_identity(patch, fn.synthesize_sum_word(scheme.G.c), cfg.samples, seed=0)
    reps = [vf.log_image_delone(patch, n0, n0, c, cfg.grid_step, cover_core=c - 2).as_dict() for c in cfg.cores]
    return {"config": asdict(cfg), "n0": n0, "word_identity_failures": wid.failures, "reports": reps}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--window", default=Config.window)
    ap.add_argument("--R", type=int, default=Config.R)
    ap.add_argument("--cores", default="4,5")
    args = ap.parse_args()
    cfg = Config(args.window, args.R, tuple(float(c) for c in args.cores.split(",")))
    print(json.dumps(run(cfg), indent=2, default=str))
