"""Least-squares linearization of x -> A x + B sigma(x) on a one-dimensional model set."""
import argparse
import json
from dataclasses import asdict, dataclass
from fractions import Fraction

from nilmodel import cutproject as cp, liealg as la, verify as vf


@dataclass
class Config:
    d: int = 2
    window: str = "1"
    R: int = 10**5
    A: str = "2"
    B: str = "1"


def run(cfg: Config) -> dict:
    scheme = cp.build_scheme(la.abelian(1), cfg.d, (1,))
    patch = cp.enumerate_model_set(scheme, cp.Window.parse(cfg.window), 2 * cfg.R)
    res = vf.linearize_hom(patch, vf.hom_formula(patch, Fraction(cfg.A), Fraction(cfg.B)), cfg.R)
    d = res.as_dict()
    d["coefficient_error"] = abs(float(res.phi_tilde[0, 0]) - float(Fraction(cfg.A)))
    return {"config": asdict(cfg), "result": d}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--window", default="1")
    ap.add_argument("--R", type=int, default=10**5)
    ap.add_argument("--A", default="2")
    ap.add_argument("--B", default="1")
    a = ap.parse_args()
    print(json.dumps(run(Config(a.d, a.window, a.R, a.A, a.B)), indent=2, default=str))
