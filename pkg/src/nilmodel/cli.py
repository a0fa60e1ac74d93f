"""Command-line entry point: ``nilmodel <command> [options]``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage error,
3 internal error.  Output is deterministic for a fixed configuration.
"""
from __future__ import annotations

import argparse
import json
import sys
import traceback
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, cutproject as cp, freenilp, liealg, verify as vf
from .exactfield import format_element, parse_element

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- output ------------------------------------------------------------------------

def _plain(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (tuple, set)):
        return list(x)
    if hasattr(x, "as_dict"):
        return x.as_dict()
    return str(x)


def _dumps(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, default=_plain)


def _text(rec: dict) -> str:
    lines = []
    for k in sorted(rec):
        v = rec[k]
        if isinstance(v, (dict, list, tuple)):
            v = _dumps(v) if isinstance(v, dict) else json.dumps(v, default=_plain)
        lines.append(f"{k}: {v}")
    return "\n".join(lines) + "\n\n"


class Output:
    def __init__(self, args):
        self.format = args.format
        self.path = args.out
        self.chunks: list[str] = []

    def record(self, rec: dict):
        self.chunks.append(_dumps(rec) + "\n" if self.format == "jsonl" else _text(rec))

    def raw(self, text: str):
        self.chunks.append(text)

    def flush(self):
        data = "".join(self.chunks)
        if self.path:
            Path(self.path).write_text(data)
        else:
            try:
                sys.stdout.write(data)
                sys.stdout.flush()
            except BrokenPipeError:  # e.g. piped into head
                sys.stdout = None


def _header(args, config: dict, certs=()) -> dict:
    # --threads and --out do not change results, so they stay out of the header
    return {
        "command": args.command_path,
        "config": config,
        "seed": args.seed,
        "tolerance": args.tolerance,
        "certificates": {c.target + f"_c{c.c}_n{c.arity}": c.digest() for c in certs},
        "version": __version__,
    }


# -- config resolution ---------------------------------------------------------------

def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError as e:
        raise UsageError(f"expected integers, got {text!r}") from e


def _fraction(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"expected a rational number, got {text!r}") from e


def _scheme_config(args) -> cp.SchemeConfig:
    if getattr(args, "config", None):
        try:
            cfg = cp.SchemeConfig.load(args.config)
        except FileNotFoundError as e:
            raise UsageError(str(e)) from e
    else:
        cfg = cp.SchemeConfig("h3", 2, (1, 1, 2), cp.Window.parse("2,2,4"), Fraction(20))
    if args.algebra:
        cfg.algebra = args.algebra
    if args.d is not None:
        cfg.d = args.d
    if args.denominators:
        cfg.denominators = _ints(args.denominators)
    if args.window:
        try:
            cfg.window = cp.Window.parse(args.window)
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"bad window {args.window!r}: {e}") from e
    if args.R is not None:
        cfg.R = _fraction(args.R)
    if getattr(args, "core_fraction", None) is not None:
        cfg.core_fraction = _fraction(args.core_fraction)
    return cfg


def _build(cfg: cp.SchemeConfig) -> cp.Scheme:
    try:
        return cfg.build()
    except KeyError as e:
        raise UsageError(f"unknown algebra {cfg.algebra!r}") from e


def _load_algebra(name: str, d=None) -> liealg.LieAlgebra:
    p = Path(name)
    if p.exists():
        return liealg.load_algebra(p)
    try:
        return liealg.builtin(name, d)
    except KeyError as e:
        raise UsageError(f"unknown algebra {name!r} (not a file or builtin)") from e


def _cores(args, default: tuple) -> tuple:
    if getattr(args, "cores", None):
        vals = tuple(_fraction(x) for x in args.cores.split(","))
        if len(vals) != 2:
            raise UsageError("--cores takes two comma-separated radii")
        return vals
    return default


def _two_scale_patches(cfg: cp.SchemeConfig, scheme: cp.Scheme):
    return [cp.enumerate_model_set(scheme, cfg.window, r) for r in (cfg.R, 2 * cfg.R)]


# -- commands -------------------------------------------------------------------------

def cmd_bch(args, out: Output) -> int:
    if args.class_ < 1:
        raise UsageError("--class must be >= 1")
    series = freenilp.bch_series(args.class_)
    out.record(_header(args, {"class": args.class_}))
    out.record({"bch": str(series)})
    return EXIT_PASS


def cmd_words(args, out: Output) -> int:
    c = args.class_
    if c < 1:
        raise UsageError("--class must be >= 1")
    certs = [freenilp.synthesize_sum_word(c), freenilp.synthesize_bracket_word(c)]
    certs += [freenilp.iterate_sum_word(c, n, certs[0]) for n in range(3, args.arity + 1)]
    out.record(_header(args, {"class": c, "arity": args.arity}, certs))
    ok = True
    for cert in certs:
        good = cert.verify()
        ok &= good
        out.record({"w": cert.flat_text(), "m": cert.m, "n": cert.n, "target": cert.target,
                    "arity": cert.arity, "residual": str(cert.residual), "verified": good,
                    "sha256": cert.digest()})
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_scheme_build(args, out: Output) -> int:
    cfg = _scheme_config(args)
    out.record(_header(args, cfg.as_dict()))
    try:
        s = _build(cfg)
    except cp.ClosureFailed as e:
        out.record({"closure": "FAIL", "reason": str(e), "witness": e.witness})
        return EXIT_FAIL
    cert = cp.verify_lattice_closure(s)
    out.record({"closure": "PASS", "certificate": cert.as_dict(), "weights": list(s.weights),
                "denominators": list(s.denominators), "algebra": s.algebra.to_text()})
    return EXIT_PASS


def _emit_points(patch, P, out: Output, args):
    if args.csv:
        out.raw(cp.patch_to_csv_text(patch, P))
        return
    for rec in cp.point_records(patch, P):
        out.raw(_dumps(rec) + "\n")


def cmd_modelset_gen(args, out: Output) -> int:
    cfg = _scheme_config(args)
    s = _build(cfg)
    patch = cp.enumerate_model_set(s, cfg.window, cfg.R)
    if patch.count > args.max_points:
        raise UsageError(f"patch has {patch.count} points, over --max-points {args.max_points}")
    complete = cp.enumeration_complete(s, cfg.window, cfg.R) if args.check_complete else None
    if not args.csv:
        out.record({**_header(args, cfg.as_dict()), "count": patch.count, "complete": complete,
                    "factor_sizes": [len(f) for f in patch.factors]})
    _emit_points(patch, patch.points(), out, args)
    return EXIT_FAIL if complete is False else EXIT_PASS


def cmd_pisot_gen(args, out: Output) -> int:
    try:
        ps = cp.pisot_patch(_fraction(args.a), _fraction(args.b), args.d, args.max_exp)
    except cp.NotPisot as e:
        raise UsageError(str(e)) from e
    if not args.csv:
        out.record({**_header(args, {"a": args.a, "b": args.b, "d": args.d, "max_exp": args.max_exp}),
                    "count": ps.count, "meta": ps.meta})
    _emit_points(ps, cp.sorted_values(ps), out, args)
    return EXIT_PASS


def cmd_plot_data(args, out: Output) -> int:
    args.csv = True
    if args.pisot:
        a, b, d, n = args.pisot.split(",")
        ps = cp.pisot_patch(_fraction(a), _fraction(b), int(d), int(n))
        out.raw(cp.patch_to_csv_text(ps, cp.sorted_values(ps)))
        return EXIT_PASS
    cfg = _scheme_config(args)
    patch = cp.enumerate_model_set(_build(cfg), cfg.window, cfg.R)
    radius = _fraction(args.radius) if args.radius else None
    if patch.count_in(radius) > args.max_points:
        raise UsageError("too many points; lower --radius or raise --max-points")
    out.raw(cp.patch_to_csv_text(patch, patch.points(radius)))
    return EXIT_PASS


def cmd_verify_delone(args, out: Output) -> int:
    cfg = _scheme_config(args)
    s = _build(cfg)
    patches = _two_scale_patches(cfg, s)
    cores = _cores(args, (cfg.R * cfg.core_fraction, 2 * cfg.R * cfg.core_fraction))
    cover = [c * _fraction(args.cover_fraction) for c in cores]
    out.record(_header(args, {**cfg.as_dict(), "cores": [str(c) for c in cores],
                              "cover_cores": [str(c) for c in cover], "grid_step": args.grid_step,
                              "metric": args.metric}))
    reps = []
    for patch, core, cc in zip(patches, cores, cover):
        rep = vf.delone_report(patch, core, args.grid_step, args.metric, cover_core=cc)
        rep.extra["R"] = str(patch.R)
        reps.append(rep)
        out.record(rep.as_dict())
    same_sep = reps[0].min_separation == reps[1].min_separation
    stable = vf.two_scale(reps[0].covering_radius_estimate, reps[1].covering_radius_estimate, args.tolerance)
    ok = all(r.passed for r in reps) and same_sep and stable
    out.record({"min_separation_identical": same_sep, "covering_radius_stable": stable,
                "passed": ok})
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_verify_approx(args, out: Output) -> int:
    cfg = _scheme_config(args)
    s = _build(cfg)
    patches = _two_scale_patches(cfg, s)
    cores = _cores(args, (cfg.R / 10, cfg.R / 5))
    out.record(_header(args, {**cfg.as_dict(), "cores": [str(c) for c in cores]}))
    sizes = []
    ok = True
    for patch, core in zip(patches, cores):
        prod = vf.product_patch(patch, 2, core)
        cert = vf.approx_certificate(patch, prod)
        replay = cert.replay(s)
        ok &= replay
        sizes.append(cert.size)
        out.record({"R": str(patch.R), "core": str(core), "products": prod.count,
                    "F_size": cert.size, "replay": replay,
                    "F": [s.to_field(f) for f in cert.F] if args.show_f else None})
    stable = sizes[0] == sizes[1]
    out.record({"F_sizes": sizes, "F_size_stable": stable, "passed": ok and stable})
    return EXIT_PASS if ok and stable else EXIT_FAIL


def cmd_verify_powers(args, out: Output) -> int:
    cfg = _scheme_config(args)
    s = _build(cfg)
    patch = cp.enumerate_model_set(s, cfg.window, cfg.R)
    core = _fraction(args.core) if args.core else cfg.R / 10
    out.record(_header(args, {**cfg.as_dict(), "k": args.k, "core": str(core)}))
    try:
        prod = vf.product_patch(patch, args.k, core, budget=args.budget)
    except vf.BudgetExceeded as e:
        out.record({"error": str(e), "partial_count": e.partial_count, "passed": False})
        return EXIT_FAIL
    rep = vf.min_separation(prod, core=core)
    out.record({"k": args.k, "count": prod.count, "partial_counts": prod.meta["partial_counts"],
                **rep.as_dict()})
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_verify_logimage(args, out: Output) -> int:
    cfg = _scheme_config(args)
    s = _build(cfg)
    c = s.G.c
    base = [freenilp.synthesize_sum_word(j) for j in range(1, c + 1)]
    n0 = 1
    for b in base:
        n0 *= b.n
    n = args.n or n0
    cores = _cores(args, (cfg.R / 5, cfg.R / 4))
    out.record(_header(args, {**cfg.as_dict(), "n": n, "n0": n0, "cores": [str(x) for x in cores],
                              "samples": args.samples, "grid_step": args.grid_step}, base))
    patch = cp.enumerate_model_set(s, cfg.window, cfg.R)
    wid = vf.check_word_sum_identity(patch, base[-1], args.samples, args.seed)
    out.record({"word_identity": wid.__dict__})
    reps = []
    for core in cores:
        cover = max(core - 2, core / 2)
        rep = vf.log_image_delone(patch, n, n0, core, args.grid_step, cover_core=cover)
        reps.append(rep)
        out.record(rep.as_dict())
    stable = vf.two_scale(reps[0].covering_radius_estimate, reps[1].covering_radius_estimate, args.tolerance)
    ok = wid.passed and all(r.passed for r in reps) and stable
    out.record({"covering_radius_stable": stable, "passed": ok})
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_verify_linearize(args, out: Output) -> int:
    s = cp.build_scheme(liealg.abelian(1), args.d, (1,))
    R = _fraction(args.R)
    win = cp.Window((_fraction(args.window),))
    patch = cp.enumerate_model_set(s, win, 2 * R)
    A, B = _fraction(args.A), _fraction(args.B)
    out.record(_header(args, {"d": args.d, "R": str(R), "window": str(win), "A": str(A), "B": str(B)}))
    res = vf.linearize_hom(patch, vf.hom_formula(patch, A, B), R)
    coef_ok = abs(float(res.phi_tilde[0, 0]) - float(A)) <= 1e-6
    out.record({**res.as_dict(), "coefficient_error": abs(float(res.phi_tilde[0, 0]) - float(A)),
                "rho_sup": res.residual_2R})
    ok = res.passed and coef_ok
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_verify_counterexample(args, out: Output) -> int:
    try:
        rep = vf.counterexample_powers(args.k, args.n_max)
    except ValueError as e:
        raise UsageError(str(e)) from e
    out.record(_header(args, {"k": args.k, "n_max": args.n_max}))
    out.record(rep.as_dict())
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_decompose(args, out: Output) -> int:
    g = _load_algebra(args.algebra, args.d)
    res = liealg.decompose_indecomposable(g)
    out.record(_header(args, {"algebra": args.algebra, "d": args.d}))
    for f in res.factors:
        out.record({"dim": f.algebra.dim, "invariants": f.invariants,
                    "ideal_basis": [[format_element(x) for x in v] for v in f.ideal_basis]})
    out.record({"r": res.r, "indecomposable": res.indecomposable,
                "classes": [[inv, mult, decided] for inv, mult, decided in res.classes]})
    return EXIT_PASS


def _vectors(text: str, d) -> list:
    try:
        return [[parse_element(x, d) for x in row.split(",")] for row in text.split(";") if row.strip()]
    except ValueError as e:
        raise UsageError(str(e)) from e


def cmd_extend_hom(args, out: Output) -> int:
    g = _load_algebra(args.source, args.d)
    h = _load_algebra(args.target, args.d)
    gens = _vectors(args.generators, args.d)
    ims = _vectors(args.images, args.d)
    out.record(_header(args, {"source": args.source, "target": args.target,
                              "generators": args.generators, "images": args.images}))
    try:
        mat = liealg.extend_lattice_hom(g, gens, h, ims)
    except liealg.GeneratorsDoNotSpan as e:
        raise UsageError(str(e)) from e
    except liealg.NotAHomomorphism as e:
        out.record({"extension": "FAIL", "reason": str(e), "witness": getattr(e, "witness", None)})
        return EXIT_FAIL
    out.record({"extension": "PASS", "matrix": [[format_element(x) for x in row] for row in mat]})
    return EXIT_PASS


# -- parser ----------------------------------------------------------------------------

def _scheme_args(p):
    p.add_argument("--config", help="scheme config file ([scheme] and [modelset] sections)")
    p.add_argument("--algebra", help="builtin name (h3, filiform4, abelianN) or algebra file")
    p.add_argument("--d", type=int)
    p.add_argument("--denominators")
    p.add_argument("--window", help="comma-separated box half-widths, e.g. 2,2,4")
    p.add_argument("--R")
    p.add_argument("--core-fraction", dest="core_fraction")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="parallelism cap (results do not depend on it)")
    common.add_argument("--tolerance", type=float, default=0.10, help="relative two-scale tolerance")
    common.add_argument("--format", choices=("text", "jsonl"), default="text")

    p = _Parser(prog="nilmodel", description="Approximate lattices in nilpotent Lie groups.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("bch", parents=[common], help="exact BCH series")
    q.add_argument("--class", dest="class_", type=int, required=True)
    q.set_defaults(func=cmd_bch)

    q = sub.add_parser("words", parents=[common], help="word certificates")
    q.add_argument("--class", dest="class_", type=int, required=True)
    q.add_argument("--arity", type=int, default=3)
    q.set_defaults(func=cmd_words)

    sch = sub.add_parser("scheme").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = sch.add_parser("build", parents=[common])
    _scheme_args(q)
    q.set_defaults(func=cmd_scheme_build)

    ms = sub.add_parser("modelset").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = ms.add_parser("gen", parents=[common])
    _scheme_args(q)
    q.add_argument("--max-points", type=int, default=1_000_000)
    q.add_argument("--check-complete", action="store_true")
    q.add_argument("--csv", action="store_true")
    q.set_defaults(func=cmd_modelset_gen)

    ps = sub.add_parser("pisot").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = ps.add_parser("gen", parents=[common])
    q.add_argument("--a", default="1")
    q.add_argument("--b", default="1")
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--max-exp", type=int, default=12)
    q.add_argument("--csv", action="store_true")
    q.set_defaults(func=cmd_pisot_gen)

    vs = sub.add_parser("verify").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = vs.add_parser("delone", parents=[common])
    _scheme_args(q)
    q.add_argument("--cores")
    q.add_argument("--cover-fraction", default="1/2")
    q.add_argument("--grid-step", type=float, default=0.25)
    q.add_argument("--metric", choices=("group_quasi", "euclidean"), default="group_quasi")
    q.set_defaults(func=cmd_verify_delone)

    q = vs.add_parser("approx", parents=[common])
    _scheme_args(q)
    q.add_argument("--cores")
    q.add_argument("--show-f", action="store_true")
    q.set_defaults(func=cmd_verify_approx)

    q = vs.add_parser("powers", parents=[common])
    _scheme_args(q)
    q.add_argument("--k", type=int, default=3)
    q.add_argument("--core")
    q.add_argument("--budget", type=int, default=5 * 10**8)
    q.set_defaults(func=cmd_verify_powers)

    q = vs.add_parser("logimage", parents=[common])
    _scheme_args(q)
    q.add_argument("--n", type=int)
    q.add_argument("--cores")
    q.add_argument("--samples", type=int, default=1000)
    q.add_argument("--grid-step", type=float, default=0.25)
    q.set_defaults(func=cmd_verify_logimage)

    q = vs.add_parser("linearize", parents=[common])
    q.add_argument("--d", type=int, default=2)
    q.add_argument("--A", default="2")
    q.add_argument("--B", default="1")
    q.add_argument("--R", default="100000")
    q.add_argument("--window", default="1")
    q.set_defaults(func=cmd_verify_linearize)

    q = vs.add_parser("counterexample", parents=[common])
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--n-max", type=int, default=8)
    q.set_defaults(func=cmd_verify_counterexample)

    q = sub.add_parser("decompose", parents=[common], help="split into indecomposable ideals")
    q.add_argument("--algebra", required=True)
    q.add_argument("--d", type=int)
    q.set_defaults(func=cmd_decompose)

    q = sub.add_parser("extend-hom", parents=[common], help="Malcev extension of a lattice map")
    q.add_argument("--source", required=True)
    q.add_argument("--target", required=True)
    q.add_argument("--generators", required=True, help="rows separated by ';', entries by ','")
    q.add_argument("--images", required=True)
    q.add_argument("--d", type=int)
    q.set_defaults(func=cmd_extend_hom)

    q = sub.add_parser("plot-data", parents=[common], help="CSV of embeddings")
    _scheme_args(q)
    q.add_argument("--radius")
    q.add_argument("--pisot", help="a,b,d,max_exp for a Pisot patch instead of a model set")
    q.add_argument("--max-points", type=int, default=1_000_000)
    q.set_defaults(func=cmd_plot_data)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.command_path = " ".join(x for x in (args.command, getattr(args, "sub", None)) if x)
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        out = Output(args)
        code = args.func(args, out)
        out.flush()
        return code
    except UsageError as e:
        print(f"nilmodel: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
