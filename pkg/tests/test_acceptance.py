"""Acceptance battery: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even
under output capture) or directly with ``python tests/test_acceptance.py``.
A criterion whose sub-checks do not all hold fails its test.
"""
import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from nilmodel import cutproject as cp, freenilp as fn, liealg as la, linalg, verify as vf
from nilmodel.exactfield import Field, embed

SEP_THRESHOLD = vf.MIN_SEPARATION_THRESHOLD
REL = 0.10


def report(capsys, n: int, checks: dict, detail: str = ""):
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    if failed:
        line += " | failed: " + "; ".join(failed)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


# -- fixtures shared by several criteria ---------------------------------------------------

@pytest.fixture(scope="module")
def h3():
    return cp.build_scheme("h3", 2, (1, 1, 2))


@pytest.fixture(scope="module")
def lam20(h3):
    return cp.enumerate_model_set(h3, cp.Window.parse("2,2,4"), 20)


@pytest.fixture(scope="module")
def lam40(h3):
    return cp.enumerate_model_set(h3, cp.Window.parse("2,2,4"), 40)


# -- 1 ---------------------------------------------------------------------------------------

def test_criterion_1_bch(capsys):
    t0 = time.time()
    b3 = fn.hall_basis(2, 3)
    X, Y = fn.FreeNilpElem.generator(b3, 0), fn.FreeNilpElem.generator(b3, 1)
    XY = X.bracket(Y)
    want3 = X + Y + XY * Fraction(1, 2) + X.bracket(XY) * Fraction(1, 12) - Y.bracket(XY) * Fraction(1, 12)
    anti = []
    for c in range(1, 6):
        b = fn.hall_basis(2, c)
        U, V = fn.FreeNilpElem.generator(b, 0), fn.FreeNilpElem.generator(b, 1)
        anti.append(fn.bch(U, V) == -fn.bch(-V, -U))
    b34 = fn.hall_basis(3, 4)
    A, B, C = (fn.FreeNilpElem.generator(b34, i) for i in range(3))
    assoc = fn.bch(fn.bch(A, B), C) == fn.bch(A, fn.bch(B, C))
    elapsed = time.time() - t0
    report(
        capsys, 1,
        {
            "class 2 = X+Y+1/2[X,Y]": str(fn.bch_series(2)) == "X + Y + 1/2 [X,Y]",
            "class 3 adds +-1/12 double brackets": fn.bch_series(3) == want3,
            "antisymmetry c<=5": all(anti),
            "associativity class 4, 3 generators": assoc,
            "runtime < 60 s": elapsed < 60,
        },
        f"BCH exact to class 5, {elapsed:.2f} s",
    )


# -- 2 ---------------------------------------------------------------------------------------

def test_criterion_2_word_certificates(capsys):
    checks = {}
    sizes = []
    for c in (1, 2, 3, 4):
        s, b = fn.synthesize_sum_word(c), fn.synthesize_bracket_word(c)
        tag = " (stretch)" if c == 4 else ""
        checks[f"c={c}{tag} residuals zero"] = s.residual.is_zero() and b.residual.is_zero() and s.verify() and b.verify()
        sizes.append(f"c{c}:m={s.m},n={s.n}")
    w2 = fn.synthesize_sum_word(2)
    witness = fn.parse_word("(x y)(y x)")
    checks["c=2 equals (xy)(yx) with m=2"] = w2.m == 2 and (
        fn.free_log_of_word(w2.word, 2, 2) == fn.free_log_of_word(witness, 2, 2)
    )
    for c in (1, 2, 3):
        for n in (2, 3, 4):
            cert = fn.iterate_sum_word(c, n)
            checks[f"w_({c},{n}) = m^(n-1) sum"] = cert.verify() and cert.m == fn.synthesize_sum_word(c).m ** (n - 1)
    report(capsys, 2, checks, ", ".join(sizes))


# -- 3 ---------------------------------------------------------------------------------------

def test_criterion_3_heisenberg(capsys, h3, lam20, lam40):
    t0 = time.time()
    W = cp.Window.parse("2,2,4")
    complete = cp.enumeration_complete(h3, W, 20)
    P = lam20.points(3)
    exact = bool(lam20.contains(P).all()) and lam20.count == 31_506_531
    sym = bool(lam20.contains(-lam20.points(5)).all())
    has_e = bool(lam20.contains(np.zeros((1, 6), dtype=np.int64))[0])

    seps = [vf.min_separation(p, core=p.R / 4) for p in (lam20, lam40)]
    covs = [vf.covering_radius(p, 0.25, p.R / 8) for p in (lam20, lam40)]
    certs = []
    for p in (lam20, lam40):
        prod = vf.product_patch(p, 2, p.R / 10)
        certs.append(vf.approx_certificate(p, prod))
    elapsed = time.time() - t0
    s1, s2 = (r.min_separation for r in seps)
    c1, c2 = (r.covering_radius_estimate for r in covs)
    f1, f2 = (c.size for c in certs)
    report(
        capsys, 3,
        {
            "enumeration exact": exact,
            "enumeration complete under box doubling": complete,
            "min separation > 1e-9": min(s1, s2) > SEP_THRESHOLD,
            "min separation identical R=20 vs R=40": s1 == s2,
            "covering radius finite": bool(np.isfinite([c1, c2]).all()) and all(r.region_sound for r in covs),
            "covering radius within 10%": vf.two_scale(c1, c2, REL),
            "approx certificates replay": all(c.replay(h3) for c in certs),
            "|F| equal at both scales": f1 == f2,
            "P0 symmetric with identity": sym and has_e,
            "runtime < 10 min": elapsed < 600,
        },
        f"count={lam20.count} sep={s1:.6f}/{s2:.6f} cover={c1:.4f}/{c2:.4f} |F|={f1}/{f2} {elapsed:.0f} s",
    )


# -- 4 ---------------------------------------------------------------------------------------

def test_criterion_4_powers(capsys, lam20):
    cube = vf.product_patch(lam20, 3, 2)
    sep = vf.min_separation(cube, core=2)
    checks = {"Lambda^3 min separation > 0 in core": sep.passed and sep.min_separation > SEP_THRESHOLD}
    parts = [f"|Lambda^3 core 2|={cube.count} sep={sep.min_separation:.6f}"]
    for k in (2, 3):
        rep = vf.counterexample_powers(k, 12)
        checks[f"k={k}: nonzero k-sums >= k-1"] = rep.k_sums_bounded
        checks[f"k={k}: (k+1)-sums within 1e-3 of 0"] = (
            rep.witnesses_found == rep.witnesses_expected and 0 < rep.min_nonzero_k1_sum < Fraction(1, 1000)
        )
        parts.append(f"k={k}: min|k-sum|={rep.min_nonzero_k_sum} min|(k+1)-sum|={float(rep.min_nonzero_k1_sum):.2e}")
    report(capsys, 4, checks, "; ".join(parts))


# -- 5 ---------------------------------------------------------------------------------------

def test_criterion_5_pisot(capsys):
    gamma = Field(2).one + Field(2).sqrt
    bound = Fraction(1000, 3415)
    ps = {n: cp.pisot_patch(1, 1, 2, n) for n in (12, 14)}
    rows = cp.sorted_values(ps[12])
    diffs = rows[1:] - rows[:-1]
    exact_gap_ok = all(abs(ps[12].scheme.to_field(r)[0]) >= bound for r in diffs)
    sep = vf.min_separation(ps[12])
    covers, sizes = [], []
    for n, p in ps.items():
        core = float(embed(gamma ** (n - 2)))
        covers.append(vf.covering_radius(p, 0.5, core).covering_radius_estimate)
        pcore = Fraction(int(embed(gamma ** (n - 4))))
        cert = vf.approx_certificate(p, vf.product_patch(p, 2, pcore))
        assert cert.replay(p.scheme)
        sizes.append(cert.size)
    report(
        capsys, 5,
        {
            "min gap >= 1/3.415 (exact scan)": exact_gap_ok and sep.min_separation >= float(bound),
            "covering radius within 10% (cutoff 12 vs 14)": vf.two_scale(*covers, REL),
            "|F| stable (cutoff 12 vs 14)": sizes[0] == sizes[1],
        },
        f"gap={sep.min_separation:.4f} cover={covers[0]:.2f}/{covers[1]:.2f} |F|={sizes[0]}/{sizes[1]}",
    )


# -- 6 ---------------------------------------------------------------------------------------

def test_criterion_6_log_image(capsys, h3, lam20):
    wid = vf.check_word_sum_identity(lam20, fn.synthesize_sum_word(2), 1000, seed=0)
    n0 = vf.n0_from_certificates(h3.G.c)
    small = cp.enumerate_model_set(h3, cp.Window.parse("1/2,1/2,1/2"), 12)
    reps = [vf.log_image_delone(small, n0, n0, core, 0.25, cover_core=core - 2) for core in (4, 5)]
    s1, s2 = (r.min_separation for r in reps)
    c1, c2 = (r.covering_radius_estimate for r in reps)
    report(
        capsys, 6,
        {
            "word identity on 1000 exact pairs": wid.passed and wid.samples >= 1000,
            "Euclidean Delone checks": all(r.passed for r in reps),
            "two-scale stability": s1 == s2 and vf.two_scale(c1, c2, REL),
        },
        f"n0={n0} sep={s1:.5f}/{s2:.5f} cover={c1:.4f}/{c2:.4f} points={reps[0].points_in_core}/{reps[1].points_in_core}",
    )


# -- 7 ---------------------------------------------------------------------------------------

def test_criterion_7_linearization(capsys):
    s = cp.build_scheme(la.abelian(1), 2, (1,))
    R = 10**5
    patch = cp.enumerate_model_set(s, cp.Window.parse("1"), 2 * R)
    checks = {}
    parts = []
    for A, B in ((2, 1), (Fraction(3, 2), Fraction(-1, 3)), (1, 0)):
        res = vf.linearize_hom(patch, vf.hom_formula(patch, A, B), R)
        err = abs(res.phi_tilde[0, 0] - float(A))
        checks[f"A={A},B={B}: coefficient within 1e-6"] = err <= 1e-6
        checks[f"A={A},B={B}: growth ratio <= 1.05"] = res.growth_ratio <= vf.GROWTH_TOLERANCE
        parts.append(f"A={A}: err={err:.1e} ratio={res.growth_ratio:.5f}")
    sig = vf.linearize_hom(patch, vf.hom_formula(patch, 0, 1), R)
    checks["phi=sigma gives 0"] = abs(sig.phi_tilde[0, 0]) <= 1e-6
    checks["phi=sigma residual <= window"] = sig.residual_R <= 1
    parts.append(f"sigma: phi={sig.phi_tilde[0, 0]:.1e} residual={sig.residual_R:.10f}")
    report(capsys, 7, checks, "; ".join(parts))


# -- 8 ---------------------------------------------------------------------------------------

def test_criterion_8_decomposition(capsys):
    h = la.heisenberg()
    hr = la.direct_sum(h, la.abelian(1))
    base = la.decompose_indecomposable(hr).class_multiset()
    rng = random.Random(2024)
    same = 0
    for _ in range(20):
        while True:
            M = [[Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(4)] for _ in range(4)]
            if linalg.rank(M) == 4:
                break
        same += la.decompose_indecomposable(hr.change_basis(M)).class_multiset() == base
    dims = lambda g: sorted((f.algebra.dim for f in la.decompose_indecomposable(g).factors), reverse=True)
    report(
        capsys, 8,
        {
            "h3 indecomposable": la.decompose_indecomposable(h).indecomposable,
            "h3 + R -> {3,1}": dims(hr) == [3, 1],
            "R^3 -> 1,1,1": dims(la.abelian(3)) == [1, 1, 1],
            "20 basis changes keep the class multiset": same == 20,
        },
        f"{same}/20 basis changes invariant",
    )


# -- 9 ---------------------------------------------------------------------------------------

def test_criterion_9_malcev(capsys):
    h = la.heisenberg()
    gens = [h.e(0), h.e(1), h.e(2)]
    ident = la.extend_lattice_hom(h, gens, h, gens) == linalg.identity(3)
    a = la.abelian(2)
    ab = la.extend_lattice_hom(h, gens, a, [a.e(0), a.e(1), a.zero()]) == [[1, 0, 0], [0, 1, 0]]
    line = la.abelian(1)
    witness = None
    try:
        la.extend_lattice_hom(h, gens, line, [line.e(0)] * 3)
    except la.NotAHomomorphism as e:
        witness = e.witness
    report(
        capsys, 9,
        {
            "identity extends to identity": ident,
            "abelianization extends to the projection": ab,
            "non-homomorphism rejected with bracket witness": witness is not None and witness[2] != witness[3],
        },
        f"witness={witness and witness[:2]}",
    )


# -- 10 --------------------------------------------------------------------------------------

def test_criterion_10_abelianization(capsys, lam20):
    ab = cp.abelianize_patch(lam20)
    ab_reps = [vf.delone_report(ab, core, 0.05, cover_core=core - 2) for core in (5, 10)]
    der = []
    for core in (2, 4):
        D = cp.intersect_derived(vf.product_patch(lam20, 2, core))
        der.append((D, vf.delone_report(D, core**2, 0.05, cover_core=core**2 / 2)))
    a1, a2 = ab_reps
    (D1, d1), (D2, d2) = der
    report(
        capsys, 10,
        {
            "abelianized patch Delone": a1.passed and a2.passed,
            "abelianized two-scale": a1.min_separation == a2.min_separation
            and vf.two_scale(a1.covering_radius_estimate, a2.covering_radius_estimate, REL),
            "Lambda^2 in [G,G] nonempty": D1.count > 0 and D2.count > 0,
            "Lambda^2 in [G,G] Delone (1-D)": d1.passed and d2.passed and D1.scheme.dim == 1,
            "Lambda^2 in [G,G] two-scale": d1.min_separation == d2.min_separation
            and vf.two_scale(d1.covering_radius_estimate, d2.covering_radius_estimate, REL),
        },
        f"ab sep={a1.min_separation:.4f} cover={a1.covering_radius_estimate:.3f}/{a2.covering_radius_estimate:.3f}; "
        f"[G,G] points={D1.count}/{D2.count} sep={d1.min_separation:.5f} "
        f"cover={d1.covering_radius_estimate:.5f}/{d2.covering_radius_estimate:.5f}",
    )


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
