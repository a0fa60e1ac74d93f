from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nilmodel import cutproject as cp, freenilp as fn, verify as vf


def z_patch(line_scheme, lo, hi):
    rows = np.array([[n, 0] for n in range(lo, hi + 1)], dtype=np.int64)
    return cp.PointSet(line_scheme, rows, {"region_radius": str(max(-lo, hi))})


def brute_min_quasi_dist(scheme, P):
    X = scheme.principal(P)
    best = np.inf
    for i in range(0, len(X), 256):
        A = X[i : i + 256]
        D = scheme.G.quasi_norm_float(scheme.G.mul_float(-A[:, None, :], X[None, :, :]))
        idx = np.arange(i, i + len(A))
        D[np.arange(len(A)), idx] = np.inf
        best = min(best, float(D.min()))
    return best


# -- integers -------------------------------------------------------------------------

def test_integers_separation_and_cover(line_scheme):
    Z = z_patch(line_scheme, -10, 10)
    assert vf.min_separation(Z).min_separation == 1.0
    cov = vf.covering_radius(Z, 0.01, 5)
    assert cov.covering_radius_estimate == pytest.approx(0.5, abs=0.01)
    assert cov.region_sound


def test_integers_product_and_certificate(line_scheme):
    Z1 = z_patch(line_scheme, -1, 1)
    prod = vf.product_patch(Z1, 2, 2)
    assert sorted(prod.pts[:, 0].tolist()) == [-2, -1, 0, 1, 2]
    Z = z_patch(line_scheme, -40, 40)
    cert = vf.approx_certificate(Z, vf.product_patch(Z, 2, 10))
    assert cert.size == 1 and not cert.F.any()
    assert cert.replay(line_scheme)


def test_empty_core(line_scheme):
    with pytest.raises(vf.EmptyCore):
        vf.min_separation(z_patch(line_scheme, 0, 0))
    with pytest.raises(ValueError):
        vf.covering_radius(z_patch(line_scheme, -3, 3), 0, 1)


# -- Heisenberg -----------------------------------------------------------------------

GOLDEN_SEPARATION = 0.18850439234335528


def test_separation_matches_brute_force(h3_patch):
    P = h3_patch.points(2)
    oracle = brute_min_quasi_dist(h3_patch.scheme, P)
    rep = vf.min_separation(h3_patch, core=2)
    assert rep.min_separation == pytest.approx(oracle, rel=1e-12)
    assert rep.min_separation == pytest.approx(GOLDEN_SEPARATION, rel=1e-12)
    a, b = (np.array(r) for r in rep.separation_witness)
    assert h3_patch.contains(np.stack([a, b])).all()


@settings(max_examples=20)
@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3))
def test_nearest_matches_brute_force(h3_patch, q):
    s = h3_patch.scheme
    P = h3_patch.points(2)
    idx = vf.NeighborIndex(s, P)
    g = np.array([q])
    arg, dist = idx.nearest(g, rho0=0.5, rho_max=64)
    D = s.G.quasi_norm_float(s.G.mul_float(-s.principal(P), g))
    assert dist[0] == pytest.approx(D.min(), rel=1e-9)


def brute_square(patch, core):
    s = patch.scheme
    F = patch.points(core)
    out = []
    for i in range(0, len(F), 200):
        A = np.repeat(F[i : i + 200], len(F), axis=0)
        B = np.tile(F, (len(F[i : i + 200]), 1))
        R = s.law.mul(A, B)
        out.append(R[s.in_ball(R, core)])
    return cp.canonical(np.vstack(out))


def test_square_matches_brute_force(h3_patch):
    core = Fraction(3, 2)
    fast = vf.product_patch(h3_patch, 2, core)
    generic = vf.product_patch(cp.PointSet(h3_patch.scheme, h3_patch.points(core)), 2, core)
    oracle = brute_square(h3_patch, core)
    assert np.array_equal(cp.canonical(fast.pts), oracle)
    assert np.array_equal(cp.canonical(generic.pts), oracle)


def test_square_golden_count(h3_patch):
    assert vf.product_patch(h3_patch, 2, 2).count == 26_051


def test_square_uniformly_discrete(h3_patch):
    # the patch is symmetric, so this set is also P0^-1 P0
    sq = vf.product_patch(h3_patch, 2, 2)
    assert vf.min_separation(sq, core=2).min_separation > vf.MIN_SEPARATION_THRESHOLD


def test_budget_exceeded(h3_patch):
    with pytest.raises(vf.BudgetExceeded) as ei:
        vf.product_patch(h3_patch, 3, 2, budget=10)
    assert ei.value.partial_count > 0


def test_approx_certificate_heisenberg(h3_patch):
    prod = vf.product_patch(h3_patch, 2, 2)
    cert = vf.approx_certificate(h3_patch, prod)
    assert cert.replay(h3_patch.scheme)
    assert (cert.f_index >= 0).all()
    assert h3_patch.contains(cert.lam).all()
    assert cert.size == 44


@pytest.mark.parametrize("window", ["1,1,2", "2,2,4", "3,1,2"])
def test_relatively_dense_implies_approximate_subgroup(h3_scheme, window):
    patch = cp.enumerate_model_set(h3_scheme, cp.Window.parse(window), 12)
    cov = vf.covering_radius(patch, 0.25, 1.5)
    assert np.isfinite(cov.covering_radius_estimate)
    cert = vf.approx_certificate(patch, vf.product_patch(patch, 2, 1.5))
    assert cert.replay(h3_scheme)


# -- word identities ------------------------------------------------------------------

def test_word_identity_heisenberg(h3_patch):
    rep = vf.check_word_sum_identity(h3_patch, fn.synthesize_sum_word(2), 1000, seed=1)
    assert rep.passed and rep.samples == 1000 and rep.failures == 0


def test_bracket_word_identity(h3_patch):
    rep = vf.check_word_sum_identity(h3_patch, fn.synthesize_bracket_word(2), 200, seed=2)
    assert rep.passed


def test_word_identity_against_identity(h3_patch):
    s = h3_patch.scheme
    cert = fn.synthesize_sum_word(3)
    x = h3_patch.points(2)[:50]
    got = vf._eval_word_rows(s, cert.word, [x, np.zeros_like(x)])
    assert np.array_equal(got, cert.m * x)


def test_word_class_too_low(h3_patch):
    with pytest.raises(ValueError):
        vf.check_word_sum_identity(h3_patch, fn.synthesize_sum_word(1), 10)


def test_n0():
    assert vf.n0_from_certificates(1) == 2
    assert vf.n0_from_certificates(2) == 8
    assert vf.n0_from_certificates(3) == 336


def test_log_image_small(h3_scheme):
    patch = cp.enumerate_model_set(h3_scheme, cp.Window.parse("1/2,1/2,1/2"), 8)
    with pytest.raises(ValueError):
        vf.log_image_delone(patch, 4, 8, 3, 0.25)
    rep = vf.log_image_delone(patch, 8, 8, 3, 0.5, cover_core=1)
    assert rep.passed and rep.extra["n0"] == 8


# -- linearisation --------------------------------------------------------------------

@pytest.fixture(scope="module")
def q2_patch(line_scheme):
    return cp.enumerate_model_set(line_scheme, cp.Window.parse("1"), 2 * 10**5)


def test_linearize_inclusion(q2_patch):
    res = vf.linearize_hom(q2_patch, vf.hom_formula(q2_patch, 1, 0), 10**5)
    assert res.phi_tilde[0, 0] == pytest.approx(1, abs=1e-12)
    assert res.residual_R < 1e-6 and res.passed


def test_linearize_sigma(q2_patch):
    res = vf.linearize_hom(q2_patch, vf.hom_formula(q2_patch, 0, 1), 10**5)
    assert abs(res.phi_tilde[0, 0]) < 1e-6
    assert res.residual_R <= 1
    assert res.passed


@given(st.fractions(min_value=-5, max_value=5, max_denominator=7), st.fractions(min_value=-5, max_value=5, max_denominator=7))
@settings(max_examples=15)
def test_linearize_recovers_coefficient(q2_patch, A, B):
    res = vf.linearize_hom(q2_patch, vf.hom_formula(q2_patch, A, B), 10**5)
    err = abs(res.phi_tilde[0, 0] - float(A))
    assert err <= 1e-6
    # |B sigma(x) + (A - phi) x| on |x| <= R with |sigma(x)| <= 1
    assert res.residual_R <= abs(float(B)) + err * 10**5 + 1e-9


def test_linearize_needs_abelian(h3_scheme):
    patch = cp.enumerate_model_set(h3_scheme, cp.Window.parse("1,1,1"), 2)
    with pytest.raises(ValueError):
        vf.linearize_hom(patch, np.zeros((patch.count, 3)), 1)


def test_linearize_rank_deficient(line_scheme):
    zero = cp.PointSet(line_scheme, np.zeros((1, 2), dtype=np.int64))
    with pytest.raises(vf.RankDeficient):
        vf.linearize_hom(zero, np.zeros((1, 1)), 1)


# -- counterexample -------------------------------------------------------------------

def test_counterexample_k3():
    rep = vf.counterexample_powers(3, 8)
    assert rep.min_nonzero_k_sum >= 2
    assert rep.witnesses_found == rep.witnesses_expected == 7
    assert rep.passed


@pytest.mark.parametrize("k, expected", [(2, Fraction(7, 4)), (3, Fraction(22, 9))])
def test_counterexample_min_sums(k, expected):
    # smallest nonzero |k-fold sum|, checked by the exhaustive enumeration inside
    assert vf.counterexample_powers(k, 6).min_nonzero_k_sum == expected


def test_counterexample_args():
    with pytest.raises(ValueError):
        vf.counterexample_powers(1, 5)
    with pytest.raises(ValueError):
        vf.counterexample_powers(2, 2)


def test_two_scale():
    assert vf.two_scale(1.0, 1.05)
    assert not vf.two_scale(1.0, 1.2)
