import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nilmodel import liealg as la, linalg
from nilmodel.exactfield import QuadFieldElem


def random_basis(rng: random.Random, n: int):
    while True:
        M = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        if linalg.rank(M) == n:
            return M


def test_jacobi_violation_reported():
    # [e1,e2]=e3 with [e1,e3]=e1 breaks Jacobi on (e1, e2, e3)
    with pytest.raises(la.JacobiViolation):
        la.validate_algebra(3, None, [(0, 1, 2, 1), (0, 2, 0, 1)])


def test_sl2_not_nilpotent():
    with pytest.raises(la.NotNilpotent):
        la.validate_algebra(3, None, [(0, 1, 2, 1), (2, 0, 0, 2), (2, 1, 1, -2)])


def test_heisenberg_series():
    h = la.heisenberg()
    filt = la.lower_central_series(h)
    assert filt.dims == (3, 1, 0)
    assert filt.nilpotency_class == 2
    assert la.standard_weights(h) == (1, 1, 2)
    assert la.standard_weights(la.filiform4()) == (1, 1, 2, 3)


def test_adapted_basis_of_scrambled_heisenberg():
    h = la.heisenberg().change_basis([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    g, w = la.to_adapted(h)
    assert w == (1, 1, 2)
    assert la.standard_weights(g) == (1, 1, 2)


def test_direct_sum_and_field_mismatch():
    s = la.direct_sum(la.heisenberg(), la.abelian(2))
    assert s.dim == 5 and s.nilpotency_class == 2
    with pytest.raises(la.FieldMismatchError):
        la.direct_sum(la.heisenberg(2), la.abelian(1))


def test_centroid_of_heisenberg():
    # scalars plus maps g -> center vanishing on [g, g]
    assert len(la.centroid(la.heisenberg())) == 3


@pytest.mark.parametrize(
    "g, dims",
    [
        (la.heisenberg(), [3]),
        (la.direct_sum(la.heisenberg(), la.abelian(1)), [3, 1]),
        (la.abelian(3), [1, 1, 1]),
        (la.filiform4(), [4]),
        (la.direct_sum(la.heisenberg(), la.heisenberg()), [3, 3]),
    ],
)
def test_decomposition_dims(g, dims):
    res = la.decompose_indecomposable(g)
    assert sorted((f.algebra.dim for f in res.factors), reverse=True) == dims


def test_factors_are_ideals_spanning_g():
    g = la.direct_sum(la.heisenberg(), la.abelian(1))
    res = la.decompose_indecomposable(g)
    vecs = [v for f in res.factors for v in f.ideal_basis]
    assert linalg.rank(vecs) == g.dim
    for f in res.factors:
        for v in f.ideal_basis:
            for i in range(g.dim):
                assert linalg.coordinates(f.ideal_basis, g.bracket(g.e(i), v)) is not None


@given(st.integers(0, 10**6))
def test_class_multiset_invariant_under_basis_change(seed):
    g = la.direct_sum(la.heisenberg(), la.abelian(1))
    base = la.decompose_indecomposable(g).class_multiset()
    h = g.change_basis(random_basis(random.Random(seed), 4))
    assert la.decompose_indecomposable(h).class_multiset() == base


def test_quadratic_field_algebra():
    r2 = QuadFieldElem(0, 1, 2)
    g = la.validate_algebra(3, 2, [(0, 1, 2, r2)])
    assert g.nilpotency_class == 2
    assert g.conjugate_algebra().const(0, 1, 2) == -r2


def test_parse_roundtrip(tmp_path):
    g = la.filiform4(2)
    p = tmp_path / "f4.txt"
    p.write_text(g.to_text())
    assert la.load_algebra(p) == g
    with pytest.raises(la.InvalidAlgebra):
        la.parse_algebra("dim 2\n2 1 1 1\n")


def test_extend_identity_and_abelianization():
    h = la.heisenberg()
    gens = [h.e(0), h.e(1), h.e(2)]
    assert la.extend_lattice_hom(h, gens, h, gens) == linalg.identity(3)
    a = la.abelian(2)
    m = la.extend_lattice_hom(h, gens, a, [a.e(0), a.e(1), a.zero()])
    assert m == [[1, 0, 0], [0, 1, 0]]


def test_extend_rejects_non_hom():
    h = la.heisenberg()
    gens = [h.e(0), h.e(1), h.e(2)]
    with pytest.raises(la.NotAHomomorphism) as ei:
        la.extend_lattice_hom(h, gens, h, [h.e(0), h.e(1), h.zero()])
    i, j, lhs, rhs = ei.value.witness
    assert (i, j) == (0, 1) and lhs != rhs


def test_extend_needs_spanning_generators():
    h = la.heisenberg()
    with pytest.raises(la.GeneratorsDoNotSpan):
        la.extend_lattice_hom(h, [h.e(0), h.e(1)], h, [h.e(0), h.e(1)])
