from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, strategies as st

from nilmodel import freenilp as fn

# -- matrix oracle: strictly upper triangular (c+1)x(c+1) matrices form a
# nilpotent algebra of class c, so every class-c identity must hold there


def mzero(n):
    return [[Fraction(0)] * n for _ in range(n)]


def mmul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]


def madd(a, b, s=1):
    return [[x + s * y for x, y in zip(r, q)] for r, q in zip(a, b)]


def mscale(a, s):
    return [[x * s for x in r] for r in a]


def mexp(a):
    n = len(a)
    out, p = mzero(n), [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(n):
        out = madd(out, mscale(p, Fraction(1, factorial(k))))
        p = mmul(p, a)
    return out


def mlog(g):
    n = len(g)
    m = madd(g, [[Fraction(int(i == j)) for j in range(n)] for i in range(n)], -1)
    out, p = mzero(n), m
    for k in range(1, n):
        out = madd(out, mscale(p, Fraction((-1) ** (k + 1), k)))
        p = mmul(p, m)
    return out


def mbracket(a, b):
    return madd(mmul(a, b), mmul(b, a), -1)


def eval_elem(elem: fn.FreeNilpElem, mats):
    n = len(mats[0])
    out = mzero(n)

    def tree(t):
        return mats[t] if isinstance(t, int) else mbracket(tree(t[0]), tree(t[1]))

    for i, c in elem.coeffs.items():
        out = madd(out, mscale(tree(elem.basis.tree(i)), c))
    return out


def upper(vals, n):
    a = mzero(n)
    it = iter(vals)
    for i in range(n):
        for j in range(i + 1, n):
            a[i][j] = Fraction(next(it))
    return a


small = st.integers(-3, 3)


def upper_st(n):
    return st.lists(small, min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2).map(lambda v: upper(v, n))


# -- Hall basis ----------------------------------------------------------------------

def test_witt_counts():
    assert [fn.witt_count(2, d) for d in range(1, 7)] == [2, 1, 2, 3, 6, 9]
    for k in (2, 3):
        assert fn.hall_basis(k, 5).counts() == tuple(fn.witt_count(k, d) for d in range(1, 6))


def test_labels():
    b = fn.hall_basis(2, 3)
    assert [b.label(i) for i in range(len(b))] == ["X", "Y", "[X,Y]", "[X,[X,Y]]", "[[X,Y],Y]"]


def test_lyndon_words_are_lyndon():
    for w in fn.lyndon_words(3, 5):
        assert fn._is_lyndon(w)
    with pytest.raises(ValueError):
        fn.hall_basis(0, 2)


# -- BCH -------------------------------------------------------------------------------

def test_bch_low_classes():
    assert str(fn.bch_series(2)) == "X + Y + 1/2 [X,Y]"
    s3 = fn.bch_series(3)
    assert s3.coefficient("[X,[X,Y]]") == Fraction(1, 12)
    assert s3.coefficient("[[X,Y],Y]") == Fraction(1, 12)
    assert s3.degree_part(2) == fn.bch_series(3).degree_part(2)


def test_bch_class4_term():
    # -1/24 [Y,[X,[X,Y]]] is written 1/24 [X,[[X,Y],Y]] in the Lyndon basis
    s4 = fn.bch_series(4).degree_part(4)
    assert len(s4.coeffs) == 1
    assert s4.coefficient("[X,[[X,Y],Y]]") == Fraction(1, 24)


@pytest.mark.parametrize("c", [1, 2, 3, 4, 5])
def test_bch_antisymmetry(c):
    b = fn.hall_basis(2, c)
    X, Y = fn.FreeNilpElem.generator(b, 0), fn.FreeNilpElem.generator(b, 1)
    assert fn.bch(X, Y) == -fn.bch(-Y, -X)


def test_bch_associative_three_generators():
    b = fn.hall_basis(3, 4)
    X, Y, Z = (fn.FreeNilpElem.generator(b, i) for i in range(3))
    assert fn.bch(fn.bch(X, Y), Z) == fn.bch(X, fn.bch(Y, Z))


@given(upper_st(5), upper_st(5))
def test_bch_matches_matrix_log(a, b):
    lhs = mlog(mmul(mexp(a), mexp(b)))
    assert eval_elem(fn.bch_series(4), [a, b]) == lhs


@given(st.lists(st.tuples(st.integers(0, 1), st.integers(-3, 3).filter(bool)), max_size=8), upper_st(4), upper_st(4))
def test_free_log_matches_matrix_log(facs, a, b):
    w = fn.GroupWord(tuple(facs))
    g = mexp(mzero(4))
    for letter, e in facs:
        g = mmul(g, mexp(mscale((a, b)[letter], e)))
    assert eval_elem(fn.free_log_of_word(w, 3, 2), [a, b]) == mlog(g)


# -- words -----------------------------------------------------------------------------

def test_parse_and_print_words():
    w = fn.parse_word("(x y)(y x)^2 z^-1")
    assert w.arity == 3
    assert fn.parse_word(w.to_text()) == w
    assert w.letter_count() == 7
    assert (w * w.inverse()).flatten() == fn.GroupWord()
    with pytest.raises(ValueError):
        fn.parse_word("(x y")
    with pytest.raises(ValueError):
        fn.GroupWord(((0, 0),))


# m and n of the synthesized certificates, frozen from runs whose residuals were
# checked exactly against the group-like tensor log
SUM_GOLDEN = {1: (1, 2), 2: (2, 4), 3: (6, 42), 4: (12, 1074)}
BRACKET_GOLDEN = {1: (1, 0), 2: (1, 4), 3: (2, 28), 4: (12, 410)}


@pytest.mark.parametrize("c", [1, 2, 3, 4])
def test_sum_word(c):
    cert = fn.synthesize_sum_word(c)
    assert cert.residual.is_zero() and cert.verify()
    assert (cert.m, cert.n) == SUM_GOLDEN[c]


@pytest.mark.parametrize("c", [1, 2, 3, 4])
def test_bracket_word(c):
    cert = fn.synthesize_bracket_word(c)
    assert cert.residual.is_zero() and cert.verify()
    assert (cert.m, cert.n) == BRACKET_GOLDEN[c]


def test_class2_word_is_xy_yx():
    cert = fn.synthesize_sum_word(2)
    witness = fn.parse_word("(x y)(y x)")
    assert fn.free_log_of_word(cert.word, 2, 2) == fn.free_log_of_word(witness, 2, 2)
    b = fn.hall_basis(2, 2)
    assert fn.free_log_of_word(witness, 2, 2) == (fn.FreeNilpElem.generator(b, 0) + fn.FreeNilpElem.generator(b, 1)) * 2


def test_word_fails_above_its_class():
    cert = fn.synthesize_sum_word(2)
    assert not fn.WordCertificate(cert.word, cert.m, cert.n, "sum", 3, 2, None).verify()


@pytest.mark.parametrize("c", [1, 2, 3])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_iterated_words(c, n):
    cert = fn.iterate_sum_word(c, n)
    assert cert.m == SUM_GOLDEN[c][0] ** (n - 1)
    assert cert.verify()


def test_iterate_limits():
    with pytest.raises(ValueError):
        fn.iterate_sum_word(2, 1)
    with pytest.raises(fn.SynthesisBudgetExceeded):
        fn.iterate_sum_word(2, 9)
    with pytest.raises(fn.SynthesisBudgetExceeded):
        fn.synthesize_sum_word(4, budget=100)


def test_certificate_digest_stable():
    a, b = fn.synthesize_sum_word(3), fn.synthesize_sum_word(3)
    assert a.digest() == b.digest()
    assert a.as_dict()["sha256"] == a.digest()
