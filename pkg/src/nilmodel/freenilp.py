"""Free nilpotent Lie algebras with exact BCH and word certificates.

Elements of the free Lie algebra on ``k`` generators truncated at degree
``c`` are stored in the Lyndon basis (a Hall basis). Products are computed
in the truncated tensor algebra, where ``exp`` and ``log`` are finite sums.
"""
from __future__ import annotations

import hashlib
import math
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable, Sequence

Word = tuple  # tuple of letter indices


class SynthesisBudgetExceeded(RuntimeError):
    pass


# -- Lyndon / Hall basis -------------------------------------------------

def lyndon_words(k: int, max_len: int) -> list[Word]:
    """All Lyndon words over ``range(k)`` of length <= max_len (Duval's algorithm)."""
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        out.append(tuple(w))
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()
    return out


def standard_factorization(w: Word) -> tuple[Word, Word]:
    """w = u v with v the longest proper Lyndon suffix."""
    for i in range(1, len(w)):
        v = w[i:]
        if _is_lyndon(v):
            return w[:i], v
    raise ValueError(f"{w} has no standard factorization")


def _is_lyndon(w: Word) -> bool:
    return all(w < w[i:] + w[:i] for i in range(1, len(w)))


def witt_count(k: int, d: int) -> int:
    """Dimension of the degree-d part of the free Lie algebra on k generators."""
    total = 0
    for e in range(1, d + 1):
        if d % e == 0:
            total += _mobius(e) * k ** (d // e)
    return total // d


def _mobius(n: int) -> int:
    res, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            res = -res
        p += 1
    return -res if n > 1 else res


def _letter_names(k: int) -> list[str]:
    if k <= 3:
        return ["X", "Y", "Z"][:k]
    return [f"X{i + 1}" for i in range(k)]


class HallBasis:
    """Lyndon basis of the free Lie algebra on ``k`` letters up to degree ``c``."""

    def __init__(self, k: int, c: int):
        if k < 1 or c < 1:
            raise ValueError("need k >= 1 and c >= 1")
        self.k, self.c = k, c
        words = sorted(lyndon_words(k, c), key=lambda w: (len(w), w))
        self.words: list[Word] = words
        self.index = {w: i for i, w in enumerate(words)}
        self.degrees = [len(w) for w in words]
        self.names = _letter_names(k)
        self._expansions: dict[int, dict[Word, int]] = {}

    def __len__(self):
        return len(self.words)

    def counts(self) -> tuple:
        return tuple(self.degrees.count(d) for d in range(1, self.c + 1))

    def tree(self, i: int):
        """Bracketing of basis element i as nested pairs of letters."""
        w = self.words[i]
        if len(w) == 1:
            return w[0]
        u, v = standard_factorization(w)
        return (self.tree(self.index[u]), self.tree(self.index[v]))

    def label(self, i: int) -> str:
        def fmt(t):
            if isinstance(t, int):
                return self.names[t]
            return f"[{fmt(t[0])},{fmt(t[1])}]"

        return fmt(self.tree(i))

    def expansion(self, i: int) -> dict[Word, int]:
        """The Lie monomial P_w as a polynomial in the tensor algebra."""
        if i not in self._expansions:
            w = self.words[i]
            if len(w) == 1:
                exp = {w: 1}
            else:
                u, v = standard_factorization(w)
                pu, pv = self.expansion(self.index[u]), self.expansion(self.index[v])
                exp = {}
                for a, ca in pu.items():
                    for b, cb in pv.items():
                        exp[a + b] = exp.get(a + b, 0) + ca * cb
                        exp[b + a] = exp.get(b + a, 0) - ca * cb
                exp = {x: c for x, c in exp.items() if c}
            self._expansions[i] = exp
        return self._expansions[i]


_basis_cache: dict[tuple[int, int], HallBasis] = {}
_basis_lock = threading.Lock()


def hall_basis(k: int, c: int) -> HallBasis:
    key = (k, c)
    b = _basis_cache.get(key)
    if b is None:
        with _basis_lock:
            b = _basis_cache.get(key)
            if b is None:
                b = HallBasis(k, c)
                _basis_cache[key] = b
    return b


# -- truncated tensor algebra --------------------------------------------

def tadd(p: dict, q: dict, s=1) -> dict:
    out = dict(p)
    for w, c in q.items():
        v = out.get(w, 0) + s * c
        if v:
            out[w] = v
        else:
            out.pop(w, None)
    return out


def tscale(p: dict, s) -> dict:
    if s == 0:
        return {}
    return {w: c * s for w, c in p.items()}


def tmul(p: dict, q: dict, c: int) -> dict:
    out: dict = {}
    for a, ca in p.items():
        la = len(a)
        if la > c:
            continue
        for b, cb in q.items():
            if la + len(b) > c:
                continue
            w = a + b
            out[w] = out.get(w, 0) + ca * cb
    return {w: v for w, v in out.items() if v}


def texp(p: dict, c: int) -> dict:
    """exp(p) for p without constant term."""
    out = {(): Fraction(1)}
    term = {(): Fraction(1)}
    for n in range(1, c + 1):
        term = tscale(tmul(term, p, c), Fraction(1, n))
        if not term:
            break
        out = tadd(out, term)
    return out


def tlog(g: dict, c: int) -> dict:
    """log(g) for g with constant term 1."""
    z = dict(g)
    if z.get((), 0) != 1:
        raise ValueError("log needs constant term 1")
    del z[()]
    out: dict = {}
    power = {(): Fraction(1)}
    for n in range(1, c + 1):
        power = tmul(power, z, c)
        if not power:
            break
        out = tadd(out, tscale(power, Fraction((-1) ** (n - 1), n)))
    return out


def tinverse(g: dict, c: int) -> dict:
    """Inverse of a group-like element 1 + z: sum of (-z)^n."""
    z = {w: -v for w, v in g.items() if w}
    out = {(): Fraction(1)}
    power = {(): Fraction(1)}
    for _ in range(c):
        power = tmul(power, z, c)
        if not power:
            break
        out = tadd(out, power)
    return out


def tpow(g: dict, e: int, c: int) -> dict:
    if e < 0:
        g, e = tinverse(g, c), -e
    result = {(): Fraction(1)}
    base = g
    while e:
        if e & 1:
            result = tmul(result, base, c)
        e >>= 1
        if e:
            base = tmul(base, base, c)
    return result


def truncate(p: dict, c: int) -> dict:
    return {w: v for w, v in p.items() if len(w) <= c}


# -- free nilpotent elements ---------------------------------------------

class NotALiePolynomial(ValueError):
    pass


def tensor_to_hall(p: dict, basis: HallBasis) -> dict[int, Fraction]:
    """Hall coordinates of a Lie polynomial given in the tensor algebra."""
    rest = {w: Fraction(v) for w, v in p.items() if v and len(w) <= basis.c}
    if () in rest:
        raise NotALiePolynomial("constant term in a Lie polynomial")
    coeffs: dict[int, Fraction] = {}
    while rest:
        w = min(rest, key=lambda x: (len(x), x))
        idx = basis.index.get(w)
        if idx is None:
            raise NotALiePolynomial(f"leading word {w} is not Lyndon")
        a = rest[w]
        coeffs[idx] = a
        for u, cu in basis.expansion(idx).items():
            v = rest.get(u, 0) - a * cu
            if v:
                rest[u] = v
            else:
                rest.pop(u, None)
    return coeffs


@dataclass(frozen=True, eq=False)
class FreeNilpElem:
    """Element of the free class-c nilpotent Lie algebra, in Hall coordinates."""

    basis: HallBasis
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {i: Fraction(v) for i, v in self.coeffs.items() if v != 0}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def generator(cls, basis: HallBasis, letter: int) -> FreeNilpElem:
        return cls(basis, {basis.index[(letter,)]: 1})

    @classmethod
    def zero(cls, basis: HallBasis) -> FreeNilpElem:
        return cls(basis, {})

    @classmethod
    def from_tensor(cls, basis: HallBasis, p: dict) -> FreeNilpElem:
        return cls(basis, tensor_to_hall(p, basis))

    def tensor(self) -> dict:
        out: dict = {}
        for i, a in self.coeffs.items():
            for w, c in self.basis.expansion(i).items():
                out[w] = out.get(w, 0) + a * c
        return {w: v for w, v in out.items() if v}

    def _check(self, other):
        if not isinstance(other, FreeNilpElem):
            return False
        if other.basis is not self.basis:
            raise ValueError("elements over different Hall bases")
        return True

    def __add__(self, other):
        if not self._check(other):
            return NotImplemented
        out = dict(self.coeffs)
        for i, v in other.coeffs.items():
            out[i] = out.get(i, 0) + v
        return FreeNilpElem(self.basis, out)

    def __neg__(self):
        return FreeNilpElem(self.basis, {i: -v for i, v in self.coeffs.items()})

    def __sub__(self, other):
        if not self._check(other):
            return NotImplemented
        return self + (-other)

    def __mul__(self, s):
        if isinstance(s, (int, Fraction)):
            return FreeNilpElem(self.basis, {i: v * s for i, v in self.coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, FreeNilpElem):
            return self.basis is other.basis and self.coeffs == other.coeffs
        if other == 0:
            return not self.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((id(self.basis), tuple(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree_part(self, d: int) -> FreeNilpElem:
        return FreeNilpElem(
            self.basis, {i: v for i, v in self.coeffs.items() if self.basis.degrees[i] == d}
        )

    def truncate(self, c: int) -> FreeNilpElem:
        return FreeNilpElem(
            self.basis, {i: v for i, v in self.coeffs.items() if self.basis.degrees[i] <= c}
        )

    def bracket(self, other: FreeNilpElem) -> FreeNilpElem:
        self._check(other)
        a, b = self.tensor(), other.tensor()
        c = self.basis.c
        return FreeNilpElem.from_tensor(self.basis, tadd(tmul(a, b, c), tmul(b, a, c), -1))

    def coefficient(self, label: str) -> Fraction:
        for i in range(len(self.basis)):
            if self.basis.label(i) == label:
                return self.coeffs.get(i, Fraction(0))
        raise KeyError(label)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, v in self.coeffs.items():
            lab = self.basis.label(i)
            mag = abs(v)
            term = lab if mag == 1 else f"{mag} {lab}"
            if not parts:
                parts.append(term if v > 0 else f"-{term}")
            else:
                parts.append(("+ " if v > 0 else "- ") + term)
        return " ".join(parts)

    __repr__ = __str__


def bch(x: FreeNilpElem, y: FreeNilpElem, c: int | None = None) -> FreeNilpElem:
    """log(exp x exp y) truncated at degree c (default: the basis class)."""
    x._check(y)
    c = x.basis.c if c is None else min(c, x.basis.c)
    g = tmul(texp(truncate(x.tensor(), c), c), texp(truncate(y.tensor(), c), c), c)
    return FreeNilpElem.from_tensor(x.basis, tlog(g, c))


def bch_series(c: int) -> FreeNilpElem:
    """BCH(X, Y) in the free algebra on two generators, class c."""
    b = hall_basis(2, c)
    return bch(FreeNilpElem.generator(b, 0), FreeNilpElem.generator(b, 1))


# -- group words ----------------------------------------------------------

_LETTERS = "xyz"


@dataclass(frozen=True)
class GroupWord:
    """Free group word: factors are (letter index | GroupWord, nonzero exponent)."""

    factors: tuple = ()

    def __post_init__(self):
        for base, e in self.factors:
            if e == 0 or not isinstance(e, int):
                raise ValueError("exponents must be nonzero integers")
            if isinstance(base, int) and base < 0:
                raise ValueError("letters are nonnegative integers")

    @classmethod
    def letter(cls, i: int, e: int = 1) -> GroupWord:
        return cls(((i, e),))

    def __mul__(self, other: GroupWord) -> GroupWord:
        return GroupWord(self.factors + other.factors)

    def __pow__(self, e: int) -> GroupWord:
        if e == 0:
            return GroupWord()
        if e == 1:
            return self
        return GroupWord(((self, e),))

    def inverse(self) -> GroupWord:
        return GroupWord(tuple((b, -e) for b, e in reversed(self.factors)))

    def reverse(self) -> GroupWord:
        """Letters in reverse order (not the inverse)."""
        return GroupWord(
            tuple(((b.reverse() if isinstance(b, GroupWord) else b), e) for b, e in reversed(self.factors))
        )

    @property
    def arity(self) -> int:
        m = 0
        for b, _ in self.factors:
            m = max(m, b.arity if isinstance(b, GroupWord) else b + 1)
        return m

    def letter_count(self) -> int:
        """Total number of letters with multiplicity after flattening."""
        memo: dict[int, int] = {}

        def count(w: GroupWord) -> int:
            if id(w) in memo:
                return memo[id(w)]
            total = 0
            for b, e in w.factors:
                total += abs(e) * (count(b) if isinstance(b, GroupWord) else 1)
            memo[id(w)] = total
            return total

        return count(self)

    def flatten(self, limit: int | None = None) -> GroupWord:
        """Letters-only form with adjacent equal letters merged."""
        if limit is not None and self.letter_count() > limit:
            raise ValueError("word too long to flatten")
        out: list[list[int]] = []

        def push(letter, e):
            if out and out[-1][0] == letter:
                out[-1][1] += e
                if out[-1][1] == 0:
                    out.pop()
            else:
                out.append([letter, e])

        def walk(w: GroupWord, sign: int):
            facs = w.factors if sign > 0 else tuple((b, -e) for b, e in reversed(w.factors))
            for b, e in facs:
                if isinstance(b, GroupWord):
                    for _ in range(abs(e)):
                        walk(b, 1 if e > 0 else -1)
                else:
                    push(b, e)

        walk(self, 1)
        return GroupWord(tuple((b, e) for b, e in out))

    def substitute(self, images: Sequence[GroupWord]) -> GroupWord:
        """Replace letter i by images[i]; the result shares the image objects."""
        facs = []
        for b, e in self.factors:
            if isinstance(b, GroupWord):
                facs.append((b.substitute(images), e))
            else:
                facs.append((images[b], e))
        return GroupWord(tuple(facs))

    def to_text(self, names: Sequence[str] | None = None) -> str:
        arity = self.arity
        if names is None:
            names = list(_LETTERS) if arity <= 3 else [f"x{i + 1}" for i in range(arity)]
        parts = []
        for b, e in self.factors:
            s = f"({b.to_text(names)})" if isinstance(b, GroupWord) else names[b]
            parts.append(s if e == 1 else f"{s}^{e}")
        return " ".join(parts)

    def __str__(self):
        return self.to_text()


_TOKEN = re.compile(r"\s*(?:(x\d+|[xyz])|(\()|(\))|\^\s*([+-]?\d+))")


def parse_word(text: str) -> GroupWord:
    """Parse words like ``(x y)(y x)``, ``x y x^-1 y^-1`` or ``x1 x2^3``."""
    pos = 0
    stack: list[list] = [[]]
    t = text.strip()
    while pos < len(t):
        m = _TOKEN.match(t, pos)
        if not m:
            raise ValueError(f"bad word syntax at {t[pos:]!r}")
        pos = m.end()
        name, lp, rp, exp = m.groups()
        if name:
            idx = _LETTERS.index(name) if len(name) == 1 else int(name[1:]) - 1
            if idx < 0:
                raise ValueError("letters are numbered from x1")
            stack[-1].append([idx, 1])
        elif lp:
            stack.append([])
        elif rp:
            if len(stack) == 1:
                raise ValueError("unbalanced ')'")
            inner = stack.pop()
            stack[-1].append([GroupWord(tuple((b, e) for b, e in inner)), 1])
        else:
            if not stack[-1]:
                raise ValueError("exponent without base")
            e = int(exp)
            if e == 0:
                stack[-1].pop()
            else:
                stack[-1][-1][1] *= e
        t_rest = t[pos:].strip()
        if not t_rest:
            break
    if len(stack) != 1:
        raise ValueError("unbalanced '('")
    return GroupWord(tuple((b, e) for b, e in stack[0]))


def evaluate(word: GroupWord, args: Sequence, mul: Callable, power: Callable, identity):
    """Evaluate ``word`` on ``args``; nested subwords are evaluated once."""
    memo: dict = {}

    def val(w: GroupWord):
        key = id(w)
        if key in memo:
            return memo[key][1]
        acc = identity
        for b, e in w.factors:
            if isinstance(b, GroupWord):
                base = val(b)
                pk = (id(b), e)
            else:
                if b >= len(args):
                    raise ValueError(f"word uses letter {b} but only {len(args)} arguments")
                base = args[b]
                pk = ("letter", b, e)
            if pk not in memo:
                memo[pk] = (None, power(base, e))
            acc = mul(acc, memo[pk][1])
        memo[key] = (w, acc)
        return acc

    return val(word)


def free_log_of_word(w: GroupWord, c: int, k: int | None = None) -> FreeNilpElem:
    """log of w evaluated in the free class-c nilpotent group on k generators.

    The group is realised by group-like elements exp(X_i) of the truncated
    tensor algebra, so this is independent of :func:`bch`.
    """
    k = max(k or 0, w.arity, 1)
    basis = hall_basis(k, c)
    gens = [texp({(i,): Fraction(1)}, c) for i in range(k)]
    g = evaluate(
        w,
        gens,
        lambda a, b: tmul(a, b, c),
        lambda a, e: tpow(a, e, c),
        {(): Fraction(1)},
    )
    return FreeNilpElem.from_tensor(basis, tlog(g, c))


# -- word certificates ----------------------------------------------------

@dataclass
class WordCertificate:
    word: GroupWord
    m: int
    n: int
    target: str  # "sum" | "bracket"
    c: int
    arity: int
    residual: FreeNilpElem

    def target_elem(self) -> FreeNilpElem:
        b = hall_basis(self.arity, self.c)
        gens = [FreeNilpElem.generator(b, i) for i in range(self.arity)]
        if self.target == "sum":
            return reduce(lambda a, x: a + x, gens)
        if self.target == "bracket":
            return gens[0].bracket(gens[1]) if self.c >= 2 else FreeNilpElem.zero(b)
        raise ValueError(self.target)

    def verify(self) -> bool:
        got = free_log_of_word(self.word, self.c, self.arity)
        return (got - self.target_elem() * self.m).is_zero()

    def flat_text(self, limit: int = 100_000) -> str:
        if self.n > limit:
            return self.word.to_text()
        return self.word.flatten().to_text()

    def digest(self) -> str:
        text = f"{self.target}|c={self.c}|k={self.arity}|m={self.m}|n={self.n}|{self.word.to_text()}"
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def as_dict(self) -> dict:
        return {
            "target": self.target,
            "class": self.c,
            "arity": self.arity,
            "m": self.m,
            "n": self.n,
            "word": self.flat_text(),
            "residual": str(self.residual),
            "sha256": self.digest(),
        }


def commutator_word(tree) -> GroupWord:
    """Group commutator word whose log starts with the given bracket tree."""
    if isinstance(tree, int):
        return GroupWord.letter(tree)
    a, b = commutator_word(tree[0]), commutator_word(tree[1])
    return GroupWord(((a, 1), (b, 1), (a, -1), (b, -1)))


def _lcm_den(elem: FreeNilpElem) -> int:
    return reduce(lambda a, v: a * v.denominator // math.gcd(a, v.denominator), elem.coeffs.values(), 1)


def _synthesize(target: str, c: int, budget: int) -> WordCertificate:
    if c < 1:
        raise ValueError("class must be >= 1")
    basis = hall_basis(2, c)
    X, Y = FreeNilpElem.generator(basis, 0), FreeNilpElem.generator(basis, 1)
    x, y = GroupWord.letter(0), GroupWord.letter(1)
    if target == "sum":
        goal = X + Y
        word = x * y
        log = bch(X, Y)
        start = 2
        if c >= 2:
            # u * reverse(u) kills the degree-2 defect
            rev = word.reverse()
            log = bch(log, bch(Y, X))
            word = GroupWord(((word, 1), (rev, 1)))
            m = 2
            start = 3
        else:
            m = 1
    else:
        if c == 1:
            empty = GroupWord()
            return WordCertificate(empty, 1, 0, "bracket", 1, 2, FreeNilpElem.zero(basis))
        goal = X.bracket(Y)
        word = commutator_word((0, 1))
        log = free_log_of_word(word, c, 2)
        m = 1
        start = 3
    for j in range(start, c + 1):
        defect = (log - goal * m).degree_part(j)
        if defect.is_zero():
            continue
        s = _lcm_den(defect)
        if s > 1:
            word = word ** s
            log = log * s
            m *= s
            defect = defect * s
        fixes = []
        for idx, q in defect.coeffs.items():
            cw = commutator_word(basis.tree(idx))
            fixes.append((cw, -int(q)))
        corr = GroupWord(tuple(fixes))
        word = GroupWord(((word, 1), (corr, 1)))
        log = bch(log, free_log_of_word(corr, c, 2))
        if word.letter_count() > budget:
            raise SynthesisBudgetExceeded(f"class {c}: word length {word.letter_count()} over budget {budget}")
    residual = log - goal * m
    cert = WordCertificate(word, m, word.letter_count(), target, c, 2, residual)
    return cert


def synthesize_sum_word(c: int, budget: int = 10**7) -> WordCertificate:
    """Word w and integer m with log w(x, y) = m (log x + log y) in class c."""
    cert = _synthesize("sum", c, budget)
    cert.residual = free_log_of_word(cert.word, c, 2) - cert.target_elem() * cert.m
    if not cert.residual.is_zero():
        raise SynthesisBudgetExceeded(f"class {c}: nonzero residual {cert.residual}")
    return cert


def synthesize_bracket_word(c: int, budget: int = 10**7) -> WordCertificate:
    """Word w' and integer m' with log w'(x, y) = m' [log x, log y] in class c."""
    cert = _synthesize("bracket", c, budget)
    cert.residual = free_log_of_word(cert.word, c, 2) - cert.target_elem() * cert.m
    if not cert.residual.is_zero():
        raise SynthesisBudgetExceeded(f"class {c}: nonzero residual {cert.residual}")
    return cert


MAX_ARITY = 5


def iterate_sum_word(c: int, n: int, base: WordCertificate | None = None) -> WordCertificate:
    """w_{c,n} with log w_{c,n}(x_1..x_n) = m_c^(n-1) (log x_1 + ... + log x_n)."""
    if n < 2:
        raise ValueError("arity must be >= 2")
    if n > MAX_ARITY:
        raise SynthesisBudgetExceeded(f"arity {n} over the supported limit {MAX_ARITY}")
    base = base or synthesize_sum_word(c)
    mc = base.m
    word = base.word
    for k in range(2, n):
        word = base.word.substitute([word, GroupWord.letter(k, mc ** (k - 1))])
    m = mc ** (n - 1)
    cert = WordCertificate(word, m, word.letter_count(), "sum", c, n, None)
    cert.residual = free_log_of_word(word, c, n) - cert.target_elem() * m
    if not cert.residual.is_zero():
        raise SynthesisBudgetExceeded(f"w_({c},{n}) identity failed: {cert.residual}")
    return cert
