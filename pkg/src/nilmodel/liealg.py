"""Nilpotent Lie algebras given by exact structure constants.

An algebra is stored as a sparse list of structure constants
``[e_i, e_j] = sum_k c[i][j][k] e_k`` with ``i < j``; vectors are tuples of
field elements in the standard basis ``e_0 .. e_{n-1}``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .exactfield import Field, embed, format_element, parse_element


class InvalidAlgebra(ValueError):
    pass


class NotAntisymmetric(InvalidAlgebra):
    def __init__(self, i, j, k):
        super().__init__(f"c[{i}][{j}][{k}] != -c[{j}][{i}][{k}]")
        self.witness = (i, j, k)


class JacobiViolation(InvalidAlgebra):
    def __init__(self, i, j, k, value):
        super().__init__(f"Jacobi identity fails on (e{i}, e{j}, e{k}): {value}")
        self.witness = (i, j, k)
        self.value = value


class NotNilpotent(InvalidAlgebra):
    def __init__(self, term):
        super().__init__(f"lower central series stabilises at a nonzero term of dim {len(term)}")
        self.term = term


class FieldMismatchError(ValueError):
    pass


class IdempotentSearchExhausted(RuntimeError):
    pass


class GeneratorsDoNotSpan(ValueError):
    pass


class NotAHomomorphism(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class LieAlgebra:
    """Finite dimensional Lie algebra over Q or Q(sqrt d).

    Build instances with :func:`validate_algebra`; the constructor does not
    check the Lie axioms.
    """

    def __init__(self, dim: int, fld: Field, consts: dict, nilpotency_class: int | None = None):
        self.dim = dim
        self.field = fld
        # {(i, j): {k: c}} with i < j and nonzero c only
        self.consts = {
            key: dict(v) for key, v in sorted(consts.items()) if any(x != 0 for x in v.values())
        }
        self.nilpotency_class = nilpotency_class
        self._terms = [
            (i, j, k, c) for (i, j), row in self.consts.items() for k, c in sorted(row.items()) if c != 0
        ]

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, field={self.field}, class={self.nilpotency_class})"

    def __eq__(self, other):
        return (
            isinstance(other, LieAlgebra)
            and self.dim == other.dim
            and self.field == other.field
            and self.consts == other.consts
        )

    def __hash__(self):
        return hash((self.dim, self.field, tuple((k, tuple(sorted(v.items()))) for k, v in self.consts.items())))

    # -- basic structure --------------------------------------------------
    def zero(self) -> tuple:
        return (self.field.zero,) * self.dim

    def e(self, i: int) -> tuple:
        v = [self.field.zero] * self.dim
        v[i] = self.field.one
        return tuple(v)

    def const(self, i: int, j: int, k: int):
        if i == j:
            return self.field.zero
        if i < j:
            return self.consts.get((i, j), {}).get(k, self.field.zero)
        return -self.consts.get((j, i), {}).get(k, self.field.zero)

    def bracket_basis(self, i: int, j: int) -> tuple:
        return tuple(self.const(i, j, k) for k in range(self.dim))

    def bracket(self, u: Sequence, v: Sequence) -> tuple:
        out = [u[0] * 0] * self.dim if self.dim else []
        for i, j, k, c in self._terms:
            t = u[i] * v[j] - u[j] * v[i]
            if t != 0:
                out[k] = out[k] + c * t
        return tuple(out)

    def is_abelian(self) -> bool:
        return not self._terms

    @cached_property
    def float_tensor(self) -> np.ndarray:
        """Dense antisymmetric tensor T[i, j, k] = c_ij^k in the principal embedding."""
        t = np.zeros((self.dim, self.dim, self.dim))
        for i, j, k, c in self._terms:
            t[i, j, k] = embed(c)
            t[j, i, k] = -embed(c)
        return t

    def bracket_float(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Vectorised bracket on float arrays of shape (..., dim)."""
        if not self._terms:
            return np.zeros(np.broadcast_shapes(u.shape, v.shape))
        out = np.zeros(np.broadcast_shapes(u.shape, v.shape))
        for i, j, k, c in self._terms:
            out[..., k] += embed(c) * (u[..., i] * v[..., j] - u[..., j] * v[..., i])
        return out

    def conjugate_algebra(self) -> LieAlgebra:
        """Galois twist: every structure constant replaced by its conjugate."""
        from .exactfield import conjugate

        consts = {key: {k: conjugate(c) for k, c in row.items()} for key, row in self.consts.items()}
        return LieAlgebra(self.dim, self.field, consts, self.nilpotency_class)

    def change_basis(self, new_basis: Sequence[Sequence]) -> LieAlgebra:
        """Structure constants w.r.t. ``new_basis`` (vectors in old coordinates)."""
        n = self.dim
        if linalg.rank(new_basis) != n:
            raise ValueError("new basis is not a basis")
        cols = linalg.transpose(new_basis)
        inv = linalg.inverse(cols)
        consts = {}
        for a in range(n):
            for b in range(a + 1, n):
                br = self.bracket(new_basis[a], new_basis[b])
                coords = linalg.matvec(inv, list(br))
                row = {k: c for k, c in enumerate(coords) if c != 0}
                if row:
                    consts[(a, b)] = row
        return LieAlgebra(n, self.field, consts, self.nilpotency_class)

    def restrict(self, basis: Sequence[Sequence]) -> LieAlgebra:
        """Subalgebra spanned by ``basis`` (must be closed under bracket)."""
        m = len(basis)
        consts = {}
        for a in range(m):
            for b in range(a + 1, m):
                br = self.bracket(basis[a], basis[b])
                coords = linalg.coordinates(basis, br)
                if coords is None:
                    raise ValueError("basis does not span a subalgebra")
                row = {k: c for k, c in enumerate(coords) if c != 0}
                if row:
                    consts[(a, b)] = row
        sub = LieAlgebra(m, self.field, consts)
        sub.nilpotency_class = _nilpotency_class(sub)
        return sub

    # -- file format ------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"dim {self.dim}", f"field {self.field}"]
        for i, j, k, c in self._terms:
            lines.append(f"{i + 1} {j + 1} {k + 1} {format_element(c)}")
        return "\n".join(lines) + "\n"


def _entries_to_consts(dim, fld, entries):
    table: dict[tuple[int, int], dict[int, object]] = {}
    seen = {}
    for i, j, k, value in entries:
        if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
            raise InvalidAlgebra(f"index out of range in ({i}, {j}, {k})")
        value = fld(value)
        if value == 0:
            continue
        if i == j:
            raise NotAntisymmetric(i, j, k)
        seen[(i, j, k)] = value
    for (i, j, k), v in seen.items():
        if (j, i, k) in seen and seen[(j, i, k)] != -v:
            raise NotAntisymmetric(i, j, k)
        a, b, s = (i, j, 1) if i < j else (j, i, -1)
        table.setdefault((a, b), {})[k] = v * s
    return table


def _lcs_terms(g: LieAlgebra, max_steps: int | None = None):
    """Lower central series as row-reduced bases; stops at 0 or stabilisation."""
    n = g.dim
    terms = [linalg.identity(n, g.field.zero, g.field.one)]
    steps = 0
    while terms[-1]:
        prev = terms[-1]
        nxt = linalg.span_basis(
            [g.bracket(g.e(a), v) for a in range(n) for v in prev]
        )
        terms.append(nxt)
        steps += 1
        if len(nxt) == len(prev):
            break
        if max_steps is not None and steps >= max_steps:
            break
    return terms


def _nilpotency_class(g: LieAlgebra) -> int:
    terms = _lcs_terms(g)
    if terms[-1]:
        raise NotNilpotent(terms[-1])
    return len(terms) - 1


def validate_algebra(
    dim: int, fld: Field | int | None, entries: Iterable[tuple[int, int, int, object]]
) -> LieAlgebra:
    """Exact validation of structure constants given as 0-based (i, j, k, c) entries."""
    if dim < 1:
        raise InvalidAlgebra("dimension must be positive")
    if not isinstance(fld, Field):
        fld = Field(fld)
    g = LieAlgebra(dim, fld, _entries_to_consts(dim, fld, entries))
    for i, j, k in itertools.combinations(range(dim), 3):
        ei, ej, ek = g.e(i), g.e(j), g.e(k)
        jac = [
            a + b + c
            for a, b, c in zip(
                g.bracket(ei, g.bracket(ej, ek)),
                g.bracket(ej, g.bracket(ek, ei)),
                g.bracket(ek, g.bracket(ei, ej)),
            )
        ]
        if any(x != 0 for x in jac):
            raise JacobiViolation(i, j, k, tuple(jac))
    g.nilpotency_class = _nilpotency_class(g)
    return g


@dataclass
class Filtration:
    """Lower central series data; ``weights`` is set by :func:`adapted_basis`."""

    terms: list  # terms[i] spans g^{i+1}; last entry is [] (the zero term)
    center: list
    derived: list
    nilpotency_class: int
    basis: list | None = None
    weights: tuple | None = None

    @property
    def dims(self) -> tuple:
        return tuple(len(t) for t in self.terms)


def center(g: LieAlgebra) -> list:
    rows = []
    for j in range(g.dim):
        for k in range(g.dim):
            rows.append([g.const(i, j, k) for i in range(g.dim)])
    return linalg.span_basis(linalg.nullspace(rows, g.dim, g.field.zero, g.field.one))


def lower_central_series(g: LieAlgebra) -> Filtration:
    terms = _lcs_terms(g)
    if terms[-1]:
        raise NotNilpotent(terms[-1])
    return Filtration(
        terms=terms,
        center=center(g),
        derived=terms[1] if len(terms) > 1 else [],
        nilpotency_class=len(terms) - 1,
    )


def derived_series_dims(g: LieAlgebra) -> tuple:
    cur = linalg.identity(g.dim, g.field.zero, g.field.one)
    dims = [len(cur)]
    while cur:
        cur = linalg.span_basis([g.bracket(u, v) for u, v in itertools.combinations(cur, 2)])
        dims.append(len(cur))
    return tuple(dims)


def adapted_basis(g: LieAlgebra) -> Filtration:
    """Basis refining the lower central series, ordered by weight.

    Standard basis vectors are preferred, so algebras written in an adapted
    basis (Heisenberg, filiform, abelian) come back unchanged.
    """
    filt = lower_central_series(g)
    terms = filt.terms
    c = filt.nilpotency_class
    chosen: list[tuple[int, int, tuple]] = []  # (weight, order key, vector)
    for w in range(c, 0, -1):
        top = terms[w - 1]
        below = [v for _, _, v in chosen]  # spans g^{w+1}
        current = list(below)
        cands = [g.e(i) for i in range(g.dim)] + [tuple(v) for v in top]
        for idx, v in enumerate(cands):
            if len(current) == len(top):
                break
            if linalg.coordinates(top, v) is None:
                continue
            if linalg.rank(current + [v]) > len(current):
                current.append(v)
                chosen.append((w, idx, tuple(v)))
    chosen.sort(key=lambda t: (t[0], t[1]))
    filt.basis = [v for _, _, v in chosen]
    filt.weights = tuple(w for w, _, _ in chosen)
    return filt


def standard_weights(g: LieAlgebra) -> tuple | None:
    """Weights of the standard basis if it is adapted, else None."""
    filt = adapted_basis(g)
    ident = [g.e(i) for i in range(g.dim)]
    if [tuple(v) for v in filt.basis] == ident:
        return filt.weights
    return None


def to_adapted(g: LieAlgebra) -> tuple[LieAlgebra, tuple]:
    """(algebra rewritten in an adapted basis, weights)."""
    filt = adapted_basis(g)
    if [tuple(v) for v in filt.basis] == [g.e(i) for i in range(g.dim)]:
        return g, filt.weights
    h = g.change_basis(filt.basis)
    h.nilpotency_class = g.nilpotency_class
    return h, filt.weights


def direct_sum(g: LieAlgebra, h: LieAlgebra) -> LieAlgebra:
    if g.field != h.field:
        raise FieldMismatchError(f"{g.field} vs {h.field}")
    n = g.dim
    consts = {key: dict(row) for key, row in g.consts.items()}
    for (i, j), row in h.consts.items():
        consts[(i + n, j + n)] = {k + n: c for k, c in row.items()}
    cls = max(g.nilpotency_class or 0, h.nilpotency_class or 0)
    return LieAlgebra(n + h.dim, g.field, consts, cls)


# -- centroid and decomposition ------------------------------------------

def centroid(g: LieAlgebra) -> list:
    """Basis of {A : A[x,y] = [Ax,y] = [x,Ay]} as n x n matrices (A acts on columns)."""
    n = g.dim
    zero, one = g.field.zero, g.field.one
    rows = []

    def var(r, s):
        return r * n + s

    for i in range(n):
        for j in range(n):
            for r in range(n):
                # (A[e_i,e_j])_r - ([A e_i, e_j])_r
                row1 = [zero] * (n * n)
                row2 = [zero] * (n * n)
                for s in range(n):
                    cs = g.const(i, j, s)
                    if cs != 0:
                        row1[var(r, s)] += cs
                        row2[var(r, s)] += cs
                for t in range(n):
                    ct = g.const(t, j, r)
                    if ct != 0:
                        row1[var(t, i)] -= ct
                    ct2 = g.const(i, t, r)
                    if ct2 != 0:
                        row2[var(t, j)] -= ct2
                if any(x != 0 for x in row1):
                    rows.append(row1)
                if any(x != 0 for x in row2):
                    rows.append(row2)
    kernel = linalg.nullspace(rows, n * n, zero, one)
    return [[vec[r * n:(r + 1) * n] for r in range(n)] for vec in kernel]


def _trace(m):
    return sum((m[i][i] for i in range(len(m))), m[0][0] * 0)


def _flat(m):
    return [x for row in m for x in row]


def centroid_radical(g: LieAlgebra, basis: list) -> list:
    """Jacobson radical of the centroid: kernel of the trace form tr(xy)."""
    k = len(basis)
    gram = [[_trace(linalg.matmul(a, b)) for b in basis] for a in basis]
    coeffs = linalg.nullspace(gram, k, g.field.zero, g.field.one)
    out = []
    for c in coeffs:
        m = [[sum((c[t] * basis[t][r][s] for t in range(k)), g.field.zero) for s in range(g.dim)] for r in range(g.dim)]
        out.append(m)
    return out


def minimal_polynomial(m, fld: Field) -> list:
    """Monic minimal polynomial coefficients, lowest degree first."""
    n = len(m)
    powers = [_flat(linalg.identity(n, fld.zero, fld.one))]
    cur = linalg.identity(n, fld.zero, fld.one)
    while True:
        cur = linalg.matmul(cur, m)
        sol = linalg.coordinates(powers, _flat(cur))
        if sol is not None:
            return [-x for x in sol] + [fld.one]
        powers.append(_flat(cur))


def _poly_eval_matrix(coeffs, m, fld):
    n = len(m)
    result = [[fld.zero] * n for _ in range(n)]
    for c in reversed(coeffs):
        result = linalg.matmul(result, m)
        for i in range(n):
            result[i][i] = result[i][i] + c
    return result


def _factor_over_field(coeffs, fld: Field):
    """Distinct monic irreducible factors over the coefficient field."""
    import sympy

    t = sympy.Symbol("t")
    sq = sympy.sqrt(fld.d) if fld.d is not None else None

    def to_sym(c):
        if fld.d is None:
            return sympy.Rational(c.numerator, c.denominator)
        return sympy.Rational(c.a.numerator, c.a.denominator) + sympy.Rational(c.b.numerator, c.b.denominator) * sq

    poly = sum(to_sym(c) * t ** i for i, c in enumerate(coeffs))
    if fld.d is None:
        _, facs = sympy.factor_list(poly, t)
    else:
        _, facs = sympy.factor_list(poly, t, extension=sq)
    out = []
    for f, _mult in facs:
        p = sympy.Poly(f, t, extension=sq) if sq is not None else sympy.Poly(f, t, domain=sympy.QQ)
        cs = [sympy.expand(x) for x in reversed(p.monic().all_coeffs())]
        out.append([_from_sym(x, fld) for x in cs])
    return out


def _from_sym(x, fld: Field):
    import sympy

    x = sympy.expand(x)
    if fld.d is None:
        r = sympy.Rational(x)
        return Fraction(int(r.p), int(r.q))
    sq = sympy.sqrt(fld.d)
    b = sympy.Rational(x.coeff(sq))
    a = sympy.Rational(sympy.expand(x - b * sq))
    return fld(Fraction(int(a.p), int(a.q))) + fld.sqrt * Fraction(int(b.p), int(b.q))


def _fitting_split(g: LieAlgebra, t):
    """ker T^n and im T^n for T in the centroid; both are ideals."""
    n = g.dim
    p = t
    for _ in range(n - 1):
        p = linalg.matmul(p, t)
    ker = linalg.span_basis(linalg.nullspace(p, n, g.field.zero, g.field.one))
    im = linalg.span_basis(linalg.transpose(p))
    return ker, im


@dataclass
class SplitCertificate:
    kind: str  # "local-centroid" | "residue-field" | "split"
    detail: str


def _find_split(g: LieAlgebra, budget: int):
    """Return (ideal1, ideal2) or a SplitCertificate proving indecomposability."""
    n = g.dim
    if n == 1:
        return SplitCertificate("local-centroid", "dim 1")
    cbasis = centroid(g)
    rad = centroid_radical(g, cbasis)
    quotient_dim = len(cbasis) - len(rad)
    if quotient_dim == 1:
        return SplitCertificate(
            "local-centroid", f"centroid dim {len(cbasis)} = 1 + radical dim {len(rad)}"
        )
    # complement of the radical inside the centroid, in centroid-basis order
    rad_flat = [_flat(m) for m in rad]
    comp = []
    span = list(rad_flat)
    for m in cbasis:
        if linalg.rank(span + [_flat(m)]) > len(span):
            span.append(_flat(m))
            comp.append(m)
    ident = linalg.identity(n, g.field.zero, g.field.one)
    tried = 0
    for coeffs in _combination_order(len(comp)):
        if tried >= budget:
            break
        tried += 1
        m = [[sum((c * comp[t][r][s] for t, c in enumerate(coeffs) if c), g.field.zero) for s in range(n)] for r in range(n)]
        if m == [[g.field.zero] * n for _ in range(n)] or m == ident:
            continue
        mp = minimal_polynomial(m, g.field)
        factors = _factor_over_field(mp, g.field)
        if len(factors) >= 2:
            t = _poly_eval_matrix(factors[0], m, g.field)
            ker, im = _fitting_split(g, t)
            if ker and im:
                return ker, im
        elif len(factors) == 1 and len(factors[0]) - 1 == quotient_dim:
            return SplitCertificate(
                "residue-field",
                f"centroid modulo radical is a field of degree {quotient_dim}",
            )
    raise IdempotentSearchExhausted(
        f"no splitting idempotent found after {tried} centroid elements "
        f"(centroid dim {len(cbasis)}, radical dim {len(rad)})"
    )


def _combination_order(k: int):
    """Deterministic small-integer coefficient vectors: unit vectors first."""
    for i in range(k):
        yield tuple(1 if t == i else 0 for t in range(k))
    for height in range(1, 4):
        for coeffs in itertools.product(range(-height, height + 1), repeat=k):
            if max(abs(c) for c in coeffs) != height:
                continue
            if sum(1 for c in coeffs if c) <= 1:
                continue
            yield coeffs


def invariants(g: LieAlgebra) -> tuple:
    """Isomorphism invariants: dim, lcs dims, derived dims, center dim, rank of ad."""
    filt = lower_central_series(g)
    ad_rank = g.dim - len(filt.center)
    return (g.dim, filt.dims, derived_series_dims(g), len(filt.center), ad_rank)


@dataclass
class Factor:
    ideal_basis: list  # vectors in the coordinates of the decomposed algebra
    algebra: LieAlgebra
    invariants: tuple
    certificate: SplitCertificate


@dataclass
class DecompositionResult:
    factors: list
    classes: list = field(default_factory=list)  # [(invariants, multiplicity, decided)]

    @property
    def r(self) -> int:
        return len(self.factors)

    @property
    def indecomposable(self) -> bool:
        return len(self.factors) == 1

    def class_multiset(self) -> list:
        return sorted((inv, mult) for inv, mult, _ in self.classes)


def decompose_indecomposable(g: LieAlgebra, budget: int = 500) -> DecompositionResult:
    """Split ``g`` into indecomposable ideals using idempotents of the centroid."""
    factors = []

    def rec(alg: LieAlgebra, basis_in_g: list):
        res = _find_split(alg, budget)
        if isinstance(res, SplitCertificate):
            factors.append(Factor(basis_in_g, alg, invariants(alg), res))
            return
        for ideal in res:
            sub = alg.restrict(ideal)
            sub_in_g = [
                tuple(
                    sum((v[t] * basis_in_g[t][k] for t in range(alg.dim)), alg.field.zero)
                    for k in range(g.dim)
                )
                for v in ideal
            ]
            rec(sub, sub_in_g)

    rec(g, [g.e(i) for i in range(g.dim)])
    factors.sort(key=lambda f: (-f.algebra.dim, f.invariants))
    counts: dict = {}
    for f in factors:
        counts[f.invariants] = counts.get(f.invariants, 0) + 1
    classes = [(inv, mult, inv[0] <= 4) for inv, mult in counts.items()]
    return DecompositionResult(factors, classes)


# -- Malcev extension ----------------------------------------------------

def extend_lattice_hom(g: LieAlgebra, log_generators, target: LieAlgebra, images):
    """Unique linear L with L(log gamma_i) = log f(gamma_i), checked to be a Lie map.

    Returns the matrix of L (target.dim rows, g.dim columns).
    """
    n, p = g.dim, target.dim
    gens = [[g.field(x) for x in v] for v in log_generators]
    ims = [[target.field(x) for x in v] for v in images]
    if len(gens) != len(ims):
        raise ValueError("generator and image counts differ")
    if linalg.rank(gens) < n:
        raise GeneratorsDoNotSpan(f"generators span only {linalg.rank(gens)} of {n} dimensions")
    # solve L g_i = y_i row by row of L
    mat = []
    for r in range(p):
        sol = linalg.solve(gens, [y[r] for y in ims])
        if sol is None:
            raise NotAHomomorphism(
                "images are not a linear function of the logs of the generators",
                witness=("linear", r),
            )
        mat.append(sol)
    cols = [linalg.matvec(mat, list(g.e(i))) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            lhs = linalg.matvec(mat, list(g.bracket_basis(i, j)))
            rhs = target.bracket(cols[i], cols[j])
            if any(a != b for a, b in zip(lhs, rhs)):
                raise NotAHomomorphism(
                    f"L[e{i},e{j}] = {tuple(map(str, lhs))} but [Le{i},Le{j}] = {tuple(map(str, rhs))}",
                    witness=(i, j, tuple(lhs), tuple(rhs)),
                )
    return mat


# -- I/O and bundled algebras -------------------------------------------

def parse_algebra(text: str) -> LieAlgebra:
    """Parse the text format: ``dim n``, ``field Q|Q(sqrt d)``, then ``i j k value`` (1-based)."""
    dim = None
    fld = Field(None)
    entries = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "dim":
            dim = int(parts[1])
        elif parts[0] == "field":
            fld = Field.parse("".join(parts[1:]))
        else:
            if len(parts) != 4:
                raise InvalidAlgebra(f"bad structure constant line {raw!r}")
            i, j, k = (int(x) - 1 for x in parts[:3])
            if i >= j:
                raise InvalidAlgebra(f"only i < j entries are stored: {raw!r}")
            entries.append((i, j, k, parse_element(parts[3], fld.d)))
    if dim is None:
        raise InvalidAlgebra("missing 'dim' header")
    return validate_algebra(dim, fld, entries)


def load_algebra(path) -> LieAlgebra:
    return parse_algebra(Path(path).read_text())


def heisenberg(d: int | None = None) -> LieAlgebra:
    return validate_algebra(3, d, [(0, 1, 2, 1)])


def abelian(n: int, d: int | None = None) -> LieAlgebra:
    return validate_algebra(n, d, [])


def filiform4(d: int | None = None) -> LieAlgebra:
    return validate_algebra(4, d, [(0, 1, 2, 1), (0, 2, 3, 1)])


def builtin(name: str, d: int | None = None) -> LieAlgebra:
    name = name.lower()
    if name in ("h3", "heisenberg"):
        return heisenberg(d)
    if name in ("filiform4", "n4"):
        return filiform4(d)
    if name.startswith("abelian"):
        return abelian(int(name[len("abelian"):] or 1), d)
    raise KeyError(name)
