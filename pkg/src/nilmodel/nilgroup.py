"""Simply connected nilpotent Lie groups in exponential coordinates.

A group element *is* a Lie algebra vector; multiplication is the BCH series
specialised to the algebra's structure constants and truncated at its class.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import freenilp
from .exactfield import QuadFieldElem, embed
from .liealg import LieAlgebra, to_adapted


class GroupMismatch(ValueError):
    pass


class ArityMismatch(ValueError):
    pass


def _eval_tree(tree, args, bracket, memo):
    key = tree if isinstance(tree, int) else id(tree)
    if isinstance(tree, int):
        return args[tree]
    if key in memo:
        return memo[key]
    val = bracket(_eval_tree(tree[0], args, bracket, memo), _eval_tree(tree[1], args, bracket, memo))
    memo[key] = val
    return val


class NilGroup:
    """The group attached to a nilpotent algebra written in an adapted basis."""

    def __init__(self, algebra: LieAlgebra):
        if algebra.nilpotency_class is None:
            raise ValueError("algebra must be validated first")
        adapted, weights = to_adapted(algebra)
        if adapted is not algebra:
            raise ValueError("standard basis is not adapted; use liealg.to_adapted first")
        self.algebra = algebra
        self.weights = weights
        self.dim = algebra.dim
        self.c = max(algebra.nilpotency_class, 1)

    @classmethod
    def adapted(cls, algebra: LieAlgebra) -> NilGroup:
        return cls(to_adapted(algebra)[0])

    def __repr__(self):
        return f"NilGroup(dim={self.dim}, class={self.c}, weights={self.weights})"

    @cached_property
    def bch_terms(self) -> list:
        """[(bracket tree in letters 0=x, 1=y, coefficient)] of BCH up to the class."""
        series = freenilp.bch_series(self.c)
        b = series.basis
        return [(b.tree(i), coef) for i, coef in series.coeffs.items()]

    # -- exact / generic multiplication ---------------------------------
    def mul_vectors(self, x: Sequence, y: Sequence, bracket=None) -> tuple:
        bracket = bracket or self.algebra.bracket
        memo: dict = {}
        out = None
        for tree, coef in self.bch_terms:
            term = _eval_tree(tree, (tuple(x), tuple(y)), bracket, memo)
            if out is None:
                out = [t * coef for t in term]
            else:
                out = [o + t * coef for o, t in zip(out, term)]
        return tuple(out)

    def mul_float(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Vectorised product of float coordinate arrays of shape (..., dim)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        memo: dict = {}
        out = np.zeros(np.broadcast_shapes(x.shape, y.shape))
        for tree, coef in self.bch_terms:
            out = out + float(coef) * _eval_tree(tree, (x, y), self.algebra.bracket_float, memo)
        return out

    def quasi_norm_float(self, x: np.ndarray) -> np.ndarray:
        x = np.abs(np.asarray(x, dtype=float))
        w = np.asarray(self.weights, dtype=float)
        return np.max(x ** (1.0 / w), axis=-1)

    def quasi_dist_float(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.quasi_norm_float(self.mul_float(-np.asarray(x, dtype=float), y))

    # -- elements ---------------------------------------------------------
    def element(self, coords, exact: bool | None = None) -> NilGroupElem:
        coords = tuple(coords)
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates")
        if exact is None:
            exact = not any(isinstance(c, float) for c in coords)
        if exact:
            coords = tuple(self.algebra.field(c) for c in coords)
        else:
            coords = tuple(float(c) for c in coords)
        return NilGroupElem(coords, self, exact)

    def identity(self, exact: bool = True) -> NilGroupElem:
        return self.element(self.algebra.zero() if exact else (0.0,) * self.dim, exact)

    @cached_property
    def law_polynomials(self) -> list:
        """Coordinates of x*y as polynomials in x_0..x_{n-1}, y_0..y_{n-1}."""
        n = self.dim
        xs = [Poly.var(i, 2 * n) for i in range(n)]
        ys = [Poly.var(n + i, 2 * n) for i in range(n)]
        return list(self.mul_vectors(xs, ys, bracket=self._poly_bracket))

    def _poly_bracket(self, u, v):
        out = [Poly.zero(u[0].nvars)] * self.dim
        for i, j, k, c in self.algebra._terms:
            out[k] = out[k] + (u[i] * v[j] - u[j] * v[i]) * c
        return tuple(out)


@dataclass(frozen=True)
class NilGroupElem:
    coords: tuple
    group: NilGroup
    exact: bool = True

    def _check(self, other: NilGroupElem):
        if not isinstance(other, NilGroupElem):
            raise TypeError("not a group element")
        if other.group is not self.group:
            raise GroupMismatch("elements of different groups")
        if other.exact != self.exact:
            raise TypeError("cannot mix exact and approximate elements")

    def __mul__(self, other: NilGroupElem) -> NilGroupElem:
        return group_mul(self, other)

    def inverse(self) -> NilGroupElem:
        return NilGroupElem(tuple(-c for c in self.coords), self.group, self.exact)

    def __pow__(self, e: int) -> NilGroupElem:
        return NilGroupElem(tuple(c * e for c in self.coords), self.group, self.exact)

    def __eq__(self, other):
        return (
            isinstance(other, NilGroupElem)
            and other.group is self.group
            and other.exact == self.exact
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((id(self.group), self.coords))

    def is_identity(self) -> bool:
        return all(c == 0 for c in self.coords)

    def floats(self, which: str = "principal") -> np.ndarray:
        if not self.exact:
            return np.array(self.coords, dtype=float)
        return np.array([embed(c, which) for c in self.coords])

    def __repr__(self):
        return f"NilGroupElem({', '.join(map(str, self.coords))})"


def group_mul(x: NilGroupElem, y: NilGroupElem) -> NilGroupElem:
    x._check(y)
    return NilGroupElem(x.group.mul_vectors(x.coords, y.coords), x.group, x.exact)


def eval_word(w: freenilp.GroupWord, args: Sequence[NilGroupElem]) -> NilGroupElem:
    if w.arity > len(args):
        raise ArityMismatch(f"word needs {w.arity} arguments, got {len(args)}")
    if not args:
        raise ArityMismatch("need at least one argument to fix the group")
    g = args[0].group
    return freenilp.evaluate(
        w, list(args), group_mul, lambda a, e: a ** e, g.identity(args[0].exact) if args[0].exact else g.identity(False)
    )


def quasi_norm(x: NilGroupElem) -> float:
    """max_i |x_i|^(1/w_i) in the principal embedding."""
    vals = x.floats()
    return float(x.group.quasi_norm_float(vals))


def quasi_dist(x: NilGroupElem, y: NilGroupElem) -> float:
    return quasi_norm(group_mul(x.inverse(), y))


# -- sparse polynomials ---------------------------------------------------

class Poly:
    """Sparse multivariate polynomial {exponent tuple: coefficient}."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict, nvars: int):
        self.terms = {e: c for e, c in terms.items() if c != 0}
        self.nvars = nvars

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        return cls({}, nvars)

    @classmethod
    def const(cls, c, nvars: int) -> Poly:
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> Poly:
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): Fraction(1)}, nvars)

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.nvars)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return Poly(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Poly({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else -other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if other == 0:
                return Poly.zero(self.nvars)
            return Poly({e: c * other for e, c in self.terms.items()}, self.nvars)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                p = c1 * c2
                out[e] = out[e] + p if e in out else p
        return Poly(out, self.nvars)

    __rmul__ = __mul__

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def substitute(self, images: Sequence[Poly], nvars: int) -> Poly:
        out = Poly.zero(nvars)
        cache: dict = {}
        for e, c in self.terms.items():
            term = Poly.const(c, nvars)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        p = Poly.const(Fraction(1), nvars)
                        for _ in range(k):
                            p = p * images[i]
                        cache[key] = p
                    term = term * cache[key]
            out = out + term
        return out

    def __call__(self, values: Sequence):
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(values, e):
                if k:
                    t = t * v ** k
            total = total + t
        return total

    def __repr__(self):
        return f"Poly({self.terms})"
