"""Cut-and-project schemes over a real quadratic field and their model sets.

Points of the lattice L = sum_i (1/m_i) O_K e_i are stored as integer rows
(u_0, v_0, u_1, v_1, ...) meaning x_i = (u_i + v_i * omega) / m_i, where
O_K = Z + Z*omega.  The group law restricted to L is compiled once into
integer polynomials so that products of large point arrays stay exact and
vectorised.
"""
from __future__ import annotations

import configparser
import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .exactfield import (
    Field,
    QuadFieldElem,
    conjugate,
    embed,
    integer_coords,
    integral_basis_generator,
    is_algebraic_integer,
    parse_element,
)
from .liealg import LieAlgebra, builtin, load_algebra, to_adapted, validate_algebra
from .nilgroup import NilGroup, Poly

DEFAULT_BUDGET = 5_000_000
_SAFE = 1 << 30


class ClosureFailed(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class RegionTooLarge(RuntimeError):
    def __init__(self, count: int, budget: int):
        super().__init__(f"{count} points requested, budget is {budget}")
        self.count = count
        self.budget = budget


class NotPisot(ValueError):
    pass


# -- exact comparisons on integer arrays ----------------------------------

def _omega_parts(d: int) -> tuple[int, int]:
    """(a0, b0) with omega = (a0 + b0*sqrt d) / 2."""
    return (1, 1) if d % 4 == 1 else (0, 2)


def _widen(*arrays):
    big = any(a.size and (a.dtype == object or np.abs(a).max() >= _SAFE) for a in arrays)
    if big:
        return tuple(a.astype(object) for a in arrays)
    return tuple(a.astype(np.int64) for a in arrays)


def _le_sqrt(A, B, C, d: int):
    """Exact elementwise test A + B*sqrt(d) <= C for integer arrays."""
    A, B, C = np.broadcast_arrays(np.asarray(A), np.asarray(B), np.asarray(C))
    A, B, C = _widen(A, B, C)
    P = C - A
    pos = P >= 0
    sq = P * P
    dB = d * B * B
    return np.where(B == 0, pos, np.where(B > 0, pos & (dB <= sq), pos | (dB >= sq))).astype(bool)


def abs_le(u, v, m: int, bound, d: int, conj: bool = False):
    """Exact test |(u + v*omega)/m| <= bound (omega conjugated if ``conj``).

    Floats settle the clear cases; rows near the boundary are decided with
    integer arithmetic.
    """
    bound = Fraction(bound)
    u = np.asarray(u)
    v = np.asarray(v)
    if u.dtype != object and v.dtype != object and u.size > 64:
        w = embed(integral_basis_generator(d), "conjugate" if conj else "principal")
        x = np.abs(u.astype(float) + v.astype(float) * w) / m
        b = float(bound)
        margin = 1e-7 * (1.0 + b + np.abs(v).max(initial=0) + np.abs(u).max(initial=0)) / m
        out = x <= b
        near = np.abs(x - b) <= margin
        if near.any():
            out[near] = _abs_le_exact(u[near], v[near], m, bound, d, conj)
        return out
    return _abs_le_exact(u, v, m, bound, d, conj)


def _abs_le_exact(u, v, m: int, bound: Fraction, d: int, conj: bool):
    a0, b0 = _omega_parts(d)
    p, q = bound.numerator, bound.denominator
    u = np.asarray(u)
    v = np.asarray(v)
    if abs(p) >= _SAFE or q >= _SAFE:
        u, v = u.astype(object), v.astype(object)
    A = (2 * u + a0 * v) * q
    B = (-b0 if conj else b0) * v * q
    C = 2 * m * p
    return _le_sqrt(A, B, C, d) & _le_sqrt(-A, -B, C, d)


# -- windows ----------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """Symmetric box |star(x)_i| <= bounds[i] in the conjugate embedding."""

    bounds: tuple

    def __post_init__(self):
        b = tuple(Fraction(x) for x in self.bounds)
        if any(x <= 0 for x in b):
            raise ValueError("window bounds must be positive")
        object.__setattr__(self, "bounds", b)

    @classmethod
    def parse(cls, text: str) -> Window:
        return cls(tuple(Fraction(t.strip()) for t in text.replace(";", ",").split(",") if t.strip()))

    def __str__(self):
        return ",".join(str(b) for b in self.bounds)


# -- compiled integer group law --------------------------------------------

@dataclass
class _IntPoly:
    exps: np.ndarray  # (T, nvars)
    numer: list
    denom: int

    def evaluate(self, V, powers):
        total = None
        for e, c in zip(self.exps, self.numer):
            term = None
            for j in np.nonzero(e)[0]:
                f = powers[(j, int(e[j]))]
                term = f if term is None else term * f
            if term is None:
                term = np.ones(V.shape[0], dtype=V.dtype)
            term = term * c
            total = term if total is None else total + term
        if total is None:
            total = np.zeros(V.shape[0], dtype=V.dtype)
        return total


class IntegerLaw:
    """Group law on L as integer-valued polynomials in the (u, v) coordinates."""

    def __init__(self, scheme: Scheme):
        self.scheme = scheme
        n = scheme.dim
        nv = 4 * n
        d = scheme.d
        w = integral_basis_generator(d)
        images = []
        for side in range(2):
            for i in range(n):
                u = Poly.var(side * 2 * n + 2 * i, nv)
                v = Poly.var(side * 2 * n + 2 * i + 1, nv)
                images.append((u + v * w) * Fraction(1, scheme.denominators[i]))
        self.columns: list[_IntPoly] = []
        self.degree = 1
        for k, P in enumerate(scheme.G.law_polynomials):
            Q = P.substitute(images, nv) * scheme.denominators[k]
            self.degree = max(self.degree, Q.degree())
            for part in range(2):
                coeffs = {e: integer_coords(c, d)[part] for e, c in Q.terms.items()}
                coeffs = {e: c for e, c in coeffs.items() if c != 0}
                den = math.lcm(*(c.denominator for c in coeffs.values())) if coeffs else 1
                exps = np.array(list(coeffs), dtype=np.int64).reshape(len(coeffs), nv)
                self.columns.append(_IntPoly(exps, [int(c * den) for c in coeffs.values()], den))

    def _bound(self, V) -> bool:
        """True if int64 evaluation cannot overflow."""
        if V.dtype == object:
            return False
        mx = int(np.abs(V).max()) if V.size else 0
        for col in self.columns:
            tot = sum(abs(c) for c in col.numer) * max(mx, 1) ** self.degree
            if tot >= 1 << 62:
                return False
        return True

    def raw(self, P: np.ndarray, Q: np.ndarray):
        """Undivided numerators and denominators; used by the closure check."""
        P, Q = np.broadcast_arrays(np.atleast_2d(P), np.atleast_2d(Q))
        V = np.concatenate([P, Q], axis=1)
        if not self._bound(V):
            V = V.astype(object)
        powers = {}
        for col in self.columns:
            for e in col.exps:
                for j in np.nonzero(e)[0]:
                    k = int(e[j])
                    if (j, k) not in powers:
                        powers[(j, k)] = V[:, j] ** k if k > 1 else V[:, j]
        return [(col.evaluate(V, powers), col.denom) for col in self.columns]

    def mul(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        out = []
        for val, den in self.raw(P, Q):
            if den != 1:
                if np.any(val % den != 0):
                    raise ClosureFailed("product left the lattice; scheme is not closed")
                val = val // den
            out.append(val)
        res = np.stack(out, axis=1)
        return res if res.dtype == object else res.astype(np.int64)


# -- schemes ----------------------------------------------------------------

@dataclass
class ClosureCertificate:
    degree: int
    grid: int
    variables: int
    subsets: int
    evaluations: int
    passed: bool = True

    def as_dict(self) -> dict:
        return dict(self.__dict__)


class Scheme:
    """(G, H, Gamma) from an algebra over Q(sqrt d) and lattice denominators."""

    def __init__(self, algebra: LieAlgebra, denominators: Sequence[int]):
        if algebra.field.d is None:
            raise ValueError("scheme needs an algebra over a real quadratic field")
        denominators = tuple(int(m) for m in denominators)
        if len(denominators) != algebra.dim or any(m <= 0 for m in denominators):
            raise ValueError("need one positive denominator per basis vector")
        self.algebra = algebra
        self.d = algebra.field.d
        self.dim = algebra.dim
        self.denominators = denominators
        self.G = NilGroup(algebra)
        self.H = NilGroup(algebra.conjugate_algebra())
        self.weights = self.G.weights
        self.certificate: ClosureCertificate | None = None
        w = integral_basis_generator(self.d)
        self.omega = embed(w)
        self.omega_conj = embed(w, "conjugate")

    def __repr__(self):
        return f"Scheme(dim={self.dim}, d={self.d}, denominators={self.denominators})"

    @cached_property
    def law(self) -> IntegerLaw:
        return IntegerLaw(self)

    # conversions
    def principal(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(P)
        m = np.asarray(self.denominators, dtype=float)
        return (P[:, 0::2].astype(float) + P[:, 1::2].astype(float) * self.omega) / m

    def star(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(P)
        m = np.asarray(self.denominators, dtype=float)
        return (P[:, 0::2].astype(float) + P[:, 1::2].astype(float) * self.omega_conj) / m

    def to_field(self, row) -> tuple:
        w = integral_basis_generator(self.d)
        return tuple(
            (int(row[2 * i]) + int(row[2 * i + 1]) * w) / m for i, m in enumerate(self.denominators)
        )

    def from_field(self, vec) -> np.ndarray:
        out = []
        for x, m in zip(vec, self.denominators):
            u, v = integer_coords(Field(self.d)(x) * m, self.d)
            if u.denominator != 1 or v.denominator != 1:
                raise ValueError(f"{x} is not in (1/{m}) O_K")
            out += [int(u), int(v)]
        return np.array(out, dtype=np.int64)

    def in_ball(self, P: np.ndarray, radius) -> np.ndarray:
        """Exact test quasi_norm <= radius for integer rows."""
        P = np.atleast_2d(P)
        radius = Fraction(radius)
        ok = np.ones(P.shape[0], dtype=bool)
        for i, (m, w) in enumerate(zip(self.denominators, self.weights)):
            ok &= abs_le(P[:, 2 * i], P[:, 2 * i + 1], m, radius ** w, self.d)
        return ok

    def in_ball_coord(self, P: np.ndarray, i: int, radius) -> np.ndarray:
        m, w = self.denominators[i], self.weights[i]
        return abs_le(P[:, 2 * i], P[:, 2 * i + 1], m, Fraction(radius) ** w, self.d)

    def in_window(self, P: np.ndarray, window: Window) -> np.ndarray:
        P = np.atleast_2d(P)
        ok = np.ones(P.shape[0], dtype=bool)
        for i, m in enumerate(self.denominators):
            ok &= abs_le(P[:, 2 * i], P[:, 2 * i + 1], m, window.bounds[i], self.d, conj=True)
        return ok

    def quasi_norm(self, P: np.ndarray) -> np.ndarray:
        return self.G.quasi_norm_float(self.principal(P))

    def star_box(self, a: Sequence[float], b: Sequence[float]) -> np.ndarray:
        """Coordinatewise bound on |star(x) star(y)| given |star x_i|<=a_i, |star y_i|<=b_i."""
        ab = list(a) + list(b)
        out = []
        for P in self.H.law_polynomials:
            s = 0.0
            for e, c in P.terms.items():
                t = abs(embed(c))
                for v, k in zip(ab, e):
                    t *= v ** k
                s += t
            out.append(s)
        return np.array(out)

    def principal_box(self, a: Sequence[float], b: Sequence[float]) -> np.ndarray:
        ab = list(a) + list(b)
        out = []
        for P in self.G.law_polynomials:
            s = 0.0
            for e, c in P.terms.items():
                t = abs(embed(c))
                for v, k in zip(ab, e):
                    t *= v ** k
                s += t
            out.append(s)
        return np.array(out)


def lift_algebra(g: LieAlgebra, d: int) -> LieAlgebra:
    """View an algebra over Q (or Q(sqrt d)) as one over Q(sqrt d)."""
    if g.field.d == d:
        return g
    if g.field.d is not None:
        raise ValueError(f"algebra is over {g.field}, not Q(sqrt {d})")
    fld = Field(d)
    entries = [(i, j, k, fld(c)) for i, j, k, c in g._terms]
    return validate_algebra(g.dim, fld, entries)


def _grid_points(nvars: int, degree: int):
    """Union of the grids {0..D}^S over variable subsets |S| <= D, zero elsewhere."""
    rows = [np.zeros(nvars, dtype=np.int64)]
    subsets = 1
    for size in range(1, min(degree, nvars) + 1):
        vals = np.array(list(itertools.product(range(1, degree + 1), repeat=size)), dtype=np.int64)
        for S in itertools.combinations(range(nvars), size):
            block = np.zeros((len(vals), nvars), dtype=np.int64)
            block[:, S] = vals
            rows.append(block)
            subsets += 1
    return np.vstack(rows), subsets


def verify_lattice_closure(scheme: Scheme) -> ClosureCertificate:
    """Certify L * L subset of L.

    Each output coordinate is a polynomial of total degree <= D in the integer
    coordinates of the two factors; it is integer valued on Z^k iff its
    Newton coefficients are integers, and those are integer combinations of
    its values on {0..D}^S for |S| <= D.  Evaluating there therefore decides
    closure.
    """
    law = scheme.law
    n = scheme.dim
    D = law.degree
    pts, subsets = _grid_points(4 * n, D)
    vals = law.raw(pts[:, : 2 * n], pts[:, 2 * n :])
    for val, den in vals:
        bad = np.nonzero(val % den != 0)[0]
        if len(bad):
            row = pts[bad[0]]
            x = scheme.G.element(scheme.to_field(row[: 2 * n]))
            y = scheme.G.element(scheme.to_field(row[2 * n :]))
            prod = (x * y).coords
            raise ClosureFailed(
                f"product {tuple(map(str, prod))} of {x} and {y} leaves the lattice",
                witness=(x, y),
            )
    cert = ClosureCertificate(D, D + 1, 4 * n, subsets, len(pts))
    scheme.certificate = cert
    return cert


def build_scheme(algebra, d: int | None = None, denominators: Sequence[int] | None = None) -> Scheme:
    """Scheme from an algebra object or name; closure is certified."""
    if isinstance(algebra, (str, Path)):
        p = Path(algebra)
        algebra = load_algebra(p) if p.exists() else builtin(str(algebra), d)
    if d is None:
        d = algebra.field.d
    if d is None:
        raise ValueError("need a quadratic field")
    g = lift_algebra(algebra, d)
    g, _ = to_adapted(g)
    if denominators is None:
        denominators = (1,) * g.dim
    s = Scheme(g, denominators)
    verify_lattice_closure(s)
    return s


# -- enumeration -------------------------------------------------------------

def coordinate_values(d: int, m: int, bound, star_bound, search_scale: int = 1) -> np.ndarray:
    """Integer pairs (u, v) with |(u+v w)/m| <= bound and |(u+v w')/m| <= star_bound.

    Candidates come from the box obtained by scaling both bounds by
    ``search_scale``; every candidate is then filtered exactly against the
    unscaled bounds.  Rows are sorted lexicographically.
    """
    bound, star_bound = Fraction(bound), Fraction(star_bound)
    w = embed(integral_basis_generator(d))
    wc = embed(integral_basis_generator(d), "conjugate")
    P = m * float(bound) * search_scale
    S = m * float(star_bound) * search_scale
    vmax = int(math.floor((P + S) / abs(w - wc))) + 1
    v = np.arange(-vmax, vmax + 1, dtype=np.int64)
    lo = np.maximum(-P - v * w, -S - v * wc)
    hi = np.minimum(P - v * w, S - v * wc)
    lo_i = np.ceil(lo).astype(np.int64) - 1
    hi_i = np.floor(hi).astype(np.int64) + 1
    counts = np.maximum(hi_i - lo_i + 1, 0)
    total = int(counts.sum())
    if total == 0:
        return np.zeros((0, 2), dtype=np.int64)
    vv = np.repeat(v, counts)
    starts = np.repeat(lo_i, counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    uu = starts + offs
    ok = abs_le(uu, vv, m, bound, d) & abs_le(uu, vv, m, star_bound, d, conj=True)
    out = np.stack([uu[ok], vv[ok]], axis=1)
    order = np.lexsort((out[:, 1], out[:, 0]))
    return out[order]


def _cartesian(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Lexicographic cartesian product of per-coordinate (u, v) arrays."""
    sizes = [len(f) for f in factors]
    total = math.prod(sizes)
    out = np.empty((total, 2 * len(factors)), dtype=np.int64)
    rep = total
    tile = 1
    for i, f in enumerate(factors):
        rep //= max(len(f), 1)
        block = np.repeat(f, rep, axis=0)
        out[:, 2 * i : 2 * i + 2] = np.tile(block, (tile, 1))
        tile *= len(f)
    return out


class _RowIndex:
    """Exact membership of integer rows in a fixed set."""

    def __init__(self, pts: np.ndarray):
        self.n = pts.shape[1] if pts.ndim == 2 else 0
        if len(pts) == 0:
            self.lo = np.zeros(self.n, dtype=np.int64)
            self.span = np.ones(self.n, dtype=np.int64)
            self.keys = np.zeros(0, dtype=np.int64)
            self.packed = True
            return
        self.lo = pts.min(axis=0)
        self.span = pts.max(axis=0) - self.lo + 1
        self.packed = math.prod(int(s) for s in self.span) < (1 << 62)
        if self.packed:
            self.keys = np.sort(self._keys(pts))
        else:
            self.set = {r.tobytes() for r in np.ascontiguousarray(pts, dtype=np.int64)}

    def _keys(self, P):
        k = np.zeros(len(P), dtype=np.int64)
        for j in range(self.n):
            k = k * int(self.span[j]) + (P[:, j] - self.lo[j])
        return k

    def contains(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(P)
        if not self.packed:
            Q = np.ascontiguousarray(P, dtype=np.int64)
            return np.array([r.tobytes() in self.set for r in Q], dtype=bool)
        if len(self.keys) == 0:
            return np.zeros(len(P), dtype=bool)
        inside = np.all((P >= self.lo) & (P < self.lo + self.span), axis=1)
        out = np.zeros(len(P), dtype=bool)
        if inside.any():
            k = self._keys(P[inside].astype(np.int64))
            pos = np.searchsorted(self.keys, k)
            pos = np.minimum(pos, len(self.keys) - 1)
            out[inside] = self.keys[pos] == k
        return out


def canonical(pts: np.ndarray) -> np.ndarray:
    """Deduplicated rows in lexicographic order."""
    if len(pts) == 0:
        return pts.reshape(0, pts.shape[1] if pts.ndim == 2 else 0).astype(np.int64)
    if pts.dtype != object:
        lo = pts.min(axis=0)
        span = pts.max(axis=0) - lo + 1
        if math.prod(int(x) for x in span) < (1 << 62):
            keys = np.zeros(len(pts), dtype=np.int64)
            for j in range(pts.shape[1]):
                keys = keys * int(span[j]) + (pts[:, j] - lo[j])
            _, first = np.unique(keys, return_index=True)
            return pts[first]
    return np.unique(pts, axis=0)


class PointSet:
    """An explicit finite subset of the lattice, canonically ordered."""

    def __init__(self, scheme: Scheme, pts: np.ndarray, meta: dict | None = None):
        self.scheme = scheme
        self.pts = canonical(np.asarray(pts, dtype=np.int64).reshape(-1, 2 * scheme.dim))
        self.meta = dict(meta or {})

    @property
    def count(self) -> int:
        return len(self.pts)

    def __len__(self):
        return self.count

    @cached_property
    def _index(self) -> _RowIndex:
        return _RowIndex(self.pts)

    def contains(self, P: np.ndarray) -> np.ndarray:
        return self._index.contains(P)

    def points(self, radius=None, box=None, max_points: int = DEFAULT_BUDGET) -> np.ndarray:
        P = self.pts
        if radius is not None:
            P = P[self.scheme.in_ball(P, radius)]
        if box is not None:
            P = P[np.all(np.abs(self.scheme.principal(P)) <= np.asarray(box) * (1 + 1e-12) + 1e-12, axis=1)]
        if len(P) > max_points:
            raise RegionTooLarge(len(P), max_points)
        return P

    @cached_property
    def star_bounds(self) -> np.ndarray:
        if not self.count:
            return np.zeros(self.scheme.dim)
        return np.abs(self.scheme.star(self.pts)).max(axis=0)


class ModelSetPatch:
    """Model set points of quasi-norm <= R, stored as a product of coordinate lists.

    With a box window and the weighted max quasi-norm both constraints are
    coordinatewise, so the patch is exactly the cartesian product of the
    admissible values of each coordinate.
    """

    def __init__(self, scheme: Scheme, window: Window, R, factors=None, meta=None, search_scale: int = 1):
        if len(window.bounds) != scheme.dim:
            raise ValueError("window dimension does not match the scheme")
        self.scheme = scheme
        self.window = window
        self.R = Fraction(R)
        if self.R <= 0:
            raise ValueError("R must be positive")
        if factors is None:
            factors = [
                coordinate_values(scheme.d, m, self.R ** w, window.bounds[i], search_scale)
                for i, (m, w) in enumerate(zip(scheme.denominators, scheme.weights))
            ]
        self.factors = factors
        self.meta = dict(meta or {})
        self.meta.setdefault("R", str(self.R))
        self.meta.setdefault("window", str(window))
        self.meta["factor_sizes"] = [len(f) for f in factors]

    @property
    def count(self) -> int:
        return math.prod(len(f) for f in self.factors)

    def __len__(self):
        return self.count

    def contains(self, P: np.ndarray) -> np.ndarray:
        P = np.atleast_2d(P)
        return self.scheme.in_window(P, self.window) & self.scheme.in_ball(P, self.R)

    def restricted_factors(self, radius=None, box=None) -> list:
        out = []
        for i, (f, m, w) in enumerate(zip(self.factors, self.scheme.denominators, self.scheme.weights)):
            if radius is not None:
                f = f[abs_le(f[:, 0], f[:, 1], m, Fraction(radius) ** w, self.scheme.d)]
            if box is not None:
                x = (f[:, 0] + f[:, 1] * self.scheme.omega) / m
                f = f[np.abs(x) <= box[i] * (1 + 1e-12) + 1e-12]
            out.append(f)
        return out

    def count_in(self, radius=None, box=None) -> int:
        return math.prod(len(f) for f in self.restricted_factors(radius, box))

    def points(self, radius=None, box=None, max_points: int = DEFAULT_BUDGET) -> np.ndarray:
        fs = self.restricted_factors(radius, box)
        total = math.prod(len(f) for f in fs)
        if total > max_points:
            raise RegionTooLarge(total, max_points)
        return _cartesian(fs)

    @property
    def star_bounds(self) -> np.ndarray:
        return np.array([float(b) for b in self.window.bounds])


def enumerate_model_set(scheme: Scheme, window: Window, R, budget: int = 10**6) -> ModelSetPatch:
    """Exact enumeration of the model set in the quasi-ball of radius R.

    ``budget`` caps the number of admissible values per coordinate; the
    patch itself is kept in product form and only materialised on demand.
    """
    patch = ModelSetPatch(scheme, window, R)
    for f in patch.factors:
        if len(f) > budget:
            raise RegionTooLarge(len(f), budget)
    return patch


def enumeration_complete(scheme: Scheme, window: Window, R) -> bool:
    """Doubling the integer search box yields no additional admissible point."""
    a = ModelSetPatch(scheme, window, R)
    b = ModelSetPatch(scheme, window, R, search_scale=2)
    return all(np.array_equal(x, y) for x, y in zip(a.factors, b.factors))


# -- derived patches ---------------------------------------------------------

def pisot_patch(a, b, d: int, max_exp: int) -> PointSet:
    """Y = {+-sum_{i in I} gamma^i : I subset {0..max_exp}} for gamma = a + b sqrt d."""
    fld = Field(d)
    gamma = fld(a) + fld(b) * fld.sqrt
    if not (gamma > 1 and abs(conjugate(gamma)) < 1):
        raise NotPisot(f"{gamma} is not a Pisot number")
    if not is_algebraic_integer(gamma, d):
        raise NotPisot(f"{gamma} is not an algebraic integer")
    scheme = build_scheme(validate_algebra(1, d, []), d, (1,))
    power = fld.one
    S = np.zeros((1, 2), dtype=np.int64)
    for _ in range(max_exp + 1):
        step = scheme.from_field((power,))
        S = np.unique(np.vstack([S, S + step]), axis=0)
        power = power * gamma
    Y = np.unique(np.vstack([S, -S]), axis=0)
    sg = abs(embed(gamma, "conjugate"))
    meta = {"gamma": str(gamma), "max_exp": max_exp, "star_bound": 1 / (1 - sg)}
    return PointSet(scheme, Y, meta)


def sorted_values(ps: PointSet) -> np.ndarray:
    """Rows of a 1-D point set ordered by principal value."""
    x = ps.scheme.principal(ps.pts)[:, 0]
    return ps.pts[np.argsort(x, kind="stable")]


def _sub_scheme(scheme: Scheme, idx: Sequence[int]) -> Scheme:
    basis = [scheme.algebra.e(i) for i in idx]
    sub = scheme.algebra.restrict(basis)
    s = Scheme(sub, [scheme.denominators[i] for i in idx])
    verify_lattice_closure(s)
    return s


def _cols(idx):
    return [c for i in idx for c in (2 * i, 2 * i + 1)]


def abelianize_patch(patch):
    """Project to the coordinates of weight one, i.e. modulo [g, g]."""
    scheme = patch.scheme
    idx = [i for i, w in enumerate(scheme.weights) if w == 1]
    if len(idx) == scheme.dim:
        return patch
    sub = Scheme(
        validate_algebra(len(idx), scheme.d, []), [scheme.denominators[i] for i in idx]
    )
    verify_lattice_closure(sub)
    meta = dict(patch.meta, abelianized=True)
    if isinstance(patch, ModelSetPatch):
        win = Window(tuple(patch.window.bounds[i] for i in idx))
        return ModelSetPatch(sub, win, patch.R, [patch.factors[i] for i in idx], meta)
    return PointSet(sub, patch.pts[:, _cols(idx)], meta)


def intersect_derived(product: PointSet) -> PointSet:
    """Points of a product patch lying in [G, G] (weight-one coordinates zero)."""
    scheme = product.scheme
    low = [i for i, w in enumerate(scheme.weights) if w == 1]
    high = [i for i, w in enumerate(scheme.weights) if w > 1]
    P = product.pts
    keep = np.all(P[:, _cols(low)] == 0, axis=1) if low else np.ones(len(P), dtype=bool)
    meta = dict(product.meta, derived=True)
    if not high:
        return PointSet(scheme, P[keep], meta)
    sub = _sub_scheme(scheme, high)
    r = meta.pop("region_radius", None)
    if r is not None:
        # the sub-scheme reweights, so the old quasi-ball becomes a box
        meta["region_box"] = [float(Fraction(r) ** scheme.weights[i]) for i in high]
    return PointSet(sub, P[keep][:, _cols(high)], meta)


# -- configs and output --------------------------------------------------------

@dataclass
class SchemeConfig:
    algebra: str
    d: int
    denominators: tuple
    window: Window
    R: Fraction
    core_fraction: Fraction = Fraction(1, 4)
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str, base: Path | None = None) -> SchemeConfig:
        cp = configparser.ConfigParser()
        cp.read_string(text)
        sc = cp["scheme"]
        alg = sc.get("algebra")
        if base is not None and (base / alg).exists():
            alg = str(base / alg)
        d = sc.getint("d")
        dens = tuple(int(x) for x in sc.get("denominators", "").replace(",", " ").split()) or None
        ms = cp["modelset"] if cp.has_section("modelset") else {}
        window = Window.parse(ms.get("window", "1"))
        R = Fraction(ms.get("R", "10"))
        core = Fraction(ms.get("core_fraction", "1/4"))
        extra = {s: dict(cp[s]) for s in cp.sections() if s not in ("scheme", "modelset")}
        if dens is None:
            dens = ()
        return cls(alg, d, dens, window, R, core, extra)

    @classmethod
    def load(cls, path) -> SchemeConfig:
        p = Path(path)
        return cls.from_text(p.read_text(), p.parent)

    def as_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "d": self.d,
            "denominators": list(self.denominators),
            "window": str(self.window),
            "R": str(self.R),
            "core_fraction": str(self.core_fraction),
        }

    def build(self) -> Scheme:
        return build_scheme(self.algebra, self.d, self.denominators or None)


def point_records(patch, P: np.ndarray | None = None):
    """One dict per point: integer coordinates with denominators and both embeddings."""
    s = patch.scheme
    P = patch.points() if P is None else P
    emb = s.principal(P)
    st = s.star(P)
    for row, e, t in zip(P, emb, st):
        yield {
            "coords": [[int(row[2 * i]), int(row[2 * i + 1]), m] for i, m in enumerate(s.denominators)],
            "embed": [round(float(x), 12) for x in e],
            "star": [round(float(x), 12) for x in t],
        }


def write_jsonl(patch, out, P=None) -> int:
    n = 0
    for rec in point_records(patch, P):
        out.write(json.dumps(rec, sort_keys=True) + "\n")
        n += 1
    return n


def write_csv(patch, out, P=None) -> int:
    s = patch.scheme
    P = patch.points() if P is None else P
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f"x{i}" for i in range(s.dim)] + [f"star{i}" for i in range(s.dim)])
    for e, t in zip(s.principal(P), s.star(P)):
        w.writerow([f"{x:.12g}" for x in e] + [f"{x:.12g}" for x in t])
    return len(P)


def patch_to_csv_text(patch, P=None) -> str:
    buf = io.StringIO()
    write_csv(patch, buf, P)
    return buf.getvalue()
