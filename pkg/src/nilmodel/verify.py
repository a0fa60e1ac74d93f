"""Delone checks, approximate-subgroup certificates and the other verification runs.

Distances are measured in the principal embedding.  Point identities are
always decided on exact integer coordinates; floats only rank candidates.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import freenilp
from .cutproject import ModelSetPatch, PointSet, RegionTooLarge, Scheme, canonical
from .nilgroup import quasi_norm

MIN_SEPARATION_THRESHOLD = 1e-9
GROWTH_TOLERANCE = 1.05
DRIFT_TOLERANCE = 1e-6


class EmptyCore(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, message, partial_count=0):
        super().__init__(message)
        self.partial_count = partial_count


class FactorizationGap(RuntimeError):
    pass


class RankDeficient(ValueError):
    pass


# -- neighbour search ------------------------------------------------------------

class NeighborIndex:
    """Radius queries on a finite subset of the lattice.

    Points are sorted lexicographically by their principal coordinates, which
    follow the weight order of an adapted basis.  For a query g, the k-th
    coordinate of lambda^-1 g equals c_k - lambda_k where c_k only involves
    coordinates of smaller weight; fixing coordinates one at a time therefore
    turns the search into a sequence of one-dimensional range queries.
    """

    def __init__(self, scheme: Scheme, pts: np.ndarray, metric: str = "group_quasi"):
        if metric not in ("group_quasi", "euclidean"):
            raise ValueError(f"unknown metric {metric!r}")
        self.scheme = scheme
        self.metric = metric
        self.pts = pts
        X = scheme.principal(pts) if len(pts) else np.zeros((0, scheme.dim))
        order = np.lexsort(X.T[::-1]) if len(pts) else np.zeros(0, dtype=np.int64)
        self.order = order
        self.X = X[order]
        n = scheme.dim
        self.starts = []
        N = len(self.X)
        for k in range(n):
            if N == 0:
                self.starts.append(np.zeros(0, dtype=np.int64))
                continue
            if k == n - 1:
                self.starts.append(np.arange(N, dtype=np.int64))
                continue
            change = np.any(self.X[1:, : k + 1] != self.X[:-1, : k + 1], axis=1)
            self.starts.append(np.concatenate([[0], np.nonzero(change)[0] + 1]).astype(np.int64))
        self.weights = np.asarray(scheme.weights, dtype=float)

    def _offset(self, lam_prefix: np.ndarray, g: np.ndarray, k: int) -> np.ndarray:
        if self.metric == "euclidean":
            return g[:, k]
        x = np.zeros_like(g)
        x[:, :k] = -lam_prefix
        return self.scheme.G.mul_float(x, g)[:, k]

    @staticmethod
    def _bisect(col: np.ndarray, lo: np.ndarray, hi: np.ndarray, value: np.ndarray, right: bool):
        lo = lo.copy()
        hi = hi.copy()
        while True:
            active = lo < hi
            if not active.any():
                return lo
            mid = (lo + hi) // 2
            midv = col[np.minimum(mid, len(col) - 1)]
            go = (midv <= value) if right else (midv < value)
            go &= active
            lo = np.where(go, mid + 1, lo)
            hi = np.where(active & ~go, mid, hi)

    def query(self, queries: np.ndarray, rho: float, chunk: int = 200_000, nearest: bool = False):
        """All (query index, point index, distance) with distance <= rho.

        With ``nearest`` the last coordinate only keeps its two closest values,
        which still contains the nearest point of every query.
        """
        queries = np.atleast_2d(np.asarray(queries, dtype=float))
        out_q, out_t, out_d = [], [], []
        for s in range(0, len(queries), chunk):
            q, t, d = self._query(queries[s : s + chunk], rho, nearest)
            out_q.append(q + s)
            out_t.append(t)
            out_d.append(d)
        if not out_q:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0)
        return np.concatenate(out_q), np.concatenate(out_t), np.concatenate(out_d)

    def _query(self, g: np.ndarray, rho: float, nearest: bool = False):
        N = len(self.X)
        n = self.scheme.dim
        qi = np.arange(len(g))
        lo = np.zeros(len(g), dtype=np.int64)
        hi = np.full(len(g), N, dtype=np.int64)
        acc = np.zeros(len(g))
        tol = 1e-9 * (1 + np.abs(g).max(initial=0))
        for k in range(n):
            if len(qi) == 0 or N == 0:
                break
            w = self.weights[k] if self.metric == "group_quasi" else 1.0
            r = rho ** w + tol
            prefix = self.X[lo, :k]
            c = self._offset(prefix, g[qi], k)
            col = self.X[:, k]
            a = self._bisect(col, lo, hi, c - r, right=False)
            b = self._bisect(col, lo, hi, c + r, right=True)
            if nearest and k == n - 1:
                # only the two values closest to c can minimise the last term
                mid = self._bisect(col, lo, hi, c, right=False)
                a = np.maximum(a, mid - 1)
                b = np.minimum(b, mid + 1)
            st = self.starts[k]
            i0 = np.searchsorted(st, a)
            i1 = np.searchsorted(st, b)
            cnt = np.maximum(i1 - i0, 0)
            tot = int(cnt.sum())
            rep = np.repeat(np.arange(len(qi)), cnt)
            idx = np.repeat(i0, cnt) + (np.arange(tot) - np.repeat(np.cumsum(cnt) - cnt, cnt))
            new_lo = st[idx]
            nxt = np.append(st, N)
            new_hi = np.minimum(nxt[idx + 1], hi[rep])
            comp = np.abs(c[rep] - self.X[new_lo, k])
            if self.metric == "group_quasi":
                acc = np.maximum(acc[rep], comp ** (1.0 / w))
            else:
                acc = acc[rep] + comp * comp
            qi, lo, hi = qi[rep], new_lo, new_hi
        d = acc if self.metric == "group_quasi" else np.sqrt(acc)
        keep = d <= rho + tol
        return qi[keep], self.order[lo[keep]], d[keep]

    def nearest(self, queries: np.ndarray, rho0: float = 1.0, rho_max: float = 1e12):
        """Nearest indexed point for each query (distance inf if none within rho_max)."""
        queries = np.atleast_2d(np.asarray(queries, dtype=float))
        best = np.full(len(queries), np.inf)
        arg = np.full(len(queries), -1, dtype=np.int64)
        todo = np.arange(len(queries))
        rho = rho0
        while len(todo) and rho <= rho_max:
            q, t, d = self.query(queries[todo], rho, chunk=20_000, nearest=True)
            if len(q):
                o = np.lexsort((d, q))
                q, t, d = q[o], t[o], d[o]
                first = np.concatenate([[True], q[1:] != q[:-1]])
                best[todo[q[first]]] = d[first]
                arg[todo[q[first]]] = t[first]
            todo = todo[np.isinf(best[todo])]
            rho *= 2
        return arg, best


# -- reports -----------------------------------------------------------------------

@dataclass
class DeloneReport:
    min_separation: float | None = None
    covering_radius_estimate: float | None = None
    core_radius: float | None = None
    grid_step: float | None = None
    grid_points: int = 0
    points_in_core: int = 0
    metric: str = "group_quasi"
    separation_witness: list | None = None
    region_sound: bool = True
    passed: bool = True
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def _core_points(patch, core, max_points):
    P = patch.points(core, max_points=max_points) if core is not None else patch.points(max_points=max_points)
    return P


def _exact_norm(scheme: Scheme, row: np.ndarray, metric: str) -> float:
    if metric == "euclidean":
        return float(np.linalg.norm(scheme.principal(row)[0]))
    x = scheme.G.element(scheme.to_field(row))
    return quasi_norm(x)


def min_separation(
    patch,
    metric: str = "group_quasi",
    core=None,
    threshold: float = MIN_SEPARATION_THRESHOLD,
    max_points: int = 5_000_000,
) -> DeloneReport:
    """Minimum distance over distinct pairs of points of the core."""
    scheme = patch.scheme
    P = _core_points(patch, core, max_points)
    if len(P) < 2:
        raise EmptyCore(f"{len(P)} point(s) in core")
    idx = NeighborIndex(scheme, P, metric)
    X = scheme.principal(P)
    # an upper bound from a few points, then an exhaustive radius query
    probe = np.argsort(np.abs(X).max(axis=1))[: min(64, len(P))]
    rho = 1.0
    delta = np.inf
    while not np.isfinite(delta):
        q, t, d = idx.query(X[probe], rho)
        mask = probe[q] != t
        if mask.any():
            delta = float(d[mask].min())
        rho *= 2
    q, t, d = idx.query(X, delta)
    mask = q != t
    q, t, d = q[mask], t[mask], d[mask]
    j = int(np.lexsort((t, q, d))[0])
    a, b = P[q[j]], P[t[j]]
    diff = scheme.law.mul(-b[None, :], a[None, :])[0] if metric == "group_quasi" else a - b
    if not np.any(diff):
        raise AssertionError("distinct rows produced a zero difference")
    value = _exact_norm(scheme, diff, metric)
    return DeloneReport(
        min_separation=value,
        core_radius=None if core is None else float(core),
        points_in_core=len(P),
        metric=metric,
        separation_witness=[b.tolist(), a.tolist()],
        passed=value > threshold,
    )


def _grid(scheme: Scheme, core: float, step: float, metric: str) -> np.ndarray:
    axes = []
    for w in scheme.weights:
        ww = w if metric == "group_quasi" else 1
        lim = core ** ww
        h = step ** ww
        k = int(math.floor(lim / h + 1e-9))
        axes.append(np.arange(-k, k + 1) * h)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _enclosing_radius(patch) -> float | None:
    if isinstance(patch, ModelSetPatch):
        return float(patch.R)
    r = patch.meta.get("region_radius")
    return None if r is None else float(r)


def covering_radius(
    patch,
    grid_step: float,
    core,
    metric: str = "group_quasi",
    rho0: float = 0.5,
    max_points: int = 5_000_000,
) -> DeloneReport:
    """max over grid points g of the core of min over points l of dist(l, g)."""
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    scheme = patch.scheme
    core = float(core)
    G = _grid(scheme, core, grid_step, metric)
    if patch.count == 0:
        raise EmptyCore("empty patch")
    rho = rho0
    enclosing = _enclosing_radius(patch)
    while True:
        lim = [core ** (w if metric == "group_quasi" else 1) for w in scheme.weights]
        if metric == "group_quasi":
            rlim = [rho ** w for w in scheme.weights]
            box = scheme.principal_box(lim, rlim)
        else:
            box = np.array(lim) + rho
        P = patch.points(box=box, max_points=max_points)
        if len(P) == 0:
            rho *= 2
            continue
        idx = NeighborIndex(scheme, P, metric)
        _, best = idx.nearest(G, rho0=min(rho, rho0), rho_max=rho)
        if np.all(np.isfinite(best)):
            break
        rho *= 2
        if rho > 1e9:
            raise EmptyCore("no patch point within reach of the grid")
    value = float(best.max())
    sound = True
    region_box = getattr(patch, "meta", {}).get("region_box")
    if region_box is not None:
        sound = bool(np.all(box <= np.asarray(region_box) + 1e-12))
    elif enclosing is not None:
        w = np.asarray(scheme.weights) if metric == "group_quasi" else np.ones(scheme.dim)
        sound = bool(np.all(box <= enclosing ** w + 1e-12))
    return DeloneReport(
        covering_radius_estimate=value,
        core_radius=core,
        grid_step=grid_step,
        grid_points=len(G),
        points_in_core=len(P),
        metric=metric,
        region_sound=sound,
        passed=bool(np.isfinite(value)) and sound,
    )


def delone_report(patch, core, grid_step, metric="group_quasi", cover_core=None) -> DeloneReport:
    sep = min_separation(patch, metric, core)
    cov = covering_radius(patch, grid_step, cover_core if cover_core is not None else core, metric)
    sep.covering_radius_estimate = cov.covering_radius_estimate
    sep.grid_step = grid_step
    sep.grid_points = cov.grid_points
    sep.region_sound = cov.region_sound
    sep.extra["cover_core"] = cov.core_radius
    sep.passed = sep.passed and cov.passed
    return sep


def two_scale(a: float, b: float, rel: float = 0.10) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b))


# -- products ----------------------------------------------------------------------

def _mul_filter(scheme, A, B, radius, chunk_rows=2_000_000):
    """Distinct products a*b (a in A, b in B) of quasi-norm <= radius.

    With a radius, candidate pairs come from a radius query: |a b| equals the
    distance from b to a^-1, so only pairs that can land in the ball are
    multiplied.
    """
    if radius is None:
        out = []
        step = max(1, chunk_rows // max(len(B), 1))
        for s in range(0, len(A), step):
            a = A[s : s + step]
            out.append(canonical(scheme.law.mul(np.repeat(a, len(B), axis=0), np.tile(B, (len(a), 1)))))
        return canonical(np.vstack(out)) if out else np.zeros((0, 2 * scheme.dim), dtype=np.int64)
    idx = NeighborIndex(scheme, B)
    inv = scheme.principal(-A)
    out = []
    step = max(1, chunk_rows // max(len(B), 1))
    for s in range(0, len(A), step):
        q, t, _ = idx.query(inv[s : s + step], float(radius))
        if not len(q):
            continue
        R = scheme.law.mul(A[s + q], B[t])
        R = R[scheme.in_ball(R, radius)]
        if len(R):
            out.append(canonical(R))
    if not out:
        return np.zeros((0, 2 * scheme.dim), dtype=np.int64)
    return canonical(np.vstack(out))


def _model_set_square(patch: ModelSetPatch, fr, reg, chunk_rows=2_000_000) -> np.ndarray:
    """{a*b : a, b in patch, |a|, |b| <= fr} cut to the ball of radius reg.

    Top-weight coordinates never enter the bracket terms, so their
    contribution is the sumset of their coordinate lists; only the lower
    coordinates are paired explicitly.
    """
    scheme = patch.scheme
    fs = patch.restricted_factors(fr)
    wmax = max(scheme.weights)
    low = [i for i, w in enumerate(scheme.weights) if w < wmax]
    top = [i for i, w in enumerate(scheme.weights) if w == wmax]
    if not low:
        A = _cartesian_rows([fs[i] for i in top])
        return _mul_filter(scheme, A, A, reg)
    sums = []
    for i in top:
        f = fs[i]
        ss = canonical((f[:, None, :] + f[None, :, :]).reshape(-1, 2))
        sums.append(ss)
    S = _cartesian_rows(sums)
    cols_top = [c for i in top for c in (2 * i, 2 * i + 1)]
    L = _cartesian_rows([fs[i] for i in low])
    n2 = 2 * scheme.dim
    out = []
    step = max(1, chunk_rows // max(len(S), 1))
    pairs_a = np.repeat(np.arange(len(L)), len(L))
    pairs_b = np.tile(np.arange(len(L)), len(L))
    cols_low = [c for i in low for c in (2 * i, 2 * i + 1)]
    for s0 in range(0, len(pairs_a), step):
        a = np.zeros((len(pairs_a[s0 : s0 + step]), n2), dtype=np.int64)
        b = np.zeros_like(a)
        a[:, cols_low] = L[pairs_a[s0 : s0 + step]]
        b[:, cols_low] = L[pairs_b[s0 : s0 + step]]
        base = scheme.law.mul(a, b)
        lowball = np.ones(len(base), dtype=bool)
        for i in low:
            lowball &= scheme.in_ball_coord(base, i, reg)
        base = base[lowball]
        if not len(base):
            continue
        R = np.repeat(base, len(S), axis=0)
        R[:, cols_top] += np.tile(S, (len(base), 1))
        R = R[scheme.in_ball(R, reg)]
        if len(R):
            out.append(canonical(R))
    if not out:
        return np.zeros((0, n2), dtype=np.int64)
    return canonical(np.vstack(out))


def _cartesian_rows(blocks: Sequence[np.ndarray]) -> np.ndarray:
    from .cutproject import _cartesian

    return _cartesian(blocks)


def product_patch(
    patch,
    k: int,
    core_radius,
    factor_radius=None,
    region=None,
    budget: int = 5 * 10**8,
) -> PointSet:
    """k-fold products of patch points of norm <= factor_radius.

    Every partial product is kept inside the ball of radius ``region``
    (default: the core radius), and the result is cut to the core.
    """
    if k < 1:
        raise ValueError("k must be positive")
    scheme = patch.scheme
    core = Fraction(core_radius)
    fr = Fraction(factor_radius) if factor_radius is not None else core
    reg = Fraction(region) if region is not None else core
    F = patch.points(fr)
    S = F[scheme.in_ball(F, reg)]
    work = 0
    counts = [len(S)]
    steps = k - 1
    if k >= 2 and isinstance(patch, ModelSetPatch) and fr <= patch.R:
        S = _model_set_square(patch, fr, reg)
        counts.append(len(S))
        steps -= 1
    for _ in range(steps):
        work += len(S) * len(F)
        if work > budget:
            raise BudgetExceeded(f"product work {work} over budget {budget}", len(S))
        S = _mul_filter(scheme, S, F, reg)
        counts.append(len(S))
    S = S[scheme.in_ball(S, core)]
    meta = {
        "k": k,
        "core_radius": str(core),
        "factor_radius": str(fr),
        "region_radius": str(core),
        "partial_counts": counts,
        "factors": len(F),
    }
    return PointSet(scheme, S, meta)


# -- approximate subgroup certificate ----------------------------------------------

@dataclass
class ApproxCertificate:
    F: np.ndarray
    f_index: np.ndarray
    lam: np.ndarray
    products: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.F)

    def replay(self, scheme: Scheme) -> bool:
        """Recompute every recorded factorisation p = f * lambda exactly."""
        if len(self.products) == 0:
            return True
        got = scheme.law.mul(self.F[self.f_index], self.lam)
        return bool(np.array_equal(got, self.products))

    def as_dict(self) -> dict:
        return {"size": self.size, "F": self.F.tolist(), "products": len(self.products), **self.meta}


def approx_certificate(lam_patch, prod: PointSet, core=None, rho0: float = 1.0) -> ApproxCertificate:
    """Greedy F with every core product p written as f * lambda, lambda in the patch.

    Products are scanned in canonical order; an uncovered p contributes
    f = p * lambda*^-1 with lambda* its nearest patch point.
    """
    scheme = lam_patch.scheme
    P = prod.points(core)
    F: list = []
    f_index = np.full(len(P), -1, dtype=np.int64)
    lam_rows = np.zeros_like(P)
    uncovered = np.arange(len(P))
    X = scheme.principal(P)
    reach = np.abs(X).max(axis=0) if len(P) else np.zeros(scheme.dim)
    enclosing = _enclosing_radius(lam_patch)
    rho = rho0
    index = None
    while len(uncovered):
        i = uncovered[0]
        p = P[i]
        while True:
            if index is None:
                if scheme.G.c > 1:
                    box = scheme.principal_box(reach, [rho ** w for w in scheme.weights])
                else:
                    box = reach + rho
                C = lam_patch.points(box=box)
                index = NeighborIndex(scheme, C) if len(C) else None
            if index is not None:
                arg, _ = index.nearest(X[i : i + 1], rho0=min(rho0, rho), rho_max=rho)
                if arg[0] >= 0:
                    star = C[arg[0]]
                    break
            rho *= 2
            index = None
            if enclosing is not None and rho > 4 * enclosing:
                raise FactorizationGap(f"no patch point near product {p.tolist()}")
        f = scheme.law.mul(p[None, :], -star[None, :])[0]
        F.append(f)
        cand = scheme.law.mul(np.broadcast_to(-f, (len(uncovered), len(f))), P[uncovered])
        ok = lam_patch.contains(cand)
        if not ok[0]:
            raise FactorizationGap("nearest patch point does not factor its own product")
        hit = uncovered[ok]
        f_index[hit] = len(F) - 1
        lam_rows[hit] = cand[ok]
        uncovered = uncovered[~ok]
    Farr = np.array(F, dtype=np.int64).reshape(-1, 2 * scheme.dim)
    meta = {"products": len(P), "core": None if core is None else str(core), "search_radius": rho}
    return ApproxCertificate(Farr, f_index, lam_rows, P, meta)


# -- word identities ----------------------------------------------------------------

def _eval_word_rows(scheme: Scheme, word: freenilp.GroupWord, args: Sequence[np.ndarray]):
    n = len(args[0])
    ident = np.zeros((n, 2 * scheme.dim), dtype=np.int64)
    return freenilp.evaluate(
        word, list(args), lambda a, b: scheme.law.mul(a, b), lambda a, e: a * e, ident
    )


def _sample_rows(patch, count: int, rng: np.random.Generator, radius=None) -> np.ndarray:
    if isinstance(patch, ModelSetPatch):
        fs = patch.restricted_factors(radius)
        cols = [f[rng.integers(0, len(f), count)] for f in fs]
        return np.concatenate(cols, axis=1)
    P = patch.points(radius)
    return P[rng.integers(0, len(P), count)]


@dataclass
class WordIdentityReport:
    samples: int
    failures: int
    target: str
    m: int
    n: int
    digest: str
    passed: bool


def check_word_sum_identity(
    patch, cert: freenilp.WordCertificate, samples: int = 1000, seed: int = 0, radius=None
) -> WordIdentityReport:
    """w(x, y) == m (x + y) (or m [x, y] for bracket words) on sampled patch pairs."""
    scheme = patch.scheme
    if cert.c < scheme.G.c:
        raise ValueError("certificate class is below the algebra class")
    rng = np.random.default_rng(seed)
    x = _sample_rows(patch, samples, rng, radius)
    y = _sample_rows(patch, samples, rng, radius)
    got = _eval_word_rows(scheme, cert.word, [x, y])
    if cert.target == "sum":
        want = cert.m * (x + y)
        bad = np.any(got != want, axis=1)
    else:
        bad = np.zeros(samples, dtype=bool)
        for i in range(samples):
            X = scheme.to_field(x[i])
            Y = scheme.to_field(y[i])
            br = scheme.algebra.bracket(X, Y)
            bad[i] = tuple(scheme.to_field(got[i])) != tuple(b * cert.m for b in br)
    fails = int(bad.sum())
    return WordIdentityReport(samples, fails, cert.target, cert.m, cert.n, cert.digest(), fails == 0)


def n0_from_certificates(c: int) -> int:
    """Product n_1 n_2 ... n_c of the sum-word lengths."""
    return math.prod(freenilp.synthesize_sum_word(j).n for j in range(1, c + 1))


def log_image_delone(
    patch,
    n: int,
    n0: int,
    core,
    grid_step: float,
    factor_radius=None,
    cover_core=None,
    budget: int = 5 * 10**8,
) -> DeloneReport:
    """Euclidean Delone checks on the coordinates of the n-fold product set."""
    if n < n0:
        raise ValueError(f"n = {n} is below n0 = {n0}")
    prod = product_patch(patch, n, core, factor_radius=factor_radius, budget=budget)
    rep = delone_report(prod, core, grid_step, metric="euclidean", cover_core=cover_core)
    rep.extra.update({"n": n, "n0": n0, "points": prod.count, "partial_counts": prod.meta["partial_counts"]})
    return rep


# -- linearisation ----------------------------------------------------------------

@dataclass
class LinearizationResult:
    phi_tilde: np.ndarray
    phi_tilde_2R: np.ndarray
    residual_R: float
    residual_2R: float
    growth_ratio: float
    drift: float
    points_R: int
    points_2R: int
    passed: bool

    def as_dict(self) -> dict:
        d = asdict(self)
        d["phi_tilde"] = self.phi_tilde.tolist()
        d["phi_tilde_2R"] = self.phi_tilde_2R.tolist()
        return d


def hom_formula(patch, A, B) -> np.ndarray:
    """Principal embedding of A*x + B*sigma(x), coordinatewise."""
    P = patch.points()
    s = patch.scheme
    return float(Fraction(A)) * s.principal(P) + float(Fraction(B)) * s.star(P)


def linearize_hom(
    patch,
    hom_values: np.ndarray,
    R,
    drift_tol: float = DRIFT_TOLERANCE,
    growth_tol: float = GROWTH_TOLERANCE,
) -> LinearizationResult:
    """Least-squares linear fit on the radius-R subpatch, residuals at R and 2R.

    ``hom_values`` are the images of ``patch.points()`` (same order), which
    must cover radius 2R.
    """
    s = patch.scheme
    if any(w != 1 for w in s.weights):
        raise ValueError("linearisation needs an abelian patch")
    P = patch.points()
    X = s.principal(P)
    Y = np.asarray(hom_values, dtype=float).reshape(len(P), -1)
    R = float(R)
    inR = np.all(np.abs(X) <= R * (1 + 1e-12), axis=1)
    in2R = np.all(np.abs(X) <= 2 * R * (1 + 1e-12), axis=1)

    def fit(mask):
        if np.linalg.matrix_rank(X[mask]) < s.dim:
            raise RankDeficient("patch does not span")
        M, *_ = np.linalg.lstsq(X[mask], Y[mask], rcond=None)
        return M.T

    M1 = fit(inR)
    M2 = fit(in2R)
    res = np.abs(Y - X @ M1.T).max(axis=1)
    r1 = float(res[inR].max())
    r2 = float(res[in2R].max())
    # residuals at rounding level carry no signal
    floor = 1e-12 * max(1.0, float(np.abs(Y[in2R]).max()))
    ratio = 1.0 if r2 <= floor else (r2 / r1 if r1 > 0 else math.inf)
    drift = float(np.abs(M1 - M2).max())
    return LinearizationResult(
        M1, M2, r1, r2, ratio, drift, int(inR.sum()), int(in2R.sum()),
        drift <= drift_tol and ratio <= growth_tol,
    )


# -- counterexample -----------------------------------------------------------------

@dataclass
class CounterexampleReport:
    k: int
    n_max: int
    set_size: int
    min_nonzero_k_sum: Fraction
    k_sums_bounded: bool
    witnesses_found: int
    witnesses_expected: int
    min_nonzero_k1_sum: Fraction
    passed: bool

    def as_dict(self) -> dict:
        d = asdict(self)
        d["min_nonzero_k_sum"] = str(self.min_nonzero_k_sum)
        d["min_nonzero_k1_sum"] = str(self.min_nonzero_k1_sum)
        d["min_nonzero_k1_sum_float"] = float(self.min_nonzero_k1_sum)
        return d


def _sums(X: Sequence[Fraction], r: int) -> set:
    return {sum(c, Fraction(0)) for c in itertools.combinations_with_replacement(X, r)}


def counterexample_powers(k: int, n_max: int) -> CounterexampleReport:
    """X = Y u -Y u {0}, Y = {k^n + k^-n : 1 <= n <= n_max}: sums of k and k+1 elements."""
    if k < 2 or n_max < 3:
        raise ValueError("need k >= 2 and n_max >= 3")
    Y = [Fraction(k) ** n + Fraction(1, k**n) for n in range(1, n_max + 1)]
    X = sorted(set(Y + [-y for y in Y] + [Fraction(0)]))
    sk = _sums(X, k)
    nz = [abs(s) for s in sk if s != 0]
    mk = min(nz)
    sk1 = _sums(X, k + 1)
    expected = [Fraction(1, k ** (n + 1)) - Fraction(1, k ** (n - 1)) for n in range(1, n_max)]
    found = sum(1 for e in expected if e in sk1)
    mk1 = min(abs(s) for s in sk1 if s != 0)
    ok = mk >= k - 1 and found == len(expected)
    return CounterexampleReport(k, n_max, len(X), mk, mk >= k - 1, found, len(expected), mk1, ok)
