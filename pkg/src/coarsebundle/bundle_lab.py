"""Desk-scale models of fibered graphs: windowed total spaces, ball growth,
and drift seminorms of periodic gluing words.

A gluing assigns to every edge of a base graph a bijection-like map of the
integer fiber lattice; the total space connects lattice neighbors within a
fiber and connects (f, b) to (map(f), b') across base edges.  Finite windows
stand in for the infinite object, so every vertex whose model neighborhood
leaves the window carries a clipped marker, and growth counts are only
trusted at radii that stay clear of clipped vertices.
"""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .core_algebra import IntMatrix
from .errors import (NonBijectiveTabulated, SingularGenerator, SingularMatrix,
                     TooFewRadii, WindowTooLarge)

DEFAULT_VERTEX_CAP = 2_000_000
_R2_MARGIN = 0.02
_PERFECT_FIT = 0.999
_UNIT_CIRCLE_TOL = 1e-9


# ---------------------------------------------------------------------------
# gluing maps


@dataclass(frozen=True)
class Translation:
    """Fiberwise shift by an integer vector."""

    vector: tuple

    def apply(self, base_vertex, f: tuple) -> tuple:
        return tuple(x + t for x, t in zip(f, self.vector))

    def preimage(self, base_vertex, f: tuple) -> Optional[tuple]:
        return tuple(x - t for x, t in zip(f, self.vector))

    @property
    def dim(self) -> int:
        return len(self.vector)


@dataclass(frozen=True)
class Linear:
    """Fiberwise invertible integer-linear map."""

    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.determinant() == 0:
            raise SingularMatrix("linear gluing matrix must be invertible")

    def apply(self, base_vertex, f: tuple) -> tuple:
        rows = self.matrix.rows
        return tuple(sum(rows[i][j] * f[j] for j in range(len(f)))
                     for i in range(len(f)))

    def preimage(self, base_vertex, f: tuple) -> Optional[tuple]:
        inv = self.matrix.to_rat().inverse()
        vec = inv.apply([Fraction(x) for x in f])
        if any(x.denominator != 1 for x in vec):
            return None
        return tuple(int(x) for x in vec)

    @property
    def dim(self) -> int:
        return self.matrix.n


@dataclass(frozen=True)
class Affine:
    """Invertible integer-linear map followed by a shift."""

    matrix: IntMatrix
    vector: tuple

    def __post_init__(self):
        if self.matrix.determinant() == 0:
            raise SingularMatrix("affine gluing matrix must be invertible")

    def apply(self, base_vertex, f: tuple) -> tuple:
        rows = self.matrix.rows
        lin = tuple(sum(rows[i][j] * f[j] for j in range(len(f)))
                    for i in range(len(f)))
        return tuple(x + t for x, t in zip(lin, self.vector))

    def preimage(self, base_vertex, f: tuple) -> Optional[tuple]:
        shifted = [Fraction(x - t) for x, t in zip(f, self.vector)]
        inv = self.matrix.to_rat().inverse()
        vec = inv.apply(shifted)
        if any(x.denominator != 1 for x in vec):
            return None
        return tuple(int(x) for x in vec)

    @property
    def dim(self) -> int:
        return self.matrix.n


@dataclass(frozen=True)
class Tabulated:
    """Pointwise map of the rank-one fiber, possibly depending on the base
    vertex; injectivity is checked on the declared window at build time."""

    fn: Callable[[object, int], int]
    name: str = "tabulated"

    def apply(self, base_vertex, f: tuple) -> tuple:
        return (self.fn(base_vertex, f[0]),)

    def preimage(self, base_vertex, f: tuple) -> Optional[tuple]:
        return None  # resolved against the window image table at build time

    @property
    def dim(self) -> int:
        return 1


GluingMap = Union[Translation, Linear, Affine, Tabulated]


@dataclass(frozen=True)
class FiniteBase:
    """Explicit finite base graph with directed gluing edges."""

    vertices: tuple
    edges: tuple  # oriented pairs (u, v)


@dataclass(frozen=True)
class GluingSpec:
    """Base shape plus the fiber map carried by each base edge.

    base is "line" (vertices are integers, edges b to b+1), "grid"
    (vertices are integer pairs, edges step +1 in either coordinate), or a
    FiniteBase.  A single edge_map applies to every base edge; edge_maps
    overrides per oriented base edge.
    """

    base: Union[str, FiniteBase]
    fiber_dim: int
    edge_map: Optional[GluingMap] = None
    edge_maps: Optional[dict] = None

    def __post_init__(self):
        if isinstance(self.base, str) and self.base not in ("line", "grid"):
            raise ValueError("base must be 'line', 'grid', or a FiniteBase")
        if self.edge_map is None and not self.edge_maps:
            raise ValueError("a gluing map is required")
        for m in self._all_maps():
            if m.dim != self.fiber_dim:
                raise ValueError("gluing map dimension != fiber_dim")

    def _all_maps(self):
        if self.edge_map is not None:
            yield self.edge_map
        if self.edge_maps:
            yield from self.edge_maps.values()

    def map_for(self, base_edge) -> GluingMap:
        if self.edge_maps and base_edge in self.edge_maps:
            return self.edge_maps[base_edge]
        if self.edge_map is not None:
            return self.edge_map
        raise KeyError(f"no gluing map for base edge {base_edge!r}")


def phi_example_spec() -> GluingSpec:
    """Doubling-wedge gluing over the integer line.

    The fiber map at base height b doubles points with absolute value at
    most n and shifts the rest by n toward infinity, where n = |b| so the
    formula is total on negative heights as well: with n = |b|,
    phi(x) = 2x for |x| <= n, x + n for x > n, and x - n for x < -n.
    """
    def phi(b, x: int) -> int:
        n = abs(b)
        if abs(x) <= n:
            return 2 * x
        if x > n:
            return x + n
        return x - n

    return GluingSpec(base="line", fiber_dim=1,
                      edge_map=Tabulated(fn=phi, name="phi_example"))


# ---------------------------------------------------------------------------
# total space construction


@dataclass
class TotalSpaceBall:
    """Windowed model of the total space.

    Vertices are (fiber point, base vertex) pairs with the fiber point a
    tuple of integers.  clipped holds every vertex whose model neighborhood
    could not be fully realized inside the windows.
    """

    fiber_dim: int
    origin: tuple
    adjacency: dict
    clipped: frozenset
    fiber_edges: tuple
    gluing_edges: tuple

    @property
    def vertices(self) -> frozenset:
        return frozenset(self.adjacency)

    @property
    def size(self) -> int:
        return len(self.adjacency)

    def degree(self, v) -> int:
        return len(self.adjacency[v])


def _map_parts(gmap) -> tuple[np.ndarray, np.ndarray]:
    """Matrix and shift of a non-tabulated gluing map as int64 arrays."""
    if isinstance(gmap, Translation):
        d = gmap.dim
        return (np.eye(d, dtype=np.int64),
                np.array(gmap.vector, dtype=np.int64))
    if isinstance(gmap, Linear):
        return (np.array(gmap.matrix.rows, dtype=np.int64),
                np.zeros(gmap.dim, dtype=np.int64))
    return (np.array(gmap.matrix.rows, dtype=np.int64),
            np.array(gmap.vector, dtype=np.int64))


def _window_interval(window) -> tuple[int, int]:
    """Normalize a window given as half-width or as an explicit (lo, hi)."""
    if isinstance(window, int):
        if window < 0:
            raise ValueError("window half-width must be nonnegative")
        return -window, window
    lo, hi = window
    if lo > hi:
        raise ValueError("window interval is empty")
    return int(lo), int(hi)


def _base_graph(spec: GluingSpec, base_window):
    if spec.base == "line":
        lo, hi = _window_interval(base_window)
        vertices = list(range(lo, hi + 1))
        edges = [(b, b + 1) for b in range(lo, hi)]
        boundary = {lo, hi}
        return vertices, edges, boundary
    if spec.base == "grid":
        lo, hi = _window_interval(base_window)
        rng = range(lo, hi + 1)
        vertices = [(x, y) for x in rng for y in rng]
        edges = []
        for (x, y) in vertices:
            if x + 1 <= hi:
                edges.append(((x, y), (x + 1, y)))
            if y + 1 <= hi:
                edges.append(((x, y), (x, y + 1)))
        boundary = {(x, y) for (x, y) in vertices
                    if x in (lo, hi) or y in (lo, hi)}
        return vertices, edges, boundary
    return list(spec.base.vertices), list(spec.base.edges), set()


def _fiber_box(fiber_window, dim: int):
    lo, hi = _window_interval(fiber_window)
    rng = range(lo, hi + 1)
    if dim == 1:
        return [(x,) for x in rng]
    pts = [()]
    for _ in range(dim):
        pts = [p + (x,) for p in pts for x in rng]
    return pts


def build_total_space(spec: GluingSpec, base_window, fiber_window,
                      origin, cap: Optional[int] = None) -> TotalSpaceBall:
    """Materialize the windowed total space of a gluing spec.

    Windows are given as a half-width (symmetric about 0) or as an explicit
    (lo, hi) interval; an off-center base interval lets a ball be carved
    around a distant origin without materializing everything in between.

    Fiber edges join lattice neighbors over a fixed base vertex; gluing
    edges join (f, b) to (map(f), b') over each base edge.  A vertex is
    clipped when a fiber neighbor or a forward image leaves the windows,
    when the base neighborhood is truncated, or when a backward gluing
    partner cannot be ruled out inside the window.  Tabulated maps are
    checked for injectivity on the window (NonBijectiveTabulated) and the
    total vertex count is capped (WindowTooLarge).
    """
    if cap is None:
        cap = DEFAULT_VERTEX_CAP
    base_vertices, base_edges, base_boundary = _base_graph(spec, base_window)
    fiber_points = _fiber_box(fiber_window, spec.fiber_dim)
    total = len(base_vertices) * len(fiber_points)
    if total > cap:
        raise WindowTooLarge(cap)

    fiber_set = set(fiber_points)
    origin_f, origin_b = origin
    if isinstance(origin_f, int):
        origin_f = (origin_f,)
    origin = (tuple(origin_f), origin_b)

    adjacency: dict = {}
    for b in base_vertices:
        for f in fiber_points:
            adjacency[(f, b)] = []
    if origin not in adjacency:
        raise ValueError("origin lies outside the windows")

    clipped = set()
    fiber_edges = []
    gluing_edges = []

    unit = [tuple(1 if j == i else 0 for j in range(spec.fiber_dim))
            for i in range(spec.fiber_dim)]
    for b in base_vertices:
        if b in base_boundary:
            for f in fiber_points:
                clipped.add((f, b))
        for f in fiber_points:
            for e_i in unit:
                g = tuple(x + d for x, d in zip(f, e_i))
                if g in fiber_set:
                    adjacency[(f, b)].append((g, b))
                    adjacency[(g, b)].append((f, b))
                    fiber_edges.append(((f, b), (g, b)))
                else:
                    clipped.add((f, b))

    fiber_arr = np.array(fiber_points, dtype=np.int64)
    flo, fhi = _window_interval(fiber_window)
    for (b, b2) in base_edges:
        gmap = spec.map_for((b, b2))
        if not isinstance(gmap, Tabulated):
            mat, shift = _map_parts(gmap)
            imgs = fiber_arr @ mat.T + shift
            inside = np.all((imgs >= flo) & (imgs <= fhi), axis=1)
            for f, row, ok in zip(fiber_points, imgs.tolist(),
                                  inside.tolist()):
                if ok:
                    img = tuple(row)
                    adjacency[(f, b)].append((img, b2))
                    adjacency[(img, b2)].append((f, b))
                    gluing_edges.append(((f, b), (img, b2)))
                else:
                    clipped.add((f, b))
            # backward pass: window points at b2 whose integral preimage
            # exists but falls outside the window lack their gluing partner
            pre_f = np.linalg.solve(mat.astype(float),
                                    (fiber_arr - shift).T).T
            cand = np.rint(pre_f).astype(np.int64)
            exact = np.all(cand @ mat.T + shift == fiber_arr, axis=1)
            pre_inside = np.all((cand >= flo) & (cand <= fhi), axis=1)
            for f, good, pin in zip(fiber_points, exact.tolist(),
                                    pre_inside.tolist()):
                if good and not pin:
                    clipped.add((f, b2))
            continue
        image: dict = {}
        for f in fiber_points:
            img = gmap.apply(b, f)
            if img in image:
                raise NonBijectiveTabulated(
                    f"gluing over base edge {(b, b2)!r} sends both "
                    f"{image[img]!r} and {f!r} to {img!r}")
            image[img] = f
        lo = min(img[0] for img in image)
        hi = max(img[0] for img in image)
        for f in fiber_points:
            img = gmap.apply(b, f)
            if img in fiber_set:
                adjacency[(f, b)].append((img, b2))
                adjacency[(img, b2)].append((f, b))
                gluing_edges.append(((f, b), (img, b2)))
            else:
                clipped.add((f, b))
        for f in fiber_points:
            if f in image:
                continue  # covered by the forward pass
            if f[0] < lo or f[0] > hi:
                clipped.add((f, b2))

    return TotalSpaceBall(fiber_dim=spec.fiber_dim, origin=origin,
                          adjacency=adjacency, clipped=frozenset(clipped),
                          fiber_edges=tuple(fiber_edges),
                          gluing_edges=tuple(gluing_edges))


# ---------------------------------------------------------------------------
# growth


@dataclass(frozen=True)
class GrowthSeries:
    """Cumulative ball sizes |B(r)| with per-radius validity flags."""

    counts: tuple
    flags: tuple

    def __iter__(self):
        return iter((self.counts, self.flags))

    def valid_radii(self) -> list[int]:
        return [r for r, ok in enumerate(self.flags) if ok]


def ball_growth(ball: TotalSpaceBall, rmax: int) -> GrowthSeries:
    """BFS ball sizes from the origin for r = 0..rmax.

    A radius is valid only when it is strictly smaller than the distance to
    every clipped vertex, so no missing neighbor or out-of-window shortcut
    can affect the count.  The origin must be interior.
    """
    if ball.origin in ball.clipped:
        raise ValueError("origin is clipped; enlarge the windows")
    dist = {ball.origin: 0}
    queue = deque([ball.origin])
    sphere_counts = [0] * (rmax + 1)
    sphere_counts[0] = 1
    min_clip = math.inf
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du >= rmax:
            continue
        for w in ball.adjacency[u]:
            if w not in dist:
                d = du + 1
                dist[w] = d
                sphere_counts[d] += 1
                if w in ball.clipped and d < min_clip:
                    min_clip = d
                queue.append(w)
    counts = []
    acc = 0
    for r in range(rmax + 1):
        acc += sphere_counts[r]
        counts.append(acc)
    flags = tuple(r < min_clip for r in range(rmax + 1))
    return GrowthSeries(counts=tuple(counts), flags=flags)


@dataclass(frozen=True)
class GrowthClass:
    kind: str  # Polynomial | Exponential | Undetermined
    parameter: Optional[float]
    r2_poly: float
    r2_exp: float


def _fit_r2(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-18 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return float(slope), r2


def growth_class(seq: Sequence[int], flags: Sequence[bool]) -> GrowthClass:
    """Least-squares classification of a ball-size sequence.

    Fits log|B| against log r (polynomial: slope is the degree) and against
    r (exponential: slope is the rate) over the valid radii r >= 1.  The
    better fit wins when its R-squared leads by at least 0.02; when both
    fits are essentially perfect the polynomial reading wins (flat and
    low-degree data satisfies both models); otherwise Undetermined.
    """
    radii = [r for r in range(1, len(seq))
             if r < len(flags) and flags[r] and seq[r] > 0]
    if len(radii) < 8:
        raise TooFewRadii(
            f"need at least 8 valid radii, have {len(radii)}")
    xs = np.array(radii, dtype=float)
    ys = np.log(np.array([seq[r] for r in radii], dtype=float))
    deg, r2_poly = _fit_r2(np.log(xs), ys)
    rate, r2_exp = _fit_r2(xs, ys)
    if r2_poly >= _PERFECT_FIT and r2_exp >= _PERFECT_FIT:
        return GrowthClass(kind="Polynomial", parameter=deg,
                           r2_poly=r2_poly, r2_exp=r2_exp)
    if r2_exp - r2_poly >= _R2_MARGIN:
        return GrowthClass(kind="Exponential", parameter=rate,
                           r2_poly=r2_poly, r2_exp=r2_exp)
    if r2_poly - r2_exp >= _R2_MARGIN:
        return GrowthClass(kind="Polynomial", parameter=deg,
                           r2_poly=r2_poly, r2_exp=r2_exp)
    return GrowthClass(kind="Undetermined", parameter=None,
                       r2_poly=r2_poly, r2_exp=r2_exp)


# ---------------------------------------------------------------------------
# drift seminorms of periodic words


def _as_float_matrix(m) -> np.ndarray:
    if isinstance(m, IntMatrix):
        return np.array([[float(x) for x in row] for row in m.rows])
    if hasattr(m, "to_float"):
        return np.array(m.to_float())
    return np.array(m, dtype=float)


def _word_matrices(word: Sequence) -> list[np.ndarray]:
    mats = []
    for g in word:
        arr = _as_float_matrix(g)
        if abs(float(np.linalg.det(arr))) < 1e-12:
            raise SingularGenerator("gluing word contains a singular matrix")
        mats.append(arr)
    return mats


@dataclass(frozen=True)
class DriftEstimate:
    """Monotone truncation lower bounds for the drift seminorm of a vector
    along the periodic gluing path of a word, plus the diagonalizable
    closed form when available."""

    estimates: tuple
    closed_form: Optional[float]
    diagonalizable: bool
    period: int

    @property
    def value(self) -> float:
        return self.estimates[-1] if self.estimates else 0.0


def drift_seminorm(word: Sequence, u: Sequence, truncation: int = 64
                   ) -> DriftEstimate:
    """Drift seminorm N(u) of a vector along the periodic path of a word.

    A sequence u_i shadowing the orbit (u_0 = u, each step applying the next
    word letter) must either stay bounded or pay a per-step correction; N(u)
    is the least uniform correction.  For each horizon m <= truncation the
    exact inequality

        C >= (|T_m u| - |u|) / (1 + |S_1| + ... + |S_{m-1}|)

    over partial products S_j of the word gives a lower bound independent
    of the shadowing radius in the limit; the reported sequence of running
    maxima is nondecreasing and converges to (|lam| - 1)|P u| when a single
    expanding eigenvalue dominates a diagonalizable word.  The closed form
    is the eigen-split value: per-step rates |lam|^(1/period), zero iff u
    lies in the closed non-expanding spectral subspace, else the Euclidean
    size of the rate-weighted expanding components.  Exact for words with
    an orthogonal eigenbasis; otherwise computed in eigencoordinates.
    """
    if not word:
        raise ValueError("word must be nonempty")
    mats = _word_matrices(word)
    period = len(mats)
    n = mats[0].shape[0]
    uvec = np.array([float(x) for x in u], dtype=float)
    if uvec.shape[0] != n:
        raise ValueError("vector length does not match the word rank")
    unorm = float(np.linalg.norm(uvec))

    estimates = []
    best = 0.0
    vec = uvec.copy()
    for m in range(1, truncation + 1):
        vec = mats[(m - 1) % period] @ vec
        fm_u = float(np.linalg.norm(vec))
        part = np.eye(n)
        denom = 0.0
        for i in range(m, 0, -1):
            denom += float(np.linalg.norm(part, ord=2))
            part = part @ mats[(i - 1) % period]
        cand = (fm_u - unorm) / denom
        if cand > best:
            best = cand
        estimates.append(best)

    closed_form = None
    diagonalizable = False
    w_period = _full_period(mats)
    evals, evecs = np.linalg.eig(w_period)
    if np.linalg.cond(evecs) < 1e8:
        diagonalizable = True
        coords = np.linalg.solve(evecs, uvec.astype(complex))
        scale = max(1.0, float(np.linalg.norm(coords)))
        total = 0.0
        for lam, z in zip(evals, coords):
            rate = abs(lam) ** (1.0 / period)
            if rate > 1.0 + _UNIT_CIRCLE_TOL and abs(z) > 1e-12 * scale:
                total += ((rate - 1.0) * abs(z)) ** 2
        closed_form = math.sqrt(total)

    return DriftEstimate(estimates=tuple(estimates), closed_form=closed_form,
                         diagonalizable=diagonalizable, period=period)


def _full_period(mats: list[np.ndarray]) -> np.ndarray:
    out = np.eye(mats[0].shape[0])
    for m in mats:
        out = m @ out
    return out


@dataclass(frozen=True)
class KernelReport:
    """Orthonormal basis of the drift-seminorm kernel."""

    basis: tuple
    dimension: int


def foliation_kernel(word: Sequence) -> KernelReport:
    """Directions with zero drift along the periodic path of a word.

    The kernel is the non-expanding spectral subspace of the period
    product: generalized eigenspaces of eigenvalues inside the unit circle,
    plus genuine eigenvectors on the unit circle.  Generalized unit-circle
    directions of nontrivial Jordan blocks grow polynomially and are
    excluded.  Returned as a real orthonormal basis.
    """
    mats = _word_matrices(word)
    w = _full_period(mats)
    n = w.shape[0]
    evals = np.linalg.eigvals(w)

    columns = []
    used = [False] * len(evals)
    for i, lam in enumerate(evals):
        if used[i]:
            continue
        cluster = [j for j, mu in enumerate(evals)
                   if not used[j] and abs(mu - lam) < 1e-7]
        for j in cluster:
            used[j] = True
        mult = len(cluster)
        r = abs(lam)
        if r > 1.0 + _UNIT_CIRCLE_TOL:
            continue
        shifted = w - lam * np.eye(n)
        if r < 1.0 - _UNIT_CIRCLE_TOL:
            target = np.linalg.matrix_power(shifted, mult)
        else:
            target = shifted
        _, s, vh = np.linalg.svd(target)
        tol = max(s[0], 1.0) * 1e-9 if s.size else 1e-9
        null_dim = int(np.sum(s < tol)) + (n - len(s))
        for kdx in range(null_dim):
            columns.append(vh[len(s) - 1 - kdx])

    if not columns:
        return KernelReport(basis=(), dimension=0)
    stack = np.vstack([np.real(c) for c in columns]
                      + [np.imag(c) for c in columns])
    _, s, vh = np.linalg.svd(stack)
    tol = max(s[0], 1.0) * 1e-9
    rank = int(np.sum(s > tol))
    basis = tuple(tuple(float(x) for x in vh[i]) for i in range(rank))
    return KernelReport(basis=basis, dimension=rank)
