"""Exact rational polytopes: hull, volume, coordinate projections and sections.

Bodies are V-represented with :class:`~fractions.Fraction` coordinates. All
combinatorics run on integer-scaled copies so every predicate is an exact sign
test; only the parallel-section search and Monte Carlo oracles use floats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from ._hull import integer_hull
from .covers import IndexSet, as_index_set
from .errors import GenerationFailed
from .rational import format_fraction, parse_vector, scale_to_int, to_fraction

Vector = tuple[Fraction, ...]
MAX_DIM = 6


class RationalPolytope:
    """Convex hull of finitely many rational points, reduced to its vertices.

    Use :func:`hull` to build one. ``facets`` holds ``(normal, offset)`` pairs
    with ``normal . x <= offset`` and is only populated for full-dimensional
    bodies; ``simplices`` index into ``vertices`` and triangulate the body.
    """

    def __init__(self, dim: int, points: Iterable[Sequence]):
        pts = list(dict.fromkeys(parse_vector(p) for p in points))
        for p in pts:
            if len(p) != dim:
                raise ValueError(f"point {p} does not have dimension {dim}")
        self.dim = dim
        if not pts:
            self.vertices: tuple[Vector, ...] = ()
            self.affine_dim = -1
            self.facets: tuple[tuple[Vector, Fraction], ...] = ()
            self.simplices: tuple[tuple[int, ...], ...] = ()
            self._edges: tuple[tuple[int, int], ...] = ()
            self.volume = Fraction(0)
            return
        if dim == 0:
            self.vertices = (pts[0],)
            self.affine_dim = 0
            self.facets = ()
            self.simplices = ((0,),)
            self._edges = ()
            self.volume = Fraction(1)
            return
        ints, den = scale_to_int(pts)
        data = integer_hull(ints)
        ids = data.vertex_ids
        pos = {v: i for i, v in enumerate(ids)}
        self.vertices = tuple(pts[v] for v in ids)
        self.affine_dim = data.affine_dim
        self._edges = tuple((pos[u], pos[w]) for u, w in data.edges)
        if data.affine_dim == dim:
            self.facets = tuple(
                (tuple(Fraction(x) for x in n), Fraction(off, den)) for n, off in data.planes
            )
            self.simplices = tuple(tuple(pos[v] for v in s) for s in data.simplices)
            self.volume = Fraction(data.volume_numerator, math.factorial(dim) * den**dim)
        else:
            self.facets = ()
            self.simplices = ()
            self.volume = Fraction(0)

    @classmethod
    def empty(cls, dim: int) -> "RationalPolytope":
        return cls(dim, [])

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def full_dimensional(self) -> bool:
        return self.affine_dim == self.dim

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    def vertex_set(self) -> frozenset[Vector]:
        return frozenset(self.vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalPolytope):
            return NotImplemented
        return self.dim == other.dim and self.vertex_set() == other.vertex_set()

    def __hash__(self) -> int:
        return hash((self.dim, self.vertex_set()))

    def __repr__(self) -> str:
        return (f"RationalPolytope(dim={self.dim}, vertices={len(self.vertices)}, "
                f"affine_dim={self.affine_dim}, volume={self.volume})")

    def centroid(self) -> Vector:
        k = len(self.vertices)
        return tuple(sum(c) / k for c in zip(*self.vertices))

    def contains(self, x: Sequence) -> bool:
        x = parse_vector(x)
        if self.is_empty:
            return False
        if self.full_dimensional:
            return all(sum(a * b for a, b in zip(n, x)) <= off for n, off in self.facets)
        widened = RationalPolytope(self.dim, list(self.vertices) + [x])
        return widened.affine_dim == self.affine_dim and widened.vertex_set() == self.vertex_set()

    def contains_origin_interior(self) -> bool:
        return self.full_dimensional and all(off > 0 for _, off in self.facets)

    def is_centrally_symmetric(self) -> bool:
        vs = self.vertex_set()
        return all(tuple(-c for c in v) in vs for v in vs)

    def is_unconditional(self) -> bool:
        vs = self.vertex_set()
        for v in vs:
            for i in range(self.dim):
                if tuple(-c if j == i else c for j, c in enumerate(v)) not in vs:
                    return False
        return True

    def bounding_box(self) -> tuple[Vector, Vector]:
        cols = list(zip(*self.vertices))
        return tuple(min(c) for c in cols), tuple(max(c) for c in cols)

    @cached_property
    def halfspaces_float(self) -> tuple[np.ndarray, np.ndarray]:
        A = np.array([[float(a) for a in n] for n, _ in self.facets], dtype=float)
        b = np.array([float(off) for _, off in self.facets], dtype=float)
        return A.reshape(len(self.facets), self.dim), b

    def to_json(self) -> dict:
        return {"dim": self.dim, "vertices": [[format_fraction(c) for c in v] for v in self.vertices]}

    @classmethod
    def from_json(cls, obj: dict) -> "RationalPolytope":
        return cls(int(obj["dim"]), obj["vertices"])


@dataclass(frozen=True)
class CoordinateFlat:
    """The affine flat fixing coordinates in ``fixed`` to ``anchor`` (sorted order)."""

    fixed: IndexSet
    anchor: Vector

    def __post_init__(self):
        if len(self.anchor) != len(self.fixed):
            raise ValueError("anchor needs one value per fixed coordinate")
        object.__setattr__(self, "anchor", parse_vector(self.anchor))

    @classmethod
    def through_origin(cls, fixed: IndexSet) -> "CoordinateFlat":
        return cls(fixed, tuple(Fraction(0) for _ in fixed))


def hull(points: Iterable[Sequence], dim: int | None = None) -> RationalPolytope:
    points = [parse_vector(p) for p in points]
    if dim is None:
        if not points:
            raise ValueError("need at least one point or an explicit dimension")
        dim = len(points[0])
    return RationalPolytope(dim, points)


def volume(P: RationalPolytope) -> Fraction:
    """Ambient-dimensional volume (zero for lower-dimensional bodies)."""
    return P.volume


def _sigma_coords(P: RationalPolytope, sigma) -> list[int]:
    return as_index_set(sigma, P.dim).zero_based()


def project(P: RationalPolytope, sigma) -> RationalPolytope:
    keep = _sigma_coords(P, sigma)
    if not keep:
        raise ValueError("projection needs a nonempty coordinate set")
    return RationalPolytope(len(keep), [tuple(v[c] for c in keep) for v in P.vertices])


def _slice_once(Q: RationalPolytope, idx: int, value: Fraction) -> RationalPolytope:
    """Section by ``x[idx] = value``, dropping that coordinate."""
    keep = [c for c in range(Q.dim) if c != idx]
    out = []
    verts = Q.vertices
    sides = [v[idx] - value for v in verts]
    for v, sd in zip(verts, sides):
        if sd == 0:
            out.append(tuple(v[c] for c in keep))
    for u, w in Q.edges:
        su, sw = sides[u], sides[w]
        if su * sw < 0:
            t = su / (su - sw)
            pu, pw = verts[u], verts[w]
            out.append(tuple(pu[c] + t * (pw[c] - pu[c]) for c in keep))
    return RationalPolytope(Q.dim - 1, out)


def section(P: RationalPolytope, flat: CoordinateFlat) -> RationalPolytope:
    """``P`` intersected with the flat, expressed in the free coordinates."""
    fixed = as_index_set(flat.fixed, P.dim).zero_based()
    Q = P
    remaining = list(range(P.dim))
    for c, a in zip(fixed, flat.anchor):
        if Q.is_empty:
            break
        i = remaining.index(c)
        Q = _slice_once(Q, i, a)
        remaining.pop(i)
    if Q.is_empty:
        return RationalPolytope.empty(P.dim - len(fixed))
    return Q


def section_at(P: RationalPolytope, sigma, anchor: Sequence) -> RationalPolytope:
    return section(P, CoordinateFlat(as_index_set(sigma, P.dim), parse_vector(anchor)))


def central_section(P: RationalPolytope, fixed) -> RationalPolytope:
    """Section through the origin fixing the coordinates in ``fixed`` to zero."""
    fixed = as_index_set(fixed, P.dim)
    if len(fixed) == 0:
        return P
    return section(P, CoordinateFlat.through_origin(fixed))


def section_volume(P: RationalPolytope, fixed, anchor=None) -> Fraction:
    """Volume in the free coordinates; a full fiber (nothing free) counts as 1 if hit."""
    fixed = as_index_set(fixed, P.dim)
    if anchor is None:
        anchor = [0] * len(fixed)
    if len(fixed) == P.dim:
        return Fraction(1) if P.contains(anchor) else Fraction(0)
    return section(P, CoordinateFlat(fixed, parse_vector(anchor))).volume


def embed(Q: RationalPolytope, free, n: int, fixed_values: dict[int, Fraction] | None = None) -> RationalPolytope:
    """Place ``Q`` (living on the ``free`` coordinates) back into R^n."""
    free = as_index_set(free, n).zero_based()
    fixed_values = fixed_values or {}
    pts = []
    for v in Q.vertices:
        x = [Fraction(fixed_values.get(c + 1, 0)) for c in range(n)]
        for c, val in zip(free, v):
            x[c] = val
        pts.append(tuple(x))
    return RationalPolytope(n, pts)


def product(P: RationalPolytope, Q: RationalPolytope) -> RationalPolytope:
    return RationalPolytope(P.dim + Q.dim, [u + v for u in P.vertices for v in Q.vertices])


def product_on(P: RationalPolytope, Q: RationalPolytope, sigma, n: int) -> RationalPolytope:
    """``P`` on the sigma coordinates times ``Q`` on the remaining ones."""
    sigma = as_index_set(sigma, n)
    on, off = sigma.zero_based(), sigma.complement().zero_based()
    pts = []
    for u in P.vertices:
        for v in Q.vertices:
            x = [Fraction(0)] * n
            for c, val in zip(on, u):
                x[c] = val
            for c, val in zip(off, v):
                x[c] = val
            pts.append(tuple(x))
    return RationalPolytope(n, pts)


def scale_axes(P: RationalPolytope, factors: Sequence) -> RationalPolytope:
    f = parse_vector(factors)
    return RationalPolytope(P.dim, [tuple(a * c for a, c in zip(v, f)) for v in P.vertices])


def translate(P: RationalPolytope, shift: Sequence) -> RationalPolytope:
    t = parse_vector(shift)
    return RationalPolytope(P.dim, [tuple(a + c for a, c in zip(v, t)) for v in P.vertices])


def permute_axes(P: RationalPolytope, perm: Sequence[int]) -> RationalPolytope:
    """New coordinate i is old coordinate ``perm[i]`` (0-based)."""
    return RationalPolytope(P.dim, [tuple(v[p] for p in perm) for v in P.vertices])


# ---------------------------------------------------------------------------
# witness bodies


def cube(n: int, lo=-1, hi=1) -> RationalPolytope:
    lo, hi = to_fraction(lo), to_fraction(hi)
    return RationalPolytope(n, list(itertools.product((lo, hi), repeat=n)))


def cross_polytope(n: int, radius=1) -> RationalPolytope:
    r = to_fraction(radius)
    pts = []
    for i in range(n):
        for sgn in (r, -r):
            pts.append(tuple(sgn if j == i else Fraction(0) for j in range(n)))
    return RationalPolytope(n, pts)


def simplex(n: int) -> RationalPolytope:
    pts = [tuple(Fraction(0) for _ in range(n))]
    for i in range(n):
        pts.append(tuple(Fraction(int(j == i)) for j in range(n)))
    return RationalPolytope(n, pts)


def hanner(n: int, sigma) -> RationalPolytope:
    """Cross-polytope on the sigma coordinates times the unit cube on the rest."""
    sigma = as_index_set(sigma, n)
    rest = sigma.complement()
    if len(sigma) == 0:
        return cube(n)
    if len(rest) == 0:
        return cross_polytope(n)
    return product_on(cross_polytope(len(sigma)), cube(len(rest)), sigma, n)


def conv_of_blocks(blocks: Sequence[tuple[RationalPolytope, Sequence | None]], coords: Sequence | None = None) -> RationalPolytope:
    """Hull of the sets ``{x_1} x ... x K_j x ... x {x_m}``.

    ``coords`` optionally assigns each block a set of (1-based) coordinates of
    the total space instead of consecutive slots.
    """
    dims = [K.dim for K, _ in blocks]
    if any(d < 1 for d in dims):
        raise ValueError("every block needs dimension at least 1")
    N = sum(dims)
    anchors = []
    for K, x in blocks:
        anchors.append(tuple(Fraction(0) for _ in range(K.dim)) if x is None else parse_vector(x))
    if coords is None:
        slots, start = [], 0
        for d in dims:
            slots.append(list(range(start, start + d)))
            start += d
    else:
        slots = [as_index_set(c, N).zero_based() for c in coords]
        if sorted(c for s in slots for c in s) != list(range(N)) or any(len(s) != d for s, d in zip(slots, dims)):
            raise ValueError("block coordinates must partition the total space")
    pts = []
    for j, (K, _) in enumerate(blocks):
        for v in K.vertices:
            x = [Fraction(0)] * N
            for i, a in enumerate(anchors):
                vals = v if i == j else a
                for c, val in zip(slots[i], vals):
                    x[c] = val
            pts.append(tuple(x))
    return RationalPolytope(N, pts)


def _random_body(d: int, kind: str, rng: np.random.Generator, denom: int = 12, retries: int = 200) -> RationalPolytope:
    if kind == "general":
        for _ in range(retries):
            raw = rng.integers(-denom, denom + 1, size=(2 * d + 4, d))
            P = RationalPolytope(d, [tuple(Fraction(int(x), denom) for x in row) for row in raw])
            if P.contains_origin_interior():
                return P
        raise GenerationFailed(f"no general body with 0 in the interior after {retries} tries")
    if kind == "unconditional":
        k = int(rng.integers(1, 4))
        raw = rng.integers(1, denom + 1, size=(k, d))
        pts = []
        for row in raw:
            base = [Fraction(int(x), denom) for x in row]
            for signs in itertools.product((1, -1), repeat=d):
                pts.append(tuple(s * x for s, x in zip(signs, base)))
        return RationalPolytope(d, pts)
    raise ValueError(f"unknown body kind {kind!r}")


def random_polytope(n: int, kind: str, seed, sigma=None, factor_kind: str = "general") -> RationalPolytope:
    """Seeded random body of kind ``general``, ``unconditional`` or ``product``.

    ``product`` needs ``sigma``: a random body on the sigma coordinates times
    one on the complement, each of ``factor_kind``.
    """
    if not 2 <= n <= MAX_DIM:
        raise ValueError(f"dimension {n} outside 2..{MAX_DIM}")
    rng = np.random.default_rng(seed)
    if kind == "product":
        if sigma is None:
            raise ValueError("product bodies need sigma")
        sigma = as_index_set(sigma, n)
        if not 0 < len(sigma) < n:
            raise ValueError("product bodies need a nonempty proper sigma")
        C = _random_body(len(sigma), factor_kind, rng)
        W = _random_body(n - len(sigma), factor_kind, rng)
        return product_on(C, W, sigma, n)
    return _random_body(n, kind, rng)


def mc_volume(P: RationalPolytope, samples: int, seed) -> tuple[float, float]:
    """Hit-or-miss volume estimate in the bounding box, with its standard error."""
    if not P.full_dimensional:
        return 0.0, 0.0
    lo, hi = (np.array([float(c) for c in v]) for v in P.bounding_box())
    box = float(np.prod(hi - lo))
    A, b = P.halfspaces_float
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    chunk = 200_000
    while done < samples:
        k = min(chunk, samples - done)
        x = lo + (hi - lo) * rng.random((k, P.dim))
        hits += int(np.count_nonzero(np.all(x @ A.T <= b + 1e-12, axis=1)))
        done += k
    p = hits / samples
    return box * p, box * math.sqrt(p * (1 - p) / samples)


# ---------------------------------------------------------------------------
# parallel sections


def _float_polytope_volume(A: np.ndarray, b: np.ndarray) -> float:
    """Volume of ``{y : A y <= b}`` (bounded) in floating point."""
    k = A.shape[1]
    if k == 1:
        a = A[:, 0]
        lo, hi = -np.inf, np.inf
        for ai, bi in zip(a, b):
            if ai > 1e-15:
                hi = min(hi, bi / ai)
            elif ai < -1e-15:
                lo = max(lo, bi / ai)
            elif bi < -1e-12:
                return 0.0
        return max(0.0, hi - lo)
    norms = np.linalg.norm(A, axis=1)
    res = linprog(
        np.r_[np.zeros(k), -1.0],
        A_ub=np.c_[A, norms],
        b_ub=b,
        bounds=[(None, None)] * k + [(0, None)],
        method="highs",
    )
    if res.status != 0 or res.x[-1] < 1e-10:
        return 0.0
    centre = res.x[:k]
    try:
        hs = HalfspaceIntersection(np.c_[A, -b], centre)
        return float(ConvexHull(hs.intersections).volume)
    except QhullError:
        return 0.0


def float_section_volume(P: RationalPolytope, sigma, anchor: Sequence[float]) -> float:
    fixed = _sigma_coords(P, sigma)
    free = [c for c in range(P.dim) if c not in fixed]
    A, b = P.halfspaces_float
    rhs = b - A[:, fixed] @ np.asarray(anchor, dtype=float)
    return _float_polytope_volume(A[:, free], rhs)


@dataclass(frozen=True)
class MaxSection:
    anchor: Vector
    value: Fraction
    exact: bool
    method: str


def is_product_split(P: RationalPolytope, sigma) -> bool:
    """True when the vertex set is the product of the two coordinate projections."""
    sigma = as_index_set(sigma, P.dim)
    on, off = sigma.zero_based(), sigma.complement().zero_based()
    A = {tuple(v[c] for c in on) for v in P.vertices}
    B = {tuple(v[c] for c in off) for v in P.vertices}
    if len(A) * len(B) != len(P.vertices):
        return False
    vs = P.vertex_set()
    for a in A:
        for bb in B:
            x = [None] * P.dim
            for c, val in zip(on, a):
                x[c] = val
            for c, val in zip(off, bb):
                x[c] = val
            if tuple(x) not in vs:
                return False
    return True


def max_parallel_section(P: RationalPolytope, sigma, effort: int = 1) -> MaxSection:
    """Maximize ``x -> vol(P cap (x + H_sigma^perp))`` over anchors ``x``.

    Exact for product splits (all fibers congruent) and centrally symmetric
    bodies (argmax at the origin). Otherwise a multi-start Nelder-Mead search
    on the concave root of the fiber volume; the reported value is the exact
    fiber volume at the best rationalized anchor, hence a lower bound.
    """
    sigma = as_index_set(sigma, P.dim)
    k_sig = len(sigma)
    if not 0 < k_sig < P.dim:
        raise ValueError("max_parallel_section needs 0 < |sigma| < n")
    if not P.full_dimensional:
        raise ValueError("max_parallel_section needs a full-dimensional body")
    free_dim = P.dim - k_sig
    if is_product_split(P, sigma):
        anchor = project(P, sigma).centroid()
        return MaxSection(anchor, section_volume(P, sigma, anchor), True, "product")
    if P.is_centrally_symmetric():
        anchor = tuple(Fraction(0) for _ in range(k_sig))
        return MaxSection(anchor, section_volume(P, sigma, anchor), True, "symmetric")

    proj = project(P, sigma)
    verts = np.array([[float(c) for c in v] for v in proj.vertices])
    centre = verts.mean(axis=0)

    def neg_root(x):
        v = float_section_volume(P, sigma, x)
        return -(v ** (1.0 / free_dim)) if v > 0 else 0.0

    starts = [centre] + [0.5 * (centre + v) for v in verts]
    rng = np.random.default_rng(len(verts))
    for _ in range(4 * effort):
        w = rng.dirichlet(np.ones(len(verts)))
        starts.append(w @ verts)
    scored = sorted(starts, key=neg_root)[: 2 + effort]
    best_x, best_f = scored[0], neg_root(scored[0])
    scale = float(np.max(verts.max(axis=0) - verts.min(axis=0)))
    for x0 in scored:
        res = minimize(
            neg_root,
            x0,
            method="Nelder-Mead",
            options={
                "xatol": 1e-10 * scale,
                "fatol": 1e-13,
                "maxiter": 400 * effort * k_sig,
                "initial_simplex": np.vstack([x0] + [x0 + 0.05 * scale * e for e in np.eye(k_sig)]),
            },
        )
        if res.fun < best_f:
            best_x, best_f = res.x, res.fun
    # exact fiber volumes at the rationalized optimum and at exact candidates;
    # the latter catch optima sitting on the boundary of the projection
    candidates = [tuple(Fraction(float(c)).limit_denominator(10**7) for c in best_x)]
    candidates.append(proj.centroid())
    candidates.extend(proj.vertices)
    best = max(((section_volume(P, sigma, a), a) for a in candidates), key=lambda t: t[0])
    return MaxSection(best[1], best[0], False, "search")
