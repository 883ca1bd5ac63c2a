"""Exact incremental convex hull over integer coordinates.

Beneath-beyond insertion with strict visibility, so every predicate is an
integer sign test. Lower-dimensional inputs are handled by hulling inside a
coordinate projection that is injective on the affine hull.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .rational import det_int, dot, normal_through, primitive, rank_int

Point = tuple[int, ...]


@dataclass
class HullData:
    affine_dim: int
    vertex_ids: list[int]
    # distinct facet hyperplanes n.x <= b in the (possibly projected) hull space
    planes: list[tuple[Point, int]] = field(default_factory=list)
    simplices: list[tuple[int, ...]] = field(default_factory=list)
    volume_numerator: int = 0
    coords: tuple[int, ...] = ()
    edges: list[tuple[int, int]] = field(default_factory=list)


def _affine_basis(pts: Sequence[Point]) -> list[int]:
    """Greedy indices of an affinely independent subset spanning the affine hull."""
    p0 = pts[0]
    basis = [0]
    echelon: list[tuple[int, list[int]]] = []  # (pivot column, row)
    for i in range(1, len(pts)):
        v = [a - b for a, b in zip(pts[i], p0)]
        for pc, row in echelon:
            if v[pc]:
                f, g = v[pc], row[pc]
                v = [x * g - y * f for x, y in zip(v, row)]
        piv = next((c for c, x in enumerate(v) if x), None)
        if piv is not None:
            echelon.append((piv, v))
            basis.append(i)
            if len(basis) == len(p0) + 1:
                break
    return basis


def _injective_coords(pts: Sequence[Point], basis: list[int]) -> tuple[int, ...]:
    d = len(pts[0])
    p0 = pts[basis[0]]
    diffs = [[a - b for a, b in zip(pts[i], p0)] for i in basis[1:]]
    chosen: list[int] = []
    for c in range(d):
        trial = chosen + [c]
        cols = [[row[j] for j in trial] for row in diffs]
        # column rank == number of chosen columns
        if rank_int([list(col) for col in zip(*cols)]) == len(trial):
            chosen = trial
            if len(chosen) == len(diffs):
                break
    return tuple(chosen)


def _incremental(pts: Sequence[Point], basis: list[int], order: Sequence[int]):
    k = len(pts[0])
    centre = [sum(pts[b][c] for b in basis) for c in range(k)]
    kp1 = k + 1

    def make(verts):
        n = normal_through([pts[v] for v in verts])
        off = dot(n, pts[verts[0]])
        if dot(n, centre) > kp1 * off:
            n = tuple(-x for x in n)
            off = -off
        return (tuple(sorted(verts)), n, off)

    facets = {}
    fid = 0
    for omit in basis:
        facets[fid] = make([b for b in basis if b != omit])
        fid += 1
    in_basis = set(basis)
    for p in order:
        if p in in_basis:
            continue
        pp = pts[p]
        visible = [i for i, (_, n, off) in facets.items() if dot(n, pp) > off]
        if not visible:
            continue
        ridges: Counter = Counter()
        for i in visible:
            verts = facets[i][0]
            for j in range(k):
                ridges[verts[:j] + verts[j + 1:]] += 1
        for i in visible:
            del facets[i]
        for ridge, cnt in ridges.items():
            if cnt == 1:
                facets[fid] = make(list(ridge) + [p])
                fid += 1
    return list(facets.values())


def _full_hull(pts: Sequence[Point], candidates: list[int], basis: list[int]):
    """Hull of full-dimensional integer points; returns (vertices, planes, facets)."""
    k = len(pts[0])
    facets = _incremental(pts, basis, candidates)
    planes: dict[tuple, int] = {}
    for _, n, off in facets:
        g = 0
        for x in n:
            g = math.gcd(g, x)
        key = (primitive(n), off // g if g else off)
        planes.setdefault(key, len(planes))
    plane_list = list(planes)
    used = sorted({v for verts, _, _ in facets for v in verts})
    extreme = []
    for v in used:
        normals = [n for (n, off) in plane_list if dot(n, pts[v]) == off]
        if len(normals) >= k and rank_int(normals) == k:
            extreme.append(v)
    return extreme, plane_list, facets


def integer_hull(pts: Sequence[Point]) -> HullData:
    """Hull of distinct integer points. Indices in the result refer to ``pts``."""
    if not pts:
        return HullData(affine_dim=-1, vertex_ids=[])
    d = len(pts[0])
    basis = _affine_basis(pts)
    k = len(basis) - 1
    if k == 0:
        return HullData(affine_dim=0, vertex_ids=[0])
    coords = tuple(range(d)) if k == d else _injective_coords(pts, basis)
    proj = [tuple(p[c] for c in coords) for p in pts]
    if k == 1:
        lo = min(range(len(proj)), key=lambda i: proj[i][0])
        hi = max(range(len(proj)), key=lambda i: proj[i][0])
        planes = [((1,), proj[hi][0]), ((-1,), -proj[lo][0])]
        return HullData(
            affine_dim=1,
            vertex_ids=[lo, hi],
            planes=planes,
            simplices=[(lo, hi)],
            volume_numerator=proj[hi][0] - proj[lo][0],
            coords=coords,
            edges=[(lo, hi)],
        )
    everything = list(range(len(proj)))
    extreme, planes, facets = _full_hull(proj, everything, basis)
    if len(extreme) < len({v for f in facets for v in f[0]}):
        # Rebuild from extreme points only so the triangulation uses vertices.
        sub = [proj[i] for i in extreme]
        sub_basis = _affine_basis(sub)
        ext2, planes, facets2 = _full_hull(sub, list(range(len(sub))), sub_basis)
        assert len(ext2) == len(sub)
        facets = [(tuple(extreme[v] for v in verts), n, off) for verts, n, off in facets2]
    apex = extreme[0]
    simplices = []
    vol = 0
    pa = proj[apex]
    for verts, n, off in facets:
        if dot(n, pa) == off:
            continue
        det = det_int([[a - b for a, b in zip(proj[v], pa)] for v in verts])
        vol += abs(det)
        simplices.append((apex,) + verts)
    data = HullData(
        affine_dim=k,
        vertex_ids=extreme,
        planes=planes,
        simplices=simplices,
        volume_numerator=vol,
        coords=coords,
    )
    data.edges = _edges(proj, extreme, planes, k)
    return data


def _edges(proj, extreme, planes, k):
    incid = {v: frozenset(i for i, (n, off) in enumerate(planes) if dot(n, proj[v]) == off)
             for v in extreme}
    edges = []
    for u, w in combinations(extreme, 2):
        common = incid[u] & incid[w]
        if len(common) < k - 1:
            continue
        if rank_int([planes[i][0] for i in common]) == k - 1:
            edges.append((u, w))
    return edges
