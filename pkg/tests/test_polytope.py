from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coverineq.covers import IndexSet
from coverineq.polytope import (
    CoordinateFlat,
    RationalPolytope,
    central_section,
    conv_of_blocks,
    cross_polytope,
    cube,
    float_section_volume,
    hanner,
    hull,
    max_parallel_section,
    mc_volume,
    permute_axes,
    product,
    project,
    random_polytope,
    scale_axes,
    section,
    section_at,
    section_volume,
    simplex,
    translate,
)

F = Fraction
SEG01 = RationalPolytope(1, [(0,), (1,)])
SQ01 = cube(2, 0, 1)


class TestHull:
    def test_interior_point_dropped(self):
        pts = [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)] + [(F(1, 2),) * 3]
        P = hull(pts)
        assert len(P.vertices) == 8
        assert (F(1, 2),) * 3 not in P.vertex_set()

    def test_square(self):
        P = hull([(0, 0), (1, 0), (0, 1), (1, 1)])
        assert P.vertex_set() == SQ01.vertex_set() and P.volume == 1

    def test_cross_polytope(self):
        assert len(cross_polytope(3).vertices) == 6

    def test_lower_dimensional(self):
        P = hull([(0, 0, 0), (1, 1, 0), (2, 2, 0)])
        assert P.affine_dim == 1 and P.volume == 0 and len(P.vertices) == 2

    def test_facets_cut_out_body(self):
        P = cross_polytope(3)
        assert len(P.facets) == 8
        for normal, off in P.facets:
            vals = [sum(a * b for a, b in zip(normal, v)) for v in P.vertices]
            assert max(vals) == off


class TestVolume:
    def test_simplex(self):
        assert simplex(3).volume == F(1, 6)

    def test_cross(self):
        assert cross_polytope(3).volume == F(4, 3)
        assert cross_polytope(4).volume == F(16, 24)

    def test_conv_of_blocks(self):
        assert conv_of_blocks([(SEG01, None), (SQ01, None)]).volume == F(1, 3)

    def test_affine_invariances(self):
        P = random_polytope(3, "general", 5)
        assert translate(P, [F(1, 3), -2, 5]).volume == P.volume
        assert permute_axes(P, [2, 0, 1]).volume == P.volume
        assert scale_axes(P, [2, F(1, 3), 3]).volume == 2 * P.volume


class TestProject:
    def test_cube(self):
        assert project(cube(3), [1, 2]).vertex_set() == cube(2).vertex_set()

    def test_cross(self):
        Q = project(cross_polytope(3), [1, 2])
        assert Q.vertex_set() == cross_polytope(2).vertex_set() and Q.volume == 2

    def test_simplex(self):
        assert project(simplex(3), [1]).vertex_set() == SEG01.vertex_set()


class TestSection:
    def test_cube_mid(self):
        S = section(cube(3), CoordinateFlat(IndexSet.of(3, [3]), (0,)))
        assert S.volume == 4

    def test_cross_mid(self):
        S = central_section(cross_polytope(3), [3])
        assert S.vertex_set() == cross_polytope(2).vertex_set() and S.volume == 2

    def test_cross_outside(self):
        S = section_at(cross_polytope(3), [3], [2])
        assert S.is_empty and S.volume == 0

    def test_full_fiber(self):
        assert section_volume(cube(2), [1, 2], [0, 0]) == 1
        assert section_volume(cube(2), [1, 2], [3, 0]) == 0

    def test_float_matches_exact(self):
        P = random_polytope(3, "general", 2)
        anchor = [F(1, 10)]
        assert float_section_volume(P, [2], [0.1]) == pytest.approx(float(section_volume(P, [2], anchor)), rel=1e-9)


class TestMaxSection:
    def test_cube(self):
        ms = max_parallel_section(cube(3), [1])
        assert ms.value == 4 and ms.exact

    def test_symmetric_anchor_zero(self):
        P = random_polytope(3, "unconditional", 4)
        ms = max_parallel_section(P, [1, 2])
        assert ms.exact and all(a == 0 for a in ms.anchor)
        rng = np.random.default_rng(0)
        lo, hi = project(P, [1, 2]).bounding_box()
        for _ in range(20):
            x = [F(int(rng.integers(-20, 21)), 20) * (h - l) / 2 + (h + l) / 2 for l, h in zip(lo, hi)]
            assert section_volume(P, [1, 2], x) <= ms.value

    def test_simplex_heuristic(self):
        # the top-down section through the origin is the largest one
        ms = max_parallel_section(simplex(3), [3])
        assert float(ms.value) == pytest.approx(0.5, rel=1e-6)

    def test_general_beats_center(self):
        P = random_polytope(3, "general", 9)
        ms = max_parallel_section(P, [1])
        assert ms.value >= section_volume(P, [1])
        assert ms.value == section_volume(P, [1], ms.anchor)


class TestHanner:
    def test_mixed(self):
        P = hanner(3, [1, 2])
        assert P.volume == 4
        assert P.vertex_set() == product(cross_polytope(2), cube(1)).vertex_set()

    def test_all_cross(self):
        assert hanner(2, [1, 2]).vertex_set() == cross_polytope(2).vertex_set()

    def test_empty_sigma_is_cube(self):
        assert hanner(2, []).vertex_set() == cube(2).vertex_set()

    def test_unconditional(self):
        assert hanner(4, [1, 3]).is_unconditional()


class TestConvOfBlocks:
    def test_triangle(self):
        T = conv_of_blocks([(SEG01, None), (SEG01, None)])
        assert T.vertex_set() == simplex(2).vertex_set() and T.volume == F(1, 2)

    def test_outside_anchor_is_larger(self):
        K1 = RationalPolytope(1, [(1,), (2,)])
        T = conv_of_blocks([(K1, [0]), (SEG01, None)])
        assert T.volume > F(1, 2)


class TestRandom:
    def test_unconditional_orbit(self):
        P = random_polytope(3, "unconditional", 3)
        for v in P.vertices:
            for signs in np.ndindex(2, 2, 2):
                w = tuple(x if s == 0 else -x for x, s in zip(v, signs))
                assert P.contains(w)

    def test_general_origin_interior(self):
        for seed in range(5):
            assert random_polytope(4, "general", seed).contains_origin_interior()

    def test_product_sections_are_translates(self):
        sigma = IndexSet.of(3, [1, 2])
        P = random_polytope(3, "product", 6, sigma=sigma)
        base = section_volume(P, sigma)
        proj = project(P, sigma)
        for v in list(proj.vertices) + [proj.centroid()]:
            assert section_volume(P, sigma, v) == base

    def test_seeded(self):
        assert random_polytope(3, "general", 1) == random_polytope(3, "general", 1)


class TestMonteCarlo:
    def test_unit_cube(self):
        est, se = mc_volume(cube(3, 0, 1), 20000, 0)
        assert abs(est - 1) <= 1e-12 + 3 * se

    def test_cross(self):
        est, se = mc_volume(cross_polytope(3), 100000, 1)
        assert abs(est - 4 / 3) <= 3 * se


def test_json_roundtrip():
    P = random_polytope(3, "general", 8)
    assert RationalPolytope.from_json(P.to_json()) == P


coords = st.fractions(min_value=-3, max_value=3, max_denominator=6)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coords, coords, coords), min_size=4, max_size=10))
def test_hull_idempotent_and_contains_inputs(pts):
    P = hull(pts, 3)
    assert all(P.contains(p) for p in pts)
    assert hull(P.vertices, 3) == P
    assert P.volume >= 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([2, 3, 4]))
def test_brunn_concavity_along_segment(seed, n):
    # section volume to the power 1/k is concave along any segment
    P = random_polytope(n, "general", seed)
    rng = np.random.default_rng(seed)
    fixed = [1]
    k = n - 1
    proj = project(P, fixed)
    lo, hi = proj.vertices[0][0], proj.vertices[-1][0]
    lo, hi = min(lo, hi), max(lo, hi)
    a, b = sorted(F(int(x), 16) for x in rng.integers(0, 17, size=2))
    x0, x1 = lo + a * (hi - lo), lo + b * (hi - lo)
    mid = (x0 + x1) / 2
    v0, v1, vm = (float(section_volume(P, fixed, [x])) ** (1 / k) for x in (x0, x1, mid))
    assert vm >= (v0 + v1) / 2 - 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_volume_additive_under_cut(seed):
    # slicing at x1 = 0 splits the body into two hulls whose volumes add up
    P = random_polytope(3, "general", seed)
    S = central_section(P, [1])
    cut = [(F(0),) + v for v in S.vertices]
    left = hull([v for v in P.vertices if v[0] <= 0] + cut, 3)
    right = hull([v for v in P.vertices if v[0] >= 0] + cut, 3)
    assert left.volume + right.volume == P.volume
