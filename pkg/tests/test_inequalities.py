import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from coverineq.covers import IndexSet, random_cover, validate_cover
from coverineq.errors import InvalidCover, NotReducible, NotUnconditional, OriginOutside, OutOfRange
from coverineq.inequalities import (
    ConstantTable,
    check_two_block_section,
    check_local_meyer_original,
    check_bollobas_thomason,
    check_cap_subspace,
    check_conjecture,
    check_cor_marginals,
    check_functional_rs,
    check_liakopoulos,
    check_lemma_conv_blocks,
    check_local_bt,
    check_local_meyer,
    check_min_prod,
    check_operator_lower_bound,
    check_thm_sharp_local,
    check_unconditional_improved,
    unconditional_constant_ratio,
    codim_one_constant_ratio,
)
from coverineq.logconcave import ExpConcavePL, Gaussian, Indicator
from coverineq.polytope import (
    RationalPolytope,
    conv_of_blocks,
    cross_polytope,
    cube,
    hanner,
    random_polytope,
    translate,
)

F = Fraction
SEG01 = RationalPolytope(1, [(0,), (1,)])
SQ01 = cube(2, 0, 1)
SIMPLEX0 = RationalPolytope(3, [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
EXP = ExpConcavePL(1, [[-1]], [0], [[-1]], [0])
LW3 = validate_cover([[2, 3], [1, 3], [1, 2]], [1, 2, 3])
SPLIT3 = validate_cover([[1], [2, 3]], [1, 2, 3])
LOCAL12 = validate_cover([[1], [2]], IndexSet.of(3, [1, 2]))


class TestBollobasThomason:
    def test_cube_tight(self):
        r = check_bollobas_thomason(cube(3, 0, 1), LW3)
        assert (r.lhs, r.rhs, r.ratio) == (1, 1, 1)

    def test_cross(self):
        r = check_bollobas_thomason(cross_polytope(3), LW3)
        assert r.lhs == 8 and r.rhs == F(16, 9) and r.ratio == F(9, 2)

    def test_simplex(self):
        assert check_bollobas_thomason(SIMPLEX0, LW3).holds


class TestLocalBT:
    def test_constant(self):
        assert ConstantTable.local_bt(3, LOCAL12) == F(4, 3)

    def test_cube(self):
        r = check_local_bt(cube(3), LOCAL12)
        assert r.exact and r.holds and r.constant == F(4, 3)

    def test_full_sigma_rejected(self):
        with pytest.raises(InvalidCover):
            check_local_bt(cube(3), LW3)


class TestLiakopoulos:
    def test_cross_equality(self):
        r = check_liakopoulos(cross_polytope(3), SPLIT3)
        assert r.lhs == F(4, 3) and r.rhs == F(4, 3) and r.equality

    def test_cube(self):
        r = check_liakopoulos(cube(3), SPLIT3)
        assert r.lhs == 8 and r.rhs == F(8, 3) and r.ratio == 3

    def test_simplex_vertex_at_origin(self):
        assert check_liakopoulos(SIMPLEX0, validate_cover([[1], [2], [3]], [1, 2, 3])).holds


class TestLocalMeyer:
    def test_unconditional_exact(self):
        r = check_local_meyer(random_polytope(3, "unconditional", 2), LOCAL12)
        assert r.exact and r.holds

    def test_cross(self):
        assert check_local_meyer(cross_polytope(3), LOCAL12).holds

    def test_full_rejected(self):
        with pytest.raises(InvalidCover):
            check_local_meyer(cube(3), LW3)


class TestTwoBlock:
    def test_hanner_equality(self):
        r = check_two_block_section(hanner(3, [1, 2]), LOCAL12)
        assert r.ratio == 1

    def test_cube(self):
        r = check_two_block_section(cube(3), LOCAL12)
        assert r.lhs == 16 and r.rhs == 8 and r.ratio == 2

    def test_cross(self):
        assert check_two_block_section(cross_polytope(3), LOCAL12).holds


class TestSharpLocal:
    def test_product_equality(self):
        sigma = IndexSet.of(4, [1, 2, 3])
        C = conv_of_blocks([(cross_polytope(1), None), (cross_polytope(2), None)])
        c = validate_cover([[2, 3], [1]], sigma)
        from coverineq.polytope import product_on
        K = product_on(C, cube(1), sigma, 4)
        assert check_thm_sharp_local(K, c).ratio == 1

    def test_not_reducible(self):
        c = validate_cover([[3], [1], [2]], IndexSet.of(4, [1, 2, 3]))
        with pytest.raises(NotReducible):
            check_thm_sharp_local(cube(4), c)

    def test_origin_required(self):
        with pytest.raises(OriginOutside):
            check_thm_sharp_local(translate(cube(3), [3, 0, 0]), LOCAL12)

    def test_general_body_numeric(self):
        r = check_thm_sharp_local(random_polytope(3, "general", 3), LOCAL12)
        assert not r.exact and r.holds and r.tolerance > 0

    def test_conjecture_regime_tag(self):
        c = validate_cover([[3], [1], [2]], IndexSet.of(4, [1, 2, 3]))
        r = check_conjecture(hanner(4, [1, 2, 3]), c)
        assert r.witnesses["regime"] == "conjecture" and r.holds


class TestOriginalForm:
    def test_cube(self):
        r = check_local_meyer_original(cube(3), LOCAL12)
        assert r.exact and r.ratio == 6

    def test_cross(self):
        assert check_local_meyer_original(cross_polytope(3), LOCAL12).ratio == 4

    def test_full_rejected(self):
        with pytest.raises(InvalidCover):
            check_local_meyer_original(cube(3), LW3)


class TestUnconditional:
    def test_cube(self):
        r = check_unconditional_improved(cube(3), [1, 2])
        assert r.lhs == 16 and r.rhs == F(32, 9) and r.ratio == F(9, 2)

    def test_cross(self):
        r = check_unconditional_improved(cross_polytope(3), [1, 2])
        assert r.lhs == F(8, 3) and r.rhs == F(8, 9) and r.ratio == 3

    def test_hanner(self):
        assert check_unconditional_improved(hanner(3, [1, 2]), [1, 2]).holds

    def test_needs_unconditional(self):
        with pytest.raises(NotUnconditional):
            check_unconditional_improved(random_polytope(3, "general", 0), [1])


class TestConvBlocks:
    def test_anchors_inside(self):
        assert check_lemma_conv_blocks([(SEG01, None), (SQ01, None)]).ratio == 1

    def test_anchor_outside_strict(self):
        r = check_lemma_conv_blocks([(SEG01, [2]), (SEG01, None)])
        assert r.ratio > 1 and not r.witnesses["equality_predicted"]

    def test_point_block_flagged(self):
        point = RationalPolytope(1, [(1,)])
        r = check_lemma_conv_blocks([(point, None), (SEG01, None)])
        assert r.witnesses["equality_predicted"]
        # the hull still has positive area, so the computed sides differ
        assert r.lhs == F(1, 2) and r.rhs == 0 and r.notes


class TestCapSubspace:
    def test_blocks(self):
        r = check_cap_subspace([SQ01, SEG01], [1, 3])
        assert r.witnesses["same_vertex_set"] and r.lhs == r.rhs

    def test_everything(self):
        r = check_cap_subspace([SQ01, SEG01], [1, 2, 3])
        assert r.lhs == F(1, 3) and r.witnesses["same_vertex_set"]

    def test_missing_block_contributes_origin(self):
        r = check_cap_subspace([SQ01, SEG01], [1, 2])
        assert r.lhs == 1 and r.witnesses["same_vertex_set"]


class TestFunctional:
    def test_square(self):
        r = check_functional_rs(Indicator(cube(2)), validate_cover([[1], [2]], [1, 2]))
        assert r.lhs == 4 and r.rhs == 2 and r.ratio == 2 and r.exact

    def test_gaussian(self):
        r = check_functional_rs(Gaussian([0, 0], [2, 2]), validate_cover([[1], [2]], [1, 2]))
        assert float(r.lhs) == pytest.approx(math.pi, rel=1e-6)
        assert float(r.rhs) == pytest.approx(math.pi / 2, rel=1e-6)
        assert abs(float(r.ratio) - 2) < 1e-3

    def test_conv_blocks_equality(self):
        C = conv_of_blocks([(SEG01, None), (SQ01, None)])
        assert check_functional_rs(Indicator(C), SPLIT3).ratio == 1

    def test_gaussian_marginals(self):
        r = check_cor_marginals(Gaussian([0, 0, 0], [2, 2, 2]), LOCAL12)
        assert float(r.ratio) >= 1 - 1e-3

    def test_hanner_marginals(self):
        assert check_cor_marginals(Indicator(hanner(3, [1, 2])), LOCAL12).ratio == 1


class TestMinProduct:
    def test_indicators(self):
        r = check_min_prod([Indicator(SEG01), Indicator(SEG01)])
        assert r.lhs == 1 and r.rhs == 1 and r.equality

    def test_indicator_exponential(self):
        r = check_min_prod([Indicator(SEG01), EXP])
        assert float(r.lhs) == pytest.approx(1.0, rel=1e-8)

    def test_exponentials(self):
        r = check_min_prod([EXP, EXP])
        assert float(r.lhs) == pytest.approx(2.0, rel=1e-8) and float(r.rhs) == pytest.approx(1.0)


class TestOperator:
    def test_equal_heights(self):
        assert check_operator_lower_bound([Indicator(SEG01), Indicator(SQ01)]).ratio == 1

    def test_unequal_heights(self):
        assert check_operator_lower_bound([Indicator(SEG01), Indicator(SEG01, F(1, 2))]).ratio > 1

    def test_gaussian_indicator(self):
        r = check_operator_lower_bound([Gaussian([0], [1]), Indicator(SEG01)], samples=200_000)
        assert float(r.ratio) >= 1 - 1e-2


class TestConstants:
    def test_n8_p2(self):
        r = unconditional_constant_ratio(8, 2)
        assert r.ratio == 1260 and r.bound == 1 and r.holds

    def test_n12_p3(self):
        assert unconditional_constant_ratio(12, 3).holds

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            unconditional_constant_ratio(7, 2)
        with pytest.raises(OutOfRange):
            codim_one_constant_ratio(3)

    def test_945(self):
        assert codim_one_constant_ratio(4).ratio == 945

    def test_n5(self):
        assert codim_one_constant_ratio(5).holds

    def test_bound_exact_when_integral(self):
        r = unconditional_constant_ratio(16, 4)
        assert r.bound is not None and r.bound**4 == r.bound_power


def test_report_serializes_fractions():
    d = check_liakopoulos(cross_polytope(3), SPLIT3).to_json()
    assert d["lhs"] == "4/3" and d["ratio"] == "1/1"


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([2, 3, 4]), st.integers(1, 3))
def test_bollobas_thomason_random(seed, n, s):
    s = min(s, n - 1) if n > 1 else 1
    K = random_polytope(n, "general", seed)
    c = random_cover(n, list(range(1, n + 1)), min(s + 1, s * n), s, seed=seed)
    if any(x == c.base for x in c.members):
        c = validate_cover([[j] for j in range(1, n + 1)], list(range(1, n + 1)))
    assert check_bollobas_thomason(K, c).holds
    assert check_liakopoulos(K, c).holds


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([3, 4]))
def test_local_checks_unconditional(seed, n):
    K = random_polytope(n, "unconditional", seed)
    sigma = IndexSet.of(n, [1, 2])
    c = validate_cover([[1], [2]], sigma)
    for check in (check_local_bt, check_local_meyer, check_two_block_section, check_thm_sharp_local, check_local_meyer_original):
        r = check(K, c)
        assert r.exact and r.holds
    assert check_unconditional_improved(K, sigma).holds
