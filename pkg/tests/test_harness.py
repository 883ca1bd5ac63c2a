import pytest

from coverineq.covers import IndexSet, validate_cover
from coverineq.harness import (
    SearchConfig,
    brute_oracle_small,
    core_suite,
    equality_witness_suite,
    functional_suite,
    hanner_cover_catalog,
    run_trial,
    search_conjecture,
    verify_final_proposition,
)
from coverineq.polytope import conv_of_blocks, cross_polytope, cube


def test_hanner_only_search_is_tight():
    summ = search_conjecture(SearchConfig(trials=30, dims=(2, 4), body_kinds=("hanner",), seed=3))
    assert summ.completed == 30 and summ.min_ratio == 1
    assert not summ.counterexamples and not summ.failures


def test_unconditional_search_exact():
    summ = search_conjecture(SearchConfig(trials=60, dims=(2, 4), body_kinds=("unconditional", "product"), seed=1))
    assert summ.exact_count == 60 and summ.min_ratio >= 1 and not summ.counterexamples


def test_general_search_within_tolerance():
    cfg = SearchConfig(trials=6, dims=(3, 3), body_kinds=("general",), seed=2)
    summ = search_conjecture(cfg)
    assert summ.numeric_count + summ.exact_count == summ.completed
    assert summ.min_ratio >= 1 - cfg.tolerance or summ.counterexamples


def test_summary_reproducible():
    cfg = SearchConfig(trials=25, dims=(2, 4), body_kinds=("unconditional", "hanner"), seed=11)
    assert search_conjecture(cfg).dumps() == search_conjecture(cfg).dumps()


def test_parallel_matches_serial(monkeypatch):
    cfg = SearchConfig(trials=16, dims=(2, 3), body_kinds=("unconditional",), seed=5)
    serial = []
    search_conjecture(cfg, log=serial.append)
    monkeypatch.setenv("COVERINEQ_THREADS", "2")
    parallel = []
    search_conjecture(cfg, log=parallel.append)
    assert serial == parallel


def test_trial_depends_only_on_seed_and_index():
    cfg = SearchConfig(trials=10, seed=4)
    assert run_trial(cfg, 7) == run_trial(SearchConfig(trials=99, seed=4), 7)


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        SearchConfig.from_json({"trials": 3, "colour": "blue"})
    with pytest.raises(ValueError):
        SearchConfig(body_kinds=("spiky",))


def test_config_roundtrip():
    cfg = SearchConfig(trials=7, dims=(2, 5), body_kinds=("general", "hanner"))
    assert SearchConfig.from_json(cfg.to_json()) == cfg


class TestFinalProposition:
    def test_cross_times_cube(self):
        sigma = IndexSet.of(4, [1, 2])
        c = validate_cover([[1], [2]], sigma)
        r = verify_final_proposition(4, sigma, c, C=cross_polytope(2), W=cube(2))
        assert r.exact and r.ratio >= 1

    def test_matched_blocks_equality(self):
        sigma = IndexSet.of(4, [1, 2, 3])
        c = validate_cover([[1], [2, 3]], sigma)
        C = conv_of_blocks([(cross_polytope(1), None), (cross_polytope(2), None)])
        assert verify_final_proposition(4, sigma, c, C=C, W=cube(1)).ratio == 1

    @pytest.mark.parametrize("seed", range(5))
    def test_random_product(self, seed):
        sigma = IndexSet.of(4, [1, 3])
        c = validate_cover([[1], [3]], sigma)
        assert verify_final_proposition(4, sigma, c, seed=seed).ratio >= 1


def test_catalog_covers_are_admissible():
    sigma = IndexSet.of(4, [1, 2, 3])
    covers = hanner_cover_catalog(sigma)
    assert covers
    for c in covers:
        assert c.base == sigma and all(x != sigma for x in c.members)


def test_equality_suite():
    reps = equality_witness_suite()
    assert len(reps) > 40
    assert all(r.exact and r.ratio == 1 for r in reps)


def test_core_suite_holds():
    reps = core_suite()
    assert reps and all(r.holds for r in reps)


def test_functional_suite_holds():
    assert all(r.holds for r in functional_suite())


@pytest.mark.parametrize("rep_id", ["liakopoulos", "min_product", "volume"])
def test_brute_oracles(rep_id):
    assert brute_oracle_small(rep_id).passed


def test_brute_oracle_unknown():
    with pytest.raises(KeyError):
        brute_oracle_small("nope")
