import pytest
from hypothesis import given, settings, strategies as st

from coverineq.covers import (
    IndexSet,
    complement_cover,
    induced_one_cover,
    is_one_reducible,
    random_cover,
    random_cover_with_reducible_complement,
    random_reducible_cover,
    set_partitions,
    validate_cover,
)
from coverineq.errors import EmptyMember, MemberEqualsBase, NonUniformMultiplicity, NotSubset


def sets(c):
    return [set(x) for x in c.members]


class TestIndexSet:
    def test_roundtrip_and_ops(self):
        a = IndexSet.of(5, [1, 3, 5])
        assert list(a) == [1, 3, 5]
        assert len(a) == 3 and 3 in a and 2 not in a
        assert list(a.complement()) == [2, 4]
        assert a.min() == 1
        assert a.zero_based() == [0, 2, 4]

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            IndexSet.of(3, [4])
        with pytest.raises(ValueError):
            IndexSet(0, 65)


class TestValidate:
    def test_loomis_whitney_pattern(self):
        c = validate_cover([[2, 3], [1, 3], [1, 2]], [1, 2, 3])
        assert c.s == 2 and c.m == 3

    def test_single_full_member(self):
        assert validate_cover([[1, 2, 3]], [1, 2, 3]).s == 1

    def test_mixed_sizes(self):
        assert validate_cover([[1], [2], [1, 2]], [1, 2]).s == 2

    def test_errors(self):
        with pytest.raises(NonUniformMultiplicity):
            validate_cover([[1], [1, 2]], [1, 2])
        with pytest.raises(EmptyMember):
            validate_cover([[], [1, 2]], [1, 2], n=2)
        with pytest.raises(NotSubset):
            validate_cover([[1, 3], [2]], IndexSet.of(3, [1, 2]))

    def test_json_roundtrip(self):
        c = validate_cover([[2], [1, 3]], IndexSet.of(4, [1, 2, 3]))
        assert type(c).from_json(c.to_json()) == c


class TestComplement:
    def test_lw(self):
        comp = complement_cover(validate_cover([[2, 3], [1, 3], [1, 2]], [1, 2, 3]))
        assert sets(comp) == [{1}, {2}, {3}] and comp.s == 1

    def test_swap(self):
        comp = complement_cover(validate_cover([[1], [2]], [1, 2]))
        assert sets(comp) == [{2}, {1}]

    def test_full_member(self):
        with pytest.raises(MemberEqualsBase):
            complement_cover(validate_cover([[1, 2, 3]], [1, 2, 3]))


class TestInduced:
    def test_distinct_signatures(self):
        blocks = induced_one_cover(validate_cover([[1, 2], [2, 3], [1, 3]], [1, 2, 3]))
        assert [set(b) for b in blocks] == [{1}, {2}, {3}]

    def test_one_signature(self):
        assert [set(b) for b in induced_one_cover(validate_cover([[1, 2]], [1, 2]))] == [{1, 2}]

    def test_two_classes(self):
        c = validate_cover([[1, 2], [3, 4], [1, 2], [3, 4]], [1, 2, 3, 4])
        assert [set(b) for b in induced_one_cover(c)] == [{1, 2}, {3, 4}]


class TestReducible:
    def test_split(self):
        c = validate_cover([[1], [2], [1, 2]], [1, 2])
        dec = is_one_reducible(c)
        groups = sorted(sorted(g) for g in dec.groups)
        assert groups == [[0, 1], [2]]

    def test_lw_not_reducible(self):
        assert is_one_reducible(validate_cover([[1, 2], [2, 3], [1, 3]], [1, 2, 3])) is None

    def test_one_cover_single_group(self):
        c = validate_cover([[1, 4], [2], [3]], [1, 2, 3, 4])
        assert is_one_reducible(c).groups == ((0, 1, 2),)


class TestRandom:
    def test_valid_2cover(self):
        c = random_cover(3, [1, 2, 3], 3, 2, seed=7)
        assert c.s == 2 and c.m == 3 and set(c.base) == {1, 2, 3}

    def test_one_member(self):
        c = random_cover(3, [1, 2], 1, 1, seed=0)
        assert sets(c) == [{1, 2}]

    def test_two_member_one_cover(self):
        c = random_cover(2, [1, 2], 2, 1, seed=3)
        assert sorted(map(sorted, sets(c))) == [[1], [2]]

    def test_seeded(self):
        assert random_cover(5, [1, 2, 4, 5], 4, 2, seed=11) == random_cover(5, [1, 2, 4, 5], 4, 2, seed=11)


def test_bell_numbers():
    assert [sum(1 for _ in set_partitions(range(k))) for k in range(6)] == [1, 1, 2, 5, 15, 52]


subset_st = st.integers(2, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.integers(1, n), min_size=1, max_size=n)))


@settings(max_examples=60, deadline=None)
@given(subset_st, st.integers(1, 4), st.integers(0, 2**31))
def test_random_cover_multiplicity(ns, s, seed):
    n, sigma = ns
    m = min(s + 2, s * len(sigma))
    c = random_cover(n, sorted(sigma), m, s, seed=seed)
    for j in sigma:
        assert sum(j in x for x in c.members) == s


@settings(max_examples=60, deadline=None)
@given(subset_st, st.integers(1, 3), st.integers(0, 2**31))
def test_concatenated_partitions_reduce(ns, s, seed):
    n, sigma = ns
    c = random_reducible_cover(n, sorted(sigma), s, seed)
    dec = is_one_reducible(c)
    assert dec is not None and len(dec.groups) == s
    for g in dec.groups:
        union = 0
        for i in g:
            assert union & c.members[i].bits == 0
            union |= c.members[i].bits
        assert union == c.base.bits


@settings(max_examples=40, deadline=None)
@given(subset_st.filter(lambda t: len(t[1]) >= 2), st.integers(1, 3), st.integers(0, 2**31))
def test_complement_is_reducible_by_construction(ns, t, seed):
    n, sigma = ns
    c = random_cover_with_reducible_complement(n, sorted(sigma), t, seed)
    comp = complement_cover(c)
    assert comp.s == t and c.s == c.m - t
    assert is_one_reducible(comp) is not None


@settings(max_examples=60, deadline=None)
@given(subset_st, st.integers(1, 4), st.integers(0, 2**31))
def test_induced_blocks_partition_base(ns, s, seed):
    n, sigma = ns
    c = random_cover(n, sorted(sigma), min(s + 1, s * len(sigma)), s, seed=seed)
    blocks = induced_one_cover(c)
    total = 0
    for b in blocks:
        assert total & b.bits == 0
        total |= b.bits
        # every member either contains a block or misses it
        for x in c.members:
            assert b.issubset(x) or b.isdisjoint(x)
    assert total == c.base.bits
