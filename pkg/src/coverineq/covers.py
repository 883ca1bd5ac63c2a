"""Combinatorics of s-covers of a finite index set.

Index sets are 1-based, both in the API and on the wire, because every formula
they feed (coordinate subspaces, factorial constants) is written that way.
Member positions inside a family are 0-based Python indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    CoverError,
    EmptyMember,
    GenerationFailed,
    MemberEqualsBase,
    NonUniformMultiplicity,
    NotSubset,
)

MAX_N = 64


@dataclass(frozen=True)
class IndexSet:
    """A subset of ``[n] = {1, ..., n}`` stored as a bit mask (bit j-1 <-> j)."""

    bits: int
    n: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_N:
            raise ValueError(f"ground set size {self.n} outside 0..{MAX_N}")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"mask {self.bits:#x} has members outside [{self.n}]")

    @classmethod
    def of(cls, n: int, elements: Iterable[int]) -> "IndexSet":
        bits = 0
        for j in elements:
            j = int(j)
            if not 1 <= j <= n:
                raise ValueError(f"index {j} outside [1, {n}]")
            bits |= 1 << (j - 1)
        return cls(bits, n)

    @classmethod
    def full(cls, n: int) -> "IndexSet":
        return cls((1 << n) - 1, n)

    @classmethod
    def empty(cls, n: int) -> "IndexSet":
        return cls(0, n)

    def __iter__(self) -> Iterator[int]:
        b, j = self.bits, 1
        while b:
            if b & 1:
                yield j
            b >>= 1
            j += 1

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __contains__(self, j) -> bool:
        return 1 <= j <= self.n and bool(self.bits >> (j - 1) & 1)

    def __or__(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(self.bits | other.bits, max(self.n, other.n))

    def __and__(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(self.bits & other.bits, max(self.n, other.n))

    def __sub__(self, other: "IndexSet") -> "IndexSet":
        return IndexSet(self.bits & ~other.bits, self.n)

    def issubset(self, other: "IndexSet") -> bool:
        return self.bits & ~other.bits == 0

    def isdisjoint(self, other: "IndexSet") -> bool:
        return self.bits & other.bits == 0

    def complement(self) -> "IndexSet":
        return IndexSet(((1 << self.n) - 1) & ~self.bits, self.n)

    def zero_based(self) -> list[int]:
        return [j - 1 for j in self]

    def min(self) -> int:
        return (self.bits & -self.bits).bit_length()

    def __repr__(self) -> str:
        return f"IndexSet({{{', '.join(map(str, self))}}}, n={self.n})"


def as_index_set(obj, n: int) -> IndexSet:
    if isinstance(obj, IndexSet):
        if obj.n != n:
            return IndexSet.of(n, obj)
        return obj
    return IndexSet.of(n, obj)


@dataclass(frozen=True)
class CoverFamily:
    """An ordered family of subsets of ``base`` covering each element ``s`` times."""

    base: IndexSet
    members: tuple[IndexSet, ...]
    s: int

    @property
    def m(self) -> int:
        return len(self.members)

    @property
    def n(self) -> int:
        return self.base.n

    def sizes(self) -> list[int]:
        return [len(x) for x in self.members]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "base": list(self.base),
            "members": [list(x) for x in self.members],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CoverFamily":
        n = int(obj["n"])
        return validate_cover([IndexSet.of(n, x) for x in obj["members"]], IndexSet.of(n, obj["base"]))

    def __repr__(self) -> str:
        inner = ", ".join("{" + ",".join(map(str, x)) + "}" for x in self.members)
        return f"CoverFamily(({inner}) of {set(self.base)}, s={self.s})"


@dataclass(frozen=True)
class OneCoverDecomposition:
    """``s`` groups of member positions, each group a partition of the base."""

    groups: tuple[tuple[int, ...], ...]


def validate_cover(members: Sequence, base, n: int | None = None) -> CoverFamily:
    if n is None:
        if isinstance(base, IndexSet):
            n = base.n
        else:
            elems = [j for x in members for j in x] + list(base)
            n = max(elems, default=0)
    base = as_index_set(base, n)
    members = tuple(as_index_set(x, n) for x in members)
    if not members:
        raise CoverError("a cover needs at least one member")
    if len(base) == 0:
        raise CoverError("the base set is empty")
    for i, x in enumerate(members, start=1):
        if len(x) == 0:
            raise EmptyMember(i)
        if not x.issubset(base):
            raise NotSubset(i)
    counts = {j: sum(1 for x in members if j in x) for j in base}
    elems = list(base)
    first = elems[0]
    for j in elems[1:]:
        if counts[j] != counts[first]:
            raise NonUniformMultiplicity(first, j, (counts[first], counts[j]))
    s = counts[first]
    assert sum(len(x) for x in members) == s * len(base)
    return CoverFamily(base=base, members=members, s=s)


def complement_cover(c: CoverFamily) -> CoverFamily:
    for i, x in enumerate(c.members, start=1):
        if x == c.base:
            raise MemberEqualsBase(i)
    out = validate_cover([c.base - x for x in c.members], c.base)
    assert out.s == c.m - c.s
    return out


def induced_one_cover(c: CoverFamily) -> list[IndexSet]:
    """Partition of the base by membership signature across all members."""
    classes: dict[tuple[bool, ...], int] = {}
    for j in c.base:
        sig = tuple(j in x for x in c.members)
        classes[sig] = classes.get(sig, 0) | 1 << (j - 1)
    blocks = [IndexSet(bits, c.n) for bits in classes.values()]
    return sorted(blocks, key=IndexSet.min)


def is_one_reducible(c: CoverFamily) -> OneCoverDecomposition | None:
    """Search for a split of the members into ``s`` partitions of the base.

    Returns None when no split exists.
    """
    full = c.base.bits
    order = sorted(range(c.m), key=lambda i: -len(c.members[i]))
    masks = [c.members[i].bits for i in order]
    s = c.s
    unions = [0] * s
    groups: list[list[int]] = [[] for _ in range(s)]

    def place(t: int) -> bool:
        if t == len(order):
            return all(u == full for u in unions)
        mk = masks[t]
        seen_empty = False
        for b in range(s):
            if unions[b] & mk:
                continue
            if unions[b] == 0:
                # buckets are interchangeable while empty
                if seen_empty:
                    continue
                seen_empty = True
            unions[b] |= mk
            groups[b].append(order[t])
            if place(t + 1):
                return True
            groups[b].pop()
            unions[b] &= ~mk
        return False

    if not place(0):
        return None
    return OneCoverDecomposition(tuple(tuple(sorted(g)) for g in groups))


def random_cover(n: int, sigma, m: int, s: int, seed: int, retries: int = 1000) -> CoverFamily:
    sigma = as_index_set(sigma, n)
    if not 1 <= s <= m:
        raise ValueError(f"need 1 <= s <= m, got s={s}, m={m}")
    if len(sigma) == 0:
        raise ValueError("sigma must be nonempty")
    rng = np.random.default_rng(seed)
    elems = list(sigma)
    for _ in range(retries):
        bits = [0] * m
        for j in elems:
            for i in rng.choice(m, size=s, replace=False):
                bits[int(i)] |= 1 << (j - 1)
        if all(bits):
            return validate_cover([IndexSet(b, n) for b in bits], sigma)
    raise GenerationFailed(f"no {s}-cover with {m} nonempty members of {set(sigma)} after {retries} tries")


def set_partitions(elements: Sequence[int]) -> Iterator[list[list[int]]]:
    """All set partitions of ``elements`` (restricted-growth enumeration)."""
    elements = list(elements)
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _random_partition(elems: list[int], rng: np.random.Generator, min_blocks: int = 1) -> list[list[int]]:
    while True:
        k = int(rng.integers(min_blocks, len(elems) + 1))
        labels = rng.integers(0, k, size=len(elems))
        blocks = [[e for e, lab in zip(elems, labels) if lab == b] for b in range(k)]
        blocks = [b for b in blocks if b]
        if len(blocks) >= min_blocks:
            return blocks


def random_reducible_cover(n: int, sigma, s: int, seed) -> CoverFamily:
    """Concatenation of ``s`` random partitions of sigma: 1-reducible by construction."""
    sigma = as_index_set(sigma, n)
    rng = np.random.default_rng(seed)
    members = []
    for _ in range(s):
        members.extend(_random_partition(list(sigma), rng))
    return validate_cover([IndexSet.of(n, b) for b in members], sigma)


def random_cover_with_reducible_complement(n: int, sigma, t: int, seed) -> CoverFamily:
    """Members ``sigma \\ block`` over ``t`` random partitions with at least two blocks.

    The complement family is then a 1-reducible t-cover of sigma.
    """
    sigma = as_index_set(sigma, n)
    if len(sigma) < 2:
        raise ValueError("need |sigma| >= 2 so that complements are nonempty")
    rng = np.random.default_rng(seed)
    members = []
    for _ in range(t):
        for block in _random_partition(list(sigma), rng, min_blocks=2):
            members.append(sigma - IndexSet.of(n, block))
    return validate_cover(members, sigma)
