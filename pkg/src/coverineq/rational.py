"""Exact rational helpers: parsing, formatting and fraction-free linear algebra.

Everything here works on Python ints or :class:`fractions.Fraction`; no floats.
"""

from __future__ import annotations

import math
import sys
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions, decimal strings and ``"p/q"`` strings exactly.

    Floats are converted through their exact binary value.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    # numpy scalars and the like
    if hasattr(value, "item"):
        return to_fraction(value.item())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_fraction(q: Fraction) -> str:
    """Always ``"p/q"``, even for integers, so the type survives a round trip."""
    q = Fraction(q)
    limit = getattr(sys, "get_int_max_str_digits", lambda: 0)()
    if limit and max(abs(q.numerator), q.denominator).bit_length() > 3 * limit:
        # constant tables hold exact values with many thousands of digits
        sys.set_int_max_str_digits(0)
        try:
            return f"{q.numerator}/{q.denominator}"
        finally:
            sys.set_int_max_str_digits(limit)
    return f"{q.numerator}/{q.denominator}"


def parse_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(to_fraction(v) for v in values)


def common_denominator(vectors: Iterable[Sequence[Fraction]]) -> int:
    den = 1
    for v in vectors:
        for x in v:
            den = den * x.denominator // math.gcd(den, x.denominator)
    return den


def scale_to_int(vectors: Sequence[Sequence[Fraction]]) -> tuple[list[tuple[int, ...]], int]:
    """Scale rational vectors by their common denominator; returns (ints, scale)."""
    den = common_denominator(vectors)
    return [tuple(int(x * den) for x in v) for v in vectors], den


def det_int(matrix: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def rank_int(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    a = [list(r) for r in rows if any(r)]
    if not a:
        return 0
    ncols = len(a[0])
    rank = 0
    col = 0
    while rank < len(a) and col < ncols:
        pivot = next((r for r in range(rank, len(a)) if a[r][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank]
        pc = p[col]
        for r in range(rank + 1, len(a)):
            f = a[r][col]
            if f:
                a[r] = [x * pc - y * f for x, y in zip(a[r], p)]
        rank += 1
        col += 1
    return rank


def primitive(vec: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in vec:
        g = math.gcd(g, x)
    if g <= 1:
        return tuple(vec)
    return tuple(x // g for x in vec)


def normal_through(points: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Normal of the hyperplane through ``d`` integer points in ``Z^d``.

    Generalized cross product of the difference vectors; zero if degenerate.
    """
    p0 = points[0]
    d = len(p0)
    diffs = [[x - y for x, y in zip(p, p0)] for p in points[1:]]
    normal = []
    for i in range(d):
        minor = [row[:i] + row[i + 1:] for row in diffs]
        c = det_int(minor)
        normal.append(c if i % 2 == 0 else -c)
    return tuple(normal)


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def solve_fraction(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """Gauss-Jordan over the rationals; None if singular."""
    n = len(matrix)
    a = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[-1] for row in a]
