"""Evaluation of the cover inequalities on concrete bodies and functions.

Every check returns an :class:`InequalityReport` arranged so that the theorem
reads ``lhs >= rhs``; ``ratio = lhs / rhs`` must then be at least 1. Reports
are exact (``Fraction`` throughout, tolerance 0) whenever all ingredients are
polytopal and no max-section search was needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .covers import CoverFamily, IndexSet, as_index_set, complement_cover, induced_one_cover, is_one_reducible
from .errors import (
    HeightExceedsOne,
    InvalidCover,
    MemberEqualsBase,
    NotReducible,
    NotUnconditional,
    OriginOutside,
    OutOfRange,
)
from .logconcave import (
    Indicator,
    LogConcaveFn,
    embed_factors,
    embedded_integral,
    integrate_detail,
    max_marginal,
    min_product_integral,
    Integral,
)
from .polytope import (
    RationalPolytope,
    conv_of_blocks,
    max_parallel_section,
    project,
    section_volume,
)
from .rational import format_fraction

NUMERIC_TOL = 1e-6


class ConstantTable:
    """Memoized exact factorials and binomials."""

    @staticmethod
    @lru_cache(maxsize=None)
    def factorial(k: int) -> int:
        if k < 0:
            raise ValueError("negative factorial")
        return math.factorial(k)

    @staticmethod
    @lru_cache(maxsize=None)
    def binomial(a: int, b: int) -> int:
        return math.comb(a, b)

    # constants of the individual inequalities

    @classmethod
    def local_bt(cls, n: int, c: CoverFamily) -> Fraction:
        p = len(c.base)
        num = math.prod(cls.binomial(n - len(x), n - p) for x in c.members)
        return Fraction(num, cls.binomial(n, n - p) ** (c.m - c.s))

    @classmethod
    def liakopoulos(cls, n: int, c: CoverFamily) -> Fraction:
        return Fraction(math.prod(cls.factorial(len(x)) for x in c.members), cls.factorial(n) ** c.s)

    @classmethod
    def local_meyer(cls, n: int, c: CoverFamily) -> Fraction:
        # the denominator is read as (n (m - s))!
        p = len(c.base)
        return Fraction(math.prod(cls.factorial(p - len(x)) for x in c.members), cls.factorial(n * (c.m - c.s)))

    @classmethod
    def sharp_local(cls, c: CoverFamily) -> Fraction:
        p = len(c.base)
        return Fraction(math.prod(cls.factorial(p - len(x)) for x in c.members), cls.factorial(p) ** (c.m - c.s))

    @classmethod
    def local_meyer_original(cls, n: int, c: CoverFamily) -> Fraction:
        return Fraction(math.prod(cls.factorial(len(x)) for x in c.members), cls.factorial(n * c.s))

    @classmethod
    def unconditional_improved(cls, n: int, p: int) -> Fraction:
        return Fraction(cls.factorial(p), n**p)

    @classmethod
    def blocks(cls, dims: Sequence[int]) -> Fraction:
        return Fraction(math.prod(cls.factorial(i) for i in dims), cls.factorial(sum(dims)))


@dataclass
class InequalityReport:
    id: str
    lhs: Fraction | float
    rhs: Fraction | float
    constant: Fraction | None
    exact: bool
    tolerance: float = 0.0
    witnesses: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.exact:
            self.tolerance = 0.0

    @property
    def ratio(self):
        if self.rhs == 0:
            return Fraction(1) if self.lhs == 0 else math.inf
        if self.exact:
            return Fraction(self.lhs) / Fraction(self.rhs)
        return float(self.lhs) / float(self.rhs)

    @property
    def holds(self) -> bool:
        if self.exact:
            return self.lhs >= self.rhs
        return self.ratio >= 1 - self.tolerance

    @property
    def equality(self) -> bool:
        return self.exact and self.lhs == self.rhs

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "exact": self.exact,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "ratio": _num(self.ratio),
            "constant": None if self.constant is None else _num(self.constant),
            "tolerance": self.tolerance,
            "holds": self.holds,
            "equality": self.equality,
            "witnesses": _ser(self.witnesses),
            "notes": list(self.notes),
        }


def _num(x):
    if isinstance(x, int) and not isinstance(x, bool):
        x = Fraction(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return _ser(x)


def _ser(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return format_fraction(x)
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, IndexSet):
        return list(x)
    if isinstance(x, CoverFamily):
        return x.to_json()
    if isinstance(x, RationalPolytope):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): _ser(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_ser(v) for v in x]
    if hasattr(x, "item"):
        return _ser(x.item())
    return str(x)


# ---------------------------------------------------------------------------
# shared pieces


def _require_proper(K: RationalPolytope, c: CoverFamily):
    if c.n != K.dim:
        raise InvalidCover(f"cover lives in [{c.n}] but the body has dimension {K.dim}")
    if len(c.base) >= K.dim:
        raise InvalidCover("the base set must be a proper subset of [n]")


def _require_full(K: RationalPolytope, c: CoverFamily):
    if c.n != K.dim:
        raise InvalidCover(f"cover lives in [{c.n}] but the body has dimension {K.dim}")
    if c.base != IndexSet.full(K.dim):
        raise InvalidCover("the cover must be a cover of [n]")


def _require_origin(K: RationalPolytope):
    if not K.contains([0] * K.dim):
        raise OriginOutside("the body must contain the origin")


@lru_cache(maxsize=4096)
def _max_section_cached(K: RationalPolytope, bits: int, effort: int):
    return max_parallel_section(K, IndexSet(bits, K.dim), effort=effort)


def max_section(K: RationalPolytope, sigma, effort: int = 1):
    sigma = as_index_set(sigma, K.dim)
    return _max_section_cached(K, sigma.bits, effort)


def linear_section_volume(K: RationalPolytope, fixed: IndexSet) -> Fraction:
    """Volume of ``K`` intersected with the coordinate subspace ``{x_i = 0, i in fixed}``."""
    if len(fixed) == 0:
        return K.volume
    return section_volume(K, fixed)


def _section_term(K, sigma, power: int, effort: int):
    ms = max_section(K, sigma, effort)
    return ms, ms.value**power


def _finish(rep_id, lhs, rhs, constant, exact, ms=None, witnesses=None, notes=None):
    w = dict(witnesses or {})
    tol = 0.0
    if ms is not None:
        w["max_section_anchor"] = list(ms.anchor)
        w["max_section_method"] = ms.method
        if not ms.exact:
            tol = NUMERIC_TOL
    return InequalityReport(rep_id, lhs, rhs, constant, exact, tol, w, list(notes or []))


# ---------------------------------------------------------------------------
# geometric checks


def check_bollobas_thomason(K: RationalPolytope, c: CoverFamily) -> InequalityReport:
    _require_full(K, c)
    lhs = math.prod((project(K, x).volume for x in c.members), start=Fraction(1))
    rhs = K.volume**c.s
    return _finish("bollobas_thomason", lhs, rhs, Fraction(1), True, witnesses={"cover": c})


def check_local_bt(K: RationalPolytope, c: CoverFamily) -> InequalityReport:
    _require_proper(K, c)
    const = ConstantTable.local_bt(K.dim, c)
    lhs = const * math.prod((project(K, x.complement()).volume for x in c.members), start=Fraction(1))
    rhs = K.volume ** (c.m - c.s) * project(K, c.base.complement()).volume ** c.s
    return _finish("local_bollobas_thomason", lhs, rhs, const, True, witnesses={"cover": c})


def check_liakopoulos(K: RationalPolytope, c: CoverFamily) -> InequalityReport:
    _require_full(K, c)
    _require_origin(K)
    const = ConstantTable.liakopoulos(K.dim, c)
    rhs = const * math.prod((linear_section_volume(K, x.complement()) for x in c.members), start=Fraction(1))
    return _finish("liakopoulos", K.volume**c.s, rhs, const, True, witnesses={"cover": c})


def check_local_meyer(K: RationalPolytope, c: CoverFamily, effort: int = 1) -> InequalityReport:
    _require_proper(K, c)
    _require_origin(K)
    const = ConstantTable.local_meyer(K.dim, c)
    ms, sec = _section_term(K, c.base, c.s, effort)
    lhs = K.volume ** (c.m - c.s) * sec
    rhs = const * math.prod((linear_section_volume(K, x) for x in c.members), start=Fraction(1))
    return _finish("local_meyer", lhs, rhs, const, ms.exact, ms, {"cover": c},
                   ["denominator read as (n(m-s))!"])


def check_two_block_section(K: RationalPolytope, c: CoverFamily, effort: int = 1) -> InequalityReport:
    _require_proper(K, c)
    if c.m != 2 or c.s != 1:
        raise InvalidCover("this case needs a two-member 1-cover")
    _require_origin(K)
    a, b = c.members
    const = Fraction(ConstantTable.factorial(len(a)) * ConstantTable.factorial(len(b)),
                     ConstantTable.factorial(len(c.base)))
    ms, sec = _section_term(K, c.base, 1, effort)
    lhs = K.volume * sec
    rhs = const * linear_section_volume(K, a) * linear_section_volume(K, b)
    return _finish("two_block_section", lhs, rhs, const, ms.exact, ms, {"cover": c})


def _sharp_local(K, c, effort, rep_id, witnesses, notes=()):
    const = ConstantTable.sharp_local(c)
    ms, sec = _section_term(K, c.base, c.s, effort)
    lhs = K.volume ** (c.m - c.s) * sec
    rhs = const * math.prod((linear_section_volume(K, x) for x in c.members), start=Fraction(1))
    return _finish(rep_id, lhs, rhs, const, ms.exact, ms, witnesses, notes)


def complement_reducibility(c: CoverFamily):
    """The complement cover and its decomposition, or (complement or None, None)."""
    try:
        comp = complement_cover(c)
    except MemberEqualsBase:
        return None, None
    return comp, is_one_reducible(comp)


def check_thm_sharp_local(K: RationalPolytope, c: CoverFamily, effort: int = 1) -> InequalityReport:
    _require_proper(K, c)
    comp, dec = complement_reducibility(c)
    if dec is None:
        raise NotReducible("the complementary cover is not a 1-reducible cover")
    _require_origin(K)
    w = {"cover": c, "complement_groups": [list(g) for g in dec.groups],
         "induced_one_cover": [list(b) for b in induced_one_cover(c)]}
    return _sharp_local(K, c, effort, "sharp_local", w)


def check_conjecture(K: RationalPolytope, c: CoverFamily, effort: int = 1) -> InequalityReport:
    """The sharp local inequality without the reducibility hypothesis."""
    _require_proper(K, c)
    _require_origin(K)
    comp, dec = complement_reducibility(c)
    if c.m == c.s:
        # every member is the whole base; the bound is immediate
        regime = "trivial"
    else:
        regime = "theorem" if dec is not None else "conjecture"
    w = {"cover": c, "regime": regime}
    return _sharp_local(K, c, effort, "conjecture", w)


def check_local_meyer_original(K: RationalPolytope, c: CoverFamily, effort: int = 1) -> InequalityReport:
    _require_proper(K, c)
    _require_origin(K)
    const = ConstantTable.local_meyer_original(K.dim, c)
    ms, sec = _section_term(K, c.base, c.m - c.s, effort)
    lhs = K.volume**c.s * sec
    rhs = const * math.prod((linear_section_volume(K, c.base - x) for x in c.members), start=Fraction(1))
    exact = ms.exact or c.m == c.s
    return _finish("local_meyer_original", lhs, rhs, const, exact, None if exact else ms, {"cover": c})


def check_unconditional_improved(K: RationalPolytope, sigma) -> InequalityReport:
    sigma = as_index_set(sigma, K.dim)
    if not 1 <= len(sigma) < K.dim:
        raise InvalidCover("sigma must be a nonempty proper subset of [n]")
    if not K.is_unconditional():
        raise NotUnconditional("the body is not invariant under coordinate sign flips")
    p = len(sigma)
    const = ConstantTable.unconditional_improved(K.dim, p)
    lhs = K.volume ** (p - 1) * linear_section_volume(K, sigma)
    rhs = const * math.prod((linear_section_volume(K, IndexSet.of(K.dim, [j])) for j in sigma), start=Fraction(1))
    return _finish("unconditional_improved", lhs, rhs, const, True, witnesses={"sigma": sigma})


def check_lemma_conv_blocks(blocks: Sequence[tuple[RationalPolytope, Sequence | None]]) -> InequalityReport:
    C = conv_of_blocks(blocks)
    dims = [K.dim for K, _ in blocks]
    const = ConstantTable.blocks(dims)
    rhs = const * math.prod((K.volume for K, _ in blocks), start=Fraction(1))
    inside = all(K.contains([0] * K.dim if x is None else x) for K, x in blocks)
    degenerate = any(not K.full_dimensional for K, _ in blocks)
    w = {"anchors_inside": inside, "degenerate_block": degenerate,
         "equality_predicted": inside or degenerate}
    notes = []
    if degenerate and C.volume != rhs:
        notes.append("degenerate block gives rhs 0 while the hull keeps positive volume")
    return _finish("conv_blocks", C.volume, rhs, const, True, witnesses=w, notes=notes)


def check_cap_subspace(blocks: Sequence[RationalPolytope], sigma) -> InequalityReport:
    """Compare a conv-of-blocks body cut by H_sigma with the hull of the cut blocks."""
    dims = [K.dim for K in blocks]
    N = sum(dims)
    sigma = as_index_set(sigma, N)
    C = conv_of_blocks([(K, None) for K in blocks])
    keep = sigma.zero_based()
    if len(keep) == N:
        left = C
    elif not keep:
        raise InvalidCover("sigma must be nonempty")
    else:
        from .polytope import section, CoordinateFlat
        left = section(C, CoordinateFlat.through_origin(sigma.complement()))
    pos = {c: i for i, c in enumerate(keep)}
    pts = []
    start = 0
    for K in blocks:
        local = [c - start for c in keep if start <= c < start + K.dim]
        off = [c for c in range(K.dim) if c not in local]
        if off:
            from .polytope import section, CoordinateFlat
            fixed = IndexSet.of(K.dim, [c + 1 for c in off])
            if local:
                cut = section(K, CoordinateFlat.through_origin(fixed))
                verts = cut.vertices
            else:
                verts = [()] if K.contains([0] * K.dim) else []
        else:
            verts = K.vertices
        for v in verts:
            x = [Fraction(0)] * len(keep)
            for c, val in zip(local, v):
                x[pos[c + start]] = val
            pts.append(tuple(x))
        start += K.dim
    right = RationalPolytope(len(keep), pts)
    same = left.vertex_set() == right.vertex_set()
    w = {"sigma": sigma, "left_vertices": len(left.vertices), "right_vertices": len(right.vertices),
         "same_vertex_set": same}
    rep = _finish("cap_subspace", left.volume, right.volume, None, True, witnesses=w)
    if not same:
        rep.notes.append("vertex sets differ")
    return rep


# ---------------------------------------------------------------------------
# functional checks


def _numeric_tol(*parts: Integral, rel: float = 0.0) -> float:
    tol = NUMERIC_TOL
    for p in parts:
        if not p.exact and p.value:
            tol = max(tol, 4 * abs(p.error) / abs(float(p.value)))
    return max(tol, rel)


def _cover_dim_check(f: LogConcaveFn, c: CoverFamily):
    if c.n != f.dim:
        raise InvalidCover(f"cover lives in [{c.n}] but the function has dimension {f.dim}")


def check_functional_rs(f: LogConcaveFn, c: CoverFamily, rtol: float = 1e-8) -> InequalityReport:
    _cover_dim_check(f, c)
    if c.base != IndexSet.full(f.dim):
        raise InvalidCover("the cover must be a cover of [n]")
    dec = is_one_reducible(c)
    if dec is None:
        raise NotReducible("the cover is not 1-reducible")
    const = ConstantTable.liakopoulos(f.dim, c)
    total = integrate_detail(f, rtol=rtol)
    parts = [integrate_detail(f, x, rtol=rtol) for x in c.members]
    exact = total.exact and all(p.exact for p in parts) and isinstance(f.sup_norm(), Fraction)
    w = {"cover": c, "groups": [list(g) for g in dec.groups]}
    if exact:
        lhs = f.sup_norm() ** (c.m - c.s) * total.value**c.s
        rhs = const * math.prod((p.value for p in parts), start=Fraction(1))
        return _finish("functional_rs", lhs, rhs, const, True, witnesses=w)
    lhs = float(f.sup_norm()) ** (c.m - c.s) * float(total.value) ** c.s
    rhs = float(const) * math.prod(float(p.value) for p in parts)
    rep = _finish("functional_rs", lhs, rhs, const, False, witnesses=w)
    rep.tolerance = _numeric_tol(total, *parts)
    return rep


def check_cor_marginals(f: LogConcaveFn, c: CoverFamily, effort: int = 1, rtol: float = 1e-8) -> InequalityReport:
    _cover_dim_check(f, c)
    if len(c.base) >= f.dim:
        raise InvalidCover("the base set must be a proper subset of [n]")
    comp, dec = complement_reducibility(c)
    if dec is None:
        raise NotReducible("the complementary cover is not a 1-reducible cover")
    const = ConstantTable.sharp_local(c)
    anchor, top, top_exact = max_marginal(f, c.base, effort=effort)
    total = integrate_detail(f, rtol=rtol)
    parts = [integrate_detail(f, x.complement(), rtol=rtol) for x in c.members]
    exact = top_exact and total.exact and all(p.exact for p in parts)
    w = {"cover": c, "max_marginal_anchor": list(anchor)}
    if exact:
        lhs = top**c.s * total.value ** (c.m - c.s)
        rhs = const * math.prod((p.value for p in parts), start=Fraction(1))
        return _finish("marginal_sharp_local", lhs, rhs, const, True, witnesses=w)
    lhs = float(top) ** c.s * float(total.value) ** (c.m - c.s)
    rhs = float(const) * math.prod(float(p.value) for p in parts)
    rep = _finish("marginal_sharp_local", lhs, rhs, const, False, witnesses=w)
    rep.tolerance = _numeric_tol(total, *parts)
    return rep


def check_min_prod(fs: Sequence[LogConcaveFn], rtol: float = 1e-9) -> InequalityReport:
    for f in fs:
        if float(f.sup_norm()) > 1:
            raise HeightExceedsOne("every function must be bounded by 1")
    lhs = min_product_integral(fs, rtol=rtol)
    parts = [integrate_detail(f, rtol=rtol) for f in fs]
    n_ind = sum(1 for f in fs if isinstance(f, Indicator) and f.height == 1)
    w = {"unit_indicators": n_ind, "equality_predicted": n_ind >= len(fs) - 1}
    if lhs.exact and all(p.exact for p in parts):
        rhs = math.prod((p.value for p in parts), start=Fraction(1))
        return _finish("min_product", lhs.value, rhs, None, True, witnesses=w)
    rhs = math.prod(float(p.value) for p in parts)
    rep = _finish("min_product", float(lhs.value), rhs, None, False, witnesses=w)
    rep.tolerance = _numeric_tol(lhs, *parts)
    return rep


def check_operator_lower_bound(fs: Sequence[LogConcaveFn], samples: int = 400_000, seed=0) -> InequalityReport:
    if len(fs) < 2:
        raise ValueError("need at least two functions")
    efs = embed_factors(fs)
    conv = embedded_integral(efs, samples=samples, seed=seed)
    dims = [f.dim for f in fs]
    const = ConstantTable.blocks(dims)
    parts = [f.integral() for f in fs]
    heights = [f.sup_norm() for f in fs]
    w = {"method": conv.method, "block_dims": dims}
    if conv.exact and all(p.exact for p in parts) and all(isinstance(h, Fraction) for h in heights):
        lhs = max(heights) ** (len(fs) - 1) * conv.value
        rhs = const * math.prod((p.value for p in parts), start=Fraction(1))
        return _finish("operator_lower_bound", lhs, rhs, const, True, witnesses=w)
    lhs = float(max(heights)) ** (len(fs) - 1) * float(conv.value)
    rhs = float(const) * math.prod(float(p.value) for p in parts)
    rep = _finish("operator_lower_bound", lhs, rhs, const, False, witnesses=w)
    rep.tolerance = _numeric_tol(conv, *parts)
    if conv.method == "monte-carlo":
        w["stderr"] = conv.error
    return rep


# ---------------------------------------------------------------------------
# constant comparisons


@dataclass(frozen=True)
class ConstantComparison:
    n: int
    p: int | None
    ratio: Fraction
    bound: Fraction | None
    power: int
    bound_power: Fraction | None
    holds: bool
    alternative_ratio: Fraction | None = None
    alternative_holds: bool | None = None
    note: str = ""

    @property
    def bound_float(self) -> float | None:
        lg = self.log10_bound
        if lg is None or lg > 300:
            return None
        return 10.0**lg

    @property
    def log10_bound(self) -> float | None:
        if self.bound_power is None:
            return None
        return _log_fraction(self.bound_power) / self.power / math.log(10)

    @property
    def log10_ratio(self) -> float:
        return _log_fraction(self.ratio) / math.log(10)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "ratio": format_fraction(self.ratio),
            "bound": None if self.bound is None else format_fraction(self.bound),
            "power": self.power,
            "bound_float": self.bound_float,
            "log10_ratio": self.log10_ratio,
            "log10_bound": self.log10_bound,
            "holds": self.holds,
            "alternative_ratio": None if self.alternative_ratio is None else format_fraction(self.alternative_ratio),
            "alternative_holds": self.alternative_holds,
            "note": self.note,
        }


def _log_fraction(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def _power_product(terms) -> Fraction | None:
    """``prod base**(num/den)`` when every exponent is an integer, else None."""
    out = Fraction(1)
    for base, num, den in terms:
        if num % den:
            return None
        out *= Fraction(base) ** (num // den)
    return out


def unconditional_constant_ratio(n: int, p: int) -> ConstantComparison:
    """Unconditional-improvement constant over the original one, for ``|sigma| = p``."""
    if not (2 <= p and 4 * p <= n):
        raise OutOfRange(f"need 2 <= p <= n/4, got n={n}, p={p}")
    F = ConstantTable.factorial
    ratio = Fraction(F(p) * F(n * (p - 1)), n**p * F(p - 1) ** (p - 1))
    # fourth power of n^(n(p-2)/4) (p-1)^((n-4p)(p-1)/2) (p-1)^((p-1)(p+2))
    bound4 = Fraction(n ** (n * (p - 2)) * (p - 1) ** (2 * (n - 4 * p) * (p - 1) + 4 * (p - 1) * (p + 2)))
    holds = ratio**4 >= bound4
    bound = _power_product([(n, n * (p - 2), 4), (p - 1, (n - 4 * p) * (p - 1), 2), (p - 1, (p - 1) * (p + 2), 1)])
    alt = ratio / F(p - 1)
    return ConstantComparison(n, p, ratio, bound, 4, bound4, holds, alt, alt**4 >= bound4,
                              "alternative ratio uses (p-1)!^p in the original constant")


def codim_one_constant_ratio(n: int) -> ConstantComparison:
    """The same quotient in the case ``|sigma| = n - 1``; ``n = 4`` is tabulated on its own."""
    F = ConstantTable.factorial
    if n < 4:
        raise OutOfRange(f"need n >= 4, got {n}")
    ratio = Fraction(F(n - 1) * F(n * (n - 2)), n ** (n - 1) * F(n - 2) ** (n - 2))
    if n == 4:
        return ConstantComparison(n, 3, ratio, None, 1, None, ratio > 1, note="special case, no bound")
    bound16 = Fraction(2 ** (16 * (n - 5)) * (n - 2) ** (16 * (n - 4)) * (n * (n - 2)) ** (n * (n - 2)))
    bound = _power_product([(2, n - 5, 1), (n - 2, n - 4, 1), (n * (n - 2), n * (n - 2), 16)])
    return ConstantComparison(n, n - 1, ratio, bound, 16, bound16, ratio**16 >= bound16)


# interface names used by external drivers
check_local_meyer_abbc = check_local_meyer
check_aagjv_s1 = check_two_block_section
check_abbc_original = check_local_meyer_original
constant_ratio_prop41 = unconditional_constant_ratio
constant_ratio_prop42 = codim_one_constant_ratio
