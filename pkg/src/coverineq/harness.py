"""Randomized and structured exploration of the sharp local inequality.

Trials are independent: trial ``t`` draws everything from
``np.random.default_rng([seed, t])``, so results do not depend on scheduling
and a parallel run reproduces a serial one byte for byte.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .covers import (
    CoverFamily,
    IndexSet,
    as_index_set,
    induced_one_cover,
    random_cover,
    set_partitions,
    validate_cover,
)
from .errors import GenerationFailed, UnsupportedId
from .inequalities import (
    InequalityReport,
    _ser,
    check_two_block_section,
    check_conjecture,
    check_functional_rs,
    check_lemma_conv_blocks,
    check_liakopoulos,
    check_min_prod,
    check_operator_lower_bound,
    check_thm_sharp_local,
    check_cor_marginals,
    complement_reducibility,
)
from .logconcave import ExpConcavePL, Indicator
from .polytope import (
    RationalPolytope,
    conv_of_blocks,
    cross_polytope,
    cube,
    hanner,
    mc_volume,
    product_on,
    random_polytope,
    section_volume,
    _random_body,
)
from .rational import format_fraction

BODY_KINDS = ("general", "unconditional", "product", "unconditional_product", "hanner")


@dataclass
class SearchConfig:
    trials: int = 100
    dims: tuple[int, int] = (3, 4)
    m_range: tuple[int, int] = (2, 4)
    s_range: tuple[int, int] = (1, 3)
    body_kinds: tuple[str, ...] = ("unconditional",)
    seed: int = 0
    tolerance: float = 1e-6
    effort: int = 1
    near_tight: float = 1.05

    def __post_init__(self):
        self.dims = tuple(self.dims)
        self.m_range = tuple(self.m_range)
        self.s_range = tuple(self.s_range)
        if isinstance(self.body_kinds, str):
            self.body_kinds = (self.body_kinds,)
        self.body_kinds = tuple(self.body_kinds)
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        lo, hi = self.dims
        if not 2 <= lo <= hi <= 6:
            raise ValueError("dims must lie within 2..6")
        if self.m_range[0] < 2 or self.m_range[0] > self.m_range[1]:
            raise ValueError("m_range must satisfy 2 <= m_min <= m_max")
        if self.s_range[0] < 1 or self.s_range[0] > self.s_range[1]:
            raise ValueError("s_range must satisfy 1 <= s_min <= s_max")
        for k in self.body_kinds:
            if k not in BODY_KINDS:
                raise ValueError(f"unknown body kind {k!r}")

    @classmethod
    def from_json(cls, obj: dict) -> "SearchConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(obj) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**obj)

    def to_json(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


@dataclass
class SearchSummary:
    trials: int
    completed: int = 0
    exact_count: int = 0
    numeric_count: int = 0
    theorem_count: int = 0
    conjecture_count: int = 0
    trivial_count: int = 0
    min_ratio: Fraction | float | None = None
    min_witness: dict | None = None
    min_ratio_conjecture: Fraction | float | None = None
    counterexamples: list = field(default_factory=list)
    quarantined: list = field(default_factory=list)
    near_tight: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        def num(x):
            if x is None:
                return None
            if isinstance(x, Fraction):
                return format_fraction(x)
            return repr(float(x))

        return {
            "trials": self.trials,
            "completed": self.completed,
            "exact_count": self.exact_count,
            "numeric_count": self.numeric_count,
            "theorem_count": self.theorem_count,
            "conjecture_count": self.conjecture_count,
            "trivial_count": self.trivial_count,
            "min_ratio": num(self.min_ratio),
            "min_ratio_conjecture": num(self.min_ratio_conjecture),
            "min_witness": self.min_witness,
            "counterexamples": self.counterexamples,
            "quarantined": self.quarantined,
            "near_tight": self.near_tight,
            "failures": self.failures,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# trial generation


def _random_proper_subset(n: int, rng: np.random.Generator) -> IndexSet:
    """Uniform proper subset with at least two elements when n allows it."""
    min_size = 2 if n >= 3 else 1
    while True:
        bits = int(rng.integers(1, (1 << n) - 1))
        if bin(bits).count("1") >= min_size:
            return IndexSet(bits, n)


def _sub_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**31 - 1))


def _trial_body(kind: str, n: int, sigma: IndexSet, rng: np.random.Generator) -> RationalPolytope:
    seed = _sub_seed(rng)
    if kind == "hanner":
        return hanner(n, sigma)
    if kind == "product":
        return random_polytope(n, "product", seed, sigma=sigma, factor_kind="general")
    if kind == "unconditional_product":
        return random_polytope(n, "product", seed, sigma=sigma, factor_kind="unconditional")
    return random_polytope(n, kind, seed)


def _draw_cover(n: int, sigma: IndexSet, cfg: SearchConfig, rng) -> CoverFamily:
    # nonempty members force m <= s |sigma|; s < m keeps the complement nonempty
    p = len(sigma)
    pairs = [(m, s) for m in range(cfg.m_range[0], cfg.m_range[1] + 1)
             for s in range(cfg.s_range[0], cfg.s_range[1] + 1) if s < m <= s * p]
    if not pairs:
        m = cfg.m_range[0]
        return validate_cover([sigma] * m, sigma)
    m, s = pairs[int(rng.integers(0, len(pairs)))]
    return random_cover(n, sigma, m, s, seed=_sub_seed(rng), retries=1000)


def run_trial(cfg: SearchConfig, t: int) -> dict:
    rng = np.random.default_rng([cfg.seed, t])
    n = int(rng.integers(cfg.dims[0], cfg.dims[1] + 1))
    kind = cfg.body_kinds[int(rng.integers(0, len(cfg.body_kinds)))]
    sigma = _random_proper_subset(n, rng)
    record = {"trial": t, "n": n, "kind": kind, "sigma": list(sigma)}
    try:
        cover = _draw_cover(n, sigma, cfg, rng)
        K = _trial_body(kind, n, sigma, rng)
    except GenerationFailed as exc:
        record["error"] = str(exc)
        return record
    rep = check_conjecture(K, cover, effort=cfg.effort)
    quarantined = False
    err = max(rep.tolerance, cfg.tolerance)
    if not rep.exact and rep.ratio < 1 - 3 * err:
        quarantined = True
        rep = check_conjecture(K, cover, effort=2 * cfg.effort)
    record.update({
        "body": K.to_json(),
        "cover": cover.to_json(),
        "m": cover.m,
        "s": cover.s,
        "path": "exact" if rep.exact else "numeric",
        "regime": rep.witnesses["regime"],
        "ratio": format_fraction(rep.ratio) if rep.exact else repr(float(rep.ratio)),
        "anchor": [format_fraction(a) for a in rep.witnesses["max_section_anchor"]],
        "quarantined": quarantined,
        "tolerance": rep.tolerance,
    })
    return record


def _ratio_value(rec: dict):
    r = rec["ratio"]
    return Fraction(r) if rec["path"] == "exact" else float(r)


def summarize(cfg: SearchConfig, records: Iterable[dict]) -> SearchSummary:
    summ = SearchSummary(trials=cfg.trials)
    for rec in records:
        if "error" in rec:
            summ.failures.append({"trial": rec["trial"], "error": rec["error"]})
            continue
        summ.completed += 1
        r = _ratio_value(rec)
        if rec["path"] == "exact":
            summ.exact_count += 1
        else:
            summ.numeric_count += 1
        if rec["regime"] == "theorem":
            summ.theorem_count += 1
        elif rec["regime"] == "trivial":
            summ.trivial_count += 1
        else:
            summ.conjecture_count += 1
            if summ.min_ratio_conjecture is None or r < summ.min_ratio_conjecture:
                summ.min_ratio_conjecture = r
        witness = {k: rec[k] for k in ("trial", "body", "cover", "anchor", "ratio", "path", "regime")}
        if summ.min_ratio is None or r < summ.min_ratio:
            summ.min_ratio = r
            summ.min_witness = witness
        tol = 0 if rec["path"] == "exact" else max(rec["tolerance"], cfg.tolerance)
        if r < 1 - tol:
            summ.counterexamples.append(witness)
        if rec["quarantined"]:
            summ.quarantined.append(rec["trial"])
        if r < cfg.near_tight:
            summ.near_tight.append({"trial": rec["trial"], "ratio": rec["ratio"], "kind": rec["kind"]})
    return summ


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("COVERINEQ_THREADS", "1")))
    except ValueError:
        return 1


def iter_trials(cfg: SearchConfig) -> Iterable[dict]:
    workers = _threads()
    if workers == 1:
        for t in range(cfg.trials):
            yield run_trial(cfg, t)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(run_trial, itertools.repeat(cfg, cfg.trials), range(cfg.trials), chunksize=8)


def search_conjecture(cfg: SearchConfig, log=None) -> SearchSummary:
    """Run all trials; ``log`` (a callable) receives each trial record in order."""
    records = []
    for rec in iter_trials(cfg):
        if log is not None:
            log(rec)
        records.append(rec)
    return summarize(cfg, records)


# ---------------------------------------------------------------------------
# structured witnesses


def verify_final_proposition(n: int, sigma, cover: CoverFamily, seed=0,
                             C: RationalPolytope | None = None, W: RationalPolytope | None = None) -> InequalityReport:
    """Unconditional product ``C x W`` (C on sigma, W on the rest) under the conjectured bound."""
    sigma = as_index_set(sigma, n)
    rng = np.random.default_rng(seed)
    if C is None:
        C = _random_body(len(sigma), "unconditional", rng)
    if W is None:
        W = _random_body(n - len(sigma), "unconditional", rng)
    K = product_on(C, W, sigma, n)
    rep = check_conjecture(K, cover)
    rep.id = "product_conjecture"
    anchors = [tuple(Fraction(int(rng.integers(-4, 5)), 8) * v for v in C.vertices[0])]
    anchors.append(tuple(Fraction(0) for _ in sigma))
    vols = {section_volume(K, sigma, a) for a in anchors if C.contains(a)}
    rep.witnesses["constant_sections"] = len(vols) == 1
    return rep


def _block_bodies(dims: Sequence[int], style: str) -> list[RationalPolytope]:
    if style == "cube":
        return [cube(d) for d in dims]
    return [cross_polytope(d) for d in dims]


def _blocks_in_coords(blocks: Sequence[IndexSet], style: str) -> RationalPolytope:
    """Conv-of-blocks body with block ``j`` placed on the coordinates of ``blocks[j]``."""
    Ks = _block_bodies([len(b) for b in blocks], style)
    return conv_of_blocks([(K, None) for K in Ks], coords=[list(b) for b in blocks])


def hanner_cover_catalog(sigma: IndexSet) -> list[CoverFamily]:
    """Covers of sigma whose complements are one or two partitions with at least two blocks."""
    elems = list(sigma)
    n = sigma.n
    parts = [p for p in set_partitions(elems) if len(p) >= 2]
    out = []
    seen = set()
    for k in (1, 2):
        for combo in itertools.combinations_with_replacement(range(len(parts)), k):
            members = []
            for i in combo:
                members += [sigma - IndexSet.of(n, b) for b in parts[i]]
            key = tuple(sorted(x.bits for x in members))
            if key in seen:
                continue
            seen.add(key)
            out.append(validate_cover(members, sigma))
    return out


def equality_witness_suite() -> list[InequalityReport]:
    reports = []
    # Hanner bodies under the sharp local inequality
    for n in (2, 3, 4):
        for bits in range(1, (1 << n) - 1):
            sigma = IndexSet(bits, n)
            for c in hanner_cover_catalog(sigma)[:6]:
                rep = check_thm_sharp_local(hanner(n, sigma), c)
                rep.witnesses["body"] = f"hanner({n},{sorted(sigma)})"
                reports.append(rep)
    # conv-of-blocks bodies over the induced partition, functional form
    fixtures = [
        (3, [[1], [2, 3]]),
        (3, [[1], [2], [3], [1, 2, 3]]),
        (4, [[1, 2], [3, 4], [1, 3], [2, 4]]),
        (4, [[1], [2, 3, 4], [1, 2], [3, 4]]),
    ]
    for n, members in fixtures:
        c = validate_cover(members, list(range(1, n + 1)), n)
        blocks = induced_one_cover(c)
        for style in ("cross", "cube"):
            C = _blocks_in_coords(blocks, style)
            rep = check_functional_rs(Indicator(C), c)
            rep.witnesses["body"] = f"conv_of_blocks({style}, {[list(b) for b in blocks]})"
            reports.append(rep)
    # the Loomis-Whitney cover is not 1-reducible: section form only
    lw = validate_cover([[2, 3], [1, 3], [1, 2]], [1, 2, 3])
    rep = check_liakopoulos(_blocks_in_coords(induced_one_cover(lw), "cross"), lw)
    rep.witnesses["body"] = "conv_of_blocks(cross, [[1],[2],[3]])"
    reports.append(rep)
    # product witness: conv-of-blocks on sigma times a body on the rest
    for n, base, members in [(4, [1, 2, 3], [[1, 2], [3], [2, 3], [1]]),
                             (4, [1, 2, 3], [[1, 2], [2, 3], [1, 3]]),
                             (3, [1, 2], [[1], [2]])]:
        sigma = IndexSet.of(n, base)
        c = validate_cover(members, sigma)
        blocks = induced_one_cover(c)
        Ks = _block_bodies([len(b) for b in blocks], "cross")
        local = {j: i + 1 for i, j in enumerate(sigma)}
        Cs = conv_of_blocks([(K, None) for K in Ks], coords=[[local[j] for j in b] for b in blocks])
        K = product_on(Cs, cube(n - len(sigma)), sigma, n)
        rep = check_thm_sharp_local(K, c)
        rep.witnesses["body"] = "conv_of_blocks(cross) x cube"
        reports.append(rep)
    # two-block section case on a Hanner body
    rep = check_two_block_section(hanner(3, [1, 2]), validate_cover([[1], [2]], IndexSet.of(3, [1, 2])))
    reports.append(rep)
    # lemma-level equality cases
    seg = RationalPolytope(1, [(0,), (1,)])
    reports.append(check_lemma_conv_blocks([(seg, None), (cube(2, 0, 1), None)]))
    reports.append(check_lemma_conv_blocks([(cross_polytope(2), [Fraction(1, 3), 0]), (seg, [Fraction(1, 2)])]))
    reports.append(check_operator_lower_bound([Indicator(seg), Indicator(cube(2, 0, 1))]))
    reports.append(check_operator_lower_bound([Indicator(cross_polytope(2), 2), Indicator(seg, 2)]))
    reports.append(check_min_prod([Indicator(seg), Indicator(cube(2, 0, 1))]))
    reports.append(check_cor_marginals(Indicator(hanner(3, [1, 2])), validate_cover([[1], [2]], IndexSet.of(3, [1, 2]))))
    return reports


# ---------------------------------------------------------------------------
# brute-force oracles


_GRID_OFFSET = (math.sqrt(5) - 1) / 2


def _grid_volume(P: RationalPolytope, resolution: int, chunk: int = 200) -> float:
    """Grid volume with ``resolution`` cells per axis of the bounding box.

    Sample points sit at an irrational offset inside each cell so that they
    never land on rational facets, which would bias the count by O(h).
    """
    lo, hi = (np.array([float(c) for c in v]) for v in P.bounding_box())
    A, b = P.halfspaces_float
    d = P.dim
    h = (hi - lo) / resolution
    axes = [lo[i] + h[i] * (np.arange(resolution) + _GRID_OFFSET) for i in range(d)]
    if d == 1:
        pts = axes[0][:, None]
        return float(np.count_nonzero(np.all(pts @ A.T <= b, axis=1))) * float(np.prod(h))
    count = 0
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, d - 1)
    for start in range(0, resolution, chunk):
        first = axes[0][start:start + chunk]
        pts = np.concatenate([np.repeat(first, len(rest))[:, None], np.tile(rest, (len(first), 1))], axis=1)
        count += int(np.count_nonzero(np.all(pts @ A.T <= b, axis=1)))
    return count * float(np.prod(h))


@dataclass
class OracleReport:
    id: str
    exact: dict
    oracle: dict
    max_rel_discrepancy: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_rel_discrepancy < self.threshold

    def to_json(self) -> dict:
        return {"id": self.id, "exact": _ser(self.exact), "oracle": _ser(self.oracle),
                "max_rel_discrepancy": self.max_rel_discrepancy, "threshold": self.threshold,
                "passed": self.passed}


def brute_oracle_small(rep_id: str, resolution: int = 200, seed=0) -> OracleReport:
    if rep_id == "liakopoulos":
        K = cross_polytope(3)
        c = validate_cover([[1], [2, 3]], [1, 2, 3])
        rep = check_liakopoulos(K, c)
        from .polytope import central_section

        vol = _grid_volume(K, resolution)
        secs = [_grid_volume(central_section(K, x.complement()), resolution) for x in c.members]
        lhs = vol**c.s
        rhs = float(rep.constant) * math.prod(secs)
        dis = max(abs(lhs - float(rep.lhs)) / float(rep.lhs), abs(rhs - float(rep.rhs)) / float(rep.rhs))
        return OracleReport(rep_id, {"lhs": rep.lhs, "rhs": rep.rhs}, {"lhs": lhs, "rhs": rhs}, dis, 0.01)
    if rep_id == "min_product":
        # min(e^-x, e^-y) on the positive quadrant, truncated at L
        L = 25.0
        h = 1.0 / resolution
        xs = (np.arange(int(L / h)) + 0.5) * h
        ex = np.exp(-xs)
        total = 0.0
        for start in range(0, len(xs), 500):
            block = np.minimum(ex[start:start + 500, None], ex[None, :])
            total += float(block.sum())
        lhs = total * h * h
        return OracleReport(rep_id, {"lhs": 2}, {"lhs": lhs}, abs(lhs - 2) / 2, 1e-3)
    if rep_id == "volume":
        worst = 0.0
        oracle = {}
        exact = {}
        for i in range(10):
            P = random_polytope(3 + i % 2, "general" if i % 2 else "unconditional", seed + i)
            est, se = mc_volume(P, 200_000, seed + 100 + i)
            exact[i] = P.volume
            oracle[i] = est
            worst = max(worst, abs(est - float(P.volume)) / se / 3 if se > 0 else 0.0)
        # expressed in units of three standard errors
        return OracleReport(rep_id, exact, oracle, worst, 1.0)
    raise UnsupportedId(rep_id)


# ---------------------------------------------------------------------------
# fixed verification suites


def _full_covers(n: int) -> list[CoverFamily]:
    full = list(range(1, n + 1))
    out = [validate_cover([[j for j in full if j != i] for i in full], full, n),
           validate_cover([[1], full[1:]], full, n),
           validate_cover([[j] for j in full], full, n)]
    return out


def _local_covers(sigma: IndexSet) -> list[CoverFamily]:
    covers = [validate_cover([[j] for j in sigma], sigma)]
    if len(sigma) >= 2:
        covers.extend(hanner_cover_catalog(sigma)[:3])
    return covers


def core_bodies() -> list[tuple[str, RationalPolytope]]:
    simplex_at_origin = RationalPolytope(3, [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    return [
        ("cube(3)", cube(3)),
        ("cross(3)", cross_polytope(3)),
        ("simplex(3)", simplex_at_origin),
        ("hanner(3,{1,2})", hanner(3, [1, 2])),
        ("hanner(4,{1,3})", hanner(4, [1, 3])),
        ("general(3,seed=0)", random_polytope(3, "general", 0)),
        ("unconditional(4,seed=1)", random_polytope(4, "unconditional", 1)),
    ]


def core_suite() -> list[InequalityReport]:
    from .inequalities import (
        check_local_meyer_original,
        check_bollobas_thomason,
        check_local_bt,
        check_local_meyer,
        check_unconditional_improved,
    )

    reports = []

    def add(rep, name):
        rep.witnesses["body"] = name
        reports.append(rep)

    for name, K in core_bodies():
        n = K.dim
        for c in _full_covers(n):
            add(check_bollobas_thomason(K, c), name)
            add(check_liakopoulos(K, c), name)
        for bits in range(1, (1 << n) - 1):
            sigma = IndexSet(bits, n)
            for c in _local_covers(sigma):
                add(check_local_bt(K, c), name)
                add(check_local_meyer(K, c), name)
                add(check_local_meyer_original(K, c), name)
                if c.m == 2 and c.s == 1:
                    add(check_two_block_section(K, c), name)
                if complement_reducibility(c)[1] is not None:
                    add(check_thm_sharp_local(K, c), name)
            if K.is_unconditional():
                add(check_unconditional_improved(K, sigma), name)
    return reports


def functional_suite() -> list[InequalityReport]:
    from .logconcave import Gaussian

    reports = []
    seg = RationalPolytope(1, [(0,), (1,)])
    c2 = validate_cover([[1], [2]], [1, 2])
    c3 = validate_cover([[1], [2, 3]], [1, 2, 3])
    local = validate_cover([[1], [2]], IndexSet.of(3, [1, 2]))
    expo = ExpConcavePL(1, [[-1]], [0], [[-1]], [0])
    tent = ExpConcavePL(2, [[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1],
                        [[1, 0], [-1, 0], [0, 1], [0, -1]], [0, 0, 0, 0])
    reports.append(check_functional_rs(Indicator(cube(2)), c2))
    reports.append(check_functional_rs(Gaussian([0, 0], [2, 2]), c2))
    reports.append(check_functional_rs(Gaussian([0.2, -0.1, 0.3], [1, 2, 3], 0.5), c3))
    reports.append(check_functional_rs(tent, c2))
    reports.append(check_functional_rs(Indicator(cross_polytope(3)), c3))
    reports.append(check_cor_marginals(Gaussian([0, 0, 0], [2, 2, 2]), local))
    reports.append(check_cor_marginals(Indicator(hanner(3, [1, 2])), local))
    reports.append(check_cor_marginals(Indicator(cube(3)), local))
    reports.append(check_operator_lower_bound([Indicator(seg), Indicator(cube(2, 0, 1))]))
    reports.append(check_operator_lower_bound([Indicator(seg), Indicator(seg, Fraction(1, 2))]))
    reports.append(check_operator_lower_bound([Gaussian([0], [1]), Indicator(seg)], samples=200_000))
    reports.append(check_min_prod([Indicator(seg), Indicator(seg)]))
    reports.append(check_min_prod([Indicator(seg), expo]))
    reports.append(check_min_prod([expo, expo]))
    reports.append(check_min_prod([Gaussian([0, 0], [1, 1]), expo]))
    return reports
