"""Small conjecture sweep over every body family, printing the tightest trials."""

import json
from fractions import Fraction

from coverineq.harness import SearchConfig, search_conjecture

cfg = SearchConfig(trials=120, dims=(2, 4), seed=1,
                   body_kinds=("unconditional", "product", "unconditional_product", "hanner", "general"))
summary = search_conjecture(cfg)
out = summary.to_json()
for key in ("completed", "exact_count", "numeric_count", "theorem_count", "conjecture_count",
            "trivial_count", "min_ratio", "min_ratio_conjecture"):
    print(f"{key:22s} {out[key]}")
print("counterexamples:", len(out["counterexamples"]))
tight = sorted(out["near_tight"], key=lambda r: Fraction(r["ratio"]))
print(json.dumps(tight[:8], indent=1))
