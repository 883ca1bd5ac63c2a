"""Tabulate how much the unconditional constant improves on the general one."""

import sys

from coverineq.inequalities import codim_one_constant_ratio, unconditional_constant_ratio

nmax = int(sys.argv[1]) if len(sys.argv) > 1 else 24

print("n  p   log10(ratio)  log10(bound)  holds")
print(f"4  3   {codim_one_constant_ratio(4).log10_ratio:12.3f}  {'-':>12s}  ratio = 945")
for n in range(8, nmax + 1, 4):
    for p in range(2, n // 4 + 1):
        r = unconditional_constant_ratio(n, p)
        print(f"{n:<2d} {p:<3d} {r.log10_ratio:12.3f}  {r.log10_bound:12.3f}  {r.holds}")
for n in range(5, nmax + 1):
    r = codim_one_constant_ratio(n)
    print(f"{n:<2d} {n - 1:<3d} {r.log10_ratio:12.3f}  {r.log10_bound:12.3f}  {r.holds}")
