"""Print the exact equality cases: every ratio below is the rational 1/1."""

from coverineq.harness import equality_witness_suite
from coverineq.rational import format_fraction

for rep in equality_witness_suite():
    body = rep.witnesses.get("body", "-")
    print(f"{rep.id:24s} {str(body):28s} lhs={format_fraction(rep.lhs):>10s} ratio={format_fraction(rep.ratio)}")
