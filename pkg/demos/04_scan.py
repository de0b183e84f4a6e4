"""Scan every triple with primes up to 120 and tally layer-one behaviour per pattern and tag."""

from collections import Counter

from iwasawa2.cli import ScanConfig, run_scan

reports = run_scan(ScanConfig(family="all", prime_bound=120))
tally = Counter((r.triple.pattern, r.theorem_tag, r.stable) for r in reports)
print(f"{len(reports)} triples, {sum(bool(r.violations) for r in reports)} with violations")
for (pattern, tag, stable), n in sorted(tally.items()):
    print(f"  {pattern}  {tag:<14} stable={stable!s:<5} {n}")
