"""Full layer-one reports for a few triples of each pattern."""

from iwasawa2 import build_tower_report

for primes in ((5, 3, 11), (5, 11, 19), (5, 11, 131), (53, 11, 43), (5, 7, 3), (13, 43, 179)):
    r = build_tower_report(primes)
    print(
        f"{primes}: A0 {list(r.A0_factors)} AF {list(r.AF_factors)} Q {r.Q_K1} A1 {r.A1_order}"
        f"  stable {r.stable}  X_inf {r.Xinf}  tag {r.theorem_tag}"
    )
