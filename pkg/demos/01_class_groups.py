"""Wide and narrow class groups of K = Q(sqrt(1045)) and F = Q(sqrt(2090)) by reduction of forms."""

from iwasawa2 import genus_rank, is_principal, make_field, narrow_class_group, wide_class_group

for d in (1045, 2090):
    K = make_field(d)
    A = wide_class_group(K)
    N = narrow_class_group(K.disc)
    print(f"d = {d}  disc = {K.disc}")
    print(f"  wide class group   {list(A.invariant_factors)}  (order {A.order}, 2-rank {A.rank})")
    print(f"  narrow class group {list(N.invariant_factors)}  (order {N.order})")
    print(f"  genus-theory 2-rank {genus_rank(K)}")
    for ell in K.ramified:
        print(f"  prime over {ell} principal: {is_principal(K, ell)}")
