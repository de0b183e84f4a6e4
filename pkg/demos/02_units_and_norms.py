"""Fundamental units, their square classes c = sf(t + 2), and norm equations a^2 - d b^2 = 4N."""

from iwasawa2 import c_invariant, fundamental_unit, make_field, norm_equation, sqrt_unit_in_K1

for d in (165, 1045, 7205, 2090):
    K = make_field(d)
    e = fundamental_unit(K)
    line = f"d = {d:>5}  eps = ({e.t} + {e.u} sqrt(d))/2  norm {e.norm:+d}"
    if e.norm == 1:
        c = c_invariant(K)
        line += f"  c = {c.square_class.rep}  sqrt(eps) in K(sqrt 2): {sqrt_unit_in_K1(c, d)}"
    print(line)

K = make_field(7205)
for N in (5, -5, 11, 131):
    print(f"a^2 - 7205 b^2 = 4*{N}: {norm_equation(K, N)}")
