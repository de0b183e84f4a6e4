"""Class groups of real quadratic fields and the first layer of their cyclotomic Z_2-extension."""

from .arith import SquareClass, factorize, gf2_rank, is_prime, kronecker, squarefree_part
from .forms import ClassGroup2, IndefiniteForm, is_principal, narrow_class_group, wide_class_group
from .genus import genus_rank, redei_S1, redei_S2
from .quadfield import FundUnit, PrimeTriple, QuadField, classify_triple, fundamental_unit, make_field, norm_equation
from .tower import (
    CInvariant,
    TowerReport,
    Verdict,
    build_tower_report,
    c_invariant,
    fukuda_stabilize,
    hasse_unit_index,
    kuroda_A1,
    sqrt_unit_in_K1,
)

__version__ = "0.1.0"
