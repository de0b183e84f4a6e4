"""First layer of the cyclotomic Z_2-extension of Q(sqrt(p1 q1 q2)).

K_1 = Q(sqrt 2, sqrt d) is biquadratic with quadratic subfields K = Q(sqrt d),
F = Q(sqrt 2d) and Q(sqrt 2). Its 2-class number follows from the class
number formula for real biquadratic fields once the unit index is known, and
the unit index is decided exactly through c-invariants: for a unit eps of
norm +1 and trace t, (1 + eps)^2 = (t + 2) eps, so K(sqrt eps) = K(sqrt(t + 2)).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

from . import forms, genus
from .arith import SquareClass, squarefree_part
from .quadfield import PrimeTriple, classify_triple, fundamental_unit, make_field, norm_equation

UNKNOWN = "unknown"
UNDETERMINED = "undetermined"

XINF_Z2 = "Z/2"
XINF_M2 = "Z/2^m, m≥2"
XINF_M3 = "Z/2^m, m≥3"
XINF_UNKNOWN = "unknown beyond layer 1"


class HypothesisError(ValueError):
    """The triple does not satisfy the hypotheses of the statement being checked."""


@dataclass(frozen=True)
class CInvariant:
    unit_id: str
    square_class: SquareClass


def c_invariant(K, unit_id: str = "eps") -> CInvariant:
    """Square class c with K(sqrt eps) = K(sqrt c) for the fundamental unit eps of K."""
    e = fundamental_unit(K)
    if e.norm != 1:
        raise ValueError(f"no real square-root datum: fundamental unit of Q(sqrt {K.d}) has norm -1")
    # odd-exponent primes of t +- 2 divide 2d, since (t + 2)(t - 2) = d u^2
    support = sorted({2, *K.ramified})
    c = squarefree_part(e.t + 2, support=support)
    c_minus = squarefree_part(e.t - 2, support=support)
    if c * c_minus != squarefree_part(K.d):
        raise ArithmeticError(f"c-invariant consistency fails for d={K.d}")
    return CInvariant(unit_id, c)


def _rep(c) -> int:
    if isinstance(c, CInvariant):
        return c.square_class.rep
    if isinstance(c, SquareClass):
        return c.rep
    return squarefree_part(c).rep


def sqrt_unit_in_K1(c, d: int) -> bool:
    """Whether sqrt(c) lies in Q(sqrt 2, sqrt d), i.e. c is in the classes {1, 2, d, 2d}."""
    return _rep(c) in {1, 2, squarefree_part(d).rep, squarefree_part(2 * d).rep}


class UnitIndex(NamedTuple):
    Q: int
    system: int
    units: str
    squares: frozenset


_SYSTEMS = {
    frozenset(): (1, "{e1, e2, e3}"),
    frozenset({(1, 0)}): (2, "{sqrt(e1), e2, e3}"),
    frozenset({(0, 1)}): (2, "{e1, sqrt(e2), e3}"),
    frozenset({(1, 1)}): (4, "{sqrt(e1*e2), e2, e3}"),
    frozenset({(1, 0), (0, 1), (1, 1)}): (3, "{sqrt(e1), sqrt(e2), e3}"),
}


def unit_index_from_c(c1, c2, d: int) -> UnitIndex:
    """Hasse unit index of Q(sqrt 2, sqrt d) from the c-invariants of
    eps1 (of Q(sqrt d)) and eps2 (of Q(sqrt 2d)), both of norm +1.

    eps3 = 1 + sqrt 2 has norm -1, so no square root involving it can lie in
    the totally real field; the index counts which of eps1, eps2, eps1*eps2
    become squares.
    """
    r1, r2 = _rep(c1), _rep(c2)
    squares = set()
    if sqrt_unit_in_K1(r1, d):
        squares.add((1, 0))
    if sqrt_unit_in_K1(r2, d):
        squares.add((0, 1))
    if sqrt_unit_in_K1(r1 * r2, d):
        squares.add((1, 1))
    key = frozenset(squares)
    if key not in _SYSTEMS:
        raise ArithmeticError(f"square-root memberships {sorted(squares)} do not form a subgroup")
    system, units = _SYSTEMS[key]
    return UnitIndex(len(squares) + 1, system, units, key)


# --- per-field data (what the cache stores) ------------------------------------


@dataclass(frozen=True)
class FieldData:
    d: int
    disc: int
    h: int
    A_factors: tuple[int, ...]
    narrow_factors: tuple[int, ...]
    prime_class: dict[int, int]
    principal: tuple[int, ...]
    norm_solvable: dict[int, tuple[bool, bool]]
    unit_norm: int
    c: int | None
    genus_rank: int

    @property
    def A_order(self) -> int:
        n = 1
        for f in self.A_factors:
            n *= f
        return n

    def to_dict(self) -> dict:
        out = asdict(self)
        out["prime_class"] = {str(k): v for k, v in self.prime_class.items()}
        out["norm_solvable"] = {str(k): list(v) for k, v in self.norm_solvable.items()}
        out["A_factors"] = list(self.A_factors)
        out["narrow_factors"] = list(self.narrow_factors)
        out["principal"] = list(self.principal)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> FieldData:
        return cls(
            d=data["d"],
            disc=data["disc"],
            h=data["h"],
            A_factors=tuple(data["A_factors"]),
            narrow_factors=tuple(data["narrow_factors"]),
            prime_class={int(k): v for k, v in data["prime_class"].items()},
            principal=tuple(data["principal"]),
            norm_solvable={int(k): tuple(v) for k, v in data["norm_solvable"].items()},
            unit_norm=data["unit_norm"],
            c=data["c"],
            genus_rank=data["genus_rank"],
        )


@lru_cache(maxsize=1 << 15)
def field_data(d: int) -> FieldData:
    K = make_field(d)
    A = forms.wide_class_group(K)
    N = forms.narrow_class_group(K.disc)
    index = {x: i for i, x in enumerate(A.elements)}
    unit = fundamental_unit(K)
    return FieldData(
        d=d,
        disc=K.disc,
        h=A.class_number,
        A_factors=A.invariant_factors,
        narrow_factors=N.invariant_factors,
        prime_class={ell: index[x] for ell, x in A.prime_class.items()},
        principal=tuple(ell for ell in K.ramified if A.prime_class[ell] == A.identity),
        norm_solvable={
            ell: (norm_equation(K, ell) is not None, norm_equation(K, -ell) is not None) for ell in K.ramified
        },
        unit_norm=unit.norm,
        c=c_invariant(K).square_class.rep if unit.norm == 1 else None,
        genus_rank=genus.genus_rank(K),
    )


DataSource = Callable[[int], FieldData]


# --- per-triple quantities -----------------------------------------------------


def _log2(n: int) -> int:
    return n.bit_length() - 1


@dataclass
class _Pieces:
    T: PrimeTriple
    K: FieldData
    F: FieldData
    unit_index: UnitIndex
    A1: int

    @property
    def A0(self) -> int:
        return self.K.A_order

    @property
    def AF(self) -> int:
        return self.F.A_order

    def principal(self, ell: int) -> bool:
        return ell in self.K.principal

    def same_class(self, x: int, y: int) -> bool:
        return self.K.prime_class[x] == self.K.prime_class[y]


def _assemble(T: PrimeTriple, data: DataSource = field_data) -> _Pieces:
    K, F = data(T.d), data(2 * T.d)
    if K.unit_norm != 1 or F.unit_norm != 1:
        raise ArithmeticError(f"fundamental units of Q(sqrt {T.d}) and Q(sqrt {2 * T.d}) must have norm +1")
    ui = unit_index_from_c(K.c, F.c, T.d)
    num = ui.Q * K.A_order * F.A_order
    return _Pieces(T, K, F, ui, num // 4 if num % 4 == 0 else num / 4)


def _as_triple(T) -> PrimeTriple:
    if isinstance(T, PrimeTriple):
        return T
    out = classify_triple(*T)
    if out is None:
        raise HypothesisError(f"{tuple(T)} matches neither congruence pattern")
    return out


def hasse_unit_index(T) -> UnitIndex:
    T = _as_triple(T)
    K, F = make_field(T.d), make_field(2 * T.d)
    return unit_index_from_c(c_invariant(K, "eps1"), c_invariant(F, "eps2"), T.d)


def kuroda_A1(T) -> int:
    """#A_1 = Q(K_1) * #A(K) * #A(F) * #A(Q(sqrt 2)) / 4, with #A(Q(sqrt 2)) = 1."""
    p = _assemble(_as_triple(T))
    if not isinstance(p.A1, int):
        raise ArithmeticError(f"class number formula gives a non-integer {p.A1}")
    return p.A1


def fukuda_stabilize(A0: int, A1: int, pattern: str | None = None):
    """(lambda, mu, nu) if the orders already agree at layers 0 and 1, else "undetermined".

    The primes above 2 are totally ramified from the base on for both
    congruence patterns (2 inert when d = 5 mod 8, split and unramified when
    d = 1 mod 8), so stabilization may start at layer 0.
    """
    if pattern not in (None, "cond1", "cond2"):
        raise ValueError(f"unknown pattern {pattern}")
    if A1 == A0:
        return 0, 0, _log2(A0)
    return UNDETERMINED


def layer_field(d: int, n: int) -> str:
    """Symbolic name of the n-th layer Q(sqrt d, a_n), a_n = sqrt(2 + a_{n-1})."""
    if n == 0:
        return f"Q(sqrt({d}))"
    a = "sqrt(2)"
    for _ in range(n - 1):
        a = f"sqrt(2 + {a})"
    return f"Q(sqrt({d}), {a})"


# --- verdicts ------------------------------------------------------------------


@dataclass
class Verdict:
    statement: str
    holds: bool
    applicable: bool = True
    Xinf: str = XINF_UNKNOWN
    details: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    def require(self, ok: bool, message: str) -> None:
        if not ok:
            self.failures.append(message)
            self.holds = False


def _check_product_nonresidue(p: _Pieces) -> Verdict:
    T = p.T
    if T.pattern != "cond1" or T.symbols["q1q2/p1"] != -1:
        raise HypothesisError("needs the (5, 3, 3) pattern with (q1q2/p1) = -1")
    v = Verdict("Thm1.1", True, Xinf=XINF_Z2, details={"A0": p.A0, "A1": p.A1, "Q": p.unit_index.Q})
    v.require(p.A0 == 2, f"#A0 = {p.A0}, expected 2")
    v.require(p.A1 == p.A0 == 2, f"#A1 = {p.A1}, expected #A0 = 2")
    return v


def _check_p1_principality(p: _Pieces) -> Verdict:
    T = p.T
    if T.pattern != "cond1" or T.symbols["q1/p1"] != 1 or T.symbols["q2/p1"] != 1:
        raise HypothesisError("needs the (5, 3, 3) pattern with (q1/p1) = (q2/p1) = 1")
    p1_principal = p.principal(T.p1)
    v = Verdict("Thm1.3", True, details={"p1_principal": p1_principal, "A0": p.A0, "A1": p.A1})
    v.require(p1_principal == (p.A1 != p.A0), "p1 principal must be equivalent to #A1 != #A0")
    v.require(not (p.principal(T.q1) and p.principal(T.q2)), "q1 and q2 are both principal")
    v.require(p1_principal == p.same_class(T.q1, T.q2), "p1 principal must be equivalent to [q1] = [q2]")
    if p1_principal:
        v.require(p.A1 == 2 * p.A0, "principal p1 must double the order")
    else:
        v.require(not p.unit_index.squares, "no unit square root may lie in K1 when p1 is not principal")
    v.require(p.A0 >= 4, "#A0 must be at least 4")
    return v


def _check_norm_obstruction(p: _Pieces) -> Verdict:
    T = p.T
    if T.pattern != "cond1" or T.symbols["q1/p1"] != 1 or T.symbols["q2/p1"] != 1:
        raise HypothesisError("needs the (5, 3, 3) pattern with (q1/p1) = (q2/p1) = 1")
    plus, minus = p.K.norm_solvable[T.p1]
    v = Verdict("Cor1.4", True, applicable=not plus, details={"4p1_solvable": plus, "-4p1_solvable": minus})
    v.require(not minus, "a^2 - d b^2 = -4 p1 must have no solution")
    v.require(p.principal(T.p1) == plus, "p1 principal must match solvability of a^2 - d b^2 = 4 p1")
    if not plus:
        v.require(p.A1 == p.A0 >= 4, f"#A1 = {p.A1}, #A0 = {p.A0}: expected equal and at least 4")
        v.Xinf = XINF_M2
        v.details["m"] = _log2(p.A0)
    return v


def _check_q1_nonresidue(p: _Pieces) -> Verdict:
    T = p.T
    if T.pattern != "cond2" or T.symbols["q1/p1"] != -1:
        raise HypothesisError("needs the (5, 7, 3) pattern with (q1/p1) = -1")
    v = Verdict("Thm1.5", True, Xinf=XINF_Z2, details={"A0": p.A0, "AF": p.AF, "Q": p.unit_index.Q, "A1": p.A1})
    v.require(p.A0 == 2, f"#A0 = {p.A0}, expected 2")
    v.require(p.F.A_factors == (2, 2), f"A(F) = {p.F.A_factors}, expected (2, 2)")
    v.require(p.unit_index.Q == 1, f"Q(K1) = {p.unit_index.Q}, expected 1")
    v.require(p.A1 == 2, f"#A1 = {p.A1}, expected 2")
    return v


def _check_q1_residue(p: _Pieces) -> Verdict:
    T = p.T
    if T.pattern != "cond2" or T.symbols["q1/p1"] != 1:
        raise HypothesisError("needs the (5, 7, 3) pattern with (q1/p1) = 1")
    if T.symbols["q2/p1"] == -1:
        v = Verdict("Sec8-Case1", True, Xinf=XINF_M2, details={"Q": p.unit_index.Q, "A0": p.A0, "A1": p.A1})
        v.require(p.unit_index.Q == 2, f"Q(K1) = {p.unit_index.Q}, expected 2")
        v.require(p.A1 == 2 * p.A0, f"#A1 = {p.A1}, expected 2 * #A0 = {2 * p.A0}")
        return v
    q1_principal = p.principal(T.q1)
    v = Verdict("Sec8-Case2", True, details={"q1_principal": q1_principal, "A0": p.A0, "A1": p.A1})
    v.require(q1_principal == (p.A1 != p.A0), "q1 principal must be equivalent to #A1 != #A0")
    v.require(not (p.principal(T.p1) and p.principal(T.q2)), "p1 and q2 are both principal")
    v.require(q1_principal == p.same_class(T.p1, T.q2), "q1 principal must be equivalent to [p1] = [q2]")
    if q1_principal:
        v.require(p.A1 == 2 * p.A0 and p.A1 >= 8, f"#A1 = {p.A1}, expected 2 * #A0 >= 8")
        v.Xinf = XINF_M3
    else:
        v.require(p.A1 == p.A0, f"#A1 = {p.A1}, expected #A0 = {p.A0}")
        v.Xinf = XINF_M2
    return v


def check_product_nonresidue(T) -> Verdict:
    return _check_product_nonresidue(_assemble(_as_triple(T)))


def check_p1_principality(T) -> Verdict:
    return _check_p1_principality(_assemble(_as_triple(T)))


def check_norm_obstruction(T) -> Verdict:
    return _check_norm_obstruction(_assemble(_as_triple(T)))


def check_q1_nonresidue(T) -> Verdict:
    return _check_q1_nonresidue(_assemble(_as_triple(T)))


def check_q1_residue(T) -> Verdict:
    return _check_q1_residue(_assemble(_as_triple(T)))


# --- the report ----------------------------------------------------------------


@dataclass
class TowerReport:
    triple: PrimeTriple
    A0_order: int
    A0_factors: tuple[int, ...]
    AF_order: int
    AF_factors: tuple[int, ...]
    A0_cyclic: bool
    principal_primes: tuple[int, ...]
    Q_K1: int
    A1_order: int
    fundamental_system: str
    stable: bool
    lambda_: int | str
    mu: int | str
    nu: int | str
    Xinf: str
    theorem_tag: str
    violations: list[str]

    def to_json(self) -> dict:
        T = self.triple
        return {
            "p1": T.p1,
            "q1": T.q1,
            "q2": T.q2,
            "pattern": T.pattern,
            "symbols": dict(T.symbols),
            "A0": self.A0_order,
            "A0_factors": list(self.A0_factors),
            "AF": self.AF_order,
            "AF_factors": list(self.AF_factors),
            "Q": self.Q_K1,
            "A1": self.A1_order,
            "principal": [str(x) for x in self.principal_primes],
            "stable": self.stable,
            "lambda": self.lambda_,
            "mu": self.mu,
            "nu": self.nu,
            "Xinf": self.Xinf,
            "theorem": self.theorem_tag,
            "violations": list(self.violations),
        }


def _general_checks(p: _Pieces) -> list[str]:
    T, out = p.T, []
    Q = p.unit_index.Q
    if not isinstance(p.A1, int) or 4 * p.A1 != Q * p.A0 * p.AF:
        out.append(f"class number formula: 4*{p.A1} != {Q}*{p.A0}*{p.AF}")
    bound = p.A0 * p.AF // 2 if T.pattern == "cond1" else p.A0 * p.AF
    if p.A1 > bound:
        out.append(f"order bound: #A1 = {p.A1} > {bound}")
    if genus.order_two_criterion(T) != (p.A0 == 2):
        out.append(f"order-two criterion disagrees with #A0 = {p.A0}")
    klein = p.F.A_factors == (2, 2)
    if T.pattern == "cond1" and genus.klein_criterion(T) != klein:
        out.append(f"Klein-four criterion disagrees with A(F) = {p.F.A_factors}")
    if T.pattern == "cond2" and not klein:
        out.append(f"A(F) = {p.F.A_factors}, expected (2, 2)")
    for X in (p.K, p.F):
        if X.genus_rank != len(X.A_factors):
            out.append(f"genus rank {X.genus_rank} != 2-rank {len(X.A_factors)} for d={X.d}")
        for ell, (plus, minus) in X.norm_solvable.items():
            if (ell in X.principal) != (plus or minus):
                out.append(f"principality of {ell} in Q(sqrt {X.d}) disagrees with the norm equation")
    if len(p.K.A_factors) != 1:
        out.append(f"A0 = {p.K.A_factors} is not cyclic")
    # a solution of a^2 - d b^2 = -4 p1 forces (-p1/q1) = (-p1/q2) = 1
    if (T.symbols["q1/p1"], T.symbols["q2/p1"]) != (-1, -1):
        if p.K.norm_solvable[T.p1][1]:
            out.append("a^2 - d b^2 = -4 p1 is solvable")
    return out


def build_tower_report(T, data: DataSource = field_data) -> TowerReport:
    T = _as_triple(T)
    p = _assemble(T, data)
    violations = _general_checks(p)
    s1, s2 = T.symbols["q1/p1"], T.symbols["q2/p1"]

    verdicts = []
    if T.pattern == "cond1":
        if T.symbols["q1q2/p1"] == -1:
            verdicts.append(_check_product_nonresidue(p))
        elif s1 == 1 and s2 == 1:
            verdicts.append(_check_p1_principality(p))
            verdicts.append(_check_norm_obstruction(p))
    else:
        verdicts.append(_check_q1_nonresidue(p) if s1 == -1 else _check_q1_residue(p))
    for v in verdicts:
        violations += [f"{v.statement}: {msg}" for msg in v.failures]

    applied = [v for v in verdicts if v.applicable]
    tag = "+".join(v.statement for v in applied) if applied else "none"

    A1 = p.A1 if isinstance(p.A1, int) else int(p.A1)
    stable_orders = fukuda_stabilize(p.A0, A1, T.pattern)
    stable = stable_orders != UNDETERMINED
    lam = mu = nu = UNKNOWN
    if stable:
        lam, mu, nu = stable_orders
        xinf = XINF_Z2 if p.A0 == 2 else XINF_M2
    else:
        licensed = [v.Xinf for v in applied if v.Xinf != XINF_UNKNOWN]
        xinf = licensed[-1] if licensed else XINF_UNKNOWN
        if xinf != XINF_UNKNOWN:
            # finite module of order at least 2^m: lambda = mu = 0, nu open
            lam, mu = 0, 0
    for v in applied:
        if v.Xinf != XINF_UNKNOWN and stable and v.Xinf != xinf:
            violations.append(f"{v.statement}: predicted {v.Xinf}, stable orders give {xinf}")

    return TowerReport(
        triple=T,
        A0_order=p.A0,
        A0_factors=p.K.A_factors,
        AF_order=p.AF,
        AF_factors=p.F.A_factors,
        A0_cyclic=len(p.K.A_factors) <= 1,
        principal_primes=tuple(ell for ell in T.primes if p.principal(ell)),
        Q_K1=p.unit_index.Q,
        A1_order=A1,
        fundamental_system=p.unit_index.units,
        stable=stable,
        lambda_=lam,
        mu=mu,
        nu=nu,
        Xinf=xinf,
        theorem_tag=tag,
        violations=violations,
    )


# names used by the build contract
theorem_1_1_check = check_product_nonresidue
theorem_1_3_check = check_p1_principality
corollary_1_4_check = check_norm_obstruction
theorem_1_5_check = check_q1_nonresidue
concluding_cases_check = check_q1_residue
