"""Real quadratic fields, fundamental units, norm equations and prime triples."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt

from . import forms
from .arith import is_prime, is_squarefree, kronecker, prime_divisors


@dataclass(frozen=True)
class QuadField:
    d: int
    disc: int
    ramified: tuple[int, ...]

    def __repr__(self) -> str:
        return f"QuadField(d={self.d})"


@lru_cache(maxsize=1024)
def make_field(d: int) -> QuadField:
    if d <= 1 or not is_squarefree(d):
        raise ValueError(f"radicand must be a squarefree integer > 1, got {d}")
    disc = d if d % 4 == 1 else 4 * d
    return QuadField(d, disc, tuple(prime_divisors(disc)))


@dataclass(frozen=True)
class FundUnit:
    """The unit (t + u*sqrt(d)) / 2 > 1."""

    t: int
    u: int
    norm: int
    d: int

    def __post_init__(self):
        if self.t * self.t - self.d * self.u * self.u != 4 * self.norm:
            raise ArithmeticError(f"({self.t} + {self.u}*sqrt({self.d}))/2 is not a unit of norm {self.norm}")

    def __float__(self) -> float:
        # only sensible for moderately sized units
        return (self.t + self.u * self.d**0.5) / 2

    @property
    def trace(self) -> int:
        return self.t


def _floor_quadratic(P: int, Q: int, s: int) -> int:
    """floor((P + sqrt(D)) / Q) for non-square D with isqrt(D) = s."""
    if Q > 0:
        return (P + s) // Q
    return -((P + s) // -Q) - 1


@lru_cache(maxsize=1024)
def _unit(d: int) -> FundUnit:
    if d % 4 == 1:
        P, Q = 1, 2
    else:
        P, Q = 0, 1
    P0, Q0 = P, Q
    s = isqrt(d)
    p_prev, p = 1, _floor_quadratic(P, Q, s)
    q_prev, q = 0, 1
    a = p
    P = a * Q - P
    Q = (d - P * P) // Q
    start = (P, Q)
    while True:
        a = _floor_quadratic(P, Q, s)
        P = a * Q - P
        Q = (d - P * P) // Q
        if (P, Q) == start:
            break
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    # eta = p - q * x0' with x0 = (P0 + sqrt d)/Q0
    t2, u2 = 2 * (Q0 * p - q * P0), 2 * q
    t, u = t2 // Q0, u2 // Q0
    n = t * t - d * u * u
    return FundUnit(t, u, n // 4, d)


def fundamental_unit(K: QuadField) -> FundUnit:
    """Fundamental unit of the maximal order, from the continued fraction of
    sqrt(d) or (1 + sqrt(d))/2 with exact (P, Q) recurrences."""
    return _unit(K.d)


def unit_norm_is_minus_one(K: QuadField) -> bool:
    return fundamental_unit(K).norm == -1


def _totally_positive_unit(K: QuadField) -> tuple[int, int]:
    e = fundamental_unit(K)
    if e.norm == 1:
        return e.t, e.u
    # eps^2 = ((t^2 + d u^2)/2 + t u sqrt(d)) / 2
    return (e.t * e.t + K.d * e.u * e.u) // 2, e.t * e.u


def _shrink(a: int, b: int, T: int, U: int, d: int) -> tuple[int, int]:
    """Move (a + b sqrt d)/2 along its orbit under the unit (T + U sqrt d)/2 to minimise |b|."""

    def mul(a, b, sign):
        return (a * T + sign * d * b * U) // 2, (sign * a * U + b * T) // 2

    for sign in (1, -1):
        while True:
            a2, b2 = mul(a, b, sign)
            if abs(b2) < abs(b) or (abs(b2) == abs(b) and abs(a2) < abs(a)):
                a, b = a2, b2
            else:
                break
    return abs(a), abs(b)


def norm_equation(K: QuadField, N: int) -> tuple[int, int] | None:
    """Integers (a, b) of equal parity with a^2 - d*b^2 = 4N, or None.

    Solvability is decided exactly through proper equivalence of forms
    (N, b, c) with the principal form; the returned solution has minimal |b|.
    """
    if N == 0:
        raise ValueError("N must be nonzero")
    D, d = K.disc, K.d
    T, U = _totally_positive_unit(K)
    best = None
    for x, y in forms.principal_representations(D, N):
        if D == d:
            a, b = 2 * x + y, y
        else:
            a, b = 2 * x, 2 * y
        a, b = _shrink(a, b, T, U, d)
        if best is None or (b, a) < (best[1], best[0]):
            best = (a, b)
    if best is not None:
        a, b = best
        if a * a - d * b * b != 4 * N or (a - b) % 2:
            raise ArithmeticError(f"bad norm equation solution {best} for d={d}, N={N}")
    return best


@dataclass(frozen=True)
class PrimeTriple:
    p1: int
    q1: int
    q2: int
    pattern: str
    symbols: dict[str, int] = field(compare=False, hash=False, default_factory=dict)

    @property
    def primes(self) -> tuple[int, int, int]:
        return (self.p1, self.q1, self.q2)

    @property
    def d(self) -> int:
        return self.p1 * self.q1 * self.q2

    @property
    def K(self) -> QuadField:
        return make_field(self.d)

    @property
    def F(self) -> QuadField:
        return make_field(2 * self.d)


PATTERNS = {(5, 3, 3): "cond1", (5, 7, 3): "cond2"}


def triple_symbols(p1: int, q1: int, q2: int) -> dict[str, int]:
    return {
        "q1/p1": kronecker(q1, p1),
        "q2/p1": kronecker(q2, p1),
        "q1q2/p1": kronecker(q1 * q2, p1),
        "p1/q2": kronecker(p1, q2),
    }


def classify_triple(p1: int, q1: int, q2: int) -> PrimeTriple | None:
    """Tag the triple with the congruence pattern it satisfies, if any."""
    if not all(is_prime(p) for p in (p1, q1, q2)):
        raise ValueError(f"({p1}, {q1}, {q2}) are not all prime")
    if len({p1, q1, q2}) != 3:
        raise ValueError(f"({p1}, {q1}, {q2}) are not distinct")
    pattern = PATTERNS.get((p1 % 8, q1 % 8, q2 % 8))
    if pattern is None:
        return None
    return PrimeTriple(p1, q1, q2, pattern, triple_symbols(p1, q1, q2))
