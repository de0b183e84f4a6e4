"""Narrow and wide form class groups of positive fundamental discriminants.

Classes of primitive indefinite forms are enumerated as cycles of reduced
forms under the rho operator; the group law is Dirichlet composition. The
2-Sylow subgroup is read off from order statistics, which determine a
finite abelian 2-group completely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt
from typing import NamedTuple

from .arith import factorize, sqrt_mod_prime, xgcd


class IndefiniteForm(NamedTuple):
    """The binary quadratic form a*x^2 + b*x*y + c*y^2."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        s = isqrt(self.disc)
        a = abs(self.a)
        return 0 < self.b <= s and 2 * a + self.b > s and 2 * a - self.b <= s

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def inverse(self) -> IndefiniteForm:
        return IndefiniteForm(self.a, -self.b, self.c)

    def act(self, m) -> IndefiniteForm:
        """The form (x, y) -> f(m00 x + m01 y, m10 x + m11 y)."""
        (p, q), (r, s) = m
        a, b, c = self
        return IndefiniteForm(
            a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s,
        )


def _check_disc(D: int) -> int:
    if D <= 0:
        raise ValueError(f"discriminant {D} is not positive")
    s = isqrt(D)
    if s * s == D:
        raise ValueError(f"discriminant {D} is a square")
    if D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a discriminant")
    return s


def is_fundamental(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return all(e == 1 for _, e in factorize(D)[1])
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and all(e == 1 for _, e in factorize(m)[1])
    return False


def principal_form(D: int) -> IndefiniteForm:
    delta = D % 2
    return IndefiniteForm(1, delta, (delta - D) // 4)


def _rho_step(f: IndefiniteForm, D: int, s: int) -> tuple[IndefiniteForm, int]:
    """One rho step; also return t with f.act([[0, -1], [1, t]]) == rho(f)."""
    a, b, c = f
    m = 2 * abs(c)
    if abs(c) > s:
        r = -b % m
        if r > abs(c):
            r -= m
    else:
        r = s - (s + b) % m
    return IndefiniteForm(c, r, (r * r - D) // (4 * c)), (r + b) // (2 * c)


def rho(f: IndefiniteForm) -> IndefiniteForm:
    D = f.disc
    return _rho_step(f, D, isqrt(D))[0]


def reduce_with_matrix(f: IndefiniteForm):
    """Return ``(g, M)`` with g reduced and ``f.act(M) == g``, det M = 1."""
    D = f.disc
    s = _check_disc(D)
    f = IndefiniteForm(*f)
    m = ((1, 0), (0, 1))
    while not f.is_reduced():
        f, t = _rho_step(f, D, s)
        (p, q), (r, u) = m
        m = ((q, -p + t * q), (u, -r + t * u))
    return f, m


def reduce(f: IndefiniteForm) -> IndefiniteForm:
    D = f.disc
    s = _check_disc(D)
    if gcd(gcd(f[0], f[1]), f[2]) != 1:
        raise ValueError(f"{tuple(f)} is not primitive")
    f = IndefiniteForm(*f)
    while not f.is_reduced():
        f = _rho_step(f, D, s)[0]
    return f


def cycle(f: IndefiniteForm) -> list[IndefiniteForm]:
    """The rho period through the reduced form ``f``."""
    f = IndefiniteForm(*f)
    if not f.is_reduced():
        raise ValueError(f"{tuple(f)} is not reduced")
    D = f.disc
    s = isqrt(D)
    out = [f]
    g = _rho_step(f, D, s)[0]
    while g != f:
        out.append(g)
        g = _rho_step(g, D, s)[0]
    return out


def compose(f: IndefiniteForm, g: IndefiniteForm) -> IndefiniteForm:
    """Dirichlet composition of two primitive forms, reduced."""
    D = f.disc
    if g.disc != D:
        raise ValueError("forms have different discriminants")
    a1, b1, _ = f
    a2, b2, _ = g
    beta = (b1 + b2) // 2
    g1, x1, y1 = xgcd(a1, a2)
    e, x2, w = xgcd(g1, beta)
    u, v = x2 * x1, x2 * y1
    a3 = a1 * a2 // (e * e)
    B = (u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + D) // 2) // e
    B %= 2 * abs(a3)
    return reduce(IndefiniteForm(a3, B, (B * B - D) // (4 * a3)))


# --- square roots of D modulo 4a, used to enumerate reduced forms --------------


class _RootTable:
    """Roots of k^2 + delta*k - m (mod n), i.e. b = 2k + delta with b^2 = D (mod 4n)."""

    def __init__(self, D: int):
        self.D = D
        self.delta = D % 2
        self.m = (D - self.delta) // 4
        self._pp: dict[int, list[int]] = {}

    def _poly(self, k: int, n: int) -> int:
        return (k * k + self.delta * k - self.m) % n

    def prime_power(self, p: int, e: int) -> list[int]:
        q = p**e
        hit = self._pp.get(q)
        if hit is not None:
            return hit
        if e == 1:
            if p == 2:
                roots = [k for k in (0, 1) if self._poly(k, 2) == 0]
            else:
                r = sqrt_mod_prime(self.D, p)
                if r is None:
                    roots = []
                else:
                    inv2 = (p + 1) // 2
                    roots = sorted({(r - self.delta) * inv2 % p, (-r - self.delta) * inv2 % p})
        else:
            lower = self.prime_power(p, e - 1)
            step = q // p
            roots = [r + j * step for r in lower for j in range(p) if self._poly(r + j * step, q) == 0]
        self._pp[q] = roots
        return roots

    def roots(self, n: int, factors: list[tuple[int, int]] | None = None) -> list[int]:
        if factors is None:
            factors = factorize(n)[1]
        mod, acc = 1, [0]
        for p, e in factors:
            q = p**e
            rs = self.prime_power(p, e)
            if not rs:
                return []
            inv = pow(mod, -1, q)
            acc = [x + mod * ((r - x) * inv % q) for x in acc for r in rs]
            mod *= q
        return acc


def _spf_table(n: int) -> list[int]:
    spf = list(range(n + 1))
    for i in range(2, isqrt(n) + 1):
        if spf[i] == i:
            for j in range(i * i, n + 1, i):
                if spf[j] == j:
                    spf[j] = i
    return spf


def reduced_forms(D: int) -> list[IndefiniteForm]:
    """All primitive reduced forms of discriminant ``D``."""
    s = _check_disc(D)
    spf = _spf_table(s)
    table = _RootTable(D)
    out = []
    for a in range(1, s + 1):
        factors = []
        n = a
        while n > 1:
            p, e = spf[n], 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
        lo = max(1, s + 1 - 2 * a, 2 * a - s)
        if lo > s:
            continue
        two_a = 2 * a
        for k in table.roots(a, factors):
            b0 = 2 * k + table.delta
            b = b0 + (lo - b0 + two_a - 1) // two_a * two_a
            while b <= s:
                c = (b * b - D) // (4 * a)
                if gcd(gcd(a, b), c) == 1:
                    out.append(IndefiniteForm(a, b, c))
                    out.append(IndefiniteForm(-a, b, -c))
                b += two_a
    return out


# --- the narrow class group ----------------------------------------------------


class NarrowGroup:
    """Full narrow class group of a positive non-square discriminant.

    Classes are identified by their canonical key, the lexicographically
    least reduced form of the cycle.
    """

    def __init__(self, D: int):
        self.D = D
        self._s = _check_disc(D)
        index: dict[IndefiniteForm, IndefiniteForm] = {}
        keys = []
        for f in reduced_forms(D):
            if f in index:
                continue
            cyc = [f]
            g = _rho_step(f, D, self._s)[0]
            while g != f:
                cyc.append(g)
                g = _rho_step(g, D, self._s)[0]
            key = min(cyc)
            for g in cyc:
                index[g] = key
            keys.append(key)
        self._index = index
        self.keys = sorted(keys)
        self.identity = index[reduce(principal_form(D))]
        delta = D % 2
        # class of the ideal (sqrt(D)); trivial iff the fundamental unit has norm -1
        self.minus_one = index[reduce(IndefiniteForm(-1, delta, (D - delta) // 4))]

    @property
    def h(self) -> int:
        return len(self.keys)

    def key(self, f: IndefiniteForm) -> IndefiniteForm:
        f = IndefiniteForm(*f)
        if not f.is_reduced():
            f = reduce(f)
        return self._index[f]

    def mul(self, x: IndefiniteForm, y: IndefiniteForm) -> IndefiniteForm:
        return self._index[compose(x, y)]

    def power(self, x: IndefiniteForm, n: int) -> IndefiniteForm:
        result, base = self.identity, x
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def order(self, x: IndefiniteForm) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.mul(y, x)
            k += 1
        return k

    def two_sylow(self) -> list[IndefiniteForm]:
        odd = self.h
        while odd % 2 == 0:
            odd //= 2
        return sorted({self.power(x, odd) for x in self.keys})


@lru_cache(maxsize=64)
def narrow_group(D: int) -> NarrowGroup:
    return NarrowGroup(D)


def factors_from_order_counts(counts: list[int]) -> tuple[int, ...]:
    """Invariant factors of an abelian 2-group from ``counts[k] = #{x : x^(2^k) = 1}``.

    The number of cyclic factors of order >= 2^k is log2(counts[k] / counts[k-1]).
    """
    at_least = []
    for k in range(1, len(counts)):
        ratio = counts[k] // counts[k - 1]
        if counts[k] != ratio * counts[k - 1] or ratio & (ratio - 1):
            raise ArithmeticError("order counts are not those of an abelian 2-group")
        at_least.append(ratio.bit_length() - 1)
    factors = []
    for k, n in enumerate(at_least, start=1):
        nxt = at_least[k] if k < len(at_least) else 0
        factors += [2**k] * (n - nxt)
    return tuple(sorted(factors))


@dataclass(frozen=True)
class ClassGroup2:
    """2-Sylow subgroup of a narrow or wide form class group.

    ``elements`` holds canonical class keys. For the wide group a key is the
    least canonical narrow key in its coset modulo the class of (sqrt D).
    """

    disc: int
    narrow: bool
    class_number: int
    invariant_factors: tuple[int, ...]
    elements: tuple[IndefiniteForm, ...]
    prime_class: dict[int, IndefiniteForm] = field(default_factory=dict)
    identity: IndefiniteForm | None = None

    @property
    def order(self) -> int:
        n = 1
        for f in self.invariant_factors:
            n *= f
        return n

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def four_rank(self) -> int:
        return sum(1 for f in self.invariant_factors if f >= 4)

    def is_elementary(self) -> bool:
        return all(f == 2 for f in self.invariant_factors)

    def is_cyclic(self) -> bool:
        return self.rank <= 1


def ambiguous_form(D: int, ell: int) -> IndefiniteForm:
    """The form (ell, b, c) attached to the prime ideal above a ramified ``ell``."""
    if D % ell:
        raise ValueError(f"{ell} does not divide the discriminant {D}")
    for b in range(D % 2, 2 * ell, 2):
        if (b * b - D) % (4 * ell) == 0:
            return IndefiniteForm(ell, b, (b * b - D) // (4 * ell))
    raise ValueError(f"{ell} is not ramified in discriminant {D}")


def _ramified_primes(D: int) -> list[int]:
    return [p for p, _ in factorize(D)[1]]


def _sylow(D: int, narrow: bool) -> ClassGroup2:
    G = narrow_group(D)
    syl = G.two_sylow()
    e, j = G.identity, G.minus_one
    wide = not narrow and j != e

    def canon(x):
        return min(x, G.mul(x, j)) if wide else x

    def trivial(x):
        return x == e or (wide and x == j)

    elements = sorted({canon(x) for x in syl})
    counts = [1]
    while counts[-1] < len(elements):
        k = len(counts)
        counts.append(sum(1 for x in elements if trivial(G.power(x, 2**k))))
    prime_class = {ell: canon(G.key(ambiguous_form(D, ell))) for ell in _ramified_primes(D)}
    return ClassGroup2(
        disc=D,
        narrow=narrow,
        class_number=G.h // 2 if wide else G.h,
        invariant_factors=factors_from_order_counts(counts),
        elements=tuple(elements),
        prime_class=prime_class,
        identity=canon(e),
    )


@lru_cache(maxsize=256)
def narrow_class_group(D: int) -> ClassGroup2:
    if not is_fundamental(D) or D <= 0:
        raise ValueError(f"{D} is not a positive fundamental discriminant")
    return _sylow(D, narrow=True)


@lru_cache(maxsize=256)
def _wide_by_disc(D: int) -> ClassGroup2:
    if not is_fundamental(D) or D <= 0:
        raise ValueError(f"{D} is not a positive fundamental discriminant")
    return _sylow(D, narrow=False)


def wide_class_group(K) -> ClassGroup2:
    """Wide 2-class group of a real quadratic field (anything with ``.disc``)."""
    return _wide_by_disc(K.disc)


def ramified_prime_class(K, ell: int) -> IndefiniteForm:
    """Wide class of the prime ideal above the ramified prime ``ell``."""
    A = wide_class_group(K)
    if ell not in A.prime_class:
        raise ValueError(f"{ell} is not ramified in Q(sqrt({K.d}))")
    return A.prime_class[ell]


def is_principal(K, ell: int) -> bool:
    A = wide_class_group(K)
    return ramified_prime_class(K, ell) == A.identity


# --- representations by the principal form -------------------------------------


def _matmul(m, n):
    (a, b), (c, d) = m
    (e, f), (g, h) = n
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def _matinv(m):
    (a, b), (c, d) = m
    return ((d, -b), (-c, a))


def equivalence_matrix(f: IndefiniteForm, g: IndefiniteForm):
    """A matrix M of determinant 1 with ``f.act(M) == g``, or None if f, g are not properly equivalent."""
    D = f.disc
    if g.disc != D:
        return None
    s = _check_disc(D)
    fr, m1 = reduce_with_matrix(f)
    gr, m2 = reduce_with_matrix(g)
    members = set(cycle(fr))
    if gr not in members:
        return None
    walk = ((1, 0), (0, 1))
    h = fr
    while h != gr:
        h, t = _rho_step(h, D, s)
        walk = _matmul(walk, ((0, -1), (1, t)))
    return _matmul(_matmul(m1, walk), _matinv(m2))


def _divisor_squares(n: int) -> list[int]:
    """All g > 0 with g^2 | n."""
    out = [1]
    for p, e in factorize(n)[1]:
        out = [g * p**k for g in out for k in range(e // 2 + 1)]
    return sorted(out)


def principal_representations(D: int, n: int):
    """One representation (x, y) of ``n`` by the principal form in every
    orbit under proper automorphs, covering all solutions."""
    if n == 0:
        raise ValueError("n must be nonzero")
    P = principal_form(D)
    table = _RootTable(D)
    found = []
    for g in _divisor_squares(abs(n)):
        n1 = n // (g * g)
        for k in table.roots(abs(n1)):
            b = 2 * k + table.delta
            f = IndefiniteForm(n1, b, (b * b - D) // (4 * n1))
            m = equivalence_matrix(P, f)
            if m is None:
                continue
            x, y = m[0][0], m[1][0]
            if P(x, y) != n1:
                raise ArithmeticError("transformation matrix does not map the principal form")
            found.append((g * x, g * y))
    return found
