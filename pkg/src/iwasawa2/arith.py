"""Integer kernel: primality, factorization, quadratic symbols, square classes.

Everything here works on Python ints, so there is no size limit beyond
what the algorithms can reasonably finish.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt, prod

_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % q for q in range(2, isqrt(p) + 1))]

# Deterministic Miller-Rabin witness set for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    for c in range(1, 100):
        y, m, g, r, q = 2, 128, 1, 1, 1
        f = lambda v: (v * v + c) % n  # noqa: E731
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = f(y)
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = f(y)
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = f(ys)
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard rho failed on {n}")


def _factor_into(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = isqrt(n)
    if r * r == n:
        _factor_into(r, out)
        _factor_into(r, out)
        return
    g = _pollard_brent(n)
    _factor_into(g, out)
    _factor_into(n // g, out)


def factorize(n: int) -> tuple[int, list[tuple[int, int]]]:
    """Return ``(sign, [(p, e), ...])`` with primes ascending.

    >>> factorize(8360)
    (1, [(2, 3), (5, 1), (11, 1), (19, 1)])
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    sign = 1 if n > 0 else -1
    n = abs(n)
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    _factor_into(n, out)
    return sign, sorted(out.items())


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)[1]]


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for arbitrary integers a, n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = (n & -n).bit_length() - 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
        n >>= v
    # n odd and positive: Jacobi symbol
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre(a: int, p: int) -> int:
    return kronecker(a, p)


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for _, e in factorize(n)[1])


def sqrt_mod_prime(a: int, p: int) -> int | None:
    """A square root of ``a`` modulo the prime ``p`` (Tonelli-Shanks), or None."""
    a %= p
    if a == 0 or p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


@dataclass(frozen=True, order=True)
class SquareClass:
    """A class of Q^*/Q^*2, stored by its squarefree representative.

    The sign is part of the class, so ``SquareClass(-11) != SquareClass(11)``.
    """

    rep: int

    def __post_init__(self):
        if self.rep == 0:
            raise ValueError("0 has no square class")
        if not is_squarefree(self.rep):
            raise ValueError(f"{self.rep} is not squarefree")

    def __mul__(self, other: SquareClass | int) -> SquareClass:
        other_rep = other.rep if isinstance(other, SquareClass) else other
        g = gcd(self.rep, other_rep)
        return squarefree_part((self.rep // g) * (other_rep // g))

    def __int__(self) -> int:
        return self.rep

    def __repr__(self) -> str:
        return f"SquareClass({self.rep})"


def squarefree_part(n: int, support: list[int] | None = None) -> SquareClass:
    """Squarefree ``m`` with ``n = m * k**2``, sign preserved.

    If ``support`` is given it must contain every prime that can occur to an
    odd power in ``n``; the remaining cofactor is then checked to be a square
    instead of being factored. This is what makes huge unit traces tractable.
    """
    if n == 0:
        raise ValueError("0 has no squarefree part")
    sign = -1 if n < 0 else 1
    n = abs(n)
    if support is None:
        return SquareClass(sign * prod(p for p, e in factorize(n)[1] if e % 2))
    rep = 1
    for p in sorted(set(support)):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            rep *= p
    if not is_square(n):
        raise ArithmeticError("cofactor outside the given prime support is not a square")
    return SquareClass(sign * rep)


def gf2_rank(rows: list[list[int]]) -> int:
    """Rank over GF(2) of a bit matrix given as a list of rows."""
    pivots: dict[int, int] = {}
    rank = 0
    for row in rows:
        v = 0
        for i, bit in enumerate(row):
            if bit & 1:
                v |= 1 << i
        while v:
            top = v.bit_length() - 1
            if top in pivots:
                v ^= pivots[top]
            else:
                pivots[top] = v
                rank += 1
                break
    return rank


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y = g = gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0
