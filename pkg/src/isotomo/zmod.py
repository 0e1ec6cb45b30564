"""Exact integer arithmetic over Z_d.

Everything here works on plain Python ints; no floating point is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

MAX_MODULUS = 2**63 - 1


class _Infinity:
    """Valuation of zero. Compares greater than every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("isotomo.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    r = math.isqrt(n)
    f = 3
    while f <= r:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition ``d = prod(p**s)`` with ``p`` increasing."""

    d: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 0
        for p, s in self.factors:
            if not is_prime(p) or s < 1 or p <= last:
                raise ValueError(f"bad factor ({p}, {s}) in factorization of {self.d}")
            last = p
            prod *= p**s
        if prod != self.d:
            raise ValueError(f"factors multiply to {prod}, not {self.d}")

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def prime_powers(self) -> tuple[int, ...]:
        """The ``d_j = p_j**s_j``, in factor order."""
        return tuple(p**s for p, s in self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)


def factorize(d: int) -> Factorization:
    """Trial-division factorization of a positive integer."""
    if not isinstance(d, int) or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    if d > MAX_MODULUS:
        raise ValueError("d exceeds the 64-bit bound")
    factors = []
    n = d
    p = 2
    while p * p <= n:
        if n % p == 0:
            s = 0
            while n % p == 0:
                n //= p
                s += 1
            factors.append((p, s))
        p += 1 if p == 2 else 2
    if n > 1:
        factors.append((n, 1))
    return Factorization(d, tuple(factors))


def gcd3_zero_as_d(m: int, n: int, d: int) -> int:
    """gcd(m, n, d) where a zero coordinate counts as ``d``.

    This is the ``h`` that fixes the size ``d // h`` of the cyclic
    subgroup generated by ``(m, n)`` in Z_d^2.
    """
    if d < 1:
        raise ValueError("d must be positive")
    if not (0 <= m < d and 0 <= n < d):
        raise ValueError(f"({m}, {n}) not reduced mod {d}")
    return math.gcd(m or d, n or d, d)


def p_valuation(x: int, p: int):
    """Largest ``e`` with ``p**e | x``; ``INF`` for ``x == 0``."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return INF
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e


def crt(residues, moduli) -> int:
    """Chinese remaindering for pairwise coprime moduli."""
    x, m = 0, 1
    for r, n in zip(residues, moduli):
        # x + m*t = r (mod n)
        t = ((r - x) * pow(m, -1, n)) % n
        x += m * t
        m *= n
    return x % m


def divisors(d: int) -> list[int]:
    return [k for k in range(1, d + 1) if d % k == 0]
