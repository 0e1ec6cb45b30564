"""Finite fields GF(p^s) with their canonical additive character.

Elements are indexed ``0..q-1``: the index of ``c_0 + c_1 X + ... `` is
``c_0 + c_1 p + c_2 p^2 + ...`` (coefficients little-endian in base p), so
index 0 is the additive identity and index 1 the multiplicative one.
The modulus is the monic irreducible of degree s whose coefficient tuple
``(c_{s-1}, ..., c_0)`` is lexicographically smallest.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .zmod import is_prime

MAX_ORDER = 2**16


def _polymod(f, g, p):
    """Remainder of f by monic g; coefficient lists little-endian."""
    f = list(f)
    dg = len(g) - 1
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i] % p
        if c:
            for j in range(dg + 1):
                f[i - dg + j] = (f[i - dg + j] - c * g[j]) % p
    return [c % p for c in f[:dg]]


def is_irreducible(poly, p: int) -> bool:
    """Brute-force irreducibility of a monic polynomial over Z_p."""
    s = len(poly) - 1
    for e in range(1, s // 2 + 1):
        for low in itertools.product(range(p), repeat=e):
            g = list(low) + [1]
            if not any(_polymod(poly, g, p)):
                return False
    return True


def smallest_irreducible(p: int, s: int) -> tuple[int, ...]:
    for high_first in itertools.product(range(p), repeat=s):
        poly = list(reversed(high_first)) + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FieldTable:
    """GF(p^s). Immutable after construction.

    Arithmetic methods take and return element indices and accept numpy
    integer arrays as well as ints.
    """

    def __init__(self, p: int, s: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if s < 1:
            raise ValueError("s must be >= 1")
        if p**s > MAX_ORDER:
            raise ValueError(f"p^s = {p**s} exceeds the bound {MAX_ORDER}")
        self.p = p
        self.s = s
        self.q = p**s
        self.modulus = smallest_irreducible(p, s)
        q = self.q
        self._powers = p ** np.arange(s)
        self._digits = (np.arange(q)[:, None] // self._powers) % p
        self._neg = self._index((-self._digits) % p)
        self._build_log_tables()
        tr_basis = [self._trace_slow(int(p**i)) for i in range(s)]
        self._trace = (self._digits @ np.array(tr_basis)) % p
        self._tables = None

    def __repr__(self):
        return f"FieldTable(p={self.p}, s={self.s})"

    def _index(self, digits):
        return (np.asarray(digits) @ self._powers).astype(np.int64)

    def _mul_poly(self, x: int, y: int) -> int:
        a = self._digits[x]
        b = self._digits[y]
        prod = np.convolve(a, b) % self.p
        return int(self._index(_polymod(prod, self.modulus, self.p)))

    def _pow_poly(self, x: int, e: int) -> int:
        result, base = 1, x
        while e:
            if e & 1:
                result = self._mul_poly(result, base)
            base = self._mul_poly(base, base)
            e >>= 1
        return result

    def _build_log_tables(self):
        q = self.q
        self._exp = np.zeros(2 * (q - 1), dtype=np.int64)
        self._log = np.full(q, -1, dtype=np.int64)
        order_primes = [r for r in range(2, q) if (q - 1) % r == 0 and is_prime(r)]
        for g in range(1, q):
            if all(self._pow_poly(g, (q - 1) // r) != 1 for r in order_primes):
                break
        self.primitive = g
        # multiplication by g is Z_p-linear; column i is g * X^i
        mat = np.array([self._digits[self._mul_poly(g, int(self.p**i))] for i in range(self.s)]).T
        seq = np.empty(q - 1, dtype=np.int64)
        v = self._digits[1].copy()
        for k in range(q - 1):
            seq[k] = v @ self._powers
            v = (mat @ v) % self.p
        self._exp[: q - 1] = seq
        self._exp[q - 1 :] = seq
        self._log[seq] = np.arange(q - 1)
        if len(set(seq.tolist())) != q - 1:
            raise AssertionError("generator is not primitive")

    def _trace_slow(self, x: int) -> int:
        total = 0
        y = x
        for _ in range(self.s):
            total = self.add(total, y)
            y = self.pow(y, self.p)
        if total >= self.p:
            raise AssertionError("trace left the prime subfield")
        return int(total)

    # arithmetic on indices ---------------------------------------------------

    def add(self, x, y):
        if self.p == 2:
            return np.bitwise_xor(x, y) if isinstance(x, np.ndarray) else x ^ y
        r = self._index((self._digits[x] + self._digits[y]) % self.p)
        return r if isinstance(r, np.ndarray) and r.ndim else int(r)

    def neg(self, x):
        r = self._neg[x]
        return r if isinstance(r, np.ndarray) else int(r)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        x = np.asarray(x)
        y = np.asarray(y)
        zero = (x == 0) | (y == 0)
        lx = np.where(x == 0, 0, self._log[x])
        ly = np.where(y == 0, 0, self._log[y])
        r = np.where(zero, 0, self._exp[lx + ly]) if self.q > 1 else np.zeros_like(x)
        return r if r.ndim else int(r)

    def inv(self, x):
        if np.any(np.asarray(x) == 0):
            raise ZeroDivisionError("0 has no inverse")
        r = self._exp[(-self._log[x]) % (self.q - 1)]
        return r if isinstance(r, np.ndarray) else int(r)

    def pow(self, x, e: int):
        if x == 0:
            return 1 if e == 0 else 0
        return int(self._exp[(int(self._log[x]) * e) % (self.q - 1)])

    def trace(self, x):
        r = self._trace[x]
        return r if isinstance(r, np.ndarray) else int(r)

    def chi(self, x):
        """``exp(2 pi i Tr(x) / p)``."""
        return np.exp(2j * np.pi * self._trace[x] / self.p)

    def bichar(self, x, y):
        """The symmetric bicharacter ``<x, y> = chi(x y)``."""
        return self.chi(self.mul(x, y))

    @property
    def tables(self):
        """Full (add, mul) Cayley tables; only for q <= 1024."""
        if self.q > 1024:
            raise ValueError("tables are only materialized for q <= 1024")
        if self._tables is None:
            e = np.arange(self.q)
            X, Y = np.meshgrid(e, e, indexing="ij")
            self._tables = (self.add(X, Y), self.mul(X, Y))
        return self._tables

    def element(self, index: int) -> FieldElement:
        return FieldElement(self, index)

    def elements(self):
        return [FieldElement(self, i) for i in range(self.q)]


@functools.lru_cache(maxsize=None)
def build_field(p: int, s: int = 1) -> FieldTable:
    """Cached constructor; equal (p, s) always give the same table."""
    return FieldTable(p, s)


def field_of_order(q: int) -> FieldTable:
    from .zmod import factorize

    fact = factorize(q)
    if len(fact) != 1:
        raise ValueError(f"{q} is not a prime power")
    (p, s), = fact.factors
    return build_field(p, s)


@dataclass(frozen=True)
class FieldElement:
    field: FieldTable
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.field.q:
            raise ValueError(f"index {self.index} out of range for GF({self.field.q})")

    def _check(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.field is not self.field:
            raise ValueError("elements of different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.add(self.index, other.index))

    def __sub__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.sub(self.index, other.index))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.index))

    def __mul__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field.mul(self.index, other.index))

    def __truediv__(self, other):
        other = self._check(other)
        return self * FieldElement(self.field, self.field.inv(other.index))

    def __pow__(self, e: int):
        if e < 0:
            return FieldElement(self.field, self.field.pow(self.field.inv(self.index), -e))
        return FieldElement(self.field, self.field.pow(self.index, e))

    def __int__(self):
        return self.index

    def __repr__(self):
        return f"GF({self.field.q})[{self.index}]"


def field_trace(x: FieldElement) -> int:
    """Absolute trace ``x + x^p + ... + x^(p^(s-1))`` as an element of Z_p."""
    return x.field.trace(x.index)


def chi(x: FieldElement) -> complex:
    return complex(x.field.chi(x.index))


def bichar(x: FieldElement, y: FieldElement) -> complex:
    if x.field is not y.field:
        raise ValueError("elements of different fields")
    return complex(x.field.bichar(x.index, y.index))
