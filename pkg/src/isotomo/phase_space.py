"""The discrete phase space X = Z_d x Z_d and its isotropic lines.

Points are handled as ``(m, n)`` int tuples with an explicit modulus
passed alongside; :class:`PhasePoint` bundles the two for callers that
want a single value.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .zmod import factorize, gcd3_zero_as_d

MAX_LINE_MODULUS = 36


class PhasePoint(NamedTuple):
    m: int
    n: int
    d: int

    @classmethod
    def of(cls, m, n, d):
        return cls(m % d, n % d, d)

    @property
    def mn(self):
        return (self.m, self.n)


def _mn(sigma):
    return (sigma[0], sigma[1])


def _modulus(*points, d=None):
    ds = {p.d for p in points if isinstance(p, PhasePoint)}
    if d is not None:
        ds.add(d)
    if len(ds) > 1:
        raise ValueError(f"modulus mismatch: {sorted(ds)}")
    if not ds:
        raise ValueError("modulus d is required for bare tuples")
    return ds.pop()


def symplectic(s1, s2, d: int | None = None) -> int:
    """``w(s1, s2) = m n' - m' n  (mod d)``."""
    d = _modulus(s1, s2, d=d)
    (m, n), (m2, n2) = _mn(s1), _mn(s2)
    return (m * n2 - m2 * n) % d


def is_subgroup(M, d: int) -> bool:
    M = {_mn(s) for s in M}
    if (0, 0) not in M:
        return False
    return all(((a + c) % d, (b + e) % d) in M for a, b in M for c, e in M)


def orthogonal(M, d: int) -> frozenset:
    """``M^w``: all points with vanishing symplectic product against ``M``."""
    M = {_mn(s) for s in M}
    if not is_subgroup(M, d):
        raise ValueError("M is not a subgroup of Z_d^2")
    return frozenset(
        (a, b)
        for a in range(d)
        for b in range(d)
        if all((a * n - m * b) % d == 0 for m, n in M)
    )


def is_isotropic(M, d: int) -> bool:
    return {_mn(s) for s in M} <= orthogonal(M, d)


def is_lagrangian(M, d: int) -> bool:
    return frozenset(_mn(s) for s in M) == orthogonal(M, d)


def subgroup_generated(sigma, d: int | None = None) -> frozenset:
    """The cyclic subgroup ``{t sigma}``; it has ``d // h`` elements."""
    d = _modulus(sigma, d=d)
    m, n = _mn(sigma)
    return frozenset(((t * m) % d, (t * n) % d) for t in range(d))


def point_order(sigma, d: int) -> int:
    m, n = _mn(sigma)
    return d // gcd3_zero_as_d(m % d, n % d, d)


def line_count(d: int) -> int:
    """Number of isotropic lines, ``prod (p^(s+1) - 1) / (p - 1)``."""
    total = 1
    for p, s in factorize(d):
        total *= (p ** (s + 1) - 1) // (p - 1)
    return total


@dataclass(frozen=True)
class IsotropicLine:
    """A Lagrangian submodule of Z_d^2 (``d`` points, ``M == M^w``)."""

    d: int
    points: tuple[tuple[int, int], ...]

    def __contains__(self, sigma):
        return _mn(sigma) in self.pointset

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @functools.cached_property
    def pointset(self) -> frozenset:
        return frozenset(self.points)

    @functools.cached_property
    def generators(self) -> tuple[tuple[int, int], ...]:
        """A smallest generating set: one point if cyclic, else a pair."""
        d = self.d
        best = max(point_order(s, d) for s in self.points)
        tops = [s for s in self.points if point_order(s, d) == best]
        if best == d:
            return (tops[0],)
        for s in tops:
            cs = subgroup_generated(s, d)
            for t in self.points:
                if len(_sum_subgroups(cs, subgroup_generated(t, d), d)) == d:
                    return (s, t)
        raise AssertionError("lines are generated by at most two points")

    @property
    def cyclic(self) -> bool:
        return len(self.generators) == 1

    @property
    def faithful(self) -> bool:
        """True when the line meets the axis ``{(0, n)}`` only at the origin.

        Exactly then the ``d`` translates by ``(0, i)`` are pairwise distinct
        and the line is ``{(m, c m)}`` for a unique slope ``c``.
        """
        return not any(m == 0 and n != 0 for m, n in self.points)

    @property
    def slope(self) -> int | None:
        if not self.faithful:
            return None
        return dict(self.points)[1] if self.d > 1 else 0

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "points": [list(p) for p in self.points],
            "cyclic": self.cyclic,
            "generators": [list(g) for g in self.generators],
        }


def _sum_subgroups(A, B, d):
    a = np.array(sorted(A))
    b = np.array(sorted(B))
    s = (a[:, None, :] + b[None, :, :]) % d
    codes = np.unique(s[..., 0] * d + s[..., 1])
    return frozenset((int(c) // d, int(c) % d) for c in codes)


def _make_line(pointset, d):
    return IsotropicLine(d, tuple(sorted(pointset)))


@functools.lru_cache(maxsize=None)
def enumerate_isotropic_lines(d: int, max_d: int = MAX_LINE_MODULUS) -> tuple[IsotropicLine, ...]:
    """All Lagrangian submodules of Z_d^2, sorted by their point lists.

    Every subgroup of Z_d^2 is a sum of two cyclic subgroups, and an
    isotropic subgroup of order d is Lagrangian, so the search runs over
    pairs of distinct cyclic subgroups with commuting generators.
    """
    if not isinstance(d, int) or d < 2 or d > max_d:
        raise ValueError(f"d must be in [2, {max_d}], got {d!r}")
    cyclic = {}
    for m in range(d):
        for n in range(d):
            C = subgroup_generated((m, n), d)
            cyclic.setdefault(C, (m, n))
    subgroups = sorted(cyclic.items(), key=lambda kv: (-len(kv[0]), kv[1]))
    found = set()
    for i, (A, a) in enumerate(subgroups):
        if len(A) == d:
            if all(symplectic(a, s, d) == 0 for s in A):
                found.add(A)
            continue
        for B, b in subgroups[i + 1 :]:
            if len(A) * len(B) < d or B <= A:
                continue
            if symplectic(a, b, d) != 0:
                continue
            S = _sum_subgroups(A, B, d)
            if len(S) == d:
                found.add(S)
    lines = sorted((_make_line(S, d) for S in found), key=lambda L: L.points)
    return tuple(lines)


def lines_through(sigma, d: int | None = None) -> list[IsotropicLine]:
    d = _modulus(sigma, d=d)
    sigma = (sigma[0] % d, sigma[1] % d)
    if sigma == (0, 0):
        raise ValueError("every line passes through the origin")
    return [L for L in enumerate_isotropic_lines(d) if sigma in L.pointset]


@dataclass(frozen=True)
class ShiftedLine:
    """The translate ``(lambda, i) = {sigma + (0, i)}``."""

    line: IsotropicLine
    shift: int

    @property
    def d(self):
        return self.line.d

    @functools.cached_property
    def points(self) -> frozenset:
        d = self.line.d
        return frozenset((m, (n + self.shift) % d) for m, n in self.line.points)


def shift_line(line: IsotropicLine, i: int) -> ShiftedLine:
    if not 0 <= i < line.d:
        raise ValueError(f"shift {i} out of range for d={line.d}")
    return ShiftedLine(line, i)


def intersection_count(A: ShiftedLine, B: ShiftedLine) -> int:
    if A.d != B.d:
        raise ValueError("modulus mismatch")
    return len(A.points & B.points)


def faithful_intersection_count(c1: int, i: int, c2: int, j: int, d: int) -> int:
    """Closed form of ``|(lambda_c1, i) & (lambda_c2, j)|`` for slope lines."""
    g = math.gcd(c1 - c2, d)
    return g if (j - i) % g == 0 else 0
