"""Weyl operators on Z_d and on L^2(GF(q)), their eigenprojections, and
the tensor-product unitary basis built from the prime-power factors of d.

Label conventions
-----------------
* Z_d basis: a point ``(m, n)`` stands for ``U(m, n) = X^m Z^n``.
* Field basis: :class:`GfWeylLabel` holds, per prime-power factor, either
  ``None`` (identity on that factor) or ``(a, x)`` with ``a`` in
  ``0..q`` (``a == q`` is the extra "vertical" family) and ``x`` a nonzero
  field index.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import cmat
from .gfq import FieldElement, FieldTable, build_field
from .phase_space import IsotropicLine, is_lagrangian
from .zmod import Factorization, factorize

MAX_DIM = 36


# ---------------------------------------------------------------- Z_d family


@functools.lru_cache(maxsize=None)
def _shift_clock(d: int):
    X = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    Z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return X, Z


def zd_weyl(sigma, d: int) -> np.ndarray:
    """``X^m Z^n`` with ``X|j> = |j+1>`` and ``Z|j> = w^j |j>``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    m, n = sigma[0] % d, sigma[1] % d
    X, Z = _shift_clock(d)
    return np.linalg.matrix_power(X, m) @ np.linalg.matrix_power(Z, n)


def zd_commutation_phase(s1, s2, d: int) -> complex:
    """The scalar ``c`` with ``U(s1) U(s2) = c U(s2) U(s1)``; equals ``w^(-w(s1,s2))``."""
    w = (s1[0] * s2[1] - s2[0] * s1[1]) % d
    return np.exp(-2j * np.pi * w / d)


# ------------------------------------------------------------- field family


@functools.lru_cache(maxsize=None)
def _alpha_table(F: FieldTable) -> np.ndarray:
    """``alpha[a, x]`` for ``a, x`` in the field."""
    q, p = F.q, F.p
    a = np.arange(q)[:, None]
    x = np.arange(q)[None, :]
    if p != 2:
        half = F.inv(2 % p)
        return F.chi(F.mul(F.mul(half, a), F.mul(x, x)))
    # Characteristic 2: alpha(a, .) = i^Q with Q a Z_4-valued quadratic form
    # refining B(x, y) = Tr(a x y). On the polynomial basis e_k,
    # Q(c) = c^T B c mod 4 satisfies Q(x + y) = Q(x) + Q(y) + 2 B(x, y).
    bits = F._digits  # (q, s) coefficient vectors
    basis = 2 ** np.arange(F.s)
    table = np.empty((q, q), dtype=complex)
    for av in range(q):
        B = F.trace(F.mul(F.mul(av, basis[:, None]), basis[None, :]))
        Q = np.einsum("xk,kl,xl->x", bits, B, bits) % 4
        table[av] = 1j**Q
    return table


def alpha_phase(a: FieldElement, x: FieldElement) -> complex:
    """Phase making ``{W(a, x)}_x`` a representation of the additive group.

    It satisfies ``alpha(a,x) alpha(a,y) <a x, y> = alpha(a, x+y)``.
    """
    if a.field is not x.field:
        raise ValueError("elements of different fields")
    return complex(_alpha_table(a.field)[a.index, x.index])


@functools.lru_cache(maxsize=None)
def _shift_mats(F: FieldTable):
    """``U[x]`` with ``U_x |y> = |x + y>``; ``V[b]`` diagonal ``<b, y>``."""
    q = F.q
    y = np.arange(q)
    U = np.zeros((q, q, q), dtype=complex)
    for x in range(q):
        U[x, F.add(x, y), y] = 1
    V = np.array([np.diag(F.bichar(b, y)) for b in range(q)])
    return U, V


def _check_index(F, a, x):
    if not 0 <= x < F.q:
        raise ValueError(f"x={x} is not an element of GF({F.q})")
    if not 0 <= a <= F.q:
        raise ValueError(f"a={a} is outside GF({F.q}) + marker")


@functools.lru_cache(maxsize=None)
def _gf_weyl_cached(F: FieldTable, a: int, x: int) -> np.ndarray:
    U, V = _shift_mats(F)
    if a == F.q:
        out = V[x].copy()
    else:
        out = _alpha_table(F)[a, x] * (U[x] @ V[F.mul(a, x)])
    out.setflags(write=False)
    return out


def gf_weyl(a: int, x: int, F: FieldTable) -> np.ndarray:
    """``W(a, x) = alpha(a,x) U_x V_(a x)``, or ``V_x`` when ``a == q``."""
    _check_index(F, a, x)
    return _gf_weyl_cached(F, int(a), int(x)).copy()


@functools.lru_cache(maxsize=None)
def _proj_cached(F: FieldTable, a: int, z: int) -> np.ndarray:
    q = F.q
    out = sum(np.conj(F.bichar(z, y)) * _gf_weyl_cached(F, a, y) for y in range(q)) / q
    out.setflags(write=False)
    return out


def proj_P(a: int, z: int, F: FieldTable) -> np.ndarray:
    """``P(a, z) = q^-1 sum_y conj(<z, y>) W(a, y)``, a rank-one projection."""
    _check_index(F, a, z)
    return _proj_cached(F, int(a), int(z)).copy()


# ------------------------------------------------------------ tensor basis


@dataclass(frozen=True)
class GfWeylLabel:
    entries: tuple  # per factor: None or (a, x)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, e in enumerate(self.entries) if e is not None)

    @property
    def is_identity(self) -> bool:
        return not self.support

    def sort_key(self):
        return tuple((-1, -1) if e is None else e for e in self.entries)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def to_json(self):
        return [None if e is None else list(e) for e in self.entries]

    def __repr__(self):
        return f"W{self.entries}"


def factor_fields(fact: Factorization) -> tuple[FieldTable, ...]:
    return tuple(build_field(p, s) for p, s in fact)


def _check_dim(d):
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds the bound {MAX_DIM}")


def gf_tensor_weyl(label: GfWeylLabel, fact: Factorization) -> np.ndarray:
    """Product of ampliated ``W^(j)(a_j, x_j)`` over the support of ``label``."""
    fields = factor_fields(fact)
    if len(label.entries) != len(fields):
        raise ValueError("label does not match the factorization")
    mats = []
    for F, e in zip(fields, label.entries):
        mats.append(np.eye(F.q, dtype=complex) if e is None else _gf_weyl_cached(F, *e))
    return cmat.kron(*mats) if mats else np.eye(1, dtype=complex)


def gf_labels(fact: Factorization) -> list[GfWeylLabel]:
    """All d^2 labels of the field basis, identity first."""
    per = []
    for F in factor_fields(fact):
        per.append([None] + [(a, x) for a in range(F.q + 1) for x in range(1, F.q)])
    return sorted((GfWeylLabel(e) for e in itertools.product(*per)), key=GfWeylLabel.sort_key)


def unitary_basis_F(fact: Factorization) -> list[tuple[GfWeylLabel, np.ndarray]]:
    _check_dim(fact.d)
    return [(lab, gf_tensor_weyl(lab, fact)) for lab in gf_labels(fact)]


def tensor_proj(labels: dict, fact: Factorization) -> np.ndarray:
    """``prod_j P^(j)(a_j, y_j)`` over the factors in ``labels``; identity elsewhere."""
    fields = factor_fields(fact)
    mats = []
    for j, F in enumerate(fields):
        if j in labels:
            a, y = labels[j]
            _check_index(F, a, y)
            mats.append(_proj_cached(F, a, y))
        else:
            mats.append(np.eye(F.q, dtype=complex))
    return cmat.kron(*mats) if mats else np.eye(1, dtype=complex)


@dataclass
class WeylBasis:
    """One of the two unitary bases, with cached operator matrices."""

    kind: str  # "zd" or "gf"
    d: int
    fact: Factorization = field(init=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("zd", "gf"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.d < 2:
            raise ValueError("d must be >= 2")
        _check_dim(self.d)
        self.fact = factorize(self.d)

    @functools.cached_property
    def identity_label(self):
        return (0, 0) if self.kind == "zd" else GfWeylLabel((None,) * self.fact.k)

    @functools.cached_property
    def labels(self) -> list:
        """Non-identity labels in canonical order."""
        if self.kind == "zd":
            return [(m, n) for m in range(self.d) for n in range(self.d) if (m, n) != (0, 0)]
        return gf_labels(self.fact)[1:]

    def operator(self, label) -> np.ndarray:
        if label not in self._cache:
            if self.kind == "zd":
                M = zd_weyl(label, self.d)
            else:
                M = gf_tensor_weyl(label, self.fact)
            M.setflags(write=False)
            self._cache[label] = M
        return self._cache[label]


# ----------------------------------------------------- projection systems


class LineLabel(NamedTuple):
    """Outcome label of a line eigenbasis.

    ``character`` lists, per line generator, the eigenvalue exponent ``k``
    (eigenvalue ``exp(i pi k / d)``, ``0 <= k < 2d``).  ``shift`` is the
    translate index ``i`` of ``(lambda, i)``, or None when the line is not
    faithful.
    """

    character: tuple[int, ...]
    shift: int | None


@dataclass
class ProjectionSystem:
    labels: list
    projections: list
    context: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.projections)

    def check(self, tol: float = cmat.ATOL) -> bool:
        d = len(self.projections[0])
        total = sum(self.projections)
        if not np.allclose(total, np.eye(d), atol=tol):
            return False
        for i, P in enumerate(self.projections):
            for Q in self.projections[i + 1 :]:
                if not np.allclose(P @ Q, 0, atol=tol):
                    return False
        return all(cmat.is_projection(P, tol) for P in self.projections)


@functools.lru_cache(maxsize=None)
def faithful_offsets(d: int) -> dict[int, int]:
    """Generator eigenvalue exponent carried by ``(lambda_c, 0)`` for each slope c.

    On the line ``{(m, c m)}`` the eigenvalue of ``U(m, c m)`` on the outcome
    whose generator ``U(1, c)`` has eigenvalue ``exp(i pi k / d)`` is
    ``exp(i pi (k m - c m (m-1)) / d)``.  Two slope lines share the points
    with ``m`` a multiple of ``d / gcd(c - c', d)``; the offsets are chosen
    so that the zero-shift outcomes agree there, which is what makes
    ``d Tr(P P')`` count common points of the shifted lines.  Offsets are
    fixed by ``k_0 = 0``, the smallest admissible ``k_1``, then the
    lexicographically smallest consistent choice.
    """

    def parity(c):
        # U(1, c)^d = (-1)^(c (d-1)) forces the parity of k
        return (c * (d - 1)) % 2

    def compatible(c, kc, c2, kc2):
        g = math.gcd(c - c2, d)
        if g == 1:
            return True
        m = d // g
        return (kc * m - c * m * (m - 1) - kc2 * m + c2 * m * (m - 1)) % (2 * d) == 0

    offsets = {0: 0}
    if d > 1:
        offsets[1] = parity(1)

    def search(c):
        if c == d:
            return True
        for k in range(parity(c), 2 * d, 2):
            if all(compatible(c, k, c2, offsets[c2]) for c2 in range(c)):
                offsets[c] = k
                if search(c + 1):
                    return True
        offsets.pop(c, None)
        return False

    if not search(2):  # pragma: no cover - verified for all d <= 36
        raise RuntimeError(f"no consistent shift labelling for d={d}")
    return dict(offsets)


def _exponent(z: complex, d: int) -> int:
    return int(round(np.angle(z) * d / np.pi)) % (2 * d)


def line_eigenbasis(line: IsotropicLine) -> ProjectionSystem:
    """Rank-one joint eigenprojections of ``{U(sigma) : sigma in line}``."""
    d = line.d
    if len(line.points) != d or not is_lagrangian(line.points, d):
        raise ValueError("line is not Lagrangian")
    gens = line.generators
    projs, evals = cmat.joint_eigensystem([zd_weyl(g, d) for g in gens])
    if len(projs) != d:
        raise AssertionError("line family does not have a simple joint spectrum")
    chars = [tuple(_exponent(z, d) for z in ev) for ev in evals]
    shifts = [None] * d
    if line.faithful:
        c = line.slope
        k0 = faithful_offsets(d)[c]
        # faithful lines are generated by (1, c)
        assert gens == ((1, c),)
        shifts = [((ch[0] - k0) // 2) % d for ch in chars]
        order = sorted(range(d), key=lambda i: shifts[i])
    else:
        order = sorted(range(d), key=lambda i: chars[i])
    return ProjectionSystem(
        labels=[LineLabel(chars[i], shifts[i]) for i in order],
        projections=[projs[i] for i in order],
        context={"kind": "line", "d": d, "points": line.points, "generators": gens},
    )


def field_eigenbasis(a: tuple, fact: Factorization) -> ProjectionSystem:
    """Product projections ``prod_j P^(j)(a_j, y_j)`` for a full a-tuple.

    Labels are the tuples ``y`` in lexicographic order.
    """
    fields = factor_fields(fact)
    if len(a) != len(fields):
        raise ValueError("a-tuple must have one entry per factor")
    ys = list(itertools.product(*[range(F.q) for F in fields]))
    projs = [tensor_proj(dict(enumerate(zip(a, y))), fact) for y in ys]
    return ProjectionSystem(labels=ys, projections=projs,
                            context={"kind": "field", "d": fact.d, "a": tuple(a)})
