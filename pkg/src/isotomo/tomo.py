"""Elementary measurements, constraint families, club reduction, and state
reconstruction.

A *club* is a set of elementary measurements that all refine one coarse
projection family ``Q``.  Inside a club every measurement after the first
can drop one outcome per block ``Q_t`` of rank > 1, because that outcome
equals ``Q_t`` minus its siblings and ``Q_t`` is the sum of the matching
outcomes of the first measurement.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from . import cmat
from .mass_cover import Mass, MassCover, cover_for
from .phase_space import IsotropicLine, subgroup_generated
from .weyl import (
    GfWeylLabel,
    ProjectionSystem,
    WeylBasis,
    factor_fields,
    field_eigenbasis,
    line_eigenbasis,
    tensor_proj,
)
from .zmod import Factorization, factorize

log = logging.getLogger(__name__)

ATOL = 1e-10
MATCH_TOL = 1e-8
COMPLETENESS_RTOL = 1e-8


class IncompleteDesignError(ValueError):
    pass


class NonCyclicOverlapError(ValueError):
    pass


# ----------------------------------------------------------- states


def as_density(rho, tol: float = ATOL) -> np.ndarray:
    """Validate a density matrix: Hermitian, PSD, unit trace."""
    rho = np.asarray(rho, dtype=complex)
    if not cmat.is_hermitian(rho, tol):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError("density matrix does not have unit trace")
    if np.linalg.eigvalsh((rho + cmat.dag(rho)) / 2)[0] < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def random_density(d: int, rng: np.random.Generator) -> np.ndarray:
    """``G G^* / tr(G G^*)`` for a complex Gaussian ``G``."""
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = G @ cmat.dag(G)
    return rho / np.trace(rho).real


# ----------------------------------------------------------- measurements


@dataclass
class ElementaryMeasurement:
    """``d`` mutually orthogonal rank-one projections summing to the identity."""

    projections: list
    labels: list
    source: Mass | None = None

    def __post_init__(self):
        d = len(self.projections[0])
        if len(self.projections) != d:
            raise ValueError(f"expected {d} outcomes, got {len(self.projections)}")
        for P in self.projections:
            if abs(np.trace(P).real - 1) > ATOL:
                raise ValueError("outcome projection is not rank one")
        if not np.allclose(sum(self.projections), np.eye(d), atol=ATOL):
            raise ValueError("outcomes do not sum to the identity")

    @property
    def d(self) -> int:
        return len(self.projections)

    def __len__(self):
        return len(self.projections)


def measurement_from_mass(mass: Mass) -> ElementaryMeasurement:
    """Common eigenbasis of a MASS, as rank-one projections."""
    if mass.kind == "zd" and isinstance(mass.source, IsotropicLine):
        ps = line_eigenbasis(mass.source)
    elif mass.kind == "gf" and isinstance(mass.source, tuple):
        ps = field_eigenbasis(mass.source, factorize(mass.d))
    else:
        basis = WeylBasis(mass.kind, mass.d)
        members = mass.sorted_members()
        projs, evals = cmat.joint_eigensystem([basis.operator(m) for m in members])
        if len(projs) != mass.d:
            raise ValueError("degenerate joint spectrum: the set is not maximal abelian")
        ps = ProjectionSystem(labels=list(range(len(projs))), projections=projs)
    return ElementaryMeasurement(ps.projections, ps.labels, mass)


@dataclass
class ConstraintFamily:
    """Mutually orthogonal projections ``Q_t`` summing to the identity."""

    blocks: list
    generator: object = None
    eigenvalues: list = field(default_factory=list)

    def __post_init__(self):
        d = len(self.blocks[0])
        if not np.allclose(sum(self.blocks), np.eye(d), atol=ATOL):
            raise ValueError("constraint blocks do not sum to the identity")

    @property
    def tau(self) -> int:
        return len(self.blocks)

    @property
    def ranks(self) -> list[int]:
        return [int(round(np.trace(Q).real)) for Q in self.blocks]


def constraint_from_generator(label, basis: WeylBasis) -> ConstraintFamily:
    projs, evals = cmat.joint_eigensystem([basis.operator(label)])
    return ConstraintFamily(projs, label, [e[0] for e in evals])


def _overlap_generator(masses: list[Mass]):
    common = frozenset.intersection(*(m.members for m in masses))
    if not common:
        raise ValueError("the masses share no basis element")
    first = masses[0]
    if first.kind == "zd":
        d = first.d
        group = common | {(0, 0)}
        for sigma in sorted(common):
            if subgroup_generated(sigma, d) == group:
                return sigma
        raise NonCyclicOverlapError(f"overlap subgroup of order {len(group)} is not cyclic")
    fact = factorize(first.d)
    support = sorted({j for lab in common for j in lab.support})
    if any(fact.factors[j][1] > 1 for j in support):
        raise NonCyclicOverlapError("overlap contains a non-prime field factor")
    a = first.source
    entries = tuple((a[j], 1) if j in support else None for j in range(fact.k))
    gen = GfWeylLabel(entries)
    if gen not in common:  # pragma: no cover - structural guarantee
        raise NonCyclicOverlapError("overlap is not generated by a single element")
    return gen


def constraint_from_overlap(masses: list[Mass]) -> ConstraintFamily:
    """Eigenprojections of a generator of the (cyclic) common part of ``masses``."""
    masses = list(masses)
    if len({(m.kind, m.d) for m in masses}) != 1:
        raise ValueError("masses come from different bases")
    gen = _overlap_generator(masses)
    return constraint_from_generator(gen, WeylBasis(masses[0].kind, masses[0].d))


def is_Q_constrained(P: ElementaryMeasurement, Q: ConstraintFamily, tol: float = ATOL):
    """Partition of outcome indices into blocks summing to each ``Q_t``, or None."""
    if P.d != len(Q.blocks[0]):
        raise ValueError("dimension mismatch")
    blocks = [[] for _ in Q.blocks]
    for j, Pj in enumerate(P.projections):
        weights = [np.trace(Qt @ Pj).real for Qt in Q.blocks]
        t = int(np.argmax(weights))
        if abs(weights[t] - 1) > MATCH_TOL:
            return None
        blocks[t].append(j)
    for t, Qt in enumerate(Q.blocks):
        S = sum((P.projections[j] for j in blocks[t]), np.zeros_like(Qt))
        if not np.allclose(S, Qt, atol=tol):
            return None
    return blocks


@dataclass
class ConstrainedClub:
    measurements: list[ElementaryMeasurement]
    constraint: ConstraintFamily
    blocks: list  # blocks[v][t] = outcome indices of measurement v in Q_t

    @classmethod
    def build(cls, measurements, constraint: ConstraintFamily) -> ConstrainedClub:
        blocks = []
        for v, P in enumerate(measurements):
            b = is_Q_constrained(P, constraint)
            if b is None:
                raise ValueError(f"measurement {v} is not Q-constrained")
            blocks.append(b)
        return cls(list(measurements), constraint, blocks)

    @property
    def g(self) -> int:
        return len(self.measurements)

    @property
    def T(self) -> list[int]:
        return [t for t, r in enumerate(self.constraint.ranks) if r > 1]


# ----------------------------------------------------------- reduction


@dataclass(frozen=True)
class Drop:
    """Outcome ``j`` of measurement ``v``, recoverable as ``sum coef * P``."""

    v: int
    t: int
    j: int
    recipe: tuple  # ((v', j', coef), ...)

    def to_json(self):
        return {
            "v": self.v,
            "t": self.t,
            "j": self.j,
            "recipe": [{"v": a, "j": b, "coef": c} for a, b, c in self.recipe],
        }


@dataclass
class ReducedDesign:
    measurements: list[ElementaryMeasurement]
    kept: list  # (v, j)
    dropped: list[Drop]
    completeness_rank: int = 0
    complete: bool = False

    @property
    def size(self) -> int:
        return len(self.kept)

    def projection(self, v, j):
        return self.measurements[v].projections[j]

    def kept_projections(self) -> list:
        return [self.projection(v, j) for v, j in self.kept]

    def recovered_projection(self, drop: Drop):
        return sum(c * self.projection(v, j) for v, j, c in drop.recipe)

    def recover_probabilities(self, kept_probs) -> dict:
        """All outcome probabilities, the dropped ones rebuilt from their recipes."""
        probs = dict(zip(self.kept, np.asarray(kept_probs, dtype=float)))
        for drop in self.dropped:
            probs[(drop.v, drop.j)] = sum(c * probs[(v, j)] for v, j, c in drop.recipe)
        return probs


def reduce_club(club: ConstrainedClub, offset: int = 0) -> ReducedDesign:
    """Drop the largest index of every rank>1 block from measurements 2..g.

    ``offset`` is added to measurement indices in the output, for splicing
    several clubs into one design.
    """
    T = club.T
    if club.g < 2:
        raise ValueError("a club needs at least two measurements")
    if club.constraint.tau < 2:
        raise ValueError("the constraint family needs at least two blocks")
    if not T:
        raise ValueError("no block of rank > 1: nothing to reduce")
    first = club.blocks[0]
    kept = [(offset, j) for j in range(club.measurements[0].d)]
    dropped = []
    for v in range(1, club.g):
        meas = club.measurements[v]
        drop_here = {}
        for t in T:
            j_drop = max(club.blocks[v][t])
            siblings = [j for j in club.blocks[v][t] if j != j_drop]
            recipe = tuple(
                [(offset, j, 1.0) for j in first[t]] + [(offset + v, j, -1.0) for j in siblings]
            )
            drop = Drop(offset + v, t, j_drop, recipe)
            rec = club.constraint.blocks[t] - sum(
                (meas.projections[j] for j in siblings), np.zeros_like(meas.projections[0])
            )
            resid = np.linalg.norm(rec - meas.projections[j_drop])
            if resid > ATOL:
                raise AssertionError(f"recovery residual {resid:.3g} for drop {drop}")
            drop_here[j_drop] = drop
        kept += [(offset + v, j) for j in range(meas.d) if j not in drop_here]
        dropped += [drop_here[j] for j in sorted(drop_here)]
    expected = club.g * club.measurements[0].d - (club.g - 1) * len(T)
    if len(kept) != expected:  # pragma: no cover
        raise AssertionError("size accounting mismatch")
    design = ReducedDesign(list(club.measurements), kept, dropped)
    design.complete, design.completeness_rank = certify_complete(
        design.kept_projections() + [design.recovered_projection(x) for x in dropped],
        club.measurements[0].d,
    )
    return design


def certify_complete(projs, d: int, tol: float = COMPLETENESS_RTOL) -> tuple[bool, int]:
    """Whether ``projs`` together with the identity span all Hermitian d x d matrices."""
    rank = cmat.real_span_rank(list(projs) + [np.eye(d, dtype=complex)], tol)
    return rank == d * d, rank


# ----------------------------------------------------------- simulation & inversion


def simulate_probabilities(rho, projs) -> np.ndarray:
    """Born probabilities ``Tr(rho P)``."""
    rho = as_density(rho)
    out = []
    for P in projs:
        if P.shape != rho.shape:
            raise ValueError("dimension mismatch between state and projection")
        out.append(np.real(np.vdot(P, rho)))  # tr(P^* rho) = tr(P rho) for Hermitian P
    return np.clip(np.array(out), 0.0, 1.0)


@dataclass
class _HermitianFrame:
    d: int

    def __post_init__(self):
        d = self.d
        mats = []
        for k in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[k, k] = 1
            mats.append(E)
        for k, l in itertools.combinations(range(d), 2):
            E = np.zeros((d, d), dtype=complex)
            E[k, l] = E[l, k] = 1 / np.sqrt(2)
            mats.append(E)
            F = np.zeros((d, d), dtype=complex)
            F[k, l], F[l, k] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            mats.append(F)
        self.mats = np.array(mats)

    def coefficients(self, P):
        return np.real(np.einsum("rij,ji->r", self.mats, P))


def reconstruct_linear(probs, projs, d: int, tol: float = MATCH_TOL) -> np.ndarray:
    """Unique unit-trace Hermitian matrix reproducing ``probs`` (least squares)."""
    projs = list(projs)
    probs = np.asarray(probs, dtype=float)
    if len(probs) != len(projs):
        raise ValueError("one probability per projection is required")
    frame = _HermitianFrame(d)
    A = np.array([frame.coefficients(P) for P in projs] + [frame.coefficients(np.eye(d))])
    b = np.concatenate([probs, [1.0]])
    sv = np.linalg.svd(A, compute_uv=False)
    if np.sum(sv > COMPLETENESS_RTOL * sv[0]) < d * d:
        raise IncompleteDesignError("projections do not determine the state")
    c, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = np.abs(A @ c - b).max()
    if resid > tol:
        raise ValueError(f"inconsistent probabilities (residual {resid:.3g})")
    rho = np.einsum("r,rij->ij", c, frame.mats)
    return (rho + cmat.dag(rho)) / 2


def _field_keys(fact: Factorization, convention: str):
    fields = factor_fields(fact)
    k = fact.k
    if convention not in ("full", "literal"):
        raise ValueError(f"unknown convention {convention!r}")
    first = 0 if convention == "full" else 1
    for r in range(first, k + 1):
        for J in itertools.combinations(range(k), r):
            a_ranges = [range(fields[j].q + 1) for j in J]
            x_ranges = [range(0 if convention == "full" else 1, fields[j].q) for j in J]
            for a in itertools.product(*a_ranges):
                for x in itertools.product(*x_ranges):
                    yield J, a, x


def _field_proj(J, a, x, fact):
    return tensor_proj({j: (aj, xj) for j, aj, xj in zip(J, a, x)}, fact)


def field_probabilities(rho, fact: Factorization, convention: str = "full") -> dict:
    """``Tr(rho P(a, x))`` for every key ``(J, a, x)`` of the inclusion-exclusion sum."""
    rho = as_density(rho)
    return {
        key: float(np.real(np.vdot(_field_proj(*key, fact), rho)))
        for key in _field_keys(fact, convention)
    }


def reconstruct_inclusion_exclusion(probs: dict, fact: Factorization, convention: str = "full"):
    """``sum_J (-1)^(k-|J|) S(J)`` with ``S(J) = sum Tr(rho P(a,x)) P(a,x)``.

    ``convention="full"`` lets every supported ``x`` range over the whole
    field and includes ``J = ()`` with ``S(()) = Tr(rho) I``; this is the
    form that reproduces ``rho``.  ``"literal"`` restricts to nonempty ``J``
    and nonzero ``x`` and is kept only to show that it does not.
    """
    d, k = fact.d, fact.k
    rho = np.zeros((d, d), dtype=complex)
    for key in _field_keys(fact, convention):
        if key not in probs:
            raise ValueError(f"missing probability for {key}")
        J = key[0]
        sign = (-1) ** (k - len(J))
        rho += sign * probs[key] * _field_proj(*key, fact)
    return rho


def povm_size_bound(d: int, delta: int) -> int:
    """``4 + (d - 2) delta`` for ``d = 2r`` with ``r`` odd and ``>= 3``."""
    if d % 2 or (d // 2) % 2 == 0 or d < 6:
        raise ValueError(f"d={d} is not twice an odd number >= 3")
    return 4 + (d - 2) * delta


def bound_applies(d: int) -> bool:
    return d >= 6 and d % 2 == 0 and (d // 2) % 2 == 1


# ----------------------------------------------------------- full pipeline


@dataclass
class Club:
    members: list[int]  # indices into the design's measurement list
    constraint: ConstraintFamily
    design: ReducedDesign


@dataclass
class TomographyDesign:
    d: int
    basis: str
    cover: MassCover
    measurements: list[ElementaryMeasurement]
    clubs: list[Club]
    reduced: ReducedDesign
    bound: int | None

    @property
    def delta(self) -> int:
        return self.cover.delta

    @property
    def size(self) -> int:
        return self.reduced.size

    @property
    def unreduced_size(self) -> int:
        return self.delta * self.d

    @property
    def within_bound(self) -> bool | None:
        return None if self.bound is None else self.size <= self.bound


def _club_candidates(masses: list[Mass], free: set[int], basis: WeylBasis):
    """Map generator label -> unassigned mass indices containing its cyclic group."""
    cands = {}
    for i in sorted(free):
        M = masses[i]
        if M.kind == "zd":
            gens = set()
            for sigma in M.members:
                C = subgroup_generated(sigma, M.d)
                if len(C) < M.d:
                    gens.add(min(s for s in C if subgroup_generated(s, M.d) == C))
        else:
            fact = basis.fact
            prime_factors = [j for j in range(fact.k) if fact.factors[j][1] == 1]
            gens = set()
            for r in range(1, fact.k):
                for J in itertools.combinations(prime_factors, r):
                    gens.add(GfWeylLabel(tuple(
                        (M.source[j], 1) if j in J else None for j in range(fact.k))))
        for g in gens:
            cands.setdefault(g, []).append(i)
    return cands


def _sort_key(label):
    return label.sort_key() if isinstance(label, GfWeylLabel) else label


def plan_clubs(masses: list[Mass], basis: WeylBasis) -> list[tuple[object, list[int]]]:
    """Greedy partition of cover masses into clubs sharing a cyclic overlap.

    Repeatedly picks the generator whose eigen-blocks of rank > 1 are most
    numerous (the per-measurement saving), breaking ties by club size and
    then by label order.
    """
    free = set(range(len(masses)))
    clubs = []
    cache = {}
    while True:
        best = None
        for gen, members in _club_candidates(masses, free, basis).items():
            if len(members) < 2:
                continue
            if gen not in cache:
                cache[gen] = constraint_from_generator(gen, basis)
            T = sum(r > 1 for r in cache[gen].ranks)
            if T == 0 or cache[gen].tau < 2:
                continue
            key = (T, len(members))
            if best is None or key > best[0] or (key == best[0] and _sort_key(gen) < _sort_key(best[1])):
                best = (key, gen, members)
        if best is None:
            return clubs
        _, gen, members = best
        clubs.append((gen, members))
        free -= set(members)


def build_design(d: int, basis: str = "gf", reduce: bool = True) -> TomographyDesign:
    """Cover, measure, and (optionally) reduce: the whole construction for one d."""
    B = WeylBasis(basis, d)
    cover = cover_for(B)
    if not cover.exact:
        log.warning("cover for d=%d is not proven minimal (gap %d)", d, cover.gap)
    measurements = [measurement_from_mass(m) for m in cover.masses]
    kept_v = {v: list(range(d)) for v in range(len(measurements))}
    dropped: list[Drop] = []
    clubs = []
    if reduce:
        for gen, members in plan_clubs(cover.masses, B):
            Q = constraint_from_generator(gen, B)
            club = ConstrainedClub.build([measurements[v] for v in members], Q)
            local = reduce_club(club)
            remap = dict(enumerate(members))
            for drop in local.dropped:
                g = Drop(remap[drop.v], drop.t, drop.j,
                         tuple((remap[a], b, c) for a, b, c in drop.recipe))
                dropped.append(g)
                kept_v[g.v].remove(g.j)
            clubs.append(Club(members, Q, local))
    kept = [(v, j) for v in sorted(kept_v) for j in kept_v[v]]
    dropped.sort(key=lambda x: (x.v, x.j))
    reduced = ReducedDesign(measurements, kept, dropped)
    reduced.complete, reduced.completeness_rank = certify_complete(reduced.kept_projections(), d)
    bound = povm_size_bound(d, cover.delta) if bound_applies(d) else None
    design = TomographyDesign(d, basis, cover, measurements, clubs, reduced, bound)
    if reduce and bound is not None and not design.within_bound:
        raise AssertionError(f"design size {design.size} exceeds the bound {bound}")
    return design
