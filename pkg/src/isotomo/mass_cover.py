"""Maximal abelian subsystems (W-MASSes) of a Weyl unitary system, and
minimum covers of the system by them."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .phase_space import IsotropicLine, enumerate_isotropic_lines, is_lagrangian
from .weyl import GfWeylLabel, WeylBasis, factor_fields
from .zmod import Factorization

log = logging.getLogger(__name__)

COMMUTE_TOL = 1e-12
CLIQUE_MAX_DIM = 8
NODE_BUDGET = 10**6


@dataclass(frozen=True)
class Mass:
    """A maximal commuting set of non-identity basis labels."""

    kind: str  # "zd" | "gf"
    d: int
    members: frozenset
    source: object = field(compare=False)  # IsotropicLine, a-tuple or "clique"

    def __len__(self):
        return len(self.members)

    def sorted_members(self):
        if self.kind == "zd":
            return sorted(self.members)
        return sorted(self.members, key=GfWeylLabel.sort_key)

    def to_json(self) -> dict:
        out = {"basis": self.kind, "d": self.d}
        if isinstance(self.source, IsotropicLine):
            out["line"] = [list(p) for p in self.source.points]
        elif isinstance(self.source, tuple):
            out["a"] = list(self.source)
        if self.kind == "zd":
            out["members"] = [list(m) for m in self.sorted_members()]
        else:
            out["members"] = [m.to_json() for m in self.sorted_members()]
        return out


def mass_from_line(line: IsotropicLine) -> Mass:
    if not is_lagrangian(line.points, line.d):
        raise ValueError("line is not Lagrangian")
    members = frozenset(p for p in line.points if p != (0, 0))
    return Mass("zd", line.d, members, line)


def line_masses(d: int) -> list[Mass]:
    return [mass_from_line(L) for L in enumerate_isotropic_lines(d)]


def mass_from_a_tuple(a, fact: Factorization) -> Mass:
    """Every field-basis element whose ``a``-components agree with ``a`` on its support."""
    fields = factor_fields(fact)
    a = tuple(int(v) for v in a)
    if len(a) != len(fields):
        raise ValueError("a must have one entry per prime-power factor")
    for v, F in zip(a, fields):
        if not 0 <= v <= F.q:
            raise ValueError(f"a-component {v} outside GF({F.q}) + marker")
    per = [[None] + [(v, x) for x in range(1, F.q)] for v, F in zip(a, fields)]
    members = frozenset(GfWeylLabel(e) for e in itertools.product(*per))
    members -= {GfWeylLabel((None,) * len(fields))}
    return Mass("gf", fact.d, members, a)


def a_tuple_masses(fact: Factorization) -> list[Mass]:
    ranges = [range(F.q + 1) for F in factor_fields(fact)]
    return [mass_from_a_tuple(a, fact) for a in itertools.product(*ranges)]


def commutes(basis: WeylBasis, l1, l2, tol: float = COMMUTE_TOL) -> bool:
    A, B = basis.operator(l1), basis.operator(l2)
    return bool(np.linalg.norm(A @ B - B @ A) <= tol * basis.d)


def check_mass(mass: Mass, basis: WeylBasis, tol: float = COMMUTE_TOL) -> tuple[bool, bool]:
    """(members pairwise commute, no outside element commutes with all)."""
    members = mass.sorted_members()
    abelian = all(commutes(basis, x, y, tol) for x, y in itertools.combinations(members, 2))
    outside = [l for l in basis.labels if l not in mass.members]
    maximal = not any(all(commutes(basis, l, m, tol) for m in members) for l in outside)
    return abelian, maximal


def clique_masses(basis: WeylBasis, tol: float = COMMUTE_TOL) -> list[Mass]:
    """Maximal cliques of the commutation graph. Exponential; d <= 8 only."""
    import networkx as nx

    if basis.d > CLIQUE_MAX_DIM:
        raise ValueError(f"clique enumeration is limited to d <= {CLIQUE_MAX_DIM}")
    G = nx.Graph()
    G.add_nodes_from(range(len(basis.labels)))
    labels = basis.labels
    for i, j in itertools.combinations(range(len(labels)), 2):
        if commutes(basis, labels[i], labels[j], tol):
            G.add_edge(i, j)
    cliques = sorted(sorted(c) for c in nx.find_cliques(G))
    return [Mass(basis.kind, basis.d, frozenset(labels[i] for i in c), "clique") for c in cliques]


@dataclass
class MassCover:
    masses: list[Mass]
    covered: frozenset
    exact: bool
    lower_bound: int
    nodes: int = 0

    @property
    def delta(self) -> int:
        return len(self.masses)

    @property
    def gap(self) -> int:
        return self.delta - self.lower_bound

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "exact": self.exact,
            "lower_bound": self.lower_bound,
            "masses": [m.to_json() for m in self.masses],
        }


class _BudgetExceeded(Exception):
    pass


def _popcount(x: int) -> int:
    return bin(x).count("1")


def minimal_cover(masses, basis_labels, budget: int = NODE_BUDGET) -> MassCover:
    """Minimum-cardinality subfamily of ``masses`` whose union is ``basis_labels``.

    Branch and bound seeded with the greedy cover. Branching is on the
    uncovered label with the fewest candidate masses, so masses that are
    the only cover of some label are taken without search. If the node
    budget runs out the best cover found is returned with ``exact=False``.
    """
    masses = list(masses)
    universe = sorted(set(basis_labels), key=_label_key)
    pos = {lab: i for i, lab in enumerate(universe)}
    full = (1 << len(universe)) - 1
    sets = []
    for M in masses:
        bits = 0
        for lab in M.members:
            if lab in pos:
                bits |= 1 << pos[lab]
        sets.append(bits)
    if _union(sets) & full != full:
        raise ValueError("candidate masses do not cover the basis labels")
    containing = [[k for k, s in enumerate(sets) if s >> i & 1] for i in range(len(universe))]
    biggest = max(_popcount(s) for s in sets)

    # greedy upper bound
    greedy, unc = [], full
    while unc:
        k = max(range(len(sets)), key=lambda k: (_popcount(sets[k] & unc), -k))
        greedy.append(k)
        unc &= ~sets[k]
    best = [sorted(greedy)]
    root_lb = -(-len(universe) // biggest)
    nodes = 0

    def search(chosen, unc):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _BudgetExceeded
        if not unc:
            if len(chosen) < len(best[0]):
                best[0] = sorted(chosen)
            return
        if len(chosen) + -(-_popcount(unc) // biggest) >= len(best[0]):
            return
        rest = unc
        pick, fewest = None, None
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            rest ^= low
            n = len(containing[i])
            if fewest is None or n < fewest:
                pick, fewest = i, n
                if n == 1:
                    break
        cands = sorted(containing[pick], key=lambda k: (-_popcount(sets[k] & unc), k))
        for k in cands:
            search(chosen + [k], unc & ~sets[k])

    exact = True
    try:
        search([], full)
    except _BudgetExceeded:
        exact = False
        log.warning("set-cover node budget %d exhausted; returning best cover found", budget)
    chosen = best[0]
    lb = len(chosen) if exact else root_lb
    return MassCover([masses[k] for k in chosen], frozenset(universe), exact, lb, nodes)


def _union(values) -> int:
    out = 0
    for v in values:
        out |= v
    return out


def _label_key(label):
    return label.sort_key() if isinstance(label, GfWeylLabel) else label


def cover_for(basis: WeylBasis, budget: int = NODE_BUDGET) -> MassCover:
    """Minimum cover using the structured MASS family of ``basis``."""
    masses = line_masses(basis.d) if basis.kind == "zd" else a_tuple_masses(basis.fact)
    return minimal_cover(masses, basis.labels, budget)
