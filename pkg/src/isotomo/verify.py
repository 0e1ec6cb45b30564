"""Runtime invariant checks behind ``isotomo verify``.

Each check raises ``AssertionError`` on the first violation it finds.
"""

from __future__ import annotations

import itertools
import math
import time
from typing import NamedTuple

import numpy as np

from . import cmat, tomo
from .gfq import build_field
from .mass_cover import check_mass, cover_for, line_masses
from .phase_space import (
    enumerate_isotropic_lines,
    intersection_count,
    line_count,
    lines_through,
    orthogonal,
    shift_line,
    subgroup_generated,
)
from .weyl import WeylBasis, gf_weyl, line_eigenbasis, proj_P, zd_weyl
from .zmod import factorize, gcd3_zero_as_d

FIELDS = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (2, 5), (2, 6)]


class CheckResult(NamedTuple):
    name: str
    passed: bool
    seconds: float
    detail: str


def check_factorize():
    for d in range(1, 20001):
        f = factorize(d)
        assert math.prod(p**s for p, s in f) == d, d


def check_gcd3():
    for d in range(2, 25):
        for m, n in itertools.product(range(d), repeat=2):
            h = gcd3_zero_as_d(m, n, d)
            assert d % h == 0 and all(x % h == 0 for x in (m, n) if x), (m, n, d)


def check_field_axioms():
    for p, s in FIELDS:
        F = build_field(p, s)
        add, mul = F.tables
        q = F.q
        e = np.arange(q)
        # associativity and distributivity, exhaustive
        for a in range(q):
            assert (add[add[a][:, None], e[None, :]] == add[a][add]).all(), (q, "add assoc")
            assert (mul[mul[a][:, None], e[None, :]] == mul[a][mul]).all(), (q, "mul assoc")
            assert (mul[a][add] == add[mul[a][:, None], mul[a][None, :]]).all(), (q, "distrib")
        assert (add == add.T).all() and (mul == mul.T).all()
        for a in range(1, q):
            assert mul[a, F.inv(a)] == 1
        assert (add[e, F.neg(e)] == 0).all()


def check_character():
    for p, s in FIELDS:
        F = build_field(p, s)
        add, mul = F.tables
        chi = F.chi(np.arange(F.q))
        assert np.allclose(chi[add], chi[:, None] * chi[None, :], atol=1e-12, rtol=0)
        assert not np.allclose(chi, 1)
        B = chi[mul]
        assert np.allclose(B, B.T)
        # <x, .> is trivial only for x = 0
        trivial = np.all(np.isclose(B, 1), axis=1)
        assert trivial[0] and not trivial[1:].any()


def check_joint_eigenprojections():
    for d in range(2, 17):
        for L in enumerate_isotropic_lines(d)[:4]:
            ops = [zd_weyl(s, d) for s in L.points]
            P, ev = cmat.joint_eigensystem(ops)
            assert np.allclose(sum(P), np.eye(d), atol=1e-10)
            for i, j in itertools.product(range(len(P)), repeat=2):
                target = P[i] if i == j else 0
                assert np.allclose(P[i] @ P[j], target, atol=1e-10)
            for k, U in enumerate(ops):
                rec = sum(e[k] * Pi for e, Pi in zip(ev, P))
                assert np.linalg.norm(rec - U) <= 1e-9


def check_line_counts():
    for d in range(2, 37):
        lines = enumerate_isotropic_lines(d)
        assert len(lines) == line_count(d), d
        covered = set().union(*(L.pointset for L in lines))
        assert len(covered) == d * d
        if all(d % k for k in range(2, d)):
            assert len(lines) == d + 1


def check_lagrangian():
    for d in range(2, 13):
        for L in enumerate_isotropic_lines(d):
            assert orthogonal(L.points, d) == L.pointset
        for m, n in itertools.product(range(d), repeat=2):
            if (m, n) != (0, 0) and gcd3_zero_as_d(m, n, d) == 1:
                through = lines_through((m, n), d)
                assert [L.pointset for L in through] == [subgroup_generated((m, n), d)]


def check_field_identities():
    for p, s in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2)]:
        F = build_field(p, s)
        q = F.q
        I = np.eye(q)
        P = {(a, y): proj_P(a, y, F) for a in range(q + 1) for y in range(q)}
        for a in range(q + 1):
            assert np.allclose(sum(P[a, y] for y in range(q)), I, atol=1e-10)
            for x in range(q):
                W = gf_weyl(a, x, F)
                assert np.allclose(W, sum(F.bichar(x, y) * P[a, y] for y in range(q)), atol=1e-10)
                for y in range(q):
                    assert np.allclose(W @ gf_weyl(a, y, F), gf_weyl(a, F.add(x, y), F), atol=1e-12)
        for (a, x), (b, z) in itertools.product(P, repeat=2):
            t = np.trace(P[a, x] @ P[b, z]).real
            want = 1 / q if a != b else float(x == z)
            assert abs(t - want) <= 1e-10, (q, a, x, b, z)


def check_overlap_formula():
    for d in range(2, 7):
        lines = [L for L in enumerate_isotropic_lines(d) if L.faithful]
        bases = [line_eigenbasis(L) for L in lines]
        for (L1, B1), (L2, B2) in itertools.product(zip(lines, bases), repeat=2):
            for P, la in zip(B1.projections, B1.labels):
                for Q, lb in zip(B2.projections, B2.labels):
                    count = intersection_count(shift_line(L1, la.shift), shift_line(L2, lb.shift))
                    assert abs(d * np.trace(P @ Q).real - count) <= 1e-8


def check_zd_commutation():
    for d in range(2, 9):
        pts = list(itertools.product(range(d), repeat=2))
        U = {s: zd_weyl(s, d) for s in pts}
        for s, t in itertools.product(pts, repeat=2):
            if (s[0] * t[1] - t[0] * s[1]) % d == 0:
                assert np.linalg.norm(U[s] @ U[t] - U[t] @ U[s]) <= 1e-12


def check_masses():
    for d in range(2, 10):
        for kind in ("zd", "gf"):
            B = WeylBasis(kind, d)
            cover = cover_for(B)
            assert frozenset().union(*(m.members for m in cover.masses)) == frozenset(B.labels)
            for M in cover.masses:
                assert len(M) == d - 1
                abelian, maximal = check_mass(M, B)
                assert abelian and maximal, (d, kind, M.source)
        masses = line_masses(d)
        assert len(masses) == line_count(d)


def check_round_trip():
    rng = np.random.default_rng(2024)
    for d in (2, 3, 4, 5, 6, 8, 9, 12):
        design = tomo.build_design(d, "gf" if d != 8 else "zd")
        projs = design.reduced.kept_projections()
        for _ in range(5):
            rho = tomo.random_density(d, rng)
            est = tomo.reconstruct_linear(tomo.simulate_probabilities(rho, projs), projs, d)
            assert np.linalg.norm(est - rho) <= 1e-9, d


def check_reduction():
    for d in (4, 6):
        for kind in ("zd", "gf"):
            design = tomo.build_design(d, kind)
            for club in design.clubs:
                g, T = len(club.members), sum(r > 1 for r in club.constraint.ranks)
                assert club.design.size == g * d - (g - 1) * T
                assert club.design.size < g * d
            red = design.reduced
            for drop in red.dropped:
                assert np.linalg.norm(red.recovered_projection(drop) - red.projection(drop.v, drop.j)) <= 1e-10
            assert red.complete and red.completeness_rank == d * d


SUITES = {
    "zmod": [check_factorize, check_gcd3],
    "gfq": [check_field_axioms, check_character],
    "cmat": [check_joint_eigenprojections],
    "phase_space": [check_line_counts, check_lagrangian],
    "weyl": [check_field_identities, check_overlap_formula, check_zd_commutation],
    "mass_cover": [check_masses],
    "tomo": [check_reduction, check_round_trip],
}


def run_suite(name: str = "all", stop_on_failure: bool = True) -> list[CheckResult]:
    if name == "all":
        checks = [c for cs in SUITES.values() for c in cs]
    elif name in SUITES:
        checks = SUITES[name]
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {['all', *SUITES]}")
    results = []
    for check in checks:
        t0 = time.perf_counter()
        try:
            check()
            results.append(CheckResult(check.__name__, True, time.perf_counter() - t0, ""))
        except AssertionError as exc:
            results.append(CheckResult(check.__name__, False, time.perf_counter() - t0, repr(exc.args)))
            if stop_on_failure:
                break
    return results
