import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isotomo.cmat import hs_inner, is_projection, is_unitary
from isotomo.gfq import field_of_order
from isotomo.phase_space import enumerate_isotropic_lines, intersection_count, shift_line, symplectic
from isotomo.weyl import (
    GfWeylLabel,
    WeylBasis,
    alpha_phase,
    faithful_offsets,
    field_eigenbasis,
    gf_labels,
    gf_weyl,
    line_eigenbasis,
    proj_P,
    tensor_proj,
    unitary_basis_F,
    zd_commutation_phase,
    zd_weyl,
)
from isotomo.zmod import factorize

QS = [2, 3, 4, 5, 8, 9]


def test_zd_weyl_examples():
    assert np.array_equal(zd_weyl((0, 0), 5), np.eye(5))
    assert np.allclose(zd_weyl((1, 1), 2), [[0, -1], [1, 0]])
    X = zd_weyl((1, 0), 3)
    assert np.allclose(X @ np.eye(3)[:, 0], np.eye(3)[:, 1])
    with pytest.raises(ValueError):
        zd_weyl((0, 0), 1)


def test_zd_commutation_exhaustive_d4():
    d = 4
    pts = list(itertools.product(range(d), repeat=2))
    for s, t in itertools.product(pts, repeat=2):
        A, B = zd_weyl(s, d), zd_weyl(t, d)
        assert np.allclose(A @ B, zd_commutation_phase(s, t, d) * B @ A, atol=1e-12)
        if symplectic(s, t, d) == 0:
            assert np.linalg.norm(A @ B - B @ A) <= 1e-12


@pytest.mark.parametrize("d", range(2, 9))
def test_zd_isotropic_pairs_commute(d):
    pts = list(itertools.product(range(d), repeat=2))
    mats = {s: zd_weyl(s, d) for s in pts}
    for s, t in itertools.combinations(pts, 2):
        if symplectic(s, t, d) == 0:
            assert np.linalg.norm(mats[s] @ mats[t] - mats[t] @ mats[s]) <= 1e-12


@pytest.mark.parametrize("q", [3, 5, 9, 2, 4, 8])
def test_alpha_cocycle(q):
    F = field_of_order(q)
    for a in range(q):
        A = F.element(a)
        assert alpha_phase(A, F.element(0)) == 1
        for x, y in itertools.product(range(q), repeat=2):
            lhs = alpha_phase(A, F.element(x)) * alpha_phase(A, F.element(y)) * F.bichar(F.mul(a, x), y)
            assert abs(lhs - alpha_phase(A, F.element(F.add(x, y)))) < 1e-12


def test_alpha_odd_closed_form():
    F = field_of_order(5)
    for a, x in itertools.product(range(5), repeat=2):
        # 2^-1 = 3 in Z_5
        assert np.isclose(alpha_phase(F.element(a), F.element(x)), np.exp(2j * np.pi * (3 * a * x * x % 5) / 5))


def test_alpha_q2_fixed():
    F = field_of_order(2)
    assert alpha_phase(F.element(1), F.element(1)) == 1j
    with pytest.raises(ValueError):
        alpha_phase(F.element(1), field_of_order(3).element(1))


def test_gf_weyl_q2_examples():
    F = field_of_order(2)
    assert np.allclose(gf_weyl(2, 1, F), np.diag([1, -1]))
    assert np.allclose(gf_weyl(0, 1, F), [[0, 1], [1, 0]])
    X, Z = np.array([[0, 1], [1, 0]]), np.diag([1, -1])
    assert np.allclose(gf_weyl(1, 1, F), 1j * X @ Z)
    assert np.allclose(proj_P(2, 0, F), np.diag([1, 0]))
    assert np.allclose(proj_P(0, 0, F), (np.eye(2) + X) / 2)
    with pytest.raises(ValueError):
        gf_weyl(0, 2, F)
    with pytest.raises(ValueError):
        gf_weyl(3, 1, F)


def test_gf_weyl_returns_copy():
    F = field_of_order(3)
    M = gf_weyl(1, 1, F)
    M[0, 0] = 99
    assert gf_weyl(1, 1, F)[0, 0] != 99


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_group_law(q):
    F = field_of_order(q)
    for a in range(q + 1):
        assert np.allclose(gf_weyl(a, 0, F), np.eye(q))
        for x, y in itertools.product(range(q), repeat=2):
            W = gf_weyl(a, x, F) @ gf_weyl(a, y, F)
            assert np.max(np.abs(W - gf_weyl(a, F.add(x, y), F))) <= 1e-12


@pytest.mark.parametrize("q", QS)
def test_projection_identities(q):
    F = field_of_order(q)
    P = {(a, z): proj_P(a, z, F) for a in range(q + 1) for z in range(q)}
    for a in range(q + 1):
        assert np.allclose(sum(P[a, y] for y in range(q)), np.eye(q), atol=1e-10)  # resolution of identity
        for x in range(q):
            W = sum(F.bichar(x, y) * P[a, y] for y in range(q))  # spectral expansion
            assert np.max(np.abs(W - gf_weyl(a, x, F))) <= 1e-10
            assert is_projection(P[a, x], 1e-10)
            assert abs(np.trace(P[a, x]) - 1) <= 1e-10
    for (a, x), (b, z) in itertools.product(P, repeat=2):
        tr = np.trace(P[a, x] @ P[b, z])
        if a != b:
            assert abs(tr - 1 / q) <= 1e-10  # unbiased across families
        elif x != z:
            assert np.max(np.abs(P[a, x] @ P[b, z])) <= 1e-10  # orthogonal within a family


@pytest.mark.parametrize("d", [2, 3, 4, 6, 12])
def test_unitary_basis_gram(d):
    ops = [M for _, M in unitary_basis_F(factorize(d))]
    assert len(ops) == d * d
    A = np.array([M.ravel() for M in ops])
    G = A.conj() @ A.T
    assert np.max(np.abs(G - d * np.eye(d * d))) <= 1e-10
    assert all(is_unitary(M) for M in ops)


def test_unitary_basis_d2_members():
    basis = unitary_basis_F(factorize(2))
    labs = [lab for lab, _ in basis]
    assert labs[0].is_identity and len(basis) == 4
    X, Z = np.array([[0, 1], [1, 0]]), np.diag([1, -1])
    expected = [np.eye(2), X, 1j * X @ Z, Z]
    for E in expected:
        assert sum(np.allclose(M, E) for _, M in basis) == 1


def test_gf_labels_d6():
    labs = gf_labels(factorize(6))
    assert len(labs) == 36 and labs[0].is_identity
    assert len({lab.support for lab in labs}) == 4
    assert GfWeylLabel((None, (0, 1))) < GfWeylLabel(((0, 1), None))


@pytest.mark.parametrize("J,rank", [((0, 1), 1), ((0,), 3), ((1,), 2), ((), 6)])
def test_tensor_proj_rank(J, rank):
    fact = factorize(6)
    P = tensor_proj({j: (1, 0) for j in J}, fact)
    assert is_projection(P) and round(np.trace(P).real) == rank


def test_weyl_basis():
    b = WeylBasis("zd", 4)
    assert len(b.labels) == 15 and b.identity_label == (0, 0)
    assert not b.operator((1, 0)).flags.writeable
    g = WeylBasis("gf", 6)
    assert len(g.labels) == 35 and g.identity_label.is_identity
    with pytest.raises(ValueError):
        WeylBasis("xx", 4)
    with pytest.raises(ValueError):
        WeylBasis("zd", 37)


def test_line_eigenbasis_examples():
    d = 4
    lines = {L.pointset: L for L in enumerate_isotropic_lines(d)}
    vert = line_eigenbasis(lines[frozenset((0, n) for n in range(d))])
    comp = [np.diag(np.eye(d)[j]) for j in range(d)]
    for P in vert.projections:
        assert sum(np.allclose(P, E, atol=1e-10) for E in comp) == 1
    hor = line_eigenbasis(lines[frozenset((m, 0) for m in range(d))])
    F = np.exp(2j * np.pi * np.outer(range(d), range(d)) / d) / np.sqrt(d)
    fourier = [np.outer(F[:, k], F[:, k].conj()) for k in range(d)]
    for P in hor.projections:
        assert sum(np.allclose(P, E, atol=1e-10) for E in fourier) == 1
    assert [lab.shift for lab in hor.labels] == list(range(d))
    assert all(lab.shift is None for lab in vert.labels)


def test_line_eigenbasis_d2_mub():
    systems = [line_eigenbasis(L) for L in enumerate_isotropic_lines(2)]
    assert len(systems) == 3
    for A, B in itertools.combinations(systems, 2):
        for P, Q in itertools.product(A.projections, B.projections):
            assert abs(np.trace(P @ Q) - 0.5) < 1e-10


@pytest.mark.parametrize("d", range(2, 9))
def test_line_eigenbasis_is_system(d):
    for L in enumerate_isotropic_lines(d):
        sys_ = line_eigenbasis(L)
        assert len(sys_) == d and sys_.check()
        for P in sys_.projections:
            assert abs(np.trace(P) - 1) < 1e-10
            for g in L.generators:
                U = zd_weyl(g, d)
                assert np.allclose(U @ P, P @ U, atol=1e-10)


@pytest.mark.parametrize("d", range(2, 7))
def test_overlap_counts_intersections(d):
    systems = [(L, line_eigenbasis(L)) for L in enumerate_isotropic_lines(d) if L.faithful]
    for (L1, S1), (L2, S2) in itertools.product(systems, repeat=2):
        for lab1, P in zip(S1.labels, S1.projections):
            for lab2, Q in zip(S2.labels, S2.projections):
                count = intersection_count(shift_line(L1, lab1.shift), shift_line(L2, lab2.shift))
                assert abs(d * np.trace(P @ Q).real - count) <= 1e-8


@pytest.mark.parametrize("d", range(2, 37))
def test_faithful_offsets_exist(d):
    off = faithful_offsets(d)
    assert sorted(off) == list(range(d)) and off[0] == 0
    assert all(k % 2 == (c * (d - 1)) % 2 for c, k in off.items())


def test_field_eigenbasis():
    fact = factorize(6)
    sys_ = field_eigenbasis((2, 1), fact)
    assert len(sys_) == 6 and sys_.check()
    assert sys_.labels[0] == (0, 0)
    with pytest.raises(ValueError):
        field_eigenbasis((1,), fact)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 8, 9]), st.data())
def test_weyl_unbiased_across_families(q, data):
    F = field_of_order(q)
    a = data.draw(st.integers(0, q))
    b = data.draw(st.integers(0, q).filter(lambda v: v != a))
    x, z = data.draw(st.integers(0, q - 1)), data.draw(st.integers(0, q - 1))
    rho = proj_P(a, x, F)
    assert abs(np.trace(rho @ proj_P(b, z, F)) - 1 / q) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 7, 9]), st.data())
def test_weyl_hs_orthogonality_property(q, data):
    F = field_of_order(q)
    a, b = data.draw(st.integers(0, q)), data.draw(st.integers(0, q))
    x, y = data.draw(st.integers(1, q - 1)), data.draw(st.integers(1, q - 1))
    ip = hs_inner(gf_weyl(a, x, F), gf_weyl(b, y, F))
    assert abs(ip - (q if (a, x) == (b, y) else 0)) < 1e-10
