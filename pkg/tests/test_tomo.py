import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isotomo.mass_cover import a_tuple_masses, line_masses
from isotomo.phase_space import enumerate_isotropic_lines
from isotomo.tomo import (
    ConstrainedClub,
    ElementaryMeasurement,
    IncompleteDesignError,
    NonCyclicOverlapError,
    as_density,
    build_design,
    certify_complete,
    constraint_from_generator,
    constraint_from_overlap,
    field_probabilities,
    is_Q_constrained,
    measurement_from_mass,
    povm_size_bound,
    random_density,
    reconstruct_inclusion_exclusion,
    reconstruct_linear,
    reduce_club,
    simulate_probabilities,
)
from isotomo.weyl import WeylBasis, field_eigenbasis, proj_P
from isotomo.gfq import field_of_order
from isotomo.zmod import factorize

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.diag([1.0 + 0j, -1.0]),
}


def bloch_oracle(rho):
    """Reconstruct a qubit state from the six Pauli eigenprojection probabilities."""
    r = []
    for s in "xyz":
        plus = (np.eye(2) + PAULI[s]) / 2
        r.append(2 * np.trace(rho @ plus).real - 1)
    return (np.eye(2) + sum(ri * PAULI[s] for ri, s in zip(r, "xyz"))) / 2


def test_random_density_is_state():
    rng = np.random.default_rng(0)
    for d in (2, 5):
        as_density(random_density(d, rng))
    with pytest.raises(ValueError):
        as_density(np.diag([1.0, 1.0]))
    with pytest.raises(ValueError):
        as_density(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        as_density(np.array([[1, 1], [0, 0]]))


def test_elementary_measurement_validation():
    with pytest.raises(ValueError):
        ElementaryMeasurement([np.eye(2)], [0])
    with pytest.raises(ValueError):
        ElementaryMeasurement([np.diag([1, 0]), np.diag([1, 0])], [0, 1])


def test_measurement_from_clique_mass():
    from isotomo.mass_cover import clique_masses
    M = clique_masses(WeylBasis("zd", 3))[0]
    E = measurement_from_mass(M)
    assert len(E) == 3


@pytest.mark.parametrize("seed", range(5))
def test_qubit_matches_bloch_oracle(seed):
    rho = random_density(2, np.random.default_rng(seed))
    design = build_design(2, "gf", reduce=False)
    projs = design.reduced.kept_projections()
    assert len(projs) == 6
    lin = reconstruct_linear(simulate_probabilities(rho, projs), projs, 2)
    assert np.linalg.norm(lin - bloch_oracle(rho)) < 1e-12
    fact = factorize(2)
    ie = reconstruct_inclusion_exclusion(field_probabilities(rho, fact), fact)
    assert np.linalg.norm(ie - bloch_oracle(rho)) < 1e-12


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_literal_convention_fails(d):
    fact = factorize(d)
    rho = random_density(d, np.random.default_rng(1))
    bad = reconstruct_inclusion_exclusion(field_probabilities(rho, fact, "literal"), fact, "literal")
    assert np.linalg.norm(bad - rho) > 1e-3


def test_inclusion_exclusion_errors():
    fact = factorize(6)
    with pytest.raises(ValueError):
        reconstruct_inclusion_exclusion({}, fact)
    with pytest.raises(ValueError):
        field_probabilities(np.eye(6) / 6, fact, "other")


def test_linear_errors():
    d = 3
    projs = [field_eigenbasis((0,), factorize(3)).projections[0]]
    with pytest.raises(IncompleteDesignError):
        reconstruct_linear([0.3], projs, d)
    with pytest.raises(ValueError):
        reconstruct_linear([0.3, 0.1], projs, d)
    design = build_design(3, "gf", reduce=False)
    P = design.reduced.kept_projections()
    probs = np.full(len(P), 0.9)
    with pytest.raises(ValueError):
        reconstruct_linear(probs, P, d)


def test_simulate_checks_shape():
    with pytest.raises(ValueError):
        simulate_probabilities(np.eye(2) / 2, [np.eye(3)])


def test_unbiased_probability():
    F = field_of_order(4)
    rho = proj_P(1, 2, F)
    for z in range(4):
        assert abs(simulate_probabilities(rho, [proj_P(3, z, F)])[0] - 0.25) < 1e-12


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("basis", ["gf", "zd"])
def test_round_trip(d, basis):
    design = build_design(d, basis)
    assert design.reduced.complete and design.reduced.completeness_rank == d * d
    projs = design.reduced.kept_projections()
    rng = np.random.default_rng(d)
    for _ in range(3):
        rho = random_density(d, rng)
        est = reconstruct_linear(simulate_probabilities(rho, projs), projs, d)
        assert np.linalg.norm(est - rho) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([2, 3, 4, 6]), st.integers(0, 2**32 - 1))
def test_reconstructors_agree(d, seed):
    fact = factorize(d)
    rho = random_density(d, np.random.default_rng(seed))
    projs = build_design(d, "gf").reduced.kept_projections()
    lin = reconstruct_linear(simulate_probabilities(rho, projs), projs, d)
    ie = reconstruct_inclusion_exclusion(field_probabilities(rho, fact), fact)
    assert np.linalg.norm(lin - ie) <= 1e-8


# -------------------------------------------------------- constraints & clubs


def _zd_club(d, gen):
    basis = WeylBasis("zd", d)
    Q = constraint_from_generator(gen, basis)
    masses = [m for m in line_masses(d) if gen in m.members]
    meas = [measurement_from_mass(m) for m in masses]
    return masses, ConstrainedClub.build(meas, Q)


def test_constraint_d4():
    masses, club = _zd_club(4, (2, 0))
    assert club.constraint.tau == 2 and club.constraint.ranks == [2, 2]
    assert club.g == 3 and club.T == [0, 1]
    assert len(constraint_from_overlap(masses[:2]).blocks) == 2


def test_non_cyclic_overlap():
    lines = [L for L in enumerate_isotropic_lines(4)]
    masses = [m for m in line_masses(4) if {(2, 0), (0, 2)} <= m.members]
    assert len(masses) == 1
    from isotomo.mass_cover import mass_from_line
    noncyc = mass_from_line(next(L for L in lines if not L.cyclic))
    # the non-cyclic line shares only one element with any cyclic line
    other = mass_from_line(next(L for L in lines if (2, 2) in L.pointset and L.cyclic))
    constraint_from_overlap([noncyc, other])
    with pytest.raises(NonCyclicOverlapError):
        constraint_from_overlap([noncyc, noncyc])
    with pytest.raises(NonCyclicOverlapError):
        gf = a_tuple_masses(factorize(4))
        constraint_from_overlap(gf[:1])
    with pytest.raises(ValueError):
        constraint_from_overlap(line_masses(3)[:2])


def test_not_constrained():
    basis = WeylBasis("zd", 4)
    Q = constraint_from_generator((2, 0), basis)
    vert = next(m for m in line_masses(4) if (0, 1) in m.members)
    assert is_Q_constrained(measurement_from_mass(vert), Q) is None
    with pytest.raises(ValueError):
        ConstrainedClub.build([measurement_from_mass(vert)], Q)


@pytest.mark.parametrize("d,gen", [(4, (2, 0)), (4, (0, 2)), (4, (2, 2)), (6, (3, 0)), (6, (0, 2)), (6, (3, 3))])
def test_reduce_club_zd(d, gen):
    _, club = _zd_club(d, gen)
    red = reduce_club(club)
    assert red.size == club.g * d - (club.g - 1) * len(club.T)
    for drop in red.dropped:
        P = red.projection(drop.v, drop.j)
        assert np.linalg.norm(red.recovered_projection(drop) - P) <= 1e-10
    assert red.completeness_rank == certify_complete(
        [P for m in club.measurements for P in m.projections], d)[1]
    rho = random_density(d, np.random.default_rng(0))
    kept = simulate_probabilities(rho, red.kept_projections())
    full = red.recover_probabilities(kept)
    for (v, j), p in full.items():
        assert abs(p - np.trace(rho @ red.projection(v, j)).real) < 1e-10


@pytest.mark.parametrize("d", [4, 6])
@pytest.mark.parametrize("basis", ["zd", "gf"])
def test_design_clubs(d, basis):
    design = build_design(d, basis)
    for club in design.clubs:
        g = len(club.members)
        T = sum(r > 1 for r in club.constraint.ranks)
        assert club.design.size == g * d - (g - 1) * T
        assert all(np.linalg.norm(club.design.recovered_projection(x) - club.design.projection(x.v, x.j)) <= 1e-10
                   for x in club.design.dropped)
    assert design.reduced.completeness_rank == d * d


def test_reduce_club_refusals():
    _, club = _zd_club(4, (2, 0))
    single = ConstrainedClub(club.measurements[:1], club.constraint, club.blocks[:1])
    with pytest.raises(ValueError):
        reduce_club(single)
    basis = WeylBasis("zd", 3)
    Q = constraint_from_generator((1, 0), basis)
    m = [measurement_from_mass(x) for x in line_masses(3) if (1, 0) in x.members]
    with pytest.raises(ValueError):
        reduce_club(ConstrainedClub.build(m + m, Q))


@pytest.mark.parametrize("d,basis,delta,unreduced,size", [
    (6, "gf", 12, 72, 48),
    (6, "zd", 12, 72, 48),
    (10, "gf", 18, 180, 120),
    (4, "zd", 6, 24, 18),
    (3, "gf", 4, 12, 12),
])
def test_design_sizes(d, basis, delta, unreduced, size):
    design = build_design(d, basis)
    assert (design.delta, design.unreduced_size, design.size) == (delta, unreduced, size)
    assert design.reduced.complete


def test_size_bound():
    assert povm_size_bound(6, 12) == 52
    assert povm_size_bound(10, 18) == 148
    for d in (2, 4, 8, 12):
        with pytest.raises(ValueError):
            povm_size_bound(d, 1)
    design = build_design(6)
    assert design.bound == 52 and design.within_bound
    assert build_design(4, "zd").bound is None and build_design(4, "zd").within_bound is None


def test_unreduced_design_keeps_everything():
    design = build_design(6, reduce=False)
    assert design.size == 72 and not design.reduced.dropped and not design.clubs
