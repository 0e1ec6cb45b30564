"""Finite phase-space geometry and Weyl-operator tomography.

The layers build on each other: modular arithmetic and finite fields,
isotropic lines of ``Z_d^2``, Weyl unitary bases and their eigenprojections,
minimal covers by maximal abelian subsystems, and finally reduced
informationally complete measurement designs with two reconstructors.
"""

from .gfq import FieldTable, build_field, field_of_order
from .mass_cover import Mass, MassCover, cover_for, minimal_cover
from .phase_space import IsotropicLine, enumerate_isotropic_lines, line_count, shift_line
from .tomo import (
    build_design,
    random_density,
    reconstruct_inclusion_exclusion,
    reconstruct_linear,
    reduce_club,
    simulate_probabilities,
)
from .weyl import WeylBasis, gf_weyl, line_eigenbasis, proj_P, unitary_basis_F, zd_weyl
from .zmod import factorize

__version__ = "0.1.0"

__all__ = [
    "FieldTable",
    "IsotropicLine",
    "Mass",
    "MassCover",
    "WeylBasis",
    "build_design",
    "build_field",
    "cover_for",
    "enumerate_isotropic_lines",
    "factorize",
    "field_of_order",
    "gf_weyl",
    "line_count",
    "line_eigenbasis",
    "minimal_cover",
    "proj_P",
    "random_density",
    "reconstruct_inclusion_exclusion",
    "reconstruct_linear",
    "reduce_club",
    "shift_line",
    "simulate_probabilities",
    "unitary_basis_F",
    "zd_weyl",
]
