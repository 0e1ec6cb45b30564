"""
Reduced tomography designs
==========================

Measure in the eigenbases of a minimal cover, then drop projections
whose probabilities can be inferred from others in a club of
measurements sharing a coarse constraint. Finally, reconstruct random
states two ways.
"""

import numpy as np

from isotomo import tomo
from isotomo.zmod import factorize

# d = 6 and d = 10 are twice an odd number, so the pure-POVM bound applies.
for d in (6, 10):
    design = tomo.build_design(d, "gf", reduce=True)
    print(f"d={d}: delta={design.delta} unreduced={design.unreduced_size} "
          f"reduced={design.size} bound={design.bound} rank={design.reduced.completeness_rank}")

# A club: measurements whose outcomes refine the eigenspaces of one
# shared operator. All but the first lose one outcome per block of rank > 1.
design = tomo.build_design(6, "gf", reduce=True)
for c in design.clubs:
    print(f"club generator={c.constraint.generator} g={len(c.members)} "
          f"ranks={c.constraint.ranks} size={c.design.size}")
    drop = c.design.dropped[0]
    residual = np.linalg.norm(c.design.recovered_projection(drop) - c.design.projection(drop.v, drop.j))
    print(f"  first drop (v={drop.v}, j={drop.j}) rebuilt from {len(drop.recipe)} terms, "
          f"residual {residual:.1e}")

# Round trip on random states with both reconstructors.
d = 6
fact = factorize(d)
projs = design.reduced.kept_projections()
rng = np.random.default_rng(7)
for trial in range(3):
    rho = tomo.random_density(d, rng)
    lin = tomo.reconstruct_linear(tomo.simulate_probabilities(rho, projs), projs, d)
    ie = tomo.reconstruct_inclusion_exclusion(tomo.field_probabilities(rho, fact), fact)
    print(f"trial {trial}: linear {np.linalg.norm(lin - rho):.1e}, "
          f"inclusion-exclusion {np.linalg.norm(ie - rho):.1e}")
