"""
Weyl operators over a finite field
==================================

Build W(a, x) on L^2(GF(q)), check the group law inside each a-family,
and see that eigenbases from different families are mutually unbiased.
"""

import itertools

import numpy as np

from isotomo.gfq import field_of_order
from isotomo.weyl import gf_weyl, proj_P

q = 4
F = field_of_order(q)
print(f"GF({q}) with modulus coefficients {F.modulus}")

# Within one family, W(a, x) W(a, y) = W(a, x + y). In characteristic 2
# this needs the fourth-root-of-unity phase, not a plain sign.
worst = 0.0
for a in range(q + 1):
    for x, y in itertools.product(range(q), repeat=2):
        W = gf_weyl(a, x, F) @ gf_weyl(a, y, F)
        worst = max(worst, np.abs(W - gf_weyl(a, F.add(x, y), F)).max())
print(f"group law residual: {worst:.1e}")

# Each family has q rank-one eigenprojections. Between families every
# overlap is 1/q, which makes the q + 1 bases a complete MUB set.
overlaps = set()
for a, b in itertools.combinations(range(q + 1), 2):
    for x, z in itertools.product(range(q), repeat=2):
        overlaps.add(round(float(np.trace(proj_P(a, x, F) @ proj_P(b, z, F)).real), 12))
print("overlaps between distinct families:", overlaps)
