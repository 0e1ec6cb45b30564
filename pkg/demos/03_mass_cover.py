"""
Covering a unitary system by commuting families
===============================================

Every non-identity basis element must be measured by at least one
maximal commuting family. The number of families needed (delta) decides
the size of the tomography design.
"""

from isotomo.mass_cover import cover_for, line_masses
from isotomo.weyl import WeylBasis

# For prime d every nonzero phase-space point is on exactly one line, so
# all d + 1 lines are needed.
for d in (3, 5, 7):
    print(f"d={d}: delta={cover_for(WeylBasis('zd', d)).delta}")

# At composite d the two bases behave differently. With the field basis
# delta is the product of (d_j + 1); with the cyclic basis the exact search
# decides.
print("\n  d  delta(zd)  delta(gf)  lines")
for d in (4, 6, 8, 10, 12):
    zd = cover_for(WeylBasis("zd", d))
    gf = cover_for(WeylBasis("gf", d))
    print(f"{d:3d} {zd.delta:9d} {gf.delta:10d} {len(line_masses(d)):6d}")

# At d=4 the non-cyclic line is dropped by the minimal cover: its three
# points all lie on cyclic lines that are needed anyway.
cover = cover_for(WeylBasis("zd", 4))
print("\nd=4 cover uses the non-cyclic line:",
      any(not m.source.cyclic for m in cover.masses))
