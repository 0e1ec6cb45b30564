"""
Isotropic lines in a discrete phase space
=========================================

Count and draw the Lagrangian subgroups of Z_d x Z_d, and watch what
happens at composite d where some lines are not cyclic.
"""

from isotomo.phase_space import enumerate_isotropic_lines, line_count, lines_through, shift_line
from isotomo.zmod import factorize

# How many lines does each dimension have? The count is multiplicative
# over prime powers.
for d in (2, 3, 4, 5, 6, 8, 9, 12):
    print(f"d={d:2d} factors={factorize(d).factors} lines={line_count(d)}")

# At d=4 one of the seven lines is the subgroup {0,2} x {0,2}, which is
# not generated by a single point.
for L in enumerate_isotropic_lines(4):
    tag = "cyclic" if L.cyclic else "NOT cyclic"
    print(f"{tag:10s} generators={list(L.generators)}")


def draw(points, d):
    rows = []
    for n in reversed(range(d)):
        rows.append(" ".join("#" if (m, n) in points else "." for m in range(d)))
    return "\n".join(rows)


# A point of order d sits on exactly one line; a point of smaller order
# can sit on several.
d = 6
print("\nlines through (3, 0):", len(lines_through((3, 0), d)))
print("lines through (1, 2):", len(lines_through((1, 2), d)))

# Translating a slope line along the vertical axis sweeps out the plane.
diag = next(L for L in enumerate_isotropic_lines(d) if L.faithful and L.slope == 1)
for i in (0, 1):
    print(f"\n(diag, {i})")
    print(draw(shift_line(diag, i).points, d))
