"""Medians and geodesic segments in the tree of F2 versus the lattice Z^2."""

from cayleynorms import enumerate_ball, free_abelian, free_group, rough_median, rough_segment_count

F2 = free_group(2)
b = enumerate_ball(F2, 8)
m = rough_median(b, "", "ab", "aB")
print("F2 median of e, ab, aB:", F2.format(m.median), "defect", m.rho_achieved)
print("F2 points at distance 2 on [e, aabb]:", rough_segment_count(b, "", "aabb", 0, 2))

Z2 = free_abelian(2)
z = enumerate_ball(Z2, 12)
print("Z^2 points at distance 2 on [e, aabb]:", rough_segment_count(z, "", "aabb", 0, 2))
