"""A certified interval for the expansion e(S) of spheres in F2, and the
amenable contrast in Z^2 where ball witnesses push |SX|/|X| down to 1.
"""

import math

from cayleynorms import enumerate_ball, expansion_report, expansion_witnesses, free_abelian, free_group

F2 = free_group(2)
ball = enumerate_ball(F2, 10)
for n in (1, 2):
    r = expansion_report(F2, ball.sphere(n), delta=math.log(3), ball=ball)
    print(f"S({n}): e in [{r.interval[0]:.4f}, {r.interval[1]:.4f}]  "
          f"(lower from p={r.lower_p}, exhaustive {r.exact_min}, witnessed {r.witness_min:.4f} by {r.witness_best})")

Z2 = free_abelian(2)
zb = enumerate_ball(Z2, 31)
for m in (2, 5, 10, 20, 30):
    w = expansion_witnesses(Z2, zb.sphere(1), ("balls",), max_radius=m, ball=zb)
    print(f"Z^2 witness radius {m:2d}: min |SX|/|X| = {w.min_ratio:.4f}")
