"""Busemann-cocycle upper bounds squeezed against Boyd lower estimates."""

import math

from cayleynorms import averaging_norm, enumerate_ball, free_group, optimize_epsilon

F2 = free_group(2)
delta = math.log(3)
ball = enumerate_ball(F2, 9)
for p in (1.5, 2.0):
    print(f"p = {p}")
    for n in range(1, 5):
        S = ball.sphere(n)
        lower = averaging_norm(F2, S, p, 4, ball=ball).value
        eps, rep = optimize_epsilon(F2, S, p, delta, ball=ball)
        print(f"  n={n}: trivial {rep.trivial_lower:.4f} <= boyd {lower:.4f} <= "
              f"cocycle {rep.bound:.4f}  (eps {eps:.4f}, {rep.exactness})")
