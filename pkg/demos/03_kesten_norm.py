"""Truncated estimates of the sphere averaging operator on F2 at p = 2.

Each truncation is a lower bound on the true norm; extrapolating in R
recovers the closed form ((1 - 1/k) n + 1) (2k - 1)^(-n/2).
"""

from cayleynorms import enumerate_ball, free_group, richardson_extrapolate
from cayleynorms.recipes import cohen_exact, sphere_norm2

F2 = free_group(2)
Rs = [4, 6, 8, 10]
ball = enumerate_ball(F2, max(Rs) + 2)
for n in (1, 2):
    vals = [sphere_norm2(F2, n, R, ball=ball) for R in Rs]
    ex = richardson_extrapolate(Rs, vals)["L"]
    exact = cohen_exact(2, n)
    print(f"n={n}: " + ", ".join(f"R={R}: {v:.5f}" for R, v in zip(Rs, vals)))
    print(f"     extrapolated {ex:.6f}, exact {exact:.6f}, rel err {(ex - exact) / exact:+.2e}")
