"""Sphere sizes and growth rates of balls in Cayley graphs."""

import math

from cayleynorms import enumerate_ball, free_abelian, free_group, free_product, growth_stats

for rs, R in ((free_group(2), 10), (free_product(2, 2, 2), 12), (free_abelian(2), 12)):
    ball = enumerate_ball(rs, R)
    st = growth_stats(ball)
    print(f"{rs.name}: |S(n)| = {ball.sphere_sizes.tolist()}")
    print(f"  growth rate {st.delta_hat:.4f} (exp = {math.exp(st.delta_hat):.4f}), {st.label}")
