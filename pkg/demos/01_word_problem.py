"""Normal forms in three families of groups given by rewriting systems."""

from cayleynorms import check_local_confluence, free_abelian, free_group, free_product

F2 = free_group(2)
Z2 = free_abelian(2)
C23 = free_product(2, 3)

# In F2 only adjacent inverse pairs cancel.
print("F2   abBAa ->", F2.format(F2.normal_form("abBAa")))
# In Z^2 letters commute, so the normal form sorts them.
print("Z^2  bAbaB ->", Z2.format(Z2.normal_form("bAbaB")) or "e")
# In C2 * C3 the letter a has order 2 and b has order 3.
print("C2*C3 ababBaB ->", C23.format(C23.normal_form("ababBaB")))

for rs in (F2, Z2, C23):
    rep = check_local_confluence(rs)
    print(f"{rs.name}: {rep.checked} critical pairs checked, confluent={rep.confluent}")
