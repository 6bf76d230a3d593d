"""Prime-power substructure inside composite local dimensions.

With N = kappa p^l, the insertion Q^kappa only explores the p^l-dimensional
corner of the clock algebra. Its heat map at N reproduces the base map at p^l
exactly when kappa = +-1 mod p^l. For other kappa the zero set still matches
but the nonzero values are permuted.
"""
from cqca import primal_scar_check
from cqca.analysis import scar_factorizations

cmp = primal_scar_check(10, 5, 2, 1, "Q", T=100, L=100)
print(f"N=10, Q^5/Q^5 vs N=2 Q/Q: exact={cmp.exact_match}")

print("\n  N kappa p^l  exact  zeros  max|dC|")
for N, kappa, p, ell in scar_factorizations(30):
    if kappa == 1:
        continue
    c = primal_scar_check(N, kappa, p, ell, "Q", T=64, L=64)
    print(
        f"{N:>3} {kappa:>5} {p**ell:>3}  {c.exact_match!s:>5}  "
        f"{c.zero_pattern_match!s:>5}  {c.max_cell_deviation:.3f}"
    )
