"""Scrambling times of the three-term rule across local dimensions.

For each N the out-of-time-order squared commutator between an evolving Q at
the origin and a fixed Q is first scrambled (C >= 1) at some time t*. Because
xi(0, t) grows like the central Whitney numbers 1, 2, 5, 11, 26, 63, ..., t*
is a step function of N that jumps whenever 6 W_2t first reaches N.
"""
from cqca import scan_scrambling_times, whitney_sequence

res = scan_scrambling_times(range(2, 379), "Q", "Q", t_max=40)

print(f"{'N range':>12}  t*  xi witness")
for lo, hi, t_star, witness in res.ranges():
    print(f"{f'[{lo}, {hi}]':>12}  {t_star:>2}  {witness}")

# the band edges follow from the Whitney numbers alone
W = whitney_sequence(8, oracle_max_t=8).as_list()
print("\nW_2t:", W)
print("jumps:", res.jumps)
# t* leaves band t once N exceeds 6 W_2t
print("6 W_2t + 1:", [6 * w + 1 for w in W[:5]])
