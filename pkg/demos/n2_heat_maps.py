"""Qubit (N=2) heat maps for all nine insertion pairs.

For N=2 the squared commutator only takes the values 0 and 4, so each map is
a black-and-white picture of the operator front. Each map is written as a PGM
into ./n2_maps and a small ASCII preview of the Q/Q map is printed.
"""
from pathlib import Path

import numpy as np

from cqca import heat_map, paper_rule
from cqca.dynamics import light_cone_violations, nine_pairs
from cqca.export import write_pgm

out = Path("n2_maps")
out.mkdir(exist_ok=True)
M = paper_rule(2)

for W, V in nine_pairs():
    h = heat_map(M, W, V, L=100, T=100)
    write_pgm(h.values, out / f"{W.label}_{V.label}.pgm")
    print(
        f"W={W.label:<2} V={V.label:<2} filled={np.count_nonzero(h.values):>5}"
        f" symmetric={np.array_equal(h.values, h.values[:, ::-1])}"
        f" outside-cone={light_cone_violations(h)}"
    )

h = heat_map(M, "Q", "Q", L=32, T=32)
for row in h.values:
    print("".join("#" if c else "." for c in row))
