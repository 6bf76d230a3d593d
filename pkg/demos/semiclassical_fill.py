"""How much of the light cone is scrambled as N grows.

For small N the cone is riddled with holes. For large N the interior is
mostly scrambled once t passes the onset time, while the onset itself
moves later. The butterfly velocity stays at one site per step.
"""
from cqca import cone_fill_fraction, fit_butterfly_velocity, heat_map, paper_rule

for N in (2, 3, 4, 5, 10, 100, 1000):
    h = heat_map(paper_rule(N), "Q", "Q", 200, 200)
    fit = fit_butterfly_velocity(h)
    print(
        f"N={N:>5}  fill={cone_fill_fraction(h):.3f}  v_B={fit.v_B:.3f}"
        f"  first edge at t={fit.edge_t[0]}"
    )
