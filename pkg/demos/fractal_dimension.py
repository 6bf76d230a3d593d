"""Box-counting dimension of the N=2 Q/Q pattern.

Sum the scrambled-cell indicator over the cone up to each horizon T and fit
log(sum) against log(T). The slope approaches log2((3 + sqrt 17) / 2), the
growth rate of the binary trace-time pattern, rather than the value 2 of a
filled cone.
"""
import numpy as np

from cqca import box_count_rule, paper_rule
from cqca.analysis import box_count_heatmap, filled_cone

Ts = [64, 128, 256, 512, 1024]
series = box_count_rule(paper_rule(2), "Q", "Q", T_values=Ts)
for T, s in zip(series.T_values, series.sum_f):
    print(f"T={T:>5}  sum_f={s}")
print(f"fit over T >= {series.T_values[series.fit_start]}: D = {series.D:.4f}")
print(f"log2((3 + sqrt 17) / 2) = {np.log2((3 + np.sqrt(17)) / 2):.4f}")
print(f"filled cone: D = {box_count_heatmap(filled_cone(1024), Ts).D:.4f}")
