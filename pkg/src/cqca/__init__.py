"""Exact classical simulation of scrambling in 1-D Clifford quantum cellular automata."""

__version__ = "0.1.0"

from .algebra import (
    LaurentPoly,
    OperatorString,
    RuleMatrix,
    apply_rule,
    evolve,
    load_rule,
    paper_rule,
    poly_add,
    poly_mul,
    validate_rule,
)
from .dynamics import (
    HeatMap,
    Insertion,
    fit_butterfly_velocity,
    heat_map,
    is_scrambled,
    scan_scrambling_times,
    scrambling_time,
    squared_commutator,
    xi,
)
from .combinatorics import count_ideals, fence, whitney_hypergeometric, whitney_sequence
from .analysis import box_count, box_count_rule, cone_fill_fraction, primal_scar_check
