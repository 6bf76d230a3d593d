"""Squared commutators, heat maps, scrambling times and butterfly cones.

For single-site insertions ``W = Q^i P^j`` (evolved from site 0) and
``V = Q^C P^D`` (held fixed at site ``alpha``), the squared commutator of the
Clifford automaton is ``4 sin^2(pi xi / N)`` with ``xi`` an integer read off the
evolved exponent pair ``(A, B)`` of ``W(t)`` at ``alpha``.

Two pairings of ``(A, B)`` with ``(C, D)`` are available:

``"transposed"`` (default)
    ``xi = A*C - B*D``. This is the group commutator of ``W(t)`` with the
    operator whose Q- and P-exponents are those of ``V`` swapped. It is the
    reading under which the Q/Q scan gives ``xi(0, t) = W_{2t}`` (Whitney
    numbers of fences) and scrambling times 1, 2, 3, ... at the jumps
    N = 7, 13, 31, 67, 157.
``"symplectic"``
    ``xi = A*D - B*C``, the literal phase picked up when commuting
    ``Q^A P^B`` past ``Q^C P^D``. For Q/Q it equals ``-W_{2(t-1)}``, so the
    jump positions in N are the same but every scrambling time past the first
    is one step later.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .algebra import (
    DenseEvolver,
    OperatorString,
    RuleMatrix,
    paper_rule,
    require_dynamics_rule,
)

PAIRINGS = ("transposed", "symplectic")
DEFAULT_PAIRING = "transposed"

# float slack for thresholds other than 1, which is decided exactly
_FLOAT_SLACK = 1e-12


@dataclass(frozen=True)
class Insertion:
    """Single-site generalized Pauli ``Q^q_exp P^p_exp``."""

    q_exp: int
    p_exp: int

    def __post_init__(self):
        if self.q_exp < 0 or self.p_exp < 0:
            raise ValueError("insertion exponents must be non-negative")
        if self.q_exp == 0 and self.p_exp == 0:
            raise ValueError("identity insertion (0, 0) commutes with everything; pick Q, P, QP or i,j")

    @classmethod
    def parse(cls, text: str) -> "Insertion":
        """Accept ``Q``, ``P``, ``QP`` or an explicit pair such as ``5,0``."""
        s = text.strip().upper().replace(" ", "")
        named = {"Q": (1, 0), "P": (0, 1), "QP": (1, 1)}
        if s in named:
            return cls(*named[s])
        m = re.fullmatch(r"(\d+),(\d+)", s)
        if not m:
            raise ValueError(f"cannot parse insertion {text!r}; use Q, P, QP or i,j")
        return cls(int(m.group(1)), int(m.group(2)))

    def for_modulus(self, N: int) -> "Insertion":
        q, p = self.q_exp % N, self.p_exp % N
        if q == 0 and p == 0:
            raise ValueError(f"insertion {self.label} is the identity mod {N}")
        return Insertion(q, p)

    def scaled(self, k: int) -> "Insertion":
        return Insertion(self.q_exp * k, self.p_exp * k)

    def operator(self, N: int, site: int = 0) -> OperatorString:
        return OperatorString.local(self.q_exp, self.p_exp, N, site)

    @property
    def label(self) -> str:
        named = {(1, 0): "Q", (0, 1): "P", (1, 1): "QP"}
        return named.get((self.q_exp, self.p_exp), f"{self.q_exp},{self.p_exp}")

    def __str__(self) -> str:
        return self.label


def as_insertion(x) -> Insertion:
    if isinstance(x, Insertion):
        return x
    if isinstance(x, str):
        return Insertion.parse(x)
    return Insertion(*x)


def _pair(A, B, V: Insertion, N: int, pairing: str):
    C, D = V.q_exp, V.p_exp
    if pairing == "transposed":
        return (A * C - B * D) % N
    if pairing == "symplectic":
        return (A * D - B * C) % N
    raise ValueError(f"unknown pairing {pairing!r}; choose from {PAIRINGS}")


def squared_commutator(xi_val, N: int):
    """``4 sin^2(pi xi / N)``; works elementwise on arrays.

    ``xi`` is folded to ``min(xi mod N, N - xi mod N)`` first so that
    equivalent values give bitwise identical results.
    """
    x = np.asarray(xi_val, dtype=np.int64) % N
    x = np.minimum(x, N - x)
    out = 4.0 * np.sin(np.pi * (x / N)) ** 2
    return float(out) if out.ndim == 0 else out


def is_scrambled(xi_val, N: int):
    """Exact test of ``4 sin^2(pi xi / N) >= 1``, i.e. ``N <= 6 xi <= 5 N``."""
    x = np.asarray(xi_val, dtype=np.int64) % N
    out = (6 * x >= N) & (6 * x <= 5 * N)
    return bool(out) if out.ndim == 0 else out


def scrambled_mask(xi_val, N: int, threshold: float = 1.0):
    """Cells with ``C >= threshold``; exact for the default threshold 1."""
    if threshold == 1.0:
        return is_scrambled(xi_val, N)
    return squared_commutator(xi_val, N) >= threshold - _FLOAT_SLACK


def xi(M: RuleMatrix, W, V, alpha: int, t: int, pairing: str = DEFAULT_PAIRING) -> int:
    """``xi(alpha, t)`` for single-site insertions under rule ``M``."""
    require_dynamics_rule(M)
    if t < 0:
        raise ValueError("t must be non-negative")
    N = M.N
    W = as_insertion(W).for_modulus(N)
    V = as_insertion(V).for_modulus(N)
    ev = DenseEvolver.for_horizon(M, W.operator(N), t, min_width=abs(alpha))
    for _ in range(t):
        ev.step()
    k = alpha + ev.width
    return int(_pair(int(ev.q[k]), int(ev.p[k]), V, N, pairing))


@dataclass(frozen=True, eq=False)
class HeatMap:
    """Space-time grid of ``C_alpha(t)`` with rows ``t = 0..T`` and columns ``alpha = -L..L``."""

    values: np.ndarray
    xi_grid: np.ndarray
    N: int
    rule_name: str
    W: Insertion | OperatorString
    V: Insertion
    L: int
    T: int
    pairing: str = DEFAULT_PAIRING
    radius: int = 1
    warnings: tuple[str, ...] = field(default=())

    @property
    def alphas(self) -> np.ndarray:
        return np.arange(-self.L, self.L + 1)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.T + 1)

    def cone_mask(self) -> np.ndarray:
        """Cells with ``|alpha| <= radius * t``."""
        return np.abs(self.alphas)[None, :] <= self.radius * self.times[:, None]

    def scrambled(self, threshold: float = 1.0) -> np.ndarray:
        return scrambled_mask(self.xi_grid, self.N, threshold)

    def truncated(self, T: int) -> "HeatMap":
        """Rows ``0..T`` only; the evolution does not depend on the horizon."""
        if not 0 <= T <= self.T:
            raise ValueError(f"cannot truncate a T={self.T} map to T={T}")
        return HeatMap(
            values=self.values[: T + 1], xi_grid=self.xi_grid[: T + 1], N=self.N,
            rule_name=self.rule_name, W=self.W, V=self.V, L=self.L, T=T,
            pairing=self.pairing, radius=self.radius, warnings=self.warnings,
        )


def heat_map(
    M: RuleMatrix,
    W,
    V,
    L: int,
    T: int,
    pairing: str = DEFAULT_PAIRING,
) -> HeatMap:
    """Evolve ``W`` once and fill one row of ``xi`` and ``C`` per time step.

    ``W`` may also be a multi-site :class:`OperatorString` (experimental).
    The evolution runs on a window wide enough for the full light cone, so the
    returned cells are exact even when ``L < radius * T``; in that case the
    cone simply extends past the stored columns and a warning is recorded.
    """
    require_dynamics_rule(M)
    if L < 0 or T < 0:
        raise ValueError("L and T must be non-negative")
    if pairing not in PAIRINGS:
        raise ValueError(f"unknown pairing {pairing!r}; choose from {PAIRINGS}")
    N = M.N
    V = as_insertion(V).for_modulus(N)
    if isinstance(W, OperatorString):
        op = W
        if op.is_identity():
            raise ValueError("identity W commutes with everything")
    else:
        W = as_insertion(W).for_modulus(N)
        op = W.operator(N)

    notes = []
    if L < M.radius * T:
        msg = f"window L={L} is narrower than the light cone radius {M.radius * T} at T={T}"
        notes.append(msg)
        warnings.warn(msg, stacklevel=2)

    ev = DenseEvolver.for_horizon(M, op, T, min_width=L)
    lo, hi = ev.width - L, ev.width + L + 1
    xi_rows = np.empty((T + 1, 2 * L + 1), dtype=np.int64)
    for t in range(T + 1):
        if t:
            ev.step()
        xi_rows[t] = _pair(ev.q[lo:hi], ev.p[lo:hi], V, N, pairing)
    values = squared_commutator(xi_rows, N)
    xi_rows.setflags(write=False)
    values.setflags(write=False)
    return HeatMap(
        values=values, xi_grid=xi_rows, N=N, rule_name=M.name, W=W, V=V, L=L, T=T,
        pairing=pairing, radius=M.radius, warnings=tuple(notes),
    )


class ScrambleTime(NamedTuple):
    t_star: int
    xi_witness: int


def scrambling_time(
    M: RuleMatrix,
    W,
    V,
    t_max: int,
    threshold: float = 1.0,
    pairing: str = DEFAULT_PAIRING,
) -> ScrambleTime | None:
    """First ``t`` in ``[1, t_max]`` with ``C_0(t) >= threshold``; None if there is none."""
    require_dynamics_rule(M)
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    N = M.N
    W = as_insertion(W).for_modulus(N)
    V = as_insertion(V).for_modulus(N)
    ev = DenseEvolver.for_horizon(M, W.operator(N), t_max)
    c = ev.width
    for t in range(1, t_max + 1):
        ev.step()
        x = int(_pair(int(ev.q[c]), int(ev.p[c]), V, N, pairing))
        if scrambled_mask(x, N, threshold):
            return ScrambleTime(t, x)
    return None


class ScanRow(NamedTuple):
    N: int
    t_star: int | None
    xi_witness: int | None


@dataclass(frozen=True)
class ScanResult:
    rows: tuple[ScanRow, ...]
    rule_name: str
    W: Insertion
    V: Insertion
    t_max: int

    @property
    def jumps(self) -> list[int]:
        """Values of N at which ``t_star`` changes from the previous row."""
        out = []
        for prev, row in zip(self.rows, self.rows[1:]):
            if row.t_star != prev.t_star:
                out.append(row.N)
        return out

    def ranges(self) -> list[tuple[int, int, int | None, int | None]]:
        """Consecutive runs ``(N_lo, N_hi, t_star, xi_witness)`` with equal ``t_star``.

        The witness reported is the one at ``N_lo``.
        """
        out = []
        for row in self.rows:
            if out and out[-1][2] == row.t_star and row.N == out[-1][1] + 1:
                lo, _, t, w = out[-1]
                out[-1] = (lo, row.N, t, w)
            else:
                out.append((row.N, row.N, row.t_star, row.xi_witness))
        return out


def scan_scrambling_times(
    N_list: Iterable[int],
    W="Q",
    V="Q",
    t_max: int = 40,
    rule: Callable[[int], RuleMatrix] = paper_rule,
    threshold: float = 1.0,
    pairing: str = DEFAULT_PAIRING,
) -> ScanResult:
    """Scrambling time for each modulus; ``rule`` builds the rule for a given N."""
    W, V = as_insertion(W), as_insertion(V)
    rows = []
    name = None
    for N in N_list:
        if N < 2:
            raise ValueError(f"modulus must be at least 2, got {N}")
        M = rule(N)
        name = M.name
        hit = scrambling_time(M, W, V, t_max, threshold=threshold, pairing=pairing)
        rows.append(ScanRow(N, *hit) if hit else ScanRow(N, None, None))
    return ScanResult(tuple(rows), name or getattr(rule, "__name__", "rule"), W, V, t_max)


@dataclass(frozen=True)
class ConeFit:
    edge_t: np.ndarray
    edge_alpha: np.ndarray
    slope: float
    intercept: float
    fit_from: int

    @property
    def v_B(self) -> float:
        return self.slope


def fit_butterfly_velocity(h: HeatMap, threshold: float = 1.0) -> ConeFit:
    """Least-squares line through the right edge of the scrambled region.

    For every row with a cell at or above ``threshold`` the edge is the largest
    such offset; rows without one are skipped. Only rows in the upper half of
    the horizon enter the fit.
    """
    mask = h.scrambled(threshold)
    has = mask.any(axis=1)
    if has.sum() < 2:
        raise ValueError("fewer than two rows reach the threshold; no cone to fit")
    t = h.times[has]
    edge = np.array([h.alphas[row].max() for row in mask[has]])
    start = h.T // 2
    sel = t >= start
    if sel.sum() < 2:
        raise ValueError("fewer than two qualifying rows in the upper half of the horizon")
    slope, intercept = np.polyfit(t[sel], edge[sel], 1)
    return ConeFit(t, edge, float(slope), float(intercept), start)


def nine_pairs() -> list[tuple[Insertion, Insertion]]:
    """All ``(W, V)`` combinations of Q, P and QP."""
    basis = [Insertion(1, 0), Insertion(0, 1), Insertion(1, 1)]
    return [(w, v) for w in basis for v in basis]


def light_cone_violations(h: HeatMap) -> int:
    """Number of nonzero ``xi`` cells outside ``|alpha| <= radius * t``."""
    return int(np.count_nonzero(h.xi_grid[~h.cone_mask()]))


__all__ = [
    "PAIRINGS", "DEFAULT_PAIRING", "Insertion", "HeatMap", "ScrambleTime", "ScanRow",
    "ScanResult", "ConeFit", "xi", "squared_commutator", "is_scrambled", "scrambled_mask",
    "heat_map", "scrambling_time", "scan_scrambling_times", "fit_butterfly_velocity",
    "nine_pairs", "light_cone_violations", "as_insertion",
]
