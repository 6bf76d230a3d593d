"""Post-processing of heat maps: box counting, primal scars, cone filling."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Sequence

import numpy as np

from .algebra import OperatorString, RuleMatrix, apply_rule, paper_rule
from .dynamics import DEFAULT_PAIRING, HeatMap, Insertion, as_insertion, heat_map, squared_commutator


class ScarError(ValueError):
    pass


@dataclass(frozen=True)
class BoxCountSeries:
    T_values: np.ndarray
    sum_f: np.ndarray
    threshold: float
    slope: float
    intercept: float
    fit_start: int

    @property
    def D(self) -> float:
        return self.slope

    @property
    def log_T(self) -> np.ndarray:
        return np.log(self.T_values)

    @property
    def log_sum_f(self) -> np.ndarray:
        return np.log(self.sum_f)


def _fit_tail(T_values, sum_f, threshold) -> BoxCountSeries:
    T_values = np.asarray(T_values, dtype=np.int64)
    sum_f = np.asarray(sum_f, dtype=np.int64)
    if np.any(sum_f == 0):
        bad = T_values[sum_f == 0].tolist()
        raise ValueError(f"no cell reaches the threshold up to T={bad}; log undefined")
    start = len(T_values) // 2
    slope, intercept = np.polyfit(np.log(T_values[start:]), np.log(sum_f[start:]), 1)
    return BoxCountSeries(T_values, sum_f, threshold, float(slope), float(intercept), start)


def _check_T_values(T_values: Sequence[int]) -> list[int]:
    T_values = [int(T) for T in T_values]
    if len(T_values) < 4:
        raise ValueError(f"box counting needs at least 4 horizons, got {len(T_values)}")
    if any(b <= a for a, b in zip(T_values, T_values[1:])) or T_values[0] < 1:
        raise ValueError("horizons must be positive and strictly increasing")
    return T_values


def box_count(
    generator: Callable[[int], HeatMap],
    T_values: Sequence[int],
    threshold: float = 1.0,
) -> BoxCountSeries:
    """Fit ``log sum_{t<=T} f(t)`` against ``log T``.

    ``f(t)`` is the number of sites in row ``t`` with ``C >= threshold`` and
    ``generator(T)`` must return a heat map covering rows ``0..T``. The slope is
    fitted over the upper half of the horizons.
    """
    T_values = _check_T_values(T_values)
    sums = []
    for T in T_values:
        h = generator(T)
        sums.append(int(h.scrambled(threshold)[: T + 1].sum()))
    return _fit_tail(T_values, sums, threshold)


def box_count_heatmap(h: HeatMap, T_values: Sequence[int], threshold: float = 1.0) -> BoxCountSeries:
    """Same as :func:`box_count` but slicing one map computed to ``max(T_values)``.

    Rows of a heat map do not depend on the horizon, so this gives the same
    numbers at a fraction of the cost. ``h.L`` must cover the light cone.
    """
    T_values = _check_T_values(T_values)
    if T_values[-1] > h.T:
        raise ValueError(f"heat map stops at T={h.T}, need {T_values[-1]}")
    cum = np.cumsum(h.scrambled(threshold).sum(axis=1))
    return _fit_tail(T_values, [int(cum[T]) for T in T_values], threshold)


def box_count_rule(
    M: RuleMatrix, W="Q", V="Q", T_values: Sequence[int] = (64, 128, 256, 512, 1024),
    threshold: float = 1.0, pairing: str = DEFAULT_PAIRING,
) -> BoxCountSeries:
    T_max = max(T_values)
    h = heat_map(M, W, V, L=M.radius * T_max, T=T_max, pairing=pairing)
    return box_count_heatmap(h, T_values, threshold)


def filled_cone(T: int, L: int | None = None) -> HeatMap:
    """Synthetic N=2 map with ``C = 4`` on every cell of the cone ``|alpha| <= t``."""
    L = T if L is None else L
    alphas = np.arange(-L, L + 1)
    inside = np.abs(alphas)[None, :] <= np.arange(T + 1)[:, None]
    xi_grid = inside.astype(np.int64)
    return HeatMap(
        values=squared_commutator(xi_grid, 2), xi_grid=xi_grid, N=2, rule_name="filled-cone",
        W=Insertion(1, 0), V=Insertion(1, 0), L=L, T=T,
    )


def cone_fill_fraction(h: HeatMap, threshold: float = 1.0) -> float:
    """Share of in-cone cells (``|alpha| <= radius * t``) with ``C >= threshold``."""
    cone = h.cone_mask()
    n = int(cone.sum())
    if n == 0:
        return 0.0
    return float(h.scrambled(threshold)[cone].sum() / n)


# -- primal scars -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ScarComparison:
    N_composite: int
    kappa: int
    prime: int
    ell: int
    exact_match: bool
    zero_pattern_match: bool
    max_cell_deviation: float
    mismatched_cells: int
    composite: HeatMap
    base: HeatMap

    @property
    def prime_power(self) -> int:
        return self.prime**self.ell


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % k for k in range(2, int(p**0.5) + 1))


def subalgebra_closed(M: RuleMatrix, kappa: int) -> bool:
    """Whether one step maps kappa-multiples of exponents to kappa-multiples."""
    if M.N % kappa:
        return False
    for q, p in ((kappa, 0), (0, kappa)):
        img = apply_rule(M, OperatorString.local(q, p, M.N))
        if any(c % kappa for part in (img.qpart, img.ppart) for _, c in part):
            return False
    return True


def folded_fraction(xi_grid: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced ``(numerator, denominator)`` of ``min(xi, N - xi) / N`` per cell."""
    x = np.asarray(xi_grid, dtype=np.int64) % N
    x = np.minimum(x, N - x)
    g = np.gcd(x, N)
    return x // g, N // g


def primal_scar_check(
    N_composite: int,
    kappa: int,
    prime: int,
    ell: int,
    W_base="Q",
    T: int = 100,
    L: int = 100,
    rule: Callable[[int], RuleMatrix] = paper_rule,
    pairing: str = DEFAULT_PAIRING,
) -> ScarComparison:
    """Compare the ``Q^kappa``-type map at ``N = kappa p^ell`` with the base map at ``p^ell``.

    Both insertions use ``W_base`` (scaled by ``kappa`` in the composite run).
    ``exact_match`` compares each cell's reduced fraction ``xi / N``, which
    fixes ``C`` exactly; ``zero_pattern_match`` only compares where ``C = 0``.
    """
    if not _is_prime(prime):
        raise ScarError(f"{prime} is not prime")
    if ell < 1 or kappa < 1:
        raise ScarError("need kappa >= 1 and ell >= 1")
    if gcd(kappa, prime) != 1:
        raise ScarError(f"kappa={kappa} is not coprime to p={prime}")
    pl = prime**ell
    if kappa * pl != N_composite:
        raise ScarError(f"{kappa} * {prime}^{ell} = {kappa * pl} != N = {N_composite}")
    M_big, M_small = rule(N_composite), rule(pl)
    if not subalgebra_closed(M_big, kappa):
        raise ScarError(f"rule {M_big.name!r} does not preserve the Q^{kappa}, P^{kappa} subalgebra")
    W_base = as_insertion(W_base)
    w_big = W_base.scaled(kappa)
    a = heat_map(M_big, w_big, w_big, L, T, pairing=pairing)
    b = heat_map(M_small, W_base, W_base, L, T, pairing=pairing)
    na, da = folded_fraction(a.xi_grid, N_composite)
    nb, db = folded_fraction(b.xi_grid, pl)
    same = (na == nb) & (da == db)
    zero_same = (na == 0) == (nb == 0)
    dev = float(np.max(np.abs(a.values - b.values))) if a.values.size else 0.0
    return ScarComparison(
        N_composite=N_composite, kappa=kappa, prime=prime, ell=ell,
        exact_match=bool(same.all()), zero_pattern_match=bool(zero_same.all()),
        max_cell_deviation=dev, mismatched_cells=int((~same).sum()),
        composite=a, base=b,
    )


def scar_factorizations(N_max: int) -> list[tuple[int, int, int, int]]:
    """Every ``(N, kappa, p, ell)`` with ``N = kappa p^ell <= N_max``, ``gcd(kappa, p) = 1``."""
    out = []
    for N in range(2, N_max + 1):
        for p in range(2, N + 1):
            if not _is_prime(p) or N % p:
                continue
            ell, pl = 0, 1
            while N % (pl * p) == 0:
                ell, pl = ell + 1, pl * p
                kappa = N // pl
                if gcd(kappa, p) == 1:
                    out.append((N, kappa, p, ell))
    return out


__all__ = [
    "BoxCountSeries", "box_count", "box_count_heatmap", "box_count_rule", "filled_cone",
    "cone_fill_fraction", "ScarComparison", "ScarError", "subalgebra_closed",
    "folded_fraction", "primal_scar_check", "scar_factorizations",
]
