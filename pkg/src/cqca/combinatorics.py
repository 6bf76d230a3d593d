"""Whitney numbers of fences, by brute force and by a terminating 4F3 series."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

BRUTE_FORCE_MAX_T = 12
_CHUNK_BITS = 20


class WhitneyMismatch(RuntimeError):
    pass


@dataclass(frozen=True)
class Fence:
    """Zigzag poset ``p1 < p2 > p3 < p4 > ...`` on points ``1..n``."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("fence order must be non-negative")

    @property
    def relations(self) -> list[tuple[int, int]]:
        """Covering pairs ``(lower, upper)``; pair k joins points k and k+1."""
        out = []
        for k in range(1, self.n):
            out.append((k, k + 1) if k % 2 == 1 else (k + 1, k))
        return out


def fence(n: int) -> Fence:
    return Fence(n)


def _count_chunk(start: int, stop: int, i: int, rel_bits, n_bits: int) -> int:
    s = np.arange(start, stop, dtype=np.uint32)
    good = np.bitwise_count(s) == i
    for lo, hi in rel_bits:
        # upper in S forces lower in S
        good &= ~(((s >> hi) & 1).astype(bool) & ~((s >> lo) & 1).astype(bool))
    return int(np.count_nonzero(good))


def count_ideals(f: Fence, i: int, workers: int | None = None) -> int:
    """Number of downward-closed subsets of size ``i``, by checking every subset.

    Slow on purpose: this is the reference the series evaluation is tested
    against. Subsets are bitmasks and are scanned in chunks of ``2**20``;
    ``workers`` (default: ``$CQCA_THREADS`` or 1) chunks are checked at once.
    """
    n = f.n
    if not 0 <= i <= n:
        raise ValueError(f"ideal order {i} outside [0, {n}]")
    if n > 31:
        raise ValueError("brute force is limited to fences of order <= 31")
    rel_bits = [(lo - 1, hi - 1) for lo, hi in f.relations]
    total = 1 << n
    step = 1 << _CHUNK_BITS
    bounds = [(a, min(a + step, total)) for a in range(0, total, step)]
    if workers is None:
        workers = int(os.environ.get("CQCA_THREADS", "1") or 1)
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(lambda b: _count_chunk(b[0], b[1], i, rel_bits, n), bounds)
            return sum(parts)
    return sum(_count_chunk(a, b, i, rel_bits, n) for a, b in bounds)


def hypergeometric_pFq(upper, lower, z, max_terms: int | None = None) -> Fraction:
    """Exact sum of a terminating generalized hypergeometric series.

    Stops at the first vanishing numerator; a zero denominator before that
    raises ``ZeroDivisionError``.
    """
    upper = [Fraction(a) for a in upper]
    lower = [Fraction(b) for b in lower]
    z = Fraction(z)
    stop = None
    for a in upper:
        if a.denominator == 1 and a <= 0:
            stop = -int(a) if stop is None else min(stop, -int(a))
    if stop is None:
        if max_terms is None:
            raise ValueError("series does not terminate; pass max_terms")
        stop = max_terms
    total = Fraction(0)
    term = Fraction(1)
    for k in range(stop + 1):
        total += term
        num = Fraction(1)
        for a in upper:
            num *= a + k
        den = Fraction(k + 1)
        for b in lower:
            den *= b + k
        if num == 0:
            break
        term = term * num * z / den
    return total


def whitney_hypergeometric(t: int) -> int:
    """``W_2t = 4F3((1-t)/2, (1-t)/2, -t/2, -t/2; 1, -t, -t; 16)`` evaluated exactly."""
    if t < 1:
        raise ValueError("t must be at least 1")
    a = Fraction(1 - t, 2)
    b = Fraction(-t, 2)
    val = hypergeometric_pFq([a, a, b, b], [1, -t, -t], 16)
    if val.denominator != 1:
        raise WhitneyMismatch(f"4F3 at t={t} gave non-integer {val}")
    return int(val)


def whitney_dp(n: int, i: int) -> int:
    """Order-``i`` ideals of the order-``n`` fence by a left-to-right transfer count.

    Independent of both the brute force and the series: walk the points in
    order tracking (size, whether the last point was taken).
    """
    if not 0 <= i <= n:
        raise ValueError(f"ideal order {i} outside [0, {n}]")
    if n == 0:
        return 1
    # state[(size, last_taken)] = count
    state = {(0, False): 1, (1, True): 1}
    for k in range(2, n + 1):
        new: dict[tuple[int, bool], int] = {}
        up = k % 2 == 0  # p_{k-1} < p_k
        for (size, last), cnt in state.items():
            for take in (False, True):
                if up and take and not last:
                    continue  # p_k above p_{k-1}: taking p_k needs p_{k-1}
                if not up and last and not take:
                    continue  # p_{k-1} above p_k: having p_{k-1} needs p_k
                key = (size + take, take)
                new[key] = new.get(key, 0) + cnt
        state = new
    return sum(c for (size, _), c in state.items() if size == i)


@dataclass(frozen=True)
class WhitneySequence:
    values: tuple[tuple[int, int], ...]
    oracle_checked: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.values)

    def as_list(self) -> list[int]:
        return [w for _, w in self.values]


def whitney_sequence(t_max: int, oracle_max_t: int = BRUTE_FORCE_MAX_T) -> WhitneySequence:
    """``W_2t`` for ``t = 1..t_max``, brute-force checked for ``t <= oracle_max_t``."""
    if t_max < 0:
        raise ValueError("t_max must be non-negative")
    values, checked = [], []
    for t in range(1, t_max + 1):
        w = whitney_hypergeometric(t)
        ok = t <= oracle_max_t
        if ok:
            brute = count_ideals(fence(2 * t), t)
            if brute != w:
                raise WhitneyMismatch(f"t={t}: series gives {w}, ideal enumeration gives {brute}")
        values.append((t, w))
        checked.append(ok)
    return WhitneySequence(tuple(values), tuple(checked))


def rank_profile(n: int) -> list[int]:
    """``[count_ideals(fence(n), i) for i in 0..n]`` via the transfer count."""
    return [whitney_dp(n, i) for i in range(n + 1)]


__all__ = [
    "Fence", "fence", "count_ideals", "hypergeometric_pFq", "whitney_hypergeometric",
    "whitney_dp", "WhitneySequence", "whitney_sequence",
    "rank_profile", "WhitneyMismatch", "BRUTE_FORCE_MAX_T",
]
