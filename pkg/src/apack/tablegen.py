"""Profile-driven construction of code tables.

The 16 range boundaries are found by a local search that nudges one
boundary at a time (and, recursively, its immediate neighbours) while an
entropy estimate of the footprint keeps shrinking. Counts are then shared
out in proportion to each range's mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .codetable import COUNT_MAX, NUM_ROWS, VALUE_MAX, CodeTable, Histogram
from .errors import ImpossibleAdjustment

# relative slack so float noise never counts as an improvement
_IMPROVEMENT_EPS = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    depth_max: int = 2
    threshold: float = 0.99
    neighborhood: int = 1
    count_bits: int = 10

    def __post_init__(self):
        if self.depth_max < 1:
            raise ValueError("depth_max must be >= 1")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")
        if self.neighborhood < 1:
            raise ValueError("neighborhood must be >= 1")
        if self.count_bits != 10:
            raise ValueError("only 10-bit probability counts are supported")


def uniform_partition() -> tuple[int, ...]:
    step = (VALUE_MAX + 1) // NUM_ROWS
    return tuple(range(0, VALUE_MAX + 1, step))


def _check_partition(v_mins) -> tuple[int, ...]:
    v = tuple(int(x) for x in v_mins)
    if len(v) != NUM_ROWS or v[0] != 0 or any(b <= a for a, b in zip(v, v[1:])) or v[-1] > VALUE_MAX:
        raise ValueError(f"not a valid 16-way partition of 0..255: {v}")
    return v


# offset bits needed by a range of w values, for w in 0..256
_OFFSET_BITS = np.array([max(w - 1, 0).bit_length() for w in range(VALUE_MAX + 2)], dtype=np.float64)


def _range_cost(n, total, width):
    """Bits for ``n`` values in a range of ``width`` values: entropy share plus offsets."""
    ol = _OFFSET_BITS[width]
    with np.errstate(divide="ignore", invalid="ignore"):
        bits = n * (-np.log2(n / total) + ol)
    return np.where(n > 0, bits, 0.0)


def encoded_size(h: Histogram, v_mins) -> float:
    """Estimated footprint in bits of the histogram's data under a partition."""
    h.require_samples()
    v = np.asarray(_check_partition(v_mins), dtype=np.int64)
    prefix = np.concatenate(([0], np.cumsum(h.buckets, dtype=np.float64)))
    ends = np.append(v[1:], VALUE_MAX + 1)
    n = prefix[ends] - prefix[v]
    return float(np.sum(_range_cost(n, float(h.total), ends - v)))


class _CostMatrix:
    """cost[a, b] = bits for the range of values ``a..b-1``."""

    def __init__(self, h: Histogram):
        prefix = np.concatenate(([0], np.cumsum(h.buckets, dtype=np.float64)))
        a = np.arange(VALUE_MAX + 2)[:, None]
        b = np.arange(VALUE_MAX + 2)[None, :]
        n = np.where(b > a, prefix[b] - prefix[np.minimum(a, b)], 0.0)
        self.cost = _range_cost(n, float(h.total), np.maximum(b - a, 0))

    def total(self, v) -> float:
        ends = np.append(v[1:], VALUE_MAX + 1)
        return float(np.sum(self.cost[v, ends]))

    def totals(self, cands: np.ndarray) -> np.ndarray:
        ends = np.concatenate((cands[:, 1:], np.full((len(cands), 1), VALUE_MAX + 1)), axis=1)
        return np.sum(self.cost[cands, ends], axis=1)


def _walk(v: np.ndarray, i: int) -> np.ndarray:
    """Positions row ``i`` visits: downwards first, then upwards.

    A row never lands on a neighbour's boundary, so every candidate keeps
    all 16 ranges nonempty. Row 0 is pinned at 0.
    """
    prev = v[i - 1]
    nxt = v[i + 1] if i + 1 < NUM_ROWS else VALUE_MAX + 1
    down = np.arange(v[i] - 1, prev, -1)
    up = np.arange(v[i] + 1, nxt)
    return np.concatenate((down, up))


def _rows_to_try(around, neighborhood):
    if around is None:
        return range(1, NUM_ROWS)
    return [i for i in range(around - neighborhood, around + neighborhood + 1) if i != around and 1 <= i < NUM_ROWS]


def _search(costs: _CostMatrix, v: np.ndarray, minsize: float, depth: int, around, cfg: SearchConfig):
    best, best_size = v, minsize
    for i in _rows_to_try(around, cfg.neighborhood):
        positions = _walk(v, i)
        if positions.size == 0:
            continue
        if depth < cfg.depth_max:
            for p in positions:
                trial = v.copy()
                trial[i] = p
                cand, size = _search(costs, trial, best_size, depth + 1, i, cfg)
                if size < best_size:
                    best, best_size = cand, size
        else:
            cands = np.repeat(v[None, :], len(positions), axis=0)
            cands[:, i] = positions
            sizes = costs.totals(cands)
            k = int(np.argmin(sizes))
            if sizes[k] < best_size * (1 - _IMPROVEMENT_EPS):
                best, best_size = cands[k], float(sizes[k])
    return best, best_size


def search(h: Histogram, v_mins, minsize: float, depth: int = 1, around=None, cfg: SearchConfig = SearchConfig()):
    """One improvement pass; returns ``(partition, size)`` no worse than ``minsize``.

    ``around=None`` lets every boundary move; otherwise only the boundaries
    ``neighborhood`` rows away from ``around`` are moved. Below
    ``depth_max`` each move recurses around the moved row instead of being
    scored directly.
    """
    h.require_samples()
    costs = _CostMatrix(h)
    v = np.asarray(_check_partition(v_mins), dtype=np.int64)
    best, size = _search(costs, v, minsize, depth, around, cfg)
    return tuple(int(x) for x in best), size


def iter_partitions(h: Histogram, cfg: SearchConfig = SearchConfig()) -> Iterator[tuple[tuple[int, ...], float]]:
    """Yield ``(partition, estimated bits)`` after the start and after every pass."""
    h.require_samples()
    costs = _CostMatrix(h)
    v = np.asarray(uniform_partition(), dtype=np.int64)
    size = costs.total(v)
    yield tuple(int(x) for x in v), size
    while size > 0:
        v, newsize = _search(costs, v, size, 1, None, cfg)
        yield tuple(int(x) for x in v), newsize
        done = newsize / size >= cfg.threshold
        size = newsize
        if done:
            break


def find_partition(h: Histogram, cfg: SearchConfig = SearchConfig()) -> tuple[int, ...]:
    partition = None
    for partition, _ in iter_partitions(h, cfg):
        pass
    return partition


def _largest_remainder(masses: list[int], total_mass: int, budget: int) -> list[int]:
    counts = [m * budget // total_mass for m in masses]
    remainders = [m * budget % total_mass for m in masses]
    for r, m in enumerate(masses):
        if m > 0 and counts[r] == 0:
            counts[r] = 1
    left = budget - sum(counts)
    order = sorted((r for r, m in enumerate(masses) if m > 0), key=lambda r: (-remainders[r], r))
    k = 0
    while left > 0:
        counts[order[k % len(order)]] += 1
        left -= 1
        k += 1
    while left < 0:
        # minimum-1 bumps overshot; take back from the largest rows
        r = max(range(len(counts)), key=lambda j: (counts[j], -j))
        counts[r] -= 1
        left += 1
    return counts


def assign_counts(h: Histogram, v_mins, is_weights: bool = True) -> CodeTable:
    """Share the 1023 counts among ranges in proportion to their mass."""
    h.require_samples()
    v = _check_partition(v_mins)
    buckets = [int(x) for x in h.buckets]
    ends = v[1:] + (VALUE_MAX + 1,)
    masses = [sum(buckets[a:b]) for a, b in zip(v, ends)]
    counts = _largest_remainder(masses, sum(masses), COUNT_MAX)
    table = CodeTable.from_counts(v, counts)
    if not is_weights:
        table = adjust_for_activations(table)
    return table


def adjust_for_activations(table: CodeTable) -> CodeTable:
    """Give every empty row one count, each taken from the current largest row."""
    counts = list(table.counts)
    if sum(counts) < NUM_ROWS:
        raise ImpossibleAdjustment(f"only {sum(counts)} counts to spread over {NUM_ROWS} rows")
    for r in range(NUM_ROWS):
        if counts[r] == 0:
            donor = max(range(NUM_ROWS), key=lambda j: (counts[j], -j))
            counts[donor] -= 1
            counts[r] = 1
    return CodeTable.from_counts(table.v_min, counts)


def build_table(h: Histogram, is_weights: bool = True, cfg: SearchConfig = SearchConfig()) -> CodeTable:
    return assign_counts(h, find_partition(h, cfg), is_weights)


def estimated_bits_per_value(h: Histogram, v_mins) -> float:
    return encoded_size(h, v_mins) / h.total


def table_cross_entropy(h: Histogram, table: CodeTable) -> float:
    """Ideal bits for the histogram's data under the table's quantized model."""
    bits = 0.0
    for v in range(VALUE_MAX + 1):
        n = h[v]
        if n:
            row = table.row_of_value[v]
            bits += n * (-math.log2(table.counts[row] / 1024) + table.offset_lengths[row])
    return bits
