"""Value-range partition and probability-count table.

A table has 16 rows. Row ``i`` covers the values ``[v_min[i], v_max[i]]``
and owns the probability-count interval ``[c_lo[i], c_hi[i])``. Only
``v_min`` and ``c_hi`` are stored; everything else is derived:

* ``v_max[i] = v_min[i + 1] - 1`` (``0xFF`` for the last row)
* ``c_lo[i] = c_hi[i - 1]`` (``0`` for the first row)
* the offset length is the bit-width of ``v_max - v_min``

A value ``v`` is coded as the row index (arithmetically coded) plus the
verbatim offset ``v - v_min``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EmptyHistogram, OffsetOutOfRange, TableInvalid

NUM_ROWS = 16
VALUE_BITS = 8
VALUE_MAX = (1 << VALUE_BITS) - 1
COUNT_BITS = 10
COUNT_MAX = (1 << COUNT_BITS) - 1  # 0x3FF, the last c_hi of every table
COUNT_SCALE = 1 << COUNT_BITS  # probabilities are count / 1024


class RangeEntry(NamedTuple):
    v_min: int
    c_hi: int


@dataclass(frozen=True)
class CodeTable:
    entries: tuple[RangeEntry, ...]

    @classmethod
    def from_arrays(cls, v_mins: Sequence[int], c_his: Sequence[int]) -> CodeTable:
        if len(v_mins) != len(c_his):
            raise TableInvalid("v_min and c_hi columns differ in length")
        return cls(tuple(RangeEntry(int(v), int(c)) for v, c in zip(v_mins, c_his)))

    @classmethod
    def from_counts(cls, v_mins: Sequence[int], counts: Sequence[int]) -> CodeTable:
        """Build a table from per-row counts instead of cumulative highs."""
        return cls.from_arrays(v_mins, np.cumsum(counts, dtype=np.int64).tolist())

    @cached_property
    def v_min(self) -> tuple[int, ...]:
        return tuple(e.v_min for e in self.entries)

    @cached_property
    def c_hi(self) -> tuple[int, ...]:
        return tuple(e.c_hi for e in self.entries)

    @cached_property
    def v_max(self) -> tuple[int, ...]:
        return tuple(v - 1 for v in self.v_min[1:]) + (VALUE_MAX,)

    @cached_property
    def c_lo(self) -> tuple[int, ...]:
        return (0,) + self.c_hi[:-1]

    @cached_property
    def counts(self) -> tuple[int, ...]:
        return tuple(h - l for h, l in zip(self.c_hi, self.c_lo))

    @cached_property
    def offset_lengths(self) -> tuple[int, ...]:
        return tuple((hi - lo).bit_length() for lo, hi in zip(self.v_min, self.v_max))

    @cached_property
    def row_of_value(self) -> tuple[int, ...]:
        """Lookup from each of the 256 values to its row index."""
        rows = []
        for i, (lo, hi) in enumerate(zip(self.v_min, self.v_max)):
            rows.extend([i] * (hi - lo + 1))
        return tuple(rows)

    def offset_length(self, row: int) -> int:
        return self.offset_lengths[row]

    def symbol_of_value(self, v: int) -> tuple[int, int, int]:
        """Return ``(row, offset, offset_bits)`` for the 8-bit value ``v``."""
        row = self.row_of_value[v]
        return row, v - self.v_min[row], self.offset_lengths[row]

    def value_of_symbol(self, row: int, offset: int) -> int:
        if offset < 0 or offset > self.v_max[row] - self.v_min[row]:
            raise OffsetOutOfRange(
                f"offset {offset} exceeds range of row {row} "
                f"(0x{self.v_min[row]:02X}..0x{self.v_max[row]:02X})"
            )
        return self.v_min[row] + offset

    def probability_of_row(self, row: int) -> float:
        return self.counts[row] / COUNT_SCALE

    def covers(self, v: int) -> bool:
        """True when ``v`` falls in a row with nonzero probability."""
        return self.counts[self.row_of_value[v]] > 0

    def __str__(self):
        lines = ["IDX v_min v_max OL   low  high      p"]
        for i in range(NUM_ROWS):
            lines.append(
                f"{i:3d}  0x{self.v_min[i]:02X}  0x{self.v_max[i]:02X} {self.offset_lengths[i]:2d} "
                f"0x{self.c_lo[i]:03X} 0x{self.c_hi[i]:03X} {self.probability_of_row(i):.4f}"
            )
        return "\n".join(lines)


def validate(table: CodeTable) -> None:
    """Raise :class:`TableInvalid` naming the first violated invariant."""
    entries = table.entries
    if len(entries) != NUM_ROWS:
        raise TableInvalid(f"expected {NUM_ROWS} rows, got {len(entries)}")
    for i, (v_min, c_hi) in enumerate(entries):
        if not 0 <= v_min <= VALUE_MAX:
            raise TableInvalid(f"row {i}: v_min {v_min} is not an 8-bit value")
        if not 0 <= c_hi <= COUNT_MAX:
            raise TableInvalid(f"row {i}: c_hi {c_hi} is not a 10-bit count")
    if entries[0].v_min != 0:
        raise TableInvalid("row 0: v_min must be 0x00")
    for i in range(1, NUM_ROWS):
        if entries[i].v_min <= entries[i - 1].v_min:
            raise TableInvalid(f"row {i}: v_min not strictly increasing")
        if entries[i].c_hi < entries[i - 1].c_hi:
            raise TableInvalid(f"row {i}: c_hi decreases")
    if entries[-1].c_hi != COUNT_MAX:
        raise TableInvalid(f"row {NUM_ROWS - 1}: c_hi must be 0x{COUNT_MAX:03X} (full count range)")


def offset_length(table: CodeTable, row: int) -> int:
    return table.offset_length(row)


def symbol_of_value(table: CodeTable, v: int) -> tuple[int, int, int]:
    return table.symbol_of_value(v)


def value_of_symbol(table: CodeTable, row: int, offset: int) -> int:
    return table.value_of_symbol(row, offset)


def probability_of_row(table: CodeTable, row: int) -> float:
    return table.probability_of_row(row)


class Histogram:
    """Read-only 256-bucket value-frequency profile."""

    __slots__ = ("buckets",)

    def __init__(self, buckets):
        arr = np.array(buckets, dtype=np.uint64)
        if arr.shape != (VALUE_MAX + 1,):
            raise ValueError(f"histogram needs {VALUE_MAX + 1} buckets, got shape {arr.shape}")
        arr.flags.writeable = False
        self.buckets = arr

    @classmethod
    def from_values(cls, values) -> Histogram:
        data = np.frombuffer(bytes(values), dtype=np.uint8) if not isinstance(values, np.ndarray) else values
        return cls(np.bincount(data.astype(np.uint8, copy=False), minlength=VALUE_MAX + 1))

    @property
    def total(self) -> int:
        return int(self.buckets.sum())

    def require_samples(self) -> None:
        if self.total == 0:
            raise EmptyHistogram()

    def __add__(self, other: Histogram) -> Histogram:
        return Histogram(self.buckets + other.buckets)

    def __getitem__(self, v):
        return int(self.buckets[v])

    def __eq__(self, other):
        return isinstance(other, Histogram) and bool(np.array_equal(self.buckets, other.buckets))

    def __repr__(self):
        return f"Histogram(total={self.total}, nonzero={int(np.count_nonzero(self.buckets))})"
