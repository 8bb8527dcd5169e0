"""Exact-arithmetic reference coders, used to cross-check the 16-bit coder.

Nothing here is on the compression path.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .codetable import COUNT_BITS, CodeTable


def oracle_encode(symbols: Sequence, ranges: Mapping) -> tuple[Fraction, Fraction]:
    """Infinite-precision interval narrowing.

    ``ranges`` maps each symbol to its cumulative probability interval
    ``(low, high)``. Returns the final ``[low, high)``.
    """
    low, high = Fraction(0), Fraction(1)
    for s in symbols:
        p_lo, p_hi = (Fraction(x) for x in ranges[s])
        width = high - low
        low, high = low + width * p_lo, low + width * p_hi
    return low, high


def table_ranges(table: CodeTable) -> dict[int, tuple[Fraction, Fraction]]:
    """Exact ``count / 1024`` cumulative intervals of the nonzero rows."""
    scale = 1 << COUNT_BITS
    return {
        r: (Fraction(table.c_lo[r], scale), Fraction(table.c_hi[r], scale))
        for r in range(len(table.entries))
        if table.counts[r]
    }


def quantized_interval(rows: Sequence[int], table: CodeTable) -> tuple[Fraction, Fraction]:
    """Exact interval reached by a coder that snaps boundaries to a 16-bit grid.

    The interval is tracked as absolute rationals. Scaled boundaries are
    floored to the current grid step, and the grid is refined by one bit
    whenever the interval fits in the lower half, upper half or middle half
    of a 16-bit window anchored at ``origin``. No bits are produced, so the
    caller can check that an emitted code stream lands inside the result.
    """
    low, high = Fraction(0), Fraction(1)
    origin = Fraction(0)
    ulp = Fraction(1, 1 << 16)
    for r in rows:
        units = (high - low) / ulp
        assert units.denominator == 1
        units = int(units)
        s_lo = (units * table.c_lo[r]) >> COUNT_BITS
        s_hi = (units * table.c_hi[r]) >> COUNT_BITS
        low, high = low + s_lo * ulp, low + s_hi * ulp
        while True:
            half = origin + (1 << 15) * ulp
            if high <= half:
                pass
            elif low >= half:
                origin = half
            elif low >= origin + (1 << 14) * ulp and high <= origin + (3 << 14) * ulp:
                origin += (1 << 14) * ulp
            else:
                break
            ulp /= 2
    return low, high


def code_fraction(data: bytes) -> Fraction:
    """Interpret a byte string as the binary fraction ``0.b0 b1 b2 ...``."""
    if not data:
        return Fraction(0)
    return Fraction(int.from_bytes(data, "big"), 1 << (8 * len(data)))
