"""Footprints of the comparison methods: RLE, RLEZ, ShapeShifter-style grouping.

These only count bits; none of them produces a decodable stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codetable import Histogram

TUPLE_BITS = 12  # 8-bit value + 4-bit run field
MAX_RUN = 15
SS_WIDTH_FIELD_BITS = 3  # log2 of the 8-bit max precision


@dataclass(frozen=True)
class MethodFootprint:
    method: str
    num_values: int
    total_bits: int | float

    @property
    def ratio(self) -> float:
        if self.total_bits == 0:
            return math.inf if self.num_values else 1.0
        return 8 * self.num_values / self.total_bits

    @property
    def relative(self) -> float:
        """Compressed size over the uncompressed 8-bit size."""
        return 1.0 / self.ratio if self.ratio else math.inf


def _as_array(values) -> np.ndarray:
    if isinstance(values, np.ndarray):
        return values.astype(np.uint8, copy=False).ravel()
    return np.frombuffer(bytes(values), dtype=np.uint8)


def _run_lengths(data: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(run values, run lengths) of maximal runs of equal values."""
    if data.size == 0:
        return data, np.zeros(0, dtype=np.int64)
    starts = np.flatnonzero(np.concatenate(([True], data[1:] != data[:-1])))
    lengths = np.diff(np.append(starts, data.size))
    return data[starts], lengths


def rle_footprint(values) -> MethodFootprint:
    """Each tuple covers one value plus up to 15 repeats of it."""
    data = _as_array(values)
    _, lengths = _run_lengths(data)
    tuples = int(np.sum(-(-lengths // (MAX_RUN + 1))))
    return MethodFootprint("rle", data.size, TUPLE_BITS * tuples)


def rlez_footprint(values) -> MethodFootprint:
    """Each tuple is a value followed by a count of up to 15 zeros.

    A zero run longer than 15 is continued by tuples whose value is 0x00,
    each absorbing up to 16 more zeros.
    """
    data = _as_array(values)
    tuples = 0
    zeros = None  # zeros absorbed by the open tuple; None before the first tuple
    for run_value, length in zip(*_run_lengths(data)):
        length = int(length)
        if run_value != 0:
            tuples += length
            zeros = 0
            continue
        if zeros is not None:
            take = min(MAX_RUN - zeros, length)
            length -= take
            zeros += take
        if length:
            tuples += -(-length // (MAX_RUN + 1))
            zeros = (length - 1) % (MAX_RUN + 1)
    return MethodFootprint("rlez", data.size, TUPLE_BITS * tuples)


def signed_width(v: np.ndarray) -> np.ndarray:
    """Two's-complement bits needed for int8 values (sign bit included)."""
    s = v.astype(np.int8).astype(np.int16)
    mag = np.where(s < 0, ~s, s).astype(np.uint16)
    return _bit_length(mag) + 1


def _bit_length(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint16)
    out = np.zeros(x.shape, dtype=np.int64)
    while np.any(x):
        nz = x > 0
        out += nz
        x = x >> 1
    return out


def shapeshifter_footprint(values, group_size: int = 8, signed: bool = False) -> MethodFootprint:
    """Per group: ``len(group) * P + 3`` bits, P the widest member's bit-width.

    With ``signed`` the values are read as int8 and P strips redundant
    leading 0s *or* 1s, so values near 0xFF are as cheap as values near 0.
    """
    if group_size < 1:
        raise ValueError("group_size must be >= 1")
    data = _as_array(values)
    n = data.size
    if n == 0:
        return MethodFootprint("shapeshifter", 0, 0)
    widths = signed_width(data) if signed else _bit_length(data)
    pad = (-n) % group_size
    padded = np.concatenate((widths, np.zeros(pad, dtype=widths.dtype)))
    per_group = np.maximum(padded.reshape(-1, group_size).max(axis=1), 1)
    sizes = np.full(per_group.shape, group_size)
    if pad:
        sizes[-1] = group_size - pad
    total = int(np.sum(sizes * per_group)) + SS_WIDTH_FIELD_BITS * per_group.size
    return MethodFootprint("shapeshifter", n, total)


def entropy_bound(h: Histogram) -> float:
    h.require_samples()
    counts = h.buckets[h.buckets > 0].astype(np.float64)
    return float(np.sum(counts * -np.log2(counts / h.total)))


def entropy_footprint(values) -> MethodFootprint:
    data = _as_array(values)
    bits = entropy_bound(Histogram.from_values(data)) if data.size else 0.0
    return MethodFootprint("entropy", data.size, bits)
