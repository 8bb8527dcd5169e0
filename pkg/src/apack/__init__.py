"""Lossless compression of 8-bit quantized tensors with a range-partitioned arithmetic coder."""

from .codetable import CodeTable, Histogram, RangeEntry, validate
from .coder import decode_stream, encode_stream
from .container import CompressedTensor, compress_tensor, decompress_tensor, parse, serialize
from .errors import (
    ApackError,
    CorruptStream,
    EmptyHistogram,
    FormatError,
    ImpossibleAdjustment,
    OffsetOutOfRange,
    TableInvalid,
    ZeroProbabilitySymbol,
)
from .tablegen import SearchConfig, assign_counts, build_table, find_partition

__version__ = "0.1.0"
