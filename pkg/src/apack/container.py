"""On-disk container: one tensor, one table, independently coded chunks.

Layout (little-endian)::

    magic "APK1" | version u8 | value_width u8 | num_values u64
    | chunk_size u32 | num_chunks u32
    | 16 x v_min u8 | 16 x c_hi u16
    | num_chunks x (sym_len u32, ofs_len u32)
    | payloads: chunk 0 symbol bytes, chunk 0 offset bytes, chunk 1 ...

Payload bits are MSB-first.
"""

from __future__ import annotations

import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import codetable
from .coder import decode_chunk_range, encode_chunk_range
from .codetable import NUM_ROWS, CodeTable
from .errors import CorruptStream, FormatError, TableInvalid

MAGIC = b"APK1"
TABLE_MAGIC = b"APKT"
VERSION = 1
VALUE_WIDTH = 8
DEFAULT_CHUNK_SIZE = 4096

_FIXED = struct.Struct("<4sBBQII")
_TABLE = struct.Struct(f"<{NUM_ROWS}B{NUM_ROWS}H")
_LENGTHS = struct.Struct("<II")
HEADER_SIZE = _FIXED.size + _TABLE.size  # 70 bytes before the chunk directory


@dataclass(frozen=True)
class CompressedTensor:
    num_values: int
    chunk_size: int
    table: CodeTable
    chunks: tuple[tuple[bytes, bytes], ...]

    @property
    def payload_bytes(self) -> int:
        return sum(len(s) + len(o) for s, o in self.chunks)

    @property
    def total_bytes(self) -> int:
        return HEADER_SIZE + _LENGTHS.size * len(self.chunks) + self.payload_bytes

    @property
    def ratio(self) -> float:
        return self.num_values / self.total_bytes


def num_chunks_for(num_values: int, chunk_size: int) -> int:
    return -(-num_values // chunk_size)


def _map(fn, items, workers):
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _blocks(num_chunks: int, workers) -> list[tuple[int, int]]:
    """Split chunk indices into contiguous blocks, one batch per worker."""
    if workers is None:
        workers = os.cpu_count() or 1
    parts = max(1, min(workers, num_chunks))
    bounds = [num_chunks * i // parts for i in range(parts + 1)]
    return [(a, b) for a, b in zip(bounds, bounds[1:]) if a < b]


def compress_tensor(values, table: CodeTable, chunk_size: int = DEFAULT_CHUNK_SIZE, workers=None) -> CompressedTensor:
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    codetable.validate(table)
    data = values if isinstance(values, np.ndarray) else np.frombuffer(bytes(values), dtype=np.uint8)
    data = np.ascontiguousarray(data, dtype=np.uint8).ravel()
    n = len(data)
    blocks = _blocks(num_chunks_for(n, chunk_size), workers)
    results = _map(lambda b: encode_chunk_range(data, table, chunk_size, *b), blocks, workers)
    chunks = tuple(c for block in results for c in block)
    return CompressedTensor(n, chunk_size, table, chunks)


def decompress_tensor(ct: CompressedTensor, workers=None) -> bytes:
    expected = num_chunks_for(ct.num_values, ct.chunk_size)
    if len(ct.chunks) != expected:
        raise FormatError(0, f"{len(ct.chunks)} chunks present, {expected} expected")
    for k, (sym, _) in enumerate(ct.chunks):
        count = min(ct.chunk_size, ct.num_values - k * ct.chunk_size)
        # a symbol shrinks the range by >= 15 of at most 0xC000 units between
        # shifts, so every symbol-stream bit accounts for < 4096 symbols
        if count > (8 * len(sym) + 16) * 4096:
            raise CorruptStream(f"chunk {k}: {count} values cannot fit in {len(sym)} symbol bytes")
    out = np.empty(ct.num_values, dtype=np.uint8)

    def work(block):
        first, last = block
        decode_chunk_range(ct.chunks[first:last], ct.table, ct.num_values, ct.chunk_size, first, out)

    _map(work, _blocks(expected, workers), workers)
    return out.tobytes()


def table_to_bytes(table: CodeTable) -> bytes:
    return _TABLE.pack(*table.v_min, *table.c_hi)


def table_from_bytes(buf: bytes, offset: int = 0) -> CodeTable:
    if len(buf) - offset < _TABLE.size:
        raise FormatError(offset, "truncated code table")
    fields = _TABLE.unpack_from(buf, offset)
    table = CodeTable.from_arrays(fields[:NUM_ROWS], fields[NUM_ROWS:])
    try:
        codetable.validate(table)
    except TableInvalid as e:
        raise FormatError(offset, e.reason) from None
    return table


def serialize(ct: CompressedTensor) -> bytes:
    out = [
        _FIXED.pack(MAGIC, VERSION, VALUE_WIDTH, ct.num_values, ct.chunk_size, len(ct.chunks)),
        table_to_bytes(ct.table),
    ]
    out.extend(_LENGTHS.pack(len(s), len(o)) for s, o in ct.chunks)
    for s, o in ct.chunks:
        out.append(s)
        out.append(o)
    return b"".join(out)


def parse(buf: bytes) -> CompressedTensor:
    buf = bytes(buf)
    if len(buf) < 4 or buf[:4] != MAGIC:
        raise FormatError(0, "bad magic")
    if len(buf) < _FIXED.size:
        raise FormatError(len(buf), "truncated header")
    _, version, width, num_values, chunk_size, num_chunks = _FIXED.unpack_from(buf, 0)
    if version != VERSION:
        raise FormatError(4, f"unsupported version {version}")
    if width != VALUE_WIDTH:
        raise FormatError(5, f"unsupported value width {width}")
    if chunk_size < 1:
        raise FormatError(14, "chunk_size must be >= 1")
    if num_chunks != num_chunks_for(num_values, chunk_size):
        raise FormatError(18, f"num_chunks {num_chunks} inconsistent with {num_values} values / {chunk_size}")
    table = table_from_bytes(buf, _FIXED.size)

    pos = HEADER_SIZE
    if len(buf) - pos < _LENGTHS.size * num_chunks:
        raise FormatError(pos, "truncated chunk directory")
    lengths = [_LENGTHS.unpack_from(buf, pos + _LENGTHS.size * k) for k in range(num_chunks)]
    pos += _LENGTHS.size * num_chunks
    chunks = []
    for k, (sym_len, ofs_len) in enumerate(lengths):
        if sym_len + ofs_len > len(buf) - pos:
            raise FormatError(pos, f"chunk {k} payload exceeds remaining file size")
        chunks.append((buf[pos : pos + sym_len], buf[pos + sym_len : pos + sym_len + ofs_len]))
        pos += sym_len + ofs_len
    if pos != len(buf):
        raise FormatError(pos, f"{len(buf) - pos} trailing bytes")
    return CompressedTensor(num_values, chunk_size, table, tuple(chunks))


def write_table(table: CodeTable) -> bytes:
    return TABLE_MAGIC + table_to_bytes(table)


def read_table(buf: bytes) -> CodeTable:
    if buf[:4] != TABLE_MAGIC:
        raise FormatError(0, "bad table magic")
    if len(buf) != 4 + _TABLE.size:
        raise FormatError(min(len(buf), 4 + _TABLE.size), "table file has wrong length")
    return table_from_bytes(buf, 4)
