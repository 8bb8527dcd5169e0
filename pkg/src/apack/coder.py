"""Fixed-precision (16-bit) arithmetic coder over code-table rows.

The coder keeps a 16-bit window ``[LO, HI]`` into an arbitrary-precision
interval. ``HI`` conceptually continues with an infinite run of 1s and
``LO`` with 0s, so every left shift feeds a 1 into ``HI`` and a 0 into
``LO``. Settled leading bits are emitted immediately; when the window
straddles the midpoint (``LO = 01...``, ``HI = 10...``) the coder drops the
second bit and counts a pending "underflow" bit in ``UBC`` instead, to be
emitted as the inverse of the next settled bit.

Each table row is one symbol. The symbol's count interval
``[c_lo, c_hi)`` is scaled by the current range and the low 10 bits of
the product are dropped, i.e. probabilities are ``count / 1024``.

Per-symbol step functions (:func:`encode_symbol`, :func:`decode_symbol`)
follow the hardware description one step at a time; the whole-stream
functions run the same arithmetic in a compiled loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .bitio import BitSink, BitSource
from .codetable import COUNT_BITS, CodeTable
from .errors import CorruptStream, OffsetOutOfRange, ZeroProbabilitySymbol

TOP = 0xFFFF
HALF = 0x8000
QUARTER = 0x4000
THREE_QUARTERS = 0xC000


@dataclass
class EncoderState:
    hi: int = TOP
    lo: int = 0
    ubc: int = 0


@dataclass
class DecoderState:
    hi: int = TOP
    lo: int = 0
    code: int = 0

    @classmethod
    def start(cls, source: BitSource) -> DecoderState:
        return cls(code=source.read_bits(16))


def _scaled(rng: int, count: int) -> int:
    return (rng * count) >> COUNT_BITS


def _emit(sink: BitSink, bit: int, pending: int) -> None:
    sink.write_bit(bit)
    sink.write_repeated(1 - bit, pending)


def encode_symbol(state: EncoderState, table: CodeTable, row: int, sink: BitSink) -> EncoderState:
    c_lo, c_hi = table.c_lo[row], table.c_hi[row]
    if c_hi == c_lo:
        raise ZeroProbabilitySymbol(row=row)
    rng = state.hi - state.lo + 1
    hi = state.lo + _scaled(rng, c_hi) - 1
    lo = state.lo + _scaled(rng, c_lo)
    ubc = state.ubc
    while True:
        if hi < HALF:
            _emit(sink, 0, ubc)
            ubc = 0
        elif lo >= HALF:
            _emit(sink, 1, ubc)
            ubc = 0
            lo -= HALF
            hi -= HALF
        elif lo >= QUARTER and hi < THREE_QUARTERS:
            ubc += 1
            lo -= QUARTER
            hi -= QUARTER
        else:
            break
        lo <<= 1
        hi = (hi << 1) | 1
    state.hi, state.lo, state.ubc = hi, lo, ubc
    return state


def flush(state: EncoderState, sink: BitSink, pad: bool = True) -> None:
    """Terminate the symbol stream: two disambiguating bits plus pending ones."""
    state.ubc += 1
    _emit(sink, 0 if state.lo < QUARTER else 1, state.ubc)
    state.ubc = 0
    if pad:
        sink.pad_to_byte()


def decode_symbol(state: DecoderState, table: CodeTable, source: BitSource) -> tuple[int, DecoderState]:
    lo, hi, code = state.lo, state.hi, state.code
    rng = hi - lo + 1
    row = -1
    for r in range(len(table.entries)):
        c_lo, c_hi = table.c_lo[r], table.c_hi[r]
        if c_hi == c_lo:
            continue
        if lo + _scaled(rng, c_lo) <= code <= lo + _scaled(rng, c_hi) - 1:
            row = r
            break
    if row < 0:
        raise CorruptStream(f"code 0x{code:04X} outside every scaled count range")

    hi = lo + _scaled(rng, table.c_hi[row]) - 1
    lo = lo + _scaled(rng, table.c_lo[row])
    while True:
        if hi < HALF:
            pass
        elif lo >= HALF:
            lo -= HALF
            hi -= HALF
            code -= HALF
        elif lo >= QUARTER and hi < THREE_QUARTERS:
            lo -= QUARTER
            hi -= QUARTER
            code -= QUARTER
        else:
            break
        lo <<= 1
        hi = (hi << 1) | 1
        code = (code << 1) | source.read_bit()
    state.hi, state.lo, state.code = hi, lo, code
    return row, state


class EncodedStream(NamedTuple):
    symbol_bytes: bytes
    offset_bytes: bytes
    count: int
    symbol_bits: int
    offset_bits: int


class _TableArrays:
    """int64 views of a table for the compiled loops."""

    __slots__ = ("row_of_value", "v_min", "span", "c_lo", "c_hi", "ol")

    def __init__(self, table: CodeTable):
        self.row_of_value = np.asarray(table.row_of_value, dtype=np.int64)
        self.v_min = np.asarray(table.v_min, dtype=np.int64)
        self.span = np.asarray(table.v_max, dtype=np.int64) - self.v_min
        self.c_lo = np.asarray(table.c_lo, dtype=np.int64)
        self.c_hi = np.asarray(table.c_hi, dtype=np.int64)
        self.ol = np.asarray(table.offset_lengths, dtype=np.int64)


_arrays_cache: dict[CodeTable, _TableArrays] = {}


def _arrays(table: CodeTable) -> _TableArrays:
    arrs = _arrays_cache.get(table)
    if arrs is None:
        if len(_arrays_cache) > 64:
            _arrays_cache.clear()
        arrs = _arrays_cache[table] = _TableArrays(table)
    return arrs


def _as_uint8(values) -> np.ndarray:
    if isinstance(values, np.ndarray):
        return np.ascontiguousarray(values, dtype=np.uint8)
    return np.frombuffer(bytes(values), dtype=np.uint8)


def _as_bytes(stream) -> bytes:
    if isinstance(stream, BitSource):
        return stream._data
    if isinstance(stream, BitSink):
        return stream.getvalue()
    return bytes(stream)


def encode_stream(values, table: CodeTable) -> EncodedStream:
    """Split ``values`` into an arithmetic-coded symbol stream and a raw offset stream."""
    data = _as_uint8(values)
    n = data.shape[0]
    arrs = _arrays(table)
    # each symbol narrows the range by at most 2**12 (count >= 1, range > 2**14)
    sym_out = np.zeros((12 * n + 64) // 8 + 8, dtype=np.uint8)
    ofs_out = np.zeros(n + 1, dtype=np.uint8)
    sym_bits, ofs_bits, bad = _kernels.encode_values(
        data, arrs.row_of_value, arrs.v_min, arrs.c_lo, arrs.c_hi, arrs.ol, sym_out, ofs_out
    )
    if bad >= 0:
        v = int(data[bad])
        raise ZeroProbabilitySymbol(value=v, position=int(bad), row=table.row_of_value[v])
    return EncodedStream(
        sym_out[: (sym_bits + 7) // 8].tobytes(),
        ofs_out[: (ofs_bits + 7) // 8].tobytes(),
        n,
        int(sym_bits),
        int(ofs_bits),
    )


def encode_stream_stepwise(values, table: CodeTable) -> EncodedStream:
    """Same output as :func:`encode_stream`, built from the per-symbol steps."""
    data = _as_uint8(values)
    state = EncoderState()
    sym, ofs = BitSink(), BitSink()
    for pos, v in enumerate(data.tolist()):
        row, offset, nbits = table.symbol_of_value(v)
        if table.counts[row] == 0:
            raise ZeroProbabilitySymbol(value=v, position=pos, row=row)
        ofs.write_bits(offset, nbits)
        encode_symbol(state, table, row, sym)
    flush(state, sym, pad=False)
    return EncodedStream(sym.getvalue(), ofs.getvalue(), len(data), sym.bit_count, ofs.bit_count)


def decode_stream(symbol_bits, offset_bits, table: CodeTable, count: int, strict: bool = False) -> bytes:
    """Decode exactly ``count`` values.

    With ``strict`` the byte lengths of both streams must match what the
    encoder would have produced for those ``count`` symbols, which catches
    truncated or padded payloads.
    """
    sym = np.frombuffer(_as_bytes(symbol_bits), dtype=np.uint8)
    ofs = np.frombuffer(_as_bytes(offset_bits), dtype=np.uint8)
    arrs = _arrays(table)
    out = np.empty(count, dtype=np.uint8)
    status, shifts, ofs_used, where = _kernels.decode_values(
        sym, ofs, count, arrs.v_min, arrs.span, arrs.c_lo, arrs.c_hi, arrs.ol, out
    )
    if status == _kernels.DECODE_NO_ROW:
        raise CorruptStream(f"symbol {where}: code value outside every scaled count range")
    if status == _kernels.DECODE_BAD_OFFSET:
        raise OffsetOutOfRange(f"symbol {where}: offset exceeds its range")
    if strict:
        want_sym = (shifts + 2 + 7) // 8
        want_ofs = (ofs_used + 7) // 8
        if len(sym) != want_sym:
            raise CorruptStream(f"symbol stream is {len(sym)} bytes, expected {want_sym}")
        if len(ofs) != want_ofs:
            raise CorruptStream(f"offset stream is {len(ofs)} bytes, expected {want_ofs}")
    return out.tobytes()


def decode_stream_stepwise(symbol_bits, offset_bits, table: CodeTable, count: int) -> bytes:
    sym = BitSource(_as_bytes(symbol_bits))
    ofs = BitSource(_as_bytes(offset_bits))
    state = DecoderState.start(sym)
    out = bytearray()
    for _ in range(count):
        row, state = decode_symbol(state, table, sym)
        out.append(table.value_of_symbol(row, ofs.read_bits(table.offset_lengths[row])))
    return bytes(out)


def encode_chunk_range(values, table: CodeTable, chunk_size: int, first: int, last: int) -> list[tuple[bytes, bytes]]:
    """Encode chunks ``first..last-1`` of ``values``, each with a fresh coder.

    Gives the same bytes as calling :func:`encode_stream` on every chunk but
    runs in one compiled call, which matters for very small chunks.
    """
    data = _as_uint8(values)
    n = data.shape[0]
    arrs = _arrays(table)
    lo_val, hi_val = first * chunk_size, min(last * chunk_size, n)
    span = max(hi_val - lo_val, 0)
    chunks = last - first
    sym_out = np.zeros(2 * span + 16 * chunks + 64, dtype=np.uint8)
    ofs_out = np.zeros(span + chunks + 64, dtype=np.uint8)
    sym_len = np.zeros(last, dtype=np.int64)
    ofs_len = np.zeros(last, dtype=np.int64)
    bad = _kernels.encode_chunks(
        data, chunk_size, first, last, arrs.row_of_value, arrs.v_min, arrs.c_lo, arrs.c_hi, arrs.ol,
        sym_out, ofs_out, sym_len, ofs_len,
    )
    if bad >= 0:
        v = int(data[bad])
        raise ZeroProbabilitySymbol(value=v, position=int(bad), row=table.row_of_value[v], chunk=int(bad) // chunk_size)
    sym_bytes, ofs_bytes = sym_out.tobytes(), ofs_out.tobytes()
    out = []
    sp = op = 0
    for s, o in zip(sym_len[first:].tolist(), ofs_len[first:].tolist()):
        out.append((sym_bytes[sp : sp + s], ofs_bytes[op : op + o]))
        sp += s
        op += o
    return out


def decode_chunk_range(chunks, table: CodeTable, num_values: int, chunk_size: int, first: int, out: np.ndarray) -> None:
    """Strictly decode ``chunks`` (starting at chunk index ``first``) into ``out``."""
    arrs = _arrays(table)
    sym = np.frombuffer(b"".join(s for s, _ in chunks), dtype=np.uint8)
    ofs = np.frombuffer(b"".join(o for _, o in chunks), dtype=np.uint8)
    last = first + len(chunks)
    sym_len = np.zeros(last, dtype=np.int64)
    ofs_len = np.zeros(last, dtype=np.int64)
    sym_len[first:] = [len(s) for s, _ in chunks]
    ofs_len[first:] = [len(o) for _, o in chunks]
    status, k, where = _kernels.decode_chunks(
        sym, ofs, sym_len, ofs_len, num_values, chunk_size, first, last,
        arrs.v_min, arrs.span, arrs.c_lo, arrs.c_hi, arrs.ol, out,
    )
    if status == _kernels.DECODE_NO_ROW:
        raise CorruptStream(f"chunk {k}, symbol {where}: code value outside every scaled count range")
    if status == _kernels.DECODE_BAD_OFFSET:
        raise OffsetOutOfRange(f"chunk {k}, symbol {where}: offset exceeds its range")
    if status == _kernels.DECODE_SYM_LENGTH:
        raise CorruptStream(f"chunk {k}: symbol stream length does not match its symbol count")
    if status == _kernels.DECODE_OFS_LENGTH:
        raise CorruptStream(f"chunk {k}: offset stream length does not match its symbols")
