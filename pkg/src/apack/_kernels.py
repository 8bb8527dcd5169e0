"""Compiled inner loops for whole-stream encode/decode.

These mirror ``coder.encode_symbol`` / ``coder.decode_symbol`` bit for bit;
the test-suite checks the two paths against each other.
"""

import numpy as np
from numba import njit

TOP = 0xFFFF
HALF = 0x8000
QUARTER = 0x4000
THREE_QUARTERS = 0xC000
SCALE_SHIFT = 10

DECODE_OK = 0
DECODE_NO_ROW = 1
DECODE_BAD_OFFSET = 2


@njit(cache=True, nogil=True)
def _put(buf, pos, bit):
    if bit:
        buf[pos >> 3] |= np.uint8(0x80 >> (pos & 7))
    return pos + 1


@njit(cache=True, nogil=True)
def _get(buf, pos):
    byte = pos >> 3
    if byte >= buf.shape[0]:
        return 0
    return (buf[byte] >> (7 - (pos & 7))) & 1


@njit(cache=True, nogil=True)
def encode_values(values, row_of_value, v_min, c_lo, c_hi, ol, sym_out, ofs_out):
    """Returns (symbol bits, offset bits, index of first uncovered value or -1)."""
    hi = TOP
    lo = 0
    ubc = 0
    sp = 0
    op = 0
    for n in range(values.shape[0]):
        v = np.int64(values[n])
        row = row_of_value[v]
        clo = c_lo[row]
        chi = c_hi[row]
        if chi == clo:
            return sp, op, n
        nbits = ol[row]
        off = v - v_min[row]
        for k in range(nbits - 1, -1, -1):
            op = _put(ofs_out, op, (off >> k) & 1)

        rng = hi - lo + 1
        hi = lo + ((rng * chi) >> SCALE_SHIFT) - 1
        lo = lo + ((rng * clo) >> SCALE_SHIFT)
        while True:
            if hi < HALF:
                sp = _put(sym_out, sp, 0)
                for _ in range(ubc):
                    sp = _put(sym_out, sp, 1)
                ubc = 0
            elif lo >= HALF:
                sp = _put(sym_out, sp, 1)
                for _ in range(ubc):
                    sp = _put(sym_out, sp, 0)
                ubc = 0
                lo -= HALF
                hi -= HALF
            elif lo >= QUARTER and hi < THREE_QUARTERS:
                ubc += 1
                lo -= QUARTER
                hi -= QUARTER
            else:
                break
            lo = lo << 1
            hi = (hi << 1) | 1

    # flush
    ubc += 1
    bit = 0 if lo < QUARTER else 1
    sp = _put(sym_out, sp, bit)
    for _ in range(ubc):
        sp = _put(sym_out, sp, 1 - bit)
    return sp, op, -1


@njit(cache=True, nogil=True)
def decode_values(sym, ofs, count, v_min, span, c_lo, c_hi, ol, out):
    """Returns (status, renormalization shifts, offset bits consumed, failing index)."""
    hi = TOP
    lo = 0
    code = 0
    sp = 0
    op = 0
    shifts = 0
    for _ in range(16):
        code = (code << 1) | _get(sym, sp)
        sp += 1
    for n in range(count):
        rng = hi - lo + 1
        row = -1
        for r in range(c_hi.shape[0]):
            if c_hi[r] == c_lo[r]:
                continue
            s_hi = lo + ((rng * c_hi[r]) >> SCALE_SHIFT) - 1
            if code <= s_hi:
                if code >= lo + ((rng * c_lo[r]) >> SCALE_SHIFT):
                    row = r
                break
        if row < 0:
            return DECODE_NO_ROW, shifts, op, n

        nbits = ol[row]
        off = 0
        for _ in range(nbits):
            off = (off << 1) | _get(ofs, op)
            op += 1
        if off > span[row]:
            return DECODE_BAD_OFFSET, shifts, op, n
        out[n] = v_min[row] + off

        hi = lo + ((rng * c_hi[row]) >> SCALE_SHIFT) - 1
        lo = lo + ((rng * c_lo[row]) >> SCALE_SHIFT)
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
            lo = lo << 1
            hi = (hi << 1) | 1
            code = (code << 1) | _get(sym, sp)
            sp += 1
            shifts += 1
    return DECODE_OK, shifts, op, -1


DECODE_SYM_LENGTH = 3
DECODE_OFS_LENGTH = 4


@njit(cache=True, nogil=True)
def encode_chunks(values, chunk_size, first, last, row_of_value, v_min, c_lo, c_hi, ol, sym_out, ofs_out, sym_len, ofs_len):
    """Encode chunks ``first..last-1`` back to back, each starting on a byte boundary.

    Byte lengths land in ``sym_len``/``ofs_len`` (indexed by chunk). Returns
    the absolute index of the first uncovered value, or -1.
    """
    n = values.shape[0]
    sp = 0
    op = 0
    for k in range(first, last):
        start = k * chunk_size
        stop = min(start + chunk_size, n)
        sbits, obits, bad = encode_values(
            values[start:stop], row_of_value, v_min, c_lo, c_hi, ol, sym_out[sp:], ofs_out[op:]
        )
        if bad >= 0:
            return start + bad
        sym_len[k] = (sbits + 7) >> 3
        ofs_len[k] = (obits + 7) >> 3
        sp += sym_len[k]
        op += ofs_len[k]
    return -1


@njit(cache=True, nogil=True)
def decode_chunks(sym, ofs, sym_len, ofs_len, num_values, chunk_size, first, last, v_min, span, c_lo, c_hi, ol, out):
    """Strictly decode chunks ``first..last-1`` from concatenated streams.

    ``sym``/``ofs`` start at chunk ``first``. Returns (status, chunk, index).
    """
    sp = 0
    op = 0
    for k in range(first, last):
        start = k * chunk_size
        count = min(chunk_size, num_values - start)
        s = sym[sp : sp + sym_len[k]]
        o = ofs[op : op + ofs_len[k]]
        status, shifts, used, where = decode_values(s, o, count, v_min, span, c_lo, c_hi, ol, out[start : start + count])
        if status != DECODE_OK:
            return status, k, where
        if sym_len[k] != (shifts + 2 + 7) >> 3:
            return DECODE_SYM_LENGTH, k, -1
        if ofs_len[k] != (used + 7) >> 3:
            return DECODE_OFS_LENGTH, k, -1
        sp += sym_len[k]
        op += ofs_len[k]
    return DECODE_OK, -1, -1
