"""MSB-first bit packing used by both the symbol and the offset streams."""

from __future__ import annotations


class BitSink:
    def __init__(self):
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0
        self.bit_count = 0

    def write_bit(self, bit: int) -> None:
        self._acc = (self._acc << 1) | (bit & 1)
        self._nacc += 1
        self.bit_count += 1
        if self._nacc == 8:
            self._buf.append(self._acc)
            self._acc = 0
            self._nacc = 0

    def write_bits(self, value: int, nbits: int) -> None:
        """Append the low ``nbits`` of ``value``, most significant first."""
        for shift in range(nbits - 1, -1, -1):
            self.write_bit(value >> shift)

    def write_repeated(self, bit: int, n: int) -> None:
        for _ in range(n):
            self.write_bit(bit)

    def pad_to_byte(self) -> None:
        while self._nacc:
            self.write_bit(0)

    def getvalue(self) -> bytes:
        """Bytes written so far; a partial last byte is zero-filled."""
        if self._nacc:
            return bytes(self._buf) + bytes([(self._acc << (8 - self._nacc)) & 0xFF])
        return bytes(self._buf)

    def bits(self) -> str:
        """Debug view, e.g. ``"0110"``."""
        s = "".join(f"{b:08b}" for b in self._buf)
        if self._nacc:
            s += f"{self._acc:0{self._nacc}b}"
        return s


class BitSource:
    """Reads bits MSB-first; once exhausted it keeps yielding 0-bits."""

    def __init__(self, data: bytes):
        self._data = bytes(data)
        self.position = 0  # bits consumed, may run past the end

    @property
    def bit_length(self) -> int:
        return len(self._data) * 8

    @property
    def exhausted(self) -> bool:
        return self.position >= self.bit_length

    def read_bit(self) -> int:
        pos = self.position
        self.position = pos + 1
        byte = pos >> 3
        if byte >= len(self._data):
            return 0
        return (self._data[byte] >> (7 - (pos & 7))) & 1

    def read_bits(self, nbits: int) -> int:
        value = 0
        for _ in range(nbits):
            value = (value << 1) | self.read_bit()
        return value
