"""Exception hierarchy shared by every apack module."""


class ApackError(Exception):
    """Base class for all library errors."""


class TableInvalid(ApackError, ValueError):
    def __init__(self, reason):
        super().__init__(f"invalid code table: {reason}")
        self.reason = reason


class EmptyHistogram(ApackError, ValueError):
    def __init__(self, msg="histogram has no samples"):
        super().__init__(msg)


class ImpossibleAdjustment(ApackError, ValueError):
    pass


class ZeroProbabilitySymbol(ApackError, ValueError):
    """A value maps to a table row that has no probability mass."""

    def __init__(self, value=None, position=None, row=None, chunk=None):
        self.value = value
        self.position = position
        self.row = row
        self.chunk = chunk
        parts = []
        if value is not None:
            parts.append(f"value 0x{value:02X}")
        if row is not None:
            parts.append(f"row {row}")
        if position is not None:
            parts.append(f"position {position}")
        if chunk is not None:
            parts.append(f"chunk {chunk}")
        detail = ", ".join(parts) if parts else "unknown symbol"
        super().__init__(f"zero-probability symbol ({detail}): table does not cover it")


class CorruptStream(ApackError, ValueError):
    pass


class OffsetOutOfRange(CorruptStream):
    pass


class FormatError(ApackError, ValueError):
    def __init__(self, offset, reason):
        super().__init__(f"format error at byte {offset}: {reason}")
        self.offset = offset
        self.reason = reason
