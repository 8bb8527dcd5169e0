import numpy as np
import pytest

from apack.codetable import CodeTable

# Reference symbol/probability-count table for one BiLSTM weight layer
REF_VMIN = [0x00, 0x04, 0x08, 0x10, 0x40, 0x50, 0x60, 0x70, 0x80, 0x90, 0xA0, 0xB0, 0xC0, 0xD0, 0xF4, 0xFC]
REF_VMAX = [0x03, 0x07, 0x0F, 0x3F, 0x4F, 0x5F, 0x6F, 0x7F, 0x8F, 0x9F, 0xAF, 0xBF, 0xCF, 0xF3, 0xFB, 0xFF]
REF_OL = [2, 2, 3, 6, 4, 4, 4, 4, 4, 4, 4, 4, 4, 6, 3, 2]
REF_LOW = [0x000, 0x1EB, 0x229, 0x238] + [0x23A] * 10 + [0x23C, 0x276]
REF_HIGH = [0x1EB, 0x229, 0x238, 0x23A] + [0x23A] * 9 + [0x23C, 0x276, 0x3FF]
REF_P = [0.4795, 0.0605, 0.0146, 0.0020] + [0.0] * 9 + [0.0020, 0.0566, 0.3838]


@pytest.fixture
def ref_table():
    return CodeTable.from_arrays(REF_VMIN, REF_HIGH)


def random_table(rng, all_rows=True, max_count=60):
    """Random valid table; with ``all_rows`` every row has a nonzero count."""
    v_mins = [0] + sorted(rng.choice(np.arange(1, 256), 15, replace=False).tolist())
    counts = rng.integers(1 if all_rows else 0, max_count, 16)
    counts[rng.integers(0, 16)] += 1
    counts[rng.choice(np.flatnonzero(counts))] += 1023 - int(counts.sum())
    return CodeTable.from_counts(v_mins, counts.tolist())


def covered_values(table):
    return np.array([v for v in range(256) if table.covers(v)], dtype=np.uint8)


_acceptance_lines = []


@pytest.fixture
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
