"""Per-tensor footprint comparison across apack and the baselines."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baselines, container, tablegen
from .codetable import CodeTable, Histogram

METHODS = ("apack", "rle", "rlez", "shapeshifter", "entropy")
CSV_COLUMNS = (
    "name",
    "num_values",
    "original_bits",
    *(f"{m}_bits" for m in METHODS),
    *(f"{m}_ratio" for m in METHODS),
)


@dataclass
class ReportRow:
    name: str
    num_values: int
    bits: dict[str, float]

    @property
    def original_bits(self) -> int:
        return 8 * self.num_values

    def ratio(self, method: str) -> float:
        b = self.bits[method]
        return self.original_bits / b if b else math.inf


@dataclass
class RatioReport:
    rows: list[ReportRow] = field(default_factory=list)

    def geomean(self, method: str) -> float:
        ratios = [r.ratio(method) for r in self.rows]
        if not ratios:
            return math.nan
        if any(math.isinf(x) for x in ratios):
            return math.inf
        return math.exp(sum(math.log(x) for x in ratios) / len(ratios))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(
                [r.name, r.num_values, r.original_bits]
                + [_num(r.bits[m]) for m in METHODS]
                + [_num(r.ratio(m)) for m in METHODS]
            )
        w.writerow(["GEOMEAN", "", "", *[""] * len(METHODS), *[_num(self.geomean(m)) for m in METHODS]])
        return buf.getvalue()

    def to_text(self) -> str:
        head = f"{'name':<28} {'values':>10} " + " ".join(f"{m:>12}" for m in METHODS)
        lines = [head, "-" * len(head)]
        for r in self.rows:
            lines.append(f"{r.name[-28:]:<28} {r.num_values:>10} " + " ".join(f"{r.ratio(m):>12.4f}" for m in METHODS))
        lines.append("-" * len(head))
        lines.append(f"{'geomean ratio':<28} {'':>10} " + " ".join(f"{self.geomean(m):>12.4f}" for m in METHODS))
        lines.append("ratio = original bits / compressed bits; apack includes header and table")
        return "\n".join(lines)


def _num(x: float) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if math.isinf(x):
        return "inf"
    return f"{x:.6f}"


def measure(name: str, data: np.ndarray, table: CodeTable, chunk_size: int = container.DEFAULT_CHUNK_SIZE) -> ReportRow:
    ct = container.compress_tensor(data, table, chunk_size)
    return ReportRow(
        name,
        int(data.size),
        {
            "apack": 8 * ct.total_bytes,
            "rle": baselines.rle_footprint(data).total_bits,
            "rlez": baselines.rlez_footprint(data).total_bits,
            "shapeshifter": baselines.shapeshifter_footprint(data, signed=True).total_bits,
            "entropy": baselines.entropy_footprint(data).total_bits,
        },
    )


def build_report(
    paths, mode: str = "weights", samples_per_table: int = 1, chunk_size: int = container.DEFAULT_CHUNK_SIZE
) -> RatioReport:
    """Weights: one table per file. Activations: consecutive groups of
    ``samples_per_table`` files (sorted by path) share a table profiled from
    their summed histograms."""
    paths = sorted(Path(p) for p in paths)
    tensors = [np.fromfile(p, dtype=np.uint8) for p in paths]
    group = 1 if mode == "weights" else max(1, samples_per_table)
    report = RatioReport()
    for start in range(0, len(paths), group):
        members = range(start, min(start + group, len(paths)))
        hist = Histogram.from_values(tensors[members[0]])
        for k in members[1:]:
            hist = hist + Histogram.from_values(tensors[k])
        table = tablegen.build_table(hist, is_weights=(mode == "weights"))
        for k in members:
            report.rows.append(measure(str(paths[k]), tensors[k], table, chunk_size))
    return report
