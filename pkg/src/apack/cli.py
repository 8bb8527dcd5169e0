"""``apack`` command line: profile, compress, decompress, verify, report, gen."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import container, synth, tablegen
from .codetable import Histogram
from .errors import ApackError, CorruptStream, FormatError
from .report import build_report

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _read_tensor(path) -> np.ndarray:
    return np.fromfile(path, dtype=np.uint8)


def _histogram(paths) -> Histogram:
    hist = Histogram(np.zeros(256, dtype=np.uint64))
    for p in sorted(paths):
        hist = hist + Histogram.from_values(_read_tensor(p))
    return hist


def cmd_profile(args) -> int:
    table = tablegen.build_table(_histogram(args.inputs), is_weights=(args.mode == "weights"))
    Path(args.out).write_bytes(container.write_table(table))
    print(table)
    return EXIT_OK


def cmd_compress(args) -> int:
    data = _read_tensor(args.input)
    if args.table == "auto":
        table = tablegen.build_table(Histogram.from_values(data), is_weights=True)
    else:
        table = container.read_table(Path(args.table).read_bytes())
    ct = container.compress_tensor(data, table, args.chunk_size)
    blob = container.serialize(ct)
    Path(args.out).write_bytes(blob)
    ratio = len(data) / len(blob)
    print(f"original_bytes={len(data)} compressed_bytes={len(blob)} ratio={ratio:.4f}")
    return EXIT_OK


def cmd_decompress(args) -> int:
    ct = container.parse(Path(args.input).read_bytes())
    Path(args.out).write_bytes(container.decompress_tensor(ct))
    return EXIT_OK


def cmd_verify(args) -> int:
    original = Path(args.original).read_bytes()
    decoded = container.decompress_tensor(container.parse(Path(args.container).read_bytes()))
    if decoded == original:
        print(f"pass: {len(original)} bytes match")
        return EXIT_OK
    n = min(len(decoded), len(original))
    diff = next((i for i in range(n) if decoded[i] != original[i]), n)
    print(f"fail: first difference at byte offset {diff} (original {len(original)} bytes, decoded {len(decoded)} bytes)")
    return EXIT_FAIL


def cmd_report(args) -> int:
    report = build_report(args.inputs, args.mode, args.samples, args.chunk_size)
    print(report.to_text())
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    return EXIT_OK


def cmd_gen(args) -> int:
    data = synth.generate(args.distribution, args.count, args.seed)
    data.tofile(args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apack", description="Lossless compression of 8-bit quantized tensors.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="build a code table from one or more tensors")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--mode", choices=("weights", "activations"), default="weights")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("compress", help="compress a raw uint8 tensor file")
    p.add_argument("input")
    p.add_argument("--table", default="auto", help="table file, or 'auto' to profile the input")
    p.add_argument("--chunk-size", type=_positive, default=container.DEFAULT_CHUNK_SIZE)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="restore a tensor from a container")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("verify", help="check that a container decodes to the original")
    p.add_argument("original")
    p.add_argument("container")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="compare apack against the baselines")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--mode", choices=("weights", "activations"), default="weights")
    p.add_argument("--samples", type=_positive, default=1, help="activation samples per table")
    p.add_argument("--chunk-size", type=_positive, default=container.DEFAULT_CHUNK_SIZE)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("gen", help="write a synthetic tensor")
    p.add_argument("distribution", help="uniform | constant:V | two-cluster:P,SPREAD[,TAIL] | sparse:Z | hist:PATH")
    p.add_argument("count", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except synth.BadSpec as e:
        print(f"apack: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as e:
        print(f"apack: error: FormatError: {e}", file=sys.stderr)
        return EXIT_IO
    except CorruptStream as e:
        kind = "CorruptStream" if type(e) is CorruptStream else f"CorruptStream ({type(e).__name__})"
        print(f"apack: error: {kind}: {e}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"apack: error: {e}", file=sys.stderr)
        return EXIT_IO
    except ApackError as e:
        print(f"apack: error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
