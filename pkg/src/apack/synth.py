"""Synthetic 8-bit tensors with controllable value distributions.

Distribution specs (as accepted by ``apack gen``)::

    uniform
    constant:V
    two-cluster:P_LOW,SPREAD[,TAIL]   mass near 0 and near 255, thin tail between
    sparse:ZERO_FRACTION              zeros, other values from a two-cluster shape
    hist:PATH                         256 whitespace-separated weights
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

NUM_VALUES = 256
DEFAULT_TAIL = 0.02


class BadSpec(ValueError):
    pass


def two_cluster_probs(p_low: float = 0.5, spread: int = 4, tail: float = DEFAULT_TAIL) -> np.ndarray:
    if not 0 <= p_low <= 1 or not 0 <= tail < 1:
        raise BadSpec("two-cluster needs 0 <= p_low <= 1 and 0 <= tail < 1")
    if not 1 <= spread <= 128:
        raise BadSpec("two-cluster spread must be in 1..128")
    # triangular falloff away from 0 (and from 255)
    shape = np.arange(spread, 0, -1, dtype=np.float64)
    shape /= shape.sum()
    p = np.zeros(NUM_VALUES)
    p[:spread] += (1 - tail) * p_low * shape
    p[NUM_VALUES - spread :] += (1 - tail) * (1 - p_low) * shape[::-1]
    middle = NUM_VALUES - 2 * spread
    if tail and middle > 0:
        p[spread : NUM_VALUES - spread] += tail / middle
    return p / p.sum()


def sparse_probs(zero_fraction: float) -> np.ndarray:
    if not 0 <= zero_fraction <= 1:
        raise BadSpec("sparse zero fraction must be in [0, 1]")
    nz = two_cluster_probs()
    nz[0] = 0.0
    nz *= (1 - zero_fraction) / nz.sum()
    nz[0] = zero_fraction
    return nz


def _floats(args: str, lo: int, hi: int, name: str) -> list[float]:
    try:
        vals = [float(a) for a in args.split(",")] if args else []
    except ValueError:
        raise BadSpec(f"{name}: arguments must be numbers, got {args!r}") from None
    if not lo <= len(vals) <= hi:
        raise BadSpec(f"{name}: expected {lo}..{hi} arguments, got {len(vals)}")
    return vals


def parse_spec(spec: str):
    """Return a 256-entry probability vector, or an int for ``constant``."""
    name, _, args = spec.partition(":")
    name = name.strip().lower()
    if name == "uniform":
        return np.full(NUM_VALUES, 1 / NUM_VALUES)
    if name == "constant":
        (v,) = _floats(args, 1, 1, name)
        if v != int(v) or not 0 <= v < NUM_VALUES:
            raise BadSpec("constant value must be an integer in 0..255")
        return int(v)
    if name in ("two-cluster", "two_cluster"):
        vals = _floats(args, 0, 3, name)
        p_low = vals[0] if vals else 0.5
        spread = vals[1] if len(vals) > 1 else 4
        tail = vals[2] if len(vals) > 2 else DEFAULT_TAIL
        if spread != int(spread):
            raise BadSpec("two-cluster spread must be an integer")
        return two_cluster_probs(p_low, int(spread), tail)
    if name == "sparse":
        vals = _floats(args, 0, 1, name)
        return sparse_probs(vals[0] if vals else 0.9)
    if name in ("hist", "custom"):
        try:
            weights = np.array(Path(args).read_text().split(), dtype=np.float64)
        except OSError as e:
            raise BadSpec(f"cannot read histogram file {args!r}: {e}") from None
        except ValueError:
            raise BadSpec(f"histogram file {args!r} must hold numbers") from None
        if weights.shape != (NUM_VALUES,) or np.any(weights < 0) or weights.sum() <= 0:
            raise BadSpec("histogram file needs 256 non-negative weights with a positive sum")
        return weights / weights.sum()
    raise BadSpec(f"unknown distribution {spec!r}")


def generate(spec: str, count: int, seed: int = 0) -> np.ndarray:
    if count < 0:
        raise BadSpec("count must be >= 0")
    dist = parse_spec(spec)
    if isinstance(dist, int):
        return np.full(count, dist, dtype=np.uint8)
    rng = np.random.default_rng(seed)
    return rng.choice(NUM_VALUES, size=count, p=dist).astype(np.uint8)
