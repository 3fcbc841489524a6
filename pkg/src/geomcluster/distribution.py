"""Capped geometric distribution GeomCap(p, r) and per-vertex offset sampling.

Every random value in the package is derived by hashing ``(seed, index)`` with
splitmix64, so the value drawn for vertex ``v`` does not depend on ``n`` or on
the order in which vertices are sampled.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

Number = Union[float, Fraction]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def _mix_seed(seed: int) -> int:
    # Pre-mix so seeds 0,1,2,... start far apart in the counter space.
    z = (seed * _GOLDEN + 0x632BE59BD9B4E019) & _MASK
    return splitmix64(z)


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def hash_u64(seed: int, index: np.ndarray | int) -> np.ndarray:
    """Vectorized ``splitmix64(mix(seed) + index)`` as uint64."""
    base = np.uint64(_mix_seed(seed & _MASK))
    idx = np.asarray(index, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = base + idx * np.uint64(_GOLDEN) + np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def uniform01(seed: int, index: np.ndarray | int) -> np.ndarray:
    """Uniform doubles in [0, 1) from the top 53 bits of the hash."""
    return (hash_u64(seed, index) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class GeomCapParams:
    p: float
    r: int

    def __post_init__(self) -> None:
        if not 0 < self.p < 1:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if int(self.r) != self.r or self.r < 0:
            raise ValueError(f"r must be a nonnegative integer, got {self.r}")


@dataclass(frozen=True)
class Offsets:
    """Per-vertex samples ``delta[v]`` in ``0..r``."""

    delta: tuple[int, ...]
    r: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", tuple(int(d) for d in self.delta))
        bad = [v for v, d in enumerate(self.delta) if not 0 <= d <= self.r]
        if bad:
            raise ValueError(f"offset of vertex {bad[0]} outside [0, {self.r}]")

    def __len__(self) -> int:
        return len(self.delta)

    def __getitem__(self, v: int) -> int:
        return self.delta[v]


def geom_cap_pmf(params: GeomCapParams, i: int) -> Number:
    """P[GeomCap(p, r) = i]. Exact when ``params.p`` is a Fraction."""
    p, r = params.p, params.r
    if 0 <= i <= r - 1:
        return p * (1 - p) ** i
    if i == r:
        return (1 - p) ** r
    return 0 * p


def geom_cap_tail(params: GeomCapParams, i: int) -> Number:
    """P[GeomCap(p, r) >= i], summed term by term from the pmf."""
    return sum((geom_cap_pmf(params, j) for j in range(max(i, 0), params.r + 1)), 0 * params.p)


def geom_cap_mean(params: GeomCapParams) -> float:
    return float(sum(j * geom_cap_pmf(params, j) for j in range(params.r + 1)))


def geom_cap_var(params: GeomCapParams) -> float:
    mu = geom_cap_mean(params)
    return float(sum((j - mu) ** 2 * geom_cap_pmf(params, j) for j in range(params.r + 1)))


def inverse_cdf(params: GeomCapParams, u: np.ndarray) -> np.ndarray:
    """Map uniforms in [0, 1) to GeomCap samples.

    ``floor(log(1-u) / log(1-p))`` counts failures before the first success,
    since ``P[floor(.) >= i] = (1-p)^i``; values past the cap collapse onto ``r``.
    """
    u = np.asarray(u, dtype=np.float64)
    k = np.floor(np.log1p(-u) / np.log1p(-float(params.p)))
    return np.minimum(k, params.r).astype(np.int64)


def sample_offsets(params: GeomCapParams, n: int, seed: int) -> Offsets:
    if n < 1:
        raise ValueError("n must be >= 1")
    u = uniform01(seed, np.arange(n, dtype=np.uint64))
    return Offsets(tuple(inverse_cdf(params, u).tolist()), params.r)


def sample_offset(params: GeomCapParams, seed: int, v: int) -> int:
    """The single value ``sample_offsets(params, n, seed)[v]`` for any ``n > v``."""
    return int(inverse_cdf(params, uniform01(seed, np.asarray([v], dtype=np.uint64)))[0])
