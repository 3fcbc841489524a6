"""Probabilistic low-diameter decompositions of integer-weighted graphs."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .clustering import Clustering, cluster
from .graph import Graph


@dataclass(frozen=True)
class LddParams:
    beta: float
    n: int
    p: float
    r: int


def ldd_params(beta: float, n: int) -> LddParams:
    """``p = beta/4`` and ``r = ceil(ln(n^2/p)/p + 1/(4p))``, no safety margin."""
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    p = beta / 4
    r = math.ceil(math.log(n * n / p) / p + 1 / (4 * p))
    return LddParams(beta, n, p, r)


def ldd(g: Graph, beta: float, seed: int = 0) -> Clustering:
    prm = ldd_params(beta, g.n)
    return cluster(g, prm.p, prm.r, seed)


@dataclass
class CutStats:
    """Per-edge counts of trials in which the edge was cut."""

    edges: tuple[tuple[int, int, int], ...]
    beta: float
    cuts: np.ndarray = field(repr=False)
    trials: int = 0

    @classmethod
    def empty(cls, g: Graph, beta: float) -> "CutStats":
        return cls(g.edges, beta, np.zeros(g.m, dtype=np.int64), 0)

    def merge(self, other: "CutStats") -> "CutStats":
        if self.edges != other.edges or self.beta != other.beta:
            raise ValueError("cannot merge statistics of different experiments")
        return CutStats(self.edges, self.beta, self.cuts + other.cuts, self.trials + other.trials)

    @property
    def frequency(self) -> np.ndarray:
        if self.trials == 0:
            return np.zeros(len(self.edges))
        return self.cuts / self.trials

    @property
    def weights(self) -> np.ndarray:
        return np.asarray([w for _, _, w in self.edges], dtype=np.float64)

    def bounds(self) -> np.ndarray:
        return self.beta * self.weights

    def margins(self) -> np.ndarray:
        """Three binomial standard deviations at the bound, zero where vacuous."""
        b = self.bounds()
        out = np.zeros_like(b)
        live = b < 1
        out[live] = 3.0 * np.sqrt(b[live] * (1 - b[live]) / max(self.trials, 1))
        return out

    def vacuous(self) -> np.ndarray:
        return self.bounds() >= 1

    def passes(self) -> np.ndarray:
        ok = self.frequency <= self.bounds() + self.margins()
        return ok | self.vacuous()

    @property
    def expected_cut_weight(self) -> float:
        """Sum of frequencies (the mean number of cut edges per trial)."""
        return float(self.frequency.sum())

    @property
    def aggregate_bound(self) -> float:
        return float(self.beta * self.weights.sum())

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["u", "v", "w", "frequency", "bound", "margin", "pass"])
        freq, bnd, mrg = self.frequency, self.bounds(), self.margins()
        ok, vac = self.passes(), self.vacuous()
        for i, (u, v, w) in enumerate(self.edges):
            verdict = "skip" if vac[i] else ("pass" if ok[i] else "fail")
            out.writerow([u, v, w, f"{freq[i]:.6f}", f"{bnd[i]:.6f}", f"{mrg[i]:.6f}", verdict])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "beta": self.beta,
            "trials": self.trials,
            "edges": [
                {"u": u, "v": v, "w": w, "frequency": float(f), "bound": float(b),
                 "margin": float(mg), "vacuous": bool(vc), "pass": bool(ok)}
                for (u, v, w), f, b, mg, vc, ok in zip(
                    self.edges, self.frequency, self.bounds(), self.margins(),
                    self.vacuous(), self.passes())
            ],
            "sum_frequency": self.expected_cut_weight,
            "aggregate_bound": self.aggregate_bound,
        }


def _run_trials(g: Graph, beta: float, seeds: range) -> CutStats:
    stats = CutStats.empty(g, beta)
    us = np.asarray([u for u, _, _ in g.edges], dtype=np.int64)
    vs = np.asarray([v for _, v, _ in g.edges], dtype=np.int64)
    for s in seeds:
        center = np.asarray(ldd(g, beta, s).center)
        stats.cuts += center[us] != center[vs]
    stats.trials = len(seeds)
    return stats


def estimate_cut_prob(
    g: Graph, beta: float, trials: int, seed: int = 0, workers: int = 1
) -> CutStats:
    """Run ``ldd`` with seeds ``seed .. seed+trials-1`` and count cut edges.

    With ``workers > 1`` the seed range is split into chunks evaluated in separate
    processes; merging is a sum, so the result does not depend on the split.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if workers <= 1:
        return _run_trials(g, beta, range(seed, seed + trials))
    bounds = np.linspace(seed, seed + trials, workers + 1).astype(int)
    chunks = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_trials, [g] * len(chunks), [beta] * len(chunks), chunks))
    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    return total
