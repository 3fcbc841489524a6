"""Distributed algorithms written once against the round interface."""
from __future__ import annotations

from typing import Any, Mapping, Optional, Sequence

from ..clustering import MODE_BALLS, MODE_COMPONENTS, NO_PARENT, Clustering
from ..distribution import GeomCapParams, sample_offset
from ..graph import Graph
from ..spanner import select_representatives, spanner_params
from .core import NetworkInfo, Node, NodeProgram, Outbox, Payload, field_bits


class _FloodNode(Node):
    def __init__(self, v, nbrs, info, value: Optional[int]):
        super().__init__(v, nbrs, info)
        self.value = value

    def init(self) -> Outbox:
        return self.broadcast((self.value,)) if self.value is not None else {}

    def improve(self, inbox: dict[int, Payload]) -> Optional[int]:
        raise NotImplementedError

    def step(self, rnd, inbox):
        best = self.improve(inbox)
        out: Outbox = {}
        if best is not None and (self.value is None or best < self.value):
            self.value = best
            out = self.broadcast((best,))
        if rnd >= self.info.n:
            self.halted = True
            return {}
        return out

    def output(self):
        return self.value


class _BfsNode(_FloodNode):
    def improve(self, inbox):
        return min((d + 1 for (d,) in inbox.values()), default=None)


class FloodingBFS(NodeProgram):
    """Hop distances from ``source`` by flooding; every node halts after ``n`` rounds."""

    name = "bfs"

    def __init__(self, source: int = 0):
        self.source = source

    def make_node(self, v, nbrs, info):
        return _BfsNode(v, nbrs, info, 0 if v == self.source else None)

    def round_bound(self, g: Graph) -> int:
        return g.n


class _LeaderNode(_FloodNode):
    def improve(self, inbox):
        return min((x for (x,) in inbox.values()), default=None)


class LeaderElection(NodeProgram):
    """Minimum-ID flooding: each node learns the smallest ID in its component."""

    name = "leader"

    def make_node(self, v, nbrs, info):
        return _LeaderNode(v, nbrs, info, v)

    def round_bound(self, g: Graph) -> int:
        return g.n


class ClusterNode(Node):
    """Relaxes ``(distance, center)`` tuples received from neighbors.

    In the regular mode keys order by distance then center ID. When the cap
    exceeds ``n * W`` the components fallback orders by center ID then distance,
    so every vertex ends up in the cluster of its component's smallest ID.
    """

    def __init__(self, v, nbrs, info, r: int, delta: Optional[int], mode: str, halt_round: int):
        super().__init__(v, nbrs, info)
        self.r = r
        self.delta = delta
        self.mode = mode
        self.halt_round = halt_round
        if mode == MODE_BALLS:
            self.dist, self.center = r - delta, v
        else:
            self.dist, self.center = 0, v
        self.seen: dict[int, tuple[int, int]] = {}

    def _order(self, dist: int, center: int) -> tuple[int, int]:
        return (dist, center) if self.mode == MODE_BALLS else (center, dist)

    def init(self) -> Outbox:
        return self.broadcast((self.dist, self.center))

    def relax(self, inbox: dict[int, Payload]) -> bool:
        changed = False
        for u, (d, c) in inbox.items():
            self.seen[u] = (d, c)
            cand = (d + self.nbrs[u], c)
            if self._order(*cand) < self._order(self.dist, self.center):
                self.dist, self.center = cand
                changed = True
        return changed

    def step(self, rnd, inbox):
        changed = self.relax(inbox)
        if rnd >= self.halt_round or not self.nbrs:
            if changed:
                raise AssertionError(f"node {self.v} still improving in round {rnd}")
            self.halted = True
            return {}
        return self.broadcast((self.dist, self.center)) if changed else {}

    def parent(self) -> int:
        if self.center == self.v:
            return NO_PARENT
        for u in sorted(self.nbrs):
            d, c = self.seen[u]
            if c == self.center and d == self.dist - self.nbrs[u]:
                return u
        raise AssertionError(f"node {self.v} found no parent")

    def output(self) -> Any:
        return (self.dist, self.center, self.parent(), tuple(sorted(self.seen.items())))


class DistributedClustering(NodeProgram):
    """Each node starts at distance ``r - delta_v`` and floods improvements.

    Offsets come from the same per-vertex derivation as the sequential
    :func:`~geomcluster.clustering.cluster`, so both produce the same clustering.
    Every node halts after round ``r + 1`` (isolated nodes after round 1).
    """

    name = "cluster"

    def __init__(self, p: float, r: int, seed: int = 0):
        self.p, self.r, self.seed = p, r, seed

    def mode(self, info: NetworkInfo) -> str:
        return MODE_COMPONENTS if self.r >= info.n * info.w_max else MODE_BALLS

    def _delta(self, v: int, mode: str) -> Optional[int]:
        if mode != MODE_BALLS:
            return None
        return sample_offset(GeomCapParams(self.p, self.r), self.seed, v)

    def make_node(self, v, nbrs, info):
        mode = self.mode(info)
        return ClusterNode(v, nbrs, info, self.r, self._delta(v, mode), mode, self.r + 1)

    def round_bound(self, g: Graph) -> int:
        return self.r + 1

    def bit_budget(self, g: Graph) -> int:
        return 2 * field_bits(g.n + self.r + 2)


def reassemble(states: Sequence[tuple], r: int, p=None, seed=None, mode=MODE_BALLS) -> Clustering:
    """Rebuild a :class:`Clustering` from the final states of the cluster nodes."""
    return Clustering(
        center=tuple(s[1] for s in states),
        level=tuple(s[0] for s in states),
        parent=tuple(s[2] for s in states),
        r=r, p=p, seed=seed, mode=mode,
    )


def neighbor_knowledge(states: Sequence[tuple]) -> list[dict[int, tuple[int, int]]]:
    """Per node, the ``(level, center)`` it last heard from each neighbor."""
    return [dict(s[3]) for s in states]


class _GammaInitNode(ClusterNode):
    # After clustering, pick the sparsified edges locally and tell the other
    # endpoint in one extra round.

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.f_out: tuple[int, ...] = ()
        self.f_in: tuple[int, ...] = ()

    def step(self, rnd, inbox):
        if rnd <= self.r + 1:
            changed = self.relax(inbox)
            if rnd < self.r + 1:
                return self.broadcast((self.dist, self.center)) if changed else {}
            if changed:
                raise AssertionError(f"node {self.v} still improving in round {rnd}")
            nbrs = ((u, d, c) for u, (d, c) in sorted(self.seen.items()))
            self.f_out = tuple(select_representatives(self.dist, self.center, nbrs))
            return {u: (1,) for u in self.f_out}
        self.f_in = tuple(sorted(inbox))
        self.halted = True
        return {}

    def output(self) -> Any:
        edges = tuple(sorted(set(self.f_out) | set(self.f_in)))
        return (self.dist, self.center, self.parent(), tuple(sorted(self.seen.items())), edges)


class GammaInitProgram(DistributedClustering):
    """Clustering with spanner parameters plus one round announcing F edges."""

    name = "gamma-init"

    def __init__(self, n: int, k: int, seed: int = 0):
        p, r = spanner_params(n, k)
        super().__init__(p, r, seed)
        self.k = k

    def make_node(self, v, nbrs, info):
        mode = self.mode(info)
        return _GammaInitNode(v, nbrs, info, self.r, self._delta(v, mode), mode, self.r + 2)

    def round_bound(self, g: Graph) -> int:
        return self.r + 2


PROGRAMS: Mapping[str, type] = {
    "bfs": FloodingBFS,
    "leader": LeaderElection,
    "cluster": DistributedClustering,
}
