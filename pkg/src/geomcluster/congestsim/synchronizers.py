"""Event-driven asynchronous execution under synchronizers alpha, beta and gamma.

Every node simulates rounds ``1..R`` of a :class:`NodeProgram`. Algorithm
messages are acknowledged; a node is *safe* for round ``t`` once every round-``t``
message it sent has been acknowledged. The synchronizer decides when a node may
consume its round-``t`` inbox and start round ``t + 1``:

alpha
    safe nodes tell all neighbors; proceed once every neighbor is safe.
beta
    safety is convergecast up a BFS spanning forest, the root broadcasts ``go``.
gamma
    beta inside each cluster of a sparsified decomposition, alpha between
    clusters over the sparsified inter-cluster edges only.
"""
from __future__ import annotations

import heapq
from collections import defaultdict
from typing import Any, Optional

from ..graph import Graph
from ..spanner import SparsifiedDecomposition
from .core import (
    ACK,
    ALG,
    WATCHDOG_EVENTS,
    Counters,
    DelaySchedule,
    Event,
    Node,
    NodeProgram,
    SeededDelays,
    SimulationError,
    Transcript,
    WatchdogExceeded,
    _check_outbox,
    digest,
)

SYNCHRONIZERS = ("alpha", "beta", "gamma")


class AsyncNetwork:
    """Event queue plus the synchronizer-independent pulse machinery."""

    def __init__(
        self,
        prog: NodeProgram,
        g: Graph,
        schedule: DelaySchedule,
        rounds: int,
        max_events: int = WATCHDOG_EVENTS,
        record: bool = True,
    ):
        self.g = g
        self.prog = prog
        self.nodes: list[Node] = prog.build(g)
        self.budget = prog.bit_budget(g)
        self.schedule = schedule
        self.R = rounds
        self.max_events = max_events
        self.record = record
        self.queue: list[tuple[float, int, int, str, int, int, Any]] = []
        self.seq = 0
        self.sent = 0
        self.now = 0.0
        self.processed = 0
        self.counters = Counters(rounds=rounds)
        self.events: list[Event] = []
        self.pulse = [0] * g.n
        self.finished = [False] * g.n
        self.unacked: dict[tuple[int, int], int] = defaultdict(int)
        self.sync: Optional["Synchronizer"] = None

    # messaging

    def send(self, src: int, dest: int, kind: str, rnd: int, payload: Any = None) -> None:
        t = self.now + self.schedule.delay(self.sent)
        self.sent += 1
        heapq.heappush(self.queue, (t, self.seq, dest, kind, src, rnd, payload))
        self.seq += 1

    def run(self) -> None:
        for v in range(self.g.n):
            self.start_round(v, 1, self.nodes[v].init())
        while self.queue:
            t, _, dest, kind, src, rnd, payload = heapq.heappop(self.queue)
            self.processed += 1
            if self.processed > self.max_events:
                raise WatchdogExceeded(f"more than {self.max_events} events")
            self.now = t
            if kind == ALG:
                self.counters.alg_msgs += 1
            elif kind == ACK:
                self.counters.ack_msgs += 1
            else:
                self.counters.sync_msgs += 1
            if self.record:
                self.events.append(Event(t, dest, kind, src, rnd, digest(src, rnd, payload)))
            self.deliver(dest, kind, src, rnd, payload)
        self.counters.sim_time = self.now
        stuck = [v for v in range(self.g.n) if not self.finished[v]]
        if stuck:
            raise SimulationError(f"nodes {stuck[:5]} never completed round {self.R}")

    def deliver(self, v: int, kind: str, src: int, rnd: int, payload: Any) -> None:
        if kind == ALG:
            self.nodes[v].on_receive(rnd, src, payload)
            self.send(v, src, ACK, rnd)
        elif kind == ACK:
            key = (v, rnd)
            self.unacked[key] -= 1
            if self.unacked[key] == 0:
                del self.unacked[key]
                self.sync.on_safe(v, rnd)
        else:
            self.sync.on_message(v, kind, src, rnd)

    # pulses

    def start_round(self, v: int, rnd: int, out) -> None:
        node = self.nodes[v]
        _check_outbox(node, out, self.budget)
        self.pulse[v] = rnd
        for dest, payload in sorted(out.items()):
            self.send(v, dest, ALG, rnd, payload)
        if out:
            self.unacked[(v, rnd)] = len(out)
        else:
            self.sync.on_safe(v, rnd)

    def proceed(self, v: int, rnd: int) -> None:
        """Round ``rnd`` is complete at ``v``: every message of that round has arrived."""
        if self.pulse[v] != rnd:
            raise SimulationError(f"node {v} told to leave round {rnd} while in {self.pulse[v]}")
        node = self.nodes[v]
        out = {}
        if not node.halted:
            out = node.end_round(rnd)
        if rnd == self.R:
            if out or not node.halted:
                raise SimulationError(f"node {v} still active after round bound {self.R}")
            self.finished[v] = True
            return
        self.start_round(v, rnd + 1, out)


class Synchronizer:
    name = "synchronizer"

    def __init__(self, net: AsyncNetwork):
        self.net = net

    def on_safe(self, v: int, rnd: int) -> None:
        raise NotImplementedError

    def on_message(self, v: int, kind: str, src: int, rnd: int) -> None:
        raise NotImplementedError


class Alpha(Synchronizer):
    name = "alpha"

    def __init__(self, net):
        super().__init__(net)
        self.self_safe: set[tuple[int, int]] = set()
        self.heard: dict[tuple[int, int], int] = defaultdict(int)

    def on_safe(self, v, rnd):
        self.self_safe.add((v, rnd))
        for u in self.net.g.neighbors(v):
            self.net.send(v, u, "safe", rnd)
        self._check(v, rnd)

    def on_message(self, v, kind, src, rnd):
        self.heard[(v, rnd)] += 1
        self._check(v, rnd)

    def _check(self, v, rnd):
        key = (v, rnd)
        if key in self.self_safe and self.heard[key] == self.net.g.degree(v):
            self.self_safe.discard(key)
            self.heard.pop(key, None)
            self.net.proceed(v, rnd)


def bfs_forest(g: Graph) -> tuple[list[int], list[list[int]]]:
    """Parent pointers (-1 at roots) of a BFS forest rooted at each component's minimum ID."""
    parent = [-2] * g.n
    children: list[list[int]] = [[] for _ in range(g.n)]
    for root in range(g.n):
        if parent[root] != -2:
            continue
        parent[root] = -1
        frontier = [root]
        while frontier:
            nxt = []
            for x in frontier:
                for y in g.neighbors(x):
                    if parent[y] == -2:
                        parent[y] = x
                        children[x].append(y)
                        nxt.append(y)
            frontier = nxt
    return parent, children


class _TreeSync(Synchronizer):
    """Convergecast/broadcast helper over a rooted forest."""

    def __init__(self, net, parent: list[int], children: list[list[int]]):
        super().__init__(net)
        self.parent = parent
        self.children = children

    def _down(self, v, kind, rnd):
        for c in self.children[v]:
            self.net.send(v, c, kind, rnd)


class Beta(_TreeSync):
    name = "beta"

    def __init__(self, net):
        parent, children = bfs_forest(net.g)
        super().__init__(net, parent, children)
        self.self_safe: set[tuple[int, int]] = set()
        self.child_safe: dict[tuple[int, int], int] = defaultdict(int)

    def on_safe(self, v, rnd):
        self.self_safe.add((v, rnd))
        self._up(v, rnd)

    def on_message(self, v, kind, src, rnd):
        if kind == "safe":
            self.child_safe[(v, rnd)] += 1
            self._up(v, rnd)
        elif kind == "go":
            self._go(v, rnd)
        else:
            raise SimulationError(f"beta got unexpected {kind}")

    def _up(self, v, rnd):
        key = (v, rnd)
        if key not in self.self_safe or self.child_safe[key] != len(self.children[v]):
            return
        self.self_safe.discard(key)
        self.child_safe.pop(key, None)
        if self.parent[v] < 0:
            self._go(v, rnd)
        else:
            self.net.send(v, self.parent[v], "safe", rnd)

    def _go(self, v, rnd):
        self._down(v, "go", rnd)
        self.net.proceed(v, rnd)


class Gamma(_TreeSync):
    """Cluster trees come from the support forest; clusters talk over inter-cluster F edges."""

    name = "gamma"

    def __init__(self, net, decomp: SparsifiedDecomposition):
        c = decomp.clustering
        g = net.g
        if c.n != g.n:
            raise ValueError("decomposition does not match the graph")
        children: list[list[int]] = [[] for _ in range(g.n)]
        for v, q in enumerate(c.parent):
            if q >= 0:
                children[q].append(v)
        super().__init__(net, list(c.parent), children)
        self.links: list[list[int]] = [[] for _ in range(g.n)]
        for a, b in decomp.inter_cluster_F():
            self.links[a].append(b)
            self.links[b].append(a)
        self.self_safe: set[tuple[int, int]] = set()
        self.child_safe: dict[tuple[int, int], int] = defaultdict(int)
        self.cluster_safe: set[tuple[int, int]] = set()
        self.link_safe: dict[tuple[int, int], int] = defaultdict(int)
        self.ready: set[tuple[int, int]] = set()
        self.child_ready: dict[tuple[int, int], int] = defaultdict(int)

    def on_safe(self, v, rnd):
        self.self_safe.add((v, rnd))
        self._safe_up(v, rnd)

    def on_message(self, v, kind, src, rnd):
        key = (v, rnd)
        if kind == "safe_up":
            self.child_safe[key] += 1
            self._safe_up(v, rnd)
        elif kind == "cluster_safe":
            self._cluster_safe(v, rnd)
        elif kind == "neighbor_safe":
            self.link_safe[key] += 1
            self._check_ready(v, rnd)
        elif kind == "ready_up":
            self.child_ready[key] += 1
            self._ready_up(v, rnd)
        elif kind == "cluster_ready":
            self._cluster_ready(v, rnd)
        else:
            raise SimulationError(f"gamma got unexpected {kind}")

    def _safe_up(self, v, rnd):
        key = (v, rnd)
        if key not in self.self_safe or self.child_safe[key] != len(self.children[v]):
            return
        self.self_safe.discard(key)
        self.child_safe.pop(key, None)
        if self.parent[v] < 0:
            self._cluster_safe(v, rnd)
        else:
            self.net.send(v, self.parent[v], "safe_up", rnd)

    def _cluster_safe(self, v, rnd):
        self._down(v, "cluster_safe", rnd)
        for u in self.links[v]:
            self.net.send(v, u, "neighbor_safe", rnd)
        self.cluster_safe.add((v, rnd))
        self._check_ready(v, rnd)

    def _check_ready(self, v, rnd):
        key = (v, rnd)
        if key in self.cluster_safe and self.link_safe[key] == len(self.links[v]):
            self.cluster_safe.discard(key)
            self.link_safe.pop(key, None)
            self.ready.add(key)
            self._ready_up(v, rnd)

    def _ready_up(self, v, rnd):
        key = (v, rnd)
        if key not in self.ready or self.child_ready[key] != len(self.children[v]):
            return
        self.ready.discard(key)
        self.child_ready.pop(key, None)
        if self.parent[v] < 0:
            self._cluster_ready(v, rnd)
        else:
            self.net.send(v, self.parent[v], "ready_up", rnd)

    def _cluster_ready(self, v, rnd):
        self._down(v, "cluster_ready", rnd)
        self.net.proceed(v, rnd)


def run_async(
    prog: NodeProgram,
    g: Graph,
    sync: str = "alpha",
    schedule: Optional[DelaySchedule] = None,
    gamma_decomp: Optional[SparsifiedDecomposition] = None,
    gamma_k: int = 3,
    seed: int = 0,
    max_events: int = WATCHDOG_EVENTS,
    record: bool = True,
) -> Transcript:
    """Run ``prog`` on an asynchronous network for ``prog.round_bound(g)`` rounds.

    ``schedule`` defaults to seeded uniform delays. For gamma without a supplied
    decomposition one is built by :func:`gamma_init` with ``gamma_k`` and ``seed``;
    its cost is reported under ``Transcript.init``.
    """
    if sync not in SYNCHRONIZERS:
        raise ValueError(f"unknown synchronizer {sync!r}; choose from {SYNCHRONIZERS}")
    if schedule is None:
        schedule = SeededDelays(seed)
    init_summary = None
    if sync == "gamma" and gamma_decomp is None:
        from .gamma import gamma_init

        gamma_decomp, init_counters = gamma_init(g.unweighted(), gamma_k, seed)
        init_summary = init_counters.to_json()
    net = AsyncNetwork(prog, g, schedule, prog.round_bound(g), max_events, record)
    if sync == "alpha":
        net.sync = Alpha(net)
    elif sync == "beta":
        net.sync = Beta(net)
    else:
        net.sync = Gamma(net, gamma_decomp)
    net.run()
    tr = Transcript(prog.name, sync, net.events, net.counters)
    tr.states = [nd.output() for nd in net.nodes]
    tr.init = init_summary
    return tr
