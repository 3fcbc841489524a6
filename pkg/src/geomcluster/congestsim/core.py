"""Node programs, delay schedules, transcripts and the lock-step executor."""
from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

import numpy as np

from ..distribution import uniform01
from ..graph import Graph

Payload = tuple[int, ...]
Outbox = Mapping[int, Payload]

WATCHDOG_EVENTS = 10**8


class SimulationError(RuntimeError):
    pass


class RoundBudgetExceeded(SimulationError):
    pass


class ScheduleExhausted(SimulationError):
    pass


class WatchdogExceeded(SimulationError):
    pass


class PayloadTooLarge(SimulationError):
    pass


@dataclass(frozen=True)
class NetworkInfo:
    """Global knowledge every node starts with."""

    n: int
    w_max: int


class Node:
    """State machine of one vertex.

    ``init`` returns the round-1 messages. Messages of round ``t`` arrive through
    ``on_receive``; ``end_round(t)`` then consumes them and returns the messages
    for round ``t + 1``. A node stops being stepped once ``halted`` is set.
    """

    def __init__(self, v: int, nbrs: Mapping[int, int], info: NetworkInfo):
        self.v = v
        self.nbrs = dict(nbrs)
        self.info = info
        self.halted = False
        self._inbox: dict[int, dict[int, Payload]] = {}

    def init(self) -> Outbox:
        return {}

    def on_receive(self, rnd: int, sender: int, payload: Payload) -> None:
        self._inbox.setdefault(rnd, {})[sender] = payload

    def end_round(self, rnd: int) -> Outbox:
        inbox = self._inbox.pop(rnd, {})
        return self.step(rnd, dict(sorted(inbox.items())))

    def step(self, rnd: int, inbox: dict[int, Payload]) -> Outbox:
        raise NotImplementedError

    def broadcast(self, payload: Payload) -> dict[int, Payload]:
        return {u: payload for u in self.nbrs}

    def output(self) -> Any:
        raise NotImplementedError


class NodeProgram:
    """Factory for the per-vertex state machines of one distributed algorithm."""

    name = "program"

    def make_node(self, v: int, nbrs: Mapping[int, int], info: NetworkInfo) -> Node:
        raise NotImplementedError

    def round_bound(self, g: Graph) -> int:
        """Round by which every node has halted; synchronizers pulse this many rounds."""
        raise NotImplementedError

    def bit_budget(self, g: Graph) -> int:
        return 2 * field_bits(g.n + 2)

    def build(self, g: Graph) -> list[Node]:
        info = NetworkInfo(g.n, g.w_max)
        return [self.make_node(v, dict(g.adj[v]), info) for v in range(g.n)]


def field_bits(bound: int) -> int:
    """Bits for an integer field holding values ``0..bound-1``."""
    return max(1, math.ceil(math.log2(max(bound, 2))))


def payload_bits(payload: Payload) -> int:
    total = 0
    for x in payload:
        if x < 0:
            raise PayloadTooLarge(f"negative field {x} in payload {payload}")
        total += max(1, int(x).bit_length())
    return total


def digest(*parts: Any) -> int:
    return zlib.crc32(repr(parts).encode()) & 0xFFFFFFFF


# delay schedules


class DelaySchedule:
    """Delay in (0, 1] for the ``i``-th message sent during a simulation."""

    def delay(self, i: int) -> float:
        raise NotImplementedError


class SeededDelays(DelaySchedule):
    """Uniform delays derived from ``(seed, i)``; values are ``1 - u`` so 0 never occurs."""

    _BLOCK = 4096

    def __init__(self, seed: int):
        self.seed = seed
        self._blocks: dict[int, np.ndarray] = {}

    def delay(self, i: int) -> float:
        b, off = divmod(i, self._BLOCK)
        block = self._blocks.get(b)
        if block is None:
            idx = np.arange(b * self._BLOCK, (b + 1) * self._BLOCK, dtype=np.uint64)
            block = 1.0 - uniform01(self.seed ^ 0x5C4EDD1E, idx)
            self._blocks[b] = block
        return float(block[off])


class UnitDelays(DelaySchedule):
    def delay(self, i: int) -> float:
        return 1.0


class ExplicitDelays(DelaySchedule):
    """Delays listed per message index, e.g. loaded from a schedule file."""

    def __init__(self, delays: Mapping[int, float]):
        for i, d in delays.items():
            if not (0 < d <= 1) or not math.isfinite(d):
                raise ValueError(f"delay for message {i} must lie in (0, 1], got {d}")
        self.delays = dict(delays)

    def delay(self, i: int) -> float:
        try:
            return self.delays[i]
        except KeyError:
            raise ScheduleExhausted(f"schedule has no delay for message {i}") from None

    @classmethod
    def from_text(cls, text: str) -> "ExplicitDelays":
        delays: dict[int, float] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 2:
                raise ValueError(f"schedule line {lineno}: expected 'msg_index delay'")
            idx, d = int(parts[0]), float(parts[1])
            if idx in delays:
                raise ValueError(f"schedule line {lineno}: duplicate index {idx}")
            delays[idx] = d
        return cls(delays)

    def to_text(self) -> str:
        return "".join(f"{i} {d!r}\n" for i, d in sorted(self.delays.items()))

    @classmethod
    def record(cls, schedule: DelaySchedule, count: int) -> "ExplicitDelays":
        return cls({i: schedule.delay(i) for i in range(count)})


# transcripts


ALG = "alg"
ACK = "ack"


@dataclass(frozen=True)
class Event:
    time: float
    node: int
    kind: str
    sender: int
    rnd: int
    digest: int


@dataclass
class Counters:
    alg_msgs: int = 0
    ack_msgs: int = 0
    sync_msgs: int = 0
    sim_time: float = 0.0
    rounds: int = 0

    def to_json(self) -> dict:
        return {
            "alg_msgs": self.alg_msgs,
            "ack_msgs": self.ack_msgs,
            "sync_msgs": self.sync_msgs,
            "sim_time": self.sim_time,
            "rounds": self.rounds,
        }


@dataclass
class Transcript:
    program: str
    synchronizer: str
    events: list[Event] = field(default_factory=list)
    counters: Counters = field(default_factory=Counters)
    states: list[Any] = field(default_factory=list)
    init: Optional[dict] = None

    def derived_counters(self) -> Counters:
        """Recount the message totals from the event log."""
        c = Counters(rounds=self.counters.rounds)
        for e in self.events:
            if e.kind == ALG:
                c.alg_msgs += 1
            elif e.kind == ACK:
                c.ack_msgs += 1
            else:
                c.sync_msgs += 1
        c.sim_time = max((e.time for e in self.events), default=0.0)
        return c

    def summary(self) -> dict:
        out = {"program": self.program, "synchronizer": self.synchronizer, **self.counters.to_json()}
        if self.init is not None:
            out["init"] = self.init
        return out

    def jsonl(self) -> str:
        return "".join(
            json.dumps({"time": e.time, "node": e.node, "kind": e.kind, "from": e.sender,
                        "round": e.rnd, "digest": e.digest}) + "\n"
            for e in self.events
        )


def _check_outbox(node: Node, out: Outbox, budget: int) -> None:
    for dest, payload in out.items():
        if dest not in node.nbrs:
            raise SimulationError(f"node {node.v} addressed non-neighbor {dest}")
        if payload_bits(payload) > budget:
            raise PayloadTooLarge(
                f"node {node.v}: payload {payload} needs {payload_bits(payload)} bits > {budget}"
            )


def run_sync(
    prog: NodeProgram, g: Graph, max_rounds: Optional[int] = None, record: bool = True
) -> Transcript:
    """Lock-step reference execution.

    All messages of round ``t`` are delivered before any node runs ``end_round(t)``.
    Stops once every node has halted and no message is in flight.
    """
    nodes = prog.build(g)
    budget = prog.bit_budget(g)
    if max_rounds is None:
        max_rounds = prog.round_bound(g)
    tr = Transcript(prog.name, "sync")
    outgoing: dict[int, Outbox] = {}
    for node in nodes:
        out = node.init()
        _check_outbox(node, out, budget)
        outgoing[node.v] = out
    rnd = 0
    while any(outgoing.values()) or not all(nd.halted for nd in nodes):
        rnd += 1
        if rnd > max_rounds:
            raise RoundBudgetExceeded(f"{prog.name} still running after {max_rounds} rounds")
        for v in sorted(outgoing):
            for dest, payload in sorted(outgoing[v].items()):
                nodes[dest].on_receive(rnd, v, payload)
                tr.counters.alg_msgs += 1
                if record:
                    tr.events.append(Event(float(rnd), dest, ALG, v, rnd, digest(v, rnd, payload)))
        outgoing = {}
        for node in nodes:
            if node.halted:
                continue
            out = node.end_round(rnd)
            _check_outbox(node, out, budget)
            outgoing[node.v] = out
    tr.counters.rounds = rnd
    tr.counters.sim_time = float(rnd)
    tr.states = [nd.output() for nd in nodes]
    return tr

