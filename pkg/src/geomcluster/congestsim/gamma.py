"""Initialization of synchronizer gamma: build the decomposition inside the network."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..clustering import Clustering
from ..graph import Graph
from ..spanner import SparsifiedDecomposition
from .core import DelaySchedule, NetworkInfo, SeededDelays, Transcript
from .programs import GammaInitProgram, reassemble
from .synchronizers import run_async


@dataclass
class InitCounters:
    k: int
    m: int
    rounds: int
    sim_time: float
    alg_msgs: int
    ack_msgs: int
    sync_msgs: int

    @property
    def messages(self) -> int:
        return self.alg_msgs + self.ack_msgs + self.sync_msgs

    @property
    def message_constant(self) -> Optional[float]:
        """``messages / (k * m)``, the constant hidden in the O(km) bound."""
        return self.messages / (self.k * self.m) if self.m else None

    @property
    def time_constant(self) -> float:
        return self.sim_time / self.k

    def to_json(self) -> dict:
        return {
            "k": self.k, "m": self.m, "rounds": self.rounds, "sim_time": self.sim_time,
            "alg_msgs": self.alg_msgs, "ack_msgs": self.ack_msgs, "sync_msgs": self.sync_msgs,
            "messages": self.messages, "message_constant": self.message_constant,
            "time_constant": self.time_constant,
        }


def decomposition_from_states(tr: Transcript, prog: GammaInitProgram, g: Graph) -> SparsifiedDecomposition:
    """Collect clusters, support forest and the announced F edges from the node states."""
    mode = prog.mode(NetworkInfo(g.n, g.w_max))
    c: Clustering = reassemble(tr.states, prog.r, p=prog.p, seed=prog.seed, mode=mode)
    F = frozenset((min(v, u), max(v, u)) for v, s in enumerate(tr.states) for u in s[4])
    H = frozenset(F | set(c.forest_edges()))
    return SparsifiedDecomposition(c, F, prog.k, H)


def gamma_init(
    g: Graph, k: int, seed: int = 0, schedule: Optional[DelaySchedule] = None
) -> tuple[SparsifiedDecomposition, InitCounters]:
    """Run the distributed clustering and F-edge announcement under synchronizer alpha.

    The support forest falls out of the clustering (every node knows its parent),
    so the tree-building step costs nothing extra.
    """
    if not g.is_unweighted:
        raise ValueError("gamma_init requires an unweighted graph")
    prog = GammaInitProgram(g.n, k, seed)
    tr = run_async(prog, g, "alpha", schedule or SeededDelays(seed), record=False)
    decomp = decomposition_from_states(tr, prog, g)
    ct = tr.counters
    counters = InitCounters(k, g.m, ct.rounds, ct.sim_time, ct.alg_msgs, ct.ack_msgs, ct.sync_msgs)
    return decomp, counters



