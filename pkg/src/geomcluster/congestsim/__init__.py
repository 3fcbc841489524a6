"""Simulated synchronous and asynchronous CONGEST networks."""
from .core import (
    DelaySchedule,
    ExplicitDelays,
    NetworkInfo,
    Node,
    NodeProgram,
    PayloadTooLarge,
    RoundBudgetExceeded,
    ScheduleExhausted,
    SeededDelays,
    SimulationError,
    Transcript,
    UnitDelays,
    WatchdogExceeded,
    run_sync,
)
from .gamma import InitCounters, gamma_init
from .programs import (
    DistributedClustering,
    FloodingBFS,
    GammaInitProgram,
    LeaderElection,
    neighbor_knowledge,
    reassemble,
)
from .synchronizers import SYNCHRONIZERS, run_async


def distributed_cluster_program(p: float, r: int, seed: int = 0) -> DistributedClustering:
    return DistributedClustering(p, r, seed)
