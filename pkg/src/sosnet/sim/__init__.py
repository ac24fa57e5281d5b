from .engine import EventKind, RunResult, Simulation, run
from .forwarding import Decision, DropReason, Strategy, forward_decision
from .metrics import CSV_HEADER, MetricsRow

__all__ = ["EventKind", "RunResult", "Simulation", "run", "Decision", "DropReason",
           "Strategy", "forward_decision", "CSV_HEADER", "MetricsRow"]
