"""Budget configuration and progress metering for exhaustive searches."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import BudgetExceeded

DEFAULT_NODE_BUDGET = 10**8
DEFAULT_TIME_BUDGET_S = 60.0
DEFAULT_STATE_CAP = 10**7
SUBSET_SUM_BOUND = 10**6


@dataclass(frozen=True)
class Budget:
    """Resource limits for brute-force searches.

    node_budget counts search-tree edges (attempted extensions); time_budget_s
    is wall clock; state_cap bounds the number of distinct reachable
    subset-sum states a single search may materialize.  threads > 1 fans the
    exhaustive refutation round of a search out to a process pool; each worker
    enforces node_budget locally, so a parallel run can overshoot the global
    node budget by at most a factor of the worker count.
    """

    node_budget: int = DEFAULT_NODE_BUDGET
    time_budget_s: float = DEFAULT_TIME_BUDGET_S
    state_cap: int = DEFAULT_STATE_CAP
    threads: int = 1


class SearchMeter:
    """Mutable node/time counter checked periodically inside search loops."""

    __slots__ = ("budget", "nodes", "started", "_check_mask")

    def __init__(self, budget: Budget):
        self.budget = budget
        self.nodes = 0
        self.started = time.monotonic()
        # Wall-clock checks are amortized: only every 4096th tick looks at the
        # clock, so per-node overhead stays a couple of integer ops.
        self._check_mask = 0xFFF

    def tick(self, count: int = 1) -> None:
        self.nodes += count
        if self.nodes > self.budget.node_budget:
            raise BudgetExceeded(
                f"node budget {self.budget.node_budget} exhausted",
                nodes=self.nodes,
                elapsed_ms=self.elapsed_ms(),
            )
        if (self.nodes & self._check_mask) == 0:
            self.check_time()

    def check_time(self) -> None:
        if time.monotonic() - self.started > self.budget.time_budget_s:
            raise BudgetExceeded(
                f"time budget {self.budget.time_budget_s}s exhausted",
                nodes=self.nodes,
                elapsed_ms=self.elapsed_ms(),
            )

    def elapsed_ms(self) -> int:
        return int((time.monotonic() - self.started) * 1000)
