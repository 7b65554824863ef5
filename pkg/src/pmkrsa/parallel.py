"""Deterministic data-parallel map over indexed items.

Work is split into static contiguous blocks, each block runs on a thread
pool worker and writes its results into a pre-sized output list, so the
output never depends on scheduling. The compiled kernels release the GIL,
which is what makes threads worthwhile here.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from pmkrsa.errors import InvalidConfig, TaskFailed

THREADS_ENV = "PMKRSA_THREADS"


@dataclass(frozen=True)
class ParallelConfig:
    workers: int = 0
    chunk_grain: int = 1

    def __post_init__(self):
        if self.workers < 0:
            raise InvalidConfig(f"workers must be >= 0, got {self.workers}")
        if self.chunk_grain < 1:
            raise InvalidConfig(f"chunk_grain must be >= 1, got {self.chunk_grain}")

    @classmethod
    def from_env(cls, workers: int | None = None) -> ParallelConfig:
        if workers is None:
            raw = os.environ.get(THREADS_ENV, "0")
            try:
                workers = int(raw)
            except ValueError:
                raise InvalidConfig(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
        return cls(workers=workers)

    def resolved_workers(self) -> int:
        return self.workers or os.cpu_count() or 1


def par_map(items: Sequence, f: Callable, config: ParallelConfig | None = None) -> list:
    """``[f(t, items[t]) for t in range(len(items))]``, computed in parallel.

    If any task raises, every block still runs to completion and then
    :class:`TaskFailed` is raised for the lowest failing index.
    """
    config = config or ParallelConfig.from_env()
    n = len(items)
    out = [None] * n
    workers = min(config.resolved_workers(), n)
    if workers <= 1:
        for t in range(n):
            try:
                out[t] = f(t, items[t])
            except Exception as exc:
                raise TaskFailed(t, exc) from exc
        return out

    # A few blocks per worker so ragged per-item costs still balance.
    size = max(config.chunk_grain, -(-n // (workers * 4)))
    bounds = [(lo, min(lo + size, n)) for lo in range(0, n, size)]
    failures = {}

    def run(lo, hi):
        for t in range(lo, hi):
            try:
                out[t] = f(t, items[t])
            except Exception as exc:
                failures[t] = exc
                return

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for fut in [pool.submit(run, lo, hi) for lo, hi in bounds]:
            fut.result()
    if failures:
        t = min(failures)
        raise TaskFailed(t, failures[t]) from failures[t]
    return out
