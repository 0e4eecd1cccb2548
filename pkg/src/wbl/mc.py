"""Monte Carlo estimates with deterministic parallel reduction.

Paths are indexed globally; the index range is cut into fixed-size chunks
aligned to multiples of ``CHUNK`` regardless of how many workers process
them.  Each chunk produces streaming moments (count, mean, M2) per output
column, and chunks are merged in global chunk order, so a run is bit
reproducible for a fixed chunk size no matter how the chunks were
distributed across processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

CHUNK = 8192


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with its standard error and sample count."""

    mean: float
    stderr: float
    count: int

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be nonnegative")


@dataclass
class Moments:
    """Streaming first/second moments (Chan's parallel update)."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add_values(self, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return
        self.merge(
            Moments(
                count=values.size,
                mean=float(values.mean()),
                m2=float(((values - values.mean()) ** 2).sum()),
            )
        )

    def merge(self, other: "Moments") -> None:
        if other.count == 0:
            return
        if self.count == 0:
            self.count, self.mean, self.m2 = other.count, other.mean, other.m2
            return
        total = self.count + other.count
        delta = other.mean - self.mean
        self.mean += delta * other.count / total
        self.m2 += other.m2 + delta * delta * self.count * other.count / total
        self.count = total

    def estimate(self) -> McEstimate:
        if self.count == 0:
            return McEstimate(mean=math.nan, stderr=math.inf, count=0)
        if self.count == 1:
            return McEstimate(mean=self.mean, stderr=math.inf, count=1)
        var = self.m2 / (self.count - 1)
        return McEstimate(
            mean=self.mean,
            stderr=math.sqrt(max(var, 0.0) / self.count),
            count=self.count,
        )


def chunk_ranges(total: int) -> list[tuple[int, int]]:
    """Global chunk grid [0, total) in CHUNK-sized pieces."""
    return [(lo, min(lo + CHUNK, total)) for lo in range(0, total, CHUNK)]


def run_chunked(worker, total: int, workers: int = 1) -> list:
    """Apply ``worker(lo, hi)`` to every chunk, in parallel when asked.

    Results come back ordered by chunk, so any downstream merge is
    independent of the worker count.  ``worker`` must be picklable
    (a top-level function, possibly via ``functools.partial``).
    """
    ranges = chunk_ranges(total)
    if workers <= 1 or len(ranges) <= 1:
        return [worker(lo, hi) for lo, hi in ranges]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(worker, lo, hi) for lo, hi in ranges]
        return [f.result() for f in futures]


def paired_z(a: McEstimate, b: McEstimate) -> float:
    """z-score of the difference of two independent MC estimates."""
    se = math.hypot(a.stderr, b.stderr)
    if se == 0.0:
        return 0.0 if a.mean == b.mean else math.inf
    return (b.mean - a.mean) / se


def z_against(reference: float, est: McEstimate) -> float:
    """z-score of an MC estimate against a deterministic reference value."""
    if est.stderr == 0.0:
        return 0.0 if est.mean == reference else math.inf
    return (est.mean - reference) / est.stderr
