"""Serial-vs-parallel render benchmark.

Timing claims are only reported for buffers that are bit-identical across
every worker count; a mismatch raises :class:`DeterminismError`.
"""

from __future__ import annotations

import csv
import hashlib
import io
import statistics
import time
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ._jit import BACKEND
from .scene import Scene
from .scheduler import AccumulationBuffer, RenderConfig, render

CSV_COLUMNS = ("workers", "seconds", "rays_per_sec", "speedup", "buffers_identical")


class DeterminismError(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchRow:
    workers: int
    seconds: float
    rays_per_sec: float
    speedup: float
    buffers_identical: bool


@dataclass
class BenchReport:
    width: int
    height: int
    passes: int
    mode: str
    max_depth: int
    rows: list[BenchRow]
    backend: str = BACKEND

    def to_text(self) -> str:
        lines = [
            f"{self.width}x{self.height}, {self.passes} passes, mode={self.mode}, "
            f"depth={self.max_depth}, backend={self.backend}",
            f"{'workers':>8} {'seconds':>10} {'rays/s':>14} {'speedup':>8} {'identical':>10}",
        ]
        for r in self.rows:
            lines.append(
                f"{r.workers:>8d} {r.seconds:>10.4f} {r.rays_per_sec:>14.1f} "
                f"{r.speedup:>8.2f} {str(r.buffers_identical):>10}"
            )
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.workers, f"{r.seconds:.6f}", f"{r.rays_per_sec:.3f}",
                        f"{r.speedup:.4f}", r.buffers_identical])
        return out.getvalue()


def buffers_equal(a: AccumulationBuffer, b: AccumulationBuffer) -> bool:
    return (
        a.passes_completed == b.passes_completed
        and a.sums.shape == b.sums.shape
        and a.sums.tobytes() == b.sums.tobytes()
    )


def run_benchmark(
    scene: Scene,
    cfg: RenderConfig,
    worker_counts: Sequence[int],
    repeats: int = 3,
    warmup: bool = True,
) -> BenchReport:
    """Time ``cfg`` at each worker count (median of ``repeats`` after a warmup).

    Speedup is relative to the ``workers=1`` row when present, otherwise to
    the first row.
    """
    if not worker_counts:
        raise ValueError("worker_counts is empty")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    rays = cfg.width * cfg.height * cfg.passes
    reference = None
    timings = []
    for workers in worker_counts:
        run_cfg = replace(cfg, workers=int(workers))
        if warmup:
            render(scene, run_cfg)
        samples = []
        buf = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            buf = render(scene, run_cfg)
            samples.append(time.perf_counter() - t0)
        if reference is None:
            reference = buf
        elif not buffers_equal(reference, buf):
            raise DeterminismError(
                f"workers={workers} produced a different buffer than workers={worker_counts[0]}"
            )
        timings.append((int(workers), statistics.median(samples)))

    base = next((s for w, s in timings if w == 1), timings[0][1])
    rows = [
        BenchRow(w, s, rays / s if s > 0 else float("inf"), base / s if s > 0 else float("inf"), True)
        for w, s in timings
    ]
    return BenchReport(cfg.width, cfg.height, cfg.passes, cfg.trace.mode.name.lower(),
                       cfg.trace.max_depth, rows)


def buffer_checksum(buffer: AccumulationBuffer) -> str:
    return hashlib.sha256(np.ascontiguousarray(buffer.sums).tobytes()).hexdigest()
