"""Pass engine: one camera path per pixel per pass, tiled over a thread pool.

Each tile is handed to a ``nogil`` kernel, so worker threads run truly in
parallel under the JIT backend.  Tiles never share pixels and every pixel
draws from its own (seed, pixel, pass) random stream, which makes the
accumulated buffer independent of worker count, tile size and completion
order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._jit import njit
from .scene import Scene
from .tracer import (
    Mode,
    TraceConfig,
    camera_frame,
    camera_ray_dir,
    stream_key,
    trace_global_kernel,
    trace_local_kernel,
    uniform,
)

DEFAULT_TILE = 32


@dataclass
class AccumulationBuffer:
    width: int
    height: int
    sums: np.ndarray = None
    passes_completed: int = 0
    # kernel invocations since creation; instrumentation only
    traces: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("buffer dimensions must be positive")
        if self.sums is None:
            self.sums = np.zeros((self.height * self.width, 3), dtype=np.float64)
        elif self.sums.shape != (self.height * self.width, 3):
            raise ValueError(f"sums must have shape {(self.height * self.width, 3)}")

    def mean(self) -> np.ndarray:
        """Mean radiance image of shape (height, width, 3)."""
        if self.passes_completed <= 0:
            raise ValueError("no passes accumulated; mean is undefined")
        return (self.sums / self.passes_completed).reshape(self.height, self.width, 3)

    def copy(self) -> AccumulationBuffer:
        return AccumulationBuffer(
            self.width, self.height, self.sums.copy(), self.passes_completed, self.traces
        )

    def readonly_view(self) -> AccumulationBuffer:
        view = self.sums.view()
        view.setflags(write=False)
        return AccumulationBuffer(self.width, self.height, view, self.passes_completed, self.traces)

    def save(self, path) -> None:
        np.savez(
            path, sums=self.sums, width=self.width, height=self.height,
            passes_completed=self.passes_completed,
        )

    @classmethod
    def load(cls, path) -> AccumulationBuffer:
        with np.load(path) as z:
            return cls(int(z["width"]), int(z["height"]), z["sums"].copy(), int(z["passes_completed"]))

    @classmethod
    def from_image(cls, image: np.ndarray) -> AccumulationBuffer:
        """Wrap a finished (height, width, 3) image as a one-pass buffer."""
        h, w, _ = image.shape
        return cls(w, h, np.ascontiguousarray(image, dtype=np.float64).reshape(h * w, 3).copy(), 1)


@dataclass(frozen=True)
class RenderConfig:
    width: int = 640
    height: int = 480
    passes: int = 64
    trace: TraceConfig = field(default_factory=TraceConfig)
    workers: int = 1
    tile_size: int = DEFAULT_TILE

    def __post_init__(self):
        for name in ("width", "height", "passes", "workers", "tile_size"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")


def default_workers() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return max(1, os.cpu_count() or 1)


def partition_tiles(width: int, height: int, tile_size: int) -> list[tuple[int, int, int, int]]:
    """Row-major ``(x0, y0, x1, y1)`` half-open rectangles covering the image."""
    if width < 1 or height < 1 or tile_size < 1:
        raise ValueError("width, height and tile_size must be positive")
    return [
        (x0, y0, min(x0 + tile_size, width), min(y0 + tile_size, height))
        for y0 in range(0, height, tile_size)
        for x0 in range(0, width, tile_size)
    ]


@njit
def render_tile(
    sums, x0, y0, x1, y1, width, height,
    right, up, forward, eye, tan_half,
    centers, radii, emission, albedo, kinds, iors, emitters,
    mode, max_depth, seed, pass_index,
):
    """Trace one path for every pixel of the tile and add it into ``sums``."""
    fw = float(width)
    fh = float(height)
    count = 0
    for py in range(y0, y1):
        for px in range(x0, x1):
            pix = py * width + px
            key = stream_key(seed, pix, pass_index)
            u1 = uniform(key, 0)
            u2 = uniform(key, 1)
            d = camera_ray_dir(float(px), float(py), u1, u2, fw, fh, right, up, forward, tan_half)
            if mode == 0:
                rad, _ = trace_local_kernel(
                    eye, d, centers, radii, emission, albedo, kinds, emitters, key, 2
                )
            else:
                rad, _ = trace_global_kernel(
                    eye, d, centers, radii, emission, albedo, kinds, iors, emitters,
                    max_depth, key, 2,
                )
            sums[pix, 0] += rad[0]
            sums[pix, 1] += rad[1]
            sums[pix, 2] += rad[2]
            count += 1
    return count


def _check_buffer(buffer: AccumulationBuffer, cfg: RenderConfig) -> None:
    if (buffer.width, buffer.height) != (cfg.width, cfg.height):
        raise ValueError(
            f"buffer is {buffer.width}x{buffer.height}, config wants {cfg.width}x{cfg.height}"
        )


def render_pass(
    scene: Scene,
    cfg: RenderConfig,
    buffer: AccumulationBuffer,
    pass_index: int,
    pool: Optional[ThreadPoolExecutor] = None,
) -> AccumulationBuffer:
    """Add one sample per pixel for ``pass_index`` into ``buffer`` (in place)."""
    _check_buffer(buffer, cfg)
    eye, right, up, forward, tan_half = camera_frame(scene.camera)
    centers, radii, emission, albedo, kinds, iors, emitters = scene.packed
    mode = int(cfg.trace.mode == Mode.GLOBAL)
    sums = buffer.sums
    tiles = partition_tiles(cfg.width, cfg.height, cfg.tile_size)

    def run(tile):
        x0, y0, x1, y1 = tile
        return render_tile(
            sums, x0, y0, x1, y1, cfg.width, cfg.height,
            right, up, forward, eye, tan_half,
            centers, radii, emission, albedo, kinds, iors, emitters,
            mode, int(cfg.trace.max_depth), int(cfg.trace.seed), int(pass_index),
        )

    if cfg.workers == 1:
        counts = [run(t) for t in tiles]
    elif pool is not None:
        counts = list(pool.map(run, tiles))
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as own:
            counts = list(own.map(run, tiles))
    buffer.traces += int(sum(counts))
    buffer.passes_completed += 1
    return buffer


ProgressSink = Callable[[int, AccumulationBuffer], None]


def render(
    scene: Scene,
    cfg: RenderConfig,
    progress_sink: Optional[ProgressSink] = None,
    buffer: Optional[AccumulationBuffer] = None,
) -> AccumulationBuffer:
    """Run ``cfg.passes`` passes, resuming after ``buffer.passes_completed`` if given.

    ``progress_sink(pass_index, view)`` fires at each inter-pass barrier with a
    read-only view of the buffer.
    """
    if buffer is None:
        buffer = AccumulationBuffer(cfg.width, cfg.height)
    _check_buffer(buffer, cfg)
    start = buffer.passes_completed
    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        for pass_index in range(start, start + cfg.passes):
            render_pass(scene, cfg, buffer, pass_index, pool)
            if progress_sink is not None:
                progress_sink(pass_index, buffer.readonly_view())
    finally:
        if pool is not None:
            pool.shutdown()
    return buffer
