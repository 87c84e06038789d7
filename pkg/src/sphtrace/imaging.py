"""Tone mapping and binary PPM output."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

from .scheduler import AccumulationBuffer


@dataclass(frozen=True)
class ToneMapParams:
    gamma: float = 2.2
    exposure: float = 1.0

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not (self.exposure > 0 and math.isfinite(self.exposure)):
            raise ValueError(f"exposure must be positive, got {self.exposure}")


def tone_map(mean_radiance, params: ToneMapParams = ToneMapParams()) -> tuple[int, int, int]:
    """clamp(exposure*v, 0, 1) ** (1/gamma) scaled to 0..255, rounded half-up."""
    out = []
    for v in mean_radiance:
        x = min(max(params.exposure * float(v), 0.0), 1.0)
        out.append(int(math.floor(255.0 * x ** (1.0 / params.gamma) + 0.5)))
    return tuple(out)


def tone_map_image(image: np.ndarray, params: ToneMapParams = ToneMapParams()) -> np.ndarray:
    """Vectorised :func:`tone_map` over an (..., 3) array; returns uint8."""
    x = np.clip(params.exposure * np.asarray(image, dtype=np.float64), 0.0, 1.0)
    return np.floor(255.0 * x ** (1.0 / params.gamma) + 0.5).astype(np.uint8)


def ppm_bytes(buffer: AccumulationBuffer, params: ToneMapParams = ToneMapParams()) -> bytes:
    pixels = tone_map_image(buffer.mean(), params)
    header = f"P6\n{buffer.width} {buffer.height}\n255\n".encode("ascii")
    return header + pixels.tobytes()


def write_ppm(buffer: AccumulationBuffer, params: ToneMapParams, out: BinaryIO) -> int:
    """Write the tone-mapped mean image as P6 to ``out``; returns bytes written."""
    data = ppm_bytes(buffer, params)
    out.write(data)
    return len(data)


def save_ppm(buffer: AccumulationBuffer, path, params: ToneMapParams = ToneMapParams()) -> int:
    with open(path, "wb") as fh:
        return write_ppm(buffer, params, fh)
