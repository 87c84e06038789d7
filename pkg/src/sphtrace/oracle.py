"""Serial reference renderer for local illumination, plus image metrics.

The reference walks every loop explicitly: pixel, sub-pixel ray, object,
emitter, light sampling point, occluder.  Nothing is random.  Sub-pixel
rays sit at the centres of a fixed stratified grid, and each emitter is
covered by a ``light_grid x light_grid`` lattice of equal-area cells in
(cos theta, phi), so every sample point carries the weight
4*pi*r^2 / light_grid^2 (midpoint quadrature over the emitter surface).

Intersection here uses the plain two-root quadratic formula on purpose.
It shares no shading or sampling code with the progressive tracer it is
used to check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .geometry import EPS_T
from .scheduler import AccumulationBuffer
from .scene import Scene
from .tracer import camera_frame, camera_ray_dir


@dataclass(frozen=True)
class OracleConfig:
    width: int = 64
    height: int = 48
    light_grid: int = 32
    rays_per_pixel: int = 16

    def __post_init__(self):
        for name in ("width", "height", "light_grid", "rays_per_pixel"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class ImageDelta:
    rmse: float
    max_abs: float


def stratified_jitter(n: int) -> np.ndarray:
    """Cell centres of a cols x rows grid filled row-major with ``n`` points."""
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    pts = np.empty((n, 2))
    for i in range(n):
        pts[i, 0] = (i % cols + 0.5) / cols
        pts[i, 1] = (i // cols + 0.5) / rows
    return pts


@njit
def _root_textbook(ox, oy, oz, dx, dy, dz, cx, cy, cz, r):
    # t = (-b -+ sqrt(b^2 - 4ac)) / 2a, nearest root past EPS_T, else -1
    ocx = ox - cx
    ocy = oy - cy
    ocz = oz - cz
    a = dx * dx + dy * dy + dz * dz
    b = 2.0 * (ocx * dx + ocy * dy + ocz * dz)
    c = ocx * ocx + ocy * ocy + ocz * ocz - r * r
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return -1.0
    s = math.sqrt(disc)
    t0 = (-b - s) / (2.0 * a)
    if t0 >= EPS_T:
        return t0
    t1 = (-b + s) / (2.0 * a)
    if t1 >= EPS_T:
        return t1
    return -1.0


@njit
def _oracle_kernel(
    image, width, height, jitter, right, up, forward, eye, tan_half,
    centers, radii, emission, albedo, kinds, light_grid,
):
    n_obj = radii.shape[0]
    n_rays = jitter.shape[0]
    cell_frac = 1.0 / (light_grid * light_grid)
    for py in range(height):
        for px in range(width):
            pr = 0.0
            pg = 0.0
            pb = 0.0
            for j in range(n_rays):
                d = camera_ray_dir(
                    float(px), float(py), jitter[j, 0], jitter[j, 1],
                    float(width), float(height), right, up, forward, tan_half,
                )
                best = math.inf
                hit = -1
                for i in range(n_obj):
                    t = _root_textbook(
                        eye[0], eye[1], eye[2], d[0], d[1], d[2],
                        centers[i, 0], centers[i, 1], centers[i, 2], radii[i],
                    )
                    if t > 0.0 and t < best:
                        best = t
                        hit = i
                if hit < 0:
                    continue
                cr = emission[hit, 0]
                cg = emission[hit, 1]
                cb = emission[hit, 2]
                if kinds[hit] == 0:
                    qx = eye[0] + best * d[0]
                    qy = eye[1] + best * d[1]
                    qz = eye[2] + best * d[2]
                    nx = (qx - centers[hit, 0]) / radii[hit]
                    ny = (qy - centers[hit, 1]) / radii[hit]
                    nz = (qz - centers[hit, 2]) / radii[hit]
                    nlen = math.sqrt(nx * nx + ny * ny + nz * nz)
                    nx /= nlen
                    ny /= nlen
                    nz /= nlen
                    if nx * d[0] + ny * d[1] + nz * d[2] > 0.0:
                        nx = -nx
                        ny = -ny
                        nz = -nz
                    fr_r = albedo[hit, 0] / math.pi
                    fr_g = albedo[hit, 1] / math.pi
                    fr_b = albedo[hit, 2] / math.pi
                    sx = qx + EPS_T * nx
                    sy = qy + EPS_T * ny
                    sz = qz + EPS_T * nz
                    for li in range(n_obj):
                        if emission[li, 0] <= 0.0 and emission[li, 1] <= 0.0 and emission[li, 2] <= 0.0:
                            continue
                        lr = radii[li]
                        weight = 4.0 * math.pi * lr * lr * cell_frac
                        for gi in range(light_grid):
                            cos_t = 1.0 - 2.0 * (gi + 0.5) / light_grid
                            sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))
                            for gj in range(light_grid):
                                phi = 2.0 * math.pi * (gj + 0.5) / light_grid
                                mx = sin_t * math.cos(phi)
                                my = sin_t * math.sin(phi)
                                mz = cos_t
                                lx = centers[li, 0] + lr * mx
                                ly = centers[li, 1] + lr * my
                                lz = centers[li, 2] + lr * mz
                                wx = lx - qx
                                wy = ly - qy
                                wz = lz - qz
                                dist2 = wx * wx + wy * wy + wz * wz
                                dist = math.sqrt(dist2)
                                wx /= dist
                                wy /= dist
                                wz /= dist
                                cos_s = nx * wx + ny * wy + nz * wz
                                cos_l = -(mx * wx + my * wy + mz * wz)
                                if cos_s <= 0.0 or cos_l <= 0.0:
                                    continue
                                # shadow ray toward this sampling point
                                rx = lx - sx
                                ry = ly - sy
                                rz = lz - sz
                                rlen = math.sqrt(rx * rx + ry * ry + rz * rz)
                                rx /= rlen
                                ry /= rlen
                                rz /= rlen
                                blocked = False
                                for k in range(n_obj):
                                    if k == li:
                                        continue
                                    t = _root_textbook(
                                        sx, sy, sz, rx, ry, rz,
                                        centers[k, 0], centers[k, 1], centers[k, 2], radii[k],
                                    )
                                    if t > 0.0 and t < rlen - EPS_T:
                                        blocked = True
                                        break
                                if blocked:
                                    continue
                                g = cos_s * cos_l / dist2 * weight
                                cr += fr_r * emission[li, 0] * g
                                cg += fr_g * emission[li, 1] * g
                                cb += fr_b * emission[li, 2] * g
                pr += cr
                pg += cg
                pb += cb
            image[py, px, 0] = pr / n_rays
            image[py, px, 1] = pg / n_rays
            image[py, px, 2] = pb / n_rays


def oracle_render_local(scene: Scene, cfg: OracleConfig) -> AccumulationBuffer:
    """Deterministic local-illumination image, wrapped as a one-pass buffer."""
    eye, right, up, forward, tan_half = camera_frame(scene.camera)
    centers, radii, emission, albedo, kinds, _, _ = scene.packed
    image = np.zeros((cfg.height, cfg.width, 3))
    _oracle_kernel(
        image, cfg.width, cfg.height, stratified_jitter(cfg.rays_per_pixel),
        right, up, forward, eye, tan_half,
        centers, radii, emission, albedo, kinds, cfg.light_grid,
    )
    return AccumulationBuffer.from_image(image)


def _as_image(x) -> np.ndarray:
    if isinstance(x, AccumulationBuffer):
        return x.mean()
    return np.asarray(x, dtype=np.float64)


def image_delta(a, b) -> ImageDelta:
    """RMSE and max absolute difference over all pixels and channels."""
    ia, ib = _as_image(a), _as_image(b)
    if ia.shape != ib.shape:
        raise ValueError(f"image shapes differ: {ia.shape} vs {ib.shape}")
    diff = ia - ib
    if diff.size == 0:
        return ImageDelta(0.0, 0.0)
    return ImageDelta(float(np.sqrt(np.mean(diff * diff))), float(np.max(np.abs(diff))))
