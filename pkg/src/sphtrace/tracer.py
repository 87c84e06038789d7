"""Per-ray radiance estimation.

The global tracer is written as a bounded loop rather than recursion: each
iteration handles one surface interaction, carrying the path throughput
forward, with direct light sampling (one point per emitter) at every
diffuse vertex.  All randomness comes from a counter-based stream keyed by
(seed, pixel, pass), so a trace is a pure function of its inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from ._jit import MASK64, njit, u64
from .geometry import (
    EPS_T,
    Ray,
    Vec3,
    nearest_hit,
    reflect_dir,
    refract_dir,
    shading_frame,
    vnormalize,
)
from .radiometry import (
    DIFFUSE,
    SPECULAR,
    Spectrum,
    brdf_value,
    cosine_hemisphere,
    light_sample_contribution,
    sample_sphere_surface,
)
from .scene import Camera, Scene, build_camera_basis

DEFAULT_DEPTH = 6

_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0


class Mode(enum.IntEnum):
    LOCAL = 0
    GLOBAL = 1


@dataclass(frozen=True)
class TraceConfig:
    mode: Mode = Mode.GLOBAL
    max_depth: int = DEFAULT_DEPTH
    pass_index: int = 0
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", Mode[self.mode.upper()])
        else:
            object.__setattr__(self, "mode", Mode(self.mode))
        if int(self.max_depth) < 0:
            raise ValueError("max_depth must be >= 0")
        if int(self.pass_index) < 0:
            raise ValueError("pass_index must be >= 0")


# ---------------------------------------------------------------------------
# counter-based random numbers


@njit
def mix64(value):
    # splitmix64 finalizer; coerce first since numba boxes uint64 results as int
    x = u64(value)
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


@njit
def stream_key(seed, pixel, pass_index):
    h = mix64((u64(seed) + _GOLDEN) & MASK64)
    h = mix64(h ^ u64(pixel))
    return mix64(h ^ u64(pass_index))


@njit
def uniform(key, counter):
    """Uniform double in [0, 1) for position ``counter`` of stream ``key``."""
    h = mix64((u64(key) + u64(counter + 1) * _GOLDEN) & MASK64)
    return (h >> 11) * _INV_2_53


@dataclass(frozen=True)
class RngStream:
    seed: int
    pixel_index: int
    pass_index: int
    counter: int = 0

    @property
    def key(self):
        return u64(stream_key(self.seed, self.pixel_index, self.pass_index))


def next_random(rng: RngStream) -> tuple[float, RngStream]:
    value = float(uniform(rng.key, rng.counter))
    return value, replace(rng, counter=rng.counter + 1)


# ---------------------------------------------------------------------------
# kernels


@njit
def camera_ray_dir(px, py, u1, u2, width, height, right, up, forward, tan_half):
    """Pinhole direction through ((px+u1)/w, (py+u2)/h); row 0 is the top."""
    sx = (2.0 * (px + u1) / width - 1.0) * tan_half * (width / height)
    sy = (1.0 - 2.0 * (py + u2) / height) * tan_half
    return vnormalize(
        (
            forward[0] + sx * right[0] + sy * up[0],
            forward[1] + sx * right[1] + sy * up[1],
            forward[2] + sx * right[2] + sy * up[2],
        )
    )


@njit
def direct_at(p, n, fr, centers, radii, emission, emitters, key, counter):
    """Sum over emitters of one fresh light sample each; returns (spectrum, counter)."""
    r = 0.0
    g = 0.0
    b = 0.0
    for k in range(emitters.shape[0]):
        li = emitters[k]
        u1 = uniform(key, counter)
        u2 = uniform(key, counter + 1)
        counter += 2
        c = (centers[li, 0], centers[li, 1], centers[li, 2])
        lp, ln, pdf = sample_sphere_surface(c, radii[li], u1, u2)
        le = (emission[li, 0], emission[li, 1], emission[li, 2])
        contrib = light_sample_contribution(p, n, fr, li, lp, ln, pdf, le, centers, radii)
        r += contrib[0]
        g += contrib[1]
        b += contrib[2]
    return (r, g, b), counter


@njit
def trace_local_kernel(o, d, centers, radii, emission, albedo, kinds, emitters, key, counter):
    t, idx = nearest_hit(o, d, centers, radii)
    if idx < 0:
        return (0.0, 0.0, 0.0), counter
    le = (emission[idx, 0], emission[idx, 1], emission[idx, 2])
    if kinds[idx] != DIFFUSE:
        return le, counter
    c = (centers[idx, 0], centers[idx, 1], centers[idx, 2])
    p, n, front = shading_frame(o, d, t, c)
    fr = brdf_value(DIFFUSE, (albedo[idx, 0], albedo[idx, 1], albedo[idx, 2]))
    ld, counter = direct_at(p, n, fr, centers, radii, emission, emitters, key, counter)
    return (le[0] + ld[0], le[1] + ld[1], le[2] + ld[2]), counter


@njit
def schlick(cos_theta, n1, n2):
    r0 = (n1 - n2) / (n1 + n2)
    r0 = r0 * r0
    m = 1.0 - cos_theta
    return r0 + (1.0 - r0) * m * m * m * m * m


@njit
def trace_global_kernel(
    o, d, centers, radii, emission, albedo, kinds, iors, emitters, max_depth, key, counter
):
    acc_r = 0.0
    acc_g = 0.0
    acc_b = 0.0
    tp_r = 1.0
    tp_g = 1.0
    tp_b = 1.0
    prev_diffuse = False
    for bounce in range(max_depth + 1):
        t, idx = nearest_hit(o, d, centers, radii)
        if idx < 0:
            break
        # emitters reached through a diffuse bounce were already counted by light sampling
        if bounce == 0 or not prev_diffuse:
            acc_r += tp_r * emission[idx, 0]
            acc_g += tp_g * emission[idx, 1]
            acc_b += tp_b * emission[idx, 2]
        c = (centers[idx, 0], centers[idx, 1], centers[idx, 2])
        p, n, front = shading_frame(o, d, t, c)
        alb = (albedo[idx, 0], albedo[idx, 1], albedo[idx, 2])
        kind = kinds[idx]
        if kind == DIFFUSE:
            fr = brdf_value(DIFFUSE, alb)
            ld, counter = direct_at(p, n, fr, centers, radii, emission, emitters, key, counter)
            acc_r += tp_r * ld[0]
            acc_g += tp_g * ld[1]
            acc_b += tp_b * ld[2]
            u1 = uniform(key, counter)
            u2 = uniform(key, counter + 1)
            counter += 2
            d = cosine_hemisphere(n, u1, u2)
            o = (p[0] + EPS_T * n[0], p[1] + EPS_T * n[1], p[2] + EPS_T * n[2])
            prev_diffuse = True
        elif kind == SPECULAR:
            d = reflect_dir(d, n)
            o = (p[0] + EPS_T * n[0], p[1] + EPS_T * n[1], p[2] + EPS_T * n[2])
            prev_diffuse = False
        else:
            ior = iors[idx]
            n1 = 1.0
            n2 = ior
            if not front:
                n1 = ior
                n2 = 1.0
            ok, td = refract_dir(d, n, n1 / n2)
            u = uniform(key, counter)
            counter += 1
            take_reflect = True
            if ok:
                cos_i = -(d[0] * n[0] + d[1] * n[1] + d[2] * n[2])
                # Schlick uses the angle on the optically thinner side
                cos_x = cos_i if n1 <= n2 else -(td[0] * n[0] + td[1] * n[1] + td[2] * n[2])
                take_reflect = u < schlick(cos_x, n1, n2)
            if take_reflect:
                d = reflect_dir(d, n)
                o = (p[0] + EPS_T * n[0], p[1] + EPS_T * n[1], p[2] + EPS_T * n[2])
            else:
                d = td
                o = (p[0] - EPS_T * n[0], p[1] - EPS_T * n[1], p[2] - EPS_T * n[2])
            prev_diffuse = False
        tp_r *= alb[0]
        tp_g *= alb[1]
        tp_b *= alb[2]
    return (acc_r, acc_g, acc_b), counter


# ---------------------------------------------------------------------------
# public wrappers


def camera_frame(camera: Camera) -> tuple:
    """``(eye, right, up, forward, tan_half_vfov)`` as plain tuples for kernels."""
    right, up, forward = build_camera_basis(camera)
    tan_half = math.tan(math.radians(camera.vfov_degrees) * 0.5)
    return tuple(camera.eye), tuple(right), tuple(up), tuple(forward), tan_half


def generate_camera_ray(px: int, py: int, jitter, width: int, height: int, camera: Camera) -> Ray:
    if not (0 <= px < width and 0 <= py < height):
        raise ValueError(f"pixel ({px}, {py}) outside {width}x{height} image")
    eye, right, up, forward, tan_half = camera_frame(camera)
    d = camera_ray_dir(
        float(px), float(py), float(jitter[0]), float(jitter[1]),
        float(width), float(height), right, up, forward, tan_half,
    )
    return Ray(Vec3(*eye), Vec3(*d))


def trace_local(ray: Ray, scene: Scene, rng: RngStream) -> Spectrum:
    centers, radii, emission, albedo, kinds, iors, emitters = scene.packed
    out, _ = trace_local_kernel(
        tuple(ray.origin), tuple(ray.direction),
        centers, radii, emission, albedo, kinds, emitters, rng.key, rng.counter,
    )
    return Spectrum(*out)


def trace_global_iterative(ray: Ray, scene: Scene, cfg: TraceConfig, rng: RngStream) -> Spectrum:
    centers, radii, emission, albedo, kinds, iors, emitters = scene.packed
    out, _ = trace_global_kernel(
        tuple(ray.origin), tuple(ray.direction),
        centers, radii, emission, albedo, kinds, iors, emitters,
        int(cfg.max_depth), rng.key, rng.counter,
    )
    return Spectrum(*out)


def trace(ray: Ray, scene: Scene, cfg: TraceConfig, rng: RngStream) -> Spectrum:
    if cfg.mode == Mode.LOCAL:
        return trace_local(ray, scene, rng)
    return trace_global_iterative(ray, scene, cfg, rng)
