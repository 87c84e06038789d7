"""BRDFs, emitter sampling and the one-sample-per-light direct lighting estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Sequence

from ._jit import njit
from .geometry import EPS_T, Vec3, ray_sphere_t, vdot, vnormalize, vsub, _vec

if TYPE_CHECKING:
    from .scene import Material, Scene

DIFFUSE = 0
SPECULAR = 1
REFRACTIVE = 2

INV_PI = 1.0 / math.pi


class Spectrum(NamedTuple):
    r: float
    g: float
    b: float


BLACK = Spectrum(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class LightSample:
    point: Vec3
    pdf_area: float
    emitted: Spectrum
    normal_at_sample: Vec3


# ---------------------------------------------------------------------------
# kernels


@njit
def brdf_value(kind, albedo):
    # delta lobes carry no finite density
    if kind != DIFFUSE:
        return (0.0, 0.0, 0.0)
    return (albedo[0] * INV_PI, albedo[1] * INV_PI, albedo[2] * INV_PI)


@njit
def sample_sphere_surface(center, radius, u1, u2):
    """Uniform point on a sphere: returns ``(point, unit normal, pdf per area)``."""
    cos_t = 1.0 - 2.0 * u1
    sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))
    phi = 2.0 * math.pi * u2
    n = (sin_t * math.cos(phi), sin_t * math.sin(phi), cos_t)
    p = (center[0] + radius * n[0], center[1] + radius * n[1], center[2] + radius * n[2])
    return p, n, 1.0 / (4.0 * math.pi * radius * radius)


@njit
def segment_blocked(origin, target, skip, centers, radii):
    """True if any sphere other than ``skip`` crosses the open segment origin->target."""
    w = vsub(target, origin)
    dist = math.sqrt(vdot(w, w))
    d = (w[0] / dist, w[1] / dist, w[2] / dist)
    limit = dist - EPS_T
    for i in range(radii.shape[0]):
        if i == skip:
            continue
        c = (centers[i, 0], centers[i, 1], centers[i, 2])
        t = ray_sphere_t(origin, d, c, radii[i])
        if t > 0.0 and t < limit:
            return True
    return False


@njit
def light_sample_contribution(p, n, fr, light, lp, ln, pdf, le, centers, radii):
    """One emitter's share of the direct-lighting estimate at ``p``."""
    w = vsub(lp, p)
    dist2 = vdot(w, w)
    if dist2 <= 0.0:
        return (0.0, 0.0, 0.0)
    inv = 1.0 / math.sqrt(dist2)
    wi = (w[0] * inv, w[1] * inv, w[2] * inv)
    cos_s = vdot(n, wi)
    cos_l = -vdot(wi, ln)
    if cos_s <= 0.0 or cos_l <= 0.0:
        return (0.0, 0.0, 0.0)
    origin = (p[0] + EPS_T * n[0], p[1] + EPS_T * n[1], p[2] + EPS_T * n[2])
    if segment_blocked(origin, lp, light, centers, radii):
        return (0.0, 0.0, 0.0)
    g = cos_s * cos_l / (dist2 * pdf)
    return (
        fr[0] * le[0] * g,
        fr[1] * le[1] * g,
        fr[2] * le[2] * g,
    )


@njit
def onb_from_normal(n):
    """Branchless orthonormal basis (t1, t2) completing ``n``."""
    sign = math.copysign(1.0, n[2])
    a = -1.0 / (sign + n[2])
    b = n[0] * n[1] * a
    t1 = (1.0 + sign * n[0] * n[0] * a, sign * b, -sign * n[0])
    t2 = (b, sign + n[1] * n[1] * a, -n[1])
    return t1, t2


@njit
def cosine_hemisphere(n, u1, u2):
    """Direction about ``n`` with pdf cos(theta)/pi (polar mapping r = sqrt(u1))."""
    r = math.sqrt(u1)
    phi = 2.0 * math.pi * u2
    x = r * math.cos(phi)
    y = r * math.sin(phi)
    z = math.sqrt(max(0.0, 1.0 - u1))
    t1, t2 = onb_from_normal(n)
    return vnormalize(
        (
            x * t1[0] + y * t2[0] + z * n[0],
            x * t1[1] + y * t2[1] + z * n[1],
            x * t1[2] + y * t2[2] + z * n[2],
        )
    )


# ---------------------------------------------------------------------------
# public surface


def brdf_eval(material: Material, w_i, w_o, n) -> Spectrum:
    """Lambertian albedo/pi for diffuse materials, zero for delta materials.

    The directions are accepted for interface completeness; the Lambertian
    lobe does not depend on them.
    """
    return Spectrum(*brdf_value(int(material.kind), _vec(material.albedo)))


def sample_light_point(light, u1: float, u2: float) -> LightSample:
    p, n, pdf = sample_sphere_surface(_vec(light.center), light.radius, float(u1), float(u2))
    return LightSample(Vec3(*p), pdf, Spectrum(*light.material.emission), Vec3(*n))


def direct_radiance(
    p, n, material: Material, w_o, scene: Scene, samples: Sequence[LightSample]
) -> Spectrum:
    """Direct lighting at ``p`` from one sample per emitter.

    ``samples[k]`` must lie on ``scene.spheres[scene.emitter_indices[k]]``.
    """
    if len(samples) != len(scene.emitter_indices):
        raise ValueError("need exactly one light sample per emitter")
    kind = int(material.kind)
    if kind != DIFFUSE:
        return BLACK
    fr = brdf_value(kind, _vec(material.albedo))
    centers, radii = scene.packed[0], scene.packed[1]
    p, n = _vec(p), _vec(n)
    total = [0.0, 0.0, 0.0]
    for light, s in zip(scene.emitter_indices, samples):
        c = light_sample_contribution(
            p, n, fr, int(light), _vec(s.point), _vec(s.normal_at_sample), float(s.pdf_area),
            _vec(s.emitted), centers, radii,
        )
        for k in range(3):
            total[k] += c[k]
    return Spectrum(*total)


def cosine_weighted_direction(n, u1: float, u2: float) -> Vec3:
    return Vec3(*cosine_hemisphere(_vec(n), float(u1), float(u2)))
