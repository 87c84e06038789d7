"""Vector algebra, rays, and ray-sphere intersection.

Kernels operate on plain 3-tuples of floats so they compile to register
code under numba and stay cheap in the pure-Python fallback.  The public
wrappers (``intersect_sphere``, ``intersect_scene``, ``reflect``, ...)
accept and return the small value types defined here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Optional

from ._jit import njit

if TYPE_CHECKING:
    from .scene import Material, Scene

# Minimum accepted hit distance; rejects secondary rays re-hitting their own origin.
EPS_T = 1e-4


class Vec3(NamedTuple):
    x: float
    y: float
    z: float


# ---------------------------------------------------------------------------
# tuple kernels


@njit
def vadd(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


@njit
def vsub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


@njit
def vscale(a, s):
    return (a[0] * s, a[1] * s, a[2] * s)


@njit
def vmul(a, b):
    return (a[0] * b[0], a[1] * b[1], a[2] * b[2])


@njit
def vmadd(a, b, s):
    """a + s*b"""
    return (a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2])


@njit
def vdot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


@njit
def vcross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


@njit
def vnormalize(a):
    inv = 1.0 / math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])
    return (a[0] * inv, a[1] * inv, a[2] * inv)


@njit
def quadratic_roots(a, b, c):
    """Real roots of a*t^2 + b*t + c = 0 as ``(count, lo, hi)``.

    Uses q = -(b + sign(b)*sqrt(disc))/2 so neither root suffers
    cancellation.  ``lo``/``hi`` are meaningless beyond ``count``.
    """
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return 0, 0.0, 0.0
    if disc == 0.0:
        r = -0.5 * b / a
        return 1, r, r
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    r0 = q / a
    r1 = c / q
    if r0 > r1:
        r0, r1 = r1, r0
    return 2, r0, r1


@njit
def ray_sphere_t(o, d, center, radius):
    """Smallest root >= EPS_T of the ray/sphere quadratic, or -1.0."""
    oc = vsub(o, center)
    a = vdot(d, d)
    b = 2.0 * vdot(oc, d)
    c = vdot(oc, oc) - radius * radius
    n, t0, t1 = quadratic_roots(a, b, c)
    if n == 0:
        return -1.0
    if t0 >= EPS_T:
        return t0
    if n == 2 and t1 >= EPS_T:
        return t1
    return -1.0


@njit
def nearest_hit(o, d, centers, radii):
    """Linear scan over all spheres; returns ``(t, index)`` with index -1 on miss.

    Strict ``<`` keeps the lowest index on exact ties.
    """
    best_t = math.inf
    best_i = -1
    for i in range(radii.shape[0]):
        c = (centers[i, 0], centers[i, 1], centers[i, 2])
        t = ray_sphere_t(o, d, c, radii[i])
        if t > 0.0 and t < best_t:
            best_t = t
            best_i = i
    return best_t, best_i


@njit
def shading_frame(o, d, t, center):
    """Hit point, normal facing against ``d``, and whether the hit is on the outside."""
    p = vmadd(o, d, t)
    n = vnormalize(vsub(p, center))
    front = vdot(d, n) < 0.0
    if not front:
        n = (-n[0], -n[1], -n[2])
    return p, n, front


@njit
def reflect_dir(d, n):
    k = 2.0 * vdot(d, n)
    return (d[0] - k * n[0], d[1] - k * n[1], d[2] - k * n[2])


@njit
def refract_dir(d, n, eta):
    """Snell refraction; ``n`` opposes ``d`` and ``eta`` = n_incident / n_transmitted.

    Returns ``(ok, direction)``; ``ok`` is False on total internal reflection.
    """
    cos_i = -vdot(d, n)
    # 1 - sin^2(theta_t), arranged to stay exact at eta = 1 near grazing
    cos2_t = 1.0 - eta * eta + (eta * cos_i) * (eta * cos_i)
    if cos2_t < 0.0:
        return False, (0.0, 0.0, 0.0)
    cos_t = math.sqrt(cos2_t)
    k = eta * cos_i - cos_t
    return True, (eta * d[0] + k * n[0], eta * d[1] + k * n[1], eta * d[2] + k * n[2])


# ---------------------------------------------------------------------------
# value types and public wrappers


def _vec(v) -> tuple:
    return (float(v[0]), float(v[1]), float(v[2]))


@dataclass(frozen=True)
class Ray:
    """Origin plus unit direction; the direction is normalized on construction."""

    origin: Vec3
    direction: Vec3

    def __post_init__(self):
        o = _vec(self.origin)
        d = _vec(self.direction)
        length = math.sqrt(vdot(d, d))
        if not (length > 0.0 and math.isfinite(length)):
            raise ValueError(f"ray direction must be finite and nonzero, got {d}")
        object.__setattr__(self, "origin", Vec3(*o))
        object.__setattr__(self, "direction", Vec3(*vscale(d, 1.0 / length)))

    def at(self, t: float) -> Vec3:
        return Vec3(*vmadd(tuple(self.origin), tuple(self.direction), float(t)))


@dataclass(frozen=True)
class Sphere:
    center: Vec3
    radius: float
    material: Material

    def __post_init__(self):
        object.__setattr__(self, "center", Vec3(*_vec(self.center)))
        r = float(self.radius)
        if not (r > 0.0 and math.isfinite(r)):
            raise ValueError(f"sphere radius must be positive and finite, got {self.radius}")
        object.__setattr__(self, "radius", r)


@dataclass(frozen=True)
class Hit:
    t: float
    point: Vec3
    normal: Vec3
    object_index: int
    # False when the ray struck the sphere from inside (normal was flipped)
    front_face: bool = True


def solve_quadratic(a: float, b: float, c: float) -> tuple[float, ...]:
    """All real roots of a*t^2 + b*t + c = 0, ascending; a double root appears once."""
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    n, lo, hi = quadratic_roots(float(a), float(b), float(c))
    if n == 0:
        return ()
    if n == 1 or lo == hi:
        return (lo,)
    return (lo, hi)


def intersect_sphere(ray: Ray, sphere: Sphere) -> Optional[float]:
    t = ray_sphere_t(tuple(ray.origin), tuple(ray.direction), tuple(sphere.center), sphere.radius)
    return t if t > 0.0 else None


def intersect_scene(ray: Ray, scene: Scene) -> Optional[Hit]:
    centers, radii = scene.packed[0], scene.packed[1]
    o, d = tuple(ray.origin), tuple(ray.direction)
    t, idx = nearest_hit(o, d, centers, radii)
    if idx < 0:
        return None
    p, n, front = shading_frame(o, d, t, tuple(scene.spheres[idx].center))
    return Hit(float(t), Vec3(*p), Vec3(*n), int(idx), bool(front))


def reflect(d, n) -> Vec3:
    return Vec3(*reflect_dir(_vec(d), _vec(n)))


def refract(d, n, eta_ratio: float) -> Optional[Vec3]:
    """Refracted direction, or None on total internal reflection."""
    ok, out = refract_dir(_vec(d), _vec(n), float(eta_ratio))
    return Vec3(*out) if ok else None
