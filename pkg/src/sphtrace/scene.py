"""Scene data model and the line-oriented ``.scene`` text format.

Grammar (one directive per line, ``#`` comments and blank lines ignored)::

    camera ex ey ez  lx ly lz  ux uy uz  vfov
    sphere radius  cx cy cz  er eg eb  ar ag ab  kind [ior]

``kind`` is one of ``diffuse``, ``specular``, ``refractive``; ``ior``
defaults to 1.5.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Union

import numpy as np

from .geometry import Sphere, Vec3, _vec, vcross, vdot, vnormalize, vsub
from .radiometry import DIFFUSE, REFRACTIVE, SPECULAR, Spectrum

DEFAULT_IOR = 1.5


class ParseError(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}" if line else reason)


class Kind(enum.IntEnum):
    DIFFUSE = DIFFUSE
    SPECULAR = SPECULAR
    REFRACTIVE = REFRACTIVE


@dataclass(frozen=True)
class Material:
    kind: Kind = Kind.DIFFUSE
    albedo: Spectrum = Spectrum(0.0, 0.0, 0.0)
    emission: Spectrum = Spectrum(0.0, 0.0, 0.0)
    ior: float = DEFAULT_IOR

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        albedo = Spectrum(*_vec(self.albedo))
        emission = Spectrum(*_vec(self.emission))
        if not all(0.0 <= a <= 1.0 for a in albedo):
            raise ValueError(f"albedo channels must lie in [0, 1], got {tuple(albedo)}")
        if not all(0.0 <= e < math.inf for e in emission):
            raise ValueError(f"emission channels must be finite and >= 0, got {tuple(emission)}")
        ior = float(self.ior)
        if not (1.0 <= ior < math.inf):
            raise ValueError(f"ior must be >= 1, got {self.ior}")
        object.__setattr__(self, "albedo", albedo)
        object.__setattr__(self, "emission", emission)
        object.__setattr__(self, "ior", ior)

    @property
    def is_emissive(self) -> bool:
        return any(e > 0.0 for e in self.emission)


@dataclass(frozen=True)
class Camera:
    eye: Vec3
    look_at: Vec3
    up: Vec3
    vfov_degrees: float

    def __post_init__(self):
        eye, look, up = _vec(self.eye), _vec(self.look_at), _vec(self.up)
        for v in (eye, look, up):
            if not all(math.isfinite(c) for c in v):
                raise ValueError("camera vectors must be finite")
        fov = float(self.vfov_degrees)
        if not (0.0 < fov < 180.0):
            raise ValueError(f"vfov must lie in (0, 180), got {fov}")
        view = vsub(look, eye)
        vlen = math.sqrt(vdot(view, view))
        if vlen == 0.0:
            raise ValueError("eye and look_at coincide")
        ulen = math.sqrt(vdot(up, up))
        if ulen == 0.0:
            raise ValueError("up vector is zero")
        c = vcross(view, up)
        if math.sqrt(vdot(c, c)) <= 1e-12 * vlen * ulen:
            raise ValueError("up vector is parallel to the view direction")
        object.__setattr__(self, "eye", Vec3(*eye))
        object.__setattr__(self, "look_at", Vec3(*look))
        object.__setattr__(self, "up", Vec3(*up))
        object.__setattr__(self, "vfov_degrees", fov)


def build_camera_basis(camera: Camera) -> tuple[Vec3, Vec3, Vec3]:
    """Right-handed ``(right, up, forward)`` with right = forward x up."""
    forward = vnormalize(vsub(tuple(camera.look_at), tuple(camera.eye)))
    right = vnormalize(vcross(forward, tuple(camera.up)))
    up = vcross(right, forward)
    return Vec3(*right), Vec3(*up), Vec3(*forward)


@dataclass(frozen=True)
class Scene:
    spheres: tuple[Sphere, ...]
    camera: Camera
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "spheres", tuple(self.spheres))

    @cached_property
    def emitter_indices(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.spheres) if s.material.is_emissive)

    @cached_property
    def packed(self):
        """Kernel view: ``(centers, radii, emission, albedo, kinds, iors, emitters)``."""
        n = len(self.spheres)
        centers = np.zeros((n, 3))
        radii = np.zeros(n)
        emission = np.zeros((n, 3))
        albedo = np.zeros((n, 3))
        kinds = np.zeros(n, dtype=np.int64)
        iors = np.ones(n)
        for i, s in enumerate(self.spheres):
            centers[i] = s.center
            radii[i] = s.radius
            emission[i] = s.material.emission
            albedo[i] = s.material.albedo
            kinds[i] = int(s.material.kind)
            iors[i] = s.material.ior
        emitters = np.array(self.emitter_indices, dtype=np.int64)
        arrays = (centers, radii, emission, albedo, kinds, iors, emitters)
        for a in arrays:
            a.setflags(write=False)
        return arrays


# ---------------------------------------------------------------------------
# text format

_KINDS = {"diffuse": Kind.DIFFUSE, "specular": Kind.SPECULAR, "refractive": Kind.REFRACTIVE}


def _floats(fields: list[str], lineno: int) -> list[float]:
    out = []
    for f in fields:
        try:
            v = float(f)
        except ValueError:
            raise ParseError(lineno, f"non-numeric field {f!r}") from None
        if not math.isfinite(v):
            raise ParseError(lineno, f"non-finite field {f!r}")
        out.append(v)
    return out


def _parse_camera(args: list[str], lineno: int) -> Camera:
    if len(args) != 10:
        raise ParseError(lineno, f"camera expects 10 fields, got {len(args)}")
    v = _floats(args, lineno)
    try:
        return Camera(Vec3(*v[0:3]), Vec3(*v[3:6]), Vec3(*v[6:9]), v[9])
    except ValueError as exc:
        raise ParseError(lineno, str(exc)) from None


def _parse_sphere(args: list[str], lineno: int) -> Sphere:
    if len(args) not in (11, 12):
        raise ParseError(lineno, f"sphere expects 11 or 12 fields, got {len(args)}")
    v = _floats(args[:10], lineno)
    kind = _KINDS.get(args[10])
    if kind is None:
        raise ParseError(lineno, f"unknown material kind {args[10]!r}")
    ior = _floats(args[11:], lineno)[0] if len(args) == 12 else DEFAULT_IOR
    radius = v[0]
    if radius <= 0.0:
        raise ParseError(lineno, f"radius must be > 0, got {radius}")
    if not all(0.0 <= a <= 1.0 for a in v[7:10]):
        raise ParseError(lineno, "albedo outside [0, 1]")
    if not all(e >= 0.0 for e in v[4:7]):
        raise ParseError(lineno, "emission must be >= 0")
    try:
        mat = Material(kind, Spectrum(*v[7:10]), Spectrum(*v[4:7]), ior)
        return Sphere(Vec3(*v[1:4]), radius, mat)
    except ValueError as exc:
        raise ParseError(lineno, str(exc)) from None


def parse_scene(text: Union[bytes, str], name: str = "") -> Scene:
    """Parse ``.scene`` text.  Every failure surfaces as :class:`ParseError`."""
    if isinstance(text, (bytes, bytearray, memoryview)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(0, f"input is not valid UTF-8 ({exc.reason} at byte {exc.start})") from None
    camera = None
    spheres = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, *args = line.split()
        if head == "camera":
            if camera is not None:
                raise ParseError(lineno, "duplicate camera")
            camera = _parse_camera(args, lineno)
        elif head == "sphere":
            spheres.append(_parse_sphere(args, lineno))
        else:
            raise ParseError(lineno, f"unknown directive {head!r}")
    if camera is None:
        raise ParseError(0, "missing camera")
    return Scene(tuple(spheres), camera, name)


def serialize_scene(scene: Scene) -> str:
    c = scene.camera
    nums = [*c.eye, *c.look_at, *c.up, c.vfov_degrees]
    lines = ["camera " + " ".join(repr(float(x)) for x in nums)]
    names = {v: k for k, v in _KINDS.items()}
    for s in scene.spheres:
        m = s.material
        nums = [s.radius, *s.center, *m.emission, *m.albedo]
        fields = [repr(float(x)) for x in nums] + [names[m.kind], repr(m.ior)]
        lines.append("sphere " + " ".join(fields))
    return "\n".join(lines) + "\n"


def load_scene(path) -> Scene:
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_scene(data, name=str(path))


def bundled_scene_text(name: str = "cornell-spheres.scene") -> str:
    return resources.files("sphtrace").joinpath("data").joinpath(name).read_text("utf-8")


def bundled_scene(name: str = "cornell-spheres.scene") -> Scene:
    return parse_scene(bundled_scene_text(name), name=name)
