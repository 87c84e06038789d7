import os

import pytest

from sphtrace import Camera, Kind, Material, Scene, Sphere, Spectrum, bundled_scene

CORES = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def diffuse(albedo=(0.5, 0.5, 0.5), emission=(0.0, 0.0, 0.0)):
    return Material(Kind.DIFFUSE, Spectrum(*albedo), Spectrum(*emission))


def make_scene(*spheres, camera=None):
    if camera is None:
        camera = Camera((0, 0, -10), (0, 0, 0), (0, 1, 0), 45)
    return Scene(tuple(spheres), camera)


@pytest.fixture(scope="session")
def cornell():
    return bundled_scene()


@pytest.fixture
def lit_sphere_scene():
    """Diffuse sphere at the origin lit by one small emitter, nothing else."""
    return make_scene(
        Sphere((0, 0, 0), 1.0, diffuse((0.8, 0.6, 0.4))),
        Sphere((0, 3, -3), 0.5, diffuse((0, 0, 0), (20, 20, 20))),
        camera=Camera((0, 0, -5), (0, 0, 0), (0, 1, 0), 40),
    )
