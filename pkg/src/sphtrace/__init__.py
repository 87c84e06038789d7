"""Progressive Monte Carlo ray tracing of sphere-only scenes.

Hot kernels are compiled with numba when available; set
``SPHTRACE_DISABLE_JIT=1`` to run the same kernels as plain Python/numpy.
"""

from ._jit import BACKEND, JIT_ENABLED
from .bench import BenchReport, DeterminismError, run_benchmark
from .geometry import (
    EPS_T,
    Hit,
    Ray,
    Sphere,
    Vec3,
    intersect_scene,
    intersect_sphere,
    reflect,
    refract,
    solve_quadratic,
)
from .imaging import ToneMapParams, tone_map, write_ppm
from .oracle import ImageDelta, OracleConfig, image_delta, oracle_render_local
from .radiometry import (
    LightSample,
    Spectrum,
    brdf_eval,
    cosine_weighted_direction,
    direct_radiance,
    sample_light_point,
)
from .scene import (
    Camera,
    Kind,
    Material,
    ParseError,
    Scene,
    build_camera_basis,
    bundled_scene,
    load_scene,
    parse_scene,
    serialize_scene,
)
from .scheduler import AccumulationBuffer, RenderConfig, partition_tiles, render, render_pass
from .tracer import (
    Mode,
    RngStream,
    TraceConfig,
    generate_camera_ray,
    next_random,
    trace_global_iterative,
    trace_local,
)

__version__ = "0.1.0"
