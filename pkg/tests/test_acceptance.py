"""One test per acceptance criterion; each prints a PASS/FAIL/SKIP line."""

import io
import math
import time

import mpmath
import numpy as np
import pytest

from sphtrace import (
    EPS_T,
    AccumulationBuffer,
    Kind,
    Material,
    OracleConfig,
    Ray,
    RenderConfig,
    RngStream,
    Sphere,
    Spectrum,
    ToneMapParams,
    TraceConfig,
    brdf_eval,
    image_delta,
    intersect_sphere,
    oracle_render_local,
    render,
    tone_map,
    trace_global_iterative,
    write_ppm,
)
from sphtrace.bench import buffers_equal, run_benchmark
from sphtrace.tracer import Mode

from conftest import CORES, diffuse, make_scene


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {number}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def test_criterion_1_determinism_across_workers(cornell, report):
    t0 = time.perf_counter()
    bufs = [
        render(cornell, RenderConfig(64, 48, 16, TraceConfig(Mode.GLOBAL, 6, seed=0), workers=w))
        for w in (1, 2, 8)
    ]
    elapsed = time.perf_counter() - t0
    identical = all(buffers_equal(bufs[0], b) for b in bufs[1:])
    report(1, identical and elapsed < 10, f"workers 1/2/8 identical={identical}, {elapsed:.2f}s (limit 10s)")


@pytest.mark.slow
def test_criterion_2_oracle_equivalence(cornell, report):
    t0 = time.perf_counter()
    oracle = oracle_render_local(cornell, OracleConfig(64, 48, 32, 16))
    progressive = render(cornell, RenderConfig(64, 48, 1024, TraceConfig(Mode.LOCAL, seed=0)))
    elapsed = time.perf_counter() - t0
    peak = float(oracle.mean().max())
    rel = image_delta(progressive, oracle).rmse / peak
    report(2, rel <= 0.01 and elapsed < 120, f"RMSE/peak = {rel:.5f} (limit 0.01), {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_3_convergence_rate(cornell, report):
    t0 = time.perf_counter()
    # reference uses a different seed so its noise is independent of the snapshots
    ref = render(cornell, RenderConfig(64, 48, 4096, TraceConfig(Mode.GLOBAL, 6, seed=1))).mean()
    checkpoints = (16, 64, 256, 1024)
    errors = {}

    def sink(pass_index, view):
        if pass_index + 1 in checkpoints:
            errors[pass_index + 1] = image_delta(view.mean(), ref).rmse

    render(cornell, RenderConfig(64, 48, 1024, TraceConfig(Mode.GLOBAL, 6, seed=0)), sink)
    elapsed = time.perf_counter() - t0
    ratios = [errors[4 * n] / errors[n] for n in checkpoints[:-1]]
    ok = all(r <= 0.6 for r in ratios) and elapsed < 300
    report(3, ok, f"RMSE(4N)/RMSE(N) for N=16,64,256: {', '.join(f'{r:.3f}' for r in ratios)}; {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_4_parallel_speedup(cornell, capsys):
    cfg = RenderConfig(320, 240, 64, TraceConfig(Mode.GLOBAL, 6, seed=0))
    if CORES < 4:
        # the timing half is meaningless here; the identical-buffer half is still checked
        short = RenderConfig(320, 240, 4, cfg.trace)
        a = render(cornell, short)
        b = render(cornell, RenderConfig(320, 240, 4, cfg.trace, workers=4))
        same = buffers_equal(a, b)
        with capsys.disabled():
            print(f"\n[acceptance 4] SKIP: host exposes {CORES} core(s); speedup needs >= 4 "
                  f"(workers 1 vs 4 buffers identical={same})")
        assert same
        pytest.skip(f"needs >= 4 cores, host has {CORES}")
    bench = run_benchmark(cornell, cfg, [1, 4], repeats=1)
    speedup = bench.rows[1].speedup
    with capsys.disabled():
        print(f"\n[acceptance 4] {'PASS' if speedup >= 2 else 'FAIL'}: speedup {speedup:.2f}x, buffers identical")
    assert speedup >= 2.0


def test_criterion_5_radiometric_soundness(report):
    albedo = (0.9, 0.5, 0.123)
    mat = diffuse(albedo)
    up = (0.0, 0.0, 1.0)
    x, w = np.polynomial.legendre.leggauss(64)
    total = np.zeros(3)
    for t, a in zip((x + 1) * math.pi / 4, w * math.pi / 4):
        for p, b in zip((x + 1) * math.pi, w * math.pi):
            wi = (math.sin(t) * math.cos(p), math.sin(t) * math.sin(p), math.cos(t))
            total += np.array(brdf_eval(mat, wi, up, up)) * math.cos(t) * math.sin(t) * a * b
    brdf_err = float(np.abs(total - albedo).max())

    rng = np.random.default_rng(99)
    bad = 0
    hits = 0
    for _ in range(10_000):
        center = rng.uniform(-50, 50, 3)
        radius = float(10 ** rng.uniform(-2, 3))
        origin = rng.uniform(-100, 100, 3)
        target = center + rng.uniform(-1.5, 1.5, 3) * radius
        ray = Ray(origin, target - origin)
        t = intersect_sphere(ray, Sphere(center, radius, mat))
        if t is None:
            continue
        hits += 1
        p = np.array(ray.at(t))
        if t < EPS_T or abs(np.linalg.norm(p - center) - radius) > 1e-6 * max(1.0, radius):
            bad += 1
    ok = brdf_err <= 1e-3 and bad == 0
    report(5, ok, f"BRDF quadrature max error {brdf_err:.2e}; {hits} hits, {bad} invariant violations")


def test_criterion_6_mirror_series(report):
    worst = 0.0
    for k in (0.0, 0.5, 0.9, 0.999):
        mat = Material(Kind.SPECULAR, Spectrum(k, k, k), Spectrum(2.5, 2.5, 2.5))
        scene = make_scene(Sphere((0, 0, 3), 1.0, mat), Sphere((0, 0, -3), 1.0, mat))
        for depth in (0, 1, 2, 6, 20):
            got = trace_global_iterative(
                Ray((0, 0, 0), (0, 0, 1)), scene, TraceConfig(Mode.GLOBAL, depth), RngStream(0, 0, 0)
            )
            expected = 2.5 * sum(k**i for i in range(depth + 1))
            worst = max(worst, float(np.abs(np.array(got) - expected).max()))
    report(6, worst <= 1e-9, f"max deviation from partial geometric sum {worst:.2e} (limit 1e-9)")


def test_criterion_7_bit_exact_io(report):
    out = io.BytesIO()
    write_ppm(AccumulationBuffer(1, 1, np.ones((1, 3)), 1), ToneMapParams(2.2, 1.0), out)
    ppm_ok = out.getvalue() == b"P6\n1 1\n255\n\xff\xff\xff"
    independent = int(mpmath.floor(255 * mpmath.mpf("0.5") ** (1 / mpmath.mpf("2.2")) + mpmath.mpf("0.5")))
    mapped = tone_map((0.5, 0.5, 0.5), ToneMapParams(2.2, 1.0))[0]
    ok = ppm_ok and mapped == independent == 186
    report(7, ok, f"1x1 PPM bytes match={ppm_ok}; tone_map(0.5)={mapped}, recomputed={independent}")
