import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphtrace import AccumulationBuffer, Camera, RenderConfig, TraceConfig, partition_tiles, render, render_pass
from sphtrace.scheduler import render_tile
from sphtrace.tracer import Mode, camera_frame

from conftest import diffuse, make_scene
from sphtrace import Sphere


def test_partition_exact_division():
    tiles = partition_tiles(640, 480, 32)
    assert len(tiles) == 300
    assert all(x1 - x0 == 32 and y1 - y0 == 32 for x0, y0, x1, y1 in tiles)


def test_partition_remainder_column():
    tiles = partition_tiles(641, 480, 32)
    xs = sorted({(x0, x1) for x0, _, x1, _ in tiles})
    assert len(xs) == 21
    assert xs[-1] == (640, 641)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 300), st.integers(1, 300), st.integers(1, 64))
def test_partition_is_disjoint_cover(w, h, tile):
    cover = np.zeros((h, w), dtype=np.int32)
    for x0, y0, x1, y1 in partition_tiles(w, h, tile):
        assert 0 < x1 - x0 <= tile and 0 < y1 - y0 <= tile
        cover[y0:y1, x0:x1] += 1
    assert np.all(cover == 1)


def test_partition_rejects_bad_arguments():
    with pytest.raises(ValueError):
        partition_tiles(0, 10, 4)


def small_cfg(**kw):
    base = dict(width=24, height=18, passes=3, trace=TraceConfig(Mode.GLOBAL, 4, seed=2), workers=1, tile_size=8)
    base.update(kw)
    return RenderConfig(**base)


def test_black_scene_pass():
    scene = make_scene(Sphere((0, 0, 5), 1, diffuse((0.5, 0.5, 0.5))))
    cfg = small_cfg()
    buf = AccumulationBuffer(cfg.width, cfg.height)
    render_pass(scene, cfg, buf, 0)
    assert buf.passes_completed == 1
    assert not buf.sums.any()


def test_one_kernel_per_pixel(cornell):
    cfg = small_cfg(width=2, height=2)
    buf = render_pass(cornell, cfg, AccumulationBuffer(2, 2), 0)
    assert buf.traces == 4
    render_pass(cornell, small_cfg(width=2, height=2, workers=3, tile_size=1), buf, 1)
    assert buf.traces == 8


@pytest.mark.parametrize("workers,tile", [(1, 32), (8, 32), (3, 5), (2, 1), (4, 100)])
def test_scheduling_invisible(cornell, workers, tile):
    ref = render(cornell, small_cfg(width=40, height=30, passes=4))
    got = render(cornell, small_cfg(width=40, height=30, passes=4, workers=workers, tile_size=tile))
    assert got.sums.tobytes() == ref.sums.tobytes()
    assert got.passes_completed == 4


def test_tile_order_invisible(cornell):
    cfg = small_cfg(width=30, height=20, tile_size=7)
    ref = render_pass(cornell, cfg, AccumulationBuffer(30, 20), 5)
    eye, right, up, forward, tan_half = camera_frame(cornell.camera)
    tiles = partition_tiles(30, 20, 7)
    random.Random(1).shuffle(tiles)
    sums = np.zeros_like(ref.sums)
    for x0, y0, x1, y1 in tiles:
        render_tile(sums, x0, y0, x1, y1, 30, 20, right, up, forward, eye, tan_half,
                    *cornell.packed, 1, 4, 2, 5)
    assert sums.tobytes() == ref.sums.tobytes()


def test_single_pass_render_equals_render_pass(cornell):
    cfg = small_cfg(passes=1)
    a = render(cornell, cfg)
    b = render_pass(cornell, cfg, AccumulationBuffer(cfg.width, cfg.height), 0)
    assert a.sums.tobytes() == b.sums.tobytes()


def test_resume_is_bit_identical(cornell, tmp_path):
    first = render(cornell, small_cfg(passes=3))
    first.save(tmp_path / "ckpt.npz")
    resumed = render(cornell, small_cfg(passes=3), buffer=AccumulationBuffer.load(tmp_path / "ckpt.npz"))
    straight = render(cornell, small_cfg(passes=6))
    assert resumed.passes_completed == 6
    assert resumed.sums.tobytes() == straight.sums.tobytes()


def test_passes_accumulate_linearly(cornell):
    cfg = small_cfg()
    both = AccumulationBuffer(cfg.width, cfg.height)
    render_pass(cornell, cfg, both, 0)
    render_pass(cornell, cfg, both, 1)
    p0 = render_pass(cornell, cfg, AccumulationBuffer(cfg.width, cfg.height), 0)
    p1 = render_pass(cornell, cfg, AccumulationBuffer(cfg.width, cfg.height), 1)
    assert both.sums.tobytes() == (p0.sums + p1.sums).tobytes()


def test_progress_sink_sees_each_pass_read_only(cornell):
    seen = []

    def sink(pass_index, view):
        seen.append((pass_index, view.passes_completed))
        with pytest.raises(ValueError):
            view.sums[0, 0] = 1.0

    render(cornell, small_cfg(passes=3, workers=2), sink)
    assert seen == [(0, 1), (1, 2), (2, 3)]


def test_smoke_bundled_scene(cornell):
    buf = render(cornell, RenderConfig(64, 48, 16, TraceConfig(Mode.GLOBAL, 6), workers=2))
    img = buf.mean()
    assert img.shape == (48, 64, 3)
    assert np.all(np.isfinite(img)) and np.all(img >= 0)
    assert img.max() > 1.0  # the emitter is in view


def test_buffer_contracts():
    with pytest.raises(ValueError):
        AccumulationBuffer(2, 2).mean()
    with pytest.raises(ValueError):
        AccumulationBuffer(2, 2, np.zeros((3, 3)))
    with pytest.raises(ValueError):
        render_pass(make_scene(camera=Camera((0, 0, -1), (0, 0, 0), (0, 1, 0), 40)), small_cfg(), AccumulationBuffer(3, 3), 0)


@pytest.mark.parametrize("field,value", [("workers", 0), ("tile_size", 0), ("passes", 0), ("width", -1)])
def test_render_config_validation(field, value):
    with pytest.raises(ValueError):
        small_cfg(**{field: value})
