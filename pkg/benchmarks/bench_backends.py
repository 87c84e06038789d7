"""Compare the numba kernels against the pure-Python fallback.

Both backends run the same kernels; numba's sin/cos may differ from the C
library in the last ulp, so buffers agree to rounding.  Each backend runs in its own interpreter because the choice is made at
import time from SPHTRACE_DISABLE_JIT.  Usage:

    python benchmarks/bench_backends.py [--width 32 --height 24 --passes 2]
"""

import argparse
import json
import os
import subprocess
import sys

import numpy as np

CHILD = """
import json, sys, time
from sphtrace import BACKEND, RenderConfig, TraceConfig, bundled_scene, render
w, h, passes, depth = map(int, sys.argv[1:5])
scene = bundled_scene()
cfg = RenderConfig(w, h, passes, TraceConfig("global", depth, seed=0), workers=1)
render(scene, RenderConfig(2, 2, 1, cfg.trace))  # compile / warm caches
t0 = time.perf_counter()
buf = render(scene, cfg)
dt = time.perf_counter() - t0
print(json.dumps({"backend": BACKEND, "seconds": dt, "rays_per_sec": w * h * passes / dt,
                  "sums": buf.sums.tolist()}))
"""


def run_backend(disable_jit, args):
    env = dict(os.environ)
    env.pop("SPHTRACE_DISABLE_JIT", None)
    if disable_jit:
        env["SPHTRACE_DISABLE_JIT"] = "1"
    argv = [sys.executable, "-c", CHILD, str(args.width), str(args.height), str(args.passes), str(args.depth)]
    out = subprocess.run(argv, env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--width", type=int, default=32)
    ap.add_argument("--height", type=int, default=24)
    ap.add_argument("--passes", type=int, default=2)
    ap.add_argument("--depth", type=int, default=6)
    args = ap.parse_args()

    rows = [run_backend(False, args), run_backend(True, args)]
    print(f"{args.width}x{args.height}, {args.passes} passes, global depth {args.depth}, 1 worker")
    print(f"{'backend':>8} {'seconds':>10} {'rays/s':>12}")
    for r in rows:
        print(f"{r['backend']:>8} {r['seconds']:>10.4f} {r['rays_per_sec']:>12.1f}")
    print(f"numba speedup: {rows[1]['seconds'] / rows[0]['seconds']:.1f}x")
    a, b = (np.array(r["sums"]) for r in rows)
    rel = float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300))
    print(f"bit-identical: {a.tobytes() == b.tobytes()}, max relative difference: {rel:.2e}")
    return 0 if rel <= 1e-12 else 1


if __name__ == "__main__":
    sys.exit(main())
