"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 scene parse error, 3 I/O error,
4 benchmark determinism failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import DeterminismError, run_benchmark
from .imaging import ToneMapParams, save_ppm
from .oracle import OracleConfig, oracle_render_local
from .scene import ParseError, load_scene
from .scheduler import RenderConfig, default_workers, render
from .tracer import DEFAULT_DEPTH, TraceConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_IO = 3
EXIT_NONDETERMINISTIC = 4

log = logging.getLogger("sphtrace")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def _worker_list(text: str) -> list[int]:
    try:
        counts = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not counts or any(c < 1 for c in counts):
        raise argparse.ArgumentTypeError(f"worker counts must be positive, got {text!r}")
    return counts


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sphtrace", description="Progressive Monte Carlo renderer for sphere scenes.")
    p.add_argument("--scene", required=True, metavar="PATH", help="scene file to render")
    p.add_argument("--width", type=_positive_int, default=640)
    p.add_argument("--height", type=_positive_int, default=480)
    p.add_argument("--passes", type=_positive_int, default=64, help="samples per pixel")
    p.add_argument("--mode", choices=("local", "global"), default="global")
    p.add_argument("--depth", type=_nonneg_int, default=DEFAULT_DEPTH, help="bounce limit (global mode)")
    p.add_argument("--workers", type=_positive_int, default=default_workers())
    p.add_argument("--tile-size", type=_positive_int, default=32)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--out", default="out.ppm", metavar="PATH.ppm")
    p.add_argument("--gamma", type=_positive_float, default=2.2)
    p.add_argument("--exposure", type=_positive_float, default=1.0)
    p.add_argument("--oracle", action="store_true", help="render with the serial reference instead")
    p.add_argument("--light-grid", type=_positive_int, default=32, help="oracle: samples per emitter side")
    p.add_argument("--oracle-rays", type=_positive_int, default=16, help="oracle: rays per pixel")
    p.add_argument("--bench", type=_worker_list, metavar="W1,W2,...", help="benchmark these worker counts")
    p.add_argument("--bench-csv", default="bench.csv", metavar="PATH", help="CSV report path for --bench")
    p.add_argument("--bench-repeats", type=_positive_int, default=3)
    p.add_argument("--snapshot-every", type=_positive_int, metavar="K",
                   help="also write the running image every K passes")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def snapshot_path(out: Path, passes_done: int) -> Path:
    return out.with_name(f"{out.stem}_pass{passes_done:05d}{out.suffix or '.ppm'}")


def _run(args) -> int:
    try:
        scene = load_scene(args.scene)
    except OSError as exc:
        print(f"sphtrace: cannot read scene {args.scene}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"sphtrace: {args.scene}: {exc}", file=sys.stderr)
        return EXIT_PARSE

    tone = ToneMapParams(args.gamma, args.exposure)
    out = Path(args.out)

    if args.oracle:
        ocfg = OracleConfig(args.width, args.height, args.light_grid, args.oracle_rays)
        log.info("oracle render %dx%d grid=%d rays=%d", ocfg.width, ocfg.height,
                 ocfg.light_grid, ocfg.rays_per_pixel)
        save_ppm(oracle_render_local(scene, ocfg), out, tone)
        return EXIT_OK

    trace = TraceConfig(mode=args.mode, max_depth=args.depth, seed=args.seed)
    cfg = RenderConfig(args.width, args.height, args.passes, trace, args.workers, args.tile_size)

    if args.bench:
        try:
            report = run_benchmark(scene, cfg, args.bench, repeats=args.bench_repeats)
        except DeterminismError as exc:
            print(f"sphtrace: benchmark aborted: {exc}", file=sys.stderr)
            return EXIT_NONDETERMINISTIC
        sys.stdout.write(report.to_text())
        Path(args.bench_csv).write_text(report.to_csv())
        return EXIT_OK

    sink = None
    if args.snapshot_every:
        every = args.snapshot_every

        def sink(pass_index, view):
            done = pass_index + 1
            if done % every == 0 and done < args.passes:
                save_ppm(view, snapshot_path(out, done), tone)
                log.info("snapshot after %d passes", done)

    buffer = render(scene, cfg, sink)
    save_ppm(buffer, out, tone)
    log.info("wrote %s (%d passes)", out, buffer.passes_completed)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"sphtrace: {exc}\n", file=sys.stderr)
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return _run(args)
    except OSError as exc:
        print(f"sphtrace: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
