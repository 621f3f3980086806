"""Command line interface: degrade | restore | tables.

Exit codes: 0 success, 1 usage or configuration error, 2 I/O or parse
error, 3 numeric failure.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .blur import BLUR_LEVELS, NOISE_LEVELS, DegradationSpec, build_kernel, degrade
from .cascade import (
    DIRECT_METHODS,
    METHODS,
    _QUADRATIC_METHODS,
    CascadeConfig,
    nearest_quadratic_side,
    quadratic_chain_compatible,
    resolve_levels,
    restore,
)
from .exceptions import ConfigurationError, NumericError, PgmParseError, ShapeError
from .experiment import run_grid, worker_count, write_csv, write_tables_markdown
from .pgm import read_pgm, write_pgm
from .regularize import DiffusionParams, LsqParams
from .solvers import SolverConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    # spec'd exit codes reserve 2 for I/O, so usage errors exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _usage_error(message):
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _write_keyvalues(path, pairs):
    lines = [f"{key}={value}" for key, value in pairs]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def _read_keyvalues(path):
    values = {}
    for line in Path(path).read_text(encoding="ascii").splitlines():
        line = line.strip()
        if not line or "=" not in line:
            continue
        key, _, value = line.partition("=")
        values[key] = value
    return values


def _cmd_degrade(args):
    truth = read_pgm(args.input)
    if truth.shape[0] != truth.shape[1]:
        return _usage_error(f"input image must be square, got {truth.shape}")
    sigma, band = BLUR_LEVELS[args.blur_level]
    if args.sigma is not None:
        sigma = args.sigma
    if args.band is not None:
        band = args.band
    noise = NOISE_LEVELS[args.noise_level] if args.noise is None else args.noise
    spec = DegradationSpec(sigma=sigma, band=band, noise_level=noise, seed=args.seed)
    blurred, noisy, delta = degrade(truth, spec)
    out = args.out
    write_pgm(blurred, f"{out}.blur.pgm")
    write_pgm(noisy, f"{out}.noisy.pgm")
    _write_keyvalues(
        f"{out}.meta",
        [
            ("sigma", repr(float(sigma))),
            ("band", band),
            ("noise_level", repr(float(noise))),
            ("seed", args.seed),
            ("delta", repr(float(delta))),
            ("side", truth.shape[0]),
        ],
    )
    print(f"wrote {out}.blur.pgm {out}.noisy.pgm {out}.meta (delta={delta:.6g})")
    return EXIT_OK


def _fit_side(image, target):
    # crop the top-left corner, or pad by edge replication on the far sides
    side = image.shape[0]
    if target < side:
        return image[:target, :target], f"crop:{side}->{target}"
    if target > side:
        pad = target - side
        return np.pad(image, ((0, pad), (0, pad)), mode="edge"), f"pad:{side}->{target}"
    return image, "none"


def _cmd_restore(args):
    if args.method in DIRECT_METHODS:
        if args.levels is not None:
            return _usage_error("direct methods are single-level; --levels is not accepted")
        if args.smoother is not None:
            return _usage_error("direct methods fix the smoother; --smoother is not accepted")

    noisy = read_pgm(args.input)
    if noisy.shape[0] != noisy.shape[1]:
        return _usage_error(f"input image must be square, got {noisy.shape}")

    sigma, band, delta = args.sigma, args.band, args.delta
    if args.meta is not None:
        meta = _read_keyvalues(args.meta)
        if sigma is None and "sigma" in meta:
            sigma = float(meta["sigma"])
        if band is None and "band" in meta:
            band = int(meta["band"])
        if delta is None and "delta" in meta:
            delta = float(meta["delta"])
    if sigma is None or band is None or delta is None:
        return _usage_error("need --meta or explicit --sigma, --band and --delta")

    smoother = args.smoother or "cg"
    config = CascadeConfig(
        method=args.method,
        levels=args.levels,
        solver=SolverConfig(smoother=smoother, c=args.c, max_iters_cap=args.max_iters),
        lsq=LsqParams(rho=args.rho),
        diffusion=DiffusionParams(k=args.k, tau=args.tau, steps=args.steps),
    )

    original_side = noisy.shape[0]
    resize = "none"
    levels = resolve_levels(config, original_side, band)
    if config.method in _QUADRATIC_METHODS and levels >= 2 and not quadratic_chain_compatible(original_side, levels):
        target = nearest_quadratic_side(original_side, levels)
        noisy, resize = _fit_side(noisy, target)

    truth = None
    if args.truth is not None:
        truth = read_pgm(args.truth)
        if truth.shape[0] != truth.shape[1]:
            return _usage_error(f"truth image must be square, got {truth.shape}")
        truth, _ = _fit_side(truth, noisy.shape[0])

    kernel = build_kernel(sigma, band, noisy.shape[0])
    report = restore(noisy, kernel, delta, config, truth=truth)

    out = args.out
    write_pgm(report.restored, f"{out}.restored.pgm")
    pairs = [("method", report.method)]
    for key in ("smoother", "levels", "c", "max_iters_cap", "k", "tau", "steps", "rho", "sigma", "band", "delta", "side"):
        value = report.config[key]
        pairs.append((key, repr(value) if isinstance(value, float) else value))
    pairs.append(("original_side", original_side))
    pairs.append(("resize", resize))
    pairs.append(("wall_time_s", repr(report.wall_time_s)))
    if report.psnr_db is not None:
        pairs.append(("psnr_db", repr(report.psnr_db)))
    for st in report.per_level:
        pairs.append(
            (
                f"level_{st.level}",
                f"budget={st.budget} iterations={st.iterations} "
                f"residual={st.final_residual!r} stop={st.stop_reason.value}",
            )
        )
    _write_keyvalues(f"{out}.report", pairs)
    if report.psnr_db is not None:
        print(f"psnr_db={report.psnr_db!r}")
    print(f"wrote {out}.restored.pgm {out}.report")
    return EXIT_OK


def _cmd_tables(args):
    methods = [m for m in args.methods.split(",") if m]
    if not methods:
        return _usage_error("--methods must name at least one method")
    for m in methods:
        if m not in METHODS:
            return _usage_error(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    try:
        seeds = [int(s) for s in args.seeds.split(",") if s]
    except ValueError:
        return _usage_error(f"--seeds must be a comma-separated integer list, got {args.seeds!r}")
    if not seeds:
        return _usage_error("--seeds must name at least one seed")

    truth = read_pgm(args.truth)
    if truth.shape[0] != truth.shape[1]:
        return _usage_error(f"truth image must be square, got {truth.shape}")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = run_grid(
        truth,
        methods,
        seeds,
        smoother=args.smoother,
        levels=args.levels,
        c=args.c,
        k=args.k,
        tau=args.tau,
        steps=args.steps,
        rho=args.rho,
        workers=worker_count(),
    )
    write_csv(rows, out_dir / "results.csv")
    write_tables_markdown(rows, out_dir / "tables.md")
    failures = sum(1 for r in rows if r.error)
    print(f"wrote {out_dir / 'results.csv'} and {out_dir / 'tables.md'} "
          f"({len(rows) - failures}/{len(rows)} runs succeeded)")
    return EXIT_OK if failures < len(rows) else EXIT_NUMERIC


def _add_restore_knobs(p):
    p.add_argument("--c", type=float, default=1.1, help="residual threshold multiplier (> 1)")
    p.add_argument("--k", type=float, default=10.0, help="diffusion edge threshold")
    p.add_argument("--tau", type=float, default=0.2, help="diffusion time step")
    p.add_argument("--steps", type=int, default=1, help="diffusion steps per level")
    p.add_argument("--rho", type=float, default=0.1, help="plane-fit weight bandwidth fraction")


def build_parser():
    parser = _Parser(prog="cascade-restore", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degrade", help="blur an image and add seeded noise")
    p.add_argument("input", help="square 8-bit PGM image")
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--blur-level", choices=sorted(BLUR_LEVELS), default="b1")
    p.add_argument("--sigma", type=float, help="override the blur level's sigma")
    p.add_argument("--band", type=int, help="override the blur level's half bandwidth")
    p.add_argument("--noise-level", choices=sorted(NOISE_LEVELS), default="v1")
    p.add_argument("--noise", type=float, help="override the relative noise level")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_degrade)

    p = sub.add_parser("restore", help="restore a degraded image")
    p.add_argument("input", help="noisy 8-bit PGM image")
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--meta", help="meta file from the degrade step")
    p.add_argument("--delta", type=float, help="noise RMS magnitude")
    p.add_argument("--sigma", type=float, help="blur sigma")
    p.add_argument("--band", type=int, help="blur half bandwidth")
    p.add_argument("--levels", type=int, help="cascade depth (cascade methods only)")
    p.add_argument("--smoother", choices=("cg", "mr"), help="cascade smoother (default cg)")
    p.add_argument("--max-iters", type=int, default=200, help="budget for direct solves")
    _add_restore_knobs(p)
    p.add_argument("--truth", help="ground-truth PGM; prints PSNR when given")
    p.set_defaults(func=_cmd_restore)

    p = sub.add_parser("tables", help="run the benchmark grid, emit CSV and Markdown")
    p.add_argument("--truth", required=True, help="ground-truth PGM image")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--methods", default=",".join(METHODS), help="comma-separated method list")
    p.add_argument("--seeds", default="0,1,2,3,4", help="comma-separated seed list")
    p.add_argument("--smoother", choices=("cg", "mr"), default="cg")
    p.add_argument("--levels", type=int, help="cascade depth (default: per-scenario maximum up to 4)")
    _add_restore_knobs(p)
    p.set_defaults(func=_cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse --help or usage failure
        return int(exc.code or 0)
    try:
        return args.func(args)
    except PgmParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigurationError, ShapeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
