"""``legbench`` command-line front end.

Exit codes: 0 success, 1 validation failure, 2 configuration or output
path error, 3 divergence in a single run.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .analysis import deviation_sweep, evaluate, uncertainty_sweep
from .config import ConfigError, RunManifest, load_config
from .kinematics import Unreachable, jacobian
from .sim import run_closed_loop
from .validation import run_validation

log = logging.getLogger("legbench")

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2, 3


def cmd_run(manifest: RunManifest, out_dir: Path | None = None) -> int:
    out = Path(out_dir) if out_dir is not None else manifest.output_dir
    cfg = manifest.sim
    records = []
    diverged = False
    for name in manifest.controllers:
        scenario = manifest.scenario(name)
        run = run_closed_loop(scenario, cfg)
        path = io.write_run_csv(out / f"run_{name}.csv", run)
        log.info("wrote %s (%d rows)", path, len(run))
        if run.diverged:
            log.error("%s diverged: %s", name, run.message)
            diverged = True
        records.append((name, evaluate(run, scenario.path)))
    io.write_metrics_csv(out / "metrics.csv", records)
    return EXIT_DIVERGED if diverged else EXIT_OK


def cmd_sweep(manifest: RunManifest, kind: str, out_dir: Path | None = None, max_workers: int | None = None) -> int:
    out = Path(out_dir) if out_dir is not None else manifest.output_dir
    base = manifest.scenario(manifest.controllers[0])
    controllers = [manifest.controller(n) for n in manifest.controllers]
    if kind == "deviation":
        result = deviation_sweep(base, manifest.sim, controllers=controllers, max_workers=max_workers)
    elif kind == "uncertainty":
        result = uncertainty_sweep(
            base, manifest.sim, pcts=manifest["sweep.pcts"], controllers=controllers, max_workers=max_workers
        )
    else:
        raise ValueError(f"unknown sweep kind {kind!r}")
    path = io.write_sweep_csv(out / f"sweep_{kind}.csv", result)
    log.info("wrote %s (%d cells)", path, len(result.cells))
    return EXIT_OK


def cmd_validate(manifest: RunManifest, out_dir: Path | None = None, jacobian_fn=jacobian, stream=None) -> int:
    stream = stream if stream is not None else sys.stdout
    results = run_validation(manifest.plant, manifest.path.profile, jacobian_fn=jacobian_fn)
    out = Path(out_dir) if out_dir is not None else manifest.output_dir
    rows = [[r.name, io.fmt(r.tolerance), io.fmt(r.observed), "pass" if r.passed else "FAIL"] for r in results]
    io.write_csv(out / "validation.csv", ["check", "tolerance", "observed", "status"], rows)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{status:4}  {r.name:<{width}}  observed={r.observed:.3e}  tol={r.tolerance:.1e}", file=stream)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="legbench", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate the configured controllers and write CSVs")
    p.add_argument("-c", "--config", type=Path)
    p.add_argument("-o", "--out", type=Path)

    p = sub.add_parser("sweep", help="initial-deviation or mass-uncertainty sweep")
    p.add_argument("--kind", choices=("deviation", "uncertainty"), required=True)
    p.add_argument("-c", "--config", type=Path)
    p.add_argument("-o", "--out", type=Path)

    p = sub.add_parser("validate", help="run the model-consistency checks")
    p.add_argument("-c", "--config", type=Path)
    p.add_argument("-o", "--out", type=Path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        manifest = load_config(args.config)
    except (ConfigError, Unreachable) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "run":
            return cmd_run(manifest, args.out)
        if args.command == "sweep":
            return cmd_sweep(manifest, args.kind, args.out)
        return cmd_validate(manifest, args.out)
    except Unreachable as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error on {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
