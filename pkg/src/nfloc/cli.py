"""Command line harness around the experiment runners.

Each subcommand runs one experiment, writes its CSV plus a JSON manifest
into the output directory, and prints the file paths.  Domain errors
(bad config, bad geometry) exit with status 1; usage errors exit 2 via
argparse.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import NflocError
from .codebooks import codebook_to_csv, make_ff_codebook, make_nf_codebook
from .config import ExperimentConfig, build_experiment
from . import harness


def _base_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nfloc",
        description="Downlink localization experiments with steered and focused beam codebooks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("rmse-sweep", "Monte Carlo localization error of both schemes over the range ladder"),
        ("snr-map", "best-beam SNR of both codebooks over the service region"),
        ("tracking", "inward walk under fixed and adaptive codebook policies"),
        ("complexity", "wall-clock benchmark of both searches"),
        ("peb", "position error bound of both models over the range ladder"),
        ("codebook-dump", "write both codebooks as CSV"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", type=Path, default=None,
                         help="JSON config file; omitted means the built-in defaults")
        cmd.add_argument("--seed", type=int, default=None, help="override the base seed")
        cmd.add_argument("--trials", type=int, default=None, help="override the trial count")
        cmd.add_argument("--out", type=Path, default=None, help="override the output directory")
        cmd.add_argument("--strict-paper", action="store_true", default=None,
                         help="disable window refinement so the searches stay on fixed grids")
    return parser


def _load(args) -> ExperimentConfig:
    raw = _read_json(args.config) if args.config is not None else {}
    return build_experiment(
        raw,
        seed=args.seed, trials=args.trials,
        out_dir=None if args.out is None else str(args.out),
        strict_paper=args.strict_paper,
    )


def _read_json(path: Path) -> dict:
    import json

    from .errors import ParseError

    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return raw


_RUNNERS = {
    "rmse-sweep": ("rmse.csv", harness.run_rmse_sweep),
    "snr-map": ("snrmap.csv", harness.run_snr_map),
    "tracking": ("tracking.csv", harness.run_tracking),
    "complexity": ("complexity.csv", harness.run_complexity_bench),
    "peb": ("peb.csv", harness.run_bound_curve),
}


def _run(command: str, xc: ExperimentConfig) -> list:
    out_dir = Path(xc.out_dir)
    if command == "codebook-dump":
        f1 = make_ff_codebook(xc.array, xc.region, xc.n_steering)
        f2 = make_nf_codebook(xc.array, xc.region, xc.n_focusing)
        paths = [out_dir / "codebook_steering.csv", out_dir / "codebook_focusing.csv"]
        out_dir.mkdir(parents=True, exist_ok=True)
        codebook_to_csv(f1, paths[0])
        codebook_to_csv(f2, paths[1])
        harness.write_manifest(out_dir / "codebook_manifest.json", xc, "codebook-dump", paths)
        return paths + [out_dir / "codebook_manifest.json"]
    csv_name, runner = _RUNNERS[command]
    table = runner(xc)
    csv_path = out_dir / csv_name
    table.write_csv(csv_path)
    manifest = out_dir / f"{csv_name.removesuffix('.csv')}_manifest.json"
    harness.write_manifest(manifest, xc, command, [csv_path], extra=table.meta)
    return [csv_path, manifest]


def main(argv=None) -> int:
    parser = _base_parser()
    args = parser.parse_args(argv)
    try:
        xc = _load(args)
        outputs = _run(args.command, xc)
    except NflocError as exc:
        print(f"nfloc: error: {exc}", file=sys.stderr)
        return 1
    for path in outputs:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
