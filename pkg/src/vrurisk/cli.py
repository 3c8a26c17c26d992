"""Command line entry points.

Subcommands:
  synth   generate a synthetic recording in trajectory-CSV form
  run     simulate one recording at one penetration rate
  sweep   simulate recordings across a rate/seed grid
  report  aggregate saved run results into tables and heatmaps

Exit codes: 0 success, 1 bad arguments, 2 input/data errors, 3 runtime
failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import dataset, report, sim, synth

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_rates(text: str) -> tuple[float, ...]:
    try:
        rates = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise _UsageError(f"invalid rate list: {text!r}")
    if not rates or any(not 0.0 <= r <= 1.0 for r in rates):
        raise _UsageError(f"rates must be within [0, 1]: {text!r}")
    return rates


def _parse_seeds(text: str) -> tuple[int, ...]:
    try:
        seeds = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise _UsageError(f"invalid seed list: {text!r}")
    if not seeds:
        raise _UsageError("at least one seed is required")
    return seeds


def _load_config(path: str | None, rates, seeds) -> sim.SimConfig:
    if path is None:
        config = sim.SimConfig()
    else:
        config = sim.SimConfig.from_dict(json.loads(Path(path).read_text()))
    if rates is not None or seeds is not None:
        config = sim.with_rates(
            config,
            rates if rates is not None else config.penetration_rates,
            seeds if seeds is not None else config.seeds,
        )
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vrurisk", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic recording")
    p_synth.add_argument("--scenario", choices=sorted(synth.SCENARIOS), default="crossing")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True, help="dataset directory to write into")

    p_run = sub.add_parser("run", help="simulate one recording")
    p_run.add_argument("--dataset-dir", required=True)
    p_run.add_argument("--recording", type=int, required=True)
    p_run.add_argument("--rates", type=str, default=None, help="comma separated penetration rates")
    p_run.add_argument("--seeds", type=str, default=None, help="comma separated assignment seeds")
    p_run.add_argument("--config", type=str, default=None, help="JSON simulation config")
    p_run.add_argument("--out", required=True, help="directory for result_*.json files")

    p_sweep = sub.add_parser("sweep", help="simulate recordings over a rate/seed grid")
    p_sweep.add_argument("--dataset-dir", required=True)
    p_sweep.add_argument("--recording", type=int, action="append", default=None,
                         help="recording id; repeat for several, default: all discovered")
    p_sweep.add_argument("--rates", type=str, default=None)
    p_sweep.add_argument("--seeds", type=str, default=None)
    p_sweep.add_argument("--config", type=str, default=None)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--out", required=True)

    p_report = sub.add_parser("report", help="aggregate saved run results")
    p_report.add_argument("--results", type=str, default=None, help="directory of result_*.json (default: --out)")
    p_report.add_argument("--out", required=True, help="directory for report artifacts")
    p_report.add_argument("--format", choices=("csv", "json"), default="csv")

    return parser


def _cmd_synth(args) -> int:
    recording = synth.build(args.scenario, args.seed)
    paths = dataset.write_recording(recording, args.out)
    for path in paths:
        print(path)
    return EXIT_OK


def _cmd_run(args) -> int:
    rates = _parse_rates(args.rates) if args.rates else None
    seeds = _parse_seeds(args.seeds) if args.seeds else None
    config = _load_config(args.config, rates, seeds)
    recording = dataset.load_recording(args.dataset_dir, args.recording)
    for rate in config.penetration_rates:
        for seed in config.seeds:
            result = sim.run(recording, rate, seed, config)
            path = report.save_run_result(result, args.out)
            print(f"{path} events={len(result.events)}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    rates = _parse_rates(args.rates) if args.rates else None
    seeds = _parse_seeds(args.seeds) if args.seeds else None
    config = _load_config(args.config, rates, seeds)
    if args.recording:
        rec_ids = sorted(set(args.recording))
    else:
        rec_ids = dataset.discover_recordings(args.dataset_dir)
        if not rec_ids:
            raise FileNotFoundError(f"no recordings found in {args.dataset_dir}")
    recordings = [dataset.load_recording(args.dataset_dir, rid) for rid in rec_ids]
    results, failures = sim.sweep(recordings, config, workers=args.workers)
    for result in results:
        path = report.save_run_result(result, args.out)
        print(f"{path} events={len(result.events)}")
    for failure in failures:
        print(
            f"FAILED rec={failure.recording_id} rate={failure.rate:.4f} seed={failure.seed}: {failure.error}",
            file=sys.stderr,
        )
    return EXIT_DATA if failures else EXIT_OK


def _cmd_report(args) -> int:
    results_dir = args.results if args.results is not None else args.out
    results = report.load_run_results(results_dir)
    if not results:
        raise FileNotFoundError(f"no result_*.json files in {results_dir}")
    for path in report.export(results, args.out, fmt=args.format):
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "synth": _cmd_synth,
            "run": _cmd_run,
            "sweep": _cmd_sweep,
            "report": _cmd_report,
        }[args.command]
        return handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (dataset.SchemaError, dataset.IntegrityError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        log.exception("unhandled failure")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
