"""Command line entry point: ``seqopt run | fidelity-study | summarize``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path


from .errors import ConfigurationError, ParseError
from .experiment import (
    PRESETS,
    ExperimentConfig,
    format_summary,
    gate_fidelity_study,
    parse_shots,
    preset,
    run_experiment,
    summarize,
)


def _shots_arg(value: str):
    try:
        return parse_shots(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqopt", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a multi-trial experiment")
    src = run.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="experiment JSON document")
    src.add_argument("--preset", choices=sorted(PRESETS), help="bundled experiment")
    src.add_argument("--list-presets", action="store_true")
    run.add_argument("--seed", type=int, help="base seed (trial k uses seed + k)")
    run.add_argument("--trials", type=int)
    run.add_argument("--shots", type=_shots_arg, default=argparse.SUPPRESS, help="count or 'exact'")
    run.add_argument("--out", type=Path)
    run.add_argument("--parallel", type=int)

    fid = sub.add_parser("fidelity-study", help="single-gate fidelity under shot noise")
    fid.add_argument("--trials", type=int, default=10_000)
    fid.add_argument("--shots", default="1024,4096,8192", help="comma-separated counts")
    fid.add_argument("--seed", type=int, default=0)
    fid.add_argument("--bins", type=int, default=50)
    fid.add_argument("--out", type=Path, default=Path("runs/fidelity-study"))

    summ = sub.add_parser("summarize", help="summary table of trace CSVs")
    summ.add_argument("csv", nargs="+", type=Path)
    summ.add_argument("--reference-energy", type=float)
    summ.add_argument("--json", action="store_true", help="print JSON instead of a table")
    return parser


def _cmd_run(args) -> int:
    if args.list_presets:
        for name in sorted(PRESETS):
            print(name)
        return 0
    if args.config:
        doc = json.loads(args.config.read_text())
    elif args.preset:
        doc = preset(args.preset)
    else:
        raise ConfigurationError("run needs --config or --preset")
    for key in ("trials", "out", "parallel"):
        value = getattr(args, key)
        if value is not None:
            doc[key] = str(value) if key == "out" else value
    if args.seed is not None:
        doc["base_seed"] = args.seed
    if hasattr(args, "shots"):
        doc["shots"] = "exact" if args.shots is None else args.shots
    config = ExperimentConfig.from_dict(doc)
    summary = run_experiment(config)
    rows = [
        {"algorithm": v["algorithm"], "hyperparam": v["hyperparam"], **v}
        for v in summary["algorithms"].values()
    ]
    print(format_summary(rows))
    print(f"wrote {config.out}/traces.csv, summary.json, config.json")
    return 0


def _cmd_fidelity(args) -> int:
    shots = [None if s.strip() == "exact" else int(s) for s in args.shots.split(",")]
    study = gate_fidelity_study(shots, args.trials, args.seed, args.out, args.bins)
    for algo in ("rotosolve", "fraxis", "fqs"):
        med = ", ".join(f"{s or 'exact'}: {study.median(algo, s):.6f}" for s in shots)
        print(f"{algo:<10} median gate fidelity  {med}")
    print(f"wrote {args.out}/fidelity.csv, histograms.csv")
    return 0


def _cmd_summarize(args) -> int:
    rows = summarize(args.csv, args.reference_energy)
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(format_summary(rows))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "fidelity-study":
            return _cmd_fidelity(args)
        return _cmd_summarize(args)
    except (ConfigurationError, ParseError, OSError) as exc:
        print(f"seqopt: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
