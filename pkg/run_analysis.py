#!/usr/bin/env python3
"""
RUN ANALYSIS - geo-tagged COVID-19 tweet analytics
--------------------------------------------------
Subcommands (one step each, or all of them in order):
    ingest, clean, volumes, engagement, geo, topics, sentiment, events, stats, all

Every run writes its CSV/JSON artifacts plus manifest.json into the output
directory. On error, the artifacts of the failed run are removed and the exit
status is 1.

Usage:
    python run_analysis.py all --config config_geotweets.yaml
    python run_analysis.py engagement --input tweets.jsonl.gz --out output/ --states NY,CA
"""

import argparse
import sys
from datetime import date
from pathlib import Path
from typing import Any, Dict, List, Optional

from core.config import RunConfig, load_config
from core.run_context import Console, RunContext
from core.step_loader import PIPELINE, StepLoader
from reports.exporters import ArtifactWriter


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Geo-tagged COVID-19 tweet analytics: volumes, engagement, geography, topics, sentiment"
    )
    parser.add_argument("command", choices=PIPELINE + ["all"], help="Step to run")
    parser.add_argument("--config", help="YAML configuration (default: built-in defaults)")
    parser.add_argument("--input", action="append", help="Primary tweet file (NDJSON, .gz ok); repeatable")
    parser.add_argument("--compensation-input", action="append", help="Gap-compensation tweet file; repeatable")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--seed", type=int, help="Base seed for every random stream")
    parser.add_argument("--workers", type=int, help="Parallel workers (file parsing, LDA repeats)")
    parser.add_argument("--from", dest="date_from", type=date.fromisoformat, help="Window start (YYYY-MM-DD)")
    parser.add_argument("--to", dest="date_to", type=date.fromisoformat, help="Window end (YYYY-MM-DD)")
    parser.add_argument("--states", help="Comma-separated state filter for the analysis steps (e.g. NY,CA)")
    parser.add_argument("--offline-geocoder", action="store_true",
                        help="Resolve counties from the boundary file only (no network)")
    parser.add_argument("--quiet", action="store_true", help="Errors only")
    return parser


def _absolute(paths: Optional[List[str]]) -> Optional[List[str]]:
    if not paths:
        return None
    return [str(Path(p).resolve()) for p in paths]


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Dict[str, Any]]:
    """CLI flags -> {section: {key: value}}; unset flags are left out."""
    states = [s.strip().upper() for s in args.states.split(",") if s.strip()] if args.states else None
    return {
        "ingest": {
            "primary_inputs": _absolute(args.input),
            "compensation_inputs": _absolute(args.compensation_input),
            "window_start": args.date_from,
            "window_end": args.date_to,
        },
        "geo": {"county_mode": "polygon" if args.offline_geocoder else None},
        "execution": {
            "out_dir": str(Path(args.out).resolve()) if args.out else None,
            "seed": args.seed,
            "workers": args.workers,
            "quiet": True if args.quiet else None,
            "states": states,
        },
    }


def run(command: str, config: RunConfig, console: Optional[Console] = None) -> int:
    """
    Run one step (or the whole pipeline) and write its artifacts.

    Returns:
        exit status (0 ok, 1 failure)
    """
    console = console or Console(config.execution.quiet)
    steps = PIPELINE if command == "all" else [command]
    writer = None

    try:
        config.validate()
        out_dir = config.resolve(config.execution.out_dir)
        writer = ArtifactWriter(out_dir)
        context = RunContext(config, console)
        loader = StepLoader()

        for number, name in enumerate(steps, start=1):
            step = loader.load_step(name)
            console.banner(f"[{number}/{len(steps)}] {step.title}")
            result = step.run(context)
            for notice in result.notices:
                console.warn(notice)
            paths = writer.write_result(name, result)
            console.ok(f"{len(paths)} artifact(s) -> {out_dir}")

        counters = context.ingest.counters
        kept, _, removed = context.cleaning
        reconciliation = {
            "ingest_output": counters["output"],
            "bot_removed": sum(removed.values()),
            "analysed": len(kept),
            "state_filtered": len(context.records),
            "reconciles": bool(counters["reconciles"]
                               and counters["output"] - sum(removed.values()) == len(kept)),
        }
        writer.write_manifest(
            config_hash=config.config_hash(),
            seeds={"base": config.execution.seed},
            inputs=config.input_paths(),
            counters=counters,
            reconciliation=reconciliation,
            steps=steps,
        )

    except (FileNotFoundError, ValueError, KeyError, RuntimeError) as e:
        if writer is not None:
            writer.cleanup()
        print(f"\n❌ {e}", file=sys.stderr)
        return 1

    console.banner("ANALYSIS COMPLETE", "✅")
    console.stat(f"{len(writer.artifacts)} artifact(s) in {out_dir}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, overrides_from_args(args))
    except (FileNotFoundError, ValueError, KeyError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return 1
    return run(args.command, config)


if __name__ == "__main__":
    sys.exit(main())
