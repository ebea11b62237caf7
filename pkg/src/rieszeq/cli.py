"""Command line interface.

    riesz-eq <experiment> --config <file> [--out <dir>] [--seed <int>] [--level <M>]

Exit codes: 0 all checks pass, 1 check failure, 2 invalid input,
3 resource budget exceeded, 4 solver unconverged.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import InvalidInputError, RieszEqError
from .harness import EXPERIMENTS, ExperimentConfig, run_experiment


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="riesz-eq",
        description="Equilibrium-measure experiments on strictly self-similar fractals",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--level", type=int, default=None, help="cell tree level M")
    args = parser.parse_args(argv)

    try:
        path = Path(args.config)
        if not path.exists():
            raise InvalidInputError(f"config file not found: {path}")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise InvalidInputError("config must be a JSON object")
        raw["experiment"] = args.experiment
        if args.out is not None:
            raw["out_dir"] = args.out
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.level is not None:
            raw["level"] = args.level
        cfg = ExperimentConfig.from_dict(raw)
        report = run_experiment(cfg)
    except RieszEqError as exc:
        print(f"[riesz-eq] error: {exc}", file=sys.stderr)
        return exc.exit_code

    if report.status == "pass":
        return 0
    if report.status == "unconverged":
        return 4
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
