"""
hindsight command line

    hindsight optimize --input prices.csv --input-kind price --objective sterling --spread 1e-4
    hindsight bench --op optimal_return_unconstrained --sizes 100000,1000000 --reps 3

Exit status: 0 success, 2 input error, 3 configuration error, 1 otherwise.
"""
import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from pydantic import ValidationError

from hindsight import __version__
from hindsight.cli.io import load_positions, load_series, render_csv, render_json
from hindsight.cli.models import InputSpec, OutputFormat, RunConfig, RunObjective, SeriesKind
from hindsight.cli.runner import run
from hindsight.core.config import get_settings
from hindsight.core.exceptions import ConfigError, HindsightError
from hindsight.services.bench import OPERATIONS, BenchGenerator, run_scaling

logger = logging.getLogger(__name__)


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors become ConfigError so they share the exit status of bad configs."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _sizes(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="hindsight", description="A-posteriori optimal all-or-nothing trading strategies")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    optimize = commands.add_parser("optimize", help="optimize or evaluate strategies over CSV series")
    optimize.add_argument("--input", action="append", required=True, help="CSV file; repeat for several files")
    optimize.add_argument("--input-kind", choices=[k.value for k in SeriesKind], default=SeriesKind.RETURN.value)
    optimize.add_argument("--value-column", default="value")
    optimize.add_argument("--timestamp-column")
    optimize.add_argument("--positions-column", help="0/1 column evaluated by --objective report")
    optimize.add_argument("--delimiter", default=",")
    optimize.add_argument("--no-header", dest="header", action="store_false")
    optimize.add_argument("--objective", choices=[o.value for o in RunObjective], default=RunObjective.STERLING.value)
    optimize.add_argument("--max-trades", type=int)
    costs = optimize.add_mutually_exclusive_group()
    costs.add_argument("--spread", type=float, help="round-trip spread δ = 2f")
    costs.add_argument("--cost", type=float, help="per-transition cost f")
    optimize.add_argument("--tol", type=float)
    optimize.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.JSON.value)
    optimize.set_defaults(handler=_optimize)

    bench = commands.add_parser("bench", help="time an optimizer over growing n")
    bench.add_argument("--op", required=True, help=f"one of: {', '.join(sorted(OPERATIONS))}")
    bench.add_argument("--sizes", type=_sizes, required=True)
    bench.add_argument("--reps", type=int, default=3)
    bench.add_argument("--generator", choices=[g.value for g in BenchGenerator], default=BenchGenerator.IID_GAUSSIAN.value)
    bench.add_argument("--seed", type=int, default=0)
    bench.set_defaults(handler=_bench)
    return parser


def _process(spec: InputSpec, config: RunConfig) -> dict:
    series = load_series(spec)
    positions = load_positions(spec) if config.objective is RunObjective.REPORT else None
    return run(config, series, positions=positions, source=str(spec.path))


def _optimize(args: argparse.Namespace) -> int:
    try:
        config = RunConfig(
            objective=args.objective,
            max_trades=args.max_trades,
            transition_cost=args.cost,
            spread=args.spread,
            output_format=args.format,
            **({"tolerance": args.tol} if args.tol is not None else {}),
        )
        specs = [
            InputSpec(
                path=path,
                kind=args.input_kind,
                value_column=args.value_column,
                timestamp_column=args.timestamp_column,
                positions_column=args.positions_column,
                delimiter=args.delimiter,
                header=args.header,
            )
            for path in args.input
        ]
    except ValidationError as e:
        raise ConfigError(str(e))

    if len(specs) == 1:
        documents = [_process(specs[0], config)]
    else:
        with ThreadPoolExecutor(max_workers=get_settings().max_workers) as pool:
            futures = [pool.submit(_process, spec, config) for spec in specs]
            documents = [future.result() for future in futures]

    if config.output_format is OutputFormat.CSV:
        sys.stdout.write("".join(render_csv(document) for document in documents))
    else:
        sys.stdout.write(render_json(documents[0] if len(documents) == 1 else documents))
    return 0


def _bench(args: argparse.Namespace) -> int:
    table = run_scaling(args.op, args.sizes, repetitions=args.reps, generator=BenchGenerator(args.generator), seed=args.seed)
    sys.stdout.write(render_json(table.to_dict()))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except HindsightError as e:
        logger.error(f"[CLI] {type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
