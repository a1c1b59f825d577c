"""Command-line front end: python -m app <subcommand>"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from app import __version__
from app.config import settings
from app.config.run_config import RunConfig, load_run_config
from app.core.exceptions import ArgumentError, ToolkitError
from app.core.orchestrator import orchestrator

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """Usage errors raise instead of exiting so main() owns the exit code"""

    def error(self, message: str):
        raise ArgumentError(f"{self.prog}: {message}")


def _add_run_options(parser: argparse.ArgumentParser, seeds: bool = True) -> None:
    parser.add_argument("--config", type=Path, required=True, help="Run file (INI sections)")
    parser.add_argument("--out", type=Path, required=True, help="Artifact directory")
    parser.add_argument("--data", help="Data CSV (overrides [data] path)")
    parser.add_argument("--label", help="Run label (overrides [run] label)")
    parser.add_argument("--workers", type=int, help="Worker threads for replicates, folds and columns")
    if seeds:
        parser.add_argument("--seed", type=int, help="Seed for search, resampling and folds")


def _add_constraint_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--strategy", type=int, choices=(1, 2), help="Prior-knowledge encoding")
    parser.add_argument("--blacklist", help="File of 'from,to' lines")
    parser.add_argument("--whitelist", help="File of 'a,b' or 'a->b' lines")
    parser.add_argument("--domains", help="File of 'indicator,domain' lines")
    parser.add_argument("--restarts", type=int, help="Hill-Climbing random restarts")
    parser.add_argument("--score", choices=("bic", "aic"), help="Network score")
    parser.add_argument("--max-parents", type=int, help="Cap on parents per node")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hybridbn", description="Hybrid Bayesian network learning toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("preprocess", help="Impute missing cells and normalize continuous columns")
    _add_run_options(p, seeds=False)
    p.add_argument("--k", type=int, help="KNN neighbours")

    p = sub.add_parser("learn", help="Single Hill-Climbing run")
    _add_run_options(p)
    _add_constraint_options(p)

    p = sub.add_parser("average", help="Bootstrap model averaging")
    _add_run_options(p)
    _add_constraint_options(p)
    p.add_argument("--replicates", type=int, help="Bootstrap replicates")
    p.add_argument("--strength-threshold", type=float, help="Minimum arc strength")
    p.add_argument("--direction-threshold", type=float, help="Minimum direction confidence")

    p = sub.add_parser("analyze", help="Structural report of a learned network")
    _add_run_options(p, seeds=False)
    p.add_argument("--domains", help="File of 'indicator,domain' lines")
    p.add_argument("--network", type=Path, required=True, help="dag.json or averaged.json")

    p = sub.add_parser("cv", help="k-fold cross-validated posterior MSE")
    _add_run_options(p)
    _add_constraint_options(p)
    p.add_argument("--structure", type=Path, help="Fixed structure (dag.json or averaged.json)")
    p.add_argument("--folds", type=int, help="Number of folds")
    p.add_argument("--relearn", action="store_true", default=None, help="Relearn the structure per fold")
    p.add_argument("--standardize", action="store_true", default=None, help="z-score with training-fold statistics")

    p = sub.add_parser("compare", help="Rank run directories by BIC, AIC and posterior MSE")
    p.add_argument("runs", nargs="+", type=Path, help="Run directories")
    p.add_argument("--out", type=Path, required=True, help="Artifact directory")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Load the run file and apply flag overrides"""
    cfg = load_run_config(args.config)
    flag = lambda name: getattr(args, name, None)  # noqa: E731
    seed = flag("seed")
    return cfg.with_overrides(
        {
            "data.path": flag("data"),
            "run.label": flag("label"),
            "run.workers": flag("workers"),
            "preprocess.k": flag("k"),
            "constraints.strategy": flag("strategy"),
            "constraints.blacklist": flag("blacklist"),
            "constraints.whitelist": flag("whitelist"),
            "constraints.domains": flag("domains"),
            "search.restarts": flag("restarts"),
            "search.score": flag("score"),
            "search.max_parents": flag("max_parents"),
            "search.seed": seed,
            "averaging.seed": seed,
            "averaging.replicates": flag("replicates"),
            "averaging.strength_threshold": flag("strength_threshold"),
            "averaging.direction_threshold": flag("direction_threshold"),
            "cv.seed": seed,
            "cv.folds": flag("folds"),
            "cv.relearn": flag("relearn"),
            "cv.standardize": flag("standardize"),
        }
    )


def run(args: argparse.Namespace) -> None:
    if args.command == "compare":
        table = orchestrator.compare(args.runs, args.out)
        print(f"Compared {len(table.rows)} runs; best BIC: {table.rows[0].label}")
        return

    cfg = resolve_config(args)
    if args.command == "preprocess":
        result = orchestrator.preprocess(cfg, args.out)
        print(f"Imputed {result.imputation.cells_imputed} cells; wrote {args.out / 'cleaned.csv'}")
    elif args.command == "learn":
        dag, trace = orchestrator.learn(cfg, args.out)
        print(f"Learned {dag.num_edges} edges (score {trace.final_score:.4f})")
    elif args.command == "average":
        averaged = orchestrator.average(cfg, args.out)
        print(
            f"Averaged {averaged.replicates} replicates: "
            f"{len(averaged.pdag.directed_edges)} directed, {len(averaged.pdag.undirected_edges)} undirected edges"
        )
    elif args.command == "analyze":
        report = orchestrator.analyze(cfg, args.network, args.out)
        print(f"{report.directed_edges} directed edges, {len(report.components)} components")
    elif args.command == "cv":
        report = orchestrator.cross_validate(cfg, args.out, structure=args.structure)
        print(f"Posterior MSE: {report.posterior_mse:.6f}")


def main(argv: Optional[List[str]] = None) -> int:
    """Parse, run and map failures to exit codes (1 usage, 2 data, 3 numerical)"""
    try:
        args = build_parser().parse_args(argv)
    except ToolkitError as exc:
        print(exc, file=sys.stderr)
        return exc.exit_code

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        run(args)
    except ToolkitError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exc.exit_code
    except OSError as exc:
        logger.error(f"I/O error: {exc}")
        return EXIT_DATA
    return EXIT_OK
