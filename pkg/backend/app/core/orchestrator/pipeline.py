"""Pipeline orchestrator - Coordinates the learning stages"""

import json
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from app.config.run_config import RunConfig
from app.core.analytics.report import build_report, render_markdown
from app.core.averaging.aggregate import AveragedGraph, acyclic_completion
from app.core.averaging.bootstrap import learn_averaged
from app.core.averaging.writers import averaged_dot, to_document, write_strengths
from app.core.clgbn.model import aic, bic, fit
from app.core.clgbn.serialization import to_document as fit_document
from app.core.data.preprocessing import PreprocessResult, preprocess
from app.core.data.table import MixedTable, read_table
from app.core.exceptions import ArgumentError, SchemaError
from app.core.graph.dag import Dag
from app.core.graph.dot import domain_colors, to_dot
from app.core.orchestrator.artifacts import (
    PreprocessDocument,
    RunSummary,
    StructureDocument,
    prepare_output,
    read_structure,
    write_json,
)
from app.core.search.constraints import (
    ConstraintSet,
    read_blacklist,
    read_domain_map,
    read_whitelist,
    strategy1_blacklist,
    strategy2_whitelist,
)
from app.core.search.hill_climb import hill_climb
from app.core.validation.comparison import compare_models, render_comparison, render_cv_report
from app.core.validation.cross_validation import LearningSpec, cross_validate
from app.models.schemas import (
    ComparisonTable,
    CvConfig,
    CvReport,
    ModelScore,
    NetworkReport,
    SearchTrace,
)

logger = logging.getLogger(__name__)


class PipelineOrchestrator:
    """
    Runs each pipeline stage from a resolved run configuration.

    Stages:
    1. preprocess - impute and normalize a raw table
    2. learn - one Hill-Climbing run
    3. average - bootstrap model averaging
    4. analyze - structural report of a learned network
    5. cross_validate - posterior MSE of a fixed or relearned structure
    6. compare - BIC/AIC/MSE table over several run directories

    Every stage writes its artifacts, each embedding the resolved
    configuration and its digest, and returns the in-memory result.
    """

    # === Inputs
    def load_table(self, cfg: RunConfig, require_complete: bool = False) -> MixedTable:
        """Read the data file, apply recodes and drops"""
        if not cfg.data.path:
            raise ArgumentError("No data file: set [data] path or pass --data")
        if not cfg.schema_:
            raise ArgumentError("The run file declares no [schema]")
        table = read_table(Path(cfg.data.path), cfg.schema_, cfg.data.sentinel, cfg.data.percentage)
        for column, mapping in cfg.recode.items():
            table = table.recode(column, mapping)
        if cfg.data.drop:
            table = table.drop(cfg.data.drop)
        if require_complete and not table.is_complete:
            holes = [c for c, n in table.missing_mask.sum().items() if n]
            raise SchemaError(
                f"{table.n_missing} missing cells in {holes}; run the preprocess stage first",
                columns=holes,
            )
        return table

    def build_constraints(self, cfg: RunConfig, table: MixedTable) -> ConstraintSet:
        """Strategy constraints plus the blacklist/whitelist files"""
        section = cfg.constraints
        denied = read_blacklist(Path(section.blacklist)) if section.blacklist else []
        if section.strategy == 2:
            if not section.domains:
                raise ArgumentError("Strategy 2 needs a domain map ([constraints] domains)")
            constraints = strategy2_whitelist(table.nodes, read_domain_map(Path(section.domains)), denied)
        elif section.strategy == 1:
            constraints = strategy1_blacklist(table.nodes, denied)
        else:
            constraints = ConstraintSet(blacklist=frozenset(denied))
        if section.whitelist:
            constraints = constraints.merge(read_whitelist(Path(section.whitelist)))
        constraints.validate(table.nodes)
        return constraints

    def domain_map(self, cfg: RunConfig) -> Optional[dict]:
        return read_domain_map(Path(cfg.constraints.domains)) if cfg.constraints.domains else None

    # === Stages
    def preprocess(self, cfg: RunConfig, out: Path) -> PreprocessResult:
        table = self.load_table(cfg)
        result = preprocess(table, cfg.preprocess.transforms, cfg.preprocess.k, workers=cfg.run.workers)
        out = prepare_output(out, cfg)
        result.table.to_csv(out / "cleaned.csv", cfg.data.sentinel)
        report = PreprocessDocument(transforms=list(result.transforms.values()), imputation=result.imputation)
        write_json(out / "preprocess.json", report, cfg)
        logger.info(f"Preprocessed {table.n_rows} rows; {result.imputation.cells_imputed} cells imputed")
        return result

    def learn(self, cfg: RunConfig, out: Path) -> Tuple[Dag, SearchTrace]:
        table = self.load_table(cfg, require_complete=True)
        constraints = self.build_constraints(cfg, table)
        dag, trace = hill_climb(table, constraints, cfg.search)
        out = prepare_output(out, cfg)
        write_json(out / "dag.json", StructureDocument(nodes=list(dag.nodes), edges=dag.edges, trace=trace), cfg)
        (out / "dag.dot").write_text(to_dot(dag, name=cfg.run.label, comment=_stamp(cfg)))
        self._summarize(cfg, dag, table, out, structure="hill-climbing")
        logger.info(f"Learned {dag.num_edges} edges, score {trace.final_score:.4f}")
        return dag, trace

    def average(self, cfg: RunConfig, out: Path) -> AveragedGraph:
        table = self.load_table(cfg, require_complete=True)
        constraints = self.build_constraints(cfg, table)
        averaged = learn_averaged(table, constraints, cfg.search, cfg.averaging, workers=cfg.run.workers)
        out = prepare_output(out, cfg)
        write_strengths(averaged, out / "strengths.csv")
        write_json(out / "averaged.json", to_document(averaged), cfg)
        domains = self.domain_map(cfg)
        colors = domain_colors(domains) if domains else None
        (out / "averaged.dot").write_text(averaged_dot(averaged, node_colors=colors, comment=_stamp(cfg)))
        self._summarize(cfg, acyclic_completion(averaged), table, out, structure="averaged (acyclic completion)")
        return averaged

    def analyze(self, cfg: RunConfig, network: Path, out: Path) -> NetworkReport:
        graph = read_structure(network)
        domains = self.domain_map(cfg)
        report = build_report(graph, domain_map=domains)
        out = prepare_output(out, cfg)
        (out / "report.md").write_text(render_markdown(report))
        write_json(out / "report.json", report, cfg)
        pdag = graph.pdag if isinstance(graph, AveragedGraph) else graph
        colors = domain_colors(domains) if domains else None
        (out / "network.dot").write_text(to_dot(pdag, name=cfg.run.label, node_colors=colors, comment=_stamp(cfg)))
        return report

    def cross_validate(self, cfg: RunConfig, out: Path, structure: Optional[Path] = None) -> CvReport:
        table = self.load_table(cfg, require_complete=True)
        if structure is not None:
            graph = read_structure(structure)
            model = acyclic_completion(graph) if isinstance(graph, AveragedGraph) else graph
        elif cfg.cv.relearn:
            model = LearningSpec(
                constraints=self.build_constraints(cfg, table),
                search=cfg.search,
                averaging=cfg.averaging,
                average_in_cv=cfg.cv.average_in_cv,
            )
        else:
            raise ArgumentError("Pass a structure file or set [cv] relearn = true")
        cv_cfg = CvConfig(folds=cfg.cv.folds, seed=cfg.cv.seed, standardize=cfg.cv.standardize)
        report = cross_validate(table, model, cv_cfg, workers=cfg.run.workers)
        out = prepare_output(out, cfg)
        write_json(out / "cv_report.json", report, cfg)
        (out / "cv_report.txt").write_text(render_cv_report(report))
        return report

    def compare(self, runs: Sequence[Path], out: Path) -> ComparisonTable:
        """Rank run directories that hold summary.json and cv_report.json"""
        entries: List[ModelScore] = []
        for directory in map(Path, runs):
            summary = RunSummary.model_validate(_read(directory / "summary.json"))
            cv = CvReport.model_validate(_read(directory / "cv_report.json"))
            entries.append(
                ModelScore(label=summary.label, bic=summary.bic, aic=summary.aic, posterior_mse=cv.posterior_mse)
            )
        table = compare_models(entries)
        out = prepare_output(out)
        (out / "comparison.txt").write_text(render_comparison(table))
        write_json(out / "comparison.json", table)
        return table

    def _summarize(self, cfg: RunConfig, dag: Dag, table: MixedTable, out: Path, structure: str) -> RunSummary:
        fitted = fit(dag, table, strict=False)
        summary = RunSummary(
            label=cfg.run.label,
            loglik=fitted.loglik,
            bic=bic(fitted),
            aic=aic(fitted),
            n_params=fitted.n_params,
            n_obs=fitted.n_obs,
            structure=structure,
            fit_warnings=fitted.warnings,
        )
        write_json(out / "summary.json", summary, cfg)
        write_json(out / "model.json", fit_document(fitted), cfg)
        return summary


def _stamp(cfg: RunConfig) -> str:
    return f"{cfg.run.label}: config digest {cfg.digest()}"


def _read(path: Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ArgumentError(f"Missing run artifact {path}") from exc


# Singleton instance
orchestrator = PipelineOrchestrator()
