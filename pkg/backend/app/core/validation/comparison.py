"""Model comparison tables and plain-text renderers"""

from typing import Sequence

import pandas as pd
from scipy.stats import rankdata

from app.core.exceptions import ArgumentError
from app.models.schemas import ComparisonRow, ComparisonTable, CvReport, ModelScore


def compare_models(entries: Sequence[ModelScore]) -> ComparisonTable:
    """
    Rank models by BIC (larger first), ties broken by AIC, then label.

    Ranks per criterion use competition ranking: equal values share the
    best rank. Larger BIC/AIC and smaller posterior MSE rank higher.
    """
    if len(entries) < 2:
        raise ArgumentError("Comparison needs at least two models")
    labels = [e.label for e in entries]
    if len(set(labels)) != len(labels):
        raise ArgumentError("Model labels must be unique")

    bic_rank = rankdata([-e.bic for e in entries], method="min")
    aic_rank = rankdata([-e.aic for e in entries], method="min")
    mse_rank = rankdata([e.posterior_mse for e in entries], method="min")
    rows = [
        ComparisonRow(
            **entry.model_dump(),
            bic_rank=int(bic_rank[i]),
            aic_rank=int(aic_rank[i]),
            mse_rank=int(mse_rank[i]),
        )
        for i, entry in enumerate(entries)
    ]
    rows.sort(key=lambda r: (-r.bic, -r.aic, r.label))
    return ComparisonTable(rows=rows)


def comparison_frame(table: ComparisonTable) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "Model": [r.label for r in table.rows],
            "BIC": [r.bic for r in table.rows],
            "AIC": [r.aic for r in table.rows],
            "Posterior MSE": [r.posterior_mse for r in table.rows],
            "BIC rank": [r.bic_rank for r in table.rows],
            "AIC rank": [r.aic_rank for r in table.rows],
            "MSE rank": [r.mse_rank for r in table.rows],
        }
    )


def render_comparison(table: ComparisonTable) -> str:
    """Aligned text table, best BIC first"""
    frame = comparison_frame(table)
    return frame.to_string(
        index=False,
        formatters={
            "BIC": "{:.3f}".format,
            "AIC": "{:.3f}".format,
            "Posterior MSE": "{:.3f}".format,
        },
    ) + "\n"


def render_cv_report(report: CvReport) -> str:
    """Per-node MSE followed by the mean"""
    frame = pd.DataFrame({"Node": list(report.per_node_mse), "MSE": list(report.per_node_mse.values())})
    lines = [
        f"{report.folds}-fold cross-validation ({report.mode} structure), fold seed {report.fold_seed}",
        frame.to_string(index=False, formatters={"MSE": "{:.6f}".format}),
        f"Posterior MSE: {report.posterior_mse:.6f}",
    ]
    if report.flagged:
        lines.append("Pooled-regression fallbacks:")
        lines.extend(f"  {flag}" for flag in report.flagged)
    return "\n".join(lines) + "\n"
