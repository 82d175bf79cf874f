"""Aggregate result tables and their CSV / markdown renderings.

Tables are plain row-label + float-cell grids. A missing cell (no
observations) stays None and renders as an em dash in markdown and an
empty field in CSV. Score tables show two decimals, rubric tables four;
rounding happens only at render time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .judge import DIMENSIONS
from .prompts import StrategyId

#: Column order for metric tables.
METRIC_ORDER = ("complexity", "fluency", "grammar", "readability")

STRATEGY_ORDER = tuple(s.value for s in StrategyId)

AVERAGE_LABEL = "Average"
GRAND_LABEL = "Grand Avg"


@dataclass
class Table:
    title: str
    row_header: str
    columns: list[str]
    rows: list[tuple[str, list[Optional[float]]]] = field(default_factory=list)
    decimals: int = 2

    def cell(self, row_label: str, column: str) -> Optional[float]:
        col = self.columns.index(column)
        for label, cells in self.rows:
            if label == row_label:
                return cells[col]
        raise KeyError(row_label)


def _mean(values: list[float]) -> Optional[float]:
    return sum(values) / len(values) if values else None


def _build_table(
    title: str,
    row_header: str,
    records: Iterable[dict],
    row_order: list[str],
    row_of: Callable[[dict], str],
    columns: list[tuple[str, Callable[[dict], Optional[float]]]],
    summary_label: str,
    decimals: int,
) -> Table:
    buckets: dict[str, list[list[float]]] = {
        row: [[] for _ in columns] for row in row_order
    }
    for rec in records:
        row = row_of(rec)
        if row not in buckets:
            continue
        for i, (_, value_of) in enumerate(columns):
            value = value_of(rec)
            if value is not None:
                buckets[row][i].append(float(value))

    rows: list[tuple[str, list[Optional[float]]]] = [
        (row, [_mean(cells) for cells in buckets[row]]) for row in row_order
    ]
    # summary row: unweighted mean of the row cells, per column
    summary = [
        _mean([cells[i] for _, cells in rows if cells[i] is not None])
        for i in range(len(columns))
    ]
    rows.append((summary_label, summary))
    return Table(
        title=title,
        row_header=row_header,
        columns=[key for key, _ in columns],
        rows=rows,
        decimals=decimals,
    )


def _models_in(records: list[dict]) -> list[str]:
    return sorted({rec["model"] for rec in records})


def _present_strategies(records: list[dict]) -> list[str]:
    present = {rec["strategy"] for rec in records}
    ordered = [s for s in STRATEGY_ORDER if s in present]
    return ordered + sorted(present - set(STRATEGY_ORDER))


def _metric_columns(models: list[str]):
    columns = []
    for metric in METRIC_ORDER:
        for model in models:
            def value_of(rec, metric=metric, model=model):
                if rec["model"] != model:
                    return None
                return rec["scores"].get(metric)

            columns.append((f"{metric}:{model}", value_of))
    return columns


def strategy_metric_table(records: list[dict]) -> Table:
    """Mean automated scores by strategy, with an Average summary row."""
    records = list(records)
    return _build_table(
        title="Automated scores by strategy",
        row_header="strategy",
        records=records,
        row_order=_present_strategies(records),
        row_of=lambda rec: rec["strategy"],
        columns=_metric_columns(_models_in(records)),
        summary_label=AVERAGE_LABEL,
        decimals=2,
    )


def per_qt_metric_tables(records: list[dict]) -> dict[str, Table]:
    """One strategy table per question type present in the records."""
    records = list(records)
    tables: dict[str, Table] = {}
    for qt in sorted({rec["qt"] for rec in records}, key=lambda v: (len(v), v)):
        subset = [rec for rec in records if rec["qt"] == qt]
        table = strategy_metric_table(subset)
        table.title = f"Automated scores by strategy, {qt} only"
        tables[qt] = table
    return tables


def rubric_table(records: list[dict]) -> Table:
    """Mean rubric flags and totals by strategy; unscored records are
    skipped (they carry no verdict, not a zero)."""
    records = [rec for rec in records if rec.get("scores")]
    models = _models_in(records)
    columns = []
    for dim in DIMENSIONS + ("total",):
        for model in models:
            def value_of(rec, dim=dim, model=model):
                if rec["model"] != model:
                    return None
                if dim == "total":
                    return rec["total"]
                return rec["scores"].get(dim)

            columns.append((f"{dim}:{model}", value_of))
    return _build_table(
        title="Rubric verdicts by strategy",
        row_header="strategy",
        records=records,
        row_order=_present_strategies(records),
        row_of=lambda rec: rec["strategy"],
        columns=columns,
        summary_label=GRAND_LABEL,
        decimals=4,
    )


# ---------------------------------------------------------------------------
# Rendering


def _format_cell(value: Optional[float], decimals: int, missing: str) -> str:
    if value is None:
        return missing
    return f"{value:.{decimals}f}"


def export_csv(table: Table) -> str:
    lines = [",".join([table.row_header, *table.columns])]
    for label, cells in table.rows:
        rendered = [_format_cell(c, table.decimals, "") for c in cells]
        lines.append(",".join([label, *rendered]))
    return "\n".join(lines) + "\n"


def export_markdown(table: Table) -> str:
    header = [table.row_header, *table.columns]
    lines = [
        f"### {table.title}",
        "",
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    for label, cells in table.rows:
        rendered = [_format_cell(c, table.decimals, "—") for c in cells]
        lines.append("| " + " | ".join([label, *rendered]) + " |")
    return "\n".join(lines) + "\n"
