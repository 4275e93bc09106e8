"""Join per-sample metric values across reports and correlate them pairwise."""

import csv
import io
from collections.abc import Mapping, Sequence

from pydantic import BaseModel

from core import MetricInputError, MetricReport
from metrics import CorrelationResult, pearson_linfit


class JoinedTable(BaseModel):
    columns: list[str]
    ids: list[int]
    rows: list[list[float]]

    def column(self, name: str) -> list[float]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["id", *self.columns])
        for sample_id, row in zip(self.ids, self.rows, strict=True):
            writer.writerow([sample_id, *(repr(v) for v in row)])
        return buffer.getvalue()


class TraceResult(BaseModel):
    correlations: list[CorrelationResult]
    table: JoinedTable


def name_reports(reports: Sequence[MetricReport]) -> dict[str, MetricReport]:
    named: dict[str, MetricReport] = {}
    for report in reports:
        if report.metric_name in named:
            raise MetricInputError(f"two reports are named '{report.metric_name}'; name them explicitly")
        named[report.metric_name] = report
    return named


def join_reports(reports: Mapping[str, MetricReport], columns: Sequence[str]) -> JoinedTable:
    """Inner join on sample id, keeping ids whose value is defined in every column."""
    for name in columns:
        if name not in reports:
            raise MetricInputError(f"no report named '{name}'; available: {sorted(reports)}")
    defined = [reports[name].defined() for name in columns]
    shared = set(defined[0])
    for values in defined[1:]:
        shared &= set(values)
    if not shared:
        raise MetricInputError(f"empty join: reports {list(columns)} share no sample with defined values")
    ids = sorted(shared)
    return JoinedTable(columns=list(columns), ids=ids, rows=[[values[i] for values in defined] for i in ids])


def trace_errors(
    reports: Sequence[MetricReport] | Mapping[str, MetricReport], joins: Sequence[tuple[str, str]]
) -> TraceResult:
    """Correlate each requested (x, y) pair of reports over their common samples."""
    named = dict(reports) if isinstance(reports, Mapping) else name_reports(reports)
    if not joins:
        raise MetricInputError("trace needs at least one report pair")
    columns = list(dict.fromkeys(name for pair in joins for name in pair))
    table = join_reports(named, columns)
    correlations = [pearson_linfit(table.column(x), table.column(y), x_name=x, y_name=y) for x, y in joins]
    return TraceResult(correlations=correlations, table=table)
