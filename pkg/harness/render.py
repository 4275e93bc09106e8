"""SVG charts and CSV series for metric reports, rendered from jinja2 templates."""

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal

from jinja2 import Environment, FileSystemLoader, Template, select_autoescape

from core import MetricInputError, MetricReport, RenderError, atomic_write_text
from metrics import histogram, pearson_linfit

from .trace import join_reports, name_reports

ChartKind = Literal["histogram", "scatter", "grid-heatmap", "line"]
CHART_KINDS: tuple[str, ...] = ("histogram", "scatter", "grid-heatmap", "line")
TEMPLATE_DIR = Path(__file__).parent / "templates"

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 60
PLOT_W, PLOT_H = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
DEFAULT_HISTOGRAM_BINS = 16
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def fmt(value: float) -> str:
    return f"{value:.2f}"


def tick_label(value: float) -> str:
    return f"{value:.4g}"


class ChartTemplate:
    def __init__(self, env: Environment, template: Template, source_path: Path | None = None):
        """Private constructor - use from_file() instead"""
        self.env = env
        self.template = template
        self._source_path = source_path

    @staticmethod
    def _environment(loader: FileSystemLoader) -> Environment:
        env = Environment(
            loader=loader,
            autoescape=select_autoescape(enabled_extensions=("svg", "svg.j2")),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )
        env.filters["fmt"] = fmt
        env.filters["tick"] = tick_label
        return env

    @classmethod
    def from_file(cls, path: str | Path) -> "ChartTemplate":
        path = Path(path)
        if not path.exists():
            raise RenderError(f"Template file not found: {path}")
        env = cls._environment(FileSystemLoader(str(path.parent)))
        try:
            template = env.get_template(path.name)
        except Exception as e:
            raise RenderError(f"Failed to load template from {path}: {e}") from e
        return cls(env=env, template=template, source_path=path)

    def render(self, **context: Any) -> str:
        layout = {"width": WIDTH, "height": HEIGHT, "left": LEFT, "top": TOP, "plot_w": PLOT_W, "plot_h": PLOT_H}
        return self.template.render(**layout, **context)

    def __repr__(self) -> str:
        return f"ChartTemplate(from_file={self._source_path})"


@dataclass(frozen=True)
class RenderedChart:
    kind: str
    svg: str
    csv: str

    def write(self, stem: str | Path) -> tuple[Path, Path]:
        stem = Path(stem)
        svg_path, csv_path = stem.with_suffix(".svg"), stem.with_suffix(".csv")
        atomic_write_text(svg_path, self.svg)
        atomic_write_text(csv_path, self.csv)
        return svg_path, csv_path


class Scale:
    """Linear map from a data range onto a pixel span; a zero-width range is widened by one unit."""

    def __init__(self, lo: float, hi: float, start: float, span: float, invert: bool = False):
        if hi == lo:
            lo, hi = lo - 0.5, hi + 0.5
        self.lo, self.hi, self.start, self.span, self.invert = lo, hi, start, span, invert

    def __call__(self, value: float) -> float:
        fraction = (value - self.lo) / (self.hi - self.lo)
        return self.start + (1.0 - fraction if self.invert else fraction) * self.span

    def ticks(self, count: int = 5) -> list[tuple[float, str]]:
        step = (self.hi - self.lo) / (count - 1)
        return [(self(self.lo + k * step), tick_label(self.lo + k * step)) for k in range(count)]


def _axes(xs: Sequence[float], ys: Sequence[float]) -> tuple[Scale, Scale]:
    return Scale(min(xs), max(xs), LEFT, PLOT_W), Scale(min(ys), max(ys), TOP, PLOT_H, invert=True)


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    def cell(value: Any) -> str:
        return repr(value) if isinstance(value, float) else str(value)

    return "".join(",".join(cell(v) for v in row) + "\n" for row in [header, *rows])


def _render_histogram(reports: Sequence[MetricReport], title: str) -> RenderedChart:
    report = reports[0]
    if report.histograms:
        hist = report.histograms[0]
    else:
        values = list(report.defined().values())
        if not values:
            raise RenderError(f"report '{report.metric_name}' has no per-sample values to histogram")
        hist = histogram(values, DEFAULT_HISTOGRAM_BINS, label=report.metric_name)
    x = Scale(hist.lo, hi=hist.hi, start=LEFT, span=PLOT_W)
    y = Scale(0.0, max(max(hist.counts), 1), TOP, PLOT_H, invert=True)
    bars = [
        {"x": x(lo), "y": y(count), "w": x(hi) - x(lo), "h": y(0.0) - y(count), "count": count}
        for lo, hi, count in zip(hist.edges, hist.edges[1:], hist.counts, strict=False)
    ]
    svg = ChartTemplate.from_file(TEMPLATE_DIR / "histogram.svg.j2").render(
        title=title,
        x_label=hist.label or report.metric_name,
        y_label="count",
        x_ticks=x.ticks(),
        y_ticks=y.ticks(),
        bars=bars,
    )
    rows = [[lo, hi, count] for lo, hi, count in zip(hist.edges, hist.edges[1:], hist.counts, strict=False)]
    return RenderedChart("histogram", svg, _csv(["bin_lo", "bin_hi", "count"], rows))


def _render_scatter(reports: Sequence[MetricReport], title: str) -> RenderedChart:
    if len(reports) == 1:
        values = reports[0].defined()
        if not values:
            raise RenderError(f"report '{reports[0].metric_name}' has no per-sample values")
        ids, xs, ys = list(values), [float(i) for i in values], list(values.values())
        x_label, y_label = "sample id", reports[0].metric_name
    elif len(reports) == 2:
        try:
            named = name_reports(reports)
            x_label, y_label = reports[0].metric_name, reports[1].metric_name
            table = join_reports(named, [x_label, y_label])
        except MetricInputError as e:
            raise RenderError(str(e)) from e
        ids, xs, ys = table.ids, table.column(x_label), table.column(y_label)
    else:
        raise RenderError(f"scatter takes one or two reports, got {len(reports)}")
    x, y = _axes(xs, ys)
    points = [{"x": x(a), "y": y(b)} for a, b in zip(xs, ys, strict=True)]
    fit_line = None
    if len(reports) == 2:
        try:
            fit = pearson_linfit(xs, ys, x_label, y_label)
        except MetricInputError:
            fit = None
        if fit is not None:
            lo, hi = min(xs), max(xs)
            fit_line = {
                "x1": x(lo),
                "y1": y(fit.intercept + fit.slope * lo),
                "x2": x(hi),
                "y2": y(fit.intercept + fit.slope * hi),
                "r": fit.pearson_r,
            }
    svg = ChartTemplate.from_file(TEMPLATE_DIR / "scatter.svg.j2").render(
        title=title,
        x_label=x_label,
        y_label=y_label,
        x_ticks=x.ticks(),
        y_ticks=y.ticks(),
        points=points,
        fit_line=fit_line,
    )
    rows = [[i, a, b] for i, a, b in zip(ids, xs, ys, strict=True)]
    return RenderedChart("scatter", svg, _csv(["id", x_label, y_label], rows))


def _render_heatmap(reports: Sequence[MetricReport], title: str) -> RenderedChart:
    grid = reports[0].grid
    if grid is None:
        raise RenderError(f"report '{reports[0].metric_name}' carries no grid for a heatmap")
    if not grid.counts:
        raise RenderError("grid has no lead frames")
    n_leads, n_bins = len(grid.counts), grid.n_bins
    cell_w, cell_h = PLOT_W / n_bins, PLOT_H / n_leads
    peak = max(max(row) for row in grid.counts) or 1
    cells = [
        {
            "x": LEFT + b * cell_w,
            "y": TOP + lead * cell_h,
            "w": cell_w,
            "h": cell_h,
            "opacity": count / peak,
            "count": count,
        }
        for lead, row in enumerate(grid.counts)
        for b, count in enumerate(row)
    ]
    x_ticks = [(LEFT + (b + 0.5) * cell_w, str(b)) for b in range(0, n_bins, max(1, n_bins // 10))]
    y_ticks = [(TOP + (lead + 0.5) * cell_h, str(lead)) for lead in range(0, n_leads, max(1, n_leads // 10))]
    svg = ChartTemplate.from_file(TEMPLATE_DIR / "heatmap.svg.j2").render(
        title=title,
        x_label=f"CSI bin (width {grid.step:g})",
        y_label="lead time",
        x_ticks=x_ticks,
        y_ticks=y_ticks,
        cells=cells,
    )
    rows = [[lead, b, count] for lead, row in enumerate(grid.counts) for b, count in enumerate(row)]
    return RenderedChart("grid-heatmap", svg, _csv(["lead", "bin", "count"], rows))


def _render_line(reports: Sequence[MetricReport], title: str) -> RenderedChart:
    series = []
    for report in reports:
        values = report.defined()
        if not values:
            raise RenderError(f"report '{report.metric_name}' has no per-sample values")
        series.append((report.metric_name, list(values.items())))
    xs = [float(i) for _, points in series for i, _ in points]
    ys = [v for _, points in series for _, v in points]
    x, y = _axes(xs, ys)
    lines = [
        {
            "name": name,
            "color": PALETTE[k % len(PALETTE)],
            "points": " ".join(f"{fmt(x(i))},{fmt(y(v))}" for i, v in points),
        }
        for k, (name, points) in enumerate(series)
    ]
    svg = ChartTemplate.from_file(TEMPLATE_DIR / "line.svg.j2").render(
        title=title,
        x_label="sample id",
        y_label="value",
        x_ticks=x.ticks(),
        y_ticks=y.ticks(),
        lines=lines,
    )
    rows = [[name, i, v] for name, points in series for i, v in points]
    return RenderedChart("line", svg, _csv(["series", "id", "value"], rows))


RENDERERS = {
    "histogram": _render_histogram,
    "scatter": _render_scatter,
    "grid-heatmap": _render_heatmap,
    "line": _render_line,
}


def render_report(reports: Sequence[MetricReport], kind: ChartKind, title: str | None = None) -> RenderedChart:
    if kind not in RENDERERS:
        raise RenderError(f"unknown chart kind '{kind}'; expected one of {list(CHART_KINDS)}")
    if not reports:
        raise RenderError("nothing to render")
    if kind != "grid-heatmap" and not any(report.per_sample or report.histograms for report in reports):
        raise RenderError("reports have no per-sample values")
    return RENDERERS[kind](reports, title or " vs ".join(r.metric_name for r in reports))
