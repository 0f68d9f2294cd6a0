"""Comparative leaderboard tables: mean +/- std cells with best and
second-best highlighting.

Two report kinds share one renderer:

* MetricReport -- metric rows x algorithm columns, ranked within each
  row (every metric is higher-better except Speed);
* DetectionReport -- method rows x scenario-split columns (All/Day/
  Night), ranked within each column.

Rendering is a pure function of the report: markdown marks the best cell
``**bold**`` and the second best ``*italic*``; LaTeX uses red/green
color macros; CSV emits long-format numeric rows at 6 significant
digits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .detection import (
    DEFAULT_IOU_THRESHOLD,
    METHOD_IR,
    METHOD_RGB,
    load_ground_truth,
    pooled_average_precision,
)
from .errors import EmptyCell, NoAnnotatedImages, SchemaViolation
from .manifest import DatasetManifest, Scenario
from .metrics import METRIC_NAMES, SPEED
from .results import MetricRecord

FORMATS = ("markdown", "csv", "latex")

#: Metrics where smaller is better.
LOWER_BETTER = {SPEED}


@dataclass(frozen=True)
class Cell:
    mean: float
    std: float | None = None
    rank: int | None = None  # 1 = best, 2 = second best
    tie: bool = False        # rank decided by name order among equal means


@dataclass
class ReportTable:
    """Shared table shape consumed by the renderer."""

    corner: str                      # header of the row-label column
    row_labels: list[str]
    col_labels: list[str]
    cells: dict[tuple[str, str], Cell]
    value_format: str = "{:.3f}"
    show_std: bool = True


@dataclass
class MetricReport(ReportTable):
    metadata: dict = field(default_factory=dict)


@dataclass
class DetectionReport(ReportTable):
    iou_threshold: float = DEFAULT_IOU_THRESHOLD


def _rank(values: list[tuple[str, float]], lower_better: bool) -> dict[str, tuple[int | None, bool]]:
    """Assign ranks 1 and 2 over (label, mean) pairs.

    Equal means are ordered by label so ranks stay unique; such cells are
    flagged as ties.
    """
    ordered = sorted(values, key=lambda kv: (kv[1] if lower_better else -kv[1], kv[0]))
    out: dict[str, tuple[int | None, bool]] = {label: (None, False) for label, _ in values}
    means = [m for _, m in values]
    for position, (label, mean) in enumerate(ordered[:2]):
        tie = means.count(mean) > 1
        out[label] = (position + 1, tie)
    return out


def aggregate(records: list[MetricRecord], metadata: dict | None = None) -> MetricReport:
    """Aggregate per-image records into a ranked mean +/- std table.

    Every (metric, algorithm) combination observed in the store must have
    at least one record; a hole raises EmptyCell. Std is population
    (1/N), matching the SD metric's own normalization.
    """
    if not records:
        raise EmptyCell("no records to aggregate")
    algorithms = sorted({r.algorithm for r in records})
    present = {r.metric for r in records}
    row_order = [SPEED] + list(METRIC_NAMES)
    rows = [m for m in row_order if m in present]
    rows += sorted(present - set(rows))

    grouped: dict[tuple[str, str], list[float]] = {}
    for r in records:
        grouped.setdefault((r.metric, r.algorithm), []).append(r.value)

    cells: dict[tuple[str, str], Cell] = {}
    for metric in rows:
        for algo in algorithms:
            values = grouped.get((metric, algo))
            if not values:
                raise EmptyCell(f"no records for metric {metric!r}, algorithm {algo!r}")
            arr = np.asarray(values, dtype=np.float64)
            cells[(metric, algo)] = Cell(mean=float(arr.mean()),
                                         std=float(np.sqrt(np.mean((arr - arr.mean()) ** 2))))
        ranks = _rank([(a, cells[(metric, a)].mean) for a in algorithms],
                      lower_better=metric in LOWER_BETTER)
        for algo in algorithms:
            rank, tie = ranks[algo]
            c = cells[(metric, algo)]
            cells[(metric, algo)] = Cell(c.mean, c.std, rank, tie)

    return MetricReport(
        corner="Metric",
        row_labels=rows,
        col_labels=algorithms,
        cells=cells,
        metadata=metadata or {},
    )


def detection_report(
    manifest: DatasetManifest,
    detections_by_method: dict[str, dict[str, list]],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    scenario: Scenario | None = None,
) -> DetectionReport:
    """Score every method's detections into a mAP table.

    Columns are the All/Day/Night splits (restricted to splits that
    actually contain annotated pairs), or a single column when a
    specific scenario filter is given. Ranking runs within each column
    across methods.
    """
    if scenario is None:
        candidate_splits = [("All", None),
                            ("Day", Scenario.DAYTIME),
                            ("Night", Scenario.NIGHTTIME)]
    else:
        candidate_splits = [(scenario.value, scenario)]

    splits = [(label, s) for label, s in candidate_splits
              if manifest.annotated_entries(s)]
    if not splits:
        raise NoAnnotatedImages(
            "no annotated images in the selected scenario(s); nothing to score"
        )

    baseline_order = [m for m in (METHOD_IR, METHOD_RGB) if m in detections_by_method]
    methods = baseline_order + sorted(set(detections_by_method) - set(baseline_order))
    if not methods:
        raise SchemaViolation("no detection sets supplied")

    cells: dict[tuple[str, str], Cell] = {}
    for label, split_scenario in splits:
        gts = load_ground_truth(manifest, split_scenario)
        for method in methods:
            dets = {pid: detections_by_method[method].get(pid, None) for pid in gts}
            dets = {pid: d for pid, d in dets.items() if d is not None}
            curve = pooled_average_precision(dets, gts, iou_threshold)
            cells[(method, label)] = Cell(mean=curve.ap)
        ranks = _rank([(m, cells[(m, label)].mean) for m in methods], lower_better=False)
        for method in methods:
            rank, tie = ranks[method]
            c = cells[(method, label)]
            cells[(method, label)] = Cell(c.mean, None, rank, tie)

    return DetectionReport(
        corner="Method",
        row_labels=methods,
        col_labels=[label for label, _ in splits],
        cells=cells,
        value_format="{:.4f}",
        show_std=False,
        iou_threshold=iou_threshold,
    )


# --- rendering --------------------------------------------------------------

def _cell_text(table: ReportTable, cell: Cell) -> str:
    text = table.value_format.format(cell.mean)
    if table.show_std and cell.std is not None:
        text += " ± " + table.value_format.format(cell.std)
    if cell.tie and cell.rank is not None:
        text += " (tie)"
    return text


def _render_markdown(table: ReportTable) -> str:
    header = [table.corner] + list(table.col_labels)
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join(["---"] * len(header)) + "|"]
    for row in table.row_labels:
        parts = [row]
        for col in table.col_labels:
            cell = table.cells[(row, col)]
            text = _cell_text(table, cell)
            if cell.rank == 1:
                text = f"**{text}**"
            elif cell.rank == 2:
                text = f"*{text}*"
            parts.append(text)
        lines.append("| " + " | ".join(parts) + " |")
    return "\n".join(lines) + "\n"


def _render_csv(table: ReportTable) -> str:
    is_detection = isinstance(table, DetectionReport)
    row_key, col_key = (("method", "split") if is_detection else ("metric", "algorithm"))
    value_key = "map" if is_detection else "mean"
    columns = [row_key, col_key, value_key] + ([] if is_detection else ["std"]) + ["rank"]
    lines = [",".join(columns)]
    for row in table.row_labels:
        for col in table.col_labels:
            cell = table.cells[(row, col)]
            fields = [row, col, f"{cell.mean:.6g}"]
            if not is_detection:
                fields.append("" if cell.std is None else f"{cell.std:.6g}")
            fields.append("" if cell.rank is None else str(cell.rank))
            lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def _latex_escape(text: str) -> str:
    for ch in ("_", "%", "&", "#"):
        text = text.replace(ch, "\\" + ch)
    return text


def _render_latex(table: ReportTable) -> str:
    ncols = len(table.col_labels)
    lines = [
        f"\\begin{{tabular}}{{l{'c' * ncols}}}",
        "\\hline",
        " & ".join([f"\\textbf{{{_latex_escape(table.corner)}}}"]
                   + [f"\\textbf{{{_latex_escape(c)}}}" for c in table.col_labels]) + " \\\\",
        "\\hline",
    ]
    for row in table.row_labels:
        parts = [_latex_escape(row)]
        for col in table.col_labels:
            cell = table.cells[(row, col)]
            text = _cell_text(table, cell).replace("±", "$\\pm$")
            if cell.rank == 1:
                text = f"\\textcolor{{red}}{{{text}}}"
            elif cell.rank == 2:
                text = f"\\textcolor{{green}}{{{text}}}"
            parts.append(text)
        lines.append(" & ".join(parts) + " \\\\")
    lines += ["\\hline", "\\end{tabular}"]
    return "\n".join(lines) + "\n"


def render(table: ReportTable, fmt: str = "markdown") -> str:
    """Serialize a report deterministically in the requested format."""
    if fmt == "markdown":
        return _render_markdown(table)
    if fmt == "csv":
        return _render_csv(table)
    if fmt == "latex":
        return _render_latex(table)
    raise SchemaViolation(f"unknown report format {fmt!r}; expected one of {FORMATS}")
