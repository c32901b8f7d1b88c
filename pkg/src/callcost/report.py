"""Tables, CSV files, plot data and run metadata for benchmark results."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from .bench import ComparisonResult, Measurement, ScalingFit, ScalingPoint, fit_points
from .kernels import Form, KernelId, Model

UNITS = {"ns": 1.0, "us": 1e3, "ms": 1e6}
UNIT_LABELS = {"ns": "nanoseconds", "us": "microseconds", "ms": "milliseconds"}

RAW_HEADER = ["model", "form", "repetition", "time_ns", "weight_count", "factor"]
SUMMARY_HEADER = ["model", "factor", "element_count", "inline_mean_ns", "call_mean_ns",
                  "overhead_pct", "per_call_ns"]
PLOT_HEADER = ["element_count", "inline_mean", "call_mean"]

MODEL_TITLES = {
    Model.TFIDF: "Basic tf-idf",
    Model.BM25: "BM25",
    Model.BM25_MODIFIED: "Modified BM25",
}


def fmt4(value: float) -> str:
    return f"{value:.4f}"


def fmt_pct(value: float) -> str:
    return f"{value:.2f} %"


@dataclass
class Table:
    title: str
    header: list[str]
    rows: list[list[str]]

    def to_markdown(self) -> str:
        lines = [f"**{self.title}**", "",
                 "| " + " | ".join(self.header) + " |",
                 "|" + "|".join("---" for _ in self.header) + "|"]
        lines += ["| " + " | ".join(row) + " |" for row in self.rows]
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        writer.writerows(self.rows)
        return buf.getvalue()


def render_comparison_table(result: ComparisonResult, unit: str = "us") -> Table:
    """Two rows, inline and call: one cell per repetition, then Average and Overhead."""
    scale = UNITS[unit]
    reps = max(len(result.inline.times), len(result.call.times))
    header = [""] + [f"Repetition {i + 1}" for i in range(reps)] + ["Average", "Overhead"]

    def row(label, m: Measurement, overhead: str):
        cells = [fmt4(t / scale) for t in m.times]
        cells += [""] * (reps - len(cells))
        return [label] + cells + [fmt4(m.mean / scale), overhead]

    title = (f"{MODEL_TITLES[result.model]}, x{result.factor}: execution time in "
             f"{UNIT_LABELS[unit]}")
    if result.element_count:
        title += f" ({result.element_count} words)"
    return Table(title, header, [
        row("Inline code", result.inline, ""),
        row("Function call", result.call, fmt_pct(result.overhead_pct)),
    ])


@dataclass
class ReportDocument:
    title: str
    tables: list[Table] = field(default_factory=list)
    plot_series: list = field(default_factory=list)  # (label, [(x, y), ...])
    notes: list[str] = field(default_factory=list)

    def to_markdown(self) -> str:
        parts = [f"# {self.title}"]
        parts += [t.to_markdown() for t in self.tables]
        for label, pts in self.plot_series:
            lines = [f"**{label}**", "", "| x | y |", "|---|---|"]
            lines += [f"| {x} | {fmt4(y)} |" for x, y in pts]
            parts.append("\n".join(lines))
        if self.notes:
            parts.append("\n".join(f"- {n}" for n in self.notes))
        return "\n\n".join(parts) + "\n"


def build_report(results, unit: str = "us", title: str = "Subroutine call overhead") -> ReportDocument:
    results = list(results)
    doc = ReportDocument(title, [render_comparison_table(r, unit) for r in results])
    for r in results:
        doc.notes.append(f"{r.model.value} x{r.factor}: {r.weight_count} weights, "
                         f"per-call cost {r.per_call_cost:.2f} ns")
    return doc


# -- raw and summary CSV ------------------------------------------------------

def raw_rows(results):
    for r in results:
        for m, form in ((r.inline, Form.INLINE), (r.call, Form.CALL)):
            for i, t in enumerate(m.times, 1):
                yield [r.model.value, form.value, i, t, r.weight_count, r.factor]


def write_raw_csv(results, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RAW_HEADER)
        writer.writerows(raw_rows(results))


def _num(text: str):
    value = float(text)
    return int(value) if value.is_integer() and "." not in text else value


def read_raw_csv(path) -> list[ComparisonResult]:
    """Rebuild comparison results from a raw CSV, in first-appearance order."""
    groups: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RAW_HEADER:
            raise ValueError(f"{path}: expected header {','.join(RAW_HEADER)}")
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            try:
                model, form = Model(row[0]), Form(row[1])
                rep, t, count, factor = int(row[2]), _num(row[3]), int(row[4]), int(row[5])
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}:{lineno}: bad raw row {row!r}") from exc
            g = groups.setdefault((model, factor), {"count": count, Form.INLINE: [], Form.CALL: []})
            g[form].append((rep, t))
    results = []
    for (model, factor), g in groups.items():
        ms = {}
        for form in Form:
            times = [t for _, t in sorted(g[form])]
            ms[form] = Measurement.from_times(KernelId(model, form), times)
        results.append(ComparisonResult.build(model, ms[Form.INLINE], ms[Form.CALL],
                                              g["count"], factor=factor))
    return results


def summary_rows(results):
    for r in results:
        yield [r.model.value, r.factor, r.element_count, repr(r.inline.mean),
               repr(r.call.mean), f"{r.overhead_pct:.4f}", f"{r.per_call_cost:.4f}"]


def write_summary_csv(results, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        writer.writerows(summary_rows(results))


def write_metadata(path, metadata: dict) -> None:
    Path(path).write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- plot data ----------------------------------------------------------------

def _fit_line(label: str, fit: ScalingFit) -> str:
    return (f"#fit form={label} slope={fit.slope!r} intercept={fit.intercept!r} "
            f"r2={fit.r2!r} n={fit.n} constant={str(fit.constant).lower()} "
            f"degenerate={str(fit.degenerate).lower()}")


def plot_data_text(series, fits: dict | None = None) -> str:
    """CSV text for ``(element_count, inline_mean, call_mean)`` rows plus ``#fit`` lines."""
    rows = sorted(series)
    if not rows:
        raise ValueError("plot series is empty")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PLOT_HEADER)
    for x, yi, yc in rows:
        writer.writerow([x, repr(float(yi)), repr(float(yc))])
    if fits is None:
        fits = {
            Form.INLINE: fit_points([ScalingPoint(0, x, yi) for x, yi, _ in rows]),
            Form.CALL: fit_points([ScalingPoint(0, x, yc) for x, _, yc in rows]),
        }
    for form in (Form.INLINE, Form.CALL):
        if form in fits:
            buf.write(_fit_line(form.value, fits[form]) + "\n")
    return buf.getvalue()


def emit_plot_data(series, path, fits: dict | None = None) -> None:
    text = plot_data_text(series, fits)
    Path(path).write_text(text, encoding="utf-8")


def parse_plot_data(text: str):
    """Inverse of :func:`plot_data_text`: ``(rows, {form_name: {key: value}})``."""
    rows, fits = [], {}
    for line in text.splitlines():
        if line.startswith("#fit"):
            fields = dict(kv.split("=", 1) for kv in line.split()[1:])
            fits[fields.pop("form")] = fields
        elif line and not line.startswith("element_count"):
            x, yi, yc = line.split(",")
            rows.append((int(x), float(yi), float(yc)))
    return rows, fits

