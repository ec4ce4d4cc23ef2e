"""Reports: check rows, numeric series, CSV output, PNG rendering and plot scripts."""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class CheckRow:
    name: str
    value: float
    threshold: float
    passed: bool
    note: str = ""


@dataclass
class Series:
    """One plotted curve: y against x, labelled."""

    label: str
    x: list[float]
    y: list[float]


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    checks: list[CheckRow] = field(default_factory=list)
    series: list[Series] = field(default_factory=list)
    xlabel: str = "R"
    ylabel: str = "ratio"
    title: str = ""

    @property
    def digest(self) -> str:
        text = json.dumps({"command": self.command, "inputs": self.inputs}, sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, value: float, threshold: float, passed: bool, note: str = "") -> CheckRow:
        row = CheckRow(name, float(value), float(threshold), bool(passed), note)
        self.checks.append(row)
        return row


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def format_csv(header: dict, columns: list[str], rows) -> str:
    """CSV with '# key value' header lines followed by a column line and data."""
    out = io.StringIO()
    for k, v in header.items():
        out.write(f"# {k} {v}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(_fmt(x) for x in row) + "\n")
    return out.getvalue()


def checks_csv(report: Report) -> str:
    header = {"command": report.command, "inputs": report.digest}
    rows = [(c.name, c.value, c.threshold, c.passed, c.note) for c in report.checks]
    return format_csv(header, ["name", "value", "threshold", "pass", "note"], rows)


def series_csv(report: Report) -> str:
    header = {"command": report.command, "inputs": report.digest}
    rows = [(s.label, x, y) for s in report.series for x, y in zip(s.x, s.y)]
    return format_csv(header, ["series", report.xlabel, report.ylabel], rows)


def emit_plot_script(report: Report) -> str:
    """Self-contained matplotlib script drawing every series of the report."""
    series = [s for s in report.series if s.x]
    if not series:
        raise ValueError("report has no numeric series to plot")
    data = [{"label": s.label, "x": list(map(float, s.x)), "y": list(map(float, s.y))} for s in series]
    title = report.title or report.command
    return f'''import matplotlib.pyplot as plt

SERIES = {json.dumps(data, indent=1)}

fig, ax = plt.subplots(figsize=(6.0, 4.0))
for s in SERIES:
    ax.plot(s["x"], s["y"], marker="o", label=s["label"])
ax.set_xlabel({report.xlabel!r})
ax.set_ylabel({report.ylabel!r})
ax.set_title({title!r})
ax.legend()
fig.tight_layout()
fig.savefig("plot.png", dpi=150)
'''


def render_png(report: Report, path: str | Path) -> Path:
    """Draw the report's series to a PNG file."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = [s for s in report.series if s.x]
    if not series:
        raise ValueError("report has no numeric series to plot")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for s in series:
        ax.plot(s.x, s.y, marker="o", label=s.label)
    ax.set_xlabel(report.xlabel)
    ax.set_ylabel(report.ylabel)
    ax.set_title(report.title or report.command)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(path, dpi=150, metadata={"Software": None})
    plt.close(fig)
    return path
