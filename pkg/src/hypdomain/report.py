"""CSV, SVG and text output for tables, convergence reports and scenario runs.

All writers format numbers explicitly so repeated runs produce identical
bytes.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from .caratheodory import ConvergenceReport, SuiteTable
from .domain import ClosedCurve, Domain
from .exceptions import IoFailure
from .scenarios import Figure, RunReport

FORMATS = ("csv", "svg", "text")


def fmt(v) -> str:
    """Stable text form of a scalar, complex, sequence or ``None``."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    if isinstance(v, (complex, np.complexfloating)):
        return f"{fmt(v.real)}{'+' if v.imag >= 0 else '-'}{fmt(abs(v.imag))}j"
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(fmt(x) for x in v)
    return str(v)


def table_csv(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


# ---------------------------------------------------------------------------
# text


def run_text(rep: RunReport) -> str:
    lines = [f"scenario: {rep.scenario}", f"horizon: M={rep.horizon} (seed {rep.seed})"]
    for r in rep.convergence:
        lines.append(r.summary())
    lines.append("criteria:")
    for c in rep.criteria:
        lines.append(f"  {c.status.upper():<12} {c.name}: measured {fmt(c.measured)}; target {c.target}"
                     + (f" [{c.provenance}]" if c.provenance else ""))
    for t in rep.tables:
        lines.append(f"table {t.name}:")
        lines += ["  " + s for s in table_csv(t.columns, t.rows).rstrip("\n").split("\n")]
    status = "all criteria pass" if rep.passed else "some criteria do not pass"
    lines.append(f"summary: {status} (finite evidence up to m={rep.horizon})")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# svg


def _component_paths(domain: Domain):
    for c in domain.components:
        p = c.sample.points
        if p.size == 0:
            continue
        if c.is_point:
            yield "point", p
        else:
            yield ("closed" if c.sample.closed else "open"), p


def _extent(fig: Figure):
    pts = [c.sample.points for c in fig.domain.components if c.sample.points.size]
    pts += [cv.points for cv in fig.curves]
    z = np.concatenate(pts + [np.array([fig.domain.basepoint])])
    z = z[np.isfinite(z)]
    o = fig.domain.outer
    if o.kind == "outer_disc_complement":
        c, r = o.params["center"], o.params["radius"]
        return c.real - r, c.real + r, c.imag - r, c.imag + r
    return z.real.min(), z.real.max(), z.imag.min(), z.imag.max()


def figure_svg(figures: Sequence[Figure], size: int = 320) -> str:
    """SVG 1.1 document with one panel per figure.

    Boundaries are black, the first curve of each panel is red and any
    further curves blue; the basepoint is a filled dot.
    """
    pad = 10
    width = len(figures) * (size + pad) + pad
    height = size + 2 * pad + 16
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">']
    for k, fig in enumerate(figures):
        x0, x1, y0, y1 = _extent(fig)
        span = max(x1 - x0, y1 - y0) * 1.04 or 1.0
        cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        ox = pad + k * (size + pad)

        def tx(z):
            z = np.asarray(z, dtype=complex)
            return ox + (z.real - cx) / span * size + size / 2, pad + 16 + size / 2 - (z.imag - cy) / span * size

        def poly(z, closed, attrs):
            X, Y = tx(z)
            pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(X, Y))
            tag = "polygon" if closed else "polyline"
            return f'<{tag} points="{pts}" fill="none" {attrs}/>'

        out.append(f'<g id="panel{k}">')
        out.append(f'<text x="{ox:.3f}" y="{pad + 10}" font-family="sans-serif" font-size="11">{_esc(fig.title)}</text>')
        for kind, p in _component_paths(fig.domain):
            if kind == "point":
                X, Y = tx(p)
                out.append(f'<circle cx="{X[0]:.3f}" cy="{Y[0]:.3f}" r="2" fill="black" class="boundary"/>')
            else:
                step = max(1, p.size // 720)
                out.append(poly(p[::step], kind == "closed", 'stroke="black" stroke-width="1" class="boundary"'))
        for i, cv in enumerate(fig.curves):
            colour = "#c00000" if i == 0 else "#1f4e9c"
            cls = "meridian" if i == 0 else "curve"
            out.append(poly(cv.points, True, f'stroke="{colour}" stroke-width="1.6" class="{cls}"'))
        X, Y = tx([fig.domain.basepoint])
        out.append(f'<circle cx="{X[0]:.3f}" cy="{Y[0]:.3f}" r="3" fill="#c00000" class="basepoint"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


# ---------------------------------------------------------------------------
# dispatch


Reportable = Union[RunReport, ConvergenceReport, SuiteTable, Figure, Sequence]


def emit_report(report: Reportable, format: str, path) -> List[Path]:
    """Write ``report`` as ``csv``, ``svg`` or ``text`` to ``path``; returns the files written.

    A :class:`RunReport` in CSV form writes its criteria to ``path`` and one
    extra file ``<stem>_<table>.csv`` per suite table.  SVG needs figures:
    a :class:`RunReport`, a :class:`Figure` or a list of figures.
    """
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    path = Path(path)
    if format == "csv":
        if isinstance(report, SuiteTable):
            return [_write(path, table_csv(report.columns, report.rows))]
        if isinstance(report, RunReport):
            rows = [(c.name, c.status, c.measured, c.target, c.provenance) for c in report.criteria]
            files = [_write(path, table_csv(("criterion", "status", "measured", "target", "provenance"), rows))]
            for t in report.tables:
                files.append(_write(path.with_name(f"{path.stem}_{t.name}.csv"), table_csv(t.columns, t.rows)))
            return files
        if isinstance(report, ConvergenceReport):
            rows = [(c.name, c.status, ";".join(f"{k}={fmt(v)}" for k, v in sorted(c.witnesses.items())))
                    for c in (report.condition_i, report.condition_ii, report.condition_iii)]
            return [_write(path, table_csv(("condition", "status", "witnesses"), rows))]
        raise TypeError(f"cannot write {type(report).__name__} as csv")
    if format == "svg":
        if isinstance(report, RunReport):
            figs = report.figures
        elif isinstance(report, Figure):
            figs = [report]
        else:
            figs = list(report)
        if not figs:
            raise ValueError("nothing to draw")
        return [_write(path, figure_svg(figs))]
    if isinstance(report, RunReport):
        return [_write(path, run_text(report))]
    if isinstance(report, ConvergenceReport):
        return [_write(path, report.summary() + "\n")]
    if isinstance(report, SuiteTable):
        return [_write(path, f"table {report.name}\n" + table_csv(report.columns, report.rows))]
    raise TypeError(f"cannot write {type(report).__name__} as text")
