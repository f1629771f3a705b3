"""Job-oriented Gantt charts (one row per job) as ASCII or SVG.

Chart geometry comes from :func:`chart_rectangles`, which keeps exact
times; the renderers only convert to floats for drawing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .model import Schedule, require_feasible
from .qtime import QTime


@dataclass(frozen=True)
class Rect:
    job: int
    stage: int
    machine: int
    start: QTime
    end: QTime

    @property
    def label(self) -> str:
        return f"M{self.stage + 1}^({self.machine + 1})"


def chart_rectangles(sched: Schedule) -> list[Rect]:
    out = []
    for batch in sched.batches:
        p = sched.instance.stages[batch.stage].processing_time
        for j in batch.jobs:
            out.append(Rect(j, batch.stage, batch.machine, batch.start, batch.start + p))
    out.sort(key=lambda r: (r.job, r.start, r.stage))
    return out


def _fmt(x: QTime) -> str:
    return f"{float(x):.6g}"


def render_ascii(sched: Schedule, columns_per_unit: Optional[int] = None,
                 width: int = 96) -> str:
    """Rows ``J1..Jn``; ``#`` marks time before release, blocks show machines."""
    require_feasible(sched)
    inst = sched.instance
    if inst.n == 0:
        return ""
    rects = chart_rectangles(sched)
    horizon = max(float(r.end) for r in rects)
    if columns_per_unit is None:
        columns_per_unit = max(1, int(width // max(horizon, 1)))
    total = int(math.ceil(horizon * columns_per_unit)) + 1

    def col(t) -> int:
        return int(round(float(t) * columns_per_unit))

    lines = []
    for j in range(inst.n):
        row = [" "] * total
        for c in range(col(inst.releases[j])):
            row[c] = "#"
        for r in (r for r in rects if r.job == j):
            lo, hi = col(r.start), col(r.end)
            span = max(hi - lo, 1)
            text = f"[{r.stage + 1}.{r.machine + 1}" + "=" * max(span - 5, 0) + "]"
            for offset, ch in enumerate(text[:span]):
                row[lo + offset] = ch
        lines.append(f"J{j + 1:<3}|" + "".join(row).rstrip())
    axis = []
    step = max(1, int(round(5 / columns_per_unit))) if columns_per_unit < 5 else 1
    t = 0
    while t * columns_per_unit < total:
        axis.append((t * columns_per_unit, str(t)))
        t += step
    ruler = [" "] * (total + 4)
    for c, text in axis:
        for offset, ch in enumerate(text):
            if c + offset < len(ruler):
                ruler[c + offset] = ch
    lines.append("    +" + "-" * total)
    lines.append("     " + "".join(ruler).rstrip())
    return "\n".join(lines) + "\n"


def render_svg(sched: Schedule, unit: float = 40.0, row_height: float = 28.0) -> str:
    require_feasible(sched)
    inst = sched.instance
    rects = chart_rectangles(sched)
    left, top = 48.0, 12.0
    horizon = max((float(r.end) for r in rects), default=0.0)
    ticks = int(math.ceil(horizon))
    width = left + unit * max(ticks, 1) + 16
    height = top + row_height * inst.n + 28
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.6g}" height="{height:.6g}" '
        f'font-family="sans-serif" font-size="11">',
    ]
    for t in range(ticks + 1):
        x = left + unit * t
        out.append(f'<line x1="{x:.6g}" y1="{top:.6g}" x2="{x:.6g}" '
                   f'y2="{top + row_height * inst.n:.6g}" stroke="#ddd"/>')
        out.append(f'<text x="{x:.6g}" y="{height - 10:.6g}" text-anchor="middle">{t}</text>')
    for j in range(inst.n):
        y = top + row_height * j
        out.append(f'<text x="6" y="{y + row_height * 0.65:.6g}">J{j + 1}</text>')
        r_j = inst.releases[j]
        if r_j > 0:
            out.append(f'<rect class="unreleased" x="{left:.6g}" y="{y:.6g}" '
                       f'width="{unit * float(r_j):.6g}" height="{row_height:.6g}" fill="#000"/>')
    for r in rects:
        x = left + unit * float(r.start)
        w = unit * (float(r.end) - float(r.start))
        y = top + row_height * r.job
        out.append(
            f'<rect class="batch" data-start="{_fmt(r.start)}" data-end="{_fmt(r.end)}" '
            f'x="{x:.6g}" y="{y:.6g}" width="{w:.6g}" height="{row_height:.6g}" '
            f'fill="#bbb" stroke="#333"/>')
        out.append(
            f'<text x="{x + w / 2:.6g}" y="{y + row_height * 0.65:.6g}" text-anchor="middle">'
            f'M<tspan baseline-shift="sub" font-size="8">{r.stage + 1}</tspan>'
            f'<tspan baseline-shift="super" font-size="8">({r.machine + 1})</tspan></text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
