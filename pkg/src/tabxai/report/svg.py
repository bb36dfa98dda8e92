"""Hand-rolled SVG output.

Charts are emitted directly as SVG markup with fixed float formatting and
no timestamps or locale-dependent text, so an identical PlotSpec always
produces identical bytes. Kinds: bar (horizontal, optional error
whiskers), curve, curve_family, scatter (with diagonal reference), and a
two-column rule panel for local explanations.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

W, H = 720, 440
MARGIN = dict(left=170, right=30, top=46, bottom=46)
AXIS = "#333333"
SERIES = "#4878a8"
POSITIVE = "#e08214"   # supports class 1 / pushes output up
NEGATIVE = "#5e8fc4"   # supports class 0
WHISKER = "#111111"


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class PlotSpec:
    kind: str  # bar | curve | curve_family | scatter | rule_panel
    title: str
    x_label: str = ""
    y_label: str = ""
    series: tuple = ()
    error: tuple = ()

    def __post_init__(self):
        if self.kind not in ("bar", "curve", "curve_family", "scatter",
                             "rule_panel"):
            raise ReportError(f"unknown plot kind {self.kind!r}")
        if len(self.series) == 0:
            raise ReportError("series must be non-empty")
        if self.error and len(self.error) != len(self.series):
            raise ReportError("error bars must match series length")


def _f(v: float) -> str:
    return f"{float(v):.2f}".rstrip("0").rstrip(".")


def _tick_format(v: float) -> str:
    return f"{float(v):.4g}"


def _text(x, y, s, size=12, anchor="start", color=AXIS) -> str:
    return (f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" '
            f'font-family="sans-serif" text-anchor="{anchor}" '
            f'fill="{color}">{escape(str(s))}</text>')


def _line(x1, y1, x2, y2, color=AXIS, width=1.0) -> str:
    return (f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{color}" stroke-width="{_f(width)}"/>')


def _rect(x, y, w, h, color) -> str:
    return (f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
            f'fill="{color}"/>')


class _Scale:
    def __init__(self, lo, hi, out_lo, out_hi):
        if hi == lo:
            hi = lo + 1.0
        self.lo, self.hi = lo, hi
        self.out_lo, self.out_hi = out_lo, out_hi

    def __call__(self, v):
        t = (v - self.lo) / (self.hi - self.lo)
        return self.out_lo + t * (self.out_hi - self.out_lo)

    def ticks(self, n=5):
        return np.linspace(self.lo, self.hi, n)


def _frame(spec: PlotSpec, parts: list[str], sx: _Scale, sy: _Scale | None):
    x0, x1 = MARGIN["left"], W - MARGIN["right"]
    y0, y1 = H - MARGIN["bottom"], MARGIN["top"]
    parts.append(_line(x0, y0, x1, y0))
    parts.append(_line(x0, y0, x0, y1))
    for t in sx.ticks():
        px = sx(t)
        parts.append(_line(px, y0, px, y0 + 4))
        parts.append(_text(px, y0 + 17, _tick_format(t), 10, "middle"))
    if sy is not None:
        for t in sy.ticks():
            py = sy(t)
            parts.append(_line(x0 - 4, py, x0, py))
            parts.append(_text(x0 - 7, py + 3, _tick_format(t), 10, "end"))
    parts.append(_text((x0 + x1) / 2, H - 8, spec.x_label, 12, "middle"))
    parts.append(_text(14, (y0 + y1) / 2, spec.y_label, 12, "middle"))
    parts.append(_text(W / 2, 20, spec.title, 14, "middle"))


def _render_bar(spec: PlotSpec, parts: list[str]):
    labels = [s[0] for s in spec.series]
    values = np.array([float(s[1]) for s in spec.series])
    errors = np.array([float(e) for e in spec.error]) if spec.error else None
    hi = float((values + (errors if errors is not None else 0)).max())
    lo = min(0.0, float(values.min()))
    sx = _Scale(lo, hi if hi > lo else lo + 1, MARGIN["left"], W - MARGIN["right"])
    y0, y1 = H - MARGIN["bottom"], MARGIN["top"]
    slot = (y0 - y1) / len(values)
    bar_h = slot * 0.6
    for i, (label, v) in enumerate(zip(labels, values)):
        top = y1 + i * slot + (slot - bar_h) / 2
        left = sx(min(0.0, v))
        parts.append(_rect(left, top, abs(sx(v) - sx(0.0)), bar_h,
                           POSITIVE if v >= 0 else NEGATIVE))
        parts.append(_text(MARGIN["left"] - 6, top + bar_h / 2 + 4, label,
                           11, "end"))
        if errors is not None and errors[i] > 0:
            cy = top + bar_h / 2
            parts.append(_line(sx(v - errors[i]), cy, sx(v + errors[i]), cy,
                               WHISKER, 1.4))
            for e in (v - errors[i], v + errors[i]):
                parts.append(_line(sx(e), cy - 4, sx(e), cy + 4, WHISKER, 1.4))
    _frame(spec, parts, sx, None)


def _polyline(xs, ys, sx, sy, color, width=1.5, opacity=1.0) -> str:
    pts = " ".join(f"{_f(sx(x))},{_f(sy(y))}" for x, y in zip(xs, ys))
    return (f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{_f(width)}" stroke-opacity="{_f(opacity)}"/>')


def _curve_scales(grid, responses):
    lo_y = float(min(r.min() for r in responses))
    hi_y = float(max(r.max() for r in responses))
    sx = _Scale(float(grid.min()), float(grid.max()),
                MARGIN["left"], W - MARGIN["right"])
    sy = _Scale(lo_y, hi_y, H - MARGIN["bottom"], MARGIN["top"])
    return sx, sy


def _render_curve(spec: PlotSpec, parts: list[str]):
    grid = np.asarray(spec.series[0], dtype=np.float64)
    resp = np.asarray(spec.series[1], dtype=np.float64)
    sx, sy = _curve_scales(grid, [resp])
    parts.append(_polyline(grid, resp, sx, sy, SERIES))
    _frame(spec, parts, sx, sy)


def _render_curve_family(spec: PlotSpec, parts: list[str]):
    grid = np.asarray(spec.series[0], dtype=np.float64)
    rows = np.atleast_2d(np.asarray(spec.series[1], dtype=np.float64))
    sx, sy = _curve_scales(grid, [rows])
    for row in rows:
        parts.append(_polyline(grid, row, sx, sy, SERIES, 0.8, 0.35))
    parts.append(_polyline(grid, rows.mean(axis=0), sx, sy, POSITIVE, 2.0))
    _frame(spec, parts, sx, sy)


def _render_scatter(spec: PlotSpec, parts: list[str]):
    xs = np.asarray(spec.series[0], dtype=np.float64)
    ys = np.asarray(spec.series[1], dtype=np.float64)
    lo = float(min(xs.min(), ys.min()))
    hi = float(max(xs.max(), ys.max()))
    sx = _Scale(lo, hi, MARGIN["left"], W - MARGIN["right"])
    sy = _Scale(lo, hi, H - MARGIN["bottom"], MARGIN["top"])
    parts.append(_line(sx(lo), sy(lo), sx(hi), sy(hi), "#999999", 1.0))
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{_f(sx(x))}" cy="{_f(sy(y))}" r="3" '
                     f'fill="{SERIES}" fill-opacity="0.7"/>')
    _frame(spec, parts, sx, sy)


def _render_rule_panel(spec: PlotSpec, parts: list[str]):
    # series rows: (rule text, weight, direction, actual value text)
    rows = list(spec.series)
    weights = np.array([float(r[1]) for r in rows])
    w_max = float(np.abs(weights).max()) or 1.0
    x_mid, x_span = 360.0, 150.0
    y = 70.0
    parts.append(_text(W / 2, 20, spec.title, 14, "middle"))
    parts.append(_text(x_mid, 46, "rule", 12, "middle"))
    parts.append(_text(620, 46, "actual value", 12, "middle"))
    parts.append(_line(x_mid, 56, x_mid, 56 + len(rows) * 30, "#bbbbbb"))
    for rule_text, weight, direction, actual in rows:
        weight = float(weight)
        bar_w = abs(weight) / w_max * x_span
        color = POSITIVE if int(direction) == 1 else NEGATIVE
        if weight >= 0:
            parts.append(_rect(x_mid, y - 12, bar_w, 16, color))
        else:
            parts.append(_rect(x_mid - bar_w, y - 12, bar_w, 16, color))
        parts.append(_text(160, y, rule_text, 11, "end"))
        parts.append(_text(620, y, actual, 11, "middle"))
        y += 30.0


def render(spec: PlotSpec, path) -> None:
    """Write the chart; identical specs yield identical bytes."""
    parts: list[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>',
    ]
    if spec.kind == "bar":
        _render_bar(spec, parts)
    elif spec.kind == "curve":
        _render_curve(spec, parts)
    elif spec.kind == "curve_family":
        _render_curve_family(spec, parts)
    elif spec.kind == "scatter":
        _render_scatter(spec, parts)
    else:
        _render_rule_panel(spec, parts)
    parts.append("</svg>")
    data = "\n".join(parts) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(data)
