"""Dependency-free static SVG plots.

Byte-deterministic for identical inputs: fixed-precision coordinates, no
timestamps, no randomness.  Two styles: multi-series line plot (from a
Trajectory or plain arrays) and a heatmap with a monotone two-color scale
whose data extremes are annotated as ``min=...`` / ``max=...`` text nodes.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError
from .qcore import Trajectory

WIDTH, HEIGHT = 860, 520
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 140, 40, 55

_SERIES_COLORS = ["#1f5fa6", "#c23b22", "#2e8b57", "#8a2be2", "#b8860b",
                  "#008b8b"]
_LO_RGB = (18, 18, 64)
_HI_RGB = (250, 240, 90)

# heatmaps larger than this are strided down so files stay well under 2 MB
_MAX_CELLS = 24000


@dataclass(frozen=True)
class HeatMap:
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray        # shape (len(y), len(x))
    x_label: str = "x"
    y_label: str = "y"
    title: str = ""


def _fmt(v):
    return f"{v:.2f}"


def _fmt_data(v):
    return f"{v:.6g}"


def _axis_ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def _scale(v, lo, hi, out_lo, out_hi):
    if hi == lo:
        return 0.5 * (out_lo + out_hi)
    return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)


def _frame(parts, x_lo, x_hi, y_lo, y_hi, x_label, y_label, title):
    px0, px1 = MARGIN_L, WIDTH - MARGIN_R
    py0, py1 = HEIGHT - MARGIN_B, MARGIN_T
    parts.append(
        f'<rect x="{px0}" y="{py1}" width="{px1 - px0}" '
        f'height="{py0 - py1}" fill="none" stroke="#333" stroke-width="1"/>')
    for tv in _axis_ticks(x_lo, x_hi):
        px = _scale(tv, x_lo, x_hi, px0, px1)
        parts.append(f'<line x1="{_fmt(px)}" y1="{py0}" x2="{_fmt(px)}" '
                     f'y2="{py0 + 5}" stroke="#333"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{py0 + 18}" font-size="11" '
                     f'text-anchor="middle">{_fmt_data(tv)}</text>')
    for tv in _axis_ticks(y_lo, y_hi):
        py = _scale(tv, y_lo, y_hi, py0, py1)
        parts.append(f'<line x1="{px0 - 5}" y1="{_fmt(py)}" x2="{px0}" '
                     f'y2="{_fmt(py)}" stroke="#333"/>')
        parts.append(f'<text x="{px0 - 8}" y="{_fmt(py)}" font-size="11" '
                     f'text-anchor="end" dominant-baseline="middle">'
                     f'{_fmt_data(tv)}</text>')
    parts.append(f'<text x="{(px0 + px1) // 2}" y="{HEIGHT - 12}" '
                 f'font-size="13" text-anchor="middle">{x_label}</text>')
    parts.append(f'<text x="16" y="{(py0 + py1) // 2}" font-size="13" '
                 f'text-anchor="middle" transform="rotate(-90 16 '
                 f'{(py0 + py1) // 2})">{y_label}</text>')
    if title:
        parts.append(f'<text x="{(px0 + px1) // 2}" y="24" font-size="14" '
                     f'text-anchor="middle">{title}</text>')


def _svg_document(parts):
    body = "\n".join(parts)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
            f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">\n'
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>\n'
            f"{body}\n</svg>\n")


def _line_svg(times, columns, names, x_label, y_label, title):
    if times.size == 0:
        raise ContractViolationError("cannot plot an empty series")
    x_lo, x_hi = float(times.min()), float(times.max())
    y_lo = float(min(col.min() for col in columns))
    y_hi = float(max(col.max() for col in columns))
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    px0, px1 = MARGIN_L, WIDTH - MARGIN_R
    py0, py1 = HEIGHT - MARGIN_B, MARGIN_T

    parts = []
    _frame(parts, x_lo, x_hi, y_lo, y_hi, x_label, y_label, title)
    for k, (col, name) in enumerate(zip(columns, names)):
        color = _SERIES_COLORS[k % len(_SERIES_COLORS)]
        pts = [(_scale(t, x_lo, x_hi, px0, px1),
                _scale(v, y_lo, y_hi, py0, py1))
               for t, v in zip(times, col)]
        if len(pts) >= 2:
            path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
            parts.append(f'<polyline points="{path}" fill="none" '
                         f'stroke="{color}" stroke-width="1.5"/>')
        if len(pts) <= 20:
            for x, y in pts:
                parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" '
                             f'fill="{color}"/>')
        ly = MARGIN_T + 16 + 16 * k
        parts.append(f'<line x1="{px1 + 10}" y1="{ly - 4}" x2="{px1 + 30}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{px1 + 35}" y="{ly}" font-size="12">'
                     f'{name}</text>')
    return _svg_document(parts)


def _color(t):
    r = int(round(_LO_RGB[0] + t * (_HI_RGB[0] - _LO_RGB[0])))
    g = int(round(_LO_RGB[1] + t * (_HI_RGB[1] - _LO_RGB[1])))
    b = int(round(_LO_RGB[2] + t * (_HI_RGB[2] - _LO_RGB[2])))
    return f"#{r:02x}{g:02x}{b:02x}"


def _heatmap_svg(hm):
    x = np.asarray(hm.x, dtype=float)
    y = np.asarray(hm.y, dtype=float)
    z = np.asarray(hm.values, dtype=float)
    if z.shape != (y.size, x.size):
        raise ContractViolationError(
            f"heatmap values {z.shape} do not match (len(y), len(x)) = "
            f"({y.size}, {x.size})")
    if z.size == 0:
        raise ContractViolationError("cannot plot an empty map")
    z_min, z_max = float(z.min()), float(z.max())

    # stride down oversized maps; keeps the file small and deterministic
    sx = max(1, int(np.ceil(x.size * y.size / _MAX_CELLS / 2)))
    while (x.size // sx + 1) * (y.size // sx + 1) > _MAX_CELLS:
        sx += 1
    xs, ys, zs = x[::sx], y[::sx], z[::sx, ::sx]

    px0, px1 = MARGIN_L, WIDTH - MARGIN_R
    py0, py1 = HEIGHT - MARGIN_B, MARGIN_T
    parts = []
    span = z_max - z_min
    cw = (px1 - px0) / zs.shape[1]
    ch = (py0 - py1) / zs.shape[0]
    for i in range(zs.shape[0]):
        cy = py0 - (i + 1) * ch
        for j in range(zs.shape[1]):
            t = 0.5 if span == 0.0 else (zs[i, j] - z_min) / span
            parts.append(
                f'<rect x="{_fmt(px0 + j * cw)}" y="{_fmt(cy)}" '
                f'width="{_fmt(cw + 0.5)}" height="{_fmt(ch + 0.5)}" '
                f'fill="{_color(t)}"/>')
    _frame(parts, float(x.min()), float(x.max()), float(y.min()),
           float(y.max()), hm.x_label, hm.y_label, hm.title)
    # color bar with annotated extremes
    bar_x = px1 + 20
    for k in range(24):
        t = (23 - k) / 23
        parts.append(f'<rect x="{bar_x}" y="{_fmt(py1 + k * (py0 - py1) / 24)}" '
                     f'width="16" height="{_fmt((py0 - py1) / 24 + 0.5)}" '
                     f'fill="{_color(t)}"/>')
    parts.append(f'<text x="{bar_x + 22}" y="{py1 + 10}" font-size="12">'
                 f'max={_fmt_data(z_max)}</text>')
    parts.append(f'<text x="{bar_x + 22}" y="{py0}" font-size="12">'
                 f'min={_fmt_data(z_min)}</text>')
    return _svg_document(parts)


def emit_svg(data, style, path, x_label=None, y_label=None, title=""):
    """Write ``data`` to ``path`` as a self-contained SVG.

    style='line' accepts a Trajectory (or (x, ys, names) tuple); x/y labels
    override the defaults.  style='heatmap' accepts a HeatMap.  Output bytes
    are identical for identical inputs.
    """
    if style == "line":
        if isinstance(data, Trajectory):
            times, cols, names = data.times, \
                [data.values[:, j] for j in range(len(data.observables))], \
                list(data.observables)
        else:
            times, cols, names = data
            times = np.asarray(times, dtype=float)
            cols = [np.asarray(c, dtype=float) for c in cols]
        doc = _line_svg(times, cols, names, x_label or "time (s)",
                        y_label or "value", title)
    elif style == "heatmap":
        doc = _heatmap_svg(data)
    else:
        raise ContractViolationError(f"unknown SVG style {style!r}")
    blob = doc.encode()
    if len(blob) > 2_000_000:
        raise ContractViolationError(
            f"SVG would be {len(blob)} bytes (> 2 MB cap)")
    try:
        with open(path, "wb") as fh:
            fh.write(blob)
    except OSError as exc:
        raise ContractViolationError(f"cannot write SVG to {path}: {exc}")
    return path
