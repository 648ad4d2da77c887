"""Static SVG figures: graph layout, vertex signal, filter bank and risk curves.

Output is plain SVG 1.1 text built by string formatting with fixed numeric
precision, so identical inputs always give identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from ._colormap import VIRIDIS
from .errors import ParameterError, ValidationError
from .frames import FilterBank, filter_curves
from .graph import SparseGraph

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
            "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


@dataclass(frozen=True)
class PlotSpec:
    width: int = 480
    height: int = 480
    point_size: float = 2.0
    color_map: str = "viridis"
    margin: int = 24

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ParameterError("plot dimensions must be positive")
        if not self.point_size > 0:
            raise ParameterError("point_size must be > 0")
        if self.margin < 0 or 2 * self.margin >= min(self.width, self.height):
            raise ParameterError("margin leaves no drawing area")
        if self.color_map != "viridis":
            raise ParameterError(f"unknown color map {self.color_map!r}")


def _num(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Svg:
    def __init__(self, width: int, height: int):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        ]

    def add(self, element: str) -> None:
        self.parts.append(element)

    def text(self, x, y, s, size=11, anchor="start"):
        self.add(f'<text x="{_num(x)}" y="{_num(y)}" font-family="sans-serif" font-size="{size}" '
                 f'text-anchor="{anchor}">{escape(s)}</text>')

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _layout(coords: np.ndarray, spec: PlotSpec, right_pad: float = 0.0) -> np.ndarray:
    """Affine map of coords into the viewport, aspect ratio preserved, y up."""
    lo = coords.min(axis=0)
    span = coords.max(axis=0) - lo
    avail_w = spec.width - 2 * spec.margin - right_pad
    avail_h = spec.height - 2 * spec.margin
    extent = max(span[0], span[1])
    scale = min(avail_w, avail_h) / extent if extent > 0 else 0.0
    offset = np.array([spec.margin + (avail_w - span[0] * scale) / 2,
                       spec.margin + (avail_h - span[1] * scale) / 2])
    px = (coords - lo) * scale
    px[:, 1] = span[1] * scale - px[:, 1]
    return px + offset


def _require_coords(g: SparseGraph) -> np.ndarray:
    if g.coords is None:
        raise ValidationError("graph has no vertex coordinates; a planar layout is required to plot it")
    return g.coords


def _edges(svg: _Svg, g: SparseGraph, px: np.ndarray, stroke="#9a9a9a") -> None:
    for i, j in g.edges():
        svg.add(f'<line x1="{_num(px[i, 0])}" y1="{_num(px[i, 1])}" x2="{_num(px[j, 0])}" '
                f'y2="{_num(px[j, 1])}" stroke="{stroke}" stroke-width="0.6"/>')


def plot_graph(g: SparseGraph, spec: PlotSpec | None = None) -> str:
    """Draw every undirected edge once as a line and every vertex as a circle."""
    spec = spec or PlotSpec()
    px = _layout(_require_coords(g), spec)
    svg = _Svg(spec.width, spec.height)
    _edges(svg, g, px)
    r = _num(spec.point_size)
    for x, y in px:
        svg.add(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{r}" fill="#1f1f1f"/>')
    return svg.render()


def color_for(values, vmin: float, vmax: float) -> list[str]:
    """Map values onto the colormap; a constant range maps to the middle stop."""
    v = np.asarray(values, dtype=float)
    if vmax > vmin:
        idx = np.rint((v - vmin) / (vmax - vmin) * (len(VIRIDIS) - 1)).astype(int)
    else:
        idx = np.full(v.shape, len(VIRIDIS) // 2)
    idx = np.clip(idx, 0, len(VIRIDIS) - 1)
    return [VIRIDIS[k] for k in idx]


def plot_signal(g: SparseGraph, f, spec: PlotSpec | None = None, title: str | None = None) -> str:
    """Vertices filled by signal value, edges in light grey, with a colour bar."""
    spec = spec or PlotSpec()
    coords = _require_coords(g)
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.size != g.n:
        raise ValidationError(f"signal has length {f.size}, graph has {g.n} vertices")
    bar_w = 56.0
    px = _layout(coords, spec, right_pad=bar_w)
    svg = _Svg(spec.width, spec.height)
    if title:
        svg.text(spec.width / 2, spec.margin * 0.7, title, anchor="middle")
    _edges(svg, g, px, stroke="#d0d0d0")
    vmin, vmax = float(f.min()), float(f.max())
    r = _num(spec.point_size)
    for (x, y), c in zip(px, color_for(f, vmin, vmax)):
        svg.add(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{r}" fill="{c}"/>')

    # colour bar: 64 rects bottom (min) to top (max)
    x0 = spec.width - spec.margin - bar_w + 8
    top = spec.margin
    height = spec.height - 2 * spec.margin
    steps = 64
    cell = height / steps
    for k in range(steps):
        c = VIRIDIS[round((steps - 1 - k) / (steps - 1) * (len(VIRIDIS) - 1))]
        svg.add(f'<rect x="{_num(x0)}" y="{_num(top + k * cell)}" width="12" '
                f'height="{_num(cell + 0.05)}" fill="{c}"/>')
    svg.text(x0 + 16, top + 8, f"{vmax:.3g}", size=9)
    svg.text(x0 + 16, top + height, f"{vmin:.3g}", size=9)
    return svg.render()


def _axes(svg: _Svg, spec: PlotSpec, x_ticks, y_ticks, to_px, xlabel: str, ylabel: str):
    left, top = spec.margin + 30, spec.margin
    right, bottom = spec.width - spec.margin, spec.height - spec.margin - 20
    svg.add(f'<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" fill="none" stroke="#000000" stroke-width="1"/>')
    for xv, label in x_ticks:
        x, _ = to_px(xv, 0.0)
        svg.text(x, bottom + 14, label, size=9, anchor="middle")
    for yv, label in y_ticks:
        _, y = to_px(None, yv)
        svg.text(left - 4, y + 3, label, size=9, anchor="end")
    svg.text((left + right) / 2, spec.height - 4, xlabel, size=11, anchor="middle")
    svg.text(12, (top + bottom) / 2, ylabel, size=11, anchor="middle")
    return left, top, right, bottom


def _polyline(xs, ys, color: str, dashed: bool = False) -> str:
    pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in zip(xs, ys))
    dash = ' stroke-dasharray="5,3"' if dashed else ""
    return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>'


def plot_filter(bank: FilterBank, spec: PlotSpec | None = None, num_samples: int = 512) -> str:
    """One polyline per filter psi_0..psi_J over [0, lmax], y axis fixed to [0, 1.05]."""
    spec = spec or PlotSpec(width=560, height=360)
    table = filter_curves(bank, num_samples)
    svg = _Svg(spec.width, spec.height)
    left, top = spec.margin + 30, spec.margin
    right, bottom = spec.width - spec.margin, spec.height - spec.margin - 20

    def to_px(x, y):
        px = None if x is None else left + x / bank.lmax * (right - left)
        return px, bottom - y / 1.05 * (bottom - top)

    x_ticks = [(v, f"{v:.3g}") for v in np.linspace(0.0, bank.lmax, 5)]
    y_ticks = [(v, f"{v:.2g}") for v in (0.0, 0.25, 0.5, 0.75, 1.0)]
    _axes(svg, spec, x_ticks, y_ticks, to_px, "lambda", "psi_j")
    xs = left + table[:, 0] / bank.lmax * (right - left)
    for j in range(bank.J + 1):
        ys = bottom - table[:, j + 1] / 1.05 * (bottom - top)
        svg.add(_polyline(xs, ys, _PALETTE[j % len(_PALETTE)]))
    return svg.render()


def plot_risks(thresholds, curves: dict[str, tuple[np.ndarray, str, bool]],
               spec: PlotSpec | None = None) -> str:
    """Risk curves against threshold on a log x axis.

    Args:
        thresholds: common x values; non-positive entries are dropped.
        curves: label -> (values, colour, dashed).
    """
    spec = spec or PlotSpec(width=560, height=360)
    t = np.asarray(thresholds, dtype=float)
    keep = t > 0
    if not np.any(keep):
        raise ValidationError("no positive thresholds to plot on a log axis")
    lt = np.log10(t[keep])
    all_y = np.concatenate([np.asarray(v, dtype=float)[keep] for v, _, _ in curves.values()])
    all_y = all_y[np.isfinite(all_y)]
    ylo, yhi = float(all_y.min()), float(all_y.max())
    if yhi <= ylo:
        yhi = ylo + 1.0
    xlo, xhi = float(lt.min()), float(lt.max())
    if xhi <= xlo:
        xhi = xlo + 1.0
    svg = _Svg(spec.width, spec.height)
    left, top = spec.margin + 30, spec.margin
    right, bottom = spec.width - spec.margin, spec.height - spec.margin - 20

    def to_px(x, y):
        px = None if x is None else left + (x - xlo) / (xhi - xlo) * (right - left)
        return px, bottom - (y - ylo) / (yhi - ylo) * (bottom - top)

    x_ticks = [(e, f"1e{e}") for e in range(math.ceil(xlo), math.floor(xhi) + 1)]
    y_ticks = [(v, f"{v:.2g}") for v in np.linspace(ylo, yhi, 5)]
    _axes(svg, spec, x_ticks, y_ticks, to_px, "t", "risk")
    for k, (label, (values, color, dashed)) in enumerate(curves.items()):
        v = np.asarray(values, dtype=float)[keep]
        xs = left + (lt - xlo) / (xhi - xlo) * (right - left)
        ys = bottom - (v - ylo) / (yhi - ylo) * (bottom - top)
        svg.add(_polyline(xs, ys, color, dashed))
        svg.text(left + 10, top + 12 + 13 * k, label, size=10)
    return svg.render()
