"""Minimal static SVG line plots (axes, ticks, legend) with no plotting dependency."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from typing import Optional, Sequence, Tuple

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

Series = Tuple[str, Sequence[Optional[float]], Sequence[Optional[float]]]


def _nice_ticks(lo: float, hi: float, n: int = 6) -> list:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:g}"


def line_plot(
    series: Sequence[Series],
    xlabel: str = "",
    ylabel: str = "",
    title: str = "",
    logy: bool = False,
    width: int = 640,
    height: int = 440,
) -> str:
    """Render ``(label, xs, ys)`` series; ``None`` points break the line."""
    left, right, top, bottom = 80, 170, 40, 60
    pw, ph = width - left - right, height - top - bottom

    def ty(v):
        return math.log10(v) if logy else v

    pts = [
        (x, ty(y))
        for _, xs, ys in series
        for x, y in zip(xs, ys)
        if x is not None and y is not None and (not logy or y > 0)
    ]
    if not pts:
        raise ValueError("nothing to plot")
    xmin, xmax = min(p[0] for p in pts), max(p[0] for p in pts)
    ymin, ymax = min(p[1] for p in pts), max(p[1] for p in pts)
    if logy:
        ymin, ymax = math.floor(ymin), math.ceil(ymax)
    if xmax == xmin:
        xmax = xmin + 1.0
    if ymax == ymin:
        ymax = ymin + 1.0

    def sx(x):
        return left + (x - xmin) / (xmax - xmin) * pw

    def sy(y):
        return top + ph - (y - ymin) / (ymax - ymin) * ph

    root = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(width),
        height=str(height),
        viewBox=f"0 0 {width} {height}",
        attrib={"font-family": "sans-serif", "font-size": "12"},
    )
    ET.SubElement(root, "rect", x="0", y="0", width=str(width), height=str(height), fill="white")
    axes = ET.SubElement(root, "g", stroke="black", attrib={"stroke-width": "1"})
    ET.SubElement(axes, "line", x1=str(left), y1=str(top + ph), x2=str(left + pw), y2=str(top + ph))
    ET.SubElement(axes, "line", x1=str(left), y1=str(top), x2=str(left), y2=str(top + ph))

    for t in _nice_ticks(xmin, xmax):
        if xmin - 1e-12 <= t <= xmax + 1e-12:
            x = f"{sx(t):.2f}"
            ET.SubElement(axes, "line", x1=x, y1=str(top + ph), x2=x, y2=str(top + ph + 5))
            ET.SubElement(root, "text", x=x, y=str(top + ph + 20), attrib={"text-anchor": "middle"}).text = _fmt(t)
    yticks = range(int(ymin), int(ymax) + 1) if logy else _nice_ticks(ymin, ymax)
    for t in yticks:
        if ymin - 1e-12 <= t <= ymax + 1e-12:
            y = f"{sy(t):.2f}"
            ET.SubElement(axes, "line", x1=str(left - 5), y1=y, x2=str(left), y2=y)
            label = f"1e{t}" if logy else _fmt(t)
            ET.SubElement(root, "text", x=str(left - 8), y=y, attrib={"text-anchor": "end", "dy": "4"}).text = label

    ET.SubElement(root, "text", x=str(left + pw / 2), y=str(height - 15), attrib={"text-anchor": "middle"}).text = xlabel
    ET.SubElement(
        root,
        "text",
        x="18",
        y=str(top + ph / 2),
        transform=f"rotate(-90 18 {top + ph / 2})",
        attrib={"text-anchor": "middle"},
    ).text = ylabel
    if title:
        ET.SubElement(root, "text", x=str(left + pw / 2), y="22", attrib={"text-anchor": "middle", "font-size": "14"}).text = title

    for i, (label, xs, ys) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        d, pen_down = [], False
        for x, y in zip(xs, ys):
            if x is None or y is None or (logy and y <= 0):
                pen_down = False
                continue
            d.append(f"{'L' if pen_down else 'M'}{sx(x):.2f} {sy(ty(y)):.2f}")
            pen_down = True
        if d:
            ET.SubElement(root, "path", d=" ".join(d), fill="none", stroke=color, attrib={"stroke-width": "2"})
        ly = top + 10 + 20 * i
        lx = left + pw + 15
        ET.SubElement(root, "line", x1=str(lx), y1=str(ly), x2=str(lx + 25), y2=str(ly), stroke=color, attrib={"stroke-width": "2"})
        ET.SubElement(root, "text", x=str(lx + 32), y=str(ly), attrib={"dy": "4"}).text = label

    return ET.tostring(root, encoding="unicode")
