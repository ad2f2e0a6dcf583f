"""Minimal self-contained SVG rendering: curves, labels, contours.

No external assets or libraries; styles are inline.  Bifurcation curves
are drawn solid, coexistence (Maxwell) curves dashed.
"""

from __future__ import annotations

import numpy as np


class SvgCanvas:
    """Maps a rectangular data window onto a square SVG viewport."""

    def __init__(self, extent, size: int = 640, margin: int = 40):
        self.xmin, self.xmax, self.ymin, self.ymax = extent
        self.size = size
        self.margin = margin
        self._parts = []

    def _tx(self, x):
        inner = self.size - 2 * self.margin
        return self.margin + (x - self.xmin) / (self.xmax - self.xmin) * inner

    def _ty(self, y):
        inner = self.size - 2 * self.margin
        return self.size - self.margin - (y - self.ymin) / (self.ymax - self.ymin) * inner

    def polyline(self, points, color="#1a1a1a", width=1.2, dashed=False):
        pts = np.asarray(points, dtype=float)
        if len(pts) < 2:
            return
        inside = ((pts[:, 0] >= self.xmin - 0.5 * (self.xmax - self.xmin))
                  & (pts[:, 0] <= self.xmax + 0.5 * (self.xmax - self.xmin))
                  & (pts[:, 1] >= self.ymin - 0.5 * (self.ymax - self.ymin))
                  & (pts[:, 1] <= self.ymax + 0.5 * (self.ymax - self.ymin)))
        # draw contiguous runs of in-window points to avoid wild excursions
        run = []
        runs = []
        for keep, pt in zip(inside, pts):
            if keep:
                run.append(pt)
            elif run:
                runs.append(run)
                run = []
        if run:
            runs.append(run)
        dash = ' stroke-dasharray="6 4"' if dashed else ""
        for run in runs:
            if len(run) < 2:
                continue
            coords = " ".join(f"{self._tx(x):.2f},{self._ty(y):.2f}"
                              for x, y in run)
            self._parts.append(
                f'<polyline fill="none" stroke="{color}" '
                f'stroke-width="{width}"{dash} points="{coords}"/>')

    def circle(self, x, y, r=3.0, color="#c62828"):
        self._parts.append(
            f'<circle cx="{self._tx(x):.2f}" cy="{self._ty(y):.2f}" '
            f'r="{r}" fill="{color}"/>')

    def text(self, x, y, s, size=14, color="#1a1a1a"):
        self._parts.append(
            f'<text x="{self._tx(x):.2f}" y="{self._ty(y):.2f}" '
            f'font-family="sans-serif" font-size="{size}" fill="{color}" '
            f'text-anchor="middle">{s}</text>')

    def frame(self, title=""):
        inner = self.size - 2 * self.margin
        self._parts.append(
            f'<rect x="{self.margin}" y="{self.margin}" width="{inner}" '
            f'height="{inner}" fill="none" stroke="#888" stroke-width="0.8"/>')
        if title:
            self._parts.append(
                f'<text x="{self.size / 2}" y="{self.margin - 12}" '
                f'font-family="sans-serif" font-size="15" fill="#1a1a1a" '
                f'text-anchor="middle">{title}</text>')

    def render(self) -> str:
        body = "\n".join(self._parts)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'viewBox="0 0 {self.size} {self.size}" '
                f'width="{self.size}" height="{self.size}">\n'
                f'<rect width="100%" height="100%" fill="white"/>\n'
                f"{body}\n</svg>\n")


def contour_segments(xs, ys, values, level):
    """Marching-squares line segments of one iso-level.

    values has shape (len(xs), len(ys)); NaN cells are skipped.
    """
    segs = []
    v = values
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            corners = v[i, j], v[i + 1, j], v[i + 1, j + 1], v[i, j + 1]
            if any(np.isnan(c) for c in corners):
                continue
            above = [c > level for c in corners]
            if all(above) or not any(above):
                continue
            x0, x1, y0, y1 = xs[i], xs[i + 1], ys[j], ys[j + 1]

            def interp(ca, cb, pa, pb):
                t = (level - ca) / (cb - ca)
                return (pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]))

            pts = []
            quad = [(corners[0], (x0, y0)), (corners[1], (x1, y0)),
                    (corners[2], (x1, y1)), (corners[3], (x0, y1))]
            for (ca, pa), (cb, pb) in zip(quad, quad[1:] + quad[:1]):
                if (ca > level) != (cb > level):
                    pts.append(interp(ca, cb, pa, pb))
            if len(pts) >= 2:
                segs.append((pts[0], pts[1]))
            if len(pts) == 4:
                segs.append((pts[2], pts[3]))
    return segs


def render_curves(extent, bifurcation=(), maxwell=(), labels=(), markers=(),
                  size=640, title="") -> str:
    """Standard figure: solid bifurcation curves, dashed Maxwell curves,
    text labels (x, y, string) and point markers (x, y)."""
    canvas = SvgCanvas(extent, size=size)
    canvas.frame(title)
    for line in bifurcation:
        canvas.polyline(line)
    for line in maxwell:
        canvas.polyline(line, color="#c62828", dashed=True)
    for x, y in markers:
        canvas.circle(x, y)
    for x, y, s in labels:
        canvas.text(x, y, s)
    return canvas.render()


def render_potential(xs, ys, values, minima=(), n_levels=24, size=640,
                     title="") -> str:
    """Contour plot of a potential over the simplex triangle in plane
    coordinates, with minima marked."""
    finite = values[np.isfinite(values)]
    lo, hi = float(finite.min()), float(finite.max())
    span = hi - lo
    levels = [lo + span * (k + 1) / (n_levels + 1) for k in range(n_levels)]
    extent = (float(xs[0]), float(xs[-1]), float(ys[0]), float(ys[-1]))
    canvas = SvgCanvas(extent, size=size)
    canvas.frame(title)
    vals = np.where(np.isfinite(values), values, np.nan)
    for level in levels:
        for (ax, ay), (bx, by) in contour_segments(xs, ys, vals, level):
            canvas.polyline([(ax, ay), (bx, by)], color="#555", width=0.8)
    for x, y in minima:
        canvas.circle(x, y)
    return canvas.render()
