"""Cell detection in a planar curve arrangement by raster flood fill.

The slice curves partition the field plane into cells on which the number
of local minima is constant.  Curves are rasterized onto a boolean grid
with 8-connected line drawing (which 4-connected flood fill cannot leak
across); the free pixels are then segmented into connected components.
One probe point per component, at or near the component centroid, is
handed to the caller for a census.  Components thinner than two pixels
everywhere are flagged unresolved rather than probed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Region:
    """One connected component of the complement of the drawn curves."""

    label: int
    n_pixels: int
    centroid: tuple       # plane coordinates of the pixel centroid
    probe: tuple          # in-component point to census, near the centroid
    resolved: bool        # False when nowhere 2 pixels thick
    touches_border: bool  # clipped by the raster window


def _draw_segment(grid: np.ndarray, x0: int, y0: int, x1: int, y1: int) -> None:
    """Bresenham line; marks an 8-connected set of pixels."""
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    n = grid.shape[0]
    while True:
        if 0 <= x0 < n and 0 <= y0 < n:
            grid[x0, y0] = True
        if x0 == x1 and y0 == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def rasterize_curves(polylines: list, extent: tuple, resolution: int = 512) -> np.ndarray:
    """Mark curve pixels on a resolution^2 grid covering the extent
    (xmin, xmax, ymin, ymax).  Segments with both ends far outside the
    window are skipped."""
    xmin, xmax, ymin, ymax = extent
    grid = np.zeros((resolution, resolution), dtype=bool)
    sx = (resolution - 1) / (xmax - xmin)
    sy = (resolution - 1) / (ymax - ymin)
    for line in polylines:
        pts = np.asarray(line, dtype=float)
        if len(pts) < 2:
            continue
        px = (pts[:, 0] - xmin) * sx
        py = (pts[:, 1] - ymin) * sy
        inside = ((px > -resolution) & (px < 2 * resolution)
                  & (py > -resolution) & (py < 2 * resolution))
        ix = np.round(px).astype(int)
        iy = np.round(py).astype(int)
        for k in range(len(pts) - 1):
            if not (inside[k] or inside[k + 1]):
                continue
            _draw_segment(grid, ix[k], iy[k], ix[k + 1], iy[k + 1])
    return grid


def _flood_components(free: np.ndarray) -> np.ndarray:
    """4-connected component labels of the free pixels (0 where blocked)."""
    n = free.shape[0]
    labels = np.zeros_like(free, dtype=np.int32)
    current = 0
    todo = free.copy()
    while True:
        seeds = np.argwhere(todo)
        if len(seeds) == 0:
            break
        current += 1
        frontier = np.zeros_like(free)
        frontier[seeds[0, 0], seeds[0, 1]] = True
        component = np.zeros_like(free)
        while frontier.any():
            component |= frontier
            grown = np.zeros_like(free)
            grown[1:, :] |= frontier[:-1, :]
            grown[:-1, :] |= frontier[1:, :]
            grown[:, 1:] |= frontier[:, :-1]
            grown[:, :-1] |= frontier[:, 1:]
            frontier = grown & todo & ~component
        labels[component] = current
        todo &= ~component
    return labels


def _has_thick_core(component: np.ndarray) -> bool:
    """True when some pixel has all four neighbours inside the component."""
    c = component
    core = c[1:-1, 1:-1] & c[:-2, 1:-1] & c[2:, 1:-1] & c[1:-1, :-2] & c[1:-1, 2:]
    return bool(core.any())


def label_regions(polylines: list, extent: tuple,
                  resolution: int = 512) -> list:
    """Segment the window into cells of the curve arrangement."""
    xmin, xmax, ymin, ymax = extent
    curve_mask = rasterize_curves(polylines, extent, resolution)
    labels = _flood_components(~curve_mask)
    regions = []
    hx = (xmax - xmin) / (resolution - 1)
    hy = (ymax - ymin) / (resolution - 1)
    for lab in range(1, labels.max() + 1):
        mask = labels == lab
        pix = np.argwhere(mask)
        cx, cy = pix.mean(axis=0)
        centroid = (xmin + cx * hx, ymin + cy * hy)
        ci, cj = int(round(cx)), int(round(cy))
        if not mask[ci, cj]:
            k = int(np.argmin(((pix - [cx, cy]) ** 2).sum(axis=1)))
            ci, cj = pix[k]
        probe = (xmin + ci * hx, ymin + cj * hy)
        touches = bool(mask[0, :].any() or mask[-1, :].any()
                       or mask[:, 0].any() or mask[:, -1].any())
        regions.append(Region(label=lab, n_pixels=int(mask.sum()),
                              centroid=centroid, probe=probe,
                              resolved=_has_thick_core(mask),
                              touches_border=touches))
    return regions
