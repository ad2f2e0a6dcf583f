"""Finding, classifying and counting stationary points of the landscape.

The workhorse is a damped Newton iteration on the local gradient run from
every interior node of a barycentric seed lattice.  Converged roots are
deduplicated in triangle plane coordinates and classified through the
Hessian spectrum.  ``census`` wraps this into the minima count that settles
which cell of the phase diagram a parameter point belongs to, and
``brute_force_global_min`` is the slow grid oracle used to cross-check
global-minimizer claims in the tests.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .model import (DEFAULT_TOL, ModelParams, SpinDistribution,
                    ToleranceConfig, batch_free_energy, batch_gradient,
                    batch_hessian, batch_xy, hessian_eigenvalues)


class PointKind(enum.Enum):
    MINIMUM = "minimum"
    SADDLE = "saddle"
    MAXIMUM = "maximum"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class StationaryPoint:
    nu: SpinDistribution
    hess_eigenvalues: tuple   # ascending
    kind: PointKind
    value: float              # free energy at nu


@dataclass(frozen=True)
class MinimaCensus:
    params: ModelParams
    points: tuple             # all stationary points, deterministic order
    n_local_minima: int
    global_minimizers: tuple  # the minima of least value within depth tol
    degenerate_warning: bool = False

    @property
    def minima(self) -> tuple:
        return tuple(p for p in self.points if p.kind is PointKind.MINIMUM)


def barycentric_grid(density: int, corner_margin: float = 1e-3) -> np.ndarray:
    """Interior nodes of the barycentric lattice of the given density,
    augmented with near-corner, near-edge-midpoint and centroid seeds."""
    i, j = np.meshgrid(np.arange(1, density), np.arange(1, density),
                       indexing="ij")
    keep = (i + j) <= density - 1
    i, j = i[keep], j[keep]
    pts = np.stack([i, j, density - i - j], axis=-1) / float(density)

    m = corner_margin
    extras = [(1 - 2 * m, m, m), (m, 1 - 2 * m, m), (m, m, 1 - 2 * m),
              (0.5 - m / 2, 0.5 - m / 2, m), (0.5 - m / 2, m, 0.5 - m / 2),
              (m, 0.5 - m / 2, 0.5 - m / 2),
              (1 / 3, 1 / 3, 1 / 3)]
    return np.vstack([pts, np.asarray(extras)])


def _clamp_interior(nu: np.ndarray, margin: float) -> np.ndarray:
    """Project rows of (n, 3) back into the simplex with the given margin."""
    out = np.maximum(nu, margin)
    s12 = out[:, 0] + out[:, 1]
    over = s12 > 1.0 - margin
    if np.any(over):
        scale = (1.0 - margin) / s12[over]
        out[over, 0] *= scale
        out[over, 1] *= scale
    out[:, 2] = 1.0 - out[:, 0] - out[:, 1]
    return out


def newton_stationary(beta: float, alpha: np.ndarray, seeds: np.ndarray,
                      tol: ToleranceConfig = DEFAULT_TOL,
                      max_iter: int = 200, max_halvings: int = 40) -> np.ndarray:
    """Damped Newton on the local gradient from each seed row.

    Backtracks by step halving until the gradient norm decreases; seeds that
    cannot decrease within ``max_halvings`` or do not converge within
    ``max_iter`` are dropped.  Returns the converged points, shape (m, 3).
    """
    nu = _clamp_interior(np.array(seeds, dtype=float), tol.clamp_margin)
    active = np.ones(len(nu), dtype=bool)
    done = np.zeros(len(nu), dtype=bool)

    g = batch_gradient(beta, alpha, nu)
    gnorm = np.linalg.norm(g, axis=-1)

    for _ in range(max_iter):
        conv = active & (gnorm <= tol.residual)
        done |= conv
        active &= ~conv
        if not np.any(active):
            break

        idx = np.flatnonzero(active)
        n_a, g_a = nu[idx], g[idx]
        h = batch_hessian(beta, n_a)
        a, b, c = h[:, 0, 0], h[:, 0, 1], h[:, 1, 1]
        det = a * c - b * b
        ok_det = np.abs(det) > 1e-300
        safe = np.where(ok_det, det, 1.0)
        d1 = np.where(ok_det, -(c * g_a[:, 0] - b * g_a[:, 1]) / safe, 0.0)
        d2 = np.where(ok_det, -(a * g_a[:, 1] - b * g_a[:, 0]) / safe, 0.0)
        # cap the step at the simplex diameter scale
        step_len = np.hypot(d1, d2)
        big = step_len > 1.0
        d1[big] /= step_len[big]
        d2[big] /= step_len[big]

        lam = np.ones(len(idx))
        improved = np.zeros(len(idx), dtype=bool)
        trial = n_a.copy()
        trial_gn = gnorm[idx].copy()
        for _ in range(max_halvings):
            todo = ~improved
            if not np.any(todo):
                break
            cand = n_a[todo].copy()
            cand[:, 0] += lam[todo] * d1[todo]
            cand[:, 1] += lam[todo] * d2[todo]
            cand[:, 2] = 1.0 - cand[:, 0] - cand[:, 1]
            cand = _clamp_interior(cand, tol.clamp_margin)
            gn_new = np.linalg.norm(batch_gradient(beta, alpha, cand), axis=-1)
            better = gn_new < gnorm[idx][todo]
            sub = np.flatnonzero(todo)
            acc = sub[better]
            trial[acc] = cand[better]
            trial_gn[acc] = gn_new[better]
            improved[acc] = True
            lam[sub[~better]] *= 0.5

        improved &= ok_det
        nu[idx[improved]] = trial[improved]
        gnorm[idx[improved]] = trial_gn[improved]
        g[idx[improved]] = batch_gradient(beta, alpha, nu[idx[improved]])
        # seeds that could not decrease the gradient norm are dropped
        active[idx[~improved]] = False

    return nu[done | (gnorm <= tol.residual)]


def _dedupe_xy(points: np.ndarray, radius: float) -> np.ndarray:
    """Deduplicate (n, 3) rows by Euclidean radius in plane coordinates,
    keeping a deterministic lexicographic order."""
    if len(points) == 0:
        return points
    xy = batch_xy(points)
    order = np.lexsort((xy[:, 1], xy[:, 0]))
    reps: list = []
    reps_xy: list = []
    for k in order:
        p = xy[k]
        if all((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 > radius * radius
               for q in reps_xy):
            reps.append(points[k])
            reps_xy.append(p)
    return np.asarray(reps)


def classify(beta: float, nu, tol: ToleranceConfig = DEFAULT_TOL):
    """(eig_lo, eig_hi, PointKind) for one simplex point."""
    eigs = hessian_eigenvalues(beta, np.asarray(nu, dtype=float))
    lo, hi = float(eigs[0]), float(eigs[1])
    if min(abs(lo), abs(hi)) <= tol.degenerate_eig:
        kind = PointKind.DEGENERATE
    elif lo > 0.0:
        kind = PointKind.MINIMUM
    elif hi < 0.0:
        kind = PointKind.MAXIMUM
    else:
        kind = PointKind.SADDLE
    return lo, hi, kind


def stationary_points_from_seeds(beta: float, alpha: np.ndarray,
                                 seeds: np.ndarray,
                                 tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """Converge, deduplicate and classify stationary points from an
    arbitrary seed array, ordered lexicographically in plane coordinates."""
    roots = newton_stationary(beta, alpha, seeds, tol)
    roots = _dedupe_xy(roots, tol.merge_radius)
    if len(roots) == 0:
        raise NumericalError(
            "no stationary point converged; a smooth landscape with "
            "boundary divergence has at least one minimum")
    out = []
    for row in roots:
        lo, hi, kind = classify(beta, row, tol)
        value = float(batch_free_energy(beta, alpha, row))
        out.append(StationaryPoint(SpinDistribution.from_array(row),
                                   (lo, hi), kind, value))
    return out


def find_stationary_points(params: ModelParams, grid_density: int = 64,
                           tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """All stationary points reachable from the seed lattice, deduplicated
    and classified, ordered lexicographically in plane coordinates."""
    if grid_density < 8:
        raise DomainError(f"grid_density must be >= 8, got {grid_density}")
    seeds = barycentric_grid(grid_density)
    return stationary_points_from_seeds(params.beta, params.alpha.array,
                                        seeds, tol)


def census(params: ModelParams, grid_density: int = 64,
           tol: ToleranceConfig = DEFAULT_TOL) -> MinimaCensus:
    """Count local minima and extract the set of global minimizers."""
    points = find_stationary_points(params, grid_density, tol)
    minima = [p for p in points if p.kind is PointKind.MINIMUM]
    degenerate = any(p.kind is PointKind.DEGENERATE for p in points)
    if minima:
        vmin = min(p.value for p in minima)
        glob = tuple(p for p in minima if p.value <= vmin + tol.depth)
    else:
        glob = ()
    return MinimaCensus(params=params, points=tuple(points),
                        n_local_minima=len(minima), global_minimizers=glob,
                        degenerate_warning=degenerate)


def brute_force_global_min(params: ModelParams, grid_density: int = 200,
                           tol: ToleranceConfig = DEFAULT_TOL) -> SpinDistribution:
    """Grid-scan oracle for the global minimizer: argmin of the free energy
    over a dense barycentric lattice, refined by one Newton run."""
    if grid_density < 100:
        raise DomainError(f"grid_density must be >= 100, got {grid_density}")
    grid = barycentric_grid(grid_density)
    values = batch_free_energy(params.beta, params.alpha.array, grid)
    best = grid[int(np.argmin(values))]
    refined = newton_stationary(params.beta, params.alpha.array,
                                best[None, :], tol)
    point = refined[0] if len(refined) else best
    return SpinDistribution.from_array(point)
