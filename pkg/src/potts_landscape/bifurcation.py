"""Closed-form geometry of the degenerate-stationary-point set.

For fixed inverse temperature the degenerate stationary points form the
symmetrized graph of an explicit algebraic function ``gamma`` over a union
of intervals; pushing that graph through the field map yields the
constant-temperature slice of the bifurcation set.  Globally the set is the
image of two explicit patches assigning to every simplex point the two
inverse temperatures at which it is degenerate.  A local Taylor expansion
of the slice at its on-axis cusp provides the diagnostics for the unfolding
at the butterfly temperature 18/7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError, RemovableSingularityError
from .model import (Permutation, PERMUTATIONS, batch_catastrophe,
                    batch_degeneracy_lhs, batch_from_xy, batch_uv, batch_xy)
from .rootfind import bisect_then_newton

BETA_BEAK = 8.0 / 3.0


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    include_hi: bool = False

    def contains(self, x: float) -> bool:
        if self.include_hi:
            return self.lo < x <= self.hi
        return self.lo < x < self.hi

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class DomainIntervals:
    """Parameter domain of ``gamma`` at one inverse temperature."""

    beta: float
    intervals: tuple

    def contains(self, x: float) -> bool:
        return any(iv.contains(x) for iv in self.intervals)

    @property
    def is_empty(self) -> bool:
        return len(self.intervals) == 0


@dataclass(frozen=True)
class SliceCurve:
    """One sampled branch of a constant-temperature slice.

    Samples stay inside a single connected interval of the parameter
    domain; ``branch`` is the permutation applied to the base curve.
    """

    beta: float
    branch: Permutation
    interval_index: int
    x_param: np.ndarray   # (n,)
    nu: np.ndarray        # (n, 3)
    alpha: np.ndarray     # (n, 3)


@dataclass(frozen=True)
class SurfacePatch:
    """Samples of one sheet of the parametric bifurcation surface."""

    sign: int             # +1 or -1
    nu: np.ndarray        # (n, 3)
    beta: np.ndarray      # (n,)
    alpha: np.ndarray     # (n, 3)
    skipped: int          # grid points dropped near the corners


def domain_intervals(beta: float) -> DomainIntervals:
    """The exact interval case split; empty for beta <= 2.

    Regime boundaries follow the case labels as written: 8/3 belongs to the
    middle case and 3 to the last.  Zero-length intervals (the middle one
    collapses at beta = 3) are omitted.
    """
    beta = float(beta)
    if beta <= 2.0:
        return DomainIntervals(beta, ())
    r_fold = 1.0 - 2.0 / beta
    s2 = math.sqrt(1.0 - 2.0 / beta)
    lo2, hi2 = 0.5 - 0.5 * s2, 0.5 + 0.5 * s2
    if beta < BETA_BEAK:
        ivs = [Interval(0.0, r_fold, include_hi=True), Interval(lo2, hi2)]
    else:
        s8 = math.sqrt(max(1.0 - 8.0 / (3.0 * beta), 0.0))
        m_lo, m_hi = 0.5 - 0.5 * s8, 0.5 + 0.5 * s8
        if beta < 3.0:
            ivs = [Interval(0.0, lo2), Interval(r_fold, m_lo),
                   Interval(m_hi, hi2)]
        else:
            ivs = [Interval(0.0, lo2), Interval(m_lo, r_fold),
                   Interval(m_hi, hi2)]
    # the middle interval collapses at beta = 3; drop rounding-width stubs
    return DomainIntervals(beta, tuple(iv for iv in ivs if iv.length > 1e-12))


def discriminant_roots(beta: float) -> list:
    """Roots of the discriminant (3 b x - 2)(2 - b(1-x))(2 - 3 b x(1-x)),
    ascending.  The quadratic factor contributes only for beta >= 8/3."""
    beta = float(beta)
    if beta <= 2.0:
        raise DomainError(f"discriminant roots require beta > 2, got {beta}")
    roots = [2.0 / (3.0 * beta), 1.0 - 2.0 / beta]
    if beta >= BETA_BEAK:
        s8 = math.sqrt(max(1.0 - 8.0 / (3.0 * beta), 0.0))
        roots += [0.5 - 0.5 * s8, 0.5 + 0.5 * s8]
    return sorted(roots)


def _gamma_unchecked(beta: float, x) -> np.ndarray:
    """Closed-form branch of the degeneracy quadratic; no domain check.

    The square-root argument is clamped at zero so that interval endpoints,
    where the two branches merge, do not produce NaN from rounding.
    """
    x = np.asarray(x, dtype=float)
    denom = beta * (2.0 - 3.0 * beta * x)
    arg = (1.0 - x) ** 2 - 4.0 * (1.0 - 2.0 * beta * x * (1.0 - x)) / denom
    arg = np.maximum(arg, 0.0)
    return 0.5 * (1.0 - x - np.sqrt(arg))


def gamma(beta: float, x: float) -> float:
    """Second simplex component of the degenerate point with first
    component ``x``; defined for ``x`` in the interval domain."""
    beta = float(beta)
    x = float(x)
    dom = domain_intervals(beta)
    singular = abs(2.0 - 3.0 * beta * x) <= 1e-12
    if singular:
        near = dom.contains(x) or any(
            min(abs(x - iv.lo), abs(x - iv.hi)) <= 1e-9 for iv in dom.intervals)
        if near:
            raise RemovableSingularityError(
                f"x = 2/(3 beta) = {2.0 / (3.0 * beta)!r} is a removable "
                "singularity of the closed form; the curve extends "
                "continuously through it (with limit value 1/4 at "
                "beta = 8/3)")
    if not dom.contains(x):
        raise DomainError(
            f"x = {x!r} is outside the parameter domain at beta = {beta!r}")
    return float(_gamma_unchecked(beta, x))


def _cos_spaced(lo: float, hi: float, n: int, include_hi: bool) -> np.ndarray:
    """Strictly interior samples of (lo, hi) clustered like sqrt spacing at
    both endpoints, optionally appending the right endpoint."""
    t = (np.arange(n) + 1.0) / (n + 1.0)
    xs = lo + (hi - lo) * 0.5 * (1.0 - np.cos(np.pi * t))
    if include_hi:
        xs = np.append(xs, hi)
    return xs


def slice_curves(beta: float, samples_per_interval: int = 400) -> list:
    """All six permutation branches of the constant-temperature slice,
    one SliceCurve per (branch, domain interval)."""
    beta = float(beta)
    if beta <= 2.0:
        raise DomainError(f"slice requires beta > 2, got {beta}")
    if samples_per_interval < 2:
        raise DomainError("samples_per_interval must be >= 2")
    dom = domain_intervals(beta)
    curves = []
    for perm in PERMUTATIONS:
        for k, iv in enumerate(dom.intervals):
            xs = _cos_spaced(iv.lo, iv.hi, samples_per_interval, iv.include_hi)
            g = _gamma_unchecked(beta, xs)
            nu = np.stack([xs, g, 1.0 - xs - g], axis=-1)
            alpha = batch_catastrophe(beta, nu)
            curves.append(SliceCurve(beta=beta, branch=perm,
                                     interval_index=k, x_param=xs,
                                     nu=perm.apply(nu),
                                     alpha=perm.apply(alpha)))
    return curves


def surface_patches(grid_density: int = 64, beta_cap: float = 1e8):
    """Evaluate both surface sheets on a barycentric grid of the simplex.

    Returns (plus, minus) SurfacePatch.  Grid points whose sheet value
    exceeds ``beta_cap`` (possible arbitrarily close to the corners) are
    skipped and counted.
    """
    if grid_density < 16:
        raise DomainError(f"grid_density must be >= 16, got {grid_density}")
    i, j = np.meshgrid(np.arange(1, grid_density),
                       np.arange(1, grid_density), indexing="ij")
    keep = (i + j) <= grid_density - 1
    nu = np.stack([i[keep], j[keep],
                   grid_density - i[keep] - j[keep]], axis=-1) / float(grid_density)
    if grid_density % 3 != 0:  # make sure the pinch point itself is sampled
        nu = np.vstack([nu, np.full((1, 3), 1.0 / 3.0)])

    inv = 1.0 / nu
    s1 = inv.sum(axis=-1)
    s2 = (inv[:, 0] * inv[:, 1] + inv[:, 0] * inv[:, 2]
          + inv[:, 1] * inv[:, 2])
    disc = np.maximum(s1 * s1 / 9.0 - s2 / 3.0, 0.0)
    root = np.sqrt(disc)

    patches = []
    for sign in (+1, -1):
        beta = s1 / 3.0 + sign * root
        ok = np.isfinite(beta) & (beta > 0.0) & (beta <= beta_cap)
        alpha = batch_catastrophe(beta[ok], nu[ok])
        patches.append(SurfacePatch(sign=sign, nu=nu[ok], beta=beta[ok],
                                    alpha=alpha, skipped=int((~ok).sum())))
    return patches[0], patches[1]


def degenerate_locus_xy(beta: float, x, y):
    """Degeneracy condition in triangle plane coordinates:

    (1/9) (6 b (x^2+y^2-1) + b^2 (2y+1)((y-1)^2 - 3x^2) + 9).

    Identical to the simplex form after coordinate conversion; its zero set
    is the set of degenerate stationary points in the plane.
    """
    b = float(beta)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    val = (6.0 * b * (x * x + y * y - 1.0)
           + b * b * (2.0 * y + 1.0) * ((y - 1.0) ** 2 - 3.0 * x * x)
           + 9.0) / 9.0
    return val if val.ndim else float(val)


@dataclass(frozen=True)
class ButterflyCoefficients:
    """Scalar coefficients of the slice expansion at the on-axis cusp.

    c2 and c4 multiply the symmetric direction (1, 1) at orders x^2 and x^4,
    c3 multiplies the antisymmetric direction (-1, 1) at order x^3.
    """

    beta: float
    c2: float
    c3: float
    c4: float
    y0: float


def _axis_cusp_root(beta: float) -> float:
    """Negative root of 2 b^2 y^3 + 3 b (2-b) y^2 + (b-3)^2 on (-1, 0)."""
    def cubic(y):
        return 2 * beta ** 2 * y ** 3 + 3 * beta * (2 - beta) * y ** 2 + (beta - 3) ** 2

    def dcubic(y):
        return 6 * beta ** 2 * y ** 2 + 6 * beta * (2 - beta) * y

    if not cubic(-1.0) < 0.0 < cubic(0.0):
        raise DomainError(
            f"cusp root of the axis cubic is not bracketed in (-1, 0) at "
            f"beta = {beta}")
    return bisect_then_newton(cubic, -1.0, 0.0, dcubic)


def _locus_branch_y(beta: float, x: float, y_near: float) -> float:
    """Solve the plane degeneracy condition for y near ``y_near``."""
    y = y_near
    for _ in range(100):
        f = degenerate_locus_xy(beta, x, y)
        # d/dy of the plane form
        df = (12.0 * beta * y
              + beta * beta * (2.0 * ((y - 1.0) ** 2 - 3.0 * x * x)
                               + (2.0 * y + 1.0) * 2.0 * (y - 1.0))) / 9.0
        if df == 0.0:
            break
        step = f / df
        y -= step
        if abs(step) < 1e-15 * max(1.0, abs(y)):
            return y
    if abs(degenerate_locus_xy(beta, x, y)) > 1e-10:
        raise NumericalError(f"locus branch solve failed at x = {x}")
    return y


def butterfly_expansion(beta: float, step: float = 1e-3) -> ButterflyCoefficients:
    """Taylor diagnostics of the slice at its on-axis cusp for 2 < beta < 8/3.

    The degenerate locus through the cusp is the graph of an even function
    of x; its push-forward through the field map, written in log-ratio
    target coordinates, splits into a symmetric (even-order) and an
    antisymmetric (odd-order) component.  The x^2, x^3, x^4 coefficients are
    recovered from samples at x = step, 2*step, 4*step by solving the small
    Vandermonde system, which removes the two lowest truncation orders
    (two Richardson levels).
    """
    beta = float(beta)
    if not 2.0 < beta < BETA_BEAK:
        raise DomainError(
            f"butterfly expansion requires 2 < beta < 8/3, got {beta}")
    y0 = _axis_cusp_root(beta)

    def uv_on_locus(x: float, y_seed: float):
        y = _locus_branch_y(beta, x, y_seed)
        nu = batch_from_xy([x, y])
        return batch_uv(batch_catastrophe(beta, nu)), y

    base_uv, _ = uv_on_locus(0.0, y0)
    s0 = 0.5 * (base_uv[0] + base_uv[1])

    hs = np.array([step, 2.0 * step, 4.0 * step])
    sym = np.empty(3)
    asym = np.empty(3)
    y_seed = y0
    for k, h in enumerate(hs):
        uv, y_seed = uv_on_locus(float(h), y_seed)
        sym[k] = 0.5 * (uv[0] + uv[1]) - s0
        asym[k] = 0.5 * (uv[1] - uv[0])

    vand_even = np.stack([hs ** 2, hs ** 4, hs ** 6], axis=-1)
    vand_odd = np.stack([hs, hs ** 3, hs ** 5], axis=-1)
    s2, s4, _ = np.linalg.solve(vand_even, sym)
    _, a3, _ = np.linalg.solve(vand_odd, asym)
    return ButterflyCoefficients(beta=beta, c2=float(s2), c3=float(a3),
                                 c4=float(s4), y0=y0)


def slice_points_pq(curves) -> np.ndarray:
    """Concatenated field-plane coordinates of a list of slice curves."""
    from .model import batch_pq
    return np.concatenate([batch_pq(c.alpha) for c in curves], axis=0)


def check_slice_consistency(curves, tol: float = 1e-9) -> float:
    """Largest |degeneracy condition| over all samples of the curves."""
    worst = 0.0
    for c in curves:
        res = np.abs(batch_degeneracy_lhs(c.beta, c.nu))
        worst = max(worst, float(res.max()))
    if worst > tol:
        raise NumericalError(f"slice samples violate the degeneracy "
                             f"condition: max residual {worst}")
    return worst
