"""Stable phase diagram: equal-depth (coexistence) sets of global minima.

On the symmetry axis with the third field component suppressed the
coexistence set is a straight segment whose upper endpoint is known in
closed form up to the butterfly temperature and is the triple point beyond
it.  The triple point is located by bisecting the depth difference between
the mirror-symmetric pair of minima and the best symmetric minimum while
tracking all of them with Newton polishing.  Off the axis the coexistence
curve is continued by solving the field-free system

    stationary_value(mu) = stationary_value(nu),  chi(mu) = chi(nu)

for the two minimizers (mu, nu), sweeping one state coordinate per step
(the dominant tangent component, which is the first component of the
symmetric-side minimizer wherever that parametrization is well posed);
the initial-value-problem form of the curve is used only as a tangent
cross-check in the tests.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .critical import BETA_BUTTERFLY, BETA_ELLIS_WANG
from .errors import DomainError, NumericalError
from .model import (DEFAULT_TOL, AprioriMeasure, ModelParams,
                    SpinDistribution, ToleranceConfig, batch_catastrophe,
                    batch_free_energy, batch_from_xy, batch_stationary_value,
                    batch_xy, hessian_eigenvalues)
from .stationary import (MinimaCensus, PointKind, barycentric_grid, census,
                         newton_stationary, stationary_points_from_seeds)

_SWAP12 = (1, 0, 2)


@dataclass(frozen=True)
class CoexistencePoint:
    """One parameter point carrying its set of equal-depth minimizers."""

    beta: float
    alpha: AprioriMeasure
    minimizers: tuple      # SpinDistribution, 2 to 4 of them
    depth: float           # common free-energy value


@dataclass(frozen=True)
class CoexistenceCurve:
    """Off-axis coexistence branch traced from a triple point."""

    beta: float
    points: tuple          # CoexistencePoint, each with the tracked (mu, nu)
    origin: CoexistencePoint
    status: str            # 'fold' | 'boundary' | 'stalled' | 'max-steps'


@dataclass(frozen=True)
class AxisSegment:
    """Segment {x = 0} x (y_lo, y_hi) of the field triangle, on the
    symmetry axis with equal first two field components."""

    beta: float
    y_lo: float
    y_hi: float

    @property
    def is_empty(self) -> bool:
        return self.y_hi <= self.y_lo

    def alpha_at(self, y: float) -> AprioriMeasure:
        return AprioriMeasure.from_array(batch_from_xy([0.0, float(y)]))

    def sample_ys(self, n: int, inset: float = 0.02) -> np.ndarray:
        span = self.y_hi - self.y_lo
        return np.linspace(self.y_lo + inset * span,
                           self.y_hi - inset * span, n)


@dataclass(frozen=True)
class BeyondEllisWangSegment:
    segment: AxisSegment
    uniform_census: MinimaCensus

    @property
    def n_uniform_global(self) -> int:
        return len(self.uniform_census.global_minimizers)


def segment_upper_endpoint_y(beta: float) -> float:
    """Closed-form y-coordinate of the on-axis cusp terminating the
    symmetric coexistence segment, valid for 2 < beta <= 18/7:

    y = -(1 - (beta-2) e^{3-beta}) / (2 + (beta-2) e^{3-beta}).
    """
    e = (beta - 2.0) * math.exp(3.0 - beta)
    return -(1.0 - e) / (2.0 + e)


def symmetric_segment(beta: float, tol: ToleranceConfig = DEFAULT_TOL) -> AxisSegment:
    """Coexistence segment on the symmetry axis; empty for beta <= 2.

    Above the butterfly temperature the upper endpoint is the triple
    point's y-coordinate; from the four-phase temperature on it is 0.
    """
    beta = float(beta)
    if not (math.isfinite(beta) and beta > 0.0):
        raise DomainError(f"beta must be positive, got {beta!r}")
    if beta <= 2.0:
        return AxisSegment(beta, -0.5, -0.5)
    if beta <= BETA_BUTTERFLY:
        return AxisSegment(beta, -0.5, segment_upper_endpoint_y(beta))
    if beta < BETA_ELLIS_WANG:
        tp = triple_point(beta, tol=tol)
        y_triple = float(batch_xy(tp.alpha.array)[1])
        return AxisSegment(beta, -0.5, y_triple)
    return AxisSegment(beta, -0.5, 0.0)


def _alpha_on_axis(y: float) -> np.ndarray:
    return batch_from_xy([0.0, float(y)])


def _polish_minimum(beta: float, alpha: np.ndarray, seed: np.ndarray,
                    tol: ToleranceConfig, require_min: bool = True):
    """Newton-polish one seed; return the point or None if it is lost."""
    out = newton_stationary(beta, alpha, np.asarray(seed, float)[None, :], tol)
    if len(out) == 0:
        return None
    point = out[0]
    if require_min:
        eigs = hessian_eigenvalues(beta, point)
        if eigs[0] <= tol.degenerate_eig:
            return None
    return point


def _axis_seeds(n: int = 400, margin: float = 1e-3) -> np.ndarray:
    """Dense seeds along the symmetry axis nu1 = nu2, where minima can sit
    arbitrarily close to their saddle partners near the horn tips."""
    c = np.linspace(margin, 1.0 - margin, n)
    return np.stack([(1.0 - c) / 2.0, (1.0 - c) / 2.0, c], axis=-1)


def axis_minima(beta: float, y: float,
                tol: ToleranceConfig = DEFAULT_TOL,
                grid_density: int = 32):
    """Split the minima at the axis point with the given y-coordinate into
    symmetric ones (first two components equal) and the pair member with
    x > 0.  Returns (sym, asym) as lists of simplex arrays."""
    alpha = _alpha_on_axis(y)
    seeds = np.vstack([barycentric_grid(grid_density), _axis_seeds()])
    points = stationary_points_from_seeds(beta, alpha, seeds, tol)
    sym, asym = [], []
    for p in points:
        if p.kind is not PointKind.MINIMUM:
            continue
        x = float(batch_xy(p.nu.array)[0])
        if abs(x) <= 1e-7:
            sym.append(p.nu.array)
        elif x > 0.0:
            asym.append(p.nu.array)
    return sym, asym


def axis_slice_crossings(beta: float, samples_per_interval: int = 800) -> list:
    """y-coordinates in (-1/2, 0) at which the constant-temperature slice
    crosses the symmetry axis of the field triangle.  Between consecutive
    crossings the minima structure along the axis is constant."""
    from .bifurcation import _gamma_unchecked, slice_curves

    def axis_p(curve, x):
        g = _gamma_unchecked(beta, x)
        nu = np.array([x, g, 1.0 - x - g])
        alpha = batch_catastrophe(beta, curve.branch.apply(nu))
        return math.log(alpha[0] / alpha[1])

    ys = []
    for curve in slice_curves(beta, samples_per_interval):
        la = np.log(curve.alpha)
        p = la[:, 0] - la[:, 1]
        sign_change = np.flatnonzero(p[:-1] * p[1:] < 0.0)
        for k in sign_change:
            lo, hi = float(curve.x_param[k]), float(curve.x_param[k + 1])
            plo = axis_p(curve, lo)
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                pm = axis_p(curve, mid)
                if pm == 0.0:
                    lo = hi = mid
                    break
                if (pm > 0.0) == (plo > 0.0):
                    lo, plo = mid, pm
                else:
                    hi = mid
            x_star = 0.5 * (lo + hi)
            g = _gamma_unchecked(beta, x_star)
            nu = np.array([x_star, g, 1.0 - x_star - g])
            alpha = batch_catastrophe(beta, curve.branch.apply(nu))
            y = float(batch_xy(alpha)[1])
            if -0.5 + 1e-9 < y < -1e-9:
                ys.append(y)
    ys.sort()
    dedup = []
    for y in ys:
        if not dedup or y - dedup[-1] > 1e-9:
            dedup.append(y)
    return dedup


class _AxisTracker:
    """Newton-continued minima along the symmetry axis, giving the depth
    difference between the asymmetric pair and the best symmetric minimum.
    Moves in sub-steps so no branch is lost on large jumps."""

    max_substep = 0.01

    def __init__(self, beta, y, sym_points, asym_point, tol):
        self.beta = beta
        self.tol = tol
        self.y = float(y)
        self.sym = [np.array(p) for p in sym_points]
        self.asym = np.array(asym_point)
        self.best_sym = None

    def _advance(self, y: float) -> None:
        alpha = _alpha_on_axis(y)
        new_asym = _polish_minimum(self.beta, alpha, self.asym, self.tol)
        if new_asym is None or float(batch_xy(new_asym)[0]) <= 1e-9:
            raise NumericalError(
                f"lost the asymmetric minimum branch at axis point y = {y}")
        self.asym = new_asym
        survivors = []
        for s in self.sym:
            cand = _polish_minimum(self.beta, alpha, s, self.tol)
            if cand is not None and abs(float(batch_xy(cand)[0])) <= 1e-7:
                if all(np.abs(cand - kept).max() > 1e-9 for kept in survivors):
                    survivors.append(cand)
        if not survivors:
            raise NumericalError(
                f"lost all symmetric minima branches at axis point y = {y}")
        self.sym = survivors
        self.y = y

    def gap(self, y: float) -> float:
        dist = abs(y - self.y)
        n_sub = max(1, int(math.ceil(dist / self.max_substep)))
        for k in range(1, n_sub + 1):
            self._advance(self.y + (y - self.y) * k / n_sub)
        alpha = _alpha_on_axis(y)
        values = [float(batch_free_energy(self.beta, alpha, s))
                  for s in self.sym]
        self.best_sym = self.sym[int(np.argmin(values))]
        f_asym = float(batch_free_energy(self.beta, alpha, self.asym))
        return f_asym - min(values)


def triple_point(beta: float, tol: ToleranceConfig = DEFAULT_TOL,
                 grid_density: int = 32) -> CoexistencePoint:
    """The on-axis point where the mirror pair and the symmetric minimum
    are equally deep, for butterfly < beta < four-phase temperature.

    The slice crossings partition the axis into windows of constant minima
    structure; inside the (unique) window holding both the pair and a
    symmetric minimum the depth difference is bisected to equality.
    """
    beta = float(beta)
    if not BETA_BUTTERFLY < beta < BETA_ELLIS_WANG:
        raise DomainError(
            f"triple point requires 18/7 < beta < 4 log 2, got {beta}")

    crossings = axis_slice_crossings(beta)
    edges = [-0.5] + crossings + [0.0]
    bracket = None
    for a, b in zip(edges, edges[1:]):
        inset = 0.02 * (b - a)
        y_lo, y_hi = a + inset, b - inset
        sym, asym = axis_minima(beta, 0.5 * (a + b), tol, grid_density)
        if not (sym and asym):
            continue
        tracker = _AxisTracker(beta, 0.5 * (a + b), sym, asym[0], tol)
        try:
            g_lo = tracker.gap(y_lo)
            g_hi = tracker.gap(y_hi)
        except NumericalError:
            continue
        if (g_lo > 0.0) != (g_hi > 0.0):
            if bracket is not None:
                raise NumericalError(
                    f"multiple depth-equality windows on the axis at "
                    f"beta = {beta}")
            bracket = (y_lo, g_lo, y_hi, g_hi, tracker)
    if bracket is None:
        raise NumericalError(
            f"no depth-equality sign change found on the axis at beta = {beta}")

    y_lo, g_lo, y_hi, g_hi, tracker = bracket
    for _ in range(100):
        if y_hi - y_lo <= 1e-13:
            break
        mid = 0.5 * (y_lo + y_hi)
        g_mid = tracker.gap(mid)
        if g_mid == 0.0:
            y_lo = y_hi = mid
            break
        if (g_mid > 0.0) == (g_lo > 0.0):
            y_lo, g_lo = mid, g_mid
        else:
            y_hi = mid

    y_star = 0.5 * (y_lo + y_hi)
    tracker.gap(y_star)
    alpha = _alpha_on_axis(y_star)
    asym = tracker.asym
    mirror = _polish_minimum(beta, alpha, asym[list(_SWAP12)], tol)
    if mirror is None:
        raise NumericalError("lost the mirror minimum while polishing the "
                             "triple point")
    minimizers = np.array([asym, mirror, tracker.best_sym])
    values = batch_free_energy(beta, alpha, minimizers)
    if float(values.max() - values.min()) > tol.coexistence_depth:
        raise NumericalError(
            f"triple-point depths disagree beyond tolerance: {values}")

    xy = batch_xy(minimizers)
    order = np.lexsort((xy[:, 1], xy[:, 0]))
    return CoexistencePoint(
        beta=beta,
        alpha=AprioriMeasure.from_array(alpha),
        minimizers=tuple(SpinDistribution.from_array(minimizers[k])
                         for k in order),
        depth=float(values.mean()),
    )


# ---------------------------------------------------------------------------
# Field-free coexistence system and its continuation
# ---------------------------------------------------------------------------

def _pair_from_state(w: np.ndarray):
    """State vector (mu1, mu2, nu1, nu2) -> the two simplex points."""
    mu = np.array([w[0], w[1], 1.0 - w[0] - w[1]])
    nu = np.array([w[2], w[3], 1.0 - w[2] - w[3]])
    return mu, nu


def _pair_residual(beta: float, w: np.ndarray) -> np.ndarray:
    mu, nu = _pair_from_state(w)
    if mu.min() <= 0.0 or nu.min() <= 0.0:
        return np.full(3, np.nan)
    both = np.stack([mu, nu])
    sv = batch_stationary_value(beta, both)
    chi = batch_catastrophe(beta, both)
    return np.array([sv[0] - sv[1],
                     chi[0, 0] - chi[1, 0],
                     chi[0, 1] - chi[1, 1]])


def _sv_chi_derivs(beta: float, w: np.ndarray):
    """Local-coordinate derivatives of the stationary value and the first
    two field-map components at one simplex point."""
    t = w * np.exp(-beta * w)
    tp = (1.0 - beta * w) * np.exp(-beta * w)
    T = t.sum()
    dT = np.array([tp[0] - tp[2], tp[1] - tp[2]])
    dsv = beta * (w[:2] - w[2]) + dT / T
    # d t_i / d w_a in local coordinates is delta_{ia} tp_i for i in {0, 1}
    dchi = np.empty((2, 2))
    for i in range(2):
        dti = np.zeros(2)
        dti[i] = tp[i]
        dchi[i] = (dti * T - t[i] * dT) / (T * T)
    return dsv, dchi


def _pair_jacobian(beta: float, w: np.ndarray) -> np.ndarray:
    """Jacobian of the field-free system over (mu1, mu2, nu1, nu2)."""
    mu, nu = _pair_from_state(w)
    dsv_mu, dchi_mu = _sv_chi_derivs(beta, mu)
    dsv_nu, dchi_nu = _sv_chi_derivs(beta, nu)
    jac = np.zeros((3, 4))
    jac[0, :2] = dsv_mu
    jac[1, :2] = dchi_mu[0]
    jac[2, :2] = dchi_mu[1]
    jac[0, 2:] = -dsv_nu
    jac[1, 2:] = -dchi_nu[0]
    jac[2, 2:] = -dchi_nu[1]
    return jac


def _pair_tangent(beta: float, w: np.ndarray) -> np.ndarray:
    """Unit tangent of the solution curve: nullspace of the 3x4 Jacobian."""
    _, _, vt = np.linalg.svd(_pair_jacobian(beta, w))
    return vt[-1]


def _solve_pair_pinned(beta: float, w0: np.ndarray, pivot: int,
                       res_tol: float = 1e-12, max_iter: int = 60):
    """Damped Newton on the field-free system with one state coordinate
    frozen; returns the full state vector or None."""
    w = np.array(w0, dtype=float)
    free = [k for k in range(4) if k != pivot]
    r = _pair_residual(beta, w)
    if not np.all(np.isfinite(r)):
        return None
    rn = np.linalg.norm(r)
    for _ in range(max_iter):
        if rn <= res_tol:
            return w
        jac = _pair_jacobian(beta, w)[:, free]
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            return None
        lam, improved = 1.0, False
        for _ in range(40):
            cand = w.copy()
            cand[free] += lam * step
            rc = _pair_residual(beta, cand)
            if np.all(np.isfinite(rc)) and np.linalg.norm(rc) < rn:
                w, r, rn = cand, rc, np.linalg.norm(rc)
                improved = True
                break
            lam *= 0.5
        if not improved:
            return None
    return w if rn <= res_tol else None


def _min_eig_pair(beta: float, w: np.ndarray) -> float:
    mu, nu = _pair_from_state(w)
    eigs = hessian_eigenvalues(beta, np.stack([mu, nu]))
    return float(eigs[:, 0].min())


def _pair_gap(w: np.ndarray) -> float:
    mu, nu = _pair_from_state(w)
    return float(np.linalg.norm(mu - nu))


def coexistence_curve(beta: float, step: float = 0.005,
                      tol: ToleranceConfig = DEFAULT_TOL,
                      origin: CoexistencePoint = None,
                      max_steps: int = 5000) -> CoexistenceCurve:
    """Continue the equal-depth locus of the two same-cell minima away from
    the triple point, seeding every solve with the previous solution.

    Stepping is predictor-corrector along the solution curve of the
    field-free system: the curve tangent (nullspace of the 3x4 Jacobian
    over both minimizers' local coordinates) picks the sweep coordinate to
    freeze per step, which keeps the sweep well-posed where the first
    component of the symmetric-side minimizer turns around.  The starting
    direction is the one whose points carry the tracked pair as the global
    minimizers (census probe); the opposite direction continues a
    metastable branch.  Termination: the pair merging into a degenerate
    point (gap below 1e-6, the curve end lies on the bifurcation set), one
    minimizer losing minimality there (boundary), or a persistent solver
    stall after step halving.
    """
    beta = float(beta)
    if not 1e-5 < step <= 1e-1:
        raise DomainError(f"step must lie in (1e-5, 1e-1], got {step}")
    tp = origin if origin is not None else triple_point(beta, tol=tol)

    sym = next(p.array for p in tp.minimizers
               if abs(float(batch_xy(p.array)[0])) <= 1e-7)
    asym = next(p.array for p in tp.minimizers
                if float(batch_xy(p.array)[0]) > 1e-7)
    w_start = np.array([sym[0], sym[1], asym[0], asym[1]])

    def attempt(w, tangent, h):
        """One predictor-corrector step of length h; returns the new state,
        'degenerate' if a minimizer dies there, or None on failure."""
        pred = w + h * tangent
        pivot = int(np.argmax(np.abs(tangent)))
        w_new = _solve_pair_pinned(beta, pred, pivot)
        if w_new is None:
            return None
        mu_n, nu_n = _pair_from_state(w_new)
        if mu_n.min() <= tol.clamp_margin or nu_n.min() <= tol.clamp_margin:
            return None
        if np.abs(w_new - w).max() > 0.1 + 10.0 * h:
            return None
        gap_prev, gap_new = _pair_gap(w), _pair_gap(w_new)
        if gap_new < 0.25 * gap_prev:  # hopped onto the trivial mu == nu set
            return None
        # a minimizer annihilating against a saddle ends the curve on the
        # bifurcation set; eigenvalues also vanish when the pair merges
        # into a cusp, which instead terminates via the gap criterion
        if (_min_eig_pair(beta, w_new) <= tol.degenerate_eig
                and gap_new > 1e-3):
            return "degenerate"
        return w_new

    def oriented_tangent(w, reference):
        t = _pair_tangent(beta, w)
        return t if float(np.dot(t, reference)) >= 0.0 else -t

    def probe_direction(t0):
        """Walk a few steps and accept the orientation only if the tracked
        pair is precisely the global minimizer set there."""
        w = w_start.copy()
        t = t0
        for _ in range(4):
            got = attempt(w, t, step)
            if got is None or isinstance(got, str):
                return None
            w = got
            t = oriented_tangent(w, t)
        mu, nu = _pair_from_state(w)
        alpha = AprioriMeasure.from_array(batch_catastrophe(beta, nu))
        cens = census(ModelParams(beta, alpha), grid_density=48, tol=tol)
        if len(cens.global_minimizers) != 2:
            return None
        found = np.stack([p.nu.array for p in cens.global_minimizers])
        for tracked in (mu, nu):
            if np.abs(found - tracked).max(axis=1).min() > 1e-6:
                return None
        return True

    t_base = _pair_tangent(beta, w_start)
    t_first = None
    for t0 in (t_base, -t_base):
        if probe_direction(t0):
            t_first = t0
            break
    if t_first is None:
        raise NumericalError(
            f"could not leave the triple point at beta = {beta}")

    points = []

    def emit(w):
        mu, nu = _pair_from_state(w)
        alpha = batch_catastrophe(beta, nu)
        depth = float(batch_stationary_value(beta, nu))
        points.append(CoexistencePoint(
            beta=beta, alpha=AprioriMeasure.from_array(alpha),
            minimizers=(SpinDistribution.from_array(mu),
                        SpinDistribution.from_array(nu)),
            depth=depth))

    w = w_start.copy()
    tangent = t_first
    status = "max-steps"
    h = step
    while len(points) < max_steps:
        gap = _pair_gap(w)
        if gap < 1e-6:
            status = "fold"
            break
        h_eff = min(h, max(gap / 3.0, 1e-7)) if gap < 1e-2 else h
        got = attempt(w, tangent, h_eff)
        if isinstance(got, str):
            status = "boundary"
            break
        if got is None:
            h *= 0.5
            if h < 1e-6:
                status = "stalled" if gap > 1e-3 else "fold"
                break
            continue
        w = got
        tangent = oriented_tangent(w, tangent)
        emit(w)
        h = min(step, 2.0 * h)

    return CoexistenceCurve(beta=beta, points=tuple(points), origin=tp,
                            status=status)


def ivp_tangent(point: CoexistencePoint) -> float:
    """Right-hand side -(nu1 - mu1)/(nu2 - mu2) of the coexistence-curve
    initial value problem in log-ratio field coordinates."""
    mu, nu = point.minimizers[0].array, point.minimizers[1].array
    return -(nu[0] - mu[0]) / (nu[1] - mu[1])


def beyond_ellis_wang_segment(beta: float,
                              tol: ToleranceConfig = DEFAULT_TOL,
                              grid_density: int = 64) -> BeyondEllisWangSegment:
    """Axis coexistence segment {x = 0} x (-1/2, 0) for beta at or beyond
    the four-phase temperature, with the zero-field census attached (four
    equal global minima exactly at the four-phase temperature, three
    beyond it)."""
    beta = float(beta)
    if beta < BETA_ELLIS_WANG - 1e-12:
        raise DomainError(
            f"segment requires beta >= 4 log 2, got {beta}")
    depth_tol = dataclasses.replace(tol, depth=tol.coexistence_depth)
    cens = census(ModelParams(beta, AprioriMeasure.uniform()),
                  grid_density=grid_density, tol=depth_tol)
    return BeyondEllisWangSegment(segment=AxisSegment(beta, -0.5, 0.0),
                                  uniform_census=cens)


def track_segment_pair(segment: AxisSegment, n: int = 40,
                       tol: ToleranceConfig = DEFAULT_TOL,
                       grid_density: int = 48) -> list:
    """Sample the axis segment and attach the mirror pair of global
    minimizers to each sample by Newton continuation from the midpoint."""
    if segment.is_empty:
        return []
    ys = segment.sample_ys(n)
    mid = n // 2
    _, asym = axis_minima(segment.beta, float(ys[mid]), tol, grid_density)
    if not asym:
        raise NumericalError(
            f"no mirror pair found at the segment midpoint, beta = "
            f"{segment.beta}")

    out: dict = {}

    def walk(indices, start):
        cur = np.array(start)
        for k in indices:
            alpha = _alpha_on_axis(ys[k])
            cur = _polish_minimum(segment.beta, alpha, cur, tol)
            if cur is None:
                break
            mirror = cur[list(_SWAP12)]
            vals = batch_free_energy(segment.beta, alpha,
                                     np.stack([cur, mirror]))
            out[k] = CoexistencePoint(
                beta=segment.beta,
                alpha=AprioriMeasure.from_array(alpha),
                minimizers=(SpinDistribution.from_array(cur),
                            SpinDistribution.from_array(mirror)),
                depth=float(vals.mean()))

    walk(range(mid, n), asym[0])
    walk(range(mid - 1, -1, -1), asym[0])
    return [out[k] for k in sorted(out)]
