import math

import numpy as np
import pytest

import potts_landscape as pl
from potts_landscape.maxwell import (axis_minima, axis_slice_crossings,
                                     ivp_tangent, segment_upper_endpoint_y,
                                     track_segment_pair, _AxisTracker)
from potts_landscape.model import batch_uv, batch_xy
from potts_landscape.stationary import PointKind

AUNIFORM = pl.AprioriMeasure.uniform()
EW = 4.0 * math.log(2.0)


class TestSymmetricSegment:
    def test_empty_at_onset(self):
        assert pl.symmetric_segment(2.0).is_empty
        assert pl.symmetric_segment(1.4).is_empty

    def test_closed_form_endpoint(self):
        seg = pl.symmetric_segment(2.4)
        e = (2.4 - 2.0) * math.exp(3.0 - 2.4)
        expected = -(1.0 - e) / (2.0 + e)
        assert seg.y_hi == pytest.approx(expected, abs=1e-12)
        assert seg.y_hi == pytest.approx(-0.0994, abs=1e-4)
        assert seg.y_lo == -0.5

    def test_midpoint_has_two_mirror_global_minima(self):
        seg = pl.symmetric_segment(2.4)
        alpha = seg.alpha_at(0.5 * (seg.y_lo + seg.y_hi))
        cens = pl.census(pl.ModelParams(2.4, alpha))
        assert len(cens.global_minimizers) == 2
        a, b = (p.nu.array for p in cens.global_minimizers)
        assert np.abs(a - b[[1, 0, 2]]).max() <= 1e-8

    def test_truncated_at_triple_point(self):
        seg = pl.symmetric_segment(2.6)
        tp = pl.triple_point(2.6)
        assert seg.y_hi == pytest.approx(pl.to_xy(tp.alpha).y, abs=1e-12)

    def test_reaches_origin_beyond_four_phase(self):
        seg = pl.symmetric_segment(3.1)
        assert seg.y_hi == 0.0

    def test_segment_pair_tracking(self):
        pts = track_segment_pair(pl.symmetric_segment(2.4), n=10)
        assert len(pts) == 10
        for pt in pts:
            params = pl.ModelParams(2.4, pt.alpha)
            va = pl.free_energy(params, pt.minimizers[0])
            vb = pl.free_energy(params, pt.minimizers[1])
            assert abs(va - vb) <= 1e-12


class TestAxisStructure:
    def test_crossings_bound_three_minima_window(self):
        crossings = axis_slice_crossings(2.6)
        assert len(crossings) == 2
        lo, hi = crossings
        inside = 0.5 * (lo + hi)
        sym, asym = axis_minima(2.6, inside)
        assert len(sym) >= 1 and len(asym) == 1
        sym_b, asym_b = axis_minima(2.6, lo - 0.002)
        sym_a, asym_a = axis_minima(2.6, hi + 0.002)
        assert (len(sym_b) == 0) or (len(asym_a) == 0)

    def test_depth_gap_has_single_sign_change(self):
        # scan the three-minima window: monotone gap, exactly one crossing
        lo, hi = axis_slice_crossings(2.6)
        width = hi - lo
        ys = np.linspace(lo + 0.02 * width, hi - 0.02 * width, 41)
        sym, asym = axis_minima(2.6, float(ys[0]))
        tracker = _AxisTracker(2.6, float(ys[0]), sym, asym[0], pl.DEFAULT_TOL)
        gaps = np.array([tracker.gap(float(y)) for y in ys])
        signs = np.sign(gaps)
        changes = int(np.sum(signs[:-1] != signs[1:]))
        assert changes == 1


class TestTriplePoint:
    def test_domain_validated(self):
        with pytest.raises(pl.DomainError):
            pl.triple_point(2.5)
        with pytest.raises(pl.DomainError):
            pl.triple_point(2.8)

    def test_equal_depths_and_mirror_pair(self):
        tp = pl.triple_point(2.6)
        params = pl.ModelParams(2.6, tp.alpha)
        values = [pl.free_energy(params, m) for m in tp.minimizers]
        assert max(values) - min(values) <= 1e-8
        xs = sorted(float(batch_xy(m.array)[0]) for m in tp.minimizers)
        assert xs[0] == pytest.approx(-xs[2], abs=1e-8)
        assert abs(xs[1]) <= 1e-8

    def test_minimizers_are_global(self):
        tp = pl.triple_point(2.6)
        cens = pl.census(pl.ModelParams(2.6, tp.alpha))
        assert cens.n_local_minima == 3
        found = np.stack([p.nu.array for p in cens.global_minimizers])
        for m in tp.minimizers:
            assert np.abs(found - m.array).max(axis=1).min() <= 1e-6

    def test_equivariance(self):
        tp = pl.triple_point(2.6)
        base = np.stack([m.array for m in tp.minimizers])
        for perm in pl.PERMUTATIONS:
            alpha = perm.apply(tp.alpha)
            cens = pl.census(pl.ModelParams(2.6, alpha))
            got = np.stack([p.nu.array for p in cens.global_minimizers])
            expected = perm.apply(base)
            assert len(got) == len(expected)
            # match nearest neighbours: depths are equivariant to full
            # precision, positions to the flat-valley conditioning
            for row in expected:
                assert np.abs(got - row).max(axis=1).min() <= 1e-6
            values = [p.value for p in cens.global_minimizers]
            assert max(values) - min(values) <= 1e-8
            assert abs(values[0] - tp.depth) <= 1e-8

    def test_approaches_uniform_at_four_phase_temperature(self):
        far = pl.triple_point(2.70)
        near = pl.triple_point(EW - 5e-4)
        d_far = np.abs(far.alpha.array - 1.0 / 3.0).max()
        d_near = np.abs(near.alpha.array - 1.0 / 3.0).max()
        assert d_near < d_far
        assert d_near < 5e-3


@pytest.fixture(scope="module")
def curve26():
    tp = pl.triple_point(2.6)
    return pl.coexistence_curve(2.6, step=0.005, origin=tp)


class TestCoexistenceCurve:

    def test_leaves_axis_and_folds(self, curve26):
        assert curve26.status == "fold"
        assert len(curve26.points) >= 20
        uv = np.array([batch_uv(p.alpha.array) for p in curve26.points])
        off_axis = np.abs(uv[:, 0] - uv[:, 1])
        assert off_axis[4] > 0.0
        assert off_axis.max() > 1e-4

    def test_points_pass_independent_census(self, curve26):
        # every sampled curve point carries the tracked pair as equally
        # deep global minima; near the fold the census may report the
        # almost-degenerate pair as several nearby copies, so positions
        # are matched loosely while depths are held to 1e-8
        pts = curve26.points
        sample = [pts[k] for k in
                  np.linspace(1, len(pts) - 10, 8, dtype=int)]
        for p in sample:
            cens = pl.census(pl.ModelParams(2.6, p.alpha))
            assert len(cens.global_minimizers) >= 2
            found = np.stack([g.nu.array for g in cens.global_minimizers])
            for m in p.minimizers:
                assert np.abs(found - m.array).max(axis=1).min() <= 1e-3
            values = [g.value for g in cens.global_minimizers]
            assert max(values) - min(values) <= 1e-8
            assert abs(values[0] - p.depth) <= 1e-8

    def test_tangent_matches_ivp(self, curve26):
        pts = curve26.points
        checked = 0
        for a, b in zip(pts[:-4], pts[1:-3]):
            ua, va = batch_uv(a.alpha.array)
            ub, vb = batch_uv(b.alpha.array)
            if abs(ub - ua) < 1e-14:
                continue
            secant = (vb - va) / (ub - ua)
            rhs = 0.5 * (ivp_tangent(a) + ivp_tangent(b))
            assert abs(secant - rhs) <= 1e-3 * (1.0 + abs(secant))
            checked += 1
        assert checked >= 10

    def test_gap_decreases_monotonically_at_fold(self, curve26):
        gaps = [np.linalg.norm(p.minimizers[0].array - p.minimizers[1].array)
                for p in curve26.points[-11:]]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-5

    def test_step_validated(self):
        with pytest.raises(pl.DomainError):
            pl.coexistence_curve(2.6, step=0.5)

    def test_hexagon_regime_terminates_on_boundary(self):
        tp = pl.triple_point(2.75)
        curve = pl.coexistence_curve(2.75, step=0.005, origin=tp)
        assert curve.status in ("boundary", "fold")
        assert len(curve.points) >= 5


class TestBeyondFourPhase:
    def test_domain_validated(self):
        with pytest.raises(pl.DomainError):
            pl.beyond_ellis_wang_segment(2.7)

    def test_four_global_minima_at_the_point(self):
        bew = pl.beyond_ellis_wang_segment(EW)
        assert bew.n_uniform_global == 4
        values = [p.value for p in bew.uniform_census.global_minimizers]
        assert max(values) - min(values) <= 1e-8

    def test_three_beyond(self):
        bew = pl.beyond_ellis_wang_segment(3.2)
        assert bew.n_uniform_global == 3
        kinds = {p.kind for p in bew.uniform_census.points}
        assert PointKind.MAXIMUM in kinds

    def test_segment_midpoint_two_global_minima(self):
        # the coexistence segment runs along the symmetry axis from the
        # bottom edge midpoint to the origin; census at its midpoint
        bew = pl.beyond_ellis_wang_segment(2.9)
        seg = bew.segment
        assert (seg.y_lo, seg.y_hi) == (-0.5, 0.0)
        alpha = seg.alpha_at(-0.25)
        cens = pl.census(pl.ModelParams(2.9, alpha))
        assert len(cens.global_minimizers) == 2
        a, b = (p.nu.array for p in cens.global_minimizers)
        assert np.abs(a - b[[1, 0, 2]]).max() <= 1e-8


class TestAxisSymmetry:
    def test_brute_force_set_mirror_invariant(self):
        # with the first two field components equal and below the third,
        # the set of global minimizers is invariant under swapping the
        # first two spin components
        for beta, y in ((2.3, 0.1), (2.75, 0.05), (3.1, 0.2)):
            alpha = pl.alpha_from_xy(pl.CoordXY(0.0, y))
            assert alpha.a1 == alpha.a2 < alpha.a3
            params = pl.ModelParams(beta, alpha)
            brute = pl.brute_force_global_min(params, 150)
            cens = pl.census(params, grid_density=48)
            found = np.stack([p.nu.array for p in cens.global_minimizers])
            for g in cens.global_minimizers:
                mirror = g.nu.array[[1, 0, 2]]
                assert np.abs(found - mirror).max(axis=1).min() <= 1e-8
            assert np.abs(found - brute.array).max(axis=1).min() <= 1e-5


class TestDepthOrderingInHexagon:
    def test_centre_is_lowest_before_four_phase(self):
        # between the crossing and four-phase temperatures the central
        # minimum is the global one in zero field
        cens = pl.census(pl.ModelParams(2.75, AUNIFORM))
        assert cens.n_local_minima == 4
        glob = cens.global_minimizers
        assert len(glob) == 1
        assert np.abs(glob[0].nu.array - 1.0 / 3.0).max() < 1e-8

    def test_corners_lower_beyond(self):
        cens = pl.census(pl.ModelParams(2.8, AUNIFORM))
        glob = cens.global_minimizers
        assert len(glob) == 3
        for g in glob:
            assert np.abs(g.nu.array - 1.0 / 3.0).max() > 0.2
