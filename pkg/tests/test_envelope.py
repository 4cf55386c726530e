import math

import numpy as np
import pytest

from ccdeg import catalog
from ccdeg import expr as ex
from ccdeg.envelope import (
    check_condition,
    default_schedule,
    envelope_exact,
    envelope_sampled,
    range_hull,
    scan_points,
)
from ccdeg.errors import ConvergenceError, ToolkitError
from ccdeg.geometry import Box, body_contains_body, contains, convex_hull, hausdorff_distance
from ccdeg.maps import Piece, PiecewiseMap, Region
from conftest import random_continuous_map

THIRD = 1.0 / 3.0


class TestEnvelopeExact:
    def test_half_staircase_at_jump(self):
        env = envelope_exact(catalog.half_staircase_map(), (THIRD,)).value
        assert abs(env.lo - 1.0 / 6.0) <= 1e-12
        assert abs(env.hi - THIRD) <= 1e-12

    def test_sign_split_at_zero(self):
        env = envelope_exact(catalog.sign_split_map(), (0.0,)).value
        assert (env.lo, env.hi) == (-0.5, 0.5)

    def test_continuous_maps_give_points(self, rng):
        for _ in range(10):
            m = random_continuous_map(rng)
            for x in np.linspace(-1.0, 1.0, 17):
                env = envelope_exact(m, (x,))
                assert env.value.is_point(1e-12)
                assert env.value.lo == pytest.approx(m.evaluate((x,))[0], abs=1e-15)

    def test_value_contains_map_value(self):
        for m in catalog.bundled_maps().values():
            pts = scan_points(m, m.domain, 41)
            for p in pts:
                env = envelope_exact(m, p)
                assert contains(env.value, m.evaluate(p), 1e-9)


class TestEnvelopeSampled:
    def test_locally_constant_is_point(self):
        res = envelope_sampled(catalog.staircase_map(), (0.5,), 1e-6)
        assert res.value.is_point(1e-12)
        assert res.value.lo == pytest.approx(2 * THIRD, abs=1e-12)

    def test_sign_split_matches_exact(self):
        res = envelope_sampled(catalog.sign_split_map(), (0.0,), 1e-3)
        exact = envelope_exact(catalog.sign_split_map(), (0.0,))
        assert hausdorff_distance(res.value, exact.value) <= 1e-3

    def test_half_staircase_matches_exact(self):
        res = envelope_sampled(catalog.half_staircase_map(), (THIRD,), 1e-3)
        exact = envelope_exact(catalog.half_staircase_map(), (THIRD,))
        assert hausdorff_distance(res.value, exact.value) <= 1e-3

    def test_agreement_on_all_bundled_interfaces(self):
        tol = 1e-3
        for name, m in catalog.bundled_maps().items():
            for p in m.interface_points(resolution=256):
                exact = envelope_exact(m, p).value
                sampled = envelope_sampled(m, p, tol).value
                assert hausdorff_distance(exact, sampled) <= 5 * tol, (name, p)

    def test_trace_hulls_shrink(self):
        tol = 1e-3
        for m in catalog.bundled_maps().values():
            for p in m.interface_points(resolution=256):
                res = envelope_sampled(m, p, tol)
                trace = res.epsilon_trace
                for (_, prev_hull, _), (_, next_hull, _) in zip(trace, trace[1:]):
                    assert body_contains_body(prev_hull, next_hull, tol)

    def test_schedule_must_decrease(self):
        m = catalog.staircase_map()
        with pytest.raises(ToolkitError, match="strictly decreasing"):
            envelope_sampled(m, (0.5,), 1e-6, schedule=[0.1, 0.1, 0.01])
        with pytest.raises(ToolkitError, match="below the tolerance"):
            envelope_sampled(m, (0.5,), 1e-6, schedule=[0.1, 0.01])

    def test_minimum_samples(self):
        with pytest.raises(ToolkitError, match="32 samples"):
            envelope_sampled(catalog.staircase_map(), (0.5,), 1e-6, samples_per_ball=8)

    def test_no_convergence_carries_trace(self):
        # Identity map: the hull over a radius-eps ball keeps width 2*eps,
        # so consecutive hulls differ by eps/2 and a schedule stopping at
        # a coarse radius cannot stabilize.
        ident = PiecewiseMap(
            Box((-1.0,), (1.0,)), (Piece(Region(), (ex.Var(0),)),)
        )
        with pytest.raises(ConvergenceError) as err:
            envelope_sampled(ident, (0.0,), 1e-6, schedule=[0.5, 0.25, 0.2, 0.9e-6])
        assert len(err.value.trace) >= 2

    def test_default_schedule_descends_below_tol(self):
        sched = default_schedule(catalog.staircase_map(), 1e-4)
        assert sched[0] == pytest.approx(1.0 / 8.0)
        assert sched[-1] < 1e-4
        assert all(b < a for a, b in zip(sched, sched[1:]))


class TestRangeConfinement:
    def test_envelopes_stay_in_value_hull(self, rng):
        # Piecewise-constant maps: every envelope lies in the hull of the
        # declared constants.
        from conftest import random_piecewise_map

        for _ in range(20):
            m = random_piecewise_map(rng)
            consts = []
            for piece in m.pieces:
                if isinstance(piece.outputs[0], ex.Const):
                    consts.append((piece.outputs[0].value,))
            if len(consts) < len(m.pieces):
                continue
            hull = convex_hull(consts)
            for p in scan_points(m, m.domain, 33):
                env = envelope_exact(m, p).value
                assert body_contains_body(hull, env, 1e-9)

    def test_range_hull_over_approximates(self):
        m = catalog.staircase_map()
        rh = range_hull(m)
        for p in scan_points(m, m.domain, 65):
            assert body_contains_body(rh, envelope_exact(m, p).value, 1e-9)


class TestMajorantMinimality:
    def test_staircase_envelope_inside_declared_hull(self):
        m = catalog.staircase_map()
        lower, upper = m.majorant
        for p in scan_points(m, m.domain, 101):
            env = envelope_exact(m, p).value
            lo = ex.evaluate(lower, p)
            hi = ex.evaluate(upper, p)
            for v in env.vertices:
                assert lo - 1e-9 <= v[0] <= hi + 1e-9


class TestCheckCondition:
    def test_staircase_holds(self):
        rep = check_condition(catalog.staircase_map())
        assert rep.verdict == "holds"
        assert rep.holds

    def test_half_staircase_fails_exactly_at_first_jump(self):
        rep = check_condition(catalog.half_staircase_map())
        assert rep.verdict == "fails"
        assert len(rep.violations) == 1
        v = rep.violations[0]
        assert v.point[0] == pytest.approx(THIRD, abs=1e-9)
        assert v.map_value[0] == pytest.approx(1.0 / 6.0, abs=1e-12)
        assert abs(v.envelope.lo - 1.0 / 6.0) <= 1e-12
        assert abs(v.envelope.hi - THIRD) <= 1e-12
        assert v.in_range_hull

    def test_continuous_maps_hold(self, rng):
        for _ in range(5):
            rep = check_condition(random_continuous_map(rng), grid=51)
            assert rep.holds

    def test_scan_must_be_inside_domain(self):
        with pytest.raises(ToolkitError):
            check_condition(catalog.staircase_map(), Box((0.0,), (2.0,)))

    def test_csv_rows(self):
        rep = check_condition(catalog.half_staircase_map(), grid=11)
        rows = list(rep.csv_rows())
        assert rows[0] == ("point", "map_value", "envelope", "violation")
        assert sum(1 for r in rows[1:] if r[3] == "1") == 1
        assert len(rows) == rep.scanned + 1

    def test_quadrant_shift_flags_origin(self):
        rep = check_condition(catalog.quadrant_shift_map_2d(), grid=33)
        assert rep.verdict == "fails"
        pts = [v.point for v in rep.violations]
        assert any(math.dist(p, (0.0, 0.0)) <= 1e-9 for p in pts)
        assert all(math.dist(p, (0.0, 0.0)) <= 1e-9 for p in pts)
