import dataclasses
import math

import numpy as np
import pytest

from ccdeg import catalog
from ccdeg import expr as ex
from ccdeg.errors import ToolkitError, UnclassifiedContactError
from ccdeg.geometry import Box
from ccdeg.ivp import (
    INVIABLE_UP,
    NOT_ADMISSIBLE,
    VIABLE,
    DiscontinuityCurve,
    IVProblem,
    Trajectory,
    apriori_bound,
    classify_all,
    classify_curve,
    picard_iterate,
    solve_ivp,
    validate_problem,
    verify_solution,
)
from ccdeg.maps import Inequality, Piece, PiecewiseMap, Region

T_VAR = ex.Var(0)
X_VAR = ex.Var(1)


def dense_error(traj, exact, t0=0.0, t1=2.0, n=4001):
    return max(abs(traj.at(t) - exact(t)) for t in np.linspace(t0, t1, n))


class TestClassification:
    def test_spike_line_is_crossed_upward(self):
        p = catalog.spike_crossing_problem()
        r = classify_curve(p, p.curves[0], eps=0.5, psi=0.5)
        assert r.kind == INVIABLE_UP
        assert r.psi == 0.5
        # The margin is set by the off-line value 1, not by the spike.
        assert r.margin_up == pytest.approx(1.0)

    def test_zero_valued_line_is_viable(self):
        p = catalog.sliding_problem()
        r = classify_curve(p, p.curves[0])
        assert r.kind == VIABLE
        assert r.viability_gap <= 1e-9

    def test_attractive_contact_is_not_admissible(self):
        p = catalog.blocked_problem()
        r = classify_curve(p, p.curves[0])
        assert r.kind == NOT_ADMISSIBLE
        assert r.margin_up < 0 and r.margin_down < 0

    def test_margin_search_finds_witness(self):
        p = catalog.crossing_problem()
        r = classify_curve(p, dataclasses.replace(p.curves[0], psi=None))
        assert r.kind == INVIABLE_UP
        assert r.psi is not None and 0 < r.psi < r.margin_up

    def test_classify_all_fills_curves(self):
        p = classify_all(catalog.sliding_problem())
        assert p.curves[0].classification == VIABLE


class TestSolve:
    def test_crossing(self):
        p = classify_all(catalog.crossing_problem())
        traj = solve_ivp(p, 0.01)
        assert dense_error(traj, lambda t: -1.0 + t) < 1e-8
        assert len(traj.crossings) == 1
        assert traj.crossings[0].t == pytest.approx(1.0, abs=1e-9)
        assert traj.at(2.0) == pytest.approx(1.0, abs=1e-9)

    def test_spike_value_is_invisible(self):
        p = classify_all(catalog.spike_crossing_problem())
        traj = solve_ivp(p, 0.01)
        assert dense_error(traj, lambda t: -1.0 + t) < 1e-8
        assert traj.crossings[0].t == pytest.approx(1.0, abs=1e-9)

    def test_sliding(self):
        p = classify_all(catalog.sliding_problem())
        traj = solve_ivp(p, 0.01)
        assert dense_error(traj, lambda t: max(1.0 - t, 0.0)) < 1e-8
        assert len(traj.slidings) == 1
        sl = traj.slidings[0]
        assert sl.t_start == pytest.approx(1.0, abs=1e-9)
        assert sl.t_end == pytest.approx(2.0, abs=1e-12)
        assert traj.at(2.0) == 0.0

    def test_zero_field(self):
        pieces = (Piece(Region(), (ex.Const(0.0),)),)
        strip = PiecewiseMap(Box((0.0, -2.0), (1.0, 2.0)), pieces, ("t", "x"))
        p = IVProblem(0.0, 1.0, 0.7, strip, ex.Const(0.0), ex.Const(0.0))
        traj = solve_ivp(p, 0.05)
        assert all(x == 0.7 for x in traj.xs)

    def test_not_admissible_contact_refused(self):
        p = classify_all(catalog.blocked_problem())
        with pytest.raises(UnclassifiedContactError):
            solve_ivp(p, 0.01)

    def test_unclassified_curves_rejected(self):
        p = catalog.crossing_problem()
        with pytest.raises(ToolkitError, match="classified"):
            solve_ivp(p, 0.01)

    def test_start_on_viable_curve_slides(self):
        p = classify_all(catalog.sliding_problem())
        p = dataclasses.replace(p, x_start=0.0)
        traj = solve_ivp(p, 0.01)
        assert traj.slidings[0].t_start == 0.0
        assert all(abs(x) <= 1e-12 for x in traj.xs)

    def test_uncovered_interface_is_an_error(self):
        # A genuine jump at x = 0 with no declared curve.
        pieces = (
            Piece(Region((Inequality(X_VAR, strict=True),)), (ex.Const(1.0),)),
            Piece(Region((Inequality(ex.Unary("neg", X_VAR)),)), (ex.Const(0.5),)),
        )
        strip = PiecewiseMap(Box((0.0, -3.0), (2.0, 3.0)), pieces, ("t", "x"))
        p = IVProblem(0.0, 2.0, -1.0, strip, ex.Const(1.0), T_VAR)
        with pytest.raises(ToolkitError, match="not covered"):
            solve_ivp(p, 0.01)

    def test_time_direction_switch_needs_no_curve(self):
        # f jumps at t = 1 only: integrable without any declared curve.
        pieces = (
            Piece(Region((Inequality(ex.Binary("-", T_VAR, ex.Const(1.0))),)),
                  (ex.Const(1.0),)),
            Piece(Region(), (ex.Const(-1.0),)),
        )
        strip = PiecewiseMap(Box((0.0, -3.0), (2.0, 3.0)), pieces, ("t", "x"))
        p = IVProblem(0.0, 2.0, 0.0, strip, ex.Const(1.0), T_VAR)
        traj = solve_ivp(p, 0.01)
        exact = lambda t: t if t <= 1.0 else 2.0 - t
        assert dense_error(traj, exact) < 1e-8


class TestVerify:
    def test_crossing_residual(self):
        p = classify_all(catalog.crossing_problem())
        rep = verify_solution(p, solve_ivp(p, 0.01), 1e-6)
        assert rep.passed and rep.r_max < 1e-6

    def test_sliding_residual(self):
        p = classify_all(catalog.sliding_problem())
        rep = verify_solution(p, solve_ivp(p, 0.01), 1e-6)
        assert rep.passed and rep.r_max < 1e-6

    def test_corrupted_trajectory_fails(self):
        p = classify_all(catalog.crossing_problem())
        traj = solve_ivp(p, 0.01)
        xs = tuple(x + (0.1 if t >= 1.0 else 0.0) for t, x in zip(traj.ts, traj.xs))
        bad = Trajectory(traj.ts, xs, traj.crossings, traj.slidings, traj.curves)
        rep = verify_solution(p, bad, 1e-6)
        assert not rep.passed
        assert rep.r_max == pytest.approx(0.1, abs=1e-3)

    def test_modulus_violation_detected(self):
        p = classify_all(catalog.crossing_problem())
        traj = solve_ivp(p, 0.1)
        xs = list(traj.xs)
        xs[3] = xs[3] + 0.5  # jump faster than the bound allows
        bad = Trajectory(traj.ts, tuple(xs), traj.crossings, traj.slidings, traj.curves)
        rep = verify_solution(p, bad, 1e-3)
        assert not rep.modulus_ok and not rep.passed

    def test_residual_scales_like_h_squared(self):
        p = catalog.decay_problem()
        r_coarse = verify_solution(p, solve_ivp(p, 0.1), 1.0).r_max
        r_fine = verify_solution(p, solve_ivp(p, 0.05), 1.0).r_max
        assert 3.0 <= r_coarse / r_fine <= 5.0

    def test_verify_at_ten_h_squared(self):
        for build in (catalog.crossing_problem, catalog.sliding_problem):
            p = classify_all(build())
            for h in (0.1, 0.05):
                rep = verify_solution(p, solve_ivp(p, h), 10.0 * h * h)
                assert rep.passed


class TestInvariants:
    def test_apriori_bound_and_modulus(self):
        for build in (catalog.crossing_problem, catalog.sliding_problem,
                      catalog.spike_crossing_problem):
            p = classify_all(build())
            traj = solve_ivp(p, 0.02)
            assert traj.sup_norm() <= apriori_bound(p) + 1e-12
            rep = verify_solution(p, traj, 1e-6)
            assert rep.modulus_ok

    def test_sliding_consistency(self):
        p = classify_all(catalog.sliding_problem())
        traj = solve_ivp(p, 0.01)
        for sl in traj.slidings:
            c = traj.curves[sl.curve]
            assert c.classification == VIABLE
            for t in np.linspace(sl.t_start, sl.t_end, 101):
                assert abs(traj.at(t) - c.value(t)) <= 1e-12

    def test_crossing_consistency(self):
        p = classify_all(catalog.crossing_problem())
        traj = solve_ivp(p, 0.01)
        for cr in traj.crossings:
            c = traj.curves[cr.curve]
            assert c.classification == INVIABLE_UP
            delta = 1e-3
            assert traj.at(cr.t - delta) < c.value(cr.t - delta)
            assert traj.at(cr.t + delta) > c.value(cr.t + delta)

    def test_picard_iterates_stay_in_modulus_set(self):
        p = classify_all(catalog.crossing_problem())
        res = picard_iterate(p, n=3, grid=257)
        cum = [0.0]
        for t0, t1 in zip(res.ts, res.ts[1:]):
            cum.append(cum[-1] + (t1 - t0))  # bound is 1
        for i in range(0, len(res.ts), 16):
            for j in range(i + 1, len(res.ts), 16):
                assert abs(res.xs[j] - res.xs[i]) <= cum[j] - cum[i] + 1e-9


class TestPicard:
    def test_decay_contracts_geometrically(self):
        res = picard_iterate(catalog.decay_problem(), n=10)
        ratios = [b / a for a, b in zip(res.deltas, res.deltas[1:]) if a > 1e-14]
        assert max(ratios) < 0.6

    def test_zero_field_one_step(self):
        pieces = (Piece(Region(), (ex.Const(0.0),)),)
        strip = PiecewiseMap(Box((0.0, -2.0), (1.0, 2.0)), pieces, ("t", "x"))
        p = IVProblem(0.0, 1.0, 0.25, strip, ex.Const(0.0), ex.Const(0.0))
        res = picard_iterate(p, n=2)
        assert res.deltas[0] == 0.0

    def test_crossing_converges_to_solution(self):
        p = classify_all(catalog.crossing_problem())
        res = picard_iterate(p, n=20, grid=513)
        assert res.deltas[-1] < 1e-4
        err = max(abs(x - (-1.0 + t)) for t, x in zip(res.ts, res.xs))
        assert err < 1e-6

    def test_needs_positive_iterations(self):
        with pytest.raises(ToolkitError):
            picard_iterate(catalog.decay_problem(), n=0)


class TestAprioriBound:
    def test_unit_bound_short_interval(self):
        pieces = (Piece(Region(), (ex.Const(0.0),)),)
        strip = PiecewiseMap(Box((0.0, -2.0), (1.0, 2.0)), pieces, ("t", "x"))
        p = IVProblem(0.0, 1.0, 0.0, strip, ex.Const(1.0), T_VAR)
        assert apriori_bound(p) == pytest.approx(1.0)

    def test_crossing_problem_bound(self):
        assert apriori_bound(catalog.crossing_problem()) == pytest.approx(3.0)

    def test_linear_bound(self):
        pieces = (Piece(Region(), (ex.Const(0.0),)),)
        strip = PiecewiseMap(Box((0.0, -4.0), (2.0, 4.0)), pieces, ("t", "x"))
        p = IVProblem(0.0, 2.0, 1.0, strip, T_VAR)
        assert apriori_bound(p) == pytest.approx(3.0, abs=1e-10)

    def test_quadrature_matches_antiderivative(self):
        p = catalog.crossing_problem()
        without = dataclasses.replace(p, bound_antiderivative=None)
        assert apriori_bound(without) == pytest.approx(apriori_bound(p), abs=1e-10)


class TestValidation:
    def test_bundled_problems_validate(self):
        for build in (catalog.crossing_problem, catalog.sliding_problem,
                      catalog.spike_crossing_problem, catalog.blocked_problem,
                      catalog.decay_problem):
            assert validate_problem(build()).ok, build.__name__

    def test_bound_violation_reported(self):
        pieces = (Piece(Region(), (ex.Const(2.0),)),)
        strip = PiecewiseMap(Box((0.0, -2.0), (1.0, 2.0)), pieces, ("t", "x"))
        p = IVProblem(0.0, 1.0, 0.0, strip, ex.Const(1.0))
        v = validate_problem(p)
        assert not v.ok
        assert any("bound violated" in s for s in v.issues)

    def test_uncovered_interface_reported(self):
        pieces = (
            Piece(Region((Inequality(X_VAR, strict=True),)), (ex.Const(1.0),)),
            Piece(Region(), (ex.Const(0.5),)),
        )
        strip = PiecewiseMap(Box((0.0, -3.0), (2.0, 3.0)), pieces, ("t", "x"))
        p = IVProblem(0.0, 2.0, -1.0, strip, ex.Const(1.0))
        v = validate_problem(p)
        assert not v.ok
        assert any("not covered" in s for s in v.issues)

    def test_continuous_interface_needs_no_curve(self):
        # Both sides evaluate to 1: the seam is not a discontinuity.
        p = catalog.crossing_problem()
        stripped = dataclasses.replace(p, curves=())
        assert validate_problem(stripped).ok


def test_trajectory_csv_rows():
    p = classify_all(catalog.sliding_problem())
    traj = solve_ivp(p, 0.1)
    rows = list(traj.csv_rows())
    assert rows[0] == ("t", "x", "event")
    assert len(rows) == len(traj.ts) + 1
    assert any("sliding:0" in r[2] for r in rows)
