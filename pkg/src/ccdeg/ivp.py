"""Scalar first-order ODEs with a piecewise right-hand side.

The right-hand side f(t, x) is a PiecewiseMap over the (t, x) strip whose
x-direction interfaces must be covered by declared discontinuity curves.
Each curve is classified by sampling:

* viable: the curve itself solves the equation (its slope matches the
  field along it), so trajectories may follow it (sliding);
* inviable (up or down): the field keeps a uniform margin away from the
  curve slope throughout an eps-tube, so trajectories cross transversally
  and spend zero time on the curve;
* not admissible: neither certificate holds; the solver refuses contact.

Integration is fixed-step RK4 between events.  Stage evaluations are kept
on the current side of each nearby curve, so steps never average values
across an interface; crossing and sliding-onset times are then bracketed
to 1e-12.  ``verify_solution`` checks the trajectory against the integral
form of the equation by adaptive quadrature, plus the integral modulus
bound that confines all candidate solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import expr as ex
from .errors import QuadratureError, ToolkitError, UnclassifiedContactError
from .geometry import Box
from .maps import PiecewiseMap, _line_roots

VIABLE = "viable"
INVIABLE_UP = "inviable_up"      # field exceeds the curve slope by the margin
INVIABLE_DOWN = "inviable_down"  # field stays below the curve slope by the margin
NOT_ADMISSIBLE = "not_admissible"

_ETA = 1e-12            # on-curve snap distance
_BRACKET_TOL = 1e-12    # event-time bisection tolerance


@dataclass(frozen=True)
class DiscontinuityCurve:
    """Absolutely continuous curve t -> gamma(t) on [t_lo, t_hi].

    ``gamma`` and ``dgamma`` are closed-form expressions in t.  The
    classification and its witnesses (tube radius eps, margin psi) are
    filled in by :func:`classify_curve` / :func:`classify_all`.
    """

    gamma: ex.Expr
    dgamma: ex.Expr
    t_lo: float
    t_hi: float
    eps: float = 0.5
    psi: float | None = None
    classification: str | None = None
    label: str = ""

    def value(self, t: float) -> float:
        return ex.evaluate(self.gamma, (t,))

    def slope(self, t: float) -> float:
        return ex.evaluate(self.dgamma, (t,))

    def active(self, t: float, tol: float = 1e-12) -> bool:
        return self.t_lo - tol <= t <= self.t_hi + tol


@dataclass(frozen=True)
class IVProblem:
    """x' = f(t, x) on [t_start, t_end] with x(t_start) = x_start.

    ``field_map`` is a piecewise map with input (t, x) and scalar output,
    defined on a strip wide enough to contain all candidate solutions
    (the a-priori bound |x_start| + integral of the bound function).
    ``bound`` is the integrable dominating function M(t); an optional
    closed-form antiderivative makes the modulus checks exact.
    """

    t_start: float
    t_end: float
    x_start: float
    field_map: PiecewiseMap
    bound: ex.Expr
    bound_antiderivative: ex.Expr | None = None
    curves: tuple[DiscontinuityCurve, ...] = ()

    def __post_init__(self):
        if self.field_map.in_dim != 2 or self.field_map.out_dim != 1:
            raise ToolkitError("the field map must take (t, x) to a scalar")
        dom = self.field_map.domain
        if dom.lo[0] > self.t_start + 1e-12 or dom.hi[0] < self.t_end - 1e-12:
            raise ToolkitError("the field strip must cover the time interval")

    def field(self, t: float, x: float) -> float:
        return self.field_map.evaluate((t, x))[0]

    @property
    def x_strip(self) -> tuple[float, float]:
        return (self.field_map.domain.lo[1], self.field_map.domain.hi[1])


@dataclass(frozen=True)
class CrossingEvent:
    t: float
    curve: int


@dataclass(frozen=True)
class SlidingInterval:
    t_start: float
    t_end: float
    curve: int


@dataclass(frozen=True)
class Trajectory:
    """Knots plus event log; piecewise linear except exactly on-curve while sliding."""

    ts: tuple[float, ...]
    xs: tuple[float, ...]
    crossings: tuple[CrossingEvent, ...] = ()
    slidings: tuple[SlidingInterval, ...] = ()
    curves: tuple[DiscontinuityCurve, ...] = ()

    def sliding_curve(self, t: float) -> int | None:
        # Bounds are exact knot values; fuzz would leak the on-curve field
        # value into neighbouring panels during quadrature.
        for sl in self.slidings:
            if sl.t_start <= t <= sl.t_end:
                return sl.curve
        return None

    def at(self, t: float) -> float:
        ts, xs = self.ts, self.xs
        if t <= ts[0]:
            return xs[0]
        if t >= ts[-1]:
            return xs[-1]
        idx = self.sliding_curve(t)
        if idx is not None:
            return self.curves[idx].value(t)
        import bisect

        i = bisect.bisect_right(ts, t) - 1
        if ts[i + 1] == ts[i]:
            return xs[i + 1]
        w = (t - ts[i]) / (ts[i + 1] - ts[i])
        return xs[i] + w * (xs[i + 1] - xs[i])

    def sup_norm(self) -> float:
        return max(abs(v) for v in self.xs)

    def csv_rows(self):
        yield ("t", "x", "event")
        cross_at = {round(c.t, 15): f"crossing:{c.curve}" for c in self.crossings}
        for t, x in zip(self.ts, self.xs):
            tags = []
            key = round(t, 15)
            if key in cross_at:
                tags.append(cross_at[key])
            idx = self.sliding_curve(t)
            if idx is not None:
                tags.append(f"sliding:{idx}")
            yield (repr(t), repr(x), "+".join(tags))


@dataclass(frozen=True)
class ClassificationResult:
    kind: str
    eps: float
    psi: float | None
    viability_gap: float      # max |gamma' - f(t, gamma)| over the t grid
    margin_up: float          # min over the tube of f - gamma'
    margin_down: float        # min over the tube of gamma' - f


def classify_curve(p: IVProblem, curve: DiscontinuityCurve, eps: float | None = None,
                   psi: float | None = None, t_grid: int = 1001,
                   y_grid: int = 101) -> ClassificationResult:
    """Classify one curve by dense sampling of the curve and its tube.

    Viability asks |gamma'(t) - f(t, gamma(t))| <= 1e-9 at every grid t
    (field read from the owning piece).  Inviability asks for a uniform
    margin psi > 0 between gamma' and every field value in the eps-tube,
    including the one-sided limits across the curve.  When psi is not
    supplied it is searched over {1, 1/2, 1/4, ...}.  The result is a
    numerical certificate at grid resolution, not a proof.
    """
    eps = eps if eps is not None else curve.eps
    psi = psi if psi is not None else curve.psi
    ts = np.linspace(curve.t_lo, curve.t_hi, t_grid)
    gammas = ex.evaluate_batch(curve.gamma, [ts])
    slopes = ex.evaluate_batch(curve.dgamma, [ts])

    on_curve = np.array([p.field(float(t), float(g)) for t, g in zip(ts, gammas)])
    viability_gap = float(np.max(np.abs(slopes - on_curve)))

    # Tube sampling: a vectorized lattice plus the one-sided limit values.
    offs = np.linspace(-eps, eps, y_grid)
    tt = np.repeat(ts, y_grid)
    yy = (gammas[:, None] + offs[None, :]).ravel()
    x_lo, x_hi = p.x_strip
    yy = np.clip(yy, x_lo, x_hi)
    fvals = p.field_map.evaluate_batch([tt, yy])[0].reshape(t_grid, y_grid)
    fmin = fvals.min(axis=1)
    fmax = fvals.max(axis=1)
    for i, (t, g) in enumerate(zip(ts, gammas)):
        for v in p.field_map.adjacent_values((float(t), float(g))):
            fmin[i] = min(fmin[i], v[0])
            fmax[i] = max(fmax[i], v[0])
    margin_up = float(np.min(fmin - slopes))
    margin_down = float(np.min(slopes - fmax))

    if viability_gap <= 1e-9:
        return ClassificationResult(VIABLE, eps, None, viability_gap, margin_up, margin_down)

    def margin_ok(m: float, candidate: float) -> bool:
        return candidate < m

    candidates = [psi] if psi is not None else [2.0 ** (-k) for k in range(21)]
    for cand in candidates:
        if cand is None or cand <= 0.0:
            continue
        if margin_ok(margin_up, cand):
            return ClassificationResult(INVIABLE_UP, eps, cand, viability_gap,
                                        margin_up, margin_down)
        if margin_ok(margin_down, cand):
            return ClassificationResult(INVIABLE_DOWN, eps, cand, viability_gap,
                                        margin_up, margin_down)
    return ClassificationResult(NOT_ADMISSIBLE, eps, None, viability_gap,
                                margin_up, margin_down)


def classify_all(p: IVProblem, t_grid: int = 1001, y_grid: int = 101) -> IVProblem:
    """Return a copy of the problem with every curve classified."""
    done = []
    for c in p.curves:
        r = classify_curve(p, c, t_grid=t_grid, y_grid=y_grid)
        done.append(replace(c, classification=r.kind, eps=r.eps, psi=r.psi))
    return replace(p, curves=tuple(done))


# ----------------------------------------------------------------------
# Integration.
# ----------------------------------------------------------------------

def _t_breaks(p: IVProblem) -> list[float]:
    """Times where steps must not straddle: curve endpoints and t-only interfaces."""
    breaks = {p.t_start, p.t_end}
    for c in p.curves:
        for v in (c.t_lo, c.t_hi):
            if p.t_start < v < p.t_end:
                breaks.add(v)
    x_mid = 0.5 * (p.x_strip[0] + p.x_strip[1])
    for piece in p.field_map.pieces:
        for q in piece.region.inequalities:
            if ex.variables(q.g) == {0}:
                for r in _line_roots(q.g, (p.t_start, x_mid), (p.t_end, x_mid), 2048):
                    if p.t_start < r[0] < p.t_end:
                        breaks.add(r[0])
    return sorted(breaks)


def _make_sided_field(p: IVProblem, sides: dict[int, int]):
    """Field evaluator that never samples beyond a curve being approached."""

    def f(s: float, xi: float) -> float:
        for idx, side in sides.items():
            c = p.curves[idx]
            if c.active(s):
                g = c.value(s)
                if side > 0 and xi < g + _ETA:
                    xi = g + _ETA
                elif side < 0 and xi > g - _ETA:
                    xi = g - _ETA
        return p.field(s, xi)

    return f


def _rk4(f, t: float, x: float, h: float) -> float:
    k1 = f(t, x)
    k2 = f(t + 0.5 * h, x + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, x + 0.5 * h * k2)
    k4 = f(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _bracket_event(f, curve: DiscontinuityCurve, t: float, x: float, h: float,
                   sign0: int) -> float:
    """Earliest root of (partial step state) - gamma in (t, t+h]."""
    lo, hi = 0.0, h

    def phi(s_off: float) -> float:
        state = _rk4(f, t, x, s_off) if s_off > 0.0 else x
        return state - curve.value(t + s_off)

    for _ in range(200):
        if hi - lo <= _BRACKET_TOL:
            break
        mid = 0.5 * (lo + hi)
        v = phi(mid)
        if v == 0.0:
            hi = mid
            break
        if (1 if v > 0 else -1) == sign0:
            lo = mid
        else:
            hi = mid
    return t + hi


def solve_ivp(p: IVProblem, h_max: float) -> Trajectory:
    """Integrate with event detection against the classified curves.

    Free stretches use RK4 with side-consistent stage evaluation; contact
    with a viable curve starts sliding until the curve's right endpoint,
    contact with an inviable curve is a transversal crossing bracketed to
    1e-12, and contact with a non-admissible curve raises
    UnclassifiedContactError.
    """
    if h_max <= 0.0:
        raise ToolkitError("h_max must be positive")
    for c in p.curves:
        if c.classification is None:
            raise ToolkitError("all curves must be classified before solving")

    breaks = _t_breaks(p)
    a, b = p.t_start, p.t_end
    t, x = a, p.x_start
    ts = [t]
    xs = [x]
    crossings: list[CrossingEvent] = []
    slidings: list[SlidingInterval] = []
    pending_side: dict[int, int] = {}

    def next_break(after: float) -> float:
        for v in breaks:
            if v > after + 1e-13:
                return v
        return b

    def start_sliding(idx: int, t0: float):
        nonlocal t, x
        c = p.curves[idx]
        t_stop = min(c.t_hi, b)
        knot = t0
        while knot < t_stop - 1e-13:
            knot = min(knot + h_max, t_stop)
            ts.append(knot)
            xs.append(c.value(knot))
        slidings.append(SlidingInterval(t0, t_stop, idx))
        t = t_stop
        x = c.value(t_stop)

    # Initial contact handling.
    for idx, c in enumerate(p.curves):
        if c.active(t) and abs(x - c.value(t)) <= _ETA:
            if c.classification == VIABLE:
                start_sliding(idx, t)
            elif c.classification == INVIABLE_UP:
                pending_side[idx] = 1
            elif c.classification == INVIABLE_DOWN:
                pending_side[idx] = -1
            else:
                raise UnclassifiedContactError(
                    f"start point lies on non-admissible curve {idx}"
                )
            break

    guard = 0
    while t < b - 1e-13:
        guard += 1
        if guard > 10_000_000:
            raise ToolkitError("step budget exceeded")
        h = min(h_max, next_break(t) - t, b - t)
        if h < 1e-13:
            t = min(b, next_break(t))
            continue

        sides: dict[int, int] = {}
        for idx, c in enumerate(p.curves):
            if not (c.active(t) or c.active(t + h)):
                continue
            phi0 = x - c.value(t) if c.active(t) else x - c.value(max(t, c.t_lo))
            if abs(phi0) <= _ETA:
                if idx in pending_side:
                    sides[idx] = pending_side[idx]
            else:
                sides[idx] = 1 if phi0 > 0 else -1
        f = _make_sided_field(p, sides)
        x_prop = _rk4(f, t, x, h)

        event: tuple[float, int] | None = None
        for idx, c in enumerate(p.curves):
            if idx not in sides or not c.active(t + h):
                continue
            sign0 = sides[idx]
            phi1 = x_prop - c.value(t + h)
            if abs(phi1) <= _ETA:
                tau = t + h
            elif (1 if phi1 > 0 else -1) != sign0:
                tau = _bracket_event(f, c, t, x, h, sign0)
            else:
                continue
            if event is None or tau < event[0]:
                event = (tau, idx)

        if event is not None:
            tau, idx = event
            c = p.curves[idx]
            x = c.value(tau)
            t = tau
            ts.append(t)
            xs.append(x)
            pending_side = {}
            if c.classification == VIABLE:
                start_sliding(idx, tau)
            elif c.classification in (INVIABLE_UP, INVIABLE_DOWN):
                crossings.append(CrossingEvent(tau, idx))
                pending_side[idx] = 1 if c.classification == INVIABLE_UP else -1
            else:
                raise UnclassifiedContactError(
                    f"trajectory reached non-admissible curve {idx} at t={tau!r}"
                )
            continue

        # No declared-curve event: watch for an undeclared interface crossing.
        owner0 = p.field_map.owner_index((t, x))
        owner1 = p.field_map.owner_index((t + h, x_prop))
        if owner0 != owner1:
            lo_s, hi_s = 0.0, h
            for _ in range(80):
                mid = 0.5 * (lo_s + hi_s)
                state = _rk4(f, t, x, mid)
                if p.field_map.owner_index((t + mid, state)) == owner0:
                    lo_s = mid
                else:
                    hi_s = mid
                if hi_s - lo_s <= _BRACKET_TOL:
                    break
            s_star = 0.5 * (lo_s + hi_s)
            x_star = _rk4(f, t, x, s_star)
            t_star = t + s_star
            near_curve = any(
                c.active(t_star) and abs(x_star - c.value(t_star)) <= 1e-7
                for c in p.curves
            )
            if not near_curve:
                # Distinguish a time-direction switch from an uncovered
                # interface: hold the pre-change state and advance time.
                x_before = _rk4(f, t, x, lo_s) if lo_s > 0.0 else x
                probe_t = min(t + hi_s + 1e-9, b)
                if p.field_map.owner_index((probe_t, x_before)) != owner0:
                    ts.append(t_star)
                    xs.append(x_star)
                    t, x = t_star, x_star
                    pending_side = {}
                    continue
                raise ToolkitError(
                    f"trajectory crossed an interface not covered by any declared "
                    f"curve near (t={t_star!r}, x={x_star!r})"
                )

        t += h
        x = x_prop
        ts.append(t)
        xs.append(x)
        pending_side = {}

    return Trajectory(tuple(ts), tuple(xs), tuple(crossings), tuple(slidings), p.curves)


# ----------------------------------------------------------------------
# Quadrature and verification.
# ----------------------------------------------------------------------

def _adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 30) -> float:
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(x0, x2, f0, f1, f2, s, tol_, depth):
        x1 = 0.5 * (x0 + x2)
        lm, rm = 0.5 * (x0 + x1), 0.5 * (x1 + x2)
        flm, frm = f(lm), f(rm)
        left = (x1 - x0) / 6.0 * (f0 + 4.0 * flm + f1)
        right = (x2 - x1) / 6.0 * (f1 + 4.0 * frm + f2)
        err = left + right - s
        if abs(err) <= 15.0 * tol_:
            return left + right + err / 15.0
        if depth >= max_depth:
            raise QuadratureError(
                f"quadrature failed to converge on [{x0!r}, {x2!r}]", (x0, x2)
            )
        return (
            recurse(x0, x1, f0, flm, f1, left, tol_ / 2.0, depth + 1)
            + recurse(x1, x2, f1, frm, f2, right, tol_ / 2.0, depth + 1)
        )

    if b <= a:
        return 0.0
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def _bound_cumulative(p: IVProblem, ts, tol: float = 1e-12) -> list[float]:
    """Cumulative integral of the bound function at the given times."""
    if p.bound_antiderivative is not None:
        base = ex.evaluate(p.bound_antiderivative, (ts[0],))
        return [ex.evaluate(p.bound_antiderivative, (t,)) - base for t in ts]
    out = [0.0]
    for t0, t1 in zip(ts, ts[1:]):
        out.append(out[-1] + _adaptive_simpson(lambda s: ex.evaluate(p.bound, (s,)), t0, t1, tol))
    return out


def apriori_bound(p: IVProblem) -> float:
    """|x_start| plus the integral of the bound function over the interval."""
    total = _bound_cumulative(p, [p.t_start, p.t_end])[-1]
    return abs(p.x_start) + total


@dataclass
class ResidualReport:
    r_max: float
    passed: bool
    modulus_ok: bool
    worst_modulus_excess: float
    tol: float

    def to_text(self) -> str:
        return (
            f"max integral residual : {self.r_max!r}\n"
            f"modulus bound holds   : {self.modulus_ok}"
            f" (worst excess {self.worst_modulus_excess!r})\n"
            f"pass (tol {self.tol!r})  : {self.passed}"
        )


def verify_solution(p: IVProblem, traj: Trajectory, tol: float) -> ResidualReport:
    """Residual of the integral form along the trajectory's interpolant.

    R_max is the largest gap, over knots, between the knot value and
    x_start plus the quadrature of f(s, x(s)); panels follow the knot
    grid, so event times split the quadrature.  The modulus check asks
    |x(t) - x(s)| <= integral of the bound over [s, t] for all knot pairs.
    """
    ts = traj.ts
    if abs(ts[0] - p.t_start) > 1e-12 or abs(ts[-1] - p.t_end) > 1e-12:
        raise ToolkitError("trajectory must span the whole interval")
    qtol = min(tol, 1e-6) / (10.0 * max(1, len(ts)))
    integral = 0.0
    r_max = abs(traj.xs[0] - p.x_start)
    for i in range(len(ts) - 1):
        t0, t1 = ts[i], ts[i + 1]
        if t1 > t0:
            # Knots carry the events, so the integrand is smooth inside
            # each panel; endpoint values are read as one-sided limits to
            # keep measure-zero on-curve values out of the quadrature.
            shift = 1e-12 * (t1 - t0)

            def integrand(s, lo=t0 + shift, hi=t1 - shift):
                s = min(max(s, lo), hi)
                return p.field(s, traj.at(s))

            integral += _adaptive_simpson(integrand, t0, t1, qtol)
        r = abs(traj.xs[i + 1] - p.x_start - integral)
        r_max = max(r_max, r)

    cum = _bound_cumulative(p, list(ts))
    worst = -math.inf
    xs = traj.xs
    for i in range(len(ts)):
        for j in range(i + 1, len(ts)):
            excess = abs(xs[j] - xs[i]) - (cum[j] - cum[i])
            if excess > worst:
                worst = excess
    modulus_ok = worst <= 1e-9
    return ResidualReport(r_max, r_max <= tol and modulus_ok, modulus_ok, worst, tol)


# ----------------------------------------------------------------------
# Diagnostic fixed-point iteration of the integral operator.
# ----------------------------------------------------------------------

@dataclass
class PicardResult:
    deltas: tuple[float, ...]
    ts: tuple[float, ...]
    xs: tuple[float, ...]


def _interp(ts, xs, t: float) -> float:
    import bisect

    if t <= ts[0]:
        return xs[0]
    if t >= ts[-1]:
        return xs[-1]
    i = bisect.bisect_right(ts, t) - 1
    if ts[i + 1] == ts[i]:
        return xs[i + 1]
    w = (t - ts[i]) / (ts[i + 1] - ts[i])
    return xs[i] + w * (xs[i + 1] - xs[i])


def picard_iterate(p: IVProblem, x0=None, n: int = 10, grid: int = 1025) -> PicardResult:
    """Iterate x -> x_start + integral of f(s, x(s)); report sup-norm deltas.

    Convergence is not guaranteed in general; this is a diagnostic of the
    integral operator.  Quadrature panels split where an iterate crosses
    a declared curve, keeping integrands panel-smooth.
    """
    if n < 1:
        raise ToolkitError("need at least one iteration")
    base = np.linspace(p.t_start, p.t_end, grid)
    ts = sorted(set(float(v) for v in base) | set(_t_breaks(p)))

    if x0 is None:
        cur = [p.x_start] * len(ts)
    elif isinstance(x0, Trajectory):
        cur = [x0.at(t) for t in ts]
    elif callable(x0):
        cur = [float(x0(t)) for t in ts]
    else:
        cur = [float(x0)] * len(ts)

    deltas: list[float] = []
    for _ in range(n):
        ts_arr = ts
        xs_arr = cur

        def along(s: float) -> float:
            return p.field(s, _interp(ts_arr, xs_arr, s))

        nxt = [p.x_start]
        acc = p.x_start
        for i in range(len(ts) - 1):
            t0, t1 = ts[i], ts[i + 1]
            cuts = [t0, t1]
            for c in p.curves:
                if not (c.active(t0) or c.active(t1)):
                    continue
                phi0 = xs_arr[i] - c.value(t0)
                phi1 = xs_arr[i + 1] - c.value(t1)
                if phi0 == 0.0 or phi1 == 0.0 or (phi0 > 0) == (phi1 > 0):
                    continue
                lo, hi = t0, t1
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    vm = _interp(ts_arr, xs_arr, mid) - c.value(mid)
                    if vm == 0.0:
                        break
                    if (vm > 0) == (phi0 > 0):
                        lo = mid
                    else:
                        hi = mid
                cuts.append(0.5 * (lo + hi))
            cuts = sorted(set(cuts))
            for c0, c1 in zip(cuts, cuts[1:]):
                if c1 > c0:
                    shift = 1e-12 * (c1 - c0)

                    def seg(s, lo=c0 + shift, hi=c1 - shift):
                        return along(min(max(s, lo), hi))

                    acc += _adaptive_simpson(seg, c0, c1, 1e-12, max_depth=36)
            nxt.append(acc)
        deltas.append(max(abs(u - v) for u, v in zip(nxt, cur)))
        cur = nxt
    return PicardResult(tuple(deltas), tuple(ts), tuple(cur))


# ----------------------------------------------------------------------
# Static validation.
# ----------------------------------------------------------------------

@dataclass
class ProblemValidation:
    ok: bool
    issues: list[str] = field(default_factory=list)


def validate_problem(p: IVProblem, t_grid: int = 128, x_grid: int = 128,
                     value_tol: float = 1e-9) -> ProblemValidation:
    """Grid checks: bound domination and curve coverage of x-interfaces."""
    issues: list[str] = []
    dom = p.field_map.domain
    tt, xx = np.meshgrid(
        np.linspace(dom.lo[0], dom.hi[0], t_grid),
        np.linspace(dom.lo[1], dom.hi[1], x_grid),
        indexing="ij",
    )
    fvals = p.field_map.evaluate_batch([tt.ravel(), xx.ravel()])[0]
    mvals = ex.evaluate_batch(p.bound, [tt.ravel()])
    bad = np.abs(fvals) > mvals + 1e-12
    if bad.any():
        k = int(np.argmax(bad))
        issues.append(
            f"bound violated: |f|={abs(float(fvals[k]))!r} > M={float(mvals[k])!r} "
            f"at (t={float(tt.ravel()[k])!r}, x={float(xx.ravel()[k])!r})"
        )

    # x-direction interfaces must be covered by declared curves unless the
    # field is actually continuous across them.
    for k in range(t_grid):
        t = dom.lo[0] + (dom.hi[0] - dom.lo[0]) * k / (t_grid - 1)
        if not (p.t_start - 1e-12 <= t <= p.t_end + 1e-12):
            continue
        for piece in p.field_map.pieces:
            for q in piece.region.inequalities:
                if 1 not in ex.variables(q.g):
                    continue
                for r in _line_roots(q.g, (t, dom.lo[1]), (t, dom.hi[1]), 512):
                    if not piece.region.closure_contains(r, 1e-12):
                        continue
                    vals = [v[0] for v in p.field_map.adjacent_values(r)]
                    if max(vals) - min(vals) <= value_tol:
                        continue
                    covered = any(
                        c.active(r[0]) and abs(r[1] - c.value(r[0])) <= 1e-7
                        for c in p.curves
                    )
                    if not covered:
                        issues.append(
                            f"x-interface at (t={r[0]!r}, x={r[1]!r}) is not covered "
                            "by any declared curve"
                        )
                        break

    # Spot-check the interface points' field values against the bound too.
    for r in p.field_map.interface_points(resolution=256):
        mval = ex.evaluate(p.bound, (r[0],))
        for v in p.field_map.adjacent_values(r):
            if abs(v[0]) > mval + 1e-12:
                issues.append(
                    f"bound violated on interface: |f|={abs(v[0])!r} > M={mval!r} at {r}"
                )
                break
    return ProblemValidation(not issues, issues)
