"""Bundled example maps and initial value problems.

These are the fixtures exercised by the test suite and the CLI's
reproduction command: a three-level staircase map and its half-scaled
variant (whose envelope admits a spurious fixed point at the first jump),
an odd two-valued sign-split map with nonzero degree but no fixed point,
and a handful of 2-d maps and scalar ODE problems with declared
discontinuity curves.
"""

from __future__ import annotations

from . import expr as ex
from .geometry import Box
from .ivp import DiscontinuityCurve, IVProblem
from .maps import Inequality, Piece, PiecewiseMap, Region

X = ex.Var(0)
Y = ex.Var(1)


def _leq(e: ex.Expr, c: float = 0.0, strict: bool = False) -> Inequality:
    """e <= c (or < c) rewritten as e - c <= 0."""
    g = e if c == 0.0 else ex.Binary("-", e, ex.Const(c))
    return Inequality(g, strict)


def _geq(e: ex.Expr, c: float = 0.0, strict: bool = False) -> Inequality:
    """e >= c (or > c) rewritten as c - e <= 0."""
    g = ex.Binary("-", ex.Const(c), e)
    return Inequality(g, strict)


def staircase_map(scale: float = 1.0, lo: float = 0.0, hi: float = 1.0) -> PiecewiseMap:
    """Three constant levels scale*(1/3, 2/3, 1) with jumps at 1/3 and 2/3.

    Regions extend to the whole line (first and last levels continue
    outward), so any [lo, hi] domain works; the first piece owns x = 1/3
    and the second owns x = 2/3.
    """
    third = 1.0 / 3.0
    pieces = (
        Piece(Region((_leq(X, third),)), (ex.Const(scale * third),)),
        Piece(Region((_geq(X, third, strict=True), _leq(X, 2 * third))),
              (ex.Const(scale * 2 * third),)),
        Piece(Region((_geq(X, 2 * third, strict=True),)), (ex.Const(scale),)),
    )
    majorant = None
    if scale == 1.0 and lo == 0.0 and hi == 1.0:
        # A tight continuous interval-valued majorant containing all jumps.
        majorant = (
            ex.Binary("max", ex.Const(third), X),
            ex.Binary("min", ex.Const(1.0), ex.Binary("+", X, ex.Const(third))),
        )
    return PiecewiseMap(Box((lo,), (hi,)), pieces, majorant=majorant)


def half_staircase_map(lo: float = 0.0, hi: float = 1.0) -> PiecewiseMap:
    """The staircase map scaled by one half; its envelope at 1/3 is [1/6, 1/3]."""
    return staircase_map(scale=0.5, lo=lo, hi=hi)


def sign_split_map() -> PiecewiseMap:
    """+1/2 for x <= 0 and -1/2 for x > 0 on [-1, 1]: odd at the boundary,
    nonzero envelope degree, but no fixed point anywhere."""
    pieces = (
        Piece(Region((_leq(X),)), (ex.Const(0.5),)),
        Piece(Region((_geq(X, strict=True),)), (ex.Const(-0.5),)),
    )
    return PiecewiseMap(Box((-1.0,), (1.0,)), pieces)


def constant_map(value, lo=-1.0, hi=1.0) -> PiecewiseMap:
    value = tuple(value) if isinstance(value, (tuple, list)) else (value,)
    dim = len(value)
    box = Box((lo,) * dim, (hi,) * dim)
    return PiecewiseMap(box, (Piece(Region(), tuple(ex.Const(v) for v in value)),))


def shift_map(offset: float = 1.0, lo: float = 0.0, hi: float = 1.0) -> PiecewiseMap:
    """x + offset: no fixed points, degree zero on any window."""
    return PiecewiseMap(
        Box((lo,), (hi,)),
        (Piece(Region(), (ex.Binary("+", X, ex.Const(offset)),)),),
    )


def contraction_map(lo: float = 0.0, hi: float = 1.0) -> PiecewiseMap:
    """x/2 + 1/4: continuous contraction with fixed point 1/2."""
    return PiecewiseMap(
        Box((lo,), (hi,)),
        (Piece(Region(), (ex.Binary("+", ex.Binary("/", X, ex.Const(2.0)), ex.Const(0.25)),)),),
    )


def negation_map_2d(r: float = 1.0) -> PiecewiseMap:
    """T(x) = -x on [-r, r]^2; I - T doubles, winding once around zero."""
    return PiecewiseMap(
        Box((-r, -r), (r, r)),
        (Piece(Region(), (ex.Unary("neg", X), ex.Unary("neg", Y))),),
    )


def quadrant_shift_map_2d(r: float = 1.0) -> PiecewiseMap:
    """(1/4, 1/4) on the left half-plane, (-1/4, -1/4) on the right.

    Odd envelope on symmetric boxes; no fixed point of the map itself,
    yet the envelope admits the origin, so the compatibility scan flags
    (0, 0) while the boundary degree is 1.
    """
    pieces = (
        Piece(Region((_leq(X),)), (ex.Const(0.25), ex.Const(0.25))),
        Piece(Region((_geq(X, strict=True),)), (ex.Const(-0.25), ex.Const(-0.25))),
    )
    return PiecewiseMap(Box((-r, -r), (r, r)), pieces)


def tent_interior_map() -> PiecewiseMap:
    """Zero near the boundary of [-1, 1], x/2 strictly inside.

    Pairs with the zero map to exercise boundary determinacy: both have
    the same envelope on the boundary but differ inside.
    """
    half = 0.5
    pieces = (
        Piece(Region((_geq(X, half),)), (ex.Const(0.0),)),
        Piece(Region((_leq(X, -half),)), (ex.Const(0.0),)),
        Piece(Region((_geq(X, -half, strict=True), _leq(X, half, strict=True))),
              (ex.Binary("/", X, ex.Const(2.0)),)),
    )
    return PiecewiseMap(Box((-1.0,), (1.0,)), pieces)


def staircase_homotopy_map(lo: float = -2.0, hi: float = 2.0,
                           top_scale: float = 1.0) -> PiecewiseMap:
    """H(x, t) = t * staircase(x) as a joint map over [lo, hi] x [0, 1]."""
    third = 1.0 / 3.0
    t = Y  # second coordinate is the parameter

    def level(c: float) -> tuple[ex.Expr, ...]:
        return (ex.Binary("*", t, ex.Const(c * top_scale)),)

    pieces = (
        Piece(Region((_leq(X, third),)), level(third)),
        Piece(Region((_geq(X, third, strict=True), _leq(X, 2 * third))), level(2 * third)),
        Piece(Region((_geq(X, 2 * third, strict=True),)), level(1.0)),
    )
    return PiecewiseMap(Box((lo, 0.0), (hi, 1.0)), pieces, var_names=("x", "t"))


# ----------------------------------------------------------------------
# Initial value problems.  Field maps use variables (t, x).
# ----------------------------------------------------------------------

T_VAR = ex.Var(0)
X_VAR = ex.Var(1)


def _strip(t0: float, t1: float, x_lo: float, x_hi: float, pieces) -> PiecewiseMap:
    return PiecewiseMap(Box((t0, x_lo), (t1, x_hi)), tuple(pieces), var_names=("t", "x"))


def _zero_curve(t0: float, t1: float, eps: float = 0.5,
                psi: float | None = None) -> DiscontinuityCurve:
    return DiscontinuityCurve(ex.Const(0.0), ex.Const(0.0), t0, t1, eps, psi, label="x=0")


def crossing_problem() -> IVProblem:
    """x' = 1 with a declared (inviable) line at x = 0; x(0) = -1 on [0, 2].

    Exact solution -1 + t crosses the line at t = 1.
    """
    pieces = (
        Piece(Region((_leq(X_VAR, strict=True),)), (ex.Const(1.0),)),
        Piece(Region((_geq(X_VAR),)), (ex.Const(1.0),)),
    )
    return IVProblem(
        0.0, 2.0, -1.0,
        _strip(0.0, 2.0, -3.0, 3.0, pieces),
        bound=ex.Const(1.0),
        bound_antiderivative=T_VAR,
        curves=(_zero_curve(0.0, 2.0, eps=0.5, psi=0.5),),
    )


def spike_crossing_problem() -> IVProblem:
    """x' = 1 off the line x = 0, which carries the isolated value 5.

    The on-line value is irrelevant to solutions (the line is crossed in
    an instant) but forces the dominating bound up to 5.
    """
    on_line = Region((_leq(X_VAR), _geq(X_VAR)))
    pieces = (
        Piece(on_line, (ex.Const(5.0),)),
        Piece(Region(), (ex.Const(1.0),)),
    )
    return IVProblem(
        0.0, 2.0, -1.0,
        _strip(0.0, 2.0, -3.0, 3.0, pieces),
        bound=ex.Const(5.0),
        bound_antiderivative=ex.Binary("*", ex.Const(5.0), T_VAR),
        curves=(_zero_curve(0.0, 2.0, eps=0.5, psi=0.5),),
    )


def sliding_problem() -> IVProblem:
    """x' = -sign(x) with value 0 on the line x = 0, which is viable.

    From x(0) = 1 the solution is 1 - t until t = 1, then slides on 0.
    """
    on_line = Region((_leq(X_VAR), _geq(X_VAR)))
    pieces = (
        Piece(on_line, (ex.Const(0.0),)),
        Piece(Region((_geq(X_VAR, strict=True),)), (ex.Const(-1.0),)),
        Piece(Region((_leq(X_VAR, strict=True),)), (ex.Const(1.0),)),
    )
    return IVProblem(
        0.0, 2.0, 1.0,
        _strip(0.0, 2.0, -3.0, 3.0, pieces),
        bound=ex.Const(1.0),
        bound_antiderivative=T_VAR,
        curves=(_zero_curve(0.0, 2.0),),
    )


def blocked_problem() -> IVProblem:
    """x' = +1 below the line x = 0 and -1 on and above it.

    The line is neither viable nor inviable (classic attractive contact),
    so the solver must refuse once the state reaches it.
    """
    pieces = (
        Piece(Region((_geq(X_VAR),)), (ex.Const(-1.0),)),
        Piece(Region((_leq(X_VAR, strict=True),)), (ex.Const(1.0),)),
    )
    return IVProblem(
        0.0, 2.0, 1.0,
        _strip(0.0, 2.0, -3.0, 3.0, pieces),
        bound=ex.Const(1.0),
        bound_antiderivative=T_VAR,
        curves=(_zero_curve(0.0, 2.0),),
    )


def decay_problem(t1: float = 1.0, x0: float = 1.0) -> IVProblem:
    """Smooth control problem x' = -x (no curves); exact solution x0 e^{-t}."""
    strip = 2.0 * max(1.0, abs(x0))
    pieces = (Piece(Region(), (ex.Unary("neg", X_VAR),)),)
    return IVProblem(
        0.0, t1, x0,
        _strip(0.0, t1, -strip, strip, pieces),
        bound=ex.Const(strip),
        bound_antiderivative=ex.Binary("*", ex.Const(strip), T_VAR),
    )


def bundled_maps() -> dict[str, PiecewiseMap]:
    """The example maps keyed by name (used by cross-checking tests)."""
    return {
        "staircase": staircase_map(),
        "half_staircase": half_staircase_map(),
        "sign_split": sign_split_map(),
        "quadrant_shift": quadrant_shift_map_2d(),
        "tent_interior": tent_interior_map(),
    }
