"""Fixed-point localization and certification via degree bisection.

``localize_fixed_points`` splits a box recursively, keeping only parts
whose boundary degree is nonzero or whose interval enclosure cannot rule
out an envelope zero.  Nonzero-degree boxes at the target width become
certificates; zero-degree boxes that still could not be pruned are
returned separately as unresolved (they may hold index-zero fixed points
or spurious envelope zeros, which degree arguments cannot certify).

``schauder_fixed_point`` realizes the self-map fixed point theorem on a
closed convex set by composing with the metric projection (continuous,
image inside the set) and localizing on an enclosing box.

``schaefer_search`` scans dyadic radii, accepting one when interval
enclosures of sigma * envelope exclude every boundary point for every
sigma in [0, 1] (covered by closed cells, so boundary hits between grid
values cannot slip through), then localizes inside the accepted ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import intervals as iv
from .envelope import ConditionReport, check_condition, envelope_exact
from .degree import certify_zero_free, compute_degree
from .errors import (
    NotWellDefinedError,
    RefinementExhaustedError,
    SplitFailureError,
    ToolkitError,
)
from .geometry import Box, ConvexBody, box_body, contains, project
from .maps import PiecewiseMap

LOCALIZE_TOL = 1e-9


@dataclass(frozen=True)
class FixedPointCertificate:
    """A box carrying nonzero degree, hence (under the compatibility
    condition) at least one fixed point."""

    box: Box
    degree: int
    condition_verdict: str
    representative: tuple[float, ...]
    residual: float


@dataclass
class LocalizationResult:
    certificates: list[FixedPointCertificate]
    unresolved: list[Box]
    total_degree: int
    condition: ConditionReport | None
    notes: list[str] = field(default_factory=list)

    def best(self) -> FixedPointCertificate | None:
        if not self.certificates:
            return None
        return min(self.certificates, key=lambda c: c.residual)


def _corners(box: Box):
    if box.dim == 1:
        return [(box.lo[0],), (box.hi[0],), box.center]
    (x0, y0), (x1, y1) = box.lo, box.hi
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1), box.center]


def _representative(m, box: Box) -> tuple[tuple[float, ...], float]:
    """Point of the box with the smallest map residual among candidates.

    Candidates include interface points so that fixed points sitting on a
    jump are scored with the owning piece's value.
    """
    candidates = list(_corners(box))
    try:
        candidates.extend(m.interface_points(within=box, resolution=256))
    except Exception:
        pass
    best_p, best_r = box.center, math.inf
    for p in candidates:
        try:
            r = math.dist(p, m.evaluate(p))
        except Exception:
            continue
        if r < best_r:
            best_p, best_r = p, r
    return tuple(best_p), best_r


def _enclosure_excludes_zero(m, box: Box, tol: float) -> bool:
    enc = m.value_enclosure(box)
    return any(
        box.lo[i] - enc[i][1] > tol or box.hi[i] - enc[i][0] < -tol
        for i in range(box.dim)
    )


def localize_fixed_points(m, omega: Box, min_width: float, tol: float = LOCALIZE_TOL,
                          condition_report: ConditionReport | None = None,
                          max_boxes: int = 200000) -> LocalizationResult:
    """Bisect ``omega`` into width <= min_width boxes of nonzero degree.

    The compatibility scan runs once on ``omega`` (envelopes do not depend
    on the subdivision); every certificate carries its verdict.  Cuts
    landing on envelope zeros are nudged by a sixteenth of the box width
    (min_width/16 once boxes reach the target scale), up to four retries,
    before SplitFailureError.  Certificate degrees sum to the degree of
    ``omega``.
    """
    if min_width <= 0.0:
        raise ToolkitError("min_width must be positive")
    cond = condition_report
    if cond is None:
        cond = check_condition(m, omega)
    parent = compute_degree(m, omega, tol=tol, check=False, condition_report=cond)

    result = LocalizationResult([], [], parent.boundary_degree, cond)
    if not parent.well_defined:
        result.notes.append(
            "compatibility scan fails on omega: certificates guarantee envelope "
            "zeros, not fixed points of the map"
        )

    queue: list[tuple[Box, int]] = [(omega, parent.boundary_degree)]
    processed = 0
    while queue:
        box, deg = queue.pop()
        processed += 1
        if processed > max_boxes:
            raise ToolkitError("box budget exceeded during localization")
        if max(box.widths) <= min_width:
            if deg != 0:
                rep, res = _representative(m, box)
                result.certificates.append(
                    FixedPointCertificate(box, deg, cond.verdict, rep, res)
                )
            elif not certify_zero_free(m, box, tol, max_boxes=64, max_depth=4):
                result.unresolved.append(box)
            continue
        if deg == 0 and _enclosure_excludes_zero(m, box, tol):
            continue
        axis = max(range(box.dim), key=lambda i: box.widths[i])
        center = box.center[axis]
        # Sign tests at internal cuts only need to clear roundoff, so a
        # sixteenth-of-the-width nudge can always move off a simple zero;
        # the nudge equals min_width/16 once boxes reach the target width.
        cut_tol = min(tol, 1e-12)
        nudge = max(min_width, box.widths[axis]) / 16.0
        split_done = False
        for k in (0, 1, -1, 2, -2):
            cut = center + k * nudge
            if not (box.lo[axis] < cut < box.hi[axis]):
                continue
            face_lo = box.lo[:axis] + (cut,) + box.lo[axis + 1:]
            face_hi = box.hi[:axis] + (cut,) + box.hi[axis + 1:]
            if not certify_zero_free(m, Box(face_lo, face_hi), cut_tol,
                                     max_boxes=600, max_depth=48):
                continue
            left, right = box.split(axis, cut)
            extra = {} if box.dim == 1 else {"max_samples": 2 ** 14}
            try:
                degs = []
                for child in (left, right):
                    if _enclosure_excludes_zero(m, child, tol):
                        degs.append(0)
                    else:
                        degs.append(
                            compute_degree(m, child, tol=cut_tol, check=False,
                                           **extra).boundary_degree
                        )
            except (NotWellDefinedError, RefinementExhaustedError):
                continue
            if degs[0] + degs[1] != deg:
                result.notes.append(
                    f"additivity audit mismatch on {box.lo}..{box.hi}: "
                    f"{deg} != {degs[0]} + {degs[1]}"
                )
            for child, child_deg in zip((left, right), degs):
                if child_deg != 0 or not _enclosure_excludes_zero(m, child, tol):
                    queue.append((child, child_deg))
            split_done = True
            break
        if not split_done:
            raise SplitFailureError(
                f"could not move the cut off a zero inside {box.lo}..{box.hi}"
            )

    result.certificates.sort(key=lambda c: c.box.lo)
    result.unresolved.sort(key=lambda b: b.lo)
    total = sum(c.degree for c in result.certificates)
    if total != parent.boundary_degree:
        result.notes.append(
            f"certificate degrees sum to {total}, omega degree is "
            f"{parent.boundary_degree}; the difference sits in unresolved boxes"
        )
    return result


# ----------------------------------------------------------------------
# Self-map fixed points on a closed convex set via metric projection.
# ----------------------------------------------------------------------

class ProjectedMap:
    """inner(project(x)) on an enclosing box: the retraction composition.

    Presents the same evaluation surface as a PiecewiseMap (evaluate,
    adjacent values, interval enclosures, interface points) so the degree
    and localization machinery runs unchanged.  The projection is
    1-Lipschitz, which keeps the interval enclosures sound.
    """

    def __init__(self, inner: PiecewiseMap, target: ConvexBody, enclosing: Box):
        if inner.in_dim != target.dim or enclosing.dim != target.dim:
            raise ToolkitError("dimension mismatch between map, set and box")
        self.inner = inner
        self.target = target
        self.domain = enclosing
        self._separable = _is_axis_aligned(target)

    @property
    def in_dim(self) -> int:
        return self.inner.in_dim

    @property
    def out_dim(self) -> int:
        return self.inner.out_dim

    def _project(self, p):
        return project(self.target, p)

    def evaluate(self, p):
        return self.inner.evaluate(self._project(p))

    def adjacent_values(self, p, tol: float = 1e-12):
        return self.inner.adjacent_values(self._project(p), tol)

    def owner_index(self, p) -> int:
        return self.inner.owner_index(self._project(p))

    def value_enclosure(self, box: Box, tol: float = 1e-12):
        tb = self.target.bounding_intervals()
        ib = self.inner.domain
        if self._separable:
            # Projection onto an axis-aligned target clamps each
            # coordinate independently, so the image box is exact.
            lo = tuple(min(max(box.lo[i], tb[i][0]), tb[i][1]) for i in range(self.in_dim))
            hi = tuple(min(max(box.hi[i], tb[i][0]), tb[i][1]) for i in range(self.in_dim))
        else:
            # General convex target: the projection is 1-Lipschitz, so the
            # image stays in a ball of the box's half-diameter.
            center = self._project(box.center)
            radius = 0.5 * math.dist(box.lo, box.hi)
            lo = tuple(
                max(center[i] - radius, tb[i][0], ib.lo[i])
                for i in range(self.in_dim)
            )
            hi = tuple(
                min(center[i] + radius, tb[i][1], ib.hi[i])
                for i in range(self.in_dim)
            )
            hi = tuple(max(a, b) for a, b in zip(lo, hi))
        return self.inner.value_enclosure(Box(lo, hi), tol)

    def interface_points(self, within: Box | None = None, resolution: int = 1024,
                         tol: float = 1e-12):
        inner_dom = self.inner.domain
        if within is None:
            return self.inner.interface_points(None, resolution, tol)
        lo = tuple(max(a, b) for a, b in zip(within.lo, inner_dom.lo))
        hi = tuple(min(a, b) for a, b in zip(within.hi, inner_dom.hi))
        if any(a > b for a, b in zip(lo, hi)):
            return ()
        return self.inner.interface_points(Box(lo, hi), resolution, tol)


def _is_axis_aligned(body: ConvexBody, tol: float = 1e-12) -> bool:
    """True for intervals and axis-aligned rectangles (incl. degenerate).

    The vertex set must equal the bounding-box corner set both ways; a
    right triangle has all vertices on corners yet is not a rectangle.
    """
    if body.dim == 1:
        return True
    ivals = body.bounding_intervals()
    corners = {
        (x, y)
        for x in (ivals[0][0], ivals[0][1])
        for y in (ivals[1][0], ivals[1][1])
    }
    verts_on_corners = all(
        any(math.dist(v, c) <= tol for c in corners) for v in body.vertices
    )
    corners_on_verts = all(
        any(math.dist(v, c) <= tol for v in body.vertices) for c in corners
    )
    return verts_on_corners and corners_on_verts


def _set_scan_points(m: PiecewiseMap, mset: ConvexBody, grid: int):
    ivals = mset.bounding_intervals()
    bbox = Box(tuple(v[0] for v in ivals), tuple(v[1] for v in ivals))
    pts = list(bbox.grid(grid)) + list(m.interface_points(within=bbox, resolution=512))
    return sorted(p for p in set(pts) if contains(mset, p, 1e-12))


def schauder_fixed_point(m: PiecewiseMap, mset: ConvexBody, tol: float = LOCALIZE_TOL,
                         grid: int = 101, min_width: float = 1e-8) -> FixedPointCertificate:
    """Fixed point of a self-map of a closed convex set.

    Certifies (on a grid plus interfaces) that the map sends the set into
    itself and passes the compatibility scan there, then localizes a
    fixed point of map-after-projection on an enclosing box and checks it
    lies in the set.
    """
    if mset.dim != m.in_dim or m.in_dim != m.out_dim:
        raise ToolkitError("need a self-map dimension setup")
    pts = _set_scan_points(m, mset, grid)
    if not pts:
        raise ToolkitError("the target set contains no scan points")
    for p in pts:
        for v in m.adjacent_values(p):
            if not contains(mset, v, 1e-9):
                raise ToolkitError(
                    f"self-map certification failure: value {v} at {p} leaves the set"
                )

    violations = []
    for p in pts:
        env = envelope_exact(m, p).value
        val = m.evaluate(p)
        if contains(env, p, tol) and math.dist(p, val) > tol:
            violations.append(p)
    if violations:
        raise ToolkitError(
            f"compatibility condition fails on the set at {violations[0]}"
        )
    cond = ConditionReport(len(pts), (), tol)

    ivals = mset.bounding_intervals()
    margin = max(0.25, 0.25 * max(v[1] - v[0] for v in ivals))
    enclosing = Box(
        tuple(v[0] - margin for v in ivals),
        tuple(v[1] + margin for v in ivals),
    )
    composed = ProjectedMap(m, mset, enclosing)
    loc = localize_fixed_points(composed, enclosing, min_width, tol,
                                condition_report=cond)
    best = loc.best()
    if best is None:
        raise ToolkitError("localization produced no nonzero-degree box")
    if not contains(mset, best.representative, 1e-6):
        raise ToolkitError(
            f"localized point {best.representative} is not in the target set"
        )
    return best


# ----------------------------------------------------------------------
# A-priori bounded search over dyadic radii.
# ----------------------------------------------------------------------

def _sigma_cells(n: int):
    return [(k / n, (k + 1) / n) for k in range(n)]


def schaefer_search(m: PiecewiseMap, r_max: float, tol: float = LOCALIZE_TOL,
                    sigma_cells: int = 64, boundary_grid: int = 256,
                    min_width: float = 1e-6) -> FixedPointCertificate:
    """Find a fixed point inside the first dyadic sup-norm ball that the
    scaled-envelope boundary test accepts.

    A radius R is accepted when, for every boundary point x and every
    sigma cell, the interval product of the cell with the envelope's
    coordinate ranges excludes x.  Acceptance forces degree 1 on the
    ball (the scaling homotopy never pins a boundary point), and
    localization then produces the certificate.
    """
    if r_max <= 0.0:
        raise ToolkitError("r_max must be positive")
    d = m.in_dim
    if m.out_dim != d:
        raise ToolkitError("need a self-dimension map")
    cells = _sigma_cells(sigma_cells)
    radius = 1.0
    while radius <= r_max * (1.0 + 1e-12):
        ball = Box((-radius,) * d, (radius,) * d)
        if not m.domain.contains_box(ball):
            raise ToolkitError(
                f"working domain does not contain the radius-{radius} ball"
            )
        pts = ball.boundary_points(2 if d == 1 else boundary_grid)
        accepted = True
        for p in pts:
            env = envelope_exact(m, p).value
            ranges = env.bounding_intervals()
            for cell in cells:
                scaled = [iv.mul(cell, r) for r in ranges]
                outside = any(
                    p[i] < scaled[i][0] - tol or p[i] > scaled[i][1] + tol
                    for i in range(d)
                )
                if not outside:
                    accepted = False
                    break
            if not accepted:
                break
        if accepted:
            cond = check_condition(m, ball)
            if not cond.holds:
                raise ToolkitError(
                    f"compatibility condition fails on the accepted radius {radius}"
                )
            loc = localize_fixed_points(m, ball, min_width, tol, condition_report=cond)
            best = loc.best()
            if best is None:
                raise ToolkitError("localization produced no nonzero-degree box")
            return best
        radius *= 2.0
    raise ToolkitError(f"no admissible radius <= {r_max}")
