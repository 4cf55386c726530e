"""Exact-intent convex geometry in dimensions 1 and 2.

Boxes model closed axis-aligned domains; ConvexBody models closed convex
sets (an interval in d=1, a possibly degenerate convex polygon in d=2).
Every predicate takes an explicit tolerance; DEFAULT_TOL is used both as
the predicate default and as the vertex deduplication threshold.
Degenerate bodies (points, segments) are ordinary values, not errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ToolkitError

DEFAULT_TOL = 1e-12

Point = tuple[float, ...]


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box: per-axis intervals [lo_i, hi_i], d in {1, 2}."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have equal length")
        if len(self.lo) not in (1, 2):
            raise ValueError("only dimensions 1 and 2 are supported")
        for a, b in zip(self.lo, self.hi):
            if a > b:
                raise ValueError(f"degenerate axis: lo {a} > hi {b}")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    @property
    def center(self) -> Point:
        return tuple(0.5 * (a + b) for a, b in zip(self.lo, self.hi))

    def contains(self, p: Point, tol: float = DEFAULT_TOL) -> bool:
        return all(a - tol <= x <= b + tol for x, a, b in zip(p, self.lo, self.hi))

    def contains_box(self, other: "Box", tol: float = DEFAULT_TOL) -> bool:
        return all(
            a - tol <= oa and ob <= b + tol
            for a, b, oa, ob in zip(self.lo, self.hi, other.lo, other.hi)
        )

    def intersects(self, other: "Box", tol: float = DEFAULT_TOL) -> bool:
        return all(
            oa <= b + tol and a - tol <= ob
            for a, b, oa, ob in zip(self.lo, self.hi, other.lo, other.hi)
        )

    def split(self, axis: int, at: float) -> tuple["Box", "Box"]:
        hi1 = self.hi[:axis] + (at,) + self.hi[axis + 1:]
        lo2 = self.lo[:axis] + (at,) + self.lo[axis + 1:]
        return Box(self.lo, hi1), Box(lo2, self.hi)

    def grid(self, resolution: int) -> list[Point]:
        """Uniform closed grid with ``resolution`` points per axis."""
        if resolution < 2:
            return [self.center]
        axes = [
            [a + (b - a) * k / (resolution - 1) for k in range(resolution)]
            for a, b in zip(self.lo, self.hi)
        ]
        if self.dim == 1:
            return [(x,) for x in axes[0]]
        return [(x, y) for y in axes[1] for x in axes[0]]

    def boundary_points(self, n: int) -> list[Point]:
        """n samples of the boundary: endpoints in d=1, CCW perimeter in d=2."""
        if self.dim == 1:
            return [(self.lo[0],), (self.hi[0],)]
        (x0, y0), (x1, y1) = self.lo, self.hi
        w, h = x1 - x0, y1 - y0
        per = 2.0 * (w + h)
        pts = []
        for k in range(n):
            s = per * k / n
            if s < w:
                pts.append((x0 + s, y0))
            elif s < w + h:
                pts.append((x1, y0 + (s - w)))
            elif s < 2 * w + h:
                pts.append((x1 - (s - w - h), y1))
            else:
                pts.append((x0, y1 - (s - 2 * w - h)))
        return pts

    def perimeter_point(self, s: float) -> Point:
        """Point at CCW arclength ``s`` from the lower-left corner (d=2)."""
        (x0, y0), (x1, y1) = self.lo, self.hi
        w, h = x1 - x0, y1 - y0
        s = s % (2.0 * (w + h))
        if s < w:
            return (x0 + s, y0)
        if s < w + h:
            return (x1, y0 + (s - w))
        if s < 2 * w + h:
            return (x1 - (s - w - h), y1)
        return (x0, y1 - (s - 2 * w - h))


@dataclass(frozen=True)
class ConvexBody:
    """Closed convex set: interval (d=1) or CCW convex polygon (d=2).

    Vertices are deduplicated and, in d=2, stored counterclockwise with no
    three consecutive collinear vertices.  One vertex is a point, two a
    segment.  Construct through :func:`convex_hull` to get canonical form.
    """

    dim: int
    vertices: tuple[Point, ...]

    @property
    def lo(self) -> float:
        if self.dim != 1:
            raise ToolkitError("lo/hi are d=1 accessors")
        return self.vertices[0][0]

    @property
    def hi(self) -> float:
        if self.dim != 1:
            raise ToolkitError("lo/hi are d=1 accessors")
        return self.vertices[-1][0]

    def is_point(self, tol: float = DEFAULT_TOL) -> bool:
        return all(
            max(abs(v[i] - self.vertices[0][i]) for v in self.vertices) <= tol
            for i in range(self.dim)
        )

    def bounding_intervals(self) -> list[tuple[float, float]]:
        return [
            (min(v[i] for v in self.vertices), max(v[i] for v in self.vertices))
            for i in range(self.dim)
        ]

    def describe(self) -> str:
        if self.dim == 1:
            if len(self.vertices) == 1:
                return f"{{{self.lo!r}}}"
            return f"[{self.lo!r}, {self.hi!r}]"
        return "; ".join(" ".join(repr(c) for c in v) for v in self.vertices)


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points, tol: float = DEFAULT_TOL) -> ConvexBody:
    """Smallest ConvexBody containing the points (monotone chain in d=2).

    Raises ToolkitError("empty hull") on empty input.  Collinear input
    collapses to a segment, coincident input to a point.
    """
    pts = [tuple(float(c) for c in p) for p in points]
    if not pts:
        raise ToolkitError("empty hull")
    dims = {len(p) for p in pts}
    if len(dims) != 1 or dims.pop() not in (1, 2):
        raise ToolkitError("points must share dimension 1 or 2")
    dim = len(pts[0])

    if dim == 1:
        lo = min(p[0] for p in pts)
        hi = max(p[0] for p in pts)
        if hi - lo <= tol:
            return ConvexBody(1, ((lo,),))
        return ConvexBody(1, ((lo,), (hi,)))

    uniq = sorted(set(pts))
    if len(uniq) == 1:
        return ConvexBody(2, (uniq[0],))

    def half(seq):
        # Exact monotone chain; tolerance handling happens afterwards.
        chain: list[Point] = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0.0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(uniq)
    upper = half(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    # Canonicalize: merge near-duplicate neighbours, then prune vertices
    # within tol of their neighbours' chord (removing such a vertex moves
    # the hull by at most tol, the segment distance being exactly the
    # Hausdorff cost of the removal).
    merged: list[Point] = []
    for p in hull:
        if not merged or math.dist(p, merged[-1]) > tol:
            merged.append(p)
    if len(merged) > 1 and math.dist(merged[0], merged[-1]) <= tol:
        merged.pop()
    changed = True
    while changed and len(merged) >= 3:
        changed = False
        for i in range(len(merged)):
            a = merged[i - 1]
            v = merged[i]
            b = merged[(i + 1) % len(merged)]
            if _segment_distance(v, a, b) <= tol:
                merged.pop(i)
                changed = True
                break
    if len(merged) < 3:
        # Degenerate data: pick the diameter pair (two farthest-point
        # sweeps, exact for collinear sets) as the segment ends.
        a = max(uniq, key=lambda q: math.dist(uniq[0], q))
        b = max(uniq, key=lambda q: math.dist(a, q))
        if math.dist(a, b) <= tol:
            return ConvexBody(2, (a,))
        return ConvexBody(2, tuple(sorted((a, b))))
    return ConvexBody(2, tuple(merged))


def _segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return math.dist(p, a)
    t = ((px - ax) * dx + (py - ay) * dy) / denom
    t = min(1.0, max(0.0, t))
    return math.dist(p, (ax + t * dx, ay + t * dy))


def _segment_project(p: Point, a: Point, b: Point) -> Point:
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return a
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / denom
    t = min(1.0, max(0.0, t))
    return (ax + t * dx, ay + t * dy)


def _inside_polygon(c: ConvexBody, p: Point, tol: float) -> bool:
    verts = c.vertices
    n = len(verts)
    scale = max(1.0, max(abs(v[0]) + abs(v[1]) for v in verts))
    for i in range(n):
        if _cross(verts[i], verts[(i + 1) % n], p) < -tol * scale:
            return False
    return True


def distance(p, c: ConvexBody) -> float:
    """Euclidean distance from a point to a closed convex body."""
    p = tuple(float(x) for x in p)
    if len(p) != c.dim:
        raise ToolkitError("dimension mismatch")
    if c.dim == 1:
        if p[0] < c.lo:
            return c.lo - p[0]
        if p[0] > c.hi:
            return p[0] - c.hi
        return 0.0
    verts = c.vertices
    if len(verts) == 1:
        return math.dist(p, verts[0])
    if len(verts) == 2:
        return _segment_distance(p, verts[0], verts[1])
    if _inside_polygon(c, p, 0.0):
        return 0.0
    n = len(verts)
    return min(_segment_distance(p, verts[i], verts[(i + 1) % n]) for i in range(n))


def contains(c: ConvexBody, p, tol: float = DEFAULT_TOL) -> bool:
    """True iff the point is within ``tol`` of the body."""
    if tol < 0:
        raise ToolkitError("tolerance must be nonnegative")
    return distance(p, c) <= tol


def project(c: ConvexBody, p) -> Point:
    """Metric projection: the closest point of the body (continuous in p)."""
    p = tuple(float(x) for x in p)
    if len(p) != c.dim:
        raise ToolkitError("dimension mismatch")
    if c.dim == 1:
        return (min(c.hi, max(c.lo, p[0])),)
    verts = c.vertices
    if len(verts) == 1:
        return verts[0]
    if len(verts) == 2:
        return _segment_project(p, verts[0], verts[1])
    if _inside_polygon(c, p, 0.0):
        return p
    n = len(verts)
    best = None
    best_d = math.inf
    for i in range(n):
        q = _segment_project(p, verts[i], verts[(i + 1) % n])
        d = math.dist(p, q)
        if d < best_d:
            best, best_d = q, d
    return best


def hausdorff_distance(a: ConvexBody, b: ConvexBody) -> float:
    """Hausdorff distance between convex bodies of equal dimension.

    For convex polytopes the supremum of the (convex) distance function
    is attained at a vertex, so scanning vertices both ways is exact.
    """
    if a.dim != b.dim:
        raise ToolkitError("dimension mismatch")
    d_ab = max(distance(v, b) for v in a.vertices)
    d_ba = max(distance(v, a) for v in b.vertices)
    return max(d_ab, d_ba)


def body_contains_body(outer: ConvexBody, inner: ConvexBody, tol: float = DEFAULT_TOL) -> bool:
    """True iff every vertex of ``inner`` is within ``tol`` of ``outer``."""
    return all(contains(outer, v, tol) for v in inner.vertices)


def affine_image(c: ConvexBody, scale: float, offset) -> ConvexBody:
    """Body with vertices offset + scale * v (re-hulled to restore CCW order)."""
    offset = tuple(float(x) for x in offset)
    return convex_hull(
        [tuple(o + scale * v[i] for i, o in enumerate(offset)) for v in c.vertices]
    )


def interval_body(lo: float, hi: float) -> ConvexBody:
    return convex_hull([(lo,), (hi,)])


def box_body(box: Box) -> ConvexBody:
    """The box itself as a ConvexBody."""
    if box.dim == 1:
        return interval_body(box.lo[0], box.hi[0])
    (x0, y0), (x1, y1) = box.lo, box.hi
    return convex_hull([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
