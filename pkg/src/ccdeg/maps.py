"""Piecewise maps on boxes: finitely many regions, one closed-form piece each.

A Region is a conjunction of inequalities g_j <= 0 or g_j < 0; its closure
uses the non-strict versions.  A PiecewiseMap evaluates a point with the
first declared piece whose region contains it, so declaration order decides
which side owns an interface.  Piece functions are expected to extend
continuously to region closures; that contract is what makes the exact
envelope computation in :mod:`ccdeg.envelope` correct, and it is checked
by sampling in :func:`closure_continuity_check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from . import intervals as iv
from .errors import CoverError, DomainError, ToolkitError
from .geometry import DEFAULT_TOL, Box, Point


@dataclass(frozen=True)
class Inequality:
    """g(x) <= 0 (strict=False) or g(x) < 0 (strict=True)."""

    g: ex.Expr
    strict: bool = False

    def holds(self, p: Point) -> bool:
        v = ex.evaluate(self.g, p)
        return v < 0.0 if self.strict else v <= 0.0

    def holds_closure(self, p: Point, tol: float) -> bool:
        return ex.evaluate(self.g, p) <= tol


@dataclass(frozen=True)
class Region:
    """Conjunction of inequalities; an empty list means the whole domain."""

    inequalities: tuple[Inequality, ...] = ()

    def contains(self, p: Point) -> bool:
        return all(q.holds(p) for q in self.inequalities)

    def closure_contains(self, p: Point, tol: float = DEFAULT_TOL) -> bool:
        return all(q.holds_closure(p, tol) for q in self.inequalities)

    def contains_batch(self, coords: list[np.ndarray]) -> np.ndarray:
        if not self.inequalities:
            return np.ones_like(coords[0], dtype=bool)
        mask = np.ones_like(coords[0], dtype=bool)
        for q in self.inequalities:
            vals = ex.evaluate_batch(q.g, coords)
            mask &= (vals < 0.0) if q.strict else (vals <= 0.0)
        return mask

    def may_intersect(self, box_ivals: list[iv.Ival], tol: float = DEFAULT_TOL) -> bool:
        """False only when some inequality is certified positive on the box."""
        for q in self.inequalities:
            lo, _ = ex.evaluate_interval(q.g, box_ivals)
            if lo > tol:
                return False
        return True


@dataclass(frozen=True)
class MapValueSet:
    """Values of all pieces whose region closure contains a point."""

    points: tuple[Point, ...]

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Piece:
    region: Region
    outputs: tuple[ex.Expr, ...]

    def value(self, p: Point) -> Point:
        return tuple(ex.evaluate(e, p) for e in self.outputs)


@dataclass(frozen=True)
class PiecewiseMap:
    """Ordered pieces over a box domain; evaluation is total and pure."""

    domain: Box
    pieces: tuple[Piece, ...]
    var_names: tuple[str, ...] = ()
    majorant: tuple[ex.Expr, ex.Expr] | None = None  # optional (lower, upper) usc hull

    def __post_init__(self):
        if not self.pieces:
            raise ToolkitError("a piecewise map needs at least one piece")
        if not self.var_names:
            names = ("x",) if self.domain.dim == 1 else ("x", "y")
            object.__setattr__(self, "var_names", names)

    @property
    def in_dim(self) -> int:
        return self.domain.dim

    @property
    def out_dim(self) -> int:
        return len(self.pieces[0].outputs)

    def _check_domain(self, p: Point):
        if not self.domain.contains(p, DEFAULT_TOL):
            raise DomainError(f"point {p} outside domain {self.domain.lo}..{self.domain.hi}")

    def owner_index(self, p: Point) -> int:
        """Index of the first declared piece whose region contains ``p``."""
        self._check_domain(p)
        for k, piece in enumerate(self.pieces):
            if piece.region.contains(p):
                return k
        raise CoverError(f"cover violated at {p}")

    def evaluate(self, p: Point) -> Point:
        p = tuple(float(c) for c in p)
        return self.pieces[self.owner_index(p)].value(p)

    def evaluate_batch(self, coords: list[np.ndarray]) -> list[np.ndarray]:
        """Vectorized evaluate; raises CoverError if any point is uncovered."""
        remaining = np.ones_like(coords[0], dtype=bool)
        outs = [np.zeros_like(coords[0], dtype=float) for _ in range(self.out_dim)]
        for piece in self.pieces:
            mask = piece.region.contains_batch(coords) & remaining
            if mask.any():
                for i, e in enumerate(piece.outputs):
                    vals = ex.evaluate_batch(e, coords)
                    outs[i] = np.where(mask, vals, outs[i])
                remaining &= ~mask
        if remaining.any():
            idx = int(np.argmax(remaining))
            witness = tuple(float(c.flat[idx]) for c in coords)
            raise CoverError(f"cover violated at {witness}")
        return outs

    def adjacent_values(self, p: Point, tol: float = DEFAULT_TOL) -> MapValueSet:
        """Piece values at ``p`` over every region whose closure contains it.

        These are the one-sided limit values entering the exact envelope;
        the set always contains evaluate(p).
        """
        p = tuple(float(c) for c in p)
        self._check_domain(p)
        vals: list[Point] = []
        for piece in self.pieces:
            if piece.region.closure_contains(p, tol):
                v = piece.value(p)
                if not any(math.dist(v, w) <= tol for w in vals):
                    vals.append(v)
        if not vals:
            raise CoverError(f"cover violated at {p}")
        return MapValueSet(tuple(vals))

    def value_enclosure(self, box: Box, tol: float = DEFAULT_TOL) -> list[iv.Ival]:
        """Per-coordinate interval enclosing every piece value over ``box``.

        Covers all values any envelope can take on the box (the envelope
        hull of adjacent values is inside the hull of piece ranges).
        """
        box_ivals = [(a, b) for a, b in zip(box.lo, box.hi)]
        parts: list[list[iv.Ival]] = []
        for piece in self.pieces:
            if piece.region.may_intersect(box_ivals, tol):
                parts.append([ex.evaluate_interval(e, box_ivals) for e in piece.outputs])
        if not parts:
            raise CoverError(f"no region meets box {box.lo}..{box.hi}")
        return [iv.hull([p[i] for p in parts]) for i in range(self.out_dim)]

    def interface_points(self, within: Box | None = None, resolution: int = 1024,
                         tol: float = DEFAULT_TOL) -> tuple[Point, ...]:
        return interface_points(self, within, resolution, tol)


def _refine_root(g: ex.Expr, lo_pt: Point, hi_pt: Point, f_lo: float) -> Point:
    """Bisect a sign change of g along the segment [lo_pt, hi_pt]."""
    a, b = 0.0, 1.0
    pa = lo_pt
    for _ in range(90):
        m = 0.5 * (a + b)
        pm = tuple(lp + m * (hp - lp) for lp, hp in zip(lo_pt, hi_pt))
        fm = ex.evaluate(g, pm)
        if fm == 0.0:
            return pm
        if (fm < 0.0) == (f_lo < 0.0):
            a, pa = m, pm
        else:
            b = m
        if b - a < 1e-17:
            break
    return pa


def _line_roots(g: ex.Expr, start: Point, end: Point, resolution: int) -> list[Point]:
    ts = np.linspace(0.0, 1.0, resolution)
    coords = [np.asarray(s + ts * (e - s)) for s, e in zip(start, end)]
    vals = ex.evaluate_batch(g, coords)
    roots: list[Point] = []
    for i in range(len(ts) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(tuple(float(c[i]) for c in coords))
        elif a * b < 0.0:
            lo_pt = tuple(float(c[i]) for c in coords)
            hi_pt = tuple(float(c[i + 1]) for c in coords)
            roots.append(_refine_root(g, lo_pt, hi_pt, a))
    if vals[-1] == 0.0:
        roots.append(tuple(float(c[-1]) for c in coords))
    return roots


def interface_points(m: PiecewiseMap, within: Box | None = None, resolution: int = 1024,
                     tol: float = DEFAULT_TOL) -> tuple[Point, ...]:
    """Sampled points of the region interfaces (zero sets of the g_j).

    d=1: all bracketed roots of every inequality along the interval.
    d=2: roots along the horizontal and vertical lines of a scan grid.
    Only points in the closure of the owning region and the scan box are
    kept.  Detection is sampled: tangential zeros between samples can be
    missed, which is the documented resolution limit of the scan.
    """
    box = within if within is not None else m.domain
    pts: list[Point] = []
    for piece in m.pieces:
        for q in piece.region.inequalities:
            if not ex.variables(q.g):
                continue
            if box.dim == 1:
                segments = [((box.lo[0],), (box.hi[0],))]
            else:
                # Odd count keeps the center lines in the scan.
                lines = max(9, resolution // 16) | 1
                segments = []
                for k in range(lines):
                    y = box.lo[1] + (box.hi[1] - box.lo[1]) * k / (lines - 1)
                    segments.append(((box.lo[0], y), (box.hi[0], y)))
                    x = box.lo[0] + (box.hi[0] - box.lo[0]) * k / (lines - 1)
                    segments.append(((x, box.lo[1]), (x, box.hi[1])))
            for start, end in segments:
                for r in _line_roots(q.g, start, end, resolution):
                    if piece.region.closure_contains(r, tol) and box.contains(r, tol):
                        pts.append(r)
    # Deduplicate to predicate tolerance, keeping deterministic order.
    pts.sort()
    out: list[Point] = []
    for p in pts:
        if not any(math.dist(p, q) <= max(tol, 1e-12) for q in out):
            out.append(p)
    return tuple(out)


def slice_map(m: PiecewiseMap, index: int, value: float, new_domain: Box) -> PiecewiseMap:
    """Bind input coordinate ``index`` to ``value`` and drop it.

    Region inequalities that become constant are resolved now: a violated
    one removes its piece from the slice, a satisfied one is dropped.
    """
    pieces: list[Piece] = []
    for piece in m.pieces:
        keep = True
        ineqs: list[Inequality] = []
        for q in piece.region.inequalities:
            g = ex.substitute(q.g, index, value)
            if ex.variables(g):
                ineqs.append(Inequality(g, q.strict))
                continue
            v = ex.evaluate(g, ())
            if (v < 0.0) if q.strict else (v <= 0.0):
                continue
            keep = False
            break
        if keep:
            outputs = tuple(ex.substitute(e, index, value) for e in piece.outputs)
            pieces.append(Piece(Region(tuple(ineqs)), outputs))
    if not pieces:
        raise ToolkitError(f"slice at coordinate {index} = {value} has no pieces")
    names = m.var_names[:index] + m.var_names[index + 1:]
    return PiecewiseMap(new_domain, tuple(pieces), names)


@dataclass
class CoverReport:
    ok: bool
    checked: int
    witness: Point | None = None


def cover_check(m: PiecewiseMap, resolution: int = 1024) -> CoverReport:
    """Grid check that the declared regions cover the whole domain."""
    pts = m.domain.grid(resolution)
    coords = [np.array([p[i] for p in pts]) for i in range(m.domain.dim)]
    remaining = np.ones(len(pts), dtype=bool)
    for piece in m.pieces:
        remaining &= ~piece.region.contains_batch(coords)
        if not remaining.any():
            return CoverReport(True, len(pts))
    idx = int(np.argmax(remaining))
    return CoverReport(False, len(pts), pts[idx])


@dataclass
class ClosureContinuityReport:
    ok: bool
    worst_gap: float
    witness: Point | None = None


def closure_continuity_check(m: PiecewiseMap, resolution: int = 256,
                             probe: float = 1e-7, tol: float = 1e-5) -> ClosureContinuityReport:
    """Sampled check that piece values vary continuously up to interfaces.

    For interface points, compares each adjacent piece's value at the
    point with the same piece's value a small probe step into its region.
    Large gaps indicate a piece that does not extend continuously.
    """
    worst = 0.0
    witness = None
    for p in interface_points(m, resolution=resolution):
        for piece in m.pieces:
            if not piece.region.closure_contains(p, DEFAULT_TOL):
                continue
            v_here = piece.value(p)
            for delta in _probe_offsets(m.domain.dim, probe):
                q = tuple(c + d for c, d in zip(p, delta))
                if m.domain.contains(q) and piece.region.contains(q):
                    gap = math.dist(v_here, piece.value(q))
                    if gap > worst:
                        worst, witness = gap, p
                    break
    return ClosureContinuityReport(worst <= tol, worst, witness)


def _probe_offsets(dim: int, h: float):
    if dim == 1:
        return [(h,), (-h,)]
    return [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)]
