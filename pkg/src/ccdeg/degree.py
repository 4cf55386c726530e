"""Topological degree of I - T for piecewise maps on intervals and boxes.

The degree is read off boundary data of the envelope, which determines it
whenever zero stays off the boundary values:

* d=1: sign rule on the endpoint intervals a - env(a) and b - env(b);
* d=2: winding number of x - Tx along the boundary, with envelope hull
  enclosures certifying that zero is avoided and per-step angle
  increments kept below pi/2 by refinement.

A report separates two notions: ``boundary_degree`` (degree of the
envelope from boundary data, defined once the boundary certificate
passes) and ``degree`` (the map's own degree, reported only when the
fixed-point compatibility scan also holds, because only then does a
nonzero value guarantee an actual fixed point).

The verify_* drivers exercise additivity, excision, boundary symmetry
parity and the endpoint homotopy bridge; their preconditions are
certified by recursive interval-enclosure subdivision, and certification
failure yields an "inapplicable" verdict rather than a test failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .envelope import ConditionReport, check_condition, envelope_exact
from .errors import NotWellDefinedError, RefinementExhaustedError, ToolkitError
from .geometry import Box, ConvexBody, affine_image, distance, hausdorff_distance
from .maps import PiecewiseMap, slice_map
from .parallel import pmap

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class BoundarySample:
    point: tuple[float, ...]
    shifted_envelope: ConvexBody  # hull of x - env(x)
    gap: float                    # distance of that hull from zero


@dataclass
class DegreeReport:
    """Degree answer plus its certification trail."""

    well_defined: bool
    boundary_degree: int | None
    boundary_certificate: list[BoundarySample]
    condition_report: ConditionReport | None
    notes: list[str] = field(default_factory=list)

    @property
    def degree(self) -> int | None:
        return self.boundary_degree if self.well_defined else None

    def to_text(self) -> str:
        lines = [
            f"boundary degree : {self.boundary_degree}",
            f"well defined    : {self.well_defined}",
            f"degree          : {self.degree}",
        ]
        if self.condition_report is not None:
            lines.append(f"compatibility   : {self.condition_report.verdict}")
            for v in self.condition_report.violations:
                lines.append(
                    f"  violation at {v.point}: envelope {v.envelope.describe()}"
                    f" vs value {v.map_value} (range-certified: {v.in_range_hull})"
                )
        worst = min((s.gap for s in self.boundary_certificate), default=math.inf)
        lines.append(f"boundary gap    : {worst!r} over {len(self.boundary_certificate)} samples")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)

    def csv_rows(self):
        yield ("point", "shifted_envelope", "gap")
        for s in self.boundary_certificate:
            yield (
                " ".join(repr(c) for c in s.point),
                s.shifted_envelope.describe(),
                repr(s.gap),
            )


def shifted_envelope(m: PiecewiseMap, x) -> ConvexBody:
    """Hull of x - env(x), the boundary datum whose distance from 0 matters."""
    return affine_image(envelope_exact(m, x).value, -1.0, x)


def _boundary_sample(m: PiecewiseMap, x, tol: float) -> BoundarySample:
    body = shifted_envelope(m, x)
    gap = distance((0.0,) * m.in_dim, body)
    return BoundarySample(tuple(float(c) for c in x), body, gap)


def _require_inside(m: PiecewiseMap, omega: Box):
    if omega.dim != m.in_dim:
        raise ToolkitError("omega dimension does not match the map")
    if not m.domain.contains_box(omega):
        raise ToolkitError("omega must lie inside the map domain")


def degree_1d(m: PiecewiseMap, omega: Box, tol: float = BOUNDARY_TOL,
              condition_grid: int = 201, check: bool = True,
              condition_report: ConditionReport | None = None) -> DegreeReport:
    """Degree on an open interval from the endpoint envelope intervals.

    Raises NotWellDefinedError when zero meets an endpoint interval within
    ``tol``.  When only the compatibility scan fails, the boundary degree
    is still reported with ``well_defined`` False and an explicit warning.
    """
    _require_inside(m, omega)
    if m.out_dim != 1 or omega.dim != 1:
        raise ToolkitError("degree_1d needs a 1-d map on an interval")
    a, b = omega.lo[0], omega.hi[0]
    sa = _boundary_sample(m, (a,), tol)
    sb = _boundary_sample(m, (b,), tol)
    certificate = [sa, sb]
    if sa.gap <= tol or sb.gap <= tol:
        raise NotWellDefinedError(
            f"zero meets the boundary data (gaps {sa.gap!r}, {sb.gap!r})", certificate
        )
    A, B = sa.shifted_envelope, sb.shifted_envelope
    if A.hi < 0.0 < B.lo:
        deg = 1
    elif B.hi < 0.0 < A.lo:
        deg = -1
    else:
        deg = 0

    notes: list[str] = []
    report = condition_report
    if report is None and check:
        report = check_condition(m, omega, grid=condition_grid)
    well = True
    if report is not None and not report.holds:
        well = False
        notes.append(
            "fixed-point compatibility fails inside the closure; the boundary degree "
            "exists but nonzero degree does not imply a fixed point here"
        )
    return DegreeReport(well, deg, certificate, report, notes)


def _augment_with_interfaces(m: PiecewiseMap, omega: Box, svals: list[float]) -> list[float]:
    """Insert boundary arclengths where the owning piece changes."""
    per = 2.0 * sum(omega.widths)
    out = list(svals)
    inserted = []
    owners = [m.owner_index(omega.perimeter_point(s)) for s in svals]
    for i in range(len(svals)):
        s0, s1 = svals[i], svals[(i + 1) % len(svals)] + (per if i + 1 == len(svals) else 0.0)
        if owners[i] == owners[(i + 1) % len(svals)]:
            continue
        lo, hi = s0, s1
        o_lo = owners[i]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if m.owner_index(omega.perimeter_point(mid)) == o_lo:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-13 * max(per, 1.0):
                break
        inserted.append(0.5 * (lo + hi))
    return sorted(set(out + inserted))


def degree_2d(m: PiecewiseMap, omega: Box, refinement: int = 16, tol: float = BOUNDARY_TOL,
              condition_grid: int = 65, check: bool = True,
              condition_report: ConditionReport | None = None,
              max_samples: int = 2 ** 20) -> DegreeReport:
    """Degree on an open box as the certified winding number of x - Tx.

    Boundary sampling is doubled until every angle increment is below
    pi/2; envelope hull enclosures certify zero avoidance at every sample
    (interface crossings on the boundary are located and sampled too).
    """
    _require_inside(m, omega)
    if m.out_dim != 2 or omega.dim != 2:
        raise ToolkitError("degree_2d needs a 2-d map on a box")
    per = 2.0 * sum(omega.widths)
    n = max(16, 4 * refinement)
    while True:
        svals = [per * k / n for k in range(n)]
        svals = _augment_with_interfaces(m, omega, svals)
        pts = [omega.perimeter_point(s) for s in svals]
        samples = pmap(lambda p: _boundary_sample(m, p, tol), pts)
        bad = min(samples, key=lambda s_: s_.gap)
        if bad.gap <= tol:
            raise NotWellDefinedError(
                f"zero meets the boundary data near {bad.point} (gap {bad.gap!r})",
                samples,
            )
        gvals = [
            tuple(c - v for c, v in zip(p, m.evaluate(p)))
            for p in pts
        ]
        total = 0.0
        ok = True
        for i in range(len(gvals)):
            u = gvals[i]
            v = gvals[(i + 1) % len(gvals)]
            crossp = u[0] * v[1] - u[1] * v[0]
            dotp = u[0] * v[0] + u[1] * v[1]
            dtheta = math.atan2(crossp, dotp)
            if abs(dtheta) >= math.pi / 2.0:
                ok = False
                break
            total += dtheta
        if ok:
            winding = total / (2.0 * math.pi)
            deg = int(round(winding))
            if abs(winding - deg) > 0.05:
                raise ToolkitError(f"winding sum {winding} is not close to an integer")
            break
        n *= 2
        if n > max_samples:
            raise RefinementExhaustedError(
                f"angle criterion unmet at {max_samples} boundary samples"
            )

    notes: list[str] = []
    report = condition_report
    if report is None and check:
        report = check_condition(m, omega, grid=condition_grid)
    well = True
    if report is not None and not report.holds:
        well = False
        notes.append(
            "fixed-point compatibility fails inside the closure; the boundary degree "
            "exists but nonzero degree does not imply a fixed point here"
        )
    return DegreeReport(well, deg, samples if isinstance(samples, list) else list(samples),
                        report, notes)


def compute_degree(m: PiecewiseMap, omega: Box, **kw) -> DegreeReport:
    return degree_1d(m, omega, **kw) if omega.dim == 1 else degree_2d(m, omega, **kw)


# ----------------------------------------------------------------------
# Enclosure certification by interval subdivision.
# ----------------------------------------------------------------------

def _strictly_inside(b: Box, e: Box) -> bool:
    return all(el < bl and bh < eh for el, eh, bl, bh in zip(e.lo, e.hi, b.lo, b.hi))


def certify_zero_free(m: PiecewiseMap, box: Box, tol: float = BOUNDARY_TOL,
                      exclude: tuple[Box, ...] = (), max_boxes: int = 20000,
                      max_depth: int = 40) -> bool:
    """Certify 0 not in (I - env)(box minus the open excluded boxes).

    Sound: True only when interval enclosures of x - (piece ranges)
    exclude zero on a finite subdivision.  False means "could not
    certify", not "zero present".
    """
    stack: list[tuple[Box, int]] = [(box, 0)]
    processed = 0
    while stack:
        b, depth = stack.pop()
        processed += 1
        if processed > max_boxes:
            return False
        if any(_strictly_inside(b, e) for e in exclude):
            continue
        enc = m.value_enclosure(b)
        if any(
            b.lo[i] - enc[i][1] > tol or b.hi[i] - enc[i][0] < -tol
            for i in range(b.dim)
        ):
            continue
        if depth >= max_depth:
            return False
        axis = max(range(b.dim), key=lambda i: b.widths[i])
        if b.widths[axis] <= 0.0:
            # Degenerate box that cannot be certified; nothing left to split.
            return False
        left, right = b.split(axis, b.center[axis])
        stack.append((left, depth + 1))
        stack.append((right, depth + 1))
    return True


def _boundary_faces(box: Box) -> list[Box]:
    if box.dim == 1:
        return [
            Box((box.lo[0],), (box.lo[0],)),
            Box((box.hi[0],), (box.hi[0],)),
        ]
    (x0, y0), (x1, y1) = box.lo, box.hi
    return [
        Box((x0, y0), (x1, y0)),
        Box((x1, y0), (x1, y1)),
        Box((x0, y1), (x1, y1)),
        Box((x0, y0), (x0, y1)),
    ]


# ----------------------------------------------------------------------
# Property drivers.
# ----------------------------------------------------------------------

@dataclass
class DriverReport:
    """Outcome of one degree-property driver."""

    name: str
    applicable: bool
    passed: bool | None
    degrees: dict[str, int | None] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        status = "inapplicable" if not self.applicable else ("pass" if self.passed else "fail")
        parts = [f"{self.name}: {status}"]
        for k, v in self.degrees.items():
            parts.append(f"  deg[{k}] = {v}")
        parts.extend(f"  note: {s}" for s in self.notes)
        return "\n".join(parts)


def _open_disjoint(b1: Box, b2: Box) -> bool:
    """Interiors are disjoint iff some axis has no strict overlap."""
    return any(
        b1.hi[i] <= b2.lo[i] or b2.hi[i] <= b1.lo[i]
        for i in range(b1.dim)
    )


def verify_additivity(m: PiecewiseMap, omega: Box, omega1: Box, omega2: Box,
                      tol: float = BOUNDARY_TOL) -> DriverReport:
    """Check deg(omega) = deg(omega1) + deg(omega2) for a disjoint split.

    Applicability needs zero certified away from x - env(x) on the closure
    of omega minus the two open sub-boxes.
    """
    _require_inside(m, omega)
    report = DriverReport("additivity", True, None)
    if not (omega.contains_box(omega1) and omega.contains_box(omega2)):
        report.applicable = False
        report.notes.append("sub-boxes must lie inside omega")
        return report
    if not _open_disjoint(omega1, omega2):
        report.applicable = False
        report.notes.append("sub-boxes overlap")
        return report
    if not certify_zero_free(m, omega, tol, exclude=(omega1, omega2)):
        report.applicable = False
        report.notes.append("could not certify zero-free complement")
        return report
    cond = check_condition(m, omega)
    try:
        d = compute_degree(m, omega, tol=tol, check=False, condition_report=cond)
        d1 = compute_degree(m, omega1, tol=tol, check=False, condition_report=cond)
        d2 = compute_degree(m, omega2, tol=tol, check=False, condition_report=cond)
    except NotWellDefinedError as err:
        report.applicable = False
        report.notes.append(f"boundary certification failed: {err}")
        return report
    report.degrees = {
        "omega": d.boundary_degree,
        "omega1": d1.boundary_degree,
        "omega2": d2.boundary_degree,
    }
    report.passed = d.boundary_degree == d1.boundary_degree + d2.boundary_degree
    if not cond.holds:
        report.notes.append("compatibility scan fails; identity checked at envelope level")
    return report


def _complement_boxes(omega: Box, a: Box) -> list[Box]:
    """Open boxes decomposing omega minus a closed sub-box (at most 4)."""
    out = []
    if omega.dim == 1:
        if a.lo[0] > omega.lo[0]:
            out.append(Box(omega.lo, (a.lo[0],)))
        if a.hi[0] < omega.hi[0]:
            out.append(Box((a.hi[0],), omega.hi))
        return out
    (ox0, oy0), (ox1, oy1) = omega.lo, omega.hi
    (ax0, ay0), (ax1, ay1) = a.lo, a.hi
    if ax0 > ox0:
        out.append(Box((ox0, oy0), (ax0, oy1)))
    if ax1 < ox1:
        out.append(Box((ax1, oy0), (ox1, oy1)))
    if ay0 > oy0:
        out.append(Box((ax0, oy0), (ax1, ay0)))
    if ay1 < oy1:
        out.append(Box((ax0, ay1), (ax1, oy1)))
    return out


def verify_excision(m: PiecewiseMap, omega: Box, a_box: Box | None,
                    tol: float = BOUNDARY_TOL) -> DriverReport:
    """Check deg(omega) = deg(omega minus A) for a closed zero-free box A.

    The complement is handled as a union of at most four boxes whose
    degrees are summed; internal faces are certified zero-free first.
    """
    _require_inside(m, omega)
    report = DriverReport("excision", True, None)
    if a_box is None or all(w == 0.0 for w in a_box.widths):
        d = compute_degree(m, omega, tol=tol)
        report.degrees = {"omega": d.boundary_degree, "omega_minus_A": d.boundary_degree}
        report.passed = True
        report.notes.append("empty excised set; identity is trivial")
        return report
    if not omega.contains_box(a_box):
        report.applicable = False
        report.notes.append("A must lie inside omega")
        return report
    for face in _boundary_faces(omega):
        if not certify_zero_free(m, face, tol):
            report.applicable = False
            report.notes.append("could not certify zero-free boundary of omega")
            return report
    if not certify_zero_free(m, a_box, tol):
        report.applicable = False
        report.notes.append("could not certify zero-free excised set")
        return report
    parts = _complement_boxes(omega, a_box)
    # Internal faces of the decomposition must avoid zero for additivity.
    for part in parts:
        for face in _boundary_faces(part):
            if not certify_zero_free(m, face, tol):
                report.applicable = False
                report.notes.append("could not certify an internal face")
                return report
    cond = check_condition(m, omega)
    try:
        d = compute_degree(m, omega, tol=tol, check=False, condition_report=cond)
        dparts = [
            compute_degree(m, part, tol=tol, check=False, condition_report=cond)
            for part in parts
        ]
    except NotWellDefinedError as err:
        report.applicable = False
        report.notes.append(f"boundary certification failed: {err}")
        return report
    total = sum(dp.boundary_degree for dp in dparts)
    report.degrees = {"omega": d.boundary_degree, "omega_minus_A": total}
    for i, dp in enumerate(dparts):
        report.degrees[f"part{i}"] = dp.boundary_degree
    report.passed = d.boundary_degree == total
    return report


def verify_borsuk(m: PiecewiseMap, omega: Box, tol: float = BOUNDARY_TOL,
                  samples: int = 64) -> DriverReport:
    """Check that an odd envelope on the boundary forces an odd degree."""
    _require_inside(m, omega)
    report = DriverReport("borsuk parity", True, None)
    origin = (0.0,) * omega.dim
    if not all(abs(lo + hi) <= tol for lo, hi in zip(omega.lo, omega.hi)):
        report.applicable = False
        report.notes.append("omega is not symmetric about the origin")
        return report
    if not omega.contains(origin) or any(w <= 0 for w in omega.widths):
        report.applicable = False
        report.notes.append("origin must be interior to omega")
        return report
    for p in omega.boundary_points(2 if omega.dim == 1 else samples):
        env_p = envelope_exact(m, p).value
        q = tuple(-c for c in p)
        env_q_reflected = affine_image(envelope_exact(m, q).value, -1.0, origin)
        if hausdorff_distance(env_p, env_q_reflected) > max(tol, 1e-9):
            report.applicable = False
            report.notes.append(f"envelope is not odd at boundary point {p}")
            return report
    try:
        d = compute_degree(m, omega, tol=tol)
    except NotWellDefinedError as err:
        report.applicable = False
        report.notes.append(f"boundary certification failed: {err}")
        return report
    report.degrees = {"omega": d.boundary_degree}
    report.passed = d.boundary_degree is not None and d.boundary_degree % 2 == 1
    if not d.well_defined:
        report.notes.append("compatibility scan fails; parity read from the envelope degree")
    return report


# ----------------------------------------------------------------------
# Homotopy bridge.
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class HomotopyFamily:
    """Family H(x, t) on omega x [0,1], modelled as a 2-d-input piecewise map.

    The parameter is the second coordinate; ``slice_at`` produces the
    1-d piecewise map of a fixed parameter value.
    """

    joint: PiecewiseMap

    def __post_init__(self):
        if self.joint.in_dim != 2 or self.joint.out_dim != 1:
            raise ToolkitError("a homotopy family needs a 2-d input, 1-d output map")
        if abs(self.joint.domain.lo[1]) > 1e-12 or abs(self.joint.domain.hi[1] - 1.0) > 1e-12:
            raise ToolkitError("the parameter axis must be [0, 1]")

    @property
    def x_domain(self) -> Box:
        return Box((self.joint.domain.lo[0],), (self.joint.domain.hi[0],))

    def slice_at(self, t: float) -> PiecewiseMap:
        return slice_map(self.joint, 1, t, self.x_domain)

    def sample_modulus(self, x_grid: int = 101, t_grid: int = 33) -> list[float]:
        """Sup over an x-grid of |H(., t_i) - H(., t_{i+1})| per t step."""
        xs = self.x_domain.grid(x_grid)
        tvals = [k / (t_grid - 1) for k in range(t_grid)]
        sups: list[float] = []
        prev = None
        for t in tvals:
            vals = [self.joint.evaluate((x[0], t))[0] for x in xs]
            if prev is not None:
                sups.append(max(abs(a - b) for a, b in zip(vals, prev)))
            prev = vals
        return sups


@dataclass
class HomotopyReport:
    applicable: bool
    passed: bool | None
    degree_start: int | None
    degree_end: int | None
    t_condition_verdicts: list[tuple[float, str]]
    modulus_samples: list[float]
    notes: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        status = "inapplicable" if not self.applicable else ("pass" if self.passed else "fail")
        lines = [
            f"homotopy bridge: {status}",
            f"  deg[t=0] = {self.degree_start}   deg[t=1] = {self.degree_end}",
        ]
        for t, verdict in self.t_condition_verdicts:
            lines.append(f"  compatibility at t={t!r}: {verdict}")
        if self.modulus_samples:
            lines.append(f"  max parameter-step modulus: {max(self.modulus_samples)!r}")
        lines.extend(f"  note: {s}" for s in self.notes)
        return "\n".join(lines)


def homotopy_degree_bridge(h: HomotopyFamily, omega: Box, tol: float = BOUNDARY_TOL,
                           t_grid: int = 21) -> HomotopyReport:
    """Certify endpoint degrees agree across a parameter family.

    Boundary avoidance is certified on a (boundary x parameter)-grid of
    envelope hulls; the compatibility scan runs at the endpoints (where
    the theory needs it) and at interior grid parameters for diagnosis.
    The finite grid is recorded evidence, not a proof of the continuity
    modulus hypothesis.
    """
    if omega.dim != 1:
        raise ToolkitError("the homotopy bridge is implemented for 1-d state")
    if not h.x_domain.contains_box(omega):
        raise ToolkitError("omega must lie inside the family's state domain")
    tvals = [k / (t_grid - 1) for k in range(t_grid)]
    notes: list[str] = []

    # Boundary x parameter certification.
    for t in tvals:
        sl = h.slice_at(t)
        for p in omega.boundary_points(2):
            body = shifted_envelope(sl, p)
            gap = distance((0.0,), body)
            if gap <= tol:
                return HomotopyReport(
                    False, None, None, None, [], [],
                    [f"zero meets boundary data at x={p[0]!r}, t={t!r} (gap {gap!r})"],
                )

    verdicts: list[tuple[float, str]] = []
    cond_by_t = {}
    for t in tvals:
        rep = check_condition(h.slice_at(t), omega)
        verdicts.append((t, rep.verdict))
        cond_by_t[t] = rep
        if rep.verdict == "fails" and t not in (0.0, 1.0):
            notes.append(
                f"compatibility fails at interior parameter t={t!r}; endpoint degrees "
                "remain linked but the family is unstable there"
            )

    d0 = degree_1d(h.slice_at(0.0), omega, tol=tol, check=False,
                   condition_report=cond_by_t[0.0])
    d1 = degree_1d(h.slice_at(1.0), omega, tol=tol, check=False,
                   condition_report=cond_by_t[1.0])
    modulus = h.sample_modulus()
    passed = d0.boundary_degree == d1.boundary_degree
    if not (d0.well_defined and d1.well_defined):
        notes.append("an endpoint fails the compatibility scan; equality read at envelope level")
    return HomotopyReport(True, passed, d0.boundary_degree, d1.boundary_degree,
                          verdicts, modulus, notes)
