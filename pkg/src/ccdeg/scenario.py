"""Line-oriented scenario files describing maps, curves and run parameters.

A scenario names a computation kind and declares the problem in sections:

    kind: degree

    [map]
    vars: x
    domain: -1 .. 1

    [piece]
    when: x <= 0
    value: 1/2

    [piece]
    when: x > 0
    value: -1/2

    [params]
    omega: -1 .. 1
    mode: borsuk

``when`` takes 'and'-joined comparisons (<=, <, >=, >) or ``all``;
``value`` one expression per output coordinate; ``[curve]`` sections give
gamma, dgamma, range and optional eps/psi for ODE scenarios; ``[majorant]``
(lower/upper) declares a continuous interval-valued bound used as an
envelope cross-check.  Parse errors carry the offending line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import expr as ex
from .errors import ExprParseError, ScenarioError
from .geometry import Box
from .ivp import DiscontinuityCurve, IVProblem
from .maps import Inequality, Piece, PiecewiseMap, Region

KINDS = ("envelope", "condition", "degree", "fixpoint", "ode", "reproduce-paper")


@dataclass
class Scenario:
    kind: str
    title: str
    map: PiecewiseMap | None
    problem: IVProblem | None
    params: dict[str, str]
    param_lines: dict[str, int]
    source: str

    def param(self, key: str, default=None) -> str | None:
        return self.params.get(key, default)

    def require(self, key: str) -> str:
        if key not in self.params:
            raise ScenarioError(f"missing required parameter {key!r} for kind {self.kind}")
        return self.params[key]


def _split_top_level(text: str, sep: str = ",") -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _parse_number(text: str, line: int) -> float:
    try:
        return float(ex.evaluate(ex.parse(text.strip(), (), line), ()))
    except ExprParseError:
        raise
    except Exception as err:
        raise ScenarioError(f"bad numeric value {text.strip()!r}: {err}", line)


def _parse_range(text: str, line: int) -> tuple[float, float]:
    if ".." not in text:
        raise ScenarioError(f"expected 'lo .. hi' range, got {text.strip()!r}", line)
    lo_s, hi_s = text.split("..", 1)
    lo, hi = _parse_number(lo_s, line), _parse_number(hi_s, line)
    if lo > hi:
        raise ScenarioError(f"range {text.strip()!r} is reversed", line)
    return lo, hi


def parse_box(text: str, line: int = 0) -> Box:
    ranges = [_parse_range(part, line) for part in _split_top_level(text)]
    return Box(tuple(r[0] for r in ranges), tuple(r[1] for r in ranges))


def parse_point(text: str, line: int = 0) -> tuple[float, ...]:
    return tuple(_parse_number(part, line) for part in _split_top_level(text))


_COMPARISONS = ("<=", ">=", "<", ">")


def _parse_when(text: str, names: tuple[str, ...], line: int) -> Region:
    text = text.strip()
    if text == "all":
        return Region()
    ineqs: list[Inequality] = []
    for clause in text.split(" and "):
        op = next((c for c in _COMPARISONS if c in clause), None)
        if op is None:
            raise ScenarioError(
                f"no comparison operator in condition {clause.strip()!r}", line
            )
        lhs_s, rhs_s = clause.split(op, 1)
        lhs = ex.parse(lhs_s, names, line)
        rhs = ex.parse(rhs_s, names, line)
        strict = op in ("<", ">")
        if op.startswith("<"):
            g = ex.Binary("-", lhs, rhs)
        else:
            g = ex.Binary("-", rhs, lhs)
        ineqs.append(Inequality(g, strict))
    return Region(tuple(ineqs))


@dataclass
class _RawSection:
    name: str
    line: int
    entries: dict[str, tuple[str, int]] = field(default_factory=dict)


def _scan_sections(text: str):
    kind = None
    title = ""
    sections: list[_RawSection] = []
    current: _RawSection | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = _RawSection(stripped[1:-1].strip().lower(), lineno)
            sections.append(current)
            continue
        if ":" not in stripped:
            raise ScenarioError(f"expected 'key: value', got {stripped!r}", lineno)
        key, value = stripped.split(":", 1)
        key = key.strip().lower()
        value = value.strip()
        if current is None:
            if key == "kind":
                if value not in KINDS:
                    raise ScenarioError(
                        f"unknown kind {value!r} (choose from {', '.join(KINDS)})", lineno
                    )
                kind = value
            elif key == "title":
                title = value
            else:
                raise ScenarioError(f"unexpected top-level key {key!r}", lineno)
            continue
        if key in current.entries:
            raise ScenarioError(f"duplicate key {key!r} in [{current.name}]", lineno)
        current.entries[key] = (value, lineno)
    if kind is None:
        raise ScenarioError("scenario must declare 'kind:' before any section", 1)
    return kind, title, sections


def _build_map(sections: list[_RawSection]) -> PiecewiseMap | None:
    head = next((s for s in sections if s.name == "map"), None)
    pieces_raw = [s for s in sections if s.name == "piece"]
    if head is None:
        if pieces_raw:
            raise ScenarioError("[piece] sections need a [map] header", pieces_raw[0].line)
        return None
    if "domain" not in head.entries:
        raise ScenarioError("[map] needs a 'domain:' entry", head.line)
    dom_text, dom_line = head.entries["domain"]
    domain = parse_box(dom_text, dom_line)
    if "vars" in head.entries:
        names = tuple(head.entries["vars"][0].split())
    else:
        names = ("x",) if domain.dim == 1 else ("x", "y")
    if len(names) != domain.dim:
        raise ScenarioError(
            f"{len(names)} variables for a {domain.dim}-dimensional domain", head.line
        )
    if not pieces_raw:
        raise ScenarioError("a map needs at least one [piece]", head.line)

    pieces: list[Piece] = []
    out_dim = None
    for sec in pieces_raw:
        if "value" not in sec.entries:
            raise ScenarioError("[piece] needs a 'value:' entry", sec.line)
        when_text, when_line = sec.entries.get("when", ("all", sec.line))
        region = _parse_when(when_text, names, when_line)
        val_text, val_line = sec.entries["value"]
        outputs = tuple(
            ex.parse(part, names, val_line) for part in _split_top_level(val_text)
        )
        if out_dim is None:
            out_dim = len(outputs)
        elif out_dim != len(outputs):
            raise ScenarioError("pieces disagree on the number of outputs", sec.line)
        pieces.append(Piece(region, outputs))

    majorant = None
    maj = next((s for s in sections if s.name == "majorant"), None)
    if maj is not None:
        if out_dim != 1:
            raise ScenarioError("[majorant] is supported for scalar outputs", maj.line)
        for k in ("lower", "upper"):
            if k not in maj.entries:
                raise ScenarioError(f"[majorant] needs {k!r}", maj.line)
        majorant = (
            ex.parse(maj.entries["lower"][0], names, maj.entries["lower"][1]),
            ex.parse(maj.entries["upper"][0], names, maj.entries["upper"][1]),
        )
    return PiecewiseMap(domain, tuple(pieces), names, majorant)


def _build_curves(sections: list[_RawSection]) -> tuple[DiscontinuityCurve, ...]:
    curves = []
    for sec in (s for s in sections if s.name == "curve"):
        for k in ("gamma", "dgamma", "range"):
            if k not in sec.entries:
                raise ScenarioError(f"[curve] needs {k!r}", sec.line)
        gamma = ex.parse(sec.entries["gamma"][0], ("t",), sec.entries["gamma"][1])
        dgamma = ex.parse(sec.entries["dgamma"][0], ("t",), sec.entries["dgamma"][1])
        t_lo, t_hi = _parse_range(*sec.entries["range"])
        eps = 0.5
        if "eps" in sec.entries:
            eps = _parse_number(*sec.entries["eps"])
        psi = None
        if "psi" in sec.entries:
            psi = _parse_number(*sec.entries["psi"])
        label = sec.entries.get("label", ("", 0))[0]
        curves.append(DiscontinuityCurve(gamma, dgamma, t_lo, t_hi, eps, psi, label=label))
    return tuple(curves)


def parse_scenario(text: str) -> Scenario:
    """Parse scenario text into validated model objects."""
    kind, title, sections = _scan_sections(text)
    known = {"map", "piece", "curve", "majorant", "params"}
    for sec in sections:
        if sec.name not in known:
            raise ScenarioError(f"unknown section [{sec.name}]", sec.line)
    m = _build_map(sections)
    if kind != "reproduce-paper" and m is None:
        raise ScenarioError(f"kind {kind!r} needs a [map] section", 1)

    params: dict[str, str] = {}
    param_lines: dict[str, int] = {}
    psec = next((s for s in sections if s.name == "params"), None)
    if psec is not None:
        for k, (v, ln) in psec.entries.items():
            params[k] = v
            param_lines[k] = ln

    problem = None
    if kind == "ode":
        if m is None or m.in_dim != 2 or m.out_dim != 1:
            raise ScenarioError("ode scenarios need a (t, x) -> scalar map", 1)
        curves = _build_curves(sections)
        interval_text = params.get("interval")
        if interval_text is None:
            raise ScenarioError("ode scenarios need params 'interval'", psec.line if psec else 1)
        t_lo, t_hi = _parse_range(interval_text, param_lines.get("interval", 0))
        if "x0" not in params:
            raise ScenarioError("ode scenarios need params 'x0'", psec.line if psec else 1)
        x0 = _parse_number(params["x0"], param_lines.get("x0", 0))
        if "bound" not in params:
            raise ScenarioError("ode scenarios need params 'bound'", psec.line if psec else 1)
        bound = ex.parse(params["bound"], ("t",), param_lines.get("bound", 0))
        anti = None
        if "bound_integral" in params:
            anti = ex.parse(params["bound_integral"], ("t",),
                            param_lines.get("bound_integral", 0))
        problem = IVProblem(t_lo, t_hi, x0, m, bound, anti, curves)

    return Scenario(kind, title, m, problem, params, param_lines, text)


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())
