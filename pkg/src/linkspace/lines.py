"""Oriented-line arrangements and cell models of their completed spaces.

An oriented line is stored in normal form: a unit direction plus the foot
of the perpendicular from the origin.  Scaling every foot toward zero is a
deformation retract of a line arrangement onto lines through the origin,
and the pairwise crossing labels are constant along the way, which is what
:func:`retract_to_origin` packages.

The completed space of two disjoint oriented lines has an explicit chart
(cylinder radius, contact abscissa, and two tangent angles) with two
collapse rules; :func:`two_line_canonical` reduces chart points to
canonical representatives.  :func:`build_two_line_complex` and
:func:`build_three_line_complex` assemble finite CW models of the
completed spaces of two and three disjoint oriented lines, the latter
from a reviewed incidence data file; :func:`pair_space_descriptor` gives
symbolic descriptions for every pair of generalized intervals (line,
half-line, segment).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from itertools import product

from .cw import CWComplex
from .geom import DEFAULT_TOL, Vec3, unit, vadd, vdot, vnorm, vscale, vsub
from .model import (
    Edge,
    LabelVector,
    Linkage,
    LinkageType,
    Placement,
    label_vector,
)
from .virtual import PLPath, VirtualConfiguration

CHART_TOL = 1e-12

EDGE_KIND_NAMES = ("line", "half-line", "segment")

THREE_LINE_VARIANTS = ("strict", "geometric")


@dataclass(frozen=True)
class OrientedLine:
    """A line in normal form: unit direction and perpendicular foot."""

    v: Vec3
    x: Vec3

    def __post_init__(self) -> None:
        if abs(vnorm(self.v) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")
        if abs(vdot(self.x, self.v)) > 1e-9:
            raise ValueError("foot must be perpendicular to the direction")


def line_normal_form(anchor: Vec3, direction: Vec3) -> OrientedLine:
    """Normal form of the line through anchor with the given direction.

    Inputs already in normal form are returned verbatim, which makes the
    map exactly idempotent despite rounding in the general branch.
    """
    try:
        return OrientedLine(v=direction, x=anchor)
    except ValueError:
        pass
    v = unit(direction)
    x = vsub(anchor, vscale(vdot(anchor, v), v))
    return OrientedLine(v=v, x=x)


# ---------------------------------------------------------------------------
# The two-line chart.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoLineChart:
    """Chart point for the completed space of two oriented lines.

    epsilon is the cylinder radius (half the distance between the lines),
    x the abscissa of the contact point along the first line, and phi,
    theta the polar and tangent angles.  When theta lies in {0, pi} the
    lines are parallel and x carries no information; when additionally
    epsilon is zero, phi carries none either.
    """

    epsilon: float
    x: float
    phi: float
    theta: float

    def __post_init__(self) -> None:
        if self.epsilon < -CHART_TOL:
            raise ValueError("epsilon must be nonnegative")


def _wrap_angle(a: float) -> float:
    out = math.fmod(a, 2.0 * math.pi)
    if out < 0.0:
        out += 2.0 * math.pi
    if out <= CHART_TOL or abs(out - 2.0 * math.pi) <= CHART_TOL:
        return 0.0
    if abs(out - math.pi) <= CHART_TOL:
        return math.pi
    return out


def two_line_canonical(chart: TwoLineChart) -> TwoLineChart:
    """Canonical representative under the chart's collapse rules.

    Parallel tangents (theta in {0, pi}) forget x; a vanishing radius on
    top of that forgets phi as well.  Quotiented coordinates are set to
    zero, so two chart points are equivalent exactly when their canonical
    forms agree within 1e-12.
    """
    eps = 0.0 if abs(chart.epsilon) <= CHART_TOL else chart.epsilon
    x = chart.x
    phi = _wrap_angle(chart.phi)
    theta = _wrap_angle(chart.theta)
    if theta in (0.0, math.pi):
        x = 0.0
        if eps == 0.0:
            phi = 0.0
    return TwoLineChart(epsilon=eps, x=x, phi=phi, theta=theta)


def charts_equivalent(c1: TwoLineChart, c2: TwoLineChart) -> bool:
    a, b = two_line_canonical(c1), two_line_canonical(c2)
    return (
        abs(a.epsilon - b.epsilon) <= CHART_TOL
        and abs(a.x - b.x) <= CHART_TOL
        and abs(a.phi - b.phi) <= CHART_TOL
        and abs(a.theta - b.theta) <= CHART_TOL
    )


# ---------------------------------------------------------------------------
# Dilation retract of a line arrangement onto lines through the origin.
# ---------------------------------------------------------------------------


def _line_arrangement(lines: list[OrientedLine]) -> tuple[LinkageType, Linkage]:
    vertices: list[str] = []
    edges: list[Edge] = []
    for i in range(len(lines)):
        a, b = f"l{i}a", f"l{i}b"
        vertices.extend([a, b])
        edges.append(Edge(f"l{i}", "line", (a, b)))
    t = LinkageType(vertices=tuple(vertices), edges=tuple(edges))
    return t, Linkage(t, {})


def _arrangement_placement(lines: list[OrientedLine], scale: float) -> Placement:
    positions: dict[str, Vec3] = {}
    for i, ln in enumerate(lines):
        foot = vscale(scale, ln.x)
        positions[f"l{i}a"] = foot
        positions[f"l{i}b"] = vadd(foot, ln.v)
    return Placement(positions)


def retract_to_origin(
    lines: list[OrientedLine],
    labels: LabelVector,
    tol: float = DEFAULT_TOL,
) -> VirtualConfiguration:
    """Slide every line to the origin, keeping directions and labels.

    The lines become edges "l0", "l1", ... of a line-only linkage; the
    given labels must match the crossing labels of the arrangement as
    placed (keys are ordered pairs of those edge ids).  Scaling all feet
    by a common factor never changes any crossing sign, so the limit with
    every foot at the origin keeps the same label vector; the witness
    path is that straight scaling.
    """
    if not lines:
        raise ValueError("at least one line is required")
    t, l = _line_arrangement(lines)
    start = _arrangement_placement(lines, 1.0)
    actual = label_vector(t, start, tol)
    if labels.labels != actual.labels:
        raise ValueError("inconsistent labels")
    limit = _arrangement_placement(lines, 0.0)
    return VirtualConfiguration(
        limit=limit, labels={actual}, witness=PLPath((start, limit))
    )


# ---------------------------------------------------------------------------
# Symbolic descriptors for pairs of generalized intervals.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairSpaceDescriptor:
    """Symbolic description of a completed pair-of-intervals space."""

    kinds: tuple[str, str]
    chart: str
    equivalences: tuple[str, ...]
    slit: str | None
    homotopy_type: str | None
    completion_is_blowup: bool
    framed_factors: str | None


_TWO_LINE_EQUIVALENCES = (
    "theta in {0, pi} collapses the x axis to a point",
    "epsilon = 0 and theta in {0, pi} collapses phi as well",
)


def pair_space_descriptor(
    kind1: str,
    kind2: str,
    length1: float | None = None,
    length2: float | None = None,
) -> PairSpaceDescriptor:
    """Describe the completed reduced space of two generalized intervals.

    Kinds are "line", "half-line", or "segment"; a segment kind may carry
    its length, which appears in the slit condition.  For every pair kind
    the completed space coincides with the blow-up.
    """
    for kind in (kind1, kind2):
        if kind not in EDGE_KIND_NAMES:
            raise ValueError(f"unknown interval kind: {kind!r}")
    kinds = (kind1, kind2)
    ordered = sorted(
        zip(kinds, (length1, length2)),
        key=lambda kl: EDGE_KIND_NAMES.index(kl[0]),
    )
    names = tuple(k for k, _ in ordered)
    chart = "[0, inf) x R x S1 x S1"
    if names == ("line", "line"):
        return PairSpaceDescriptor(
            kinds=kinds,
            chart=chart,
            equivalences=_TWO_LINE_EQUIVALENCES,
            slit=None,
            homotopy_type="S2 v S2 v S1",
            completion_is_blowup=True,
            framed_factors="R3 x SO(3) x S1",
        )
    if names == ("line", "half-line"):
        return PairSpaceDescriptor(
            kinds=kinds,
            chart=chart + " glued to the embedded-pair chart over 0 < x",
            equivalences=_TWO_LINE_EQUIVALENCES,
            slit="epsilon = 0 requires x <= 0",
            homotopy_type=None,
            completion_is_blowup=True,
            framed_factors="Spin(3) x S1",
        )
    if names == ("line", "segment"):
        a = next(ln for k, ln in ordered if k == "segment")
        upper = "a" if a is None else format(float(a), "g")
        return PairSpaceDescriptor(
            kinds=kinds,
            chart=chart + " glued to the embedded-pair chart over x in (0, "
            + upper
            + ")",
            equivalences=_TWO_LINE_EQUIVALENCES,
            slit=f"epsilon = 0 requires x not in (0, {upper})",
            homotopy_type=None,
            completion_is_blowup=True,
            framed_factors=None,
        )
    # Both members bounded on at least one side: the pair can always be
    # pulled apart, and the completed space retracts to a label sphere.
    return PairSpaceDescriptor(
        kinds=kinds,
        chart="R3 x S2 with the separation axis collapsed",
        equivalences=(),
        slit=None,
        homotopy_type="S2",
        completion_is_blowup=True,
        framed_factors=None,
    )


# ---------------------------------------------------------------------------
# CW model for two lines.
# ---------------------------------------------------------------------------


def build_two_line_complex() -> CWComplex:
    """CW model of the completed reduced space of two disjoint lines.

    One label sphere per crossing sign, each built from two poles, two
    meridians, and two hemispheres; the poles (parallel and antiparallel
    direction pairs) are shared between the spheres.
    """
    cells = {
        0: ["pole.N", "pole.S"],
        1: ["p.m1", "p.m2", "m.m1", "m.m2"],
        2: ["p.F1", "p.F2", "m.F1", "m.F2"],
    }
    boundaries = {
        1: {
            "p.m1": {"pole.S": 1, "pole.N": -1},
            "p.m2": {"pole.S": 1, "pole.N": -1},
            "m.m1": {"pole.S": 1, "pole.N": -1},
            "m.m2": {"pole.S": 1, "pole.N": -1},
        },
        2: {
            "p.F1": {"p.m1": 1, "p.m2": -1},
            "p.F2": {"p.m2": 1, "p.m1": -1},
            "m.F1": {"m.m1": 1, "m.m2": -1},
            "m.F2": {"m.m2": 1, "m.m1": -1},
        },
    }
    cx = CWComplex(cells=cells, boundaries=boundaries)
    cx.validate()
    return cx


# ---------------------------------------------------------------------------
# CW model for three lines.
# ---------------------------------------------------------------------------


def _load_three_line_data() -> dict:
    path = resources.files("linkspace.data").joinpath("three_lines_cells.json")
    return json.loads(path.read_text())


def _sign_prefix(delta: tuple[int, int, int]) -> str:
    return "".join("p" if s > 0 else "m" for s in delta)


def build_three_line_complex(variant: str = "strict") -> CWComplex:
    """CW model of the completed reduced space of three disjoint lines.

    Eight blocks, one per triple of pairwise crossing signs, each a
    product of the direction-angle torus with the tilt-parameter square
    degenerated over the square's boundary; blocks are glued along the
    cells where at least one pair of lines is aligned or reverse-aligned.
    The two variants differ only in how widely the two center poles are
    shared: "strict" glues each across all eight blocks, "geometric"
    only across the sign of the aligned pair.  Cell ids are
    "<sign prefix>.<fiber cell>.<base cell>" with the sign prefix of the
    block representative whose shared axes are set positive.
    """
    if variant not in THREE_LINE_VARIANTS:
        raise ValueError(f"unknown variant: {variant!r}")
    data = _load_three_line_data()
    base_dim = {
        name: int(d)
        for d, names in data["square"]["cells"].items()
        for name in names
    }
    base_boundary = data["square"]["boundary"]
    collapse = data["collapse"]
    fibers = data["fibers"]
    fiber_maps = data["fiber_maps"]
    dead: dict[str, tuple[int, ...]] = {
        name: tuple(axes) for name, axes in data["dead_axes"].items()
    }
    for name, axes in data["pole_dead_axes"][variant].items():
        dead[name] = tuple(axes)

    def canon(delta: tuple[int, int, int], name: str) -> tuple[int, int, int]:
        axes = dead.get(name, ())
        return tuple(1 if i in axes else delta[i] for i in range(3))

    def cid(delta: tuple[int, int, int], name: str) -> str:
        return _sign_prefix(canon(delta, name)) + "." + name

    cells: dict[int, list[str]] = {d: [] for d in range(5)}
    boundaries: dict[int, dict[str, dict[str, int]]] = {
        d: {} for d in range(1, 5)
    }
    seen_boundary: dict[str, dict[str, int]] = {}

    for delta in product((1, -1), repeat=3):
        for base_cell, ftype in collapse.items():
            for fib_cell, fdim in fibers[ftype]["dims"].items():
                name = f"{fib_cell}.{base_cell}"
                dim = fdim + base_dim[base_cell]
                this_id = cid(delta, name)

                chain: dict[str, int] = {}
                fib_bnd = fibers[ftype]["boundary"].get(fib_cell, {})
                for fib_target, coeff in fib_bnd.items():
                    tgt = cid(delta, f"{fib_target}.{base_cell}")
                    chain[tgt] = chain.get(tgt, 0) + coeff
                sign = -1 if fdim % 2 else 1
                for base_target, bco in base_boundary.get(base_cell, {}).items():
                    key = f"{ftype}->{collapse[base_target]}"
                    for fib_image, mco in fiber_maps[key].get(fib_cell, []):
                        tgt = cid(delta, f"{fib_image}.{base_target}")
                        chain[tgt] = chain.get(tgt, 0) + sign * bco * mco
                chain = {k: v for k, v in chain.items() if v != 0}

                if this_id in seen_boundary:
                    # Shared cell reached from another block: the gluing is
                    # by the identity, so both blocks must induce the same
                    # boundary chain.
                    if seen_boundary[this_id] != chain:
                        raise AssertionError(
                            f"inconsistent glued boundary for {this_id}"
                        )
                    continue
                seen_boundary[this_id] = chain
                cells[dim].append(this_id)
                if dim > 0:
                    boundaries[dim][this_id] = chain

    for dim in cells:
        cells[dim].sort()
    cx = CWComplex(
        cells={d: ids for d, ids in cells.items() if ids},
        boundaries={d: b for d, b in boundaries.items() if b},
    )
    cx.validate()
    return cx


def fundamental_four_cycles(variant: str = "strict") -> list[dict[str, int]]:
    """The eight top cycles, one per block: all its 4-cells with sign +1."""
    cycles = []
    for delta in product((1, -1), repeat=3):
        prefix = _sign_prefix(delta)
        chain = {
            f"{prefix}.{fib}.{base}": 1
            for fib in ("K", "L")
            for base in ("A", "B", "C", "D")
        }
        cycles.append(chain)
    return cycles


def _single_block_complex() -> CWComplex:
    """One product block alone (no cross-block gluing), for validation."""
    data = _load_three_line_data()
    base_dim = {
        name: int(d)
        for d, names in data["square"]["cells"].items()
        for name in names
    }
    collapse = data["collapse"]
    fibers = data["fibers"]
    fiber_maps = data["fiber_maps"]
    base_boundary = data["square"]["boundary"]

    cells: dict[int, list[str]] = {d: [] for d in range(5)}
    boundaries: dict[int, dict[str, dict[str, int]]] = {
        d: {} for d in range(1, 5)
    }
    for base_cell, ftype in collapse.items():
        for fib_cell, fdim in fibers[ftype]["dims"].items():
            name = f"{fib_cell}.{base_cell}"
            dim = fdim + base_dim[base_cell]
            chain: dict[str, int] = {}
            for fib_target, coeff in fibers[ftype]["boundary"].get(
                fib_cell, {}
            ).items():
                tgt = f"{fib_target}.{base_cell}"
                chain[tgt] = chain.get(tgt, 0) + coeff
            sign = -1 if fdim % 2 else 1
            for base_target, bco in base_boundary.get(base_cell, {}).items():
                key = f"{ftype}->{collapse[base_target]}"
                for fib_image, mco in fiber_maps[key].get(fib_cell, []):
                    tgt = f"{fib_image}.{base_target}"
                    chain[tgt] = chain.get(tgt, 0) + sign * bco * mco
            chain = {k: v for k, v in chain.items() if v != 0}
            cells[dim].append(name)
            if dim > 0:
                boundaries[dim][name] = chain
    for dim in cells:
        cells[dim].sort()
    cx = CWComplex(
        cells={d: ids for d, ids in cells.items() if ids},
        boundaries={d: b for d, b in boundaries.items() if b},
    )
    cx.validate()
    return cx
