"""Combinatorial linkages, placements in 3-space, and their invariants.

A linkage type is a finite graph whose edges are straight members of three
kinds: ``segment`` (finite bar), ``half-line`` (ray), and ``line``.  Rays and
lines carry synthetic direction vertices so that a placement, which is just a
map from vertex ids to points, pins down the whole geometry: the synthetic
vertex of a ray sits at unit distance from the real end along the ray, and a
line is recorded through two synthetic points at unit spacing.

The module provides the length (moduli) map, the immersion and embedding
predicates, enumeration of disjoint edge pairs, the crossing-label vector
built on :func:`linkspace.geom.linking_number`, and pointed/reduced
normalization of placements.  JSON parsing and serialization for the CLI file
formats live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geom import (
    DEFAULT_TOL,
    GeomEdge,
    Vec3,
    closest_points,
    half_line,
    line,
    linking_number,
    segment,
    unit,
    vcross,
    vdist,
    vdot,
    vnorm,
    vsub,
)

EDGE_KINDS = ("segment", "half-line", "line")

# True vertices claimed to coincide closer than this are an injectivity
# violation; synthetic direction vertices are exempt.
VERTEX_COINCIDENCE_TOL = 1e-12

# Synthetic direction vertices should sit at unit distance from their anchor.
# Placements are rejected when they stray further than this.
DIRECTION_UNIT_TOL = 1e-6


@dataclass(frozen=True)
class Edge:
    """One straight member of a linkage."""

    id: str
    kind: str
    ends: tuple[str, str]

    def __post_init__(self) -> None:
        if self.kind not in EDGE_KINDS:
            raise ValueError(f"edge {self.id!r}: unknown kind {self.kind!r}")
        if self.ends[0] == self.ends[1]:
            raise ValueError(f"edge {self.id!r}: ends must be distinct vertices")

    @property
    def synthetic_ends(self) -> tuple[str, ...]:
        if self.kind == "segment":
            return ()
        if self.kind == "half-line":
            return (self.ends[1],)
        return self.ends

    @property
    def real_ends(self) -> tuple[str, ...]:
        if self.kind == "segment":
            return self.ends
        if self.kind == "half-line":
            return (self.ends[0],)
        return ()


@dataclass(frozen=True)
class LinkageType:
    """The combinatorial structure: vertices, edges, optional base point.

    ``base``, when present, is a pair (vertex id, edge id) naming the base
    vertex and a base edge incident to it; reduced normalization needs it.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    base: tuple[str, str] | None = None

    def __post_init__(self) -> None:
        seen_v: set[str] = set()
        for v in self.vertices:
            if v in seen_v:
                raise ValueError(f"duplicate vertex id {v!r}")
            seen_v.add(v)
        seen_e: set[str] = set()
        for e in self.edges:
            if e.id in seen_e:
                raise ValueError(f"duplicate edge id {e.id!r}")
            seen_e.add(e.id)
            for v in e.ends:
                if v not in seen_v:
                    raise ValueError(f"edge {e.id!r}: unknown vertex {v!r}")
        degree: dict[str, int] = {v: 0 for v in self.vertices}
        for e in self.edges:
            for v in e.ends:
                degree[v] += 1
        for v, d in degree.items():
            if d == 0:
                raise ValueError(f"isolated vertex {v!r}")
        synth = self.synthetic_vertices
        for e in self.edges:
            for v in e.real_ends:
                if v in synth:
                    raise ValueError(
                        f"edge {e.id!r}: vertex {v!r} is a synthetic direction "
                        "vertex of another edge"
                    )
        for v in synth:
            if degree[v] != 1:
                raise ValueError(
                    f"synthetic vertex {v!r} must belong to exactly one edge"
                )
        if self.base is not None:
            v0, e0 = self.base
            edge = self.edge(e0)
            if v0 not in edge.ends:
                raise ValueError(f"base vertex {v0!r} is not an end of edge {e0!r}")
            if v0 in synth:
                raise ValueError(f"base vertex {v0!r} is synthetic")

    @property
    def synthetic_vertices(self) -> frozenset[str]:
        out: set[str] = set()
        for e in self.edges:
            out.update(e.synthetic_ends)
        return frozenset(out)

    @property
    def true_vertices(self) -> tuple[str, ...]:
        synth = self.synthetic_vertices
        return tuple(v for v in self.vertices if v not in synth)

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(f"no edge {edge_id!r}")

    def adjacent(self, a: str, b: str) -> bool:
        """True when edges a and b share at least one vertex."""
        ea, eb = self.edge(a), self.edge(b)
        return bool(set(ea.ends) & set(eb.ends))


@dataclass
class Linkage:
    """A linkage type together with prescribed segment lengths."""

    type: LinkageType
    lengths: dict[str, float]

    def __post_init__(self) -> None:
        seg_ids = {e.id for e in self.type.edges if e.kind == "segment"}
        if set(self.lengths) != seg_ids:
            missing = seg_ids - set(self.lengths)
            extra = set(self.lengths) - seg_ids
            parts = []
            if missing:
                parts.append(f"missing lengths for {sorted(missing)}")
            if extra:
                parts.append(f"lengths for non-segment edges {sorted(extra)}")
            raise ValueError("; ".join(parts))
        for eid, value in self.lengths.items():
            if not (value > 0.0) or not math.isfinite(value):
                raise ValueError(f"edge {eid!r}: length must be positive, got {value}")
        bad = infeasible_cycles(self)
        if bad:
            shown = ", ".join("(" + "+".join(c) + ")" for c in bad)
            raise ValueError(f"infeasible segment cycles: {shown}")


@dataclass
class Placement:
    """Positions for every vertex id of some linkage type."""

    positions: dict[str, Vec3] = field(default_factory=dict)

    def pos(self, v: str) -> Vec3:
        try:
            return self.positions[v]
        except KeyError:
            raise ValueError(f"incomplete placement: missing vertex {v!r}") from None


@dataclass
class LabelVector:
    """Crossing labels indexed by ordered disjoint edge-id pairs."""

    labels: dict[tuple[str, str], int]

    def value(self, a: str, b: str) -> int:
        return self.labels[(a, b)]

    def as_tuple(self) -> tuple[tuple[str, str, int], ...]:
        return tuple((a, b, s) for (a, b), s in sorted(self.labels.items()))

    def nonzero(self) -> dict[tuple[str, str], int]:
        return {k: v for k, v in self.labels.items() if v != 0}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelVector):
            return NotImplemented
        return self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.as_tuple())


def _cycle_edge_sets(t: LinkageType) -> list[frozenset[str]]:
    """All simple cycles of the segment subgraph, as edge-id sets."""
    adj: dict[str, list[tuple[str, str]]] = {}
    for e in t.edges:
        if e.kind != "segment":
            continue
        u, v = e.ends
        adj.setdefault(u, []).append((e.id, v))
        adj.setdefault(v, []).append((e.id, u))
    order = {v: i for i, v in enumerate(t.vertices)}
    cycles: set[frozenset[str]] = set()

    def walk(root: str, here: str, used: list[str], visited: set[str]) -> None:
        for eid, nxt in adj.get(here, ()):
            if eid in used:
                continue
            if nxt == root:
                if len(used) >= 1:
                    cycles.add(frozenset(used + [eid]))
                continue
            if nxt in visited or order[nxt] <= order[root]:
                continue
            walk(root, nxt, used + [eid], visited | {nxt})

    for root in t.vertices:
        if root in adj:
            walk(root, root, [], {root})
    return sorted(cycles, key=lambda s: sorted(s))


def infeasible_cycles(l: Linkage) -> list[list[str]]:
    """Simple segment cycles where one length reaches the sum of the others.

    Every closed chain of bars can only close up when each bar is strictly
    shorter than the other bars combined; this reports the violating cycles
    as sorted edge-id lists (empty when the lengths are feasible).
    """
    out: list[list[str]] = []
    for cyc in _cycle_edge_sets(l.type):
        values = [l.lengths[eid] for eid in cyc]
        total = sum(values)
        if max(values) >= total - max(values):
            out.append(sorted(cyc))
    return out


def edge_pairs(t: LinkageType) -> list[tuple[str, str]]:
    """Ordered pairs of distinct edges with no common vertex, in id order."""
    ids = sorted(e.id for e in t.edges)
    out: list[tuple[str, str]] = []
    for a in ids:
        for b in ids:
            if a != b and not t.adjacent(a, b):
                out.append((a, b))
    return out


def edge_geometry(t: LinkageType, p: Placement, edge_id: str) -> GeomEdge:
    """The placed carrier of one edge, as a geometric segment/ray/line."""
    e = t.edge(edge_id)
    a = p.pos(e.ends[0])
    b = p.pos(e.ends[1])
    if e.kind == "segment":
        return segment(a, b)
    d = vsub(b, a)
    if e.kind == "half-line":
        return half_line(a, d)
    return line(a, d)


def moduli(t: LinkageType, p: Placement) -> dict[str, float]:
    """Measured lengths of the segment edges under the placement."""
    out: dict[str, float] = {}
    for e in t.edges:
        for v in e.ends:
            p.pos(v)
        if e.kind == "segment":
            out[e.id] = vdist(p.pos(e.ends[0]), p.pos(e.ends[1]))
    return out


def is_immersed_configuration(
    l: Linkage, p: Placement, tol: float = DEFAULT_TOL
) -> bool:
    """True when every bar matches its prescribed length within tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    measured = moduli(l.type, p)
    return all(abs(measured[eid] - l.lengths[eid]) <= tol for eid in measured)


def _direction_away(t: LinkageType, p: Placement, edge: Edge, v: str) -> Vec3:
    """Unit direction of ``edge`` leaving its end vertex ``v``."""
    u, w = edge.ends
    other = w if v == u else u
    return unit(vsub(p.pos(other), p.pos(v)))


def is_embedding(t: LinkageType, p: Placement, tol: float = DEFAULT_TOL) -> bool:
    """True when the placed edges meet only at shared declared vertices.

    Checks three things: true vertices are pairwise distinct (within
    ``VERTEX_COINCIDENCE_TOL``), edges with no common vertex stay further than
    tol apart, and edges sharing a vertex leave it in non-coincident
    directions (two members leaving one joint along the same ray overlap in a
    whole subsegment, which is a self-touching).
    """
    true_vs = t.true_vertices
    for i, a in enumerate(true_vs):
        for b in true_vs[i + 1 :]:
            if vdist(p.pos(a), p.pos(b)) <= VERTEX_COINCIDENCE_TOL:
                return False

    geoms = {e.id: edge_geometry(t, p, e.id) for e in t.edges}
    edges = list(t.edges)
    for i, ea in enumerate(edges):
        for eb in edges[i + 1 :]:
            shared = set(ea.ends) & set(eb.ends)
            if not shared:
                if closest_points(geoms[ea.id], geoms[eb.id], tol).distance <= tol:
                    return False
            else:
                for v in shared:
                    da = _direction_away(t, p, ea, v)
                    db = _direction_away(t, p, eb, v)
                    if vnorm(vcross(da, db)) <= 1e-12 and vdot(da, db) > 0.0:
                        return False
    return True


def label_vector(t: LinkageType, p: Placement, tol: float = DEFAULT_TOL) -> LabelVector:
    """Crossing labels for every ordered disjoint edge pair."""
    geoms = {e.id: edge_geometry(t, p, e.id) for e in t.edges}
    labels = {
        (a, b): linking_number(geoms[a], geoms[b], tol) for a, b in edge_pairs(t)
    }
    return LabelVector(labels)


def _rotation_to_x(d: Vec3) -> tuple[tuple[float, float, float], ...]:
    """Minimal-angle rotation matrix taking unit vector d to (1, 0, 0).

    The antipodal input (-1, 0, 0) has no unique minimal rotation; the fixed
    convention there is a half-turn about the y-axis.
    """
    ex = (1.0, 0.0, 0.0)
    c = vdot(d, ex)
    axis = vcross(d, ex)
    s = vnorm(axis)
    if s <= 1e-15:
        if c > 0.0:
            return ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
        return ((-1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, -1.0))
    kx, ky, kz = axis[0] / s, axis[1] / s, axis[2] / s
    # Rodrigues' formula, R = I + sin K + (1-cos) K^2 with K = [axis]_x.
    k = ((0.0, -kz, ky), (kz, 0.0, -kx), (-ky, kx, 0.0))
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            kk = sum(k[i][m] * k[m][j] for m in range(3))
            row.append((1.0 if i == j else 0.0) + s * k[i][j] + (1.0 - c) * kk)
        rows.append(tuple(row))
    return tuple(rows)


def _apply_mat(m: tuple[tuple[float, float, float], ...], v: Vec3) -> Vec3:
    return (
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    )


def normalize(t: LinkageType, p: Placement, mode: str = "pointed") -> Placement:
    """Translate (and for mode="reduced" also rotate) into standard position.

    Pointed: the base vertex (declared base, else the first true vertex) goes
    to the origin.  Reduced: additionally the base edge direction is rotated
    onto the positive x-axis by the minimal-angle rotation.
    """
    if mode not in ("pointed", "reduced"):
        raise ValueError(f"unknown mode {mode!r}")
    if t.base is not None:
        v0, base_edge = t.base
    else:
        if mode == "reduced":
            raise ValueError("reduced normalization needs a declared base")
        v0, base_edge = t.true_vertices[0], ""
    origin = p.pos(v0)
    shifted = {v: vsub(q, origin) for v, q in p.positions.items()}
    if mode == "pointed":
        return Placement(shifted)
    edge = t.edge(base_edge)
    other = edge.ends[1] if edge.ends[0] == v0 else edge.ends[0]
    d = shifted[other]
    n = vnorm(d)
    if n <= 1e-12:
        raise ValueError(f"base edge {base_edge!r} is degenerate under the placement")
    rot = _rotation_to_x((d[0] / n, d[1] / n, d[2] / n))
    return Placement({v: _apply_mat(rot, q) for v, q in shifted.items()})


# ---------------------------------------------------------------------------
# JSON formats.
#
# Linkage files:
#   {"vertices": ["a", "b", ...],
#    "edges": [{"id": "e1", "kind": "segment", "ends": ["a", "b"], "length": 2.0},
#              {"id": "r1", "kind": "half-line", "ends": ["b", "r1dir"]},
#              {"id": "l1", "kind": "line", "ends": ["l1p", "l1q"]}],
#    "base": {"vertex": "a", "edge": "e1"}}            (base optional)
#
# Half-line ends are [real end, synthetic direction vertex]; line ends are two
# synthetic vertices.  Every id referenced by an edge must be listed under
# "vertices".  "length" is required on segments and forbidden elsewhere.
#
# Placement files:
#   {"positions": {"a": [0.0, 0.0, 0.0], ...}}
# ---------------------------------------------------------------------------


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


def parse_linkage(obj: object) -> Linkage:
    """Build a validated Linkage from parsed JSON data."""
    _require(isinstance(obj, dict), "linkage file must be a JSON object")
    assert isinstance(obj, dict)
    _require("vertices" in obj, 'linkage file needs a "vertices" list')
    _require("edges" in obj, 'linkage file needs an "edges" list')
    raw_vs = obj["vertices"]
    _require(
        isinstance(raw_vs, list) and all(isinstance(v, str) for v in raw_vs),
        '"vertices" must be a list of strings',
    )
    edges: list[Edge] = []
    lengths: dict[str, float] = {}
    _require(isinstance(obj["edges"], list), '"edges" must be a list')
    for rec in obj["edges"]:
        _require(isinstance(rec, dict), "each edge must be an object")
        for key in ("id", "kind", "ends"):
            _require(key in rec, f'edge record needs "{key}"')
        ends = rec["ends"]
        _require(
            isinstance(ends, list)
            and len(ends) == 2
            and all(isinstance(v, str) for v in ends),
            f'edge {rec["id"]!r}: "ends" must be two vertex ids',
        )
        edge = Edge(id=rec["id"], kind=rec["kind"], ends=(ends[0], ends[1]))
        edges.append(edge)
        if edge.kind == "segment":
            _require(
                "length" in rec, f"edge {edge.id!r}: segments need a \"length\""
            )
            value = rec["length"]
            _require(
                isinstance(value, (int, float)) and not isinstance(value, bool),
                f"edge {edge.id!r}: length must be a number",
            )
            lengths[edge.id] = float(value)
        else:
            _require(
                "length" not in rec,
                f"edge {edge.id!r}: only segments carry a length",
            )
    base: tuple[str, str] | None = None
    if "base" in obj and obj["base"] is not None:
        rec = obj["base"]
        _require(
            isinstance(rec, dict) and "vertex" in rec and "edge" in rec,
            '"base" must be an object with "vertex" and "edge"',
        )
        base = (rec["vertex"], rec["edge"])
    t = LinkageType(vertices=tuple(raw_vs), edges=tuple(edges), base=base)
    return Linkage(type=t, lengths=lengths)


def parse_placement(obj: object, t: LinkageType) -> Placement:
    """Build a validated Placement for ``t`` from parsed JSON data."""
    _require(isinstance(obj, dict), "placement file must be a JSON object")
    assert isinstance(obj, dict)
    _require("positions" in obj, 'placement file needs a "positions" object')
    raw = obj["positions"]
    _require(isinstance(raw, dict), '"positions" must be an object')
    positions: dict[str, Vec3] = {}
    for v, xyz in raw.items():
        _require(
            isinstance(xyz, list)
            and len(xyz) == 3
            and all(
                isinstance(c, (int, float)) and not isinstance(c, bool) for c in xyz
            ),
            f"vertex {v!r}: position must be [x, y, z]",
        )
        positions[v] = (float(xyz[0]), float(xyz[1]), float(xyz[2]))
    p = Placement(positions)
    for v in t.vertices:
        p.pos(v)
    for e in t.edges:
        if e.kind == "segment":
            continue
        span = vdist(p.pos(e.ends[0]), p.pos(e.ends[1]))
        _require(
            abs(span - 1.0) <= DIRECTION_UNIT_TOL,
            f"edge {e.id!r}: direction vertex {e.ends[1]!r} must sit at unit "
            f"distance (got {span:.9g})",
        )
    return p


def linkage_to_json(l: Linkage) -> dict:
    recs = []
    for e in l.type.edges:
        rec: dict[str, object] = {"id": e.id, "kind": e.kind, "ends": list(e.ends)}
        if e.kind == "segment":
            rec["length"] = l.lengths[e.id]
        recs.append(rec)
    out: dict[str, object] = {"vertices": list(l.type.vertices), "edges": recs}
    if l.type.base is not None:
        out["base"] = {"vertex": l.type.base[0], "edge": l.type.base[1]}
    return out


def placement_to_json(p: Placement) -> dict:
    return {"positions": {v: list(q) for v, q in sorted(p.positions.items())}}
