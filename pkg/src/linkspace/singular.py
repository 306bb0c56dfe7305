"""Classification of self-touching placements and their local blow-up data.

A placement that satisfies the bar lengths but fails the embedding predicate
touches itself somewhere.  This module detects the contact features, sorts
them into a small catalogue (transverse double point, edge through an elbow
vertex, edge lying along an elbow edge, double elbow), and reports how many
one-sided local sheets sit over the touching placement in the completed
configuration space, together with representative crossing-label classes.

Label classes are computed from the geometry rather than from hard-coded
sign tables, because flipping an edge's declared orientation negates its
labels.  The touching feature is perturbed along a sphere of small
translations, samples are joined when the straight interpolation between
them crosses no edge, and connected components are read off together with
the labels they attain.  The flat elbow resting on the passing edge, whose
two extra pinched sheets are invisible to straight translations, uses
explicit tilted probe placements instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geom import (
    DEFAULT_TOL,
    GeomEdge,
    Vec3,
    closest_points,
    segment,
    unit,
    vadd,
    vcross,
    vdist,
    vdot,
    vnorm,
    vscale,
    vsub,
)
from .model import (
    Edge,
    LabelVector,
    Linkage,
    LinkageType,
    Placement,
    edge_geometry,
    is_embedding,
    is_immersed_configuration,
    label_vector,
)

KIND_PAIRWISE = "pairwise-meeting"
KIND_MULTI = "multi-point"
KIND_EDGE_VERTEX = "edge-through-vertex"
KIND_VERTEX_VERTEX = "vertex-vertex"
KIND_COINCIDING = "coinciding-edges"
KIND_COMBINATION = "constrained-combination"

# Two contact points closer than this are treated as one feature location.
CLUSTER_TOL = 1e-6

# Directions are parallel below this cross-product magnitude; a crossing is
# transverse above TRANSVERSE_EPS.
PARALLEL_EPS = 1e-9
TRANSVERSE_EPS = 1e-6


@dataclass(frozen=True)
class SingularFeature:
    """One local contact feature of a touching placement."""

    kind: str
    edges: tuple[str, ...]
    vertices: tuple[str, ...]
    location: Vec3
    multiplicity: int | None = None
    transverse: bool | None = None
    coplanar: bool | None = None
    outside: bool | None = None
    elbow_closed: bool | None = None
    opposite_sides: bool | None = None

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self.edges) | frozenset(self.vertices)


@dataclass
class SingularityReport:
    features: list[SingularFeature]
    generic: bool
    catalogued: bool
    preimage_count: int | None
    label_classes: list[list[LabelVector]] | None


def _feature_preimages(f: SingularFeature) -> int | None:
    """Catalogue sheet count for one feature, or None if not covered."""
    if f.kind == KIND_PAIRWISE:
        return 2 if f.transverse else None
    if f.kind == KIND_EDGE_VERTEX:
        if f.coplanar is None:
            return None
        # A closed elbow puts every involved edge in one plane with the
        # passer, so the coplanar reading applies to it as well.
        return 3 if (f.coplanar or f.elbow_closed) else 2
    if f.kind == KIND_VERTEX_VERTEX:
        if f.elbow_closed or f.opposite_sides is None:
            return None
        return 2 if f.opposite_sides else 3
    if f.kind == KIND_COINCIDING:
        # Only the passer-along-an-elbow-edge pattern is catalogued; the
        # local sheets on either side of the shared carrier merge there and
        # a single class remains.
        return 1 if f.vertices else None
    return None


def blowup_fiber_count(report: SingularityReport) -> int:
    """Number of completed-space points over the touching placement.

    Independent features contribute independently, so counts multiply.
    """
    if not report.catalogued:
        raise ValueError("uncatalogued singularity")
    total = 1
    for f in report.features:
        n = _feature_preimages(f)
        if n is None:
            raise ValueError("uncatalogued singularity")
        total *= n
    return total


# ---------------------------------------------------------------------------
# Contact detection.
# ---------------------------------------------------------------------------


def _incident_real(t: LinkageType, v: str) -> list[Edge]:
    return [e for e in t.edges if v in e.real_ends]


def _away_direction(p: Placement, e: Edge, v: str) -> Vec3:
    other = e.ends[1] if e.ends[0] == v else e.ends[0]
    return unit(vsub(p.pos(other), p.pos(v)))


def _point_edge_distance(g: GeomEdge, q: Vec3) -> tuple[float, float]:
    """Distance from point q to edge g, plus the foot parameter."""
    rel = vdot(vsub(q, g.anchor), g.direction)
    lo, hi = g.param_range()
    t_foot = min(max(rel, lo), hi)
    return vdist(q, g.point_at(t_foot)), t_foot


def _cluster_points(points: list[Vec3]) -> list[list[int]]:
    """Group point indices whose locations agree within CLUSTER_TOL."""
    n = len(points)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if vdist(points[i], points[j]) <= CLUSTER_TOL:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def classify_singularity(
    l: Linkage,
    p: Placement,
    tol: float = DEFAULT_TOL,
    with_label_classes: bool = True,
) -> SingularityReport:
    """Identify every contact feature of a touching configuration.

    Raises if the placement violates the bar lengths ("not a configuration")
    or has no contact at all ("placement is embedded").  Label classes are
    probed only for single-feature reports; pass with_label_classes=False
    to skip that work.
    """
    t = l.type
    if not is_immersed_configuration(l, p, max(tol, DEFAULT_TOL)):
        raise ValueError("not a configuration")
    if is_embedding(t, p, tol):
        raise ValueError("placement is embedded")

    geoms = {e.id: edge_geometry(t, p, e.id) for e in t.edges}
    edges = list(t.edges)

    point_contacts: list[tuple[str, str, Vec3]] = []
    overlap_pairs: list[tuple[str, str, Vec3]] = []
    for i, ea in enumerate(edges):
        for eb in edges[i + 1 :]:
            shared = set(ea.ends) & set(eb.ends)
            ga, gb = geoms[ea.id], geoms[eb.id]
            if shared:
                for v in shared & set(ea.real_ends):
                    da = _away_direction(p, ea, v)
                    db = _away_direction(p, eb, v)
                    if vnorm(vcross(da, db)) <= PARALLEL_EPS and vdot(da, db) > 0:
                        overlap_pairs.append((ea.id, eb.id, p.pos(v)))
                continue
            cp = closest_points(ga, gb, tol)
            if cp.distance > tol:
                continue
            if vnorm(vcross(ga.direction, gb.direction)) <= PARALLEL_EPS:
                overlap_pairs.append((ea.id, eb.id, cp.a))
            else:
                mid = vscale(0.5, vadd(cp.a, cp.b))
                point_contacts.append((ea.id, eb.id, mid))

    true_vs = t.true_vertices
    coincident: list[tuple[str, str]] = []
    for i, va in enumerate(true_vs):
        for vb in true_vs[i + 1 :]:
            if vdist(p.pos(va), p.pos(vb)) <= tol:
                coincident.append((va, vb))

    features: list[SingularFeature] = []

    # Overlaps first: a passer lying along an elbow edge absorbs the point
    # contact its far part makes with the other elbow edge.
    absorbed_vertices: set[str] = set()
    for a, b, loc in overlap_pairs:
        ea, eb = t.edge(a), t.edge(b)
        elbow_v = None
        for passing, host in ((ea, eb), (eb, ea)):
            for v in host.real_ends:
                d, t_foot = _point_edge_distance(geoms[passing.id], p.pos(v))
                if (
                    d <= tol
                    and geoms[passing.id].param_interior(t_foot)
                    and len(_incident_real(t, v)) == 2
                ):
                    elbow_v = v
        if elbow_v is not None:
            others = [e.id for e in _incident_real(t, elbow_v)]
            features.append(
                SingularFeature(
                    kind=KIND_COINCIDING,
                    edges=tuple(sorted({a, b, *others})),
                    vertices=(elbow_v,),
                    location=p.pos(elbow_v),
                    elbow_closed=_elbow_closed(t, p, elbow_v),
                )
            )
            absorbed_vertices.add(elbow_v)
        else:
            features.append(
                SingularFeature(
                    kind=KIND_COINCIDING,
                    edges=tuple(sorted((a, b))),
                    vertices=(),
                    location=loc,
                )
            )

    # Cluster point contacts and vertex coincidences by location.
    cluster_pts: list[Vec3] = [c[2] for c in point_contacts]
    cluster_pts += [p.pos(va) for va, _ in coincident]
    payload: list[tuple[str, tuple]] = [("contact", c) for c in point_contacts]
    payload += [("vv", c) for c in coincident]

    for group in _cluster_points(cluster_pts):
        loc = cluster_pts[group[0]]
        pair_ids: set[str] = set()
        vv_pairs: list[tuple[str, str]] = []
        for idx in group:
            tag, item = payload[idx]
            if tag == "contact":
                pair_ids.update((item[0], item[1]))
            else:
                vv_pairs.append(item)
        verts_here = tuple(
            sorted(v for v in true_vs if vdist(p.pos(v), loc) <= CLUSTER_TOL)
        )
        if any(v in absorbed_vertices for v in verts_here):
            continue
        if vv_pairs:
            features.append(_vertex_vertex_feature(t, p, verts_here, pair_ids, loc))
        elif verts_here:
            features.append(
                _edge_vertex_feature(t, p, geoms, verts_here, pair_ids, loc, tol)
            )
        else:
            ids = tuple(sorted(pair_ids))
            if len(ids) == 2:
                u1 = geoms[ids[0]].direction
                u2 = geoms[ids[1]].direction
                features.append(
                    SingularFeature(
                        kind=KIND_PAIRWISE,
                        edges=ids,
                        vertices=(),
                        location=loc,
                        transverse=vnorm(vcross(u1, u2)) > TRANSVERSE_EPS,
                    )
                )
            else:
                features.append(
                    SingularFeature(
                        kind=KIND_MULTI,
                        edges=ids,
                        vertices=(),
                        location=loc,
                        multiplicity=len(ids),
                    )
                )

    # A closed elbow's own coinciding edges are part of the elbow feature,
    # not an independent overlap.
    closed_feats = [f for f in features if f.elbow_closed and f.vertices]
    features = [
        f
        for f in features
        if not (
            f.kind == KIND_COINCIDING
            and not f.vertices
            and any(set(f.edges) <= set(g.edges) for g in closed_feats)
        )
    ]

    # Features sharing support constrain each other and leave the catalogue.
    combo: SingularFeature | None = None
    for i, fa in enumerate(features):
        for fb in features[i + 1 :]:
            if fa.support & fb.support:
                combo = SingularFeature(
                    kind=KIND_COMBINATION,
                    edges=tuple(sorted(set(fa.edges) | set(fb.edges))),
                    vertices=tuple(sorted(set(fa.vertices) | set(fb.vertices))),
                    location=fa.location,
                )
                break
        if combo:
            break
    if combo:
        features.append(combo)

    generic = (
        combo is None
        and bool(features)
        and all(f.kind == KIND_PAIRWISE and f.transverse for f in features)
    )
    catalogued = (
        combo is None
        and bool(features)
        and all(_feature_preimages(f) is not None for f in features)
    )
    count = None
    if catalogued:
        count = 1
        for f in features:
            count *= _feature_preimages(f)  # type: ignore[operator]

    classes = None
    if catalogued and with_label_classes and len(features) == 1:
        classes = feature_label_classes(l, p, features[0], tol)

    return SingularityReport(
        features=features,
        generic=generic,
        catalogued=catalogued,
        preimage_count=count,
        label_classes=classes,
    )


def _elbow_closed(t: LinkageType, p: Placement, v: str) -> bool:
    inc = _incident_real(t, v)
    if len(inc) != 2:
        return False
    d1 = _away_direction(p, inc[0], v)
    d2 = _away_direction(p, inc[1], v)
    return vnorm(vcross(d1, d2)) <= PARALLEL_EPS and vdot(d1, d2) > 0


def _vertex_vertex_feature(
    t: LinkageType,
    p: Placement,
    verts: tuple[str, ...],
    pair_ids: set[str],
    loc: Vec3,
) -> SingularFeature:
    if len(verts) != 2:
        return SingularFeature(
            kind=KIND_VERTEX_VERTEX,
            edges=tuple(sorted(pair_ids)),
            vertices=verts,
            location=loc,
        )
    va, vb = verts
    inc_a, inc_b = _incident_real(t, va), _incident_real(t, vb)
    edge_ids = tuple(sorted(e.id for e in inc_a + inc_b))
    extra = pair_ids - set(edge_ids)
    if extra or len(inc_a) != 2 or len(inc_b) != 2:
        return SingularFeature(
            kind=KIND_VERTEX_VERTEX,
            edges=tuple(sorted(set(edge_ids) | extra)),
            vertices=verts,
            location=loc,
        )
    a_dirs = [_away_direction(p, e, va) for e in inc_a]
    b_dirs = [_away_direction(p, e, vb) for e in inc_b]
    if _elbow_closed(t, p, va) or _elbow_closed(t, p, vb):
        return SingularFeature(
            kind=KIND_VERTEX_VERTEX,
            edges=edge_ids,
            vertices=verts,
            location=loc,
            elbow_closed=True,
        )
    normal = unit(vcross(b_dirs[0], b_dirs[1]))
    s1, s2 = vdot(a_dirs[0], normal), vdot(a_dirs[1], normal)
    opposite = abs(s1) > PARALLEL_EPS and abs(s2) > PARALLEL_EPS and s1 * s2 < 0
    return SingularFeature(
        kind=KIND_VERTEX_VERTEX,
        edges=edge_ids,
        vertices=verts,
        location=loc,
        elbow_closed=False,
        opposite_sides=opposite,
    )


def _edge_vertex_feature(
    t: LinkageType,
    p: Placement,
    geoms: dict[str, GeomEdge],
    verts: tuple[str, ...],
    pair_ids: set[str],
    loc: Vec3,
    tol: float,
) -> SingularFeature:
    if len(verts) != 1:
        return SingularFeature(
            kind=KIND_EDGE_VERTEX,
            edges=tuple(sorted(pair_ids)),
            vertices=verts,
            location=loc,
        )
    v = verts[0]
    inc = _incident_real(t, v)
    inc_ids = {e.id for e in inc}
    passers = []
    for eid in sorted(geoms):
        if eid in inc_ids:
            continue
        d, t_foot = _point_edge_distance(geoms[eid], p.pos(v))
        if d <= tol and geoms[eid].param_interior(t_foot):
            passers.append(eid)
    edge_ids = tuple(sorted(set(passers) | inc_ids))
    if len(passers) != 1 or len(inc) != 2:
        return SingularFeature(
            kind=KIND_EDGE_VERTEX, edges=edge_ids, vertices=(v,), location=loc
        )
    d1 = _away_direction(p, inc[0], v)
    d2 = _away_direction(p, inc[1], v)
    if vnorm(vcross(d1, d2)) <= PARALLEL_EPS:
        if vdot(d1, d2) > 0:
            return SingularFeature(
                kind=KIND_EDGE_VERTEX,
                edges=edge_ids,
                vertices=(v,),
                location=loc,
                coplanar=True,
                elbow_closed=True,
            )
        # A straightened elbow is a chain at maximal extension, which
        # constrains the passer: a combination, not a plain elbow pass.
        return SingularFeature(
            kind=KIND_COMBINATION, edges=edge_ids, vertices=(v,), location=loc
        )
    u1 = geoms[passers[0]].direction
    m1 = vsub(d1, vscale(vdot(u1, d1), u1))
    m2 = vsub(d2, vscale(vdot(u1, d2), u1))
    if vnorm(m1) <= PARALLEL_EPS or vnorm(m2) <= PARALLEL_EPS:
        # An elbow edge along the passer's carrier is an overlap situation,
        # not a transversal pass; leave it uncatalogued here.
        return SingularFeature(
            kind=KIND_EDGE_VERTEX, edges=edge_ids, vertices=(v,), location=loc
        )
    coplanar = abs(vdot(u1, vcross(d1, d2))) <= PARALLEL_EPS
    outside = vdot(unit(m1), unit(m2)) > 0 if coplanar else None
    return SingularFeature(
        kind=KIND_EDGE_VERTEX,
        edges=edge_ids,
        vertices=(v,),
        location=loc,
        coplanar=coplanar,
        outside=outside,
        elbow_closed=False,
    )


# ---------------------------------------------------------------------------
# Label classes: translation-sphere probe engine.
# ---------------------------------------------------------------------------


def _icosphere(subdivisions: int = 3) -> tuple[list[Vec3], list[tuple[int, int]]]:
    """Unit sphere sampling: subdivided icosahedron plus adjacency edges."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = [
        (-1.0, phi, 0.0), (1.0, phi, 0.0), (-1.0, -phi, 0.0), (1.0, -phi, 0.0),
        (0.0, -1.0, phi), (0.0, 1.0, phi), (0.0, -1.0, -phi), (0.0, 1.0, -phi),
        (phi, 0.0, -1.0), (phi, 0.0, 1.0), (-phi, 0.0, -1.0), (-phi, 0.0, 1.0),
    ]
    verts = [unit(v) for v in raw]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    for _ in range(subdivisions):
        midpoint: dict[tuple[int, int], int] = {}

        def mid(i: int, j: int) -> int:
            key = (min(i, j), max(i, j))
            if key not in midpoint:
                verts.append(unit(vscale(0.5, vadd(verts[i], verts[j]))))
                midpoint[key] = len(verts) - 1
            return midpoint[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    edge_set: set[tuple[int, int]] = set()
    for a, b, c in faces:
        edge_set.update(
            ((min(a, b), max(a, b)), (min(b, c), max(b, c)), (min(c, a), max(c, a)))
        )
    return verts, sorted(edge_set)


class _DSU:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        self.parent[self.find(i)] = self.find(j)


def _mini_linkage(t: LinkageType, edge_ids: tuple[str, ...]) -> LinkageType:
    """The sub-linkage spanned by the given edges."""
    picked = tuple(t.edge(eid) for eid in edge_ids)
    used = tuple(v for v in t.vertices if any(v in e.ends for e in picked))
    return LinkageType(vertices=used, edges=picked)


def _mini_pairs(t: LinkageType) -> list[tuple[str, str]]:
    ids = sorted(e.id for e in t.edges)
    return [
        (a, b)
        for i, a in enumerate(ids)
        for b in ids[i + 1 :]
        if not t.adjacent(a, b)
    ]


def _local_scale(t: LinkageType, p: Placement, feature: SingularFeature) -> float:
    spans = []
    for eid in feature.edges:
        g = edge_geometry(t, p, eid)
        spans.append(g.length if g.length is not None else 1.0)
    return min(spans) if spans else 1.0


def _det3(a: Vec3, b: Vec3, c: Vec3) -> float:
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def _segment_pair_blocked(
    a_start: tuple[Vec3, Vec3],
    a_end: tuple[Vec3, Vec3],
    b_start: tuple[Vec3, Vec3],
    b_end: tuple[Vec3, Vec3],
    scale: float,
) -> bool:
    """True when two segments moving linearly between the given endpoint
    snapshots touch at some moment.

    All four endpoints move linearly in time, so the coplanarity determinant
    of the two segments is a cubic in time; its real roots are the only
    instants a crossing can occur, and each root is verified with an actual
    distance computation.
    """
    threshold = 1e-7 * max(scale, 1e-9)

    def at(tv: float) -> tuple[Vec3, Vec3, Vec3, Vec3]:
        pa = vadd(vscale(1 - tv, a_start[0]), vscale(tv, a_end[0]))
        pb = vadd(vscale(1 - tv, a_start[1]), vscale(tv, a_end[1]))
        qa = vadd(vscale(1 - tv, b_start[0]), vscale(tv, b_end[0]))
        qb = vadd(vscale(1 - tv, b_start[1]), vscale(tv, b_end[1]))
        return pa, pb, qa, qb

    def touch_at(tv: float) -> bool:
        pa, pb, qa, qb = at(tv)
        if vdist(pa, pb) < threshold or vdist(qa, qb) < threshold:
            return True
        cp = closest_points(segment(pa, pb), segment(qa, qb))
        return cp.distance <= threshold

    def cols(tv: float) -> tuple[Vec3, Vec3, Vec3]:
        pa, pb, qa, qb = at(tv)
        return vsub(pb, pa), vsub(qa, pa), vsub(qb, pa)

    base = cols(0.0)
    tip = cols(1.0)
    delta = tuple(vsub(tip[k], base[k]) for k in range(3))
    coeff = [0.0, 0.0, 0.0, 0.0]
    for ia in (0, 1):
        for ib in (0, 1):
            for ic in (0, 1):
                coeff[ia + ib + ic] += _det3(
                    delta[0] if ia else base[0],
                    delta[1] if ib else base[1],
                    delta[2] if ic else base[2],
                )

    magnitude = max(abs(c) for c in coeff)
    if magnitude <= 1e-13 * max(scale, 1e-9) ** 3:
        # Near-coplanar throughout the motion; fall back to dense checks.
        return any(touch_at(k / 16.0) for k in range(17))
    poly = [coeff[3], coeff[2], coeff[1], coeff[0]]
    while poly and abs(poly[0]) <= 1e-14 * magnitude:
        poly.pop(0)
    if len(poly) <= 1:
        return False
    roots = [
        float(r.real)
        for r in np.roots(poly)
        if abs(r.imag) < 1e-8 and -1e-9 <= r.real <= 1 + 1e-9
    ]
    return any(touch_at(min(max(r, 0.0), 1.0)) for r in roots)


def _moved_vertices(t: LinkageType, feature: SingularFeature) -> tuple[str, ...]:
    """Which vertices the probe engine translates, per feature kind."""
    if feature.kind == KIND_PAIRWISE:
        return t.edge(feature.edges[1]).ends
    if feature.kind == KIND_EDGE_VERTEX:
        inc = {e.id for e in _incident_real(t, feature.vertices[0])}
        passer = next(eid for eid in feature.edges if eid not in inc)
        return t.edge(passer).ends
    if feature.kind == KIND_VERTEX_VERTEX:
        v = feature.vertices[0]
        out = {v}
        for e in _incident_real(t, v):
            out.update(e.ends)
        return tuple(sorted(out))
    raise ValueError(f"no probe family for feature kind {feature.kind!r}")


def _probe_engine(
    t: LinkageType,
    p: Placement,
    feature: SingularFeature,
    moved: tuple[str, ...],
    tol: float,
) -> list[list[LabelVector]]:
    """Connected approach classes from a sphere of translations.

    The given vertices (plus any co-ends on the same edges) are displaced by
    a small radius times each direction of a subdivided icosahedron.
    Embedded samples are joined when the straight interpolation between them
    crosses nothing; each component contributes one class listing the label
    vectors it attains.  Unbounded edges are clipped to a window around the
    contact, which is sound because crossings during these epsilon-size
    motions can only happen near the feature.
    """
    mini = _mini_linkage(t, feature.edges)
    scale = _local_scale(t, p, feature)
    eps = max(0.02 * scale, 1e3 * tol)
    window = 4.0 * scale + 10.0 * eps

    moved_set: set[str] = set()
    for e in mini.edges:
        if set(e.ends) & set(moved):
            moved_set.update(e.ends)

    base_ends: dict[str, tuple[Vec3, Vec3]] = {}
    moving: dict[str, bool] = {}
    for e in mini.edges:
        g = edge_geometry(mini, p, e.id)
        t_loc = vdot(vsub(feature.location, g.anchor), g.direction)
        lo, hi = g.param_range()
        lo = max(lo, t_loc - window)
        hi = min(hi, t_loc + window)
        base_ends[e.id] = (g.point_at(lo), g.point_at(hi))
        moving[e.id] = bool(set(e.ends) & moved_set)

    verts, adjacency = _icosphere(3)
    pairs = _mini_pairs(mini)

    samples: list[Placement | None] = []
    labels: list[LabelVector | None] = []
    offsets: list[Vec3] = []
    for d in verts:
        off = vscale(eps, d)
        offsets.append(off)
        q = Placement(
            {
                v: vadd(p.pos(v), off) if v in moved_set else p.pos(v)
                for v in mini.vertices
            }
        )
        if is_embedding(mini, q, tol):
            samples.append(q)
            labels.append(label_vector(mini, q, tol))
        else:
            samples.append(None)
            labels.append(None)

    def ends_at(eid: str, idx: int) -> tuple[Vec3, Vec3]:
        lo_pt, hi_pt = base_ends[eid]
        if moving[eid]:
            return vadd(lo_pt, offsets[idx]), vadd(hi_pt, offsets[idx])
        return lo_pt, hi_pt

    dsu = _DSU(len(verts))
    for i, j in adjacency:
        if samples[i] is None or samples[j] is None:
            continue
        blocked = False
        for a, b in pairs:
            if not moving[a] and not moving[b]:
                continue
            if _segment_pair_blocked(
                ends_at(a, i), ends_at(a, j), ends_at(b, i), ends_at(b, j), scale
            ):
                blocked = True
                break
        if not blocked:
            dsu.union(i, j)

    by_root: dict[int, dict[tuple, LabelVector]] = {}
    for idx, lv in enumerate(labels):
        if lv is None:
            continue
        by_root.setdefault(dsu.find(idx), {})[lv.as_tuple()] = lv
    classes = [list(group.values()) for group in by_root.values()]
    classes.sort(key=lambda grp: sorted(lv.as_tuple() for lv in grp))
    return classes


def _coplanar_probes(
    t: LinkageType, p: Placement, feature: SingularFeature, tol: float
) -> list[list[LabelVector]]:
    """Classes for the flat elbow with both edges on one side of the passer.

    Straight translations cannot reach the two pinched wedge sheets, so
    those are produced by explicit probes: shift the passer slightly toward
    the elbow's opening and tilt it out of the plane, one tilt sign per
    wedge.  The third class is represented by the clean pull-away placement.
    """
    mini = _mini_linkage(t, feature.edges)
    v = feature.vertices[0]
    inc = _incident_real(t, v)
    passer_id = next(eid for eid in feature.edges if eid not in {e.id for e in inc})
    scale = _local_scale(t, p, feature)
    eps = max(0.02 * scale, 1e3 * tol)

    g = edge_geometry(t, p, passer_id)
    u1 = g.direction
    d1 = _away_direction(p, inc[0], v)
    d2 = _away_direction(p, inc[1], v)
    m_hat = unit(
        vadd(
            unit(vsub(d1, vscale(vdot(u1, d1), u1))),
            unit(vsub(d2, vscale(vdot(u1, d2), u1))),
        )
    )
    pivot = vadd(p.pos(v), vscale(eps, m_hat))
    moved = set(t.edge(passer_id).ends)

    def tilted(theta: float) -> Placement:
        c, s = math.cos(theta), math.sin(theta)

        def rotate(q: Vec3) -> Vec3:
            rel = vsub(q, pivot)
            par = vscale(vdot(rel, m_hat), m_hat)
            perp = vsub(rel, par)
            orth = vcross(m_hat, perp)
            return vadd(pivot, vadd(par, vadd(vscale(c, perp), vscale(s, orth))))

        return Placement(
            {
                w: rotate(vadd(p.pos(w), vscale(eps, m_hat)))
                if w in moved
                else p.pos(w)
                for w in mini.vertices
            }
        )

    away = Placement(
        {
            w: vadd(p.pos(w), vscale(-eps, m_hat)) if w in moved else p.pos(w)
            for w in mini.vertices
        }
    )
    classes = []
    for probe in (tilted(0.15), tilted(-0.15), away):
        if not is_embedding(mini, probe, tol):
            raise ValueError("coplanar elbow probe failed to separate")
        classes.append([label_vector(mini, probe, tol)])
    classes.sort(key=lambda grp: sorted(lv.as_tuple() for lv in grp))
    return classes


def feature_label_classes(
    l: Linkage, p: Placement, feature: SingularFeature, tol: float = DEFAULT_TOL
) -> list[list[LabelVector]] | None:
    """Representative label classes for one catalogued feature.

    Each class is a list of label vectors over the feature's own edge
    pairs.  Returns None when no probe family applies (coinciding edges,
    closed elbows, and the flat elbow whose edges straddle the passer).
    """
    if _feature_preimages(feature) is None:
        raise ValueError("uncatalogued singularity")
    if feature.kind == KIND_COINCIDING:
        return None
    if feature.kind == KIND_EDGE_VERTEX:
        if feature.elbow_closed:
            return None
        if feature.coplanar:
            if not feature.outside:
                return None
            return _coplanar_probes(l.type, p, feature, tol)
    if feature.kind == KIND_VERTEX_VERTEX and feature.elbow_closed:
        return None
    moved = _moved_vertices(l.type, feature)
    return _probe_engine(l.type, p, feature, moved, tol)
