"""Paths in placement space and virtual (limit) configurations.

Placements of a linkage form a subset of (R^3)^V.  This module works with
piecewise-linear paths in that ambient space: measuring their length,
checking that they stay embedded, estimating the capped path metric from
above with a seeded planner, and turning a path that ends at a touching
placement into a virtual configuration carrying the crossing labels its
tail attains.  Whether two virtual configurations over the same limit are
the same completed-space point is decided through the singularity
catalogue.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .geom import DEFAULT_TOL, Vec3, closest_points, vadd, vdist
from .model import (
    LabelVector,
    Linkage,
    Placement,
    edge_geometry,
    edge_pairs,
    is_embedding,
    is_immersed_configuration,
    label_vector,
)
from .singular import (
    KIND_COINCIDING,
    _segment_pair_blocked,
    classify_singularity,
    feature_label_classes,
)

DEFAULT_SAMPLES_PER_HOP = 64

# Limits of two virtual configurations must agree this closely before the
# identification rule applies.
LIMIT_MATCH_TOL = 1e-6


@dataclass(frozen=True)
class PLPath:
    """A piecewise-linear path through placements, as straight hops.

    All waypoints must place the same vertex ids.  Repeated consecutive
    waypoints are allowed (a constant path is a valid, zero-length path).
    """

    waypoints: tuple[Placement, ...]

    def __post_init__(self) -> None:
        if len(self.waypoints) < 2:
            raise ValueError("a path needs at least two waypoints")
        ids = set(self.waypoints[0].positions)
        for w in self.waypoints[1:]:
            if set(w.positions) != ids:
                raise ValueError("waypoints place different vertex sets")

    def reversed(self) -> "PLPath":
        return PLPath(tuple(reversed(self.waypoints)))


@dataclass
class VirtualConfiguration:
    """A touching limit placement plus the labels its approaches attain."""

    limit: Placement
    labels: set[LabelVector]
    witness: PLPath | None = None


def placement_distance(p: Placement, q: Placement) -> float:
    """Euclidean distance between placements in (R^3)^V."""
    if set(p.positions) != set(q.positions):
        raise ValueError("placements cover different vertex sets")
    return math.sqrt(sum(vdist(p.pos(v), q.pos(v)) ** 2 for v in p.positions))


def path_length(path: PLPath) -> float:
    """Total length of the path in (R^3)^V."""
    return sum(
        placement_distance(a, b)
        for a, b in zip(path.waypoints, path.waypoints[1:])
    )


def _lerp_placement(p: Placement, q: Placement, alpha: float) -> Placement:
    return Placement(
        {
            v: tuple(
                (1.0 - alpha) * a + alpha * b
                for a, b in zip(p.pos(v), q.pos(v))
            )
            for v in p.positions
        }
    )


def _clip_endpoints(g, window: float) -> tuple[Vec3, Vec3]:
    lo, hi = g.param_range()
    lo = max(lo, -window)
    hi = min(hi, window)
    return g.point_at(lo), g.point_at(hi)


def is_valid_path(
    l: Linkage,
    path: PLPath,
    samples_per_hop: int = DEFAULT_SAMPLES_PER_HOP,
    allow_immersed_endpoint: bool = False,
    tol: float = DEFAULT_TOL,
) -> bool:
    """Whether the path stays embedded.

    Each hop is sampled uniformly, endpoints included.  Every sample must
    be an immersed configuration and an embedding; when
    allow_immersed_endpoint is true the path's two end waypoints are
    exempt from the embedding requirement (they still must satisfy the
    lengths), so paths may start or finish at a touching placement.

    Straight hops between two exact configurations bow inward: when the
    endpoints differ by a rotation, interpolated bar lengths shrink by
    roughly D^2 / (2 L) for hop displacement D.  Sampled immersion is
    therefore checked against the base tolerance plus twice that per-hop
    allowance, which vanishes under refinement; subdividing a path only
    makes the check stricter.  Embedding is always checked at the base
    tolerance.

    Between consecutive samples, non-adjacent edge pairs are additionally
    checked for crossings of the linearly interpolated geometry, so a
    transverse pass-through cannot slip between sample points.  The
    continuous check clips unbounded edges to a window around the scene
    and runs only when a pair gets within reach of one interpolation
    step, which keeps it cheap away from contact.
    """
    if samples_per_hop < 2:
        raise ValueError("samples_per_hop must be at least 2")
    t = l.type
    pairs = [(a, b) for a, b in edge_pairs(t) if a < b]
    scale = min(l.lengths.values(), default=1.0)
    extent = max(
        (abs(c) for w in path.waypoints for v in w.positions for c in w.pos(v)),
        default=1.0,
    )
    window = 4.0 * extent + 10.0

    last_hop = len(path.waypoints) - 2
    for h in range(len(path.waypoints) - 1):
        a, b = path.waypoints[h], path.waypoints[h + 1]
        hop_disp = max(
            vdist(a.pos(v), b.pos(v)) for v in a.positions
        )
        length_tol = max(tol, DEFAULT_TOL) + hop_disp**2 / scale
        samples = [
            _lerp_placement(a, b, k / (samples_per_hop - 1))
            for k in range(samples_per_hop)
        ]
        for k, q in enumerate(samples):
            if h > 0 and k == 0:
                continue
            if not is_immersed_configuration(l, q, length_tol):
                return False
            at_start = h == 0 and k == 0
            at_end = h == last_hop and k == samples_per_hop - 1
            if allow_immersed_endpoint and (at_start or at_end):
                continue
            if not is_embedding(t, q, tol):
                return False
        if not pairs:
            continue
        geoms = [
            {e.id: edge_geometry(t, q, e.id) for e in t.edges} for q in samples
        ]
        for k in range(samples_per_hop - 1):
            step = max(
                vdist(samples[k].pos(v), samples[k + 1].pos(v))
                for v in samples[k].positions
            )
            for ea, eb in pairs:
                gap = closest_points(geoms[k][ea], geoms[k][eb]).distance
                if gap > 2.0 * step + tol:
                    continue
                exempt = allow_immersed_endpoint and (
                    (h == 0 and k == 0)
                    or (h == last_hop and k == samples_per_hop - 2)
                )
                if exempt:
                    continue
                if _segment_pair_blocked(
                    _clip_endpoints(geoms[k][ea], window),
                    _clip_endpoints(geoms[k + 1][ea], window),
                    _clip_endpoints(geoms[k][eb], window),
                    _clip_endpoints(geoms[k + 1][eb], window),
                    scale,
                ):
                    return False
    return True


# ---------------------------------------------------------------------------
# Path-metric upper bound.
# ---------------------------------------------------------------------------


def _components(l: Linkage) -> list[tuple[str, ...]]:
    """Connected components of the vertex set under edge incidence."""
    t = l.type
    parent = {v: v for v in t.vertices}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in t.edges:
        ends = list(e.ends)
        for other in ends[1:]:
            parent[find(ends[0])] = find(other)
    groups: dict[str, list[str]] = {}
    for v in t.vertices:
        groups.setdefault(find(v), []).append(v)
    return [tuple(sorted(g)) for g in groups.values()]


def plan_path(
    l: Linkage,
    start: Placement,
    goal: Placement,
    budget: int = 32,
    seed: int = 0,
    samples_per_hop: int = DEFAULT_SAMPLES_PER_HOP,
    tol: float = DEFAULT_TOL,
) -> tuple[float, PLPath | None]:
    """Best valid path found within the budget, with its capped length.

    Tries the straight hop first, then seeded random detours built by
    interpolating the endpoints and displacing each connected component of
    the linkage by a random offset at the intermediate waypoints.
    Component-wise translations keep the bar lengths exact, so candidates
    fail only on genuine crossings.  Each budget iteration draws from its
    own derived seed, which makes results deterministic for a fixed seed
    and monotone in the budget.

    Returns (min(best length, 1), best path) with best path None when no
    valid path was found; the capped value is then 1.
    """
    t = l.type
    for name, q in (("start", start), ("goal", goal)):
        if not is_immersed_configuration(l, q, max(tol, DEFAULT_TOL)):
            raise ValueError(f"{name} placement is not a configuration")
        if not is_embedding(t, q, tol):
            raise ValueError(f"{name} placement is not embedded")

    dist = placement_distance(start, goal)
    if dist == 0.0:
        return 0.0, PLPath((start, goal))

    straight = PLPath((start, goal))
    if is_valid_path(l, straight, samples_per_hop, False, tol):
        return min(dist, 1.0), straight

    comps = _components(l)
    best_len = math.inf
    best_path: PLPath | None = None
    for i in range(budget):
        rng = random.Random(seed * 1_000_003 + i)
        n_mid = 1 + (i % 2)
        waypoints = [start]
        for k in range(n_mid):
            alpha = (k + 1) / (n_mid + 1)
            base = {
                v: _lerp_placement(start, goal, alpha).pos(v)
                for v in start.positions
            }
            sigma = dist * (0.25 + 1.75 * rng.random())
            for comp in comps:
                off = (
                    rng.gauss(0.0, sigma),
                    rng.gauss(0.0, sigma),
                    rng.gauss(0.0, sigma),
                )
                for v in comp:
                    base[v] = vadd(base[v], off)
            waypoints.append(Placement(base))
        waypoints.append(goal)
        cand = PLPath(tuple(waypoints))
        length = path_length(cand)
        if length >= best_len:
            continue
        if is_valid_path(l, cand, samples_per_hop, False, tol):
            best_len = length
            best_path = cand
    return min(best_len, 1.0), best_path


def path_metric_upper_bound(
    l: Linkage,
    start: Placement,
    goal: Placement,
    budget: int = 32,
    seed: int = 0,
    samples_per_hop: int = DEFAULT_SAMPLES_PER_HOP,
    tol: float = DEFAULT_TOL,
) -> float:
    """Upper bound in [0, 1] for the capped path distance.

    Never below the Euclidean distance (capped at 1); 0 exactly when the
    placements coincide; deterministic for a fixed seed; larger budgets
    can only improve the bound.
    """
    bound, _ = plan_path(l, start, goal, budget, seed, samples_per_hop, tol)
    return bound


# ---------------------------------------------------------------------------
# Virtual configurations from approach paths.
# ---------------------------------------------------------------------------


def virtual_config_from_path(
    l: Linkage,
    path: PLPath,
    tail_samples: int = 8,
    tol: float = DEFAULT_TOL,
) -> VirtualConfiguration:
    """Virtual configuration representing the end of an approach path.

    The last waypoint must be a touching (immersed, not embedded)
    placement and everything before it embedded.  The labels are the label
    vectors attained at dyadic samples 1 - 2^-j on the final hop, which
    hug the limit; they form the approach's label class data.
    """
    if tail_samples < 1:
        raise ValueError("tail_samples must be at least 1")
    t = l.type
    ways = path.waypoints
    for w in ways:
        if not is_immersed_configuration(l, w, max(tol, DEFAULT_TOL)):
            raise ValueError("invalid approach path")
    limit = ways[-1]
    if is_embedding(t, limit, tol):
        raise ValueError("invalid approach path")
    for w in ways[:-1]:
        if not is_embedding(t, w, tol):
            raise ValueError("invalid approach path")
    if not is_valid_path(
        l, path, DEFAULT_SAMPLES_PER_HOP, allow_immersed_endpoint=True, tol=tol
    ):
        raise ValueError("invalid approach path")

    labels: set[LabelVector] = set()
    a, b = ways[-2], ways[-1]
    for j in range(1, tail_samples + 1):
        alpha = 1.0 - 0.5**j
        q = _lerp_placement(a, b, alpha)
        if not is_embedding(t, q, tol):
            raise ValueError("invalid approach path")
        labels.add(label_vector(t, q, tol))
    return VirtualConfiguration(limit=limit, labels=labels, witness=path)


def _restrict_labels(lv: LabelVector, edge_ids: frozenset[str]) -> tuple:
    items = [
        (a, b, v)
        for (a, b), v in lv.labels.items()
        if a in edge_ids and b in edge_ids
    ]
    return tuple(sorted(items))


def _feature_class_index(
    classes: list[list[LabelVector]],
    attained: set[tuple],
) -> int:
    """Which class the attained (restricted) label set belongs to.

    Exact match wins, then unique containment, then the unique class with
    several members (the merged sheet, which probe sampling may not have
    exhausted).
    """
    sets = [{lv.as_tuple() for lv in cls} for cls in classes]
    exact = [i for i, s in enumerate(sets) if attained == s]
    if len(exact) == 1:
        return exact[0]
    subset = [i for i, s in enumerate(sets) if attained <= s]
    if len(subset) == 1:
        return subset[0]
    merged = [i for i, s in enumerate(sets) if len(s) > 1]
    if len(merged) == 1:
        return merged[0]
    raise ValueError("approach labels match no catalogued class")


def labels_identified(
    l: Linkage,
    v1: VirtualConfiguration,
    v2: VirtualConfiguration,
    tol: float = DEFAULT_TOL,
) -> bool:
    """Whether two approaches to one limit are the same completed point.

    The limit's classification must be catalogued; each contact feature
    then declares which label classes merge.  Raises for uncatalogued
    types and for limits that do not agree.
    """
    ids1, ids2 = set(v1.limit.positions), set(v2.limit.positions)
    if ids1 != ids2 or any(
        vdist(v1.limit.pos(v), v2.limit.pos(v)) > LIMIT_MATCH_TOL for v in ids1
    ):
        raise ValueError("virtual configurations have different limits")
    if not v1.labels or not v2.labels:
        raise ValueError("virtual configuration carries no labels")

    report = classify_singularity(l, v1.limit, tol, with_label_classes=False)
    if not report.catalogued:
        raise ValueError("uncatalogued singularity")

    for feature in report.features:
        if feature.kind == KIND_COINCIDING:
            # Single sheet: every approach is identified.
            continue
        classes = feature_label_classes(l, v1.limit, feature, tol)
        if classes is None:
            raise ValueError(
                "label classes unavailable for this singularity type"
            )
        support = frozenset(feature.edges)
        s1 = {_restrict_labels(lv, support) for lv in v1.labels}
        s2 = {_restrict_labels(lv, support) for lv in v2.labels}
        if _feature_class_index(classes, s1) != _feature_class_index(classes, s2):
            return False

    supports = [frozenset(f.edges) for f in report.features]

    def clean(labels: set[LabelVector]) -> set[tuple]:
        # Pairs outside every single feature's support stay locally
        # constant near the limit, so approaches must agree there.
        return {
            tuple(
                sorted(
                    (a, b, val)
                    for (a, b), val in lv.labels.items()
                    if not any(a in s and b in s for s in supports)
                )
            )
            for lv in labels
        }

    return clean(v1.labels) == clean(v2.labels)
