"""Shared randomized constructions for the test-suite."""

from __future__ import annotations

import math
import random

from linkspace.geom import (
    GeomEdge,
    closest_points,
    segment,
    unit,
    vadd,
    vcross,
    vdot,
    vsub,
)

Mat3 = tuple[tuple[float, float, float], ...]


def rand_point(rng: random.Random, radius: float = 3.0):
    return (
        rng.uniform(-radius, radius),
        rng.uniform(-radius, radius),
        rng.uniform(-radius, radius),
    )


def random_segment(rng: random.Random, radius: float = 3.0) -> GeomEdge:
    while True:
        p = rand_point(rng, radius)
        q = rand_point(rng, radius)
        if math.dist(p, q) > 0.1:
            return segment(p, q)


def random_skew_pair(rng: random.Random) -> tuple[GeomEdge, GeomEdge]:
    """Two segments whose closest points are solidly interior and skew."""
    while True:
        e1 = random_segment(rng)
        e2 = random_segment(rng)
        cp = closest_points(e1, e2)
        if not (cp.a_interior and cp.b_interior):
            continue
        if cp.distance < 0.05:
            continue
        vol = vdot(vcross(e1.direction, e2.direction), vsub(e2.anchor, e1.anchor))
        if abs(vol) < 0.05:
            continue
        lo1, hi1 = e1.param_range()
        lo2, hi2 = e2.param_range()
        # Keep the minimizer away from the ends so rigid motions cannot
        # push it onto an endpoint.
        if min(cp.t1 - lo1, hi1 - cp.t1) < 0.05:
            continue
        if min(cp.t2 - lo2, hi2 - cp.t2) < 0.05:
            continue
        return e1, e2


def random_rotation(rng: random.Random) -> Mat3:
    """Uniform random rotation matrix from a normalized quaternion."""
    while True:
        q = [rng.gauss(0.0, 1.0) for _ in range(4)]
        n = math.sqrt(sum(x * x for x in q))
        if n > 1e-6:
            break
    w, x, y, z = (v / n for v in q)
    return (
        (1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)),
        (2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)),
        (2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)),
    )


def mat_apply(m: Mat3, v):
    return (
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    )


def transform_edge(
    edge: GeomEdge,
    rot: Mat3 | None = None,
    shift=(0.0, 0.0, 0.0),
    scale: float = 1.0,
    reflect: bool = False,
) -> GeomEdge:
    """Apply scale, then rotation/reflection, then translation."""

    def tp(p):
        p = (scale * p[0], scale * p[1], scale * p[2])
        if reflect:
            p = (-p[0], p[1], p[2])
        if rot is not None:
            p = mat_apply(rot, p)
        return vadd(p, shift)

    anchor = tp(edge.anchor)
    tip = tp(vadd(edge.anchor, edge.direction))
    direction = unit(vsub(tip, anchor))
    length = edge.length * scale if edge.length is not None else None
    return GeomEdge(edge.kind, anchor, direction, length)


def reverse_edge(edge: GeomEdge) -> GeomEdge:
    """Reverse a segment's orientation (same point set)."""
    if edge.kind != "segment":
        raise ValueError("only segments can be reversed here")
    far = edge.point_at(edge.length)
    return segment(far, edge.anchor)
