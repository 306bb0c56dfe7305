"""Robust 3D primitives for generalized edges (segments, half-lines, lines).

Provides exact-sign orientation tests, closest-point pairs between possibly
unbounded edges, and the sign-valued linking number of an ordered edge pair.
All coordinates are plain floats; the orientation predicate falls back to
exact rational arithmetic when the floating-point filter cannot certify a
sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

Vec3 = tuple[float, float, float]

# Tolerance for distance/coplanarity predicates (configurable per call).
DEFAULT_TOL = 1e-9
# Relative fuzz deciding whether a closest-point parameter is "interior".
INTERIOR_FUZZ = 1e-12
# Carriers with |u1 x u2| below this are treated as parallel.
_PARALLEL_EPS = 1e-12
# Error-bound coefficient for the floating-point orientation filter.
_ORIENT_FILTER = 8.0 * 2.0 ** -52

SEGMENT = "segment"
HALF_LINE = "half-line"
LINE = "line"
EDGE_KINDS = (SEGMENT, HALF_LINE, LINE)


def vadd(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vsub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vscale(t: float, a: Vec3) -> Vec3:
    return (t * a[0], t * a[1], t * a[2])


def vdot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def vcross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def vnorm(a: Vec3) -> float:
    return math.sqrt(vdot(a, a))


def vdist(a: Vec3, b: Vec3) -> float:
    return vnorm(vsub(a, b))


def unit(v: Vec3) -> Vec3:
    """Normalize v to unit length; raises ValueError on a zero vector."""
    n = vnorm(v)
    if n == 0.0:
        raise ValueError("zero direction vector")
    return (v[0] / n, v[1] / n, v[2] / n)


def orientation_sign(p: Vec3, q: Vec3, r: Vec3, s: Vec3) -> int:
    """Sign of det[q-p, r-p, s-p] in {-1, 0, +1}.

    A floating-point evaluation with an a-priori error bound decides most
    inputs; otherwise the determinant is recomputed in exact rational
    arithmetic (floats embed exactly into Fraction), so the sign is always
    correct and 0 is returned only for exactly coplanar points.
    """
    ax, ay, az = q[0] - p[0], q[1] - p[1], q[2] - p[2]
    bx, by, bz = r[0] - p[0], r[1] - p[1], r[2] - p[2]
    cx, cy, cz = s[0] - p[0], s[1] - p[1], s[2] - p[2]

    det = (
        ax * (by * cz - bz * cy)
        - ay * (bx * cz - bz * cx)
        + az * (bx * cy - by * cx)
    )
    permanent = (
        abs(ax) * (abs(by * cz) + abs(bz * cy))
        + abs(ay) * (abs(bx * cz) + abs(bz * cx))
        + abs(az) * (abs(bx * cy) + abs(by * cx))
    )
    if abs(det) > _ORIENT_FILTER * permanent:
        return 1 if det > 0.0 else -1

    fa = [Fraction(q[i]) - Fraction(p[i]) for i in range(3)]
    fb = [Fraction(r[i]) - Fraction(p[i]) for i in range(3)]
    fc = [Fraction(s[i]) - Fraction(p[i]) for i in range(3)]
    exact = (
        fa[0] * (fb[1] * fc[2] - fb[2] * fc[1])
        - fa[1] * (fb[0] * fc[2] - fb[2] * fc[0])
        + fa[2] * (fb[0] * fc[1] - fb[1] * fc[0])
    )
    if exact > 0:
        return 1
    if exact < 0:
        return -1
    return 0


@dataclass(frozen=True)
class GeomEdge:
    """A segment, half-line, or full line with an orientation.

    The edge is parameterized by arc length t along `direction` from
    `anchor`: segments live on [0, length], half-lines on [0, inf), lines
    on (-inf, inf).
    """

    kind: str
    anchor: Vec3
    direction: Vec3
    length: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in EDGE_KINDS:
            raise ValueError(f"unknown edge kind: {self.kind!r}")
        if abs(vnorm(self.direction) - 1.0) > 1e-12:
            raise ValueError("direction must be unit length")
        if self.kind == SEGMENT:
            if self.length is None or self.length <= 0.0:
                raise ValueError("segment needs positive length")
        elif self.length is not None:
            raise ValueError(f"{self.kind} edges carry no length")

    def param_range(self) -> tuple[float, float]:
        if self.kind == SEGMENT:
            return 0.0, float(self.length)
        if self.kind == HALF_LINE:
            return 0.0, math.inf
        return -math.inf, math.inf

    def point_at(self, t: float) -> Vec3:
        return vadd(self.anchor, vscale(t, self.direction))

    def param_interior(self, t: float) -> bool:
        lo, hi = self.param_range()
        if self.kind == LINE:
            return True
        fuzz = INTERIOR_FUZZ * max(1.0, abs(t), hi if math.isfinite(hi) else 1.0)
        if t <= lo + fuzz:
            return False
        if math.isfinite(hi) and t >= hi - fuzz:
            return False
        return True


def segment(p: Vec3, q: Vec3) -> GeomEdge:
    """Segment edge from p to q, oriented p -> q."""
    d = vsub(q, p)
    n = vnorm(d)
    if n == 0.0:
        raise ValueError("segment endpoints coincide")
    return GeomEdge(SEGMENT, p, unit(d), n)


def half_line(p: Vec3, direction: Vec3) -> GeomEdge:
    """Half-line from p in the given direction."""
    return GeomEdge(HALF_LINE, p, unit(direction))


def line(p: Vec3, direction: Vec3) -> GeomEdge:
    """Full oriented line through p."""
    return GeomEdge(LINE, p, unit(direction))


@dataclass(frozen=True)
class ClosestPair:
    """Closest points between two edges and derived predicates.

    `w` is b - a, the connector from the first edge's closest point to the
    second's; `t1`, `t2` are the corresponding arc-length parameters.
    """

    a: Vec3
    b: Vec3
    w: Vec3
    t1: float
    t2: float
    a_interior: bool
    b_interior: bool
    coplanar: bool

    @property
    def distance(self) -> float:
        return vnorm(self.w)


def _clamp(t: float, lo: float, hi: float) -> float:
    return min(max(t, lo), hi)


def closest_points(e1: GeomEdge, e2: GeomEdge, tol: float = DEFAULT_TOL) -> ClosestPair:
    """Global minimizer of distance between two (possibly unbounded) edges.

    The squared distance is a convex quadratic in the two parameters, so the
    minimum over the parameter box is attained either at the unconstrained
    stationary point or on a face; all such candidates are enumerated.  When
    several minimizers exist (parallel carriers) the pair with the smallest
    parameter on e1, then on e2, is returned.
    """
    u1, u2 = e1.direction, e2.direction
    r = vsub(e1.anchor, e2.anchor)
    b = vdot(u1, u2)
    d = vdot(u1, r)
    e = vdot(u2, r)
    lo1, hi1 = e1.param_range()
    lo2, hi2 = e2.param_range()
    denom = 1.0 - b * b

    def f(s: float, t: float) -> float:
        return vdot(r, r) + s * s + t * t - 2.0 * s * t * b + 2.0 * (s * d - t * e)

    candidates: list[tuple[float, float]] = []
    if denom > _PARALLEL_EPS:
        s0 = (b * e - d) / denom
        t0 = b * s0 + e
        candidates.append((_clamp(s0, lo1, hi1), _clamp(t0, lo2, hi2)))
    for sb in (lo1, hi1):
        if math.isfinite(sb):
            candidates.append((sb, _clamp(b * sb + e, lo2, hi2)))
    for tb in (lo2, hi2):
        if math.isfinite(tb):
            candidates.append((_clamp(b * tb - d, lo1, hi1), tb))
    if not candidates:
        # Two full parallel lines: anchor the tie-break at e2's anchor.
        s = _clamp(-d, lo1, hi1)
        candidates.append((s, _clamp(b * s + e, lo2, hi2)))

    fmin = min(f(s, t) for s, t in candidates)
    scale = max(1.0, abs(fmin))
    tied = [(s, t) for s, t in candidates if f(s, t) <= fmin + 1e-12 * scale]
    t1, t2 = min(tied)

    pa = e1.point_at(t1)
    pb = e2.point_at(t2)
    w = vsub(pb, pa)

    parallel = abs(denom) <= _PARALLEL_EPS
    vol = vdot(vcross(u1, u2), vsub(e2.anchor, e1.anchor))
    cop_scale = max(1.0, vnorm(vsub(e2.anchor, e1.anchor)))
    coplanar = parallel or abs(vol) <= tol * cop_scale

    return ClosestPair(
        a=pa,
        b=pb,
        w=w,
        t1=t1,
        t2=t2,
        a_interior=e1.param_interior(t1),
        b_interior=e2.param_interior(t2),
        coplanar=coplanar,
    )


def linking_number(e1: GeomEdge, e2: GeomEdge, tol: float = DEFAULT_TOL) -> int:
    """Sign in {-1, 0, +1} of the linking form for an ordered edge pair.

    Returns sgn(w . (u1 x u2)) when the closest points are interior to both
    edges, the edges are disjoint, and the carriers are not coplanar; in
    every other situation (parallel, coplanar, endpoint-nearest, touching)
    the value is 0.
    """
    cp = closest_points(e1, e2, tol=tol)
    if cp.coplanar:
        return 0
    if not (cp.a_interior and cp.b_interior):
        return 0
    scale = max(1.0, vnorm(cp.a), vnorm(cp.b))
    if cp.distance <= tol * scale:
        return 0
    return orientation_sign(
        cp.a,
        vadd(cp.a, e1.direction),
        vadd(cp.a, e2.direction),
        cp.b,
    )
