"""Tests for placement-space paths and virtual configurations."""

import math
import random

import pytest

from linkspace.geom import unit, vadd, vscale
from linkspace.model import Edge, Linkage, LinkageType, Placement, label_vector
from linkspace.virtual import (
    PLPath,
    VirtualConfiguration,
    is_valid_path,
    labels_identified,
    path_length,
    path_metric_upper_bound,
    placement_distance,
    plan_path,
    virtual_config_from_path,
)


def place(**kw):
    return Placement({k: tuple(float(x) for x in v) for k, v in kw.items()})


def two_bars(length=2.0):
    t = LinkageType(
        vertices=("a1", "a2", "b1", "b2"),
        edges=(
            Edge("ea", "segment", ("a1", "a2")),
            Edge("eb", "segment", ("b1", "b2")),
        ),
    )
    return Linkage(t, {"ea": length, "eb": length})


def bars_at(l, dz, dx=0.0, parallel=False):
    """ea along x at the origin, eb along y (or x) offset by (dx, 0, dz)."""
    h = l.lengths["ea"] / 2.0
    if parallel:
        b1, b2 = (dx - h, 0.0, dz), (dx + h, 0.0, dz)
    else:
        b1, b2 = (dx, -h, dz), (dx, h, dz)
    return place(a1=(-h, 0, 0), a2=(h, 0, 0), b1=b1, b2=b2)


def elbow_linkage(leg=2.0):
    t = LinkageType(
        vertices=("r1", "r2", "j", "c1", "c2"),
        edges=(
            Edge("rod", "segment", ("r1", "r2")),
            Edge("s1", "segment", ("j", "c1")),
            Edge("s2", "segment", ("j", "c2")),
        ),
    )
    return Linkage(t, {"rod": 4.0, "s1": leg, "s2": leg})


def elbow_placement(d1, d2, rod_offset=(0.0, 0.0, 0.0), leg=2.0):
    """Rod along x displaced by rod_offset; elbow joint at the origin."""
    return place(
        r1=vadd((-2, 0, 0), rod_offset),
        r2=vadd((2, 0, 0), rod_offset),
        j=(0, 0, 0),
        c1=vscale(leg, unit(d1)),
        c2=vscale(leg, unit(d2)),
    )


SKEW = ((0, 1, 1), (0, -1, 1))
FLAT = ((1, math.sqrt(3.0), 0), (-1, math.sqrt(3.0), 0))
NARROW = ((0, 0.3, 1), (0, -0.3, 1))


class TestPathBasics:
    def test_two_waypoints_required(self):
        with pytest.raises(ValueError, match="two waypoints"):
            PLPath((place(v=(0, 0, 0)),))

    def test_waypoints_must_share_vertices(self):
        with pytest.raises(ValueError, match="vertex sets"):
            PLPath((place(v=(0, 0, 0)), place(w=(0, 0, 0))))

    def test_single_hop_unit_move(self):
        path = PLPath((place(v=(0, 0, 0)), place(v=(1, 0, 0))))
        assert path_length(path) == pytest.approx(1.0)

    def test_unit_square_loop(self):
        corners = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0), (0, 0, 0)]
        path = PLPath(tuple(place(v=c) for c in corners))
        assert path_length(path) == pytest.approx(4.0)

    def test_subdivision_preserves_length(self):
        rng = random.Random(5)
        ways = [
            place(u=[rng.uniform(-1, 1) for _ in range(3)],
                  w=[rng.uniform(-1, 1) for _ in range(3)])
            for _ in range(3)
        ]
        path = PLPath(tuple(ways))
        fine = [ways[0]]
        for a, b in zip(ways, ways[1:]):
            mid = Placement(
                {
                    v: tuple((x + y) / 2.0 for x, y in zip(a.pos(v), b.pos(v)))
                    for v in a.positions
                }
            )
            fine.extend([mid, b])
        assert path_length(PLPath(tuple(fine))) == pytest.approx(
            path_length(path), abs=1e-12
        )

    def test_distance_needs_matching_vertices(self):
        with pytest.raises(ValueError, match="vertex sets"):
            placement_distance(place(v=(0, 0, 0)), place(w=(0, 0, 0)))


class TestPathValidity:
    def test_constant_embedded_path(self):
        l = two_bars()
        p = bars_at(l, dz=0.5)
        assert is_valid_path(l, PLPath((p, p)))

    def test_transverse_pass_through_rejected(self):
        l = two_bars()
        path = PLPath((bars_at(l, dz=0.3), bars_at(l, dz=-0.3)))
        assert not is_valid_path(l, path)

    def test_crossing_between_samples_still_caught(self):
        # The touching moment falls strictly between uniform samples.
        l = two_bars()
        path = PLPath((bars_at(l, dz=0.3), bars_at(l, dz=-0.2953)))
        assert not is_valid_path(l, path, samples_per_hop=64)

    def test_endpoint_exemption(self):
        l = two_bars()
        path = PLPath((bars_at(l, dz=0.3), bars_at(l, dz=0.0)))
        assert not is_valid_path(l, path)
        assert is_valid_path(l, path, allow_immersed_endpoint=True)

    def test_wrong_lengths_invalid(self):
        l = two_bars()
        squashed = place(
            a1=(-0.5, 0, 0), a2=(0.5, 0, 0), b1=(0, -1, 0.5), b2=(0, 1, 0.5)
        )
        assert not is_valid_path(l, PLPath((squashed, squashed)))

    def test_sample_count_validated(self):
        l = two_bars()
        p = bars_at(l, dz=0.5)
        with pytest.raises(ValueError, match="samples_per_hop"):
            is_valid_path(l, PLPath((p, p)), samples_per_hop=1)

    def test_rotation_hop_passes_with_allowance(self):
        # Endpoints differ by a small rigid rotation of one bar; the
        # interpolated bar shrinks quadratically, which validity must
        # tolerate at this hop size.
        l = two_bars()
        theta = 0.2
        c, s = math.cos(theta), math.sin(theta)
        p = bars_at(l, dz=0.5)
        q = place(
            a1=(-1, 0, 0),
            a2=(1, 0, 0),
            b1=(-s, -c, 0.5),
            b2=(s, c, 0.5),
        )
        assert is_valid_path(l, PLPath((p, q)))


class TestPathMetric:
    def test_zero_iff_same(self):
        l = two_bars()
        p = bars_at(l, dz=0.5)
        assert path_metric_upper_bound(l, p, p, budget=0, seed=1) == 0.0
        q = bars_at(l, dz=0.5 + 1e-6)
        assert path_metric_upper_bound(l, q, p, budget=0, seed=1) > 0.0

    def test_clear_translation_is_exact(self):
        l = two_bars()
        p, q = bars_at(l, dz=0.5), bars_at(l, dz=0.7)
        d = placement_distance(p, q)
        assert path_metric_upper_bound(l, p, q, budget=4, seed=1) == (
            pytest.approx(d)
        )

    def test_far_translation_caps_at_one(self):
        l = two_bars()
        p, q = bars_at(l, dz=0.5), bars_at(l, dz=3.5)
        assert path_metric_upper_bound(l, p, q, budget=4, seed=1) == 1.0

    def test_blocked_crossing_needs_detour(self):
        l = two_bars(length=0.4)
        p, q = bars_at(l, dz=0.03), bars_at(l, dz=-0.03)
        d = placement_distance(p, q)
        bound = path_metric_upper_bound(l, p, q, budget=64, seed=7)
        assert d < bound < 1.0

    def test_budget_monotone_and_deterministic(self):
        l = two_bars(length=0.4)
        p, q = bars_at(l, dz=0.03), bars_at(l, dz=-0.03)
        small = path_metric_upper_bound(l, p, q, budget=8, seed=7)
        big = path_metric_upper_bound(l, p, q, budget=64, seed=7)
        again = path_metric_upper_bound(l, p, q, budget=64, seed=7)
        assert big <= small
        assert big == again

    def test_best_path_reverses(self):
        l = two_bars(length=0.4)
        p, q = bars_at(l, dz=0.03), bars_at(l, dz=-0.03)
        bound, best = plan_path(l, p, q, budget=64, seed=7)
        assert best is not None
        assert is_valid_path(l, best)
        back = best.reversed()
        assert is_valid_path(l, back)
        assert path_length(back) == pytest.approx(path_length(best))

    def test_bound_at_least_capped_euclidean(self):
        l = two_bars()
        rng = random.Random(11)
        for _ in range(10):
            off = [rng.uniform(-0.6, 0.6) for _ in range(3)]
            p = bars_at(l, dz=1.0)
            q = bars_at(l, dz=1.0 + off[2], dx=off[0])
            d = placement_distance(p, q)
            bound = path_metric_upper_bound(l, p, q, budget=4, seed=3)
            assert 0.0 <= bound <= 1.0
            assert bound >= min(d, 1.0) - 1e-12

    def test_singular_endpoint_rejected(self):
        l = two_bars()
        with pytest.raises(ValueError, match="not embedded"):
            path_metric_upper_bound(
                l, bars_at(l, dz=0.0), bars_at(l, dz=0.5), budget=1, seed=1
            )


def approach(l, start, limit, tail_samples=8):
    return virtual_config_from_path(l, PLPath((start, limit)), tail_samples)


class TestVirtualFromPath:
    def test_crossing_approach_from_above(self):
        l = two_bars()
        v = approach(l, bars_at(l, dz=0.5), bars_at(l, dz=0.0))
        assert len(v.labels) == 1
        (lv,) = v.labels
        assert abs(lv.value("ea", "eb")) == 1
        assert v.witness is not None

    def test_mirrored_approaches_negate(self):
        l = two_bars()
        va = approach(l, bars_at(l, dz=0.5), bars_at(l, dz=0.0))
        vb = approach(l, bars_at(l, dz=-0.5), bars_at(l, dz=0.0))
        (la,), (lb,) = va.labels, vb.labels
        assert la.value("ea", "eb") == -lb.value("ea", "eb")

    def test_parallel_slide_carries_zero(self):
        l = two_bars()
        v = approach(
            l,
            bars_at(l, dz=0.5, dx=0.5, parallel=True),
            bars_at(l, dz=0.0, dx=0.5, parallel=True),
        )
        (lv,) = v.labels
        assert lv.value("ea", "eb") == 0

    def test_tail_labels_stable(self):
        l = two_bars()
        short = approach(l, bars_at(l, dz=0.5), bars_at(l, dz=0.0), 4)
        long = approach(l, bars_at(l, dz=0.5), bars_at(l, dz=0.0), 10)
        assert short.labels == long.labels

    def test_embedded_endpoint_rejected(self):
        l = two_bars()
        path = PLPath((bars_at(l, dz=0.5), bars_at(l, dz=0.2)))
        with pytest.raises(ValueError, match="invalid approach path"):
            virtual_config_from_path(l, path, 4)

    def test_touching_interior_waypoint_rejected(self):
        l = two_bars()
        path = PLPath(
            (bars_at(l, dz=0.5), bars_at(l, dz=0.0), bars_at(l, dz=0.0, dx=0.5))
        )
        with pytest.raises(ValueError, match="invalid approach path"):
            virtual_config_from_path(l, path, 4)

    def test_pass_through_en_route_rejected(self):
        l = two_bars()
        path = PLPath(
            (bars_at(l, dz=0.5), bars_at(l, dz=-0.5), bars_at(l, dz=0.0))
        )
        with pytest.raises(ValueError, match="invalid approach path"):
            virtual_config_from_path(l, path, 4)

    def test_tail_samples_validated(self):
        l = two_bars()
        path = PLPath((bars_at(l, dz=0.5), bars_at(l, dz=0.0)))
        with pytest.raises(ValueError, match="tail_samples"):
            virtual_config_from_path(l, path, 0)


class TestLabelsIdentified:
    def test_generic_crossing_sides_differ(self):
        l = two_bars()
        va = approach(l, bars_at(l, dz=0.5), bars_at(l, dz=0.0))
        vb = approach(l, bars_at(l, dz=-0.5), bars_at(l, dz=0.0))
        assert not labels_identified(l, va, vb)
        assert labels_identified(l, va, va)

    def test_different_limits_rejected(self):
        l = two_bars()
        va = approach(l, bars_at(l, dz=0.5), bars_at(l, dz=0.0))
        vb = approach(l, bars_at(l, dz=0.5, dx=0.3), bars_at(l, dz=0.0, dx=0.3))
        with pytest.raises(ValueError, match="different limits"):
            labels_identified(l, va, vb)

    def test_uncatalogued_limit_raises(self):
        l = two_bars()
        v = approach(
            l,
            bars_at(l, dz=0.5, dx=0.5, parallel=True),
            bars_at(l, dz=0.0, dx=0.5, parallel=True),
        )
        with pytest.raises(ValueError, match="uncatalogued singularity"):
            labels_identified(l, v, v)

    def test_skew_elbow_merged_sheets_identify(self):
        l = elbow_linkage()
        limit = elbow_placement(*SKEW)
        below = approach(l, elbow_placement(*SKEW, rod_offset=(0, 0, -0.4)), limit)
        side = approach(l, elbow_placement(*SKEW, rod_offset=(0, 0.4, 0)), limit)
        thread = approach(l, elbow_placement(*SKEW, rod_offset=(0, 0, 0.4)), limit)

        (lb,) = below.labels
        assert lb.value("rod", "s1") == 0 and lb.value("rod", "s2") == 0
        (lt,) = thread.labels
        assert lt.value("rod", "s1") == -lt.value("rod", "s2") != 0
        (ls,) = side.labels
        assert sorted(abs(x) for x in (ls.value("rod", "s1"), ls.value("rod", "s2"))) == [0, 1]

        assert labels_identified(l, below, side)
        assert not labels_identified(l, thread, below)
        assert not labels_identified(l, thread, side)

    def test_narrow_elbow_same_sign_identifies_with_zero(self):
        l = elbow_linkage()
        limit = elbow_placement(*NARROW)
        offset = None
        for k in range(72):
            theta = 2.0 * math.pi * k / 72.0
            cand = (0.0, 0.35 * math.sin(theta), 0.35 * math.cos(theta))
            lv = label_vector(l.type, elbow_placement(*NARROW, rod_offset=cand))
            s1, s2 = lv.value("rod", "s1"), lv.value("rod", "s2")
            if s1 != 0 and s1 == s2:
                offset = cand
                break
        assert offset is not None
        same_sign = approach(l, elbow_placement(*NARROW, rod_offset=offset), limit)
        below = approach(
            l, elbow_placement(*NARROW, rod_offset=(0, 0, -0.4)), limit
        )
        (lz,) = below.labels
        assert lz.value("rod", "s1") == 0 and lz.value("rod", "s2") == 0
        assert labels_identified(l, same_sign, below)

    def test_flat_elbow_three_classes_pairwise_distinct(self):
        l = elbow_linkage()
        limit = elbow_placement(*FLAT)
        eps, theta = 0.2, 0.15

        def tilted(sign):
            c, s = math.cos(sign * theta), math.sin(sign * theta)
            pivot = (0.0, eps, 0.0)

            def rot(p):
                rel = (p[0] - pivot[0], p[1] - pivot[1], p[2] - pivot[2])
                turned = (
                    c * rel[0] + s * rel[2],
                    rel[1],
                    -s * rel[0] + c * rel[2],
                )
                return vadd(pivot, turned)

            base = elbow_placement(*FLAT, rod_offset=(0, eps, 0))
            return Placement(
                {
                    v: rot(base.pos(v)) if v in ("r1", "r2") else base.pos(v)
                    for v in base.positions
                }
            )

        away = approach(l, elbow_placement(*FLAT, rod_offset=(0, -0.3, 0)), limit)
        tilt_pos = approach(l, tilted(+1), limit)
        tilt_neg = approach(l, tilted(-1), limit)

        (la,) = away.labels
        assert la.value("rod", "s1") == 0 and la.value("rod", "s2") == 0
        (lp,) = tilt_pos.labels
        (ln,) = tilt_neg.labels
        assert lp.value("rod", "s1") == -lp.value("rod", "s2") != 0
        assert lp.value("rod", "s1") == -ln.value("rod", "s1")

        assert not labels_identified(l, away, tilt_pos)
        assert not labels_identified(l, away, tilt_neg)
        assert not labels_identified(l, tilt_pos, tilt_neg)
        assert labels_identified(l, tilt_pos, tilt_pos)

    def test_empty_labels_rejected(self):
        l = two_bars()
        v = approach(l, bars_at(l, dz=0.5), bars_at(l, dz=0.0))
        hollow = VirtualConfiguration(limit=v.limit, labels=set())
        with pytest.raises(ValueError, match="no labels"):
            labels_identified(l, v, hollow)
