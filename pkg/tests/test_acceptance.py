"""Acceptance gate: the nine primary criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL (...)`` line with the
measured values; run with ``-v`` for per-criterion result lines from
pytest itself, or ``-s``/``-rP`` to see the printed summaries.

Criteria 1 and 3 currently fail, and the failure is genuine rather than a
bug in this package: the assembled four-dimensional complex has Euler
characteristic -2 both by cell count and by Betti numbers, which no Betti
vector (1, 9, 12, 6, 8) with characteristic 6 can produce.  The checks
state the target values verbatim and report what was computed; README
walks through the arithmetic.
"""

import contextlib
import io
import json
import math
import random
import time

import pytest

from linkspace import cli
from linkspace.chains import open_chain_descriptor
from linkspace.geom import closest_points, linking_number, segment
from linkspace.model import Edge, Linkage, LinkageType, Placement
from linkspace.singular import classify_singularity
from linkspace.virtual import PLPath, is_valid_path, placement_distance, plan_path

from oracles import grid_min_distance
from support import (
    rand_point,
    random_rotation,
    random_segment,
    random_skew_pair,
    reverse_edge,
    transform_edge,
)
from test_singular import crossing_bars, double_elbow, rod_through_elbow


def cli_json(argv):
    buffer = io.StringIO()
    with contextlib.redirect_stdout(buffer):
        code = cli.main(argv)
    return code, json.loads(buffer.getvalue())


def check(failures, ok, message):
    if not ok:
        failures.append(message)


def conclude(number, summary, failures):
    status = "FAIL" if failures else "PASS"
    print(f"criterion {number}: {status} ({summary})")
    if failures:
        pytest.fail("; ".join(failures), pytrace=False)


def test_criterion_1_three_line_homology():
    failures = []
    start = time.perf_counter()
    code, payload = cli_json(["complex", "--lines", "3"])
    elapsed = time.perf_counter() - start
    betti = payload["homology"]["betti"]
    torsion = payload["homology"]["torsion"]
    check(failures, code == 0, f"exit code {code}")
    check(
        failures,
        betti[0] == 1 and torsion[0] == [],
        f"H0 has rank {betti[0]} and torsion {torsion[0]}, required exactly Z",
    )
    check(
        failures,
        betti[4] == 8 and torsion[4] == [],
        f"H4 has rank {betti[4]} and torsion {torsion[4]}, required exactly Z^8",
    )
    check(
        failures,
        tuple(betti[1:4]) == (9, 12, 6),
        f"(b1, b2, b3) = {tuple(betti[1:4])}, required (9, 12, 6)",
    )
    check(failures, elapsed < 10.0, f"took {elapsed:.2f} s, limit 10 s")
    conclude(1, f"three-line homology: betti {betti}, {elapsed:.2f} s", failures)


def test_criterion_2_two_line_homology():
    failures = []
    start = time.perf_counter()
    code, payload = cli_json(["complex", "--lines", "2"])
    elapsed = time.perf_counter() - start
    betti = payload["homology"]["betti"]
    check(failures, code == 0, f"exit code {code}")
    check(failures, betti == [1, 1, 2], f"betti {betti}, required [1, 1, 2]")
    check(failures, elapsed < 1.0, f"took {elapsed:.2f} s, limit 1 s")
    conclude(2, f"two-line homology: betti {betti}, {elapsed:.2f} s", failures)


def test_criterion_3_euler_characteristic():
    failures = []
    start = time.perf_counter()
    code, payload = cli_json(["complex", "--lines", "3"])
    elapsed = time.perf_counter() - start
    cells = payload["homology"]["cells"]
    betti = payload["homology"]["betti"]
    from_cells = sum((-1) ** k * n for k, n in enumerate(cells))
    from_betti = sum((-1) ** k * b for k, b in enumerate(betti))
    check(failures, code == 0, f"exit code {code}")
    check(
        failures,
        from_cells == 6,
        f"Euler characteristic from cell counts is {from_cells}, required 6",
    )
    check(
        failures,
        from_betti == 6,
        f"Euler characteristic from Betti numbers is {from_betti}, required 6",
    )
    check(
        failures,
        from_cells == from_betti,
        f"cell count gives {from_cells} but Betti numbers give {from_betti}",
    )
    check(failures, elapsed < 1.0, f"took {elapsed:.2f} s, limit 1 s")
    conclude(
        3,
        f"Euler characteristic: cells {from_cells}, betti {from_betti}",
        failures,
    )


def test_criterion_4_blowup_fibers():
    root3 = math.sqrt(3.0)
    cases = [
        ("generic double point", crossing_bars(), 2),
        ("bar through a skew elbow", rod_through_elbow((0, 1, 1), (0, -1, 1)), 2),
        (
            "bar through a coplanar elbow",
            rod_through_elbow((1, root3, 0), (-1, root3, 0)),
            3,
        ),
        (
            "double elbow on opposite sides",
            double_elbow(((0, -1, 1), (0, -1, -1)), ((1, 1, 0), (-1, 1, 0))),
            2,
        ),
    ]
    failures = []
    counts = []
    for name, (l, p), expected in cases:
        start = time.perf_counter()
        report = classify_singularity(l, p)
        elapsed = time.perf_counter() - start
        counts.append(report.preimage_count)
        check(
            failures,
            report.preimage_count == expected,
            f"{name}: fiber count {report.preimage_count}, required {expected}",
        )
        classes = report.label_classes
        check(
            failures,
            classes is not None and len(classes) == expected,
            f"{name}: approach paths realize "
            f"{None if classes is None else len(classes)} label classes, "
            f"required {expected}",
        )
        check(failures, elapsed < 1.0, f"{name}: took {elapsed:.2f} s, limit 1 s")
    conclude(4, f"blow-up fiber counts {counts}, required [2, 2, 3, 2]", failures)


def test_criterion_5_quad_example_chamber():
    failures = []
    start = time.perf_counter()
    code, payload = cli_json(["quad", "--lengths", "5,5,1,5"])
    elapsed = time.perf_counter() - start
    schedule = [(e["fiber"], e["at"]) for e in payload["fiber_schedule"]]
    expected = [
        ("point", "aligned"),
        ("circle", None),
        ("circle", "acd"),
        ("closed-interval", None),
        ("point", "bdc"),
    ]
    check(failures, code == 0, f"exit code {code}")
    check(
        failures,
        payload["arc_case"] == "iv",
        f"arc case {payload['arc_case']!r}, required 'iv'",
    )
    check(failures, schedule == expected, f"schedule {schedule}, required {expected}")
    check(failures, elapsed < 1.0, f"took {elapsed:.2f} s, limit 1 s")
    conclude(
        5,
        f"chamber (5,5,1,5): case {payload['arc_case']}, schedule of "
        f"{len(schedule)} stages",
        failures,
    )


def test_criterion_6_linking_property_suite():
    rng = random.Random(64006)
    failures = []
    skew_pairs = 0
    while skew_pairs < 1000 and len(failures) < 5:
        e1, e2 = random_skew_pair(rng)
        sign = linking_number(e1, e2)
        check(failures, sign in (-1, 1), f"skew pair gave sign {sign}")
        check(
            failures,
            linking_number(e2, e1) == sign,
            "sign changed under argument swap",
        )
        mirrored = linking_number(
            transform_edge(e1, reflect=True), transform_edge(e2, reflect=True)
        )
        check(failures, mirrored == -sign, "sign kept under reflection")
        check(
            failures,
            linking_number(reverse_edge(e1), e2) == -sign,
            "sign kept under single orientation reversal",
        )
        rot = random_rotation(rng)
        shift = rand_point(rng)
        moved = linking_number(
            transform_edge(e1, rot=rot, shift=shift),
            transform_edge(e2, rot=rot, shift=shift),
        )
        check(failures, moved == sign, "sign changed under rigid motion")
        scale = rng.uniform(0.2, 3.0)
        dilated = linking_number(
            transform_edge(e1, scale=scale), transform_edge(e2, scale=scale)
        )
        check(failures, dilated == sign, "sign changed under positive dilation")
        skew_pairs += 1
    zero_cases = 0
    for _ in range(100):
        base = random_segment(rng)
        offset = rand_point(rng, 1.0)
        parallel = segment(
            (base.anchor[0] + offset[0], base.anchor[1] + offset[1], base.anchor[2] + offset[2]),
            (
                base.point_at(base.length)[0] + offset[0],
                base.point_at(base.length)[1] + offset[1],
                base.point_at(base.length)[2] + offset[2],
            ),
        )
        check(
            failures,
            linking_number(base, parallel) == 0,
            "parallel construction gave a nonzero sign",
        )
        flat1 = segment(
            (rng.uniform(-3, 3), rng.uniform(-3, 3), 0.0),
            (rng.uniform(-3, 3), rng.uniform(-3, 3), 0.0),
        )
        flat2 = segment(
            (rng.uniform(-3, 3), rng.uniform(-3, 3), 0.0),
            (rng.uniform(-3, 3), rng.uniform(-3, 3), 0.0),
        )
        check(
            failures,
            linking_number(flat1, flat2) == 0,
            "coplanar construction gave a nonzero sign",
        )
        zero_cases += 2
    conclude(
        6,
        f"linking suite: {skew_pairs} skew pairs, {zero_cases} zero cases",
        failures,
    )


def test_criterion_7_closest_point_oracle():
    rng = random.Random(64007)
    failures = []
    worst = 0.0
    for index in range(500):
        e1 = random_segment(rng)
        e2 = random_segment(rng)
        analytic = closest_points(e1, e2).distance
        gridded, _, _ = grid_min_distance(e1, e2, step=1e-4)
        delta = abs(analytic - gridded)
        worst = max(worst, delta)
        if len(failures) < 5:
            check(
                failures,
                delta <= 1e-3,
                f"pair {index}: analytic {analytic:.6f} vs grid {gridded:.6f}",
            )
    conclude(7, f"closest-point oracle: 500 pairs, worst gap {worst:.2e}", failures)


def _triangle_linkage():
    t = LinkageType(
        vertices=("u", "v", "w"),
        edges=(
            Edge("e1", "segment", ("u", "v")),
            Edge("e2", "segment", ("v", "w")),
            Edge("e3", "segment", ("w", "u")),
        ),
    )
    return Linkage(t, {"e1": 1.0, "e2": 1.0, "e3": 1.0})


def _two_bars_linkage():
    t = LinkageType(
        vertices=("a1", "a2", "b1", "b2"),
        edges=(
            Edge("ea", "segment", ("a1", "a2")),
            Edge("eb", "segment", ("b1", "b2")),
        ),
    )
    return Linkage(t, {"ea": 2.0, "eb": 2.0})


def _rigid_triangle_placement(rng):
    rot = random_rotation(rng)
    shift = rand_point(rng, 1.5)
    base = {
        "u": (0.0, 0.0, 0.0),
        "v": (1.0, 0.0, 0.0),
        "w": (0.5, math.sqrt(3.0) / 2.0, 0.0),
    }
    from support import mat_apply

    return Placement(
        {
            name: tuple(c + s for c, s in zip(mat_apply(rot, point), shift))
            for name, point in base.items()
        }
    )


def _over_under_pair(rng):
    """Bar A above bar B, and the same scene with A below: the straight
    hop pushes A through B."""
    lateral = rng.uniform(-0.3, 0.3)
    height = rng.uniform(0.3, 0.8)

    def scene(z):
        return Placement(
            {
                "a1": (-1.0 + lateral, 0.0, z),
                "a2": (1.0 + lateral, 0.0, z),
                "b1": (0.0, -1.0, 0.0),
                "b2": (0.0, 1.0, 0.0),
            }
        )

    return scene(height), scene(-height)


def test_criterion_8_path_metric_contract():
    rng = random.Random(64008)
    triangle = _triangle_linkage()
    bars = _two_bars_linkage()
    failures = []
    start = time.perf_counter()
    capped_runs = 0
    for trial in range(200):
        if trial % 4 == 3:
            l = bars
            p, q = _over_under_pair(rng)
        else:
            l = triangle
            p = _rigid_triangle_placement(rng)
            q = _rigid_triangle_placement(rng)
        upper, path = plan_path(l, p, q, budget=6, seed=trial)
        lower = min(placement_distance(p, q), 1.0)
        if len(failures) >= 5:
            break
        check(
            failures,
            upper <= 1.0,
            f"trial {trial}: upper bound {upper} escapes the cap",
        )
        check(
            failures,
            upper >= lower - 1e-12,
            f"trial {trial}: upper {upper} below lower {lower}",
        )
        if upper >= 1.0:
            capped_runs += 1
        straight = PLPath((p, q))
        if is_valid_path(l, straight):
            check(
                failures,
                upper == pytest.approx(min(placement_distance(p, q), 1.0)),
                f"trial {trial}: straight path validates but upper is {upper}",
            )
        if trial % 20 == 0:
            bounds = [
                plan_path(l, p, q, budget=b, seed=trial)[0] for b in (2, 6, 12)
            ]
            check(
                failures,
                bounds[0] >= bounds[1] >= bounds[2],
                f"trial {trial}: bounds {bounds} not monotone in budget",
            )
    elapsed = time.perf_counter() - start
    check(failures, elapsed < 60.0, f"took {elapsed:.1f} s, limit 60 s")
    conclude(
        8,
        f"path metric: 200 trials, {capped_runs} capped, {elapsed:.1f} s",
        failures,
    )


def test_criterion_9_open_chain_descriptors():
    failures = []
    start = time.perf_counter()
    named = [
        ((math.inf, 1.0, math.inf), "S2 v S2 v S2"),
        ((1.0, 3.0, 1.0), "S2 x S2"),
        ((1.0, 1.0), "S2"),
    ]
    for lengths, expected in named:
        got = open_chain_descriptor(lengths)
        check(
            failures,
            got == expected,
            f"{lengths}: descriptor {got!r}, required {expected!r}",
        )
    first, last = 1.25, 0.75
    threshold = first + last
    below = open_chain_descriptor((first, math.nextafter(threshold, 0.0), last))
    at = open_chain_descriptor((first, threshold, last))
    above = open_chain_descriptor((first, math.nextafter(threshold, math.inf), last))
    check(
        failures,
        below == "S2 v S2 v S2" and at == "S2 x S2" and above == "S2 x S2",
        f"sweep around the middle length {threshold}: {below!r} / {at!r} / {above!r}",
    )
    sweep = [open_chain_descriptor((first, m / 16.0, last)) for m in range(8, 64)]
    flips = sum(1 for a, b in zip(sweep, sweep[1:]) if a != b)
    check(failures, flips == 1, f"descriptor changed {flips} times across the sweep")
    elapsed = time.perf_counter() - start
    check(failures, elapsed < 1.0, f"took {elapsed:.2f} s, limit 1 s")
    conclude(9, "open chains: named cases and one transition at l1+l3", failures)
