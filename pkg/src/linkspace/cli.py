"""Command-line interface to the linkage toolkit.

Eight subcommands wrap the library entry points:

* ``check``        validate a placement file against a linkage file
* ``labels``       crossing-label vector of a placement
* ``distance``     capped path-metric bounds between two placements
* ``singularity``  contact features of a touching placement
* ``complex``      line-arrangement CW complex and its homology
* ``quad``         chamber report for a four-bar loop
* ``chain``        configuration-space descriptor for an open chain
* ``export``       Wavefront OBJ scene of a placement

Reports go to stdout (or ``--out``) as JSON or as tab-delimited
``key<TAB>value`` rows; both renderings are byte-deterministic for fixed
inputs and flags.  ``--figures DIR`` additionally renders matplotlib
summaries next to the report for the commands that have one (``quad`` and
``complex``).

Exit codes:

*  0   success; for ``check`` the placement is embedded
*  2   ``check`` only: an immersed configuration that is not embedded
*  3   a placement violates the prescribed bar lengths
* 64   malformed input: unreadable file, invalid JSON or schema, bad flag
* 65   domain error: well-formed input the operation cannot accept
* 70   internal error
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .chains import QuadLengths, open_chain_descriptor, quad_chamber
from .cw import homology
from .geom import DEFAULT_TOL, closest_points
from .lines import (
    THREE_LINE_VARIANTS,
    build_three_line_complex,
    build_two_line_complex,
)
from .model import (
    Linkage,
    Placement,
    edge_geometry,
    edge_pairs,
    is_embedding,
    label_vector,
    moduli,
    parse_linkage,
    parse_placement,
)
from .singular import classify_singularity
from .virtual import DEFAULT_SAMPLES_PER_HOP, placement_distance, plan_path

EXIT_OK = 0
EXIT_NOT_EMBEDDED = 2
EXIT_NOT_CONFIGURATION = 3
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_INTERNAL = 70

# Environment fallback for --tol, read only when the flag is absent.
ENV_TOL = "LINKSPACE_TOL"


class CLIError(Exception):
    """Error carrying a definite process exit code."""

    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    """Resolved global options shared by every subcommand."""

    tolerance: float = DEFAULT_TOL
    seed: int = 0
    budget: int = 32
    fmt: str = "json"
    scene_radius: float = 10.0
    samples_per_hop: int = DEFAULT_SAMPLES_PER_HOP
    out: str = "-"
    figures: str | None = None


# ---------------------------------------------------------------------------
# Input loading.
# ---------------------------------------------------------------------------


def _resolve_tolerance(flag: float | None) -> float:
    if flag is not None:
        if not flag > 0.0:
            raise CLIError(EXIT_USAGE, "--tol must be positive")
        return flag
    raw = os.environ.get(ENV_TOL)
    if raw is None:
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        raise CLIError(
            EXIT_USAGE, f"{ENV_TOL}: expected a number, got {raw!r}"
        ) from None
    if not value > 0.0 or not math.isfinite(value):
        raise CLIError(EXIT_USAGE, f"{ENV_TOL} must be positive")
    return value


def _load_json(path: str) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CLIError(
            EXIT_USAGE, f"cannot read {path}: {exc.strerror or exc}"
        ) from None
    except json.JSONDecodeError as exc:
        raise CLIError(EXIT_USAGE, f"{path}: invalid JSON: {exc}") from None


def _load_linkage(path: str) -> Linkage:
    try:
        return parse_linkage(_load_json(path))
    except ValueError as exc:
        raise CLIError(EXIT_USAGE, f"{path}: {exc}") from None


def _load_placement(path: str, l: Linkage) -> Placement:
    try:
        return parse_placement(_load_json(path), l.type)
    except ValueError as exc:
        raise CLIError(EXIT_USAGE, f"{path}: {exc}") from None


def _parse_lengths(raw: str, allow_unbounded: bool = False) -> list[float]:
    values: list[float] = []
    for token in raw.split(","):
        token = token.strip()
        try:
            value = float(token)
        except ValueError:
            raise CLIError(
                EXIT_USAGE, f"--lengths: expected a number, got {token!r}"
            ) from None
        if math.isnan(value) or (math.isinf(value) and not allow_unbounded):
            raise CLIError(EXIT_USAGE, f"--lengths: {token!r} is not a length")
        values.append(value)
    return values


def _domain_error(exc: ValueError) -> CLIError:
    message = str(exc)
    if "not a configuration" in message:
        return CLIError(EXIT_NOT_CONFIGURATION, message)
    return CLIError(EXIT_DATA, message)


# ---------------------------------------------------------------------------
# Report rendering.
# ---------------------------------------------------------------------------


def _format_scalar(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return "null"
    return str(value)


def _delimited_rows(payload: object, prefix: str, rows: list[str]) -> None:
    """Flatten nested dicts and lists into sorted ``key<TAB>value`` rows."""
    if isinstance(payload, dict):
        for key in sorted(payload):
            _delimited_rows(payload[key], f"{prefix}{key}.", rows)
    elif isinstance(payload, (list, tuple)):
        if any(isinstance(v, (dict, list, tuple)) for v in payload):
            for i, v in enumerate(payload):
                _delimited_rows(v, f"{prefix}{i}.", rows)
        else:
            cells = [prefix.rstrip(".")] + [_format_scalar(v) for v in payload]
            rows.append("\t".join(cells))
    else:
        rows.append(prefix.rstrip(".") + "\t" + _format_scalar(payload))


def _render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"
    rows: list[str] = []
    _delimited_rows(payload, "", rows)
    return "".join(row + "\n" for row in rows)


def _write_text(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CLIError(
            EXIT_USAGE, f"cannot write {out}: {exc.strerror or exc}"
        ) from None


def _emit(payload: dict, cfg: RunConfig) -> None:
    _write_text(_render(payload, cfg.fmt), cfg.out)


def _figures_dir(cfg: RunConfig) -> Path | None:
    if cfg.figures is None:
        return None
    directory = Path(cfg.figures)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CLIError(
            EXIT_USAGE, f"cannot create {directory}: {exc.strerror or exc}"
        ) from None
    return directory


def _note_figure(path: Path) -> None:
    print(f"wrote {path}", file=sys.stderr)


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------


def cmd_check(cfg: RunConfig, args: argparse.Namespace) -> int:
    l = _load_linkage(args.linkage)
    p = _load_placement(args.placement, l)
    t = l.type
    measured = moduli(t, p)
    residuals = {eid: measured[eid] - l.lengths[eid] for eid in measured}
    configuration = all(abs(r) <= cfg.tolerance for r in residuals.values())
    embedded = configuration and is_embedding(t, p, cfg.tolerance)

    geoms = {e.id: edge_geometry(t, p, e.id) for e in t.edges}
    contacts = []
    for a, b in edge_pairs(t):
        if a > b:
            continue
        pair = closest_points(geoms[a], geoms[b], cfg.tolerance)
        if pair.distance <= cfg.tolerance:
            mid = [(ca + cb) / 2.0 for ca, cb in zip(pair.a, pair.b)]
            contacts.append({"edges": [a, b], "distance": pair.distance, "point": mid})

    if not configuration:
        verdict, code = "not-a-configuration", EXIT_NOT_CONFIGURATION
    elif embedded:
        verdict, code = "embedded", EXIT_OK
    else:
        verdict, code = "immersed-not-embedded", EXIT_NOT_EMBEDDED
    _emit(
        {
            "verdict": verdict,
            "configuration": configuration,
            "embedded": embedded,
            "tolerance": cfg.tolerance,
            "residuals": residuals,
            "contacts": contacts,
        },
        cfg,
    )
    return code


def cmd_labels(cfg: RunConfig, args: argparse.Namespace) -> int:
    l = _load_linkage(args.linkage)
    p = _load_placement(args.placement, l)
    vector = label_vector(l.type, p, cfg.tolerance)
    entries = [{"edges": [a, b], "sign": s} for a, b, s in vector.as_tuple()]
    _emit(
        {
            "labels": entries,
            "nonzero": sum(1 for e in entries if e["sign"] != 0),
        },
        cfg,
    )
    return EXIT_OK


def cmd_distance(cfg: RunConfig, args: argparse.Namespace) -> int:
    l = _load_linkage(args.linkage)
    start = _load_placement(args.start, l)
    goal = _load_placement(args.goal, l)
    try:
        upper, path = plan_path(
            l,
            start,
            goal,
            budget=cfg.budget,
            seed=cfg.seed,
            samples_per_hop=cfg.samples_per_hop,
            tol=cfg.tolerance,
        )
    except ValueError as exc:
        raise _domain_error(exc) from None
    _emit(
        {
            "lower_bound": min(placement_distance(start, goal), 1.0),
            "upper_bound": upper,
            "capped": upper >= 1.0,
            "waypoints": 0 if path is None else len(path.waypoints),
        },
        cfg,
    )
    return EXIT_OK


def cmd_singularity(cfg: RunConfig, args: argparse.Namespace) -> int:
    l = _load_linkage(args.linkage)
    p = _load_placement(args.placement, l)
    try:
        report = classify_singularity(l, p, cfg.tolerance)
    except ValueError as exc:
        raise _domain_error(exc) from None
    features = [
        {
            "kind": f.kind,
            "edges": list(f.edges),
            "vertices": list(f.vertices),
            "location": list(f.location),
            "multiplicity": f.multiplicity,
            "transverse": f.transverse,
            "coplanar": f.coplanar,
            "outside": f.outside,
            "elbow_closed": f.elbow_closed,
            "opposite_sides": f.opposite_sides,
        }
        for f in report.features
    ]
    classes = None
    if report.label_classes is not None:
        classes = [
            [
                [
                    {"edges": [a, b], "sign": s}
                    for a, b, s in vector.as_tuple()
                    if s != 0
                ]
                for vector in group
            ]
            for group in report.label_classes
        ]
    _emit(
        {
            "features": features,
            "generic": report.generic,
            "catalogued": report.catalogued,
            "preimage_count": report.preimage_count,
            "label_classes": classes,
        },
        cfg,
    )
    return EXIT_OK


def cmd_complex(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.lines == 2:
        if args.variant is not None:
            raise CLIError(EXIT_USAGE, "--variant only applies to --lines 3")
        variant = None
        cx = build_two_line_complex()
    else:
        variant = args.variant or THREE_LINE_VARIANTS[0]
        cx = build_three_line_complex(variant)
    report = homology(cx)
    _emit(
        {
            "lines": args.lines,
            "variant": variant,
            "complex": json.loads(cx.to_json()),
            "homology": {
                "betti": report.betti,
                "torsion": report.torsion,
                "cells": report.cells,
                "euler": report.euler,
                "summary": report.summary(),
            },
        },
        cfg,
    )
    directory = _figures_dir(cfg)
    if directory is not None:
        from .figures import save_homology_chart

        _note_figure(
            save_homology_chart(report, directory / f"homology_{args.lines}_lines.png")
        )
    return EXIT_OK


def cmd_quad(cfg: RunConfig, args: argparse.Namespace) -> int:
    values = _parse_lengths(args.lengths)
    if len(values) != 4:
        raise CLIError(EXIT_USAGE, f"--lengths: expected four sides, got {len(values)}")
    try:
        report = quad_chamber(QuadLengths(*values))
    except ValueError as exc:
        raise CLIError(EXIT_DATA, str(exc)) from None
    _emit(
        {
            "lengths": list(report.lengths),
            "frame_lengths": list(report.frame_lengths),
            "vertex_map": report.vertex_map,
            "normalized": report.normalized,
            "arc_case": report.arc_case,
            "collineations": sorted(report.collineations),
            "alpha_min": report.alpha_min,
            "alpha_max": report.alpha_max,
            "fiber_schedule": [
                {"lo": e.lo, "hi": e.hi, "fiber": e.fiber, "at": e.at}
                for e in report.fiber_schedule
            ],
            "schedule_derived": report.schedule_derived,
            "space": report.space,
        },
        cfg,
    )
    directory = _figures_dir(cfg)
    if directory is not None:
        from .figures import save_quad_schedule

        _note_figure(save_quad_schedule(report, directory / "quad_schedule.png"))
    return EXIT_OK


def cmd_chain(cfg: RunConfig, args: argparse.Namespace) -> int:
    values = _parse_lengths(args.lengths, allow_unbounded=True)
    try:
        space = open_chain_descriptor(values)
    except ValueError as exc:
        raise CLIError(EXIT_DATA, str(exc)) from None
    _emit(
        {
            "lengths": ["inf" if math.isinf(v) else v for v in values],
            "links": len(values),
            "space": space,
        },
        cfg,
    )
    return EXIT_OK


def scene_to_obj(l: Linkage, p: Placement, scene_radius: float = 10.0) -> str:
    """Wavefront OBJ scene with one polyline per edge.

    Segments keep their true extent; a half-line is truncated at arc length
    ``scene_radius`` from its end vertex and a line at ``scene_radius``
    either side of its anchor.
    """
    t = l.type
    lines = ["# one polyline per linkage edge"]
    index = 0
    for e in t.edges:
        g = edge_geometry(t, p, e.id)
        lo, hi = g.param_range()
        if not math.isfinite(lo):
            lo = -scene_radius
        if not math.isfinite(hi):
            hi = scene_radius
        lines.append(f"o {e.id}")
        for point in (g.point_at(lo), g.point_at(hi)):
            lines.append("v " + " ".join(repr(c) for c in point))
        lines.append(f"l {index + 1} {index + 2}")
        index += 2
    return "".join(line + "\n" for line in lines)


def cmd_export(cfg: RunConfig, args: argparse.Namespace) -> int:
    if not cfg.scene_radius > 0.0:
        raise CLIError(EXIT_USAGE, "--scene-radius must be positive")
    l = _load_linkage(args.linkage)
    p = _load_placement(args.placement, l)
    _write_text(scene_to_obj(l, p, cfg.scene_radius), cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser and entry point.
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems with exit code 64."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    run = common.add_argument_group("run options")
    run.add_argument(
        "--tol",
        type=float,
        default=None,
        metavar="EPS",
        help=f"geometric tolerance (default: ${ENV_TOL} or {DEFAULT_TOL})",
    )
    run.add_argument("--seed", type=int, default=0, help="seed for randomized search")
    run.add_argument(
        "--budget", type=int, default=32, help="iteration budget for path search"
    )
    run.add_argument(
        "--format",
        dest="fmt",
        choices=("json", "text"),
        default="json",
        help="report rendering; text is tab-delimited rows",
    )
    run.add_argument(
        "--scene-radius",
        type=float,
        default=10.0,
        metavar="R",
        help="truncation radius for unbounded edges (default 10)",
    )
    run.add_argument(
        "--samples-per-hop",
        type=int,
        default=DEFAULT_SAMPLES_PER_HOP,
        metavar="N",
        help="collision samples per straight hop of a path",
    )
    run.add_argument(
        "--out",
        default="-",
        metavar="PATH",
        help="write the report to PATH instead of stdout",
    )
    run.add_argument(
        "--figures",
        default=None,
        metavar="DIR",
        help="also render matplotlib figures into DIR (quad, complex)",
    )

    parser = _Parser(
        prog="linkspace",
        description="Collision-aware configuration spaces of spatial linkages.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    s = sub.add_parser(
        "check",
        parents=[common],
        help="validate a placement against a linkage",
        description="Report bar-length residuals and touching edge pairs; the "
        "exit code states whether the placement is an embedded configuration.",
    )
    s.add_argument("linkage", help="linkage JSON file")
    s.add_argument("placement", help="placement JSON file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser(
        "labels",
        parents=[common],
        help="crossing-label vector of a placement",
        description="Print the crossing label of every disjoint edge pair in "
        "lexicographic order.",
    )
    s.add_argument("linkage", help="linkage JSON file")
    s.add_argument("placement", help="placement JSON file")
    s.set_defaults(func=cmd_labels)

    s = sub.add_parser(
        "distance",
        parents=[common],
        help="capped path-metric bounds between two placements",
        description="Lower and upper bounds for the capped path distance "
        "between two embedded placements of the same linkage.",
    )
    s.add_argument("linkage", help="linkage JSON file")
    s.add_argument("start", help="start placement JSON file")
    s.add_argument("goal", help="goal placement JSON file")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser(
        "singularity",
        parents=[common],
        help="contact features of a touching placement",
        description="Classify every contact feature of a touching "
        "configuration and report the completed-space preimage count.",
    )
    s.add_argument("linkage", help="linkage JSON file")
    s.add_argument("placement", help="placement JSON file")
    s.set_defaults(func=cmd_singularity)

    s = sub.add_parser(
        "complex",
        parents=[common],
        help="line-arrangement CW complex and its homology",
        description="Build the configuration complex of two or three lines "
        "and print its cells together with the integral homology.",
    )
    s.add_argument(
        "--lines", type=int, choices=(2, 3), required=True, help="number of lines"
    )
    s.add_argument(
        "--variant",
        choices=THREE_LINE_VARIANTS,
        default=None,
        help="cell identification scheme for --lines 3",
    )
    s.set_defaults(func=cmd_complex)

    s = sub.add_parser(
        "quad",
        parents=[common],
        help="chamber report for a four-bar loop",
        description="Classify the arc of diagonal angles of a four-bar loop "
        "and print the fiber schedule with its collineation markers.",
    )
    s.add_argument(
        "--lengths",
        required=True,
        metavar="A,B,C,D",
        help="four side lengths in cyclic order",
    )
    s.set_defaults(func=cmd_quad)

    s = sub.add_parser(
        "chain",
        parents=[common],
        help="configuration-space descriptor for an open chain",
        description="Print the reduced direction-space descriptor of a 2- or "
        "3-link open chain; unbounded end links are written as inf.",
    )
    s.add_argument(
        "--lengths",
        required=True,
        metavar="L1,L2,...",
        help="link lengths in order, inf allowed at the ends",
    )
    s.set_defaults(func=cmd_chain)

    s = sub.add_parser(
        "export",
        parents=[common],
        help="Wavefront OBJ scene of a placement",
        description="Write an OBJ scene with one polyline per edge; unbounded "
        "edges are truncated at the scene radius.",
    )
    s.add_argument("linkage", help="linkage JSON file")
    s.add_argument("placement", help="placement JSON file")
    s.set_defaults(func=cmd_export)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.budget < 0:
            raise CLIError(EXIT_USAGE, "--budget must not be negative")
        if args.samples_per_hop < 1:
            raise CLIError(EXIT_USAGE, "--samples-per-hop must be at least 1")
        cfg = RunConfig(
            tolerance=_resolve_tolerance(args.tol),
            seed=args.seed,
            budget=args.budget,
            fmt=args.fmt,
            scene_radius=args.scene_radius,
            samples_per_hop=args.samples_per_hop,
            out=args.out,
            figures=args.figures,
        )
        return args.func(cfg, args)
    except CLIError as exc:
        print(f"linkspace: error: {exc}", file=sys.stderr)
        return exc.code
    except Exception as exc:  # pragma: no cover - defensive catch-all
        print(f"linkspace: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
