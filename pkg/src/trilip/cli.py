"""Command-line front end.

Triangles are given as JSON objects, ``{"edges": [a1, a2, a3]}`` or
``{"angles": [t1, t2, t3], "area": A}``, either inline, as ``@path``, or as a
JSON list on stdin when no positional triangles are passed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from . import boundary, emit, finsler, geodesic, lipmap, metric, oracle
from .errors import InvalidInput, PreconditionFailed
from .triangle import (
    ModuliPoint,
    embed,
    normalize_to_area,
    triangle_from_json,
    triangle_to_json,
)

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_PRECONDITION = 0, 1, 2, 3

DEFAULT_TOLERANCE = {
    "dist": metric.GAP_MARGIN,
    "map": 1e-10,
    "geodesic": geodesic.ADDITIVITY_TOL,
    "flength": finsler.SPEED_TOL,
    "boundary": 1e-12,
    "oracle": 1e-4,
    "figure": 1e-9,
}


class BadJson(InvalidInput):
    pass


def _load(text: str):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadJson(f"malformed JSON: {exc}") from None


def _triangles(args, count: int, at_least: bool = False) -> list:
    if args.triangles:
        raw = [_load(t) for t in args.triangles]
        if len(raw) == 1 and isinstance(raw[0], list):
            raw = raw[0]
    else:
        raw = _load(sys.stdin.read())
        raw = [raw] if isinstance(raw, dict) else raw
    if not isinstance(raw, list):
        raise BadJson("expected triangle objects")
    if (len(raw) < count) if at_least else (len(raw) != count):
        raise BadJson(f"expected {'at least ' if at_least else ''}{count} triangles, got {len(raw)}")
    return [triangle_from_json(r, default_area=args.area) for r in raw]


def _points(args, count: int, at_least: bool = False) -> list[ModuliPoint]:
    return [normalize_to_area(t, args.area) for t in _triangles(args, count, at_least)]


def _envelope(args, result: dict) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "triangles", "tol")}
    return {
        "tool": "trilip",
        "version": __version__,
        "command": args.command,
        "flags": flags,
        "tolerances": {"tolerance": args.tol},
        "result": result,
    }


# ---------------------------------------------------------------------------
# subcommands; each returns the text to emit


def cmd_dist(args) -> str:
    t, u = _triangles(args, 2)
    m = metric.m_distance(t, u)
    gap = None
    if t.is_acute:
        lower = metric.lower_bound_six_ratios(t, u)
    else:
        cert = metric.obtuse_gap_certificate(embed(t), embed(u))
        lower, gap = cert.lower, cert.lower > cert.exp_m + args.tol
    pivot = case = None
    try:
        pivot, c = metric.pivot_index(t, u)
        case = c.value
    except InvalidInput:
        pass
    out = {"m": m, "L_lower": math.log(lower), "pivot": pivot, "case": case,
           "T": triangle_to_json(t), "T_prime": triangle_to_json(u)}
    if gap is not None:
        out["gap_proven"] = gap
    if args.format == "csv":
        return emit.to_csv(["m", "L_lower", "pivot", "case"],
                           [[m, math.log(lower), pivot or "", case or ""]])
    return emit.dumps(_envelope(args, out)) + "\n"


def _map_svg(f: lipmap.PiecewiseAffineMap) -> str:
    src, dst = f.source.points, f.target.points
    gap = 0.25 * max(np.ptp(src[:, 0]), np.ptp(dst[:, 0]))
    shift = np.array([src[:, 0].max() - dst[:, 0].min() + gap, 0.0])
    svg = emit.fit(np.vstack((src, dst + shift)))
    for p in f.pieces:
        svg.polygon(p.cell.points, stroke="#1f77b4", fill="#dbe9f6")
        svg.polygon(p.image + shift, stroke="#d62728", fill="#f8dcdc")
    svg.polygon(src, width=2.0)
    svg.polygon(dst + shift, width=2.0)
    for i in range(3):
        svg.text(src[i], f"v{i + 1}", anchor="end")
        svg.text(dst[i] + shift, f"v{i + 1}'", anchor="start")
    return svg.render()


def cmd_map(args) -> str:
    p, q = _points(args, 2)
    f, c = lipmap.best_lipschitz_map(p, q)
    if args.format == "svg":
        return _map_svg(f)
    rep = lipmap.check_map(f, args.tol)
    if args.format == "csv":
        rows = [[n, *pc.cell.points.ravel(), *pc.linear.ravel(), *pc.offset, pc.lipschitz]
                for n, pc in enumerate(f.pieces)]
        return emit.to_csv(["piece", "x1", "y1", "x2", "y2", "x3", "y3",
                            "l11", "l12", "l21", "l22", "b1", "b2", "sigma"], rows)
    out = f.to_json()
    out.update(m=metric.m_equal_area(p, q), exp_m=math.exp(metric.m_equal_area(p, q)),
               valid=rep.ok, max_continuity_error=rep.max_continuity_error)
    return emit.dumps(_envelope(args, out)) + "\n"


def _trace_svg(paths: list[np.ndarray], marks=()) -> str:
    svg = emit.Svg((0.0, 0.0), (1.0, math.sqrt(3.0) / 2.0))
    _angle_domain(svg)
    for a in paths:
        svg.polyline(emit.angle_model_xy(a), stroke="#d62728", width=2.0)
    for m in marks:
        svg.circle(emit.angle_model_xy(m), r=3.0, fill="#d62728")
    return svg.render()


def cmd_geodesic(args) -> str:
    p, q = _points(args, 2)
    path = geodesic.angle_line_path(p, q)
    n = args.samples or 64
    t = path.sample_times(n)
    ang, edg = path.angles(t), path.edges(t)
    if args.format == "svg":
        return _trace_svg([ang], [ang[0], ang[-1]])
    if args.format == "csv":
        return emit.to_csv(["t", "theta1", "theta2", "theta3", "a1", "a2", "a3"],
                           np.column_stack((t, ang, edg)).tolist())
    defect = geodesic.additivity_defect(path, n)
    out = {
        "samples": [{"t": float(s), "angles": a.tolist(), "edges": e.tolist()}
                    for s, a, e in zip(t, ang, edg)],
        "m": metric.m_equal_area(p, q),
        "defect": defect,
        "monotone": geodesic.is_monotone_geodesic(path, n),
        "geodesic": defect <= args.tol,
    }
    return emit.dumps(_envelope(args, out)) + "\n"


def cmd_flength(args) -> str:
    pts = _points(args, 2, at_least=True)
    p, q = pts[0], pts[-1]
    for x in pts[1:]:
        metric.check_equal_area(p, x)
    path = geodesic.polyline_path([x.angles.as_array() for x in pts], args.area)
    n = args.samples or 10_000
    nodes = finsler.quadrature_nodes(path, n)
    length = finsler.path_length(path, n)
    if args.format == "csv":
        return emit.to_csv(["t", "F"], np.column_stack((nodes, finsler.speed(path, nodes))).tolist())
    if args.format == "svg":
        return _trace_svg([path.angles(nodes)], [x.angles.as_array() for x in pts])
    m = metric.m_equal_area(p, q)
    out = {"length": length, "m": m, "excess": length - m, "nodes": len(nodes),
           "waypoints": len(pts) - 2}
    return emit.dumps(_envelope(args, out)) + "\n"


def cmd_boundary(args) -> str:
    grid = boundary.A_GRID
    table = []
    for a in grid:
        t, u = boundary.i_pair(1, a, args.area)
        table.append({"a": a, "m": boundary.i_pair_distance(a),
                      "m_direct": metric.m_equal_area(t, u)})
    if args.format == "csv":
        return emit.to_csv(["a", "m", "m_direct"], [[r["a"], r["m"], r["m_direct"]] for r in table])
    if args.format == "svg":
        return cmd_figure_angle_model(args)
    rep = boundary.verify_isometry_group(args.samples or 10_000, args.seed, args.area)
    return emit.dumps(_envelope(args, {"ipairs": table, "isometry": rep.to_json()})) + "\n"


def cmd_oracle(args) -> str:
    p, q = _points(args, 2)
    f, c = lipmap.best_lipschitz_map(p, q)
    pairs = args.samples or 10_000
    sampled = oracle.sampled_lipschitz(f, pairs, args.seed)
    search = oracle.pa_family_search(f.source, f.target, args.grid)
    em = math.exp(metric.m_equal_area(p, q))
    out = {"sampled": sampled, "certified": c, "search": search, "exp_m": em,
           "pairs": pairs, "seed": args.seed, "generator": oracle.GENERATOR, "grid": args.grid}
    if args.format == "csv":
        return emit.to_csv(list(out), [list(out.values())])
    return emit.dumps(_envelope(args, out)) + "\n"


# ---------------------------------------------------------------------------
# figures


def _angle_domain(svg: emit.Svg) -> None:
    half = math.pi / 2
    simplex = emit.angle_model_xy(np.eye(3) * math.pi)
    svg.polygon(simplex, stroke="#999999", dash="4,3")
    # the non-obtuse region; its sides are the boundary components
    punct = np.array([[half, half, 0.0], [0.0, half, half], [half, 0.0, half]])
    inner = emit.angle_model_xy(punct)
    svg.polygon(inner, stroke="black", fill="#f4f4f4", width=1.5)
    for i in range(3):
        mid = np.full(3, math.pi / 4)
        mid[i] = half
        svg.text(emit.angle_model_xy(mid) + np.array([0.0, -0.04]), f"B{i + 1}")
    for x in inner:
        svg.circle(x, r=4.0)


def cmd_figure_angle_model(args) -> str:
    svg = emit.Svg((0.0, 0.0), (1.0, math.sqrt(3.0) / 2.0))
    _angle_domain(svg)
    for i in (1, 2, 3):
        for a in (0.3, 0.6, 1.0):
            t, u = boundary.i_pair(i, a, args.area)
            seg = np.array([t.angles.as_array(), u.angles.as_array()])
            svg.polyline(emit.angle_model_xy(seg), stroke="#1f77b4", width=1.5)
            for x in seg:
                svg.circle(emit.angle_model_xy(x), r=2.5, fill="#1f77b4")
    return svg.render()


def cmd_figure_obtuse_gap(args) -> str:
    t, u = metric.obtuse_gap_example()
    cert = metric.obtuse_gap_certificate(t, u)
    svg = emit.fit(np.vstack((t.points, u.points, [[0.0, -1.0]])))
    svg.polygon(t.points, stroke="#1f77b4", width=2.0)
    svg.polygon(u.points, stroke="#d62728", width=2.0)
    svg.polyline([t.v1, t.foot(1)], stroke="#1f77b4")
    svg.polyline([u.v1, u.foot(1)], stroke="#d62728")
    svg.text(t.v1, "v1", anchor="start")
    svg.text(u.v1, "v1'", anchor="end")
    svg.text(t.v2, "v2", anchor="end")
    svg.text(t.v3, "v3", anchor="start")
    svg.text((3.5, -0.8), f"lower bound {cert.lower:.6f} &gt; exp(m) = {cert.exp_m:.6f}")
    return svg.render()


def cmd_figure(args) -> str:
    if args.format == "json":
        t, u = metric.obtuse_gap_example()
        c = metric.obtuse_gap_certificate(t, u)
        if args.which == "obtuse-gap":
            out = {"T": t.points.tolist(), "T_prime": u.points.tolist(),
                   "lower": c.lower, "exp_m": c.exp_m, "gap_proven": c.gap_proven}
        else:
            out = {"punctures": [[math.pi / 2, math.pi / 2, 0.0], [0.0, math.pi / 2, math.pi / 2],
                                 [math.pi / 2, 0.0, math.pi / 2]]}
        return emit.dumps(_envelope(args, out)) + "\n"
    if args.which == "angle-model":
        return cmd_figure_angle_model(args)
    return cmd_figure_obtuse_gap(args)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--area", type=float, default=0.5, help="area of the moduli space (default 0.5)")
    common.add_argument("--samples", type=int, default=None, help="sample / node / pair count")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "svg"), default=None,
                        help="output format (default json; svg for figure)")
    common.add_argument("--tolerance", type=float, default=None, dest="tolerance",
                        help="override the command's default tolerance")
    common.add_argument("--out", default=None, help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="trilip", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"trilip {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, triangles=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if triangles:
            sp.add_argument("triangles", nargs="*", help="triangle JSON or @file")
        sp.set_defaults(func=func)
        return sp

    add("dist", cmd_dist, "distance m and lower bound for two triangles")
    add("map", cmd_map, "best Lipschitz map between two non-obtuse triangles")
    add("geodesic", cmd_geodesic, "sampled angle-line geodesic and its additivity defect")
    add("flength", cmd_flength, "Finsler length of a path through waypoints")
    add("boundary", cmd_boundary, "i-pair table and isometry consistency report", triangles=False)
    sp = add("oracle", cmd_oracle, "sampled, certified and searched Lipschitz constants")
    sp.add_argument("--grid", type=int, default=8, help="largest Steiner lattice resolution")
    sp = add("figure", cmd_figure, "schematic SVG figures", triangles=False)
    sp.add_argument("which", choices=("angle-model", "obtuse-gap"))
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "svg" if args.command == "figure" else "json"
    args.tol = DEFAULT_TOLERANCE[args.command] if args.tolerance is None else args.tolerance
    try:
        text = args.func(args)
    except InvalidInput as exc:
        print(f"trilip: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except PreconditionFailed as exc:
        print(f"trilip: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"trilip: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        print(f"trilip: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
