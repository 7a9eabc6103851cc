"""Command line front end: `adsbend <group> <command> [options]`.

Results are written as JSON (sorted keys) to stdout or to --out.  Exit codes:
0 success, 1 validation failure, 2 solver failure.  Errors are reported as a
JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _threads():
    """Cap native thread pools from ADSBEND_THREADS (the package itself is single threaded)."""
    v = os.environ.get("ADSBEND_THREADS")
    if v is None:
        return None
    if not v.isdigit() or int(v) < 1:
        raise SystemExit(f"ADSBEND_THREADS must be a positive integer, got {v!r}")
    for name in THREAD_VARS:
        os.environ.setdefault(name, v)
    return int(v)


def _num(s):
    from .circle import as_number
    try:
        return as_number(s)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from e


def _center(args):
    from .circle import HypPoint
    if args.center is None:
        return HypPoint.origin()
    d, a = args.center
    return HypPoint.polar(float(d), float(a))


# ------------------------------------------------------------------ loaders

def _lam(path, **kw):
    from .io import read_json
    from .lamination import from_json
    return from_json(read_json(path), **kw)


def _graph(path):
    from .eqgraph import from_json
    from .io import read_json
    return from_json(read_json(path))


def _map(path):
    from .io import map_from_json, read_json
    return map_from_json(read_json(path))


def _poly(path):
    from .io import poly_from_json, read_json
    return poly_from_json(read_json(path))


# ------------------------------------------------------------------ lam

def cmd_lam_validate(args):
    from .errors import InvalidLamination
    from .lamination import _report_json, validate
    lam = _lam(args.lamination, allow_invalid=True, allow_shared=args.allow_shared)
    rep = validate(lam)
    if not rep["valid"]:
        raise InvalidLamination("invalid lamination", report=_report_json(rep))
    return {"valid": True, "leaves": len(lam)}, 0


def cmd_lam_truncate(args):
    from .lamination import to_json, truncate
    return to_json(truncate(_lam(args.lamination), _center(args), args.n)), 0


def cmd_lam_distance(args):
    from .lamination import lamination_distance
    return {"distance": lamination_distance(_lam(args.first), _lam(args.second))}, 0


def cmd_lam_fill(args):
    from .lamination import weak_fill_check
    return {"weak_fill": weak_fill_check(_lam(args.minus), _lam(args.plus))}, 0


# ------------------------------------------------------------------ graph

def cmd_graph_build(args):
    from .eqgraph import approximate, build_gamma0, to_json
    lm, lp = _lam(args.minus), _lam(args.plus)
    if args.n is not None:
        a = approximate(lm, lp, _center(args), args.n, args.k, args.delta, args.delta_split)
        out = to_json(a.graph)
        out["approximation"] = {"distance": a.distance, "bound": a.bound,
                                "added": len(a.added)}
        return out, 0
    g, binmap = build_gamma0(lm, lp, args.k, args.delta_split)
    out = to_json(g)
    out["binmap"] = [[kind, idx] for kind, idx in binmap]
    return out, 0


def cmd_graph_check(args):
    from .eqgraph import check_conditions
    rep = check_conditions(_graph(args.graph)).to_json()
    return rep, 0 if rep["passed"] else 1


def cmd_graph_fix(args):
    from .eqgraph import color_vertices, fix_condition4, to_json
    g = _graph(args.graph)
    if all(t == "untyped" for t in g.types):
        g, _ = color_vertices(g)
    g2, added = fix_condition4(g, args.delta)
    out = to_json(g2)
    out["added"] = [{"i": c.i, "j": c.j, "kind": c.kind, "w": str(c.w)} for c in added]
    return out, 0


def cmd_graph_split(args):
    from .eqgraph import split_vertices, to_json
    return to_json(split_vertices(_graph(args.graph), args.max_vertices)), 0


def cmd_graph_tolams(args):
    from .eqgraph import graph_to_laminations
    from .lamination import to_json
    gm, gp = graph_to_laminations(_graph(args.graph))
    return {"minus": to_json(gm), "plus": to_json(gp)}, 0


# ------------------------------------------------------------------ poly

def cmd_poly_hull(args):
    from .hull import width
    from .io import poly_to_json
    P = _poly(args.config)
    return poly_to_json(P, None if P.degenerate else width(P)), 0


def cmd_poly_angles(args):
    from .hull import dihedral_angles, vertex_angle_sums
    P = _poly(args.polyhedron)
    ang = dihedral_angles(P)
    return {"edges": [{"i": e[0], "j": e[1], "kind": P.edges[e].kind, "angle": float(a)}
                      for e, a in sorted(ang.items())],
            "vertex_sums": [float(s) for s in vertex_angle_sums(P)]}, 0


def cmd_poly_width(args):
    import math
    from .hull import width
    w = width(_poly(args.polyhedron))
    return {"width": w, "margin": math.pi / 2 - w}, 0


def cmd_poly_bend(args):
    from .hull import bending_laminations
    from .io import map_to_json
    from .lamination import to_json
    lm, lp, dm, dp = bending_laminations(_poly(args.polyhedron))
    return {"minus": to_json(lm), "plus": to_json(lp),
            "dev_minus": map_to_json(dm), "dev_plus": map_to_json(dp)}, 0


def cmd_poly_realize(args):
    from .hull import convex_hull, width
    from .io import poly_to_json
    from .realize import realize
    g = _graph(args.graph)
    u, res = realize(g, tol=args.tol, max_iter=args.max_iter, seed=args.seed)
    P = convex_hull(u)
    out = poly_to_json(P, width(P))
    out["residual"] = res
    return out, 0


def cmd_poly_diagnostics(args):
    from .realize import hull_diagnostics
    return hull_diagnostics(_poly(args.polyhedron), args.eps), 0


# ------------------------------------------------------------------ quake

def cmd_quake_eval(args):
    from .circle import CirclePoint, turns_str
    from .quake import EarthquakeMap
    base = CirclePoint.from_turns(args.base) if args.base is not None else None
    E = EarthquakeMap(_lam(args.lamination), args.side, base)
    pts = [CirclePoint.from_turns(t) for t in args.points]
    return {"points": [{"x": turns_str(x), "v": turns_str(E(x))} for x in pts]}, 0


def cmd_quake_op(args):
    from .io import map_to_json
    from .quake import earthquake_operator
    return map_to_json(earthquake_operator(_lam(args.lamination), _map(args.map), args.side)), 0


def cmd_quake_flowcheck(args):
    import numpy as np
    from .circle import CirclePoint, DiscreteCircleMap, MobiusMap
    from .quake import flow_identity_check
    lam = _lam(args.lamination)
    rng = np.random.default_rng(args.seed)
    samples = [CirclePoint.from_turns(float(t)) for t in rng.random(args.samples)]
    u = _map(args.map) if args.map else MobiusMap.identity()
    if isinstance(u, DiscreteCircleMap):
        samples = list(u.support)
    return {"deviation": flow_identity_check(lam, u, args.side, samples),
            "samples": len(samples)}, 0


def cmd_quake_fixpoint(args):
    from .io import map_to_json
    from .quake import fixed_point
    r = fixed_point(_lam(args.left), _lam(args.right), _center(args), args.n, args.k, args.delta,
                    tol=args.tol, max_iter=args.max_iter, seed=args.seed)
    out = map_to_json(r.u_r)
    out.update({"residual": r.residual, "solver_residual": r.solver_residual, **r.details})
    return out, 0


# ------------------------------------------------------------------ qs, mess

def cmd_qs_constant(args):
    from .quake import qs_constant
    return qs_constant(_map(args.map), args.eps).to_json(), 0


def cmd_qs_normalize(args):
    from .io import map_to_json
    from .quake import normalize_map
    return map_to_json(normalize_map(_map(args.map))), 0


def cmd_mess_check22(args):
    from .quake import verify_mess22
    return verify_mess22(_poly(args.polyhedron)), 0


def cmd_mess_check23(args):
    from .quake import verify_mess_projections
    return verify_mess_projections(_poly(args.polyhedron)), 0


# ------------------------------------------------------------------ plot

def cmd_plot_lam(args):
    from .plot import lamination_svg
    return lamination_svg([_lam(p, allow_shared=True) for p in args.laminations]), 0


def cmd_plot_circle(args):
    from .plot import circle_map_svg
    return circle_map_svg(_map(args.map)), 0


def cmd_plot_poly(args):
    from .plot import polyhedron_svg
    return polyhedron_svg(_poly(args.polyhedron)), 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adsbend", description=__doc__.splitlines()[0])
    groups = p.add_subparsers(dest="group", required=True)

    def cmd(group, name, func, help_):
        sp = group.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("-o", "--out", default=None, help="output file (default stdout)")
        return sp

    def center(sp):
        sp.add_argument("--center", nargs=2, type=float, metavar=("DIST", "ANGLE"),
                        help="truncation center in polar coordinates (default origin)")

    lam = groups.add_parser("lam", help="laminations").add_subparsers(dest="cmd", required=True)
    sp = cmd(lam, "validate", cmd_lam_validate, "check leaves for crossings and duplicates")
    sp.add_argument("lamination")
    sp.add_argument("--allow-shared", action="store_true")
    sp = cmd(lam, "truncate", cmd_lam_truncate, "keep leaves meeting a disk")
    sp.add_argument("lamination")
    sp.add_argument("--n", type=_num, required=True, help="disk radius")
    center(sp)
    sp = cmd(lam, "distance", cmd_lam_distance, "transport distance between laminations")
    sp.add_argument("first")
    sp.add_argument("second")
    sp = cmd(lam, "fill", cmd_lam_fill, "weak filling check for a pair")
    sp.add_argument("minus")
    sp.add_argument("plus")

    gr = groups.add_parser("graph", help="equator graphs").add_subparsers(dest="cmd", required=True)
    sp = cmd(gr, "build", cmd_graph_build, "leaf-split graph, or full pipeline with --n")
    sp.add_argument("minus")
    sp.add_argument("plus")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=_num, default=None, help="truncation radius; runs the full pipeline")
    sp.add_argument("--delta", type=_num, default=None)
    sp.add_argument("--delta-split", type=_num, default=None)
    center(sp)
    sp = cmd(gr, "check", cmd_graph_check, "check realization conditions (1)-(4)")
    sp.add_argument("graph")
    sp = cmd(gr, "fix", cmd_graph_fix, "add small chords across empty gap pairs")
    sp.add_argument("graph")
    sp.add_argument("--delta", type=_num, default=Fraction(1, 100))
    sp = cmd(gr, "split", cmd_graph_split, "split vertices until condition (4) holds")
    sp.add_argument("graph")
    sp.add_argument("--max-vertices", type=int, default=4000)
    sp = cmd(gr, "tolams", cmd_graph_tolams, "laminations carried by the chords")
    sp.add_argument("graph")

    po = groups.add_parser("poly", help="ideal polyhedra").add_subparsers(dest="cmd", required=True)
    sp = cmd(po, "hull", cmd_poly_hull, "convex hull of a map or vertex list")
    sp.add_argument("config")
    for name, func, help_ in (("angles", cmd_poly_angles, "signed dihedral angles"),
                              ("width", cmd_poly_width, "max timelike distance across the hull"),
                              ("bend", cmd_poly_bend, "developed bending laminations"),
                              ("diagnostics", cmd_poly_diagnostics, "width, bounds, K constants")):
        sp = cmd(po, name, func, help_)
        sp.add_argument("polyhedron")
        if name == "diagnostics":
            sp.add_argument("--eps", type=_num, default=Fraction(1, 2))
    sp = cmd(po, "realize", cmd_poly_realize, "solve for a polyhedron with the graph's angles")
    sp.add_argument("graph")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", type=int, default=500)
    sp.add_argument("--seed", type=int, default=0)

    qk = groups.add_parser("quake", help="earthquakes").add_subparsers(dest="cmd", required=True)
    sp = cmd(qk, "eval", cmd_quake_eval, "evaluate an earthquake at points (turns)")
    sp.add_argument("lamination")
    sp.add_argument("points", nargs="+")
    sp.add_argument("--side", choices=("left", "right"), default="left")
    sp.add_argument("--base", default=None, help="base point in turns")
    sp = cmd(qk, "op", cmd_quake_op, "apply the earthquake operator to a map")
    sp.add_argument("lamination")
    sp.add_argument("map")
    sp.add_argument("--side", choices=("left", "right"), default="left")
    sp = cmd(qk, "flowcheck", cmd_quake_flowcheck, "check E(l)E(l) = E(2l)")
    sp.add_argument("lamination")
    sp.add_argument("--map", default=None)
    sp.add_argument("--side", choices=("left", "right"), default="left")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp = cmd(qk, "fixpoint", cmd_quake_fixpoint, "desk-scale solution of El(u) = Er(u)")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--k", type=int, default=4)
    sp.add_argument("--n", type=_num, default=100)
    sp.add_argument("--delta", type=_num, default=None)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", type=int, default=500)
    sp.add_argument("--seed", type=int, default=0)
    center(sp)

    qs = groups.add_parser("qs", help="quasi-symmetry").add_subparsers(dest="cmd", required=True)
    sp = cmd(qs, "constant", cmd_qs_constant, "K over eps-symmetric quadruples")
    sp.add_argument("map")
    sp.add_argument("--eps", type=_num, default=Fraction(1, 2))
    sp = cmd(qs, "normalize", cmd_qs_normalize, "post-compose so three pins go to 0, -1, inf")
    sp.add_argument("map")

    me = groups.add_parser("mess", help="projection identities").add_subparsers(dest="cmd", required=True)
    for name, func in (("check22", cmd_mess_check22), ("check23", cmd_mess_check23)):
        sp = cmd(me, name, func, "residuals after three-point Mobius fits")
        sp.add_argument("polyhedron")

    pl = groups.add_parser("plot", help="SVG figures").add_subparsers(dest="cmd", required=True)
    sp = cmd(pl, "lam", cmd_plot_lam, "laminations in the disk")
    sp.add_argument("laminations", nargs="+")
    sp = cmd(pl, "circle", cmd_plot_circle, "circle map on the boundary torus")
    sp.add_argument("map")
    sp = cmd(pl, "poly", cmd_plot_poly, "hull wireframe")
    sp.add_argument("polyhedron")
    return p


def _error(e, code):
    payload = e.to_dict() if hasattr(e, "to_dict") else {"error": type(e).__name__, "message": str(e)}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    _threads()
    from .errors import SolverError, ValidationError
    from .io import dumps, write_text

    args = build_parser().parse_args(argv)
    try:
        result, code = args.func(args)
    except SolverError as e:
        return _error(e, 2)
    except (ValidationError, OSError) as e:
        return _error(e, 1)
    text = result if isinstance(result, str) else dumps(result)
    write_text(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
