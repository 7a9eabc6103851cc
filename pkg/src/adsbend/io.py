"""JSON formats for circle maps and polyhedra, and small file helpers."""
from __future__ import annotations

import json
import math
import sys

from .circle import CirclePoint, DiscreteCircleMap, is_exact, turns_str
from .errors import ValidationError


def num_str(x) -> str:
    return str(x) if is_exact(x) else repr(float(x))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: not valid JSON ({e.msg})", line=e.lineno) from e


def write_text(text: str, path=None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def map_to_json(u: DiscreteCircleMap) -> dict:
    return {"points": [{"x": turns_str(x), "v": turns_str(v)} for x, v in u.items()]}


def map_from_json(obj, check=True) -> DiscreteCircleMap:
    try:
        pts = obj["points"]
        xs = [CirclePoint.from_turns(p["x"]) for p in pts]
        vs = [CirclePoint.from_turns(p["v"]) for p in pts]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"malformed map: {e}") from e
    return DiscreteCircleMap(xs, vs, check=check)


def poly_to_json(P, width=None) -> dict:
    from .hull import dihedral_angles

    ang = dihedral_angles(P) if not P.degenerate else {}
    edges = []
    for e, d in sorted(P.edges.items()):
        a = ang.get(e, d.angle)
        edges.append({"i": e[0], "j": e[1], "kind": d.kind,
                      "angle": None if a is None else float(a)})
    faces = [{"verts": list(f.verts), "side": f.side, "lightlike": bool(f.lightlike)}
             for f in P.faces]
    out = {"vertices": [{"xiL": turns_str(a), "xiR": turns_str(b)} for a, b in zip(P.xiL, P.xiR)],
           "faces": faces, "edges": edges, "flat": bool(P.flat)}
    if width is not None:
        out["width"] = float(width) if not math.isnan(width) else None
    return out


def config_from_json(obj):
    """(xiL, xiR) lists from a polyhedron or map document."""
    try:
        if "vertices" in obj:
            vs = obj["vertices"]
            return ([CirclePoint.from_turns(v["xiL"]) for v in vs],
                    [CirclePoint.from_turns(v["xiR"]) for v in vs])
        u = map_from_json(obj, check=False)
        return list(u.support), list(u.values)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"malformed configuration: {e}") from e


def poly_from_json(obj, **hull_opts):
    """Rebuild the hull from the vertex list; faces and angles are recomputed."""
    from .ads import ein_from_lr
    from .hull import convex_hull

    xiL, xiR = config_from_json(obj)
    if "vertices" in obj:
        return convex_hull([ein_from_lr(a, b) for a, b in zip(xiL, xiR)], **hull_opts)
    return convex_hull(DiscreteCircleMap(xiL, xiR), **hull_opts)
