"""Static SVG figures: laminations in the Poincare disk, circle maps on the
boundary torus, and hull wireframes in the affine chart."""
from __future__ import annotations

import math

import numpy as np

SIZE = 400
COLORS = ("#c0392b", "#2471a3", "#1e8449", "#7d3c98")
KIND_COLORS = {"equator": "#555555", "bend_future": "#c0392b", "bend_past": "#2471a3"}


def _svg(body, size=SIZE):
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}">\n' + "\n".join(body) + "\n</svg>\n")


def _disk_xy(t, r, c):
    a = 2 * math.pi * t
    return c + r * math.cos(a), c - r * math.sin(a)


def _leaf_path(ta, tb, r, c):
    """Arc orthogonal to the boundary circle between two boundary points."""
    x1, y1 = _disk_xy(ta, r, c)
    x2, y2 = _disk_xy(tb, r, c)
    d = (tb - ta) % 1.0
    if abs(d - 0.5) < 1e-9:
        return f"M {x1:.3f} {y1:.3f} L {x2:.3f} {y2:.3f}"
    # radius of the orthogonal circle, and sweep so the arc bulges inward
    half = math.pi * min(d, 1 - d)
    rad = r * math.tan(half)
    sweep = 1 if d < 0.5 else 0
    return f"M {x1:.3f} {y1:.3f} A {rad:.3f} {rad:.3f} 0 0 {sweep} {x2:.3f} {y2:.3f}"


def lamination_svg(lams, size=SIZE) -> str:
    """Each lamination in its own color; stroke width grows with weight."""
    c, r = size / 2, size / 2 - 10
    body = [f'<circle cx="{c}" cy="{c}" r="{r}" fill="none" stroke="black"/>']
    for k, lam in enumerate(lams):
        col = COLORS[k % len(COLORS)]
        for l in lam.leaves:
            w = 0.8 + 1.5 * math.log1p(float(l.weight))
            body.append(f'<path d="{_leaf_path(l.a.turns_float(), l.b.turns_float(), r, c)}" '
                        f'fill="none" stroke="{col}" stroke-width="{w:.2f}"/>')
    return _svg(body, size)


def circle_map_svg(u, size=SIZE) -> str:
    """Graph of xiL -> xiR on the torus [0,1)^2 with left and right rulings through each point."""
    m = 20
    s = size - 2 * m
    X = lambda t: m + s * t
    Y = lambda t: size - m - s * t
    body = [f'<rect x="{m}" y="{m}" width="{s}" height="{s}" fill="none" stroke="black"/>']
    pts = [(x.turns_float(), v.turns_float()) for x, v in u.items()]
    for a, b in pts:
        body.append(f'<line x1="{X(a):.2f}" y1="{Y(0):.2f}" x2="{X(a):.2f}" y2="{Y(1):.2f}" '
                    f'stroke="{COLORS[0]}" stroke-opacity="0.3"/>')
        body.append(f'<line x1="{X(0):.2f}" y1="{Y(b):.2f}" x2="{X(1):.2f}" y2="{Y(b):.2f}" '
                    f'stroke="{COLORS[1]}" stroke-opacity="0.3"/>')
    for a, b in pts:
        body.append(f'<circle cx="{X(a):.2f}" cy="{Y(b):.2f}" r="3" fill="black"/>')
    return _svg(body, size)


def polyhedron_svg(P, size=SIZE, elev=0.5, azim=0.7) -> str:
    """Orthographic wireframe of the hull in its affine chart coordinates."""
    C = np.asarray(P.coords, dtype=float)
    ca, sa, ce, se = math.cos(azim), math.sin(azim), math.cos(elev), math.sin(elev)
    R = np.array([[ca, -sa, 0], [sa * se, ca * se, ce]])
    xy = C @ R.T
    span = float(np.max(np.abs(xy))) or 1.0
    m = size / 2
    k = (size / 2 - 15) / span
    pt = lambda i: (m + k * xy[i, 0], m - k * xy[i, 1])
    body = []
    for e, d in sorted(P.edges.items()):
        (x1, y1), (x2, y2) = pt(e[0]), pt(e[1])
        body.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                    f'stroke="{KIND_COLORS.get(d.kind, "black")}" stroke-width="1.5"/>')
    for i in range(P.n):
        x, y = pt(i)
        body.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="black"/>')
    return _svg(body, size)
