"""Discrete earthquakes, earthquake operators, quasi-symmetry constants and the
boundary identities relating hull projections to bending laminations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .circle import (CirclePoint, DiscreteCircleMap, Geodesic, HypPoint, between,
                     cross_ratio, cyclic_sorted, mobius_from_triples, segment_side)
from .errors import OrientationViolation, TooFewPoints
from .lamination import Leaf, PolyhedralLamination, pushforward

SIDES = ("left", "right")


def circle_distance(a: CirclePoint, b: CirclePoint) -> float:
    """Angle at the disk center between two boundary points."""
    d = abs(a.turns_float() - b.turns_float()) % 1.0
    return 2 * math.pi * min(d, 1.0 - d)


def _rep(x: CirclePoint) -> np.ndarray:
    return x.vec()


def _translation(a: CirclePoint, b: CirclePoint, w: float) -> np.ndarray:
    A, B = _rep(a), _rep(b)
    M = np.array([[B[0], A[0]], [B[1], A[1]]])
    return M @ np.diag([math.exp(w / 2), math.exp(-w / 2)]) @ np.linalg.inv(M)


def default_base(lam: PolyhedralLamination):
    """Midpoint of the arc between the first two sorted endpoints (gap 0)."""
    pts = lam.endpoints()
    if not pts:
        return CirclePoint.from_turns(0.0)
    if len(pts) == 1:
        return CirclePoint.from_turns(pts[0].turns_float() + 0.5)
    a, b = pts[0].turns_float(), pts[1].turns_float()
    return CirclePoint.from_turns(a + ((b - a) % 1.0) / 2)


@dataclass
class EarthquakeMap:
    """Boundary map of the left or right earthquake along a polyhedral lamination,
    normalized to fix the complementary region containing `base`."""

    lamination: PolyhedralLamination
    side: str = "left"
    base: object = None

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError("side must be 'left' or 'right'")
        if self.base is None:
            self.base = default_base(self.lamination)
        if isinstance(self.base, CirclePoint):
            for l in self.lamination.leaves:
                if self.base == l.a or self.base == l.b:
                    raise ValueError("base point is a leaf endpoint")

    def _base_in_arc(self, l: Leaf) -> bool:
        if isinstance(self.base, HypPoint):
            return segment_side(l.geodesic, self.base) == "Right"
        return between(l.a, self.base, l.b)

    def separating(self, x: CirclePoint):
        """Leaves between the base region and x, oriented with the base on the left,
        ordered from the base outward."""
        sep = []
        for l in self.lamination.leaves:
            if x == l.a or x == l.b:
                continue
            bx = between(l.a, x, l.b)
            bb = self._base_in_arc(l)
            if bx != bb:
                a, b = (l.b, l.a) if bb else (l.a, l.b)
                sep.append((a, b, float(l.weight)))

        def inside(l2, l1):
            a, b = l1[0], l1[1]
            return all(t == a or t == b or between(a, t, b) for t in l2[:2])

        keyed = [(sum(inside(l, m) for m in sep if m is not l), i) for i, l in enumerate(sep)]
        return [sep[i] for _, i in sorted(keyed)]

    def __call__(self, x: CirclePoint) -> CirclePoint:
        sign = 1.0 if self.side == "left" else -1.0
        v = _rep(x)
        for a, b, w in reversed(self.separating(x)):
            v = _translation(a, b, sign * w) @ v
        return CirclePoint(float(v[0]), float(v[1]))


def earthquake_eval(E: EarthquakeMap, x: CirclePoint) -> CirclePoint:
    return E(x)


def _image_base(lam: PolyhedralLamination, u):
    """Base for E_{u_* lam}: the image of gap 0 of lam's endpoints."""
    pts = lam.endpoints()
    if len(pts) < 2:
        return None
    a, b = u(pts[0]), u(pts[1])
    ta, tb = a.turns_float(), b.turns_float()
    return CirclePoint.from_turns(ta + ((tb - ta) % 1.0) / 2)


def earthquake_operator(lam: PolyhedralLamination, u, side: str, samples=None) -> DiscreteCircleMap:
    """x -> E^side_{u_* lam}(u(x)) on the samples (default: the support of u)."""
    if samples is None:
        samples = list(u.support)
    img = pushforward(u, lam)
    E = EarthquakeMap(img, side, _image_base(lam, u))
    return DiscreteCircleMap(samples, [E(u(x)) for x in samples], check=False)


def flow_identity_check(lam: PolyhedralLamination, u, side: str, samples) -> float:
    """Max circle distance between E(lam) applied twice and E(2 lam), on samples."""
    pts = list(samples)
    for x in lam.endpoints():
        if not any(x == y for y in pts):
            pts.append(x)
    pts = cyclic_sorted(pts)
    if isinstance(u, DiscreteCircleMap):
        base = u
    else:
        base = DiscreteCircleMap(pts, [u(x) for x in pts], check=False)
    once = earthquake_operator(lam, base, side, pts)
    twice = earthquake_operator(lam, once, side, pts)
    double = earthquake_operator(lam.scaled(2), base, side, pts)
    return max((circle_distance(twice(x), double(x)) for x in samples), default=0.0)


@dataclass
class QSReport:
    eps: float
    K: float
    witness: tuple
    count: int
    exact: bool = True

    def to_json(self):
        return {"eps": self.eps, "K": self.K, "count": self.count, "exact": self.exact,
                "witness": [str(x) for x in self.witness] if self.witness else None}


def _quad_K(v, quad, eps):
    src = cross_ratio(*quad)
    src = float(src)
    if not (abs(src + 1) <= eps or abs(1 / src + 1) <= eps):
        return None
    img = float(cross_ratio(*(v(x) for x in quad)))
    ratio = img / src
    if ratio <= 0:
        raise OrientationViolation("image of a symmetric quadruple is not cyclically ordered",
                                   quadruple=[str(x) for x in quad])
    return max(ratio, 1 / ratio)


def qs_constant(v: DiscreteCircleMap, eps=0.5, cap=64, samples=20000, seed=0) -> QSReport:
    """Least K with image cross-ratios of eps-symmetric quadruples within a factor K
    of the source cross-ratio (K = max(|cr'|, 1/|cr'|) on exactly symmetric ones)."""
    F = list(v.support)
    n = len(F)
    if n < 4:
        raise TooFewPoints("need at least 4 support points")
    eps = float(eps)
    if n <= cap:
        quads = combinations(range(n), 4)
        exact = True
    else:
        rng = np.random.default_rng(seed)
        quads = (tuple(sorted(rng.choice(n, 4, replace=False).tolist())) for _ in range(samples))
        exact = False
    K, wit, count = 1.0, None, 0
    for idx in quads:
        quad = tuple(F[i] for i in idx)
        k = _quad_K(v, quad, eps)
        if k is None:
            continue
        count += 1
        if k > K:
            K, wit = k, quad
    return QSReport(eps, K, wit, count, exact)


def normalize_map(v: DiscreteCircleMap, pins=None) -> DiscreteCircleMap:
    """Post-compose with the Mobius map sending the images of three pins to 0, -1, inf.

    Default pins are the support points a = F[0], b = F[n//3], c = F[2n//3];
    v(a) -> 0, v(c) -> -1, v(b) -> inf, which matches orientations.
    """
    n = len(v)
    if n < 3:
        raise TooFewPoints("need at least 3 support points")
    if pins is None:
        pins = (0, n // 3, 2 * n // 3)
    a, b, c = (v.values[i] for i in pins)
    m = mobius_from_triples([a, c, b], [CirclePoint.from_real(0), CirclePoint.from_real(-1),
                                        CirclePoint.infinity()])
    return v.post(m)


def fit_residual(src, dst) -> float:
    """Max circle distance from dst of the Mobius map fitted on the first three pairs."""
    src, dst = list(src), list(dst)
    if len(src) < 4:
        return 0.0
    m = mobius_from_triples(src[:3], dst[:3])
    return max(circle_distance(m(x), y) for x, y in zip(src, dst))


def _vertex_push(lam_leaves, targets, scale=1):
    """Re-express developed leaves in the coordinates targets[i] of their vertices."""
    out = []
    for l, (i, j) in lam_leaves:
        out.append(Leaf(Geodesic(targets[i], targets[j]), l.weight * scale))
    return PolyhedralLamination(out, allow_shared=True, check=False)


def _quake_points(lam, side, pts):
    E = EarthquakeMap(lam, side)
    return [E(x) for x in pts]


def verify_mess_projections(P) -> dict:
    """Residuals of the four identities xi = Mobius o E(dev) on both boundaries.

    Calibrated assignment: future dev -> xiL is E^l, future dev -> xiR is E^r,
    past dev -> xiL is E^r, past dev -> xiR is E^l.
    """
    from .hull import develop_boundary
    out = {}
    for side, (sL, sR) in (("future", ("left", "right")), ("past", ("right", "left"))):
        B = develop_boundary(P, side)
        pos = B.positions
        for name, target, s in (("L", P.xiL, sL), ("R", P.xiR, sR)):
            img = _quake_points(B.lamination, s, pos)
            out[f"{side}_{name}"] = fit_residual(img, target)
            other = "right" if s == "left" else "left"
            out[f"control_{side}_{name}"] = fit_residual(_quake_points(B.lamination, other, pos), target)
    keys = ["future_L", "future_R", "past_L", "past_R"]
    out["residual"] = max(out[k] for k in keys)
    out["control"] = max(out["control_" + k] for k in keys)
    return out


def verify_mess22(P) -> dict:
    """xiR -> xiL against earthquakes along twice the bending laminations in xiR coordinates:
    left along the future one, right along the past one."""
    from .hull import develop_boundary
    out = {}
    for side, s in (("future", "left"), ("past", "right")):
        B = develop_boundary(P, side)
        pairs = list(zip(B.lamination.leaves, B.leaf_edges))
        lam = _vertex_push(pairs, P.xiR, 2)
        out[side] = fit_residual(_quake_points(lam, s, P.xiR), P.xiL)
        other = "right" if s == "left" else "left"
        out["control_" + side] = fit_residual(_quake_points(lam, other, P.xiR), P.xiL)
    out["residual"] = max(out["future"], out["past"])
    out["control"] = max(out["control_future"], out["control_past"])
    return out


@dataclass
class FixedPointResult:
    u_r: DiscreteCircleMap
    residual: float
    graph: object
    polyhedron: object
    solver_residual: float
    details: dict = field(default_factory=dict)


def fixed_point(lam_l, lam_r, o, n, k, delta=None, **realize_opts) -> FixedPointResult:
    """Approximate a map u with E^l(lam_l)(u) = E^r(lam_r)(u) at the vertices.

    Runs the graph pipeline on (lam_r/2, lam_l/2), realizes the graph, and
    evaluates both operators on u_r: vertex position -> xiR.
    """
    from fractions import Fraction

    from .eqgraph import approximate, graph_to_laminations
    from .errors import NotWeakFilling
    from .hull import convex_hull
    from .realize import realize
    from .lamination import truncate, weak_fill_check

    half = Fraction(1, 2)
    lm, lp = lam_r.scaled(half), lam_l.scaled(half)
    if not weak_fill_check(truncate(lm, o, n), truncate(lp, o, n)):
        raise NotWeakFilling("laminations do not jointly fill after truncation")
    approx = approximate(lm, lp, o, n, k, delta)
    g = approx.graph
    u, res = realize(g, **realize_opts)
    P = convex_hull(u)
    u_r = DiscreteCircleMap(list(g.positions), list(u.values), check=False)
    gm, gp = graph_to_laminations(g)
    left = earthquake_operator(gp.scaled(2), u_r, "left")
    right = earthquake_operator(gm.scaled(2), u_r, "right")
    xs = list(g.positions)
    r = fit_residual([left(x) for x in xs], [right(x) for x in xs])
    return FixedPointResult(u_r, r, g, P, res,
                            {"distance": approx.distance, "bound": approx.bound,
                             "added": len(approx.added)})
