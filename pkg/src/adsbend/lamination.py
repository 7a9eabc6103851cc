"""Polyhedral measured laminations: finitely many weighted complete geodesics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from .circle import (CirclePoint, Geodesic, HypPoint, MobiusMap,
                     as_number, between, common_perpendicular_length, cyclic_orientation,
                     cyclic_sorted, distance_to_geodesic, geodesic_relation, h2_inner,
                     is_exact, segment_side, visual_distance)
from .errors import (CoincidentPoints, EndpointCollision, ImageCrosses, InvalidLamination,
                     OrientationMismatch, UndefinedAtEndpoint)


@dataclass(frozen=True)
class Leaf:
    geodesic: Geodesic
    weight: object

    @property
    def a(self):
        return self.geodesic.a

    @property
    def b(self):
        return self.geodesic.b

    def scaled(self, c):
        return Leaf(self.geodesic, self.weight * c)


def _leaf(x) -> Leaf:
    if isinstance(x, Leaf):
        return x
    g, w = x
    if not isinstance(g, Geodesic):
        g = Geodesic(*g)
    return Leaf(g, as_number(w))


class PolyhedralLamination:
    """Finite set of pairwise non-crossing weighted geodesics.

    Shared endpoints between leaves are rejected unless allow_shared is set.
    Construction validates unless check=False.
    """

    def __init__(self, leaves=(), allow_shared=False, check=True):
        self.leaves = tuple(_leaf(x) for x in leaves)
        self.allow_shared = allow_shared
        if check:
            rep = validate(self)
            if not rep["valid"]:
                raise InvalidLamination("invalid lamination", report=_report_json(rep))

    @classmethod
    def from_turns(cls, triples, **kw):
        """Build from (a, b, w) with a, b in turns."""
        return cls([Leaf(Geodesic(CirclePoint.from_turns(a), CirclePoint.from_turns(b)),
                         as_number(w)) for a, b, w in triples], **kw)

    def __len__(self):
        return len(self.leaves)

    def __iter__(self):
        return iter(self.leaves)

    def scaled(self, c) -> "PolyhedralLamination":
        return PolyhedralLamination([l.scaled(c) for l in self.leaves],
                                    allow_shared=self.allow_shared, check=False)

    def endpoints(self):
        pts = []
        for l in self.leaves:
            for x in (l.a, l.b):
                if not any(x == y for y in pts):
                    pts.append(x)
        return cyclic_sorted(pts)

    def is_rational(self) -> bool:
        return all(is_exact(l.weight) and l.a.hint is not None and l.b.hint is not None
                   for l in self.leaves)

    def __repr__(self):
        return f"PolyhedralLamination({len(self.leaves)} leaves)"


def _report_json(rep):
    return {k: v for k, v in rep.items() if k != "valid"}


def validate(lam: PolyhedralLamination) -> dict:
    """Report crossing pairs, duplicates, shared endpoints and bad weights."""
    crossings, shared, duplicates, bad = [], [], [], []
    L = lam.leaves
    for i, l in enumerate(L):
        if not l.weight > 0:
            bad.append(i)
    for i, j in combinations(range(len(L)), 2):
        gi, gj = L[i].geodesic, L[j].geodesic
        if gi.same_support(gj):
            duplicates.append((i, j))
            continue
        rel = geodesic_relation(gi, gj)
        if rel == "Cross":
            crossings.append((i, j))
        elif rel == "SharedEndpoint" and not lam.allow_shared:
            shared.append((i, j))
    valid = not (crossings or shared or duplicates or bad)
    return {"valid": valid, "crossings": crossings, "shared": shared,
            "duplicates": duplicates, "nonpositive": bad}


def _total(ws):
    s = Fraction(0)
    for w in ws:
        s = s + w
    return s


def intersection_with_geodesic(lam: PolyhedralLamination, g: Geodesic):
    """Total weight of leaves crossing g."""
    ws = []
    for l in lam.leaves:
        for x in (g.a, g.b):
            if x == l.a or x == l.b:
                raise EndpointCollision("geodesic shares an endpoint with a leaf", point=str(x))
        if geodesic_relation(l.geodesic, g) == "Cross":
            ws.append(l.weight)
    return _total(ws)


def intersection_with_segment(lam: PolyhedralLamination, s):
    """Total weight of leaves strictly separating the two ends of s."""
    x, y = s
    if isinstance(x, CirclePoint) and isinstance(y, CirclePoint):
        return intersection_with_geodesic(lam, Geodesic(x, y))
    ws = []
    for l in lam.leaves:
        sides = {segment_side(l.geodesic, x), segment_side(l.geodesic, y)}
        if sides == {"Left", "Right"}:
            ws.append(l.weight)
    return _total(ws)


def truncate(lam: PolyhedralLamination, o: HypPoint, n) -> PolyhedralLamination:
    """Keep leaves meeting the open disk of radius n about o."""
    if not n > 0:
        raise ValueError("radius must be positive")
    keep = [l for l in lam.leaves if distance_to_geodesic(o, l.geodesic) < float(n)]
    return PolyhedralLamination(keep, allow_shared=lam.allow_shared, check=False)


def total_weight(lam_minus, lam_plus, o: HypPoint, n):
    """Lambda_n: each leaf meeting the disk crosses its boundary circle twice."""
    ws = []
    for lam in (lam_minus, lam_plus):
        for l in lam.leaves:
            if distance_to_geodesic(o, l.geodesic) < float(n):
                ws.append(2 * l.weight)
    return _total(ws)


def _apply(u, x):
    try:
        return u(x)
    except (KeyError, UndefinedAtEndpoint) as e:
        raise UndefinedAtEndpoint("map undefined at a leaf endpoint", point=str(x)) from e


def pushforward(u, lam: PolyhedralLamination) -> PolyhedralLamination:
    """Image lamination (u(a), u(b), w)."""
    pts = lam.endpoints()
    img = [_apply(u, x) for x in pts]
    if not isinstance(u, MobiusMap) and len(pts) >= 3:
        o = [cyclic_orientation(img[0], img[i], img[i + 1]) for i in range(1, len(img) - 1)]
        if any(s == 0 for s in o):
            raise ImageCrosses("map is not injective on leaf endpoints")
        if all(s < 0 for s in o):
            raise OrientationMismatch("map reverses cyclic order")
        if not all(s > 0 for s in o):
            leaves = [Leaf(Geodesic(_apply(u, l.a), _apply(u, l.b)), l.weight) for l in lam.leaves]
            rep = validate(PolyhedralLamination(leaves, allow_shared=lam.allow_shared, check=False))
            if rep["crossings"]:
                raise ImageCrosses("image leaves cross", pairs=rep["crossings"])
    leaves = [Leaf(Geodesic(_apply(u, l.a), _apply(u, l.b)), l.weight) for l in lam.leaves]
    out = PolyhedralLamination(leaves, allow_shared=lam.allow_shared, check=False)
    rep = validate(out)
    if rep["crossings"]:
        raise ImageCrosses("image leaves cross", pairs=rep["crossings"])
    return out


def _index_in(points, x):
    for i, y in enumerate(points):
        if y == x:
            return i
    raise KeyError(x)


def weak_fill_check(lam_minus, lam_plus) -> bool:
    """Every geodesic joining two distinct complementary gaps crosses a leaf."""
    leaves = list(lam_minus.leaves) + list(lam_plus.leaves)
    pts = []
    for l in leaves:
        for x in (l.a, l.b):
            if not any(x == y for y in pts):
                pts.append(x)
    pts = cyclic_sorted(pts)
    m = len(pts)
    if m < 3:
        return False
    idx = [(_index_in(pts, l.a), _index_in(pts, l.b)) for l in leaves]
    # gap i sits between pts[i] and pts[i+1]; the arc from gap i to gap j
    # contains pts[i+1..j]
    for i in range(m):
        for j in range(i + 1, m):
            inside = lambda v: i < v <= j
            if not any(inside(a) != inside(b) for a, b in idx):
                return False
    return True


def _in_closed_arc(x, a, b):
    return x == a or x == b or between(a, x, b)


def reciprocal_bound(lam_minus, lam_plus, a, b, c, d):
    """Box masses for the pairings [a,b]x[c,d] and [b,c]x[d,a]."""
    pts = (a, b, c, d)
    for i, j in combinations(range(4), 2):
        if pts[i] == pts[j]:
            raise CoincidentPoints("four distinct points required")

    def box(p, q, r, s):
        ws = []
        for lam in (lam_minus, lam_plus):
            for l in lam.leaves:
                if ((_in_closed_arc(l.a, p, q) and _in_closed_arc(l.b, r, s))
                        or (_in_closed_arc(l.b, p, q) and _in_closed_arc(l.a, r, s))):
                    ws.append(l.weight)
        return _total(ws)

    return box(a, b, c, d), box(b, c, d, a)


def _side_of(t: Leaf, l: Leaf):
    """'R' if l lies in the ccw arc (t.a, t.b), 'L' for (t.b, t.a), else None."""
    s = set()
    for x in (l.a, l.b):
        if x == t.a or x == t.b:
            continue
        s.add("R" if between(t.a, x, t.b) else "L")
    if len(s) == 1:
        return s.pop()
    return None


def _pair_distance(g1: Geodesic, g2: Geodesic) -> float:
    if geodesic_relation(g1, g2) == "SharedEndpoint":
        return 0.0
    return common_perpendicular_length(g1, g2)


def _window_max(pos_w, width=1.0):
    pos_w = sorted(pos_w)
    best, j, acc = 0.0, 0, 0.0
    for i in range(len(pos_w)):
        acc += pos_w[i][1]
        while pos_w[i][0] - pos_w[j][0] > width + 1e-12:
            acc -= pos_w[j][1]
            j += 1
        best = max(best, acc)
    return best


def _crossings_along(P, V, poles, weights):
    """Signed positions where the geodesic cosh(s) P + sinh(s) V meets each leaf."""
    out = []
    for n, w in zip(poles, weights):
        a, b = h2_inner(n, P), h2_inner(n, V)
        if abs(b) > abs(a):
            out.append((math.atanh(-a / b), w))
    return out


def boundedness_bounds(lam: PolyhedralLamination):
    """Lower and upper estimates of the max weight met by a unit segment."""
    L = lam.leaves
    if not L:
        return 0.0, 0.0
    poles = [l.geodesic.pole() for l in L]
    weights = [float(l.weight) for l in L]
    o = HypPoint.origin().x
    lower = max(weights)
    # sampled segments along perpendiculars to single leaves and to pairs
    frames = []
    for n in poles:
        P = o - h2_inner(o, n) * n
        frames.append((P / math.sqrt(-h2_inner(P, P)), n))
    for i, j in combinations(range(len(L)), 2):
        if geodesic_relation(L[i].geodesic, L[j].geodesic) != "Disjoint":
            continue
        ni, nj = poles[i], poles[j]
        c = h2_inner(ni, nj)
        P = nj - c * ni
        P = P / math.sqrt(-h2_inner(P, P))
        if P[2] < 0:
            P = -P
        frames.append((P, ni))
    for P, V in frames:
        lower = max(lower, _window_max(_crossings_along(P, V, poles, weights)))

    # chains: consecutive leaves adjacent (nothing between), each separating its neighbours
    n = len(L)
    dist = [[0.0] * n for _ in range(n)]
    for i, j in combinations(range(n), 2):
        dist[i][j] = dist[j][i] = _pair_distance(L[i].geodesic, L[j].geodesic)
    side = [[_side_of(L[t], L[i]) if i != t else None for i in range(n)] for t in range(n)]

    def separates(t, i, j):
        si, sj = side[t][i], side[t][j]
        return si is not None and sj is not None and si != sj

    adj = [[j for j in range(n) if j != i and side[i][j] is not None
            and not any(separates(t, i, j) for t in range(n) if t not in (i, j))]
           for i in range(n)]
    upper = max(weights)

    def extend(chain, length, total):
        nonlocal upper
        upper = max(upper, total)
        last = chain[-1]
        for j in adj[last]:
            if j in chain:
                continue
            if len(chain) >= 2 and not separates(last, chain[-2], j):
                continue
            d = length + dist[last][j]
            if d <= 1.0 + 1e-12:
                extend(chain + [j], d, total + weights[j])

    for i in range(n):
        extend([i], 0.0, weights[i])
    return lower, max(upper, lower)


def _leaf_cost(l1: Leaf, l2: Leaf) -> float:
    o = HypPoint.origin()
    d = lambda x, y: 0.0 if x == y else visual_distance(o, x, y)
    return min(d(l1.a, l2.a) + d(l1.b, l2.b), d(l1.a, l2.b) + d(l1.b, l2.a))


def lamination_distance(lam1, lam2) -> float:
    """Partial optimal transport between leaf masses; unmatched mass costs 1 per unit."""
    A, B = lam1.leaves, lam2.leaves
    n, m = len(A), len(B)
    wa = np.array([float(l.weight) for l in A])
    wb = np.array([float(l.weight) for l in B])
    if n == 0 or m == 0:
        return float(wa.sum() + wb.sum())
    C = np.array([[_leaf_cost(a, b) for b in B] for a in A])
    nv = n * m + n + m
    c = np.concatenate([C.ravel(), np.ones(n + m)])
    Aeq = np.zeros((n + m, nv))
    for i in range(n):
        Aeq[i, i * m:(i + 1) * m] = 1
        Aeq[i, n * m + i] = 1
    for j in range(m):
        Aeq[n + j, j:n * m:m] = 1
        Aeq[n + j, n * m + n + j] = 1
    res = linprog(c, A_eq=Aeq, b_eq=np.concatenate([wa, wb]), bounds=(0, None), method="highs")
    return max(0.0, float(res.fun))


def to_json(lam: PolyhedralLamination) -> dict:
    from .circle import turns_str
    return {"leaves": [{"a": turns_str(l.a), "b": turns_str(l.b),
                        "w": str(l.weight) if is_exact(l.weight) else repr(float(l.weight))}
                       for l in lam.leaves]}


def from_json(obj, allow_invalid=False, allow_shared=False) -> PolyhedralLamination:
    try:
        triples = [(d["a"], d["b"], d["w"]) for d in obj["leaves"]]
        lam = PolyhedralLamination.from_turns(triples, allow_shared=allow_shared, check=False)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise InvalidLamination(f"malformed lamination: {e}") from e
    rep = validate(lam)
    if rep["duplicates"]:
        raise InvalidLamination("duplicate leaves", report=_report_json(rep))
    if not allow_invalid and not rep["valid"]:
        raise InvalidLamination("invalid lamination", report=_report_json(rep))
    return lam
