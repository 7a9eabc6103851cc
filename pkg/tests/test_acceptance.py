"""Acceptance suite: thirteen end-to-end checks, each reported as one PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
`python tests/test_acceptance.py`.
"""
import math
import time
from fractions import Fraction

import numpy as np

from adsbend.ads import standard_rhombus
from adsbend.circle import (CirclePoint, DiscreteCircleMap, Geodesic, HypPoint,
                            common_perpendicular_length, cross_ratio, mobius_from_triples)
from adsbend.eqgraph import approximate, check_conditions
from adsbend.hull import bending_laminations, convex_hull, dihedral_angles, vertex_angle_sums, width
from adsbend.lamination import PolyhedralLamination, weak_fill_check
from adsbend.quake import (EarthquakeMap, fixed_point, flow_identity_check, normalize_map,
                           qs_constant, verify_mess22, verify_mess_projections)
from adsbend.realize import realize
from corpus import corpus, cross_ratio_gap, square_graph

T = CirclePoint.from_turns
R = CirclePoint.from_real
O = HypPoint.origin()
SQ_MINUS = PolyhedralLamination.from_turns([("1/4", "3/4", 1)])
SQ_PLUS = PolyhedralLamination.from_turns([("0", "1/2", 1)])

RESULTS = {}
_corpus_seconds = []


def record(num, title, ok, detail, seconds, limit):
    ok = bool(ok) and seconds < limit
    RESULTS[num] = f"AC{num:02d} {'PASS' if ok else 'FAIL'}  {title}: {detail} ({seconds:.2f} s, limit {limit:g} s)"
    print(RESULTS[num])
    assert ok, RESULTS[num]


def timed(f, *a, **kw):
    t = time.perf_counter()
    out = f(*a, **kw)
    return out, time.perf_counter() - t


def shared_corpus():
    if not _corpus_seconds:
        c, s = timed(corpus)
        _corpus_seconds.append(s)
        return c
    return corpus()


def random_turns(rng, n):
    """n distinct sorted rational turns."""
    while True:
        ts = sorted({Fraction(int(p), int(q)) for p, q in
                     zip(rng.integers(0, 997, n), rng.integers(997, 1000, n))})
        if len(ts) == n:
            return ts


# ---------------------------------------------------------------- criteria

def test_ac01_symmetric_cross_ratio():
    def run():
        exact = cross_ratio(R(-1), R(0), R(1), CirclePoint.infinity())
        rng = np.random.default_rng(1)
        worst = 0.0
        for _ in range(100):
            quad = [T(float(t)) for t in rng.random(4)]
            m = mobius_from_triples([T(0), T(0.25), T(0.5)], [T(float(t)) for t in np.sort(rng.random(3))])
            a = float(cross_ratio(*quad))
            b = float(cross_ratio(*(m(x) for x in quad)))
            worst = max(worst, abs(a - b) / abs(a))
        return exact, worst
    (exact, worst), s = timed(run)
    ok = exact == -1 and isinstance(exact, (int, Fraction)) and worst < 1e-10
    record(1, "symmetric cross-ratio", ok, f"cr(-1,0,1,inf) = {exact}, max rel err {worst:.1e}", s, 1)


def test_ac02_perpendicular_identity():
    def run():
        rng = np.random.default_rng(2)
        worst = 0.0
        for _ in range(100):
            a, b, c, d = (T(t) for t in random_turns(rng, 4))
            h = common_perpendicular_length(Geodesic(a, b), Geodesic(c, d))
            k = common_perpendicular_length(Geodesic(b, c), Geodesic(d, a))
            worst = max(worst, abs(math.sinh(h / 2) * math.sinh(k / 2) - 1))
        return worst
    worst, s = timed(run)
    record(2, "perpendicular identity", worst < 1e-9, f"max |sinh sinh - 1| {worst:.1e}", s, 1)


def test_ac03_graph_pipeline():
    a, s = timed(approximate, SQ_MINUS, SQ_PLUS, O, 10, 4)
    rep = check_conditions(a.graph)
    exact = all(isinstance(x, (int, Fraction)) for x in list(a.graph.equator) + list(rep.slacks.values()))
    sums_zero = all(v == 0 for v in rep.vertex_sums)
    slack_min = min(rep.slacks.values())
    ok = rep.passed and exact and sums_zero and slack_min > 0
    record(3, "graph pipeline", ok, f"passed={rep.passed}, exact={exact}, min slack {slack_min}", s, 1)


def test_ac04_rhombus_width():
    w, s = timed(lambda: width(convex_hull(standard_rhombus()["points"])))
    record(4, "rhombus width", abs(w - math.pi / 2) < 1e-6, f"|w - pi/2| = {abs(w - math.pi / 2):.1e}", s, 10)


def test_ac05_realization_round_trip():
    g = square_graph(1)
    (u, res), s = timed(realize, g)
    P = convex_hull(u)
    ang = dihedral_angles(P)
    target = {(c.i, c.j) if c.i < c.j else (c.j, c.i): c.w for c in g.chords}
    for i, w in enumerate(g.equator):
        target[tuple(sorted((i, (i + 1) % g.k)))] = w
    angle_err = max(abs(ang[e] - float(w)) for e, w in target.items())
    sum_err = max(abs(x) for x in vertex_angle_sums(P))
    ok = set(ang) == set(target) and res < 1e-8 and angle_err < 1e-7 and sum_err < 1e-7
    record(5, "realization round trip", ok,
           f"residual {res:.1e}, angle err {angle_err:.1e}, vertex sums {sum_err:.1e}", s, 30)


def test_ac06_width_bound():
    c = shared_corpus()
    widths, s = timed(lambda: [width(P) for _, _, _, P, _ in c])
    sizes = sorted({P.n for _, _, _, P, _ in c})
    margin = math.pi / 2 - max(widths)
    ok = len(c) >= 10 and sizes[0] == 4 and sizes[-1] == 12 and margin > 1e-4
    record(6, "width bound", ok, f"{len(c)} polyhedra, sizes {sizes[0]}-{sizes[-1]}, "
           f"min margin {margin:.3f}", s + _corpus_seconds[0], 300)


def test_ac07_mess22():
    c = shared_corpus()
    reps, s = timed(lambda: [verify_mess22(P) for _, _, _, P, _ in c])
    worst = max(r["residual"] for r in reps)
    control = max(r["control"] for r in reps)
    record(7, "xiR to xiL earthquake identity", worst < 1e-6 and control > 1e-2,
           f"max residual {worst:.1e}, opposite-side control {control:.2f}", s, 60)


def test_ac08_mess_projections():
    c = shared_corpus()
    reps, s = timed(lambda: [verify_mess_projections(P) for _, _, _, P, _ in c])
    keys = ("future_L", "future_R", "past_L", "past_R")
    worst = max(r[k] for r in reps for k in keys)
    record(8, "projection identities", worst < 1e-6, f"max residual over 4 identities {worst:.1e}", s, 60)


FLOW_LAMS = [
    PolyhedralLamination.from_turns([("0", "1/2", "3/2")]),
    PolyhedralLamination.from_turns([("1/16", "7/16", 1), ("9/16", "15/16", 2)]),
    PolyhedralLamination.from_turns([("1/8", "7/8", 1), ("1/4", "3/4", "1/2"), ("3/8", "5/8", 2)]),
    PolyhedralLamination.from_turns([("0", "1/3", 1), ("1/3", "2/3", 1), ("2/3", "0", "1/2")],
                                    allow_shared=True),
    PolyhedralLamination.from_turns([("0", "1/2", 1), ("1/8", "3/8", 1)]),
]


def test_ac09_flow_identity():
    def run():
        pts = [T(float(t)) for t in np.random.default_rng(9).random(100)]
        return max(flow_identity_check(lam, lambda x: x, side, pts)
                   for lam in FLOW_LAMS for side in ("left", "right"))
    worst, s = timed(run)
    record(9, "earthquake flow identity", worst < 1e-9, f"max deviation {worst:.1e}", s, 10)


def test_ac10_fixed_point():
    lam_l = PolyhedralLamination.from_turns([("0", "1/2", 2)])
    lam_r = PolyhedralLamination.from_turns([("1/4", "3/4", 2)])
    r, s = timed(fixed_point, lam_l, lam_r, O, 10, 4)
    record(10, "fixed point on square diagonals", r.residual < 1e-6,
           f"vertex deviation {r.residual:.1e}", s, 120)


def test_ac11_bending_round_trip():
    c = shared_corpus()

    def run():
        gaps = []
        for _, P0, g, P, res in c[1:]:
            # the rebuilt graph carries the source polyhedron's measured bending
            lm, lp = bending_laminations(P0)[:2]
            assert len(lm) + len(lp) == len(g.chords)
            gaps.append(max(cross_ratio_gap(P0.xiL, P.xiL), cross_ratio_gap(P0.xiR, P.xiR)))
        return max(gaps), len(gaps)
    (gap, count), s = timed(run)
    record(11, "bending round trip", gap < 1e-6,
           f"{count} polyhedra, max cross-ratio gap {gap:.1e}", s, 120)


def test_ac12_quasi_symmetry():
    def run():
        F = [R(-1), R(0), R(1), CirclePoint.infinity()]
        k2 = qs_constant(DiscreteCircleMap(F, [R(-1), R(0), R(2), CirclePoint.infinity()])).K
        pts = [T(Fraction(i, 12)) for i in range(12)]
        m = mobius_from_triples([T(0), T(0.25), T(0.5)], [T(0.1), T(0.2), T(0.7)])
        k1 = qs_constant(DiscreteCircleMap(pts, [m(x) for x in pts])).K
        lam = PolyhedralLamination.from_turns([("1/24", "13/24", 1)])
        E = EarthquakeMap(lam, "left")
        v = DiscreteCircleMap(pts, [E(x) for x in pts])
        kv, kn = qs_constant(v).K, qs_constant(normalize_map(v)).K
        return k1, k2, kv, kn
    (k1, k2, kv, kn), s = timed(run)
    ok = abs(k1 - 1) < 1e-12 and k2 == 2 and abs(kv - kn) < 1e-9 and kv > 1
    record(12, "quasi-symmetry constants", ok,
           f"Mobius K-1 = {k1 - 1:.1e}, worked K = {k2:g}, normalize shift {abs(kv - kn):.1e}", s, 10)


def test_ac13_weak_fill():
    c = shared_corpus()
    flags, s = timed(lambda: [weak_fill_check(*bending_laminations(P)[:2]) for _, _, _, P, _ in c])
    record(13, "weak filling of bending pairs", all(flags), f"{sum(flags)}/{len(flags)} fill", s, 10)


if __name__ == "__main__":
    import sys
    failed = 0
    for name, f in sorted(globals().items()):
        if name.startswith("test_ac"):
            try:
                f()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
