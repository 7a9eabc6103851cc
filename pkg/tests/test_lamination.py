import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from adsbend.circle import (CirclePoint, DiscreteCircleMap, Geodesic, HypPoint, distance_to_geodesic,
                            mobius_from_triples)
from adsbend.errors import EndpointCollision, InvalidLamination, OrientationMismatch
from adsbend.lamination import (PolyhedralLamination, boundedness_bounds, from_json,
                                intersection_with_geodesic, intersection_with_segment,
                                lamination_distance, pushforward, reciprocal_bound, to_json,
                                total_weight, truncate, validate, weak_fill_check)
from strategies import cyclic_points

R = CirclePoint.from_real
T = CirclePoint.from_turns
INF = CirclePoint.infinity()
O = HypPoint.origin()


def lam(*leaves, **kw):
    return PolyhedralLamination([((a, b), w) for a, b, w in leaves], **kw)


SQUARE_MINUS = PolyhedralLamination.from_turns([("1/4", "3/4", 1)])
SQUARE_PLUS = PolyhedralLamination.from_turns([("0", "1/2", 1)])


def test_validate():
    assert validate(lam((R(0), INF, 1)))["valid"]
    rep = validate(lam((R(0), INF, 1), (R(-1), R(1), 1), check=False))
    assert not rep["valid"] and rep["crossings"] == [(0, 1)]
    assert validate(lam((R(0), R(3), 1), (R(1), R(2), 1)))["valid"]
    with pytest.raises(InvalidLamination):
        lam((R(0), INF, 1), (R(-1), R(1), 1))


def test_intersection_with_geodesic():
    l1 = lam((R(0), INF, 2))
    assert intersection_with_geodesic(l1, Geodesic(R(-1), R(1))) == 2
    assert intersection_with_geodesic(l1, Geodesic(R(1), R(2))) == 0
    # [DERIVED] 2 lies inside both (0,4) and (1,3) while 5 lies outside both
    l2 = lam((R(0), R(4), 1), (R(1), R(3), Fraction(1, 2)))
    assert intersection_with_geodesic(l2, Geodesic(R(2), R(5))) == Fraction(3, 2)
    with pytest.raises(EndpointCollision):
        intersection_with_geodesic(l1, Geodesic(R(0), R(1)))


def _stack(k, gap):
    # leaves orthogonal to the axis (0, inf) at heights e^(gap*j)
    leaves = []
    for j in range(k):
        r = math.exp(gap * j)
        leaves.append(((R(-r), R(r)), 1))
    return PolyhedralLamination(leaves)


def test_intersection_with_segment():
    l1 = lam((R(0), INF, Fraction(3)))
    a, b = HypPoint.polar(0.5, 0.1), HypPoint.polar(0.5, 0.2)
    assert intersection_with_segment(l1, (a, b)) == 0
    left, right = HypPoint.polar(0.5, math.pi), HypPoint.polar(0.5, 0.0)
    # the axis (0, inf) is the vertical diameter of the disk
    assert intersection_with_segment(lam((T(Fraction(1, 4)), T(Fraction(3, 4)), 3)), (left, right)) == 3
    s = _stack(4, 0.3)
    assert intersection_with_segment(s, (R(0), INF)) == 4


def test_truncate():
    through = lam((T(0), T(Fraction(1, 2)), 1))
    assert len(truncate(through, O, 0.01)) == 1
    far = PolyhedralLamination([((T(-0.1), T(0.1)), 1)])
    d = distance_to_geodesic(O, far.leaves[0].geodesic)
    assert len(truncate(far, O, d / 2)) == 0
    assert len(truncate(far, O, d)) == 0          # open disk
    assert len(truncate(far, O, d * 1.01)) == 1


def test_total_weight():
    assert total_weight(SQUARE_MINUS, SQUARE_PLUS, O, 1) == 4
    assert total_weight(PolyhedralLamination(), PolyhedralLamination(), O, 1) == 0
    one = PolyhedralLamination.from_turns([("0", "1/2", "3/2")])
    assert total_weight(one, PolyhedralLamination(), O, 1) == 3


def test_pushforward():
    m = mobius_from_triples([R(0), R(1), INF], [R(1), R(2), R(-1)])
    img = pushforward(m, SQUARE_PLUS)
    assert img.leaves[0].a == m(T(0)) and img.leaves[0].weight == 1
    pts = [T(0), T(Fraction(1, 4)), T(Fraction(1, 2)), T(Fraction(3, 4))]
    ident = DiscreteCircleMap(pts, pts)
    assert pushforward(ident, SQUARE_PLUS).leaves == SQUARE_PLUS.leaves

    class Flip:
        def __call__(self, x):
            return CirclePoint(-x.p, x.q) if x.exact else CirclePoint(-float(x.p), float(x.q))
    three = lam((T(0), T(Fraction(1, 4)), 1), (T(Fraction(1, 2)), T(Fraction(5, 8)), 1))
    with pytest.raises(OrientationMismatch):
        pushforward(Flip(), three)


def test_weak_fill():
    assert weak_fill_check(SQUARE_MINUS, SQUARE_PLUS)
    assert not weak_fill_check(PolyhedralLamination(), SQUARE_PLUS)
    par = PolyhedralLamination.from_turns([("0", "1/8", 1), ("1/4", "3/8", 1)])
    assert not weak_fill_check(PolyhedralLamination(), par)


def test_reciprocal_bound():
    # [DERIVED] corners (0,1/4,1/2,3/4): the diagonals each join [0,1/4] to [1/2,3/4]
    # and [1/4,1/2] to [3/4,0] through their closed endpoints
    corners = [T(Fraction(k, 4)) for k in range(4)]
    assert reciprocal_bound(SQUARE_MINUS, SQUARE_PLUS, *corners) == (2, 2)
    e = PolyhedralLamination()
    assert reciprocal_bound(e, e, *corners) == (0, 0)


@given(cyclic_points(4), cyclic_points(3))
def test_reciprocal_bound_equivariant(quad, tri):
    m = mobius_from_triples([T(0), T(Fraction(1, 4)), T(Fraction(1, 2))], tri)
    lm = PolyhedralLamination.from_turns([("1/8", "5/8", 1)])
    lp = PolyhedralLamination.from_turns([("3/8", "7/8", 2)])
    a = reciprocal_bound(lm, lp, *quad)
    b = reciprocal_bound(pushforward(m, lm), pushforward(m, lp), *(m(x) for x in quad))
    assert a == b


def test_boundedness_bounds():
    w = Fraction(5, 2)
    assert boundedness_bounds(lam((R(0), INF, w))) == (pytest.approx(2.5), pytest.approx(2.5))
    # two leaves whose common perpendicular is 2: neither bound sees both
    r = math.exp(2.0)
    lo, hi = boundedness_bounds(PolyhedralLamination([((R(-1), R(1)), 1), ((R(-r), R(r)), 1)]))
    assert (lo, hi) == (pytest.approx(1), pytest.approx(1))
    lo, hi = boundedness_bounds(_stack(5, 0.1))
    assert lo >= 5 - 1e-9 and hi >= lo


def test_distance():
    assert lamination_distance(SQUARE_PLUS, SQUARE_PLUS) == 0
    heavier = PolyhedralLamination.from_turns([("0", "1/2", "3/2")])
    assert lamination_distance(SQUARE_PLUS, heavier) == pytest.approx(0.5)
    # [DERIVED] rotating both endpoints by 0.01 turns moves each by 0.02 pi radians
    rot = PolyhedralLamination.from_turns([("0.01", "0.51", 1)])
    assert lamination_distance(SQUARE_PLUS, rot) == pytest.approx(4 * math.pi * 0.01)
    # far apart leaves cost less to delete and create: 2 w
    assert lamination_distance(SQUARE_PLUS, SQUARE_MINUS) == pytest.approx(2.0)


@given(st.lists(st.tuples(st.integers(1, 63), st.fractions(Fraction(1, 8), 5)), min_size=1,
                max_size=5, unique_by=lambda x: x[0]))
def test_json_round_trip(items):
    # chords (k, -k)/128 are nested, hence pairwise disjoint
    l1 = PolyhedralLamination([((T(Fraction(k, 128)), T(Fraction(-k, 128))), w) for k, w in items])
    assert from_json(to_json(l1)).leaves == l1.leaves


def test_duplicates_rejected_on_load():
    doc = {"leaves": [{"a": "0", "b": "1/2", "w": "1"}, {"a": "1/2", "b": "0", "w": "1"}]}
    with pytest.raises(InvalidLamination):
        from_json(doc, allow_invalid=True)


@given(cyclic_points(8), cyclic_points(3))
def test_intersection_is_mobius_equivariant(p, tri):
    lm = lam((p[0], p[4], Fraction(2)), (p[1], p[3], Fraction(1, 3)))
    m = mobius_from_triples([R(0), R(1), INF], tri)
    img = pushforward(m, lm)
    for a, b, want in ((p[2], p[6], Fraction(7, 3)), (p[5], p[7], 0)):
        assert intersection_with_geodesic(lm, Geodesic(a, b)) == want
        assert intersection_with_geodesic(img, Geodesic(m(a), m(b))) == want


@given(st.floats(0.05, 3.0), st.floats(0.05, 3.0))
def test_truncate_monotone_and_idempotent(n1, n2):
    lm = _stack(6, 0.4)
    lo, hi = sorted((n1, n2))
    small, big = truncate(lm, O, lo), truncate(lm, O, hi)
    assert set(small.leaves) <= set(big.leaves)
    assert truncate(small, O, lo).leaves == small.leaves
