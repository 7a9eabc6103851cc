import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from adsbend.circle import (CirclePoint, DiscreteCircleMap, Geodesic, HypPoint, MobiusMap,
                            between, common_perpendicular_length, cross_ratio, cyclic_sorted,
                            distance_to_geodesic, geodesic_relation, mobius_from_triples,
                            segment_side, translation_along, visual_distance)
from adsbend.errors import (CoincidentPoints, DegenerateTriple, NotAcausal, NotDisjoint,
                            OrientationMismatch, TooFewPoints)
from strategies import cyclic_points, distinct_turns

R = CirclePoint.from_real
T = CirclePoint.from_turns
INF = CirclePoint.infinity()


def cr_oracle(xs):
    """Cross-ratio on the real line with mpmath, infinity handled by limits."""
    a, b, c, d = (mpmath.mpf(x) if x != math.inf else None for x in xs)
    def diff(p, q):
        if p is None:
            return 1
        if q is None:
            return -1
        return p - q
    return float(diff(a, b) * diff(c, d) / (diff(a, d) * diff(c, b)))


# ---------------------------------------------------------------- points

def test_turns_and_coordinates():
    assert T(Fraction(1, 2)) == INF
    assert T(0) == R(0)
    assert T(Fraction(1, 4)) == R(1)
    assert T(Fraction(3, 4)) == R(-1)
    assert CirclePoint(2, 4) == CirclePoint(1, 2)
    with pytest.raises(ValueError):
        CirclePoint(0, 0)


def test_hash_consistent_with_equality():
    assert hash(CirclePoint(Fraction(2), Fraction(4))) == hash(CirclePoint(Fraction(1), Fraction(2)))
    assert len({T(Fraction(1, 4)), R(1), CirclePoint(3, 3)}) == 1


@given(distinct_turns(3))
def test_between_is_cyclic(ts):
    a, b, c = (T(t) for t in ts)
    assert between(a, b, c) and between(b, c, a) and between(c, a, b)
    assert not between(a, c, b)


# ---------------------------------------------------------------- cross-ratio

def test_symmetric_cross_ratio_exact():
    cr = cross_ratio(R(-1), R(0), R(1), INF)
    assert cr == -1 and isinstance(cr, Fraction)


def test_cross_ratio_worked_values():
    # [DERIVED] mpmath real-line oracle
    assert cross_ratio(R(0), R(1), R(2), R(3)) == Fraction(-1, 3)
    assert float(cross_ratio(R(0), R(1), R(2), R(3))) == pytest.approx(cr_oracle([0, 1, 2, 3]))
    assert float(cross_ratio(R(-1), R(0), R(2), INF)) == pytest.approx(cr_oracle([-1, 0, 2, math.inf]))


def test_cross_ratio_coincident():
    with pytest.raises(CoincidentPoints):
        cross_ratio(R(0), R(0), R(1), R(2))


@given(st.lists(st.fractions(-50, 50), min_size=4, max_size=4, unique=True))
def test_cross_ratio_matches_real_line_oracle(xs):
    got = float(cross_ratio(*(R(x) for x in xs)))
    assert got == pytest.approx(cr_oracle([float(x) for x in xs]), rel=1e-12)


@given(cyclic_points(4))
def test_cyclic_quadruples_have_negative_cross_ratio(pts):
    cr = cross_ratio(*pts)
    assert cr < 0
    assert float(cross_ratio(*pts[1:], pts[0])) == pytest.approx(float(1 / cr), rel=1e-12)


@given(cyclic_points(4), st.booleans())
def test_mixed_precision_cross_ratio(pts, which):
    # replacing some exact points by float copies must not change the value
    mixed = [CirclePoint(float(p.p), float(p.q)) if (i % 2 == which) else p
             for i, p in enumerate(pts)]
    assert float(cross_ratio(*mixed)) == pytest.approx(float(cross_ratio(*pts)), rel=1e-9)


@given(cyclic_points(4), cyclic_points(3))
def test_mobius_invariance(quad, tri):
    m = mobius_from_triples([T(0), T(Fraction(1, 4)), T(Fraction(1, 2))], tri)
    a = float(cross_ratio(*quad))
    b = float(cross_ratio(*(m(x) for x in quad)))
    assert b == pytest.approx(a, rel=1e-10)


# ---------------------------------------------------------------- Mobius maps

def test_mobius_from_triples_standard():
    m = mobius_from_triples([R(-1), R(0), R(1)], [R(0), R(1), INF])
    assert m(R(-1)) == R(0) and m(R(0)) == R(1) and m(R(1)) == INF
    assert abs(np.linalg.det(m.matrix()) - 1) < 1e-12


@given(cyclic_points(3), cyclic_points(3))
def test_mobius_from_triples_hits_targets(src, dst):
    m = mobius_from_triples(src, dst)
    for x, y in zip(src, dst):
        assert m(x).turns_float() == pytest.approx(y.turns_float(), abs=1e-9) or \
            abs(abs(m(x).turns_float() - y.turns_float()) - 1) < 1e-9


def test_mobius_errors():
    with pytest.raises(DegenerateTriple):
        mobius_from_triples([R(0), R(0), R(1)], [R(0), R(1), R(2)])
    with pytest.raises(OrientationMismatch):
        mobius_from_triples([R(0), R(1), R(2)], [R(2), R(1), R(0)])


def test_composition_and_inverse():
    m = mobius_from_triples([R(0), R(1), INF], [R(1), R(3), R(-2)])
    k = m @ m.inverse()
    assert k == MobiusMap.identity()


# ---------------------------------------------------------------- geodesics

def test_geodesic_relations():
    g = Geodesic(R(0), INF)
    assert geodesic_relation(g, Geodesic(R(-1), R(1))) == "Cross"
    assert geodesic_relation(g, Geodesic(R(1), R(2))) == "Disjoint"
    assert geodesic_relation(g, Geodesic(R(0), R(2))) == "SharedEndpoint"


def test_common_perpendicular_symmetric():
    # [DERIVED] (-1,0) and (1,inf) are exchanged by the order-4 rotation; length 2 asinh(1)
    L = common_perpendicular_length(Geodesic(R(-1), R(0)), Geodesic(R(1), INF))
    assert L == pytest.approx(2 * math.asinh(1), abs=1e-12)
    with pytest.raises(NotDisjoint):
        common_perpendicular_length(Geodesic(R(0), INF), Geodesic(R(-1), R(1)))


@given(cyclic_points(4))
def test_perpendicular_product_identity(pts):
    a, b, c, d = pts
    h = common_perpendicular_length(Geodesic(a, b), Geodesic(c, d))
    k = common_perpendicular_length(Geodesic(b, c), Geodesic(d, a))
    assert math.sinh(h / 2) * math.sinh(k / 2) == pytest.approx(1.0, abs=1e-9)


def test_perpendicular_short_chord_precision():
    # [DERIVED] 50-digit evaluation of the pole formula: h = 11.025904597397558, k = 0.01613680626600277
    a, b, c, d = (T(Fraction(3, 499)), T(Fraction(6, 997)), T(Fraction(173, 333)), T(Fraction(916, 999)))
    h = common_perpendicular_length(Geodesic(a, b), Geodesic(c, d))
    k = common_perpendicular_length(Geodesic(b, c), Geodesic(d, a))
    assert h == pytest.approx(11.025904597397558, rel=1e-12)
    assert k == pytest.approx(0.01613680626600277, rel=1e-10)


def test_distance_and_sides():
    o = HypPoint.origin()
    assert distance_to_geodesic(o, Geodesic(T(0), T(Fraction(1, 2)))) == pytest.approx(0, abs=1e-15)
    p = HypPoint.polar(1.0, 0.0)
    assert distance_to_geodesic(p, Geodesic(T(Fraction(1, 4)), T(Fraction(3, 4)))) == pytest.approx(1.0)
    g = Geodesic(R(0), INF)
    assert segment_side(g, R(-1)) == "Left"
    assert segment_side(g, R(1)) == "Right"
    assert segment_side(g, R(0)) == "On"


def test_visual_distance_quarter():
    o = HypPoint.origin()
    assert visual_distance(o, T(0), T(Fraction(1, 4))) == pytest.approx(math.pi / 2)
    assert visual_distance(o, T(0), T(Fraction(1, 2))) == pytest.approx(math.pi)


def test_translation_along_axis():
    # [DERIVED] z -> e^w z on the axis (0, inf)
    m = translation_along(Geodesic(R(0), INF), 1.0)
    assert m(R(1)).real() == pytest.approx(math.e)
    assert m(R(0)) == R(0) and m(INF) == INF


# ---------------------------------------------------------------- circle maps

def test_discrete_map_basics():
    u = DiscreteCircleMap([R(0), R(1), INF], [R(0), R(2), INF])
    assert u(R(1)) == R(2) and len(u) == 3
    with pytest.raises(TooFewPoints):
        DiscreteCircleMap([R(0), R(1)], [R(0), R(1)])
    with pytest.raises(NotAcausal):
        DiscreteCircleMap([R(0), R(1), R(2), R(3)], [R(0), R(2), R(1), R(3)])


@given(cyclic_points(5))
def test_discrete_map_sorts_pairs(pts):
    shuffled = pts[2:] + pts[:2]
    u = DiscreteCircleMap(shuffled, shuffled)
    assert list(u.support) == cyclic_sorted(pts)
