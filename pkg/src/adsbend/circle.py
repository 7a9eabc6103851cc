"""Projective line, Mobius maps, and the hyperboloid model of the hyperbolic plane.

A point of the circle is a homogeneous pair (p : q) with affine coordinate
x = p/q; infinity is (1 : 0).  The angle in turns t satisfies x = tan(pi t),
so the disk-model angle is 2 pi t.  Coordinates may be exact (int/Fraction)
or binary64; predicates are exact whenever both operands are exact.

The hyperbolic plane is the hyperboloid <x,x> = -1, T > 0 in R^{2,1} with
<x,y> = X X' + Y Y' - T T'.  The boundary point (p : q) is the null ray
(q^2 - p^2, 2pq, p^2 + q^2).
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import cmp_to_key
from numbers import Rational

import numpy as np

from .errors import (CoincidentPoints, DegenerateTriple, NotAcausal, NotDisjoint,
                     OrientationMismatch, TooFewPoints, UndefinedAtEndpoint)

H2_METRIC = np.diag([1.0, 1.0, -1.0])
_SPECIAL_TURNS = {Fraction(0): (0, 1), Fraction(1, 4): (1, 1),
                  Fraction(1, 2): (1, 0), Fraction(3, 4): (-1, 1)}


def is_exact(v) -> bool:
    return isinstance(v, Rational) and not isinstance(v, bool)


def as_number(v):
    """Parse "p/q" strings and ints to Fraction, pass floats through."""
    if isinstance(v, str):
        s = v.strip()
        if any(c in s for c in ".eEn"):
            return float(s)
        return Fraction(s)
    if isinstance(v, bool):
        raise TypeError("boolean is not a number")
    if isinstance(v, int):
        return Fraction(v)
    return v


def h2_inner(x, y) -> float:
    return float(x[0] * y[0] + x[1] * y[1] - x[2] * y[2])


class CirclePoint:
    """A point (p : q) of the projective line; immutable."""

    __slots__ = ("p", "q", "hint")

    def __init__(self, p, q, hint=None):
        if p == 0 and q == 0:
            raise ValueError("(0 : 0) is not a point")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "hint", hint)

    def __setattr__(self, name, value):
        raise AttributeError("CirclePoint is immutable")

    @classmethod
    def from_turns(cls, t):
        t = as_number(t)
        if is_exact(t):
            t = Fraction(t) % 1
            if t in _SPECIAL_TURNS:
                p, q = _SPECIAL_TURNS[t]
                return cls(Fraction(p), Fraction(q), t)
            a = math.pi * float(t)
            return cls(math.sin(a), math.cos(a), t)
        a = math.pi * (float(t) % 1.0)
        return cls(math.sin(a), math.cos(a))

    @classmethod
    def from_real(cls, x):
        x = as_number(x)
        if isinstance(x, float) and math.isinf(x):
            return cls.infinity()
        return cls(x, Fraction(1) if is_exact(x) else 1.0)

    @classmethod
    def infinity(cls):
        return cls(Fraction(1), Fraction(0), Fraction(1, 2))

    @property
    def exact(self) -> bool:
        return is_exact(self.p) and is_exact(self.q)

    @property
    def turns(self):
        """Angle in turns in [0,1); exact when known exactly."""
        if self.hint is not None:
            return self.hint
        if self.exact:
            for t, (p, q) in _SPECIAL_TURNS.items():
                if p * self.q == q * self.p:
                    return t
        return (math.atan2(float(self.p), float(self.q)) / math.pi) % 1.0

    def turns_float(self) -> float:
        return float(self.turns) % 1.0

    def vec(self) -> np.ndarray:
        """Float homogeneous representative, unit Euclidean norm."""
        v = np.array([float(self.p), float(self.q)])
        return v / np.hypot(v[0], v[1])

    def real(self):
        """Affine coordinate, or math.inf for the point at infinity."""
        if self.q == 0:
            return math.inf
        return self.p / self.q

    def null_vector(self):
        """Null vector in R^{2,1}; exact entries for exact coordinates."""
        p, q = (self.p, self.q) if self.exact else self.vec()
        v = (q * q - p * p, 2 * p * q, p * p + q * q)
        return v if self.exact else np.array(v, dtype=float)

    def _exact_key(self):
        if self.q == 0:
            return (1, Fraction(0))
        x = Fraction(self.p) / Fraction(self.q)
        return (0, x) if x >= 0 else (2, x)

    def __eq__(self, other):
        if not isinstance(other, CirclePoint):
            return NotImplemented
        if self.hint is not None and other.hint is not None:
            return self.hint == other.hint
        d = self.p * other.q - self.q * other.p
        if self.exact and other.exact:
            return d == 0
        a, b = self.vec(), other.vec()
        return abs(a[0] * b[1] - a[1] * b[0]) <= 1e-13

    def __hash__(self):
        return hash(round(self.turns_float(), 9) % 1.0)

    def __repr__(self):
        t = self.turns
        return f"CirclePoint(turns={t})"

    def __str__(self):
        return turns_str(self)


def turns_str(x: CirclePoint) -> str:
    t = x.turns
    return str(t) if is_exact(t) else repr(float(t))


def cyclic_cmp(a: CirclePoint, b: CirclePoint) -> int:
    """Compare positions in turns on [0,1)."""
    if a.hint is not None and b.hint is not None:
        x, y = a.hint, b.hint
    elif a.exact and b.exact:
        x, y = a._exact_key(), b._exact_key()
    else:
        x, y = a.turns_float(), b.turns_float()
        if a == b:
            return 0
    return (x > y) - (x < y)


def cyclic_sorted(points):
    return sorted(points, key=cmp_to_key(cyclic_cmp))


def between(a: CirclePoint, x: CirclePoint, b: CirclePoint) -> bool:
    """True iff x lies strictly inside the counterclockwise arc from a to b."""
    ax, xb, ab = cyclic_cmp(a, x), cyclic_cmp(x, b), cyclic_cmp(a, b)
    if ax == 0 or xb == 0:
        return False
    if ab < 0:
        return ax < 0 and xb < 0
    return ax < 0 or xb < 0


def ccw_offset(a: CirclePoint, x: CirclePoint) -> float:
    """Counterclockwise turn offset from a to x in [0,1)."""
    return (x.turns_float() - a.turns_float()) % 1.0


def _det(a: CirclePoint, b: CirclePoint, exact=None):
    if exact is None:
        exact = a.exact and b.exact
    if exact:
        return a.p * b.q - a.q * b.p
    u, v = a.vec(), b.vec()
    return float(u[0] * v[1] - u[1] * v[0])


def cross_ratio(a, b, c, d):
    """((a-b)(c-d)) / ((a-d)(c-b)) in homogeneous form; -1 on (-1, 0, 1, inf)."""
    pts = (a, b, c, d)
    for i in range(4):
        for j in range(i + 1, 4):
            if pts[i] == pts[j]:
                raise CoincidentPoints("cross-ratio needs four distinct points")
    ex = all(p.exact for p in pts)
    num = _det(a, b, ex) * _det(c, d, ex)
    den = _det(a, d, ex) * _det(c, b, ex)
    if ex:
        return Fraction(num) / Fraction(den)
    return num / den


def is_symmetric(a, b, c, d, eps) -> bool:
    cr = cross_ratio(a, b, c, d)
    eps = as_number(eps)
    return -1 - eps <= cr <= -1 + eps


def cyclic_orientation(a, b, c) -> int:
    """+1 if (a, b, c) is counterclockwise, -1 if clockwise, 0 if degenerate."""
    if a == b or b == c or a == c:
        return 0
    return 1 if between(a, b, c) else -1


class MobiusMap:
    """Orientation-preserving projective map x -> (a x + b)/(c x + d).

    Entries may be exact; they are stored with positive determinant and
    normalized to determinant one on demand.
    """

    __slots__ = ("m",)

    def __init__(self, a, b=None, c=None, d=None):
        if b is None:
            arr = a
            a, b, c, d = arr[0][0], arr[0][1], arr[1][0], arr[1][1]
        det = a * d - b * c
        if det == 0:
            raise ValueError("singular matrix")
        if det < 0:
            raise OrientationMismatch("determinant must be positive")
        object.__setattr__(self, "m", (a, b, c, d))

    def __setattr__(self, name, value):
        raise AttributeError("MobiusMap is immutable")

    @classmethod
    def identity(cls):
        one, zero = Fraction(1), Fraction(0)
        return cls(one, zero, zero, one)

    @property
    def exact(self):
        return all(is_exact(v) for v in self.m)

    def matrix(self) -> np.ndarray:
        """Float matrix with determinant one."""
        a, b, c, d = (float(v) for v in self.m)
        s = math.sqrt(a * d - b * c)
        return np.array([[a, b], [c, d]]) / s

    def __call__(self, x: CirclePoint) -> CirclePoint:
        a, b, c, d = self.m
        if self.exact and x.exact:
            return CirclePoint(a * x.p + b * x.q, c * x.p + d * x.q)
        v = self.matrix() @ x.vec()
        return CirclePoint(float(v[0]), float(v[1]))

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        a, b, c, d = self.m
        e, f, g, h = other.m
        if not (self.exact and other.exact):
            m = self.matrix() @ other.matrix()
            return MobiusMap(m)
        return MobiusMap(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "MobiusMap":
        a, b, c, d = self.m
        return MobiusMap(d, -b, -c, a)

    def __eq__(self, other):
        if not isinstance(other, MobiusMap):
            return NotImplemented
        if self.exact and other.exact:
            a, b, c, d = self.m
            e, f, g, h = other.m
            return a * f == b * e and a * g == c * e and a * h == d * e and b * g == c * f \
                and b * h == d * f and c * h == d * g
        return np.allclose(self.matrix(), other.matrix(), atol=1e-10)

    def __hash__(self):
        return hash(tuple(np.round(self.matrix(), 8)))

    def __repr__(self):
        return f"MobiusMap({self.m})"

    def to_list(self):
        return [float(v) for v in self.matrix().ravel()]


def _to_standard(z1, z2, z3):
    """Matrix entries (unnormalized) sending z1, z2, z3 to 0, 1, inf."""
    exact = z1.exact and z2.exact and z3.exact
    if exact:
        p1, q1, p3, q3 = z1.p, z1.q, z3.p, z3.q
    else:
        (p1, q1), (p3, q3) = z1.vec(), z3.vec()
    s = _det(z2, z3, exact)
    t = _det(z2, z1, exact)
    return (s * q1, -s * p1, t * q3, -t * p3)


def mobius_from_triples(src, dst) -> MobiusMap:
    """The orientation-preserving Mobius map sending src[i] to dst[i]."""
    for tri in (src, dst):
        if tri[0] == tri[1] or tri[1] == tri[2] or tri[0] == tri[2]:
            raise DegenerateTriple("triple has repeated points")
    a, b, c, d = _to_standard(*src)
    e, f, g, h = _to_standard(*dst)
    # adj(dst) @ src
    A = (h * a - f * c, h * b - f * d, -g * a + e * c, -g * b + e * d)
    det = A[0] * A[3] - A[1] * A[2]
    if det <= 0:
        raise OrientationMismatch("triples have opposite cyclic orientation")
    return MobiusMap(*A)


# ---------------------------------------------------------------- geodesics

class Geodesic:
    """Geodesic with ordered endpoints (a, b); order matters for translations."""

    __slots__ = ("a", "b")

    def __init__(self, a: CirclePoint, b: CirclePoint):
        if a == b:
            raise CoincidentPoints("geodesic endpoints must differ")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("Geodesic is immutable")

    def reversed(self):
        return Geodesic(self.b, self.a)

    def same_support(self, other) -> bool:
        return {self.a, self.b} == {other.a, other.b} and (
            (self.a == other.a and self.b == other.b) or (self.a == other.b and self.b == other.a))

    def raw_pole(self):
        """J (A x B): orthogonal to both null vectors; exact when possible."""
        A, B = self.a.null_vector(), self.b.null_vector()
        c = (A[1] * B[2] - A[2] * B[1], A[2] * B[0] - A[0] * B[2], A[0] * B[1] - A[1] * B[0])
        return (c[0], c[1], -c[2])

    def pole(self) -> np.ndarray:
        """Unit normalization of raw_pole, written in half-angles.

        With endpoints at turns ta, tb the pole is -(cos m, sin m, cos r) / sin r,
        m = pi (ta + tb), r = pi (tb - ta); taking tb - ta directly avoids the
        cancellation of the cross product for short chords.
        """
        ta, tb = self.a.turns, self.b.turns
        d = tb - ta
        d -= math.floor(d + Fraction(1, 2)) if is_exact(d) else math.floor(d + 0.5)
        r = math.pi * float(d)
        m = math.pi * (2 * float(ta) + float(d))
        return -np.array([math.cos(m), math.sin(m), math.cos(r)]) / math.sin(r)

    def __eq__(self, other):
        if not isinstance(other, Geodesic):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f"Geodesic({turns_str(self.a)}, {turns_str(self.b)})"


class HypPoint:
    """Point of the hyperboloid sheet <x,x> = -1, T > 0."""

    __slots__ = ("x",)

    def __init__(self, x):
        x = np.asarray(x, dtype=float)
        n = -h2_inner(x, x)
        if n <= 0 or x[2] <= 0:
            raise ValueError("not a point of the hyperboloid")
        object.__setattr__(self, "x", x / math.sqrt(n))

    def __setattr__(self, name, value):
        raise AttributeError("HypPoint is immutable")

    @classmethod
    def origin(cls):
        return cls([0.0, 0.0, 1.0])

    @classmethod
    def polar(cls, dist, angle):
        """Point at distance dist from the origin in disk direction angle (radians)."""
        s = math.sinh(dist)
        return cls([s * math.cos(angle), s * math.sin(angle), math.cosh(dist)])

    def distance(self, other) -> float:
        return math.acosh(max(1.0, -h2_inner(self.x, other.x)))

    def __repr__(self):
        return f"HypPoint({self.x.tolist()})"


def geodesic_relation(g1: Geodesic, g2: Geodesic) -> str:
    """'Cross', 'Disjoint' or 'SharedEndpoint'."""
    if g2.a in (g1.a, g1.b) or g2.b in (g1.a, g1.b):
        return "SharedEndpoint"
    if between(g1.a, g2.a, g1.b) != between(g1.a, g2.b, g1.b):
        return "Cross"
    return "Disjoint"


def common_perpendicular_length(g1: Geodesic, g2: Geodesic) -> float:
    if geodesic_relation(g1, g2) != "Disjoint":
        raise NotDisjoint("geodesics are not disjoint")
    n1, n2 = g1.pole(), g2.pole()
    c = h2_inner(n1, n2)
    if abs(c) > 2:
        return math.acosh(abs(c))
    # short perpendiculars: <n1 - s n2, n1 - s n2> = -4 sinh^2(h/2) avoids acosh near 1
    d = n1 - math.copysign(1.0, c) * n2
    return 2 * math.asinh(math.sqrt(max(0.0, -h2_inner(d, d))) / 2)


def distance_to_geodesic(x: HypPoint, g: Geodesic) -> float:
    return math.asinh(abs(h2_inner(g.pole(), x.x)))


def translation_along(g: Geodesic, w) -> MobiusMap:
    """Hyperbolic map with axis g translating by w toward g.b."""
    if w == 0:
        return MobiusMap.identity()
    a, b = g.a.vec(), g.b.vec()
    M = np.array([[b[0], a[0]], [b[1], a[1]]])
    D = np.diag([math.exp(w / 2), math.exp(-w / 2)])
    T = M @ D @ np.linalg.inv(M)
    return MobiusMap(T)


def visual_distance(o: HypPoint, a: CirclePoint, b: CirclePoint) -> float:
    """Angle at o between the rays toward a and b."""
    if a == b:
        return 0.0
    A = np.asarray(a.null_vector(), dtype=float)
    B = np.asarray(b.null_vector(), dtype=float)
    x = o.x
    Ap = A + h2_inner(A, x) * x
    Bp = B + h2_inner(B, x) * x
    c = h2_inner(Ap, Bp) / math.sqrt(h2_inner(Ap, Ap) * h2_inner(Bp, Bp))
    return math.acos(max(-1.0, min(1.0, c)))


def segment_side(g: Geodesic, x) -> str:
    """'Left' (the arc from g.b to g.a), 'Right', or 'On'.

    x may be a HypPoint or a CirclePoint; the test is the sign of <pole, x>.
    """
    if isinstance(x, CirclePoint):
        if x == g.a or x == g.b:
            return "On"
        if x.exact and g.a.exact and g.b.exact:
            n, v = g.raw_pole(), x.null_vector()
            s = n[0] * v[0] + n[1] * v[1] - n[2] * v[2]
            return "Left" if s > 0 else "Right"
        return "Right" if between(g.a, x, g.b) else "Left"
    s = h2_inner(g.pole(), x.x)
    if abs(s) < 1e-12:
        return "On"
    return "Left" if s > 0 else "Right"


class DiscreteCircleMap:
    """Strictly cyclic-order-preserving map from a finite support to the circle."""

    def __init__(self, support, values, check=True):
        support, values = list(support), list(values)
        if len(support) != len(values):
            raise ValueError("support and values differ in length")
        if len(support) < 3:
            raise TooFewPoints("a circle map needs at least 3 support points")
        pairs = sorted(zip(support, values), key=cmp_to_key(lambda s, t: cyclic_cmp(s[0], t[0])))
        self.support = tuple(p[0] for p in pairs)
        self.values = tuple(p[1] for p in pairs)
        self._index = {}
        for i, x in enumerate(self.support):
            self._index.setdefault(x, i)
        if check:
            self._check()

    def _check(self):
        n = len(self.support)
        for i in range(n):
            if self.support[i] == self.support[(i + 1) % n]:
                raise NotAcausal("repeated support point", index=i)
        v = self.values
        for i in range(1, n - 1):
            if not between(v[0], v[i], v[i + 1]):
                raise NotAcausal("map does not preserve cyclic order", index=i)

    def index(self, x: CirclePoint) -> int:
        i = self._index.get(x)
        if i is not None and self.support[i] == x:
            return i
        for j, y in enumerate(self.support):
            if y == x:
                return j
        raise UndefinedAtEndpoint("point outside the support", point=str(x))

    def __call__(self, x: CirclePoint) -> CirclePoint:
        return self.values[self.index(x)]

    def __len__(self):
        return len(self.support)

    def items(self):
        return list(zip(self.support, self.values))

    def post(self, m: MobiusMap) -> "DiscreteCircleMap":
        return DiscreteCircleMap(self.support, [m(v) for v in self.values], check=False)

    def __repr__(self):
        return f"DiscreteCircleMap({len(self)} points)"
