"""Projective model of AdS^3 in R^{2,2} and its boundary torus.

The form is <x,y> = -x1 y1 - x2 y2 + x3 y3 + x4 y4.  A vector x is identified
with the 2x2 matrix

    chart(x) = [[x1 - x3, -x2 + x4],
                [x2 + x4,  x1 + x3]]

whose determinant is -q(x).  Null vectors are rank-one matrices u r^T; the
column class u is the left coordinate and the row class r the right one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle import CirclePoint, MobiusMap, is_exact
from .errors import DegenerateInput, NoChartFound, NotNull, ZeroVector

ETA = np.diag([-1.0, -1.0, 1.0, 1.0])


def inner(x, y):
    """Signature (2,2) form; exact on rational tuples."""
    return -x[0] * y[0] - x[1] * y[1] + x[2] * y[2] + x[3] * y[3]


def q(x):
    return inner(x, x)


def chart(x):
    return [[x[0] - x[2], -x[1] + x[3]], [x[1] + x[3], x[0] + x[2]]]


def chart_inv(X):
    return ((X[0][0] + X[1][1]) / 2, (X[1][0] - X[0][1]) / 2,
            (X[1][1] - X[0][0]) / 2, (X[0][1] + X[1][0]) / 2)


def chart_np(x) -> np.ndarray:
    return np.array([[x[0] - x[2], -x[1] + x[3]], [x[1] + x[3], x[0] + x[2]]], dtype=float)


def chart_inv_np(X) -> np.ndarray:
    return np.array([(X[0, 0] + X[1, 1]) / 2, (X[1, 0] - X[0, 1]) / 2,
                     (X[1, 1] - X[0, 0]) / 2, (X[0, 1] + X[1, 0]) / 2])


def _rep(x: CirclePoint):
    return (x.p, x.q) if x.exact else tuple(x.vec())


class EinPoint:
    """Boundary point with left and right coordinates."""

    __slots__ = ("xiL", "xiR", "_vec")

    def __init__(self, xiL: CirclePoint, xiR: CirclePoint):
        object.__setattr__(self, "xiL", xiL)
        object.__setattr__(self, "xiR", xiR)
        u, r = _rep(xiL), _rep(xiR)
        X = [[u[0] * r[0], u[0] * r[1]], [u[1] * r[0], u[1] * r[1]]]
        v = chart_inv(X)
        if not (xiL.exact and xiR.exact):
            v = np.array(v, dtype=float)
        object.__setattr__(self, "_vec", v)

    def __setattr__(self, name, value):
        raise AttributeError("EinPoint is immutable")

    @property
    def vector(self):
        return self._vec

    def __eq__(self, other):
        return isinstance(other, EinPoint) and self.xiL == other.xiL and self.xiR == other.xiR

    def __hash__(self):
        return hash((self.xiL, self.xiR))

    def __repr__(self):
        return f"EinPoint({self.xiL}, {self.xiR})"


def ein_from_lr(xiL: CirclePoint, xiR: CirclePoint) -> EinPoint:
    return EinPoint(xiL, xiR)


def _class_of(a, b) -> CirclePoint:
    return CirclePoint(a, b)


def projective_to_ein(x) -> EinPoint:
    """Factor a null vector into its (left, right) classes."""
    exact = all(is_exact(c) for c in x)
    if exact:
        if all(c == 0 for c in x):
            raise ZeroVector("zero vector")
        if q(x) != 0:
            raise NotNull("vector is not null", q=str(q(x)))
        X = chart(x)
        j = 0 if (X[0][0] != 0 or X[1][0] != 0) else 1
        i = 0 if (X[0][0] != 0 or X[0][1] != 0) else 1
        return EinPoint(_class_of(X[0][j], X[1][j]), _class_of(X[i][0], X[i][1]))
    x = np.asarray(x, dtype=float)
    s = float(np.dot(x, x))
    if s == 0:
        raise ZeroVector("zero vector")
    if abs(q(x)) > 1e-10 * s:
        raise NotNull("vector is not null", q=float(q(x)))
    X = chart_np(x)
    col = X[:, 0] if np.linalg.norm(X[:, 0]) >= np.linalg.norm(X[:, 1]) else X[:, 1]
    row = X[0] if np.linalg.norm(X[0]) >= np.linalg.norm(X[1]) else X[1]
    return EinPoint(CirclePoint(float(col[0]), float(col[1])),
                    CirclePoint(float(row[0]), float(row[1])))


def left_projection(p: EinPoint) -> CirclePoint:
    return p.xiL


def right_projection(p: EinPoint) -> CirclePoint:
    return p.xiR


class AdSPoint:
    """Timelike vector normalized to <x,x> = -1, sign fixed so the first nonzero entry is positive."""

    __slots__ = ("x",)

    def __init__(self, x):
        x = np.asarray(x, dtype=float)
        n = -q(x)
        if n <= 0:
            raise ValueError("not a timelike vector")
        x = x / math.sqrt(n)
        nz = np.flatnonzero(np.abs(x) > 1e-15)
        if len(nz) and x[nz[0]] < 0:
            x = -x
        object.__setattr__(self, "x", x)

    def __setattr__(self, name, value):
        raise AttributeError("AdSPoint is immutable")

    def __repr__(self):
        return f"AdSPoint({self.x.tolist()})"


def _as_vec(p):
    return p.x if isinstance(p, AdSPoint) else np.asarray(p, dtype=float)


def timelike_distance(x, y):
    """Timelike distance in [0, pi/2] after resolving the sign ambiguity, or None."""
    a, b = _as_vec(x), _as_vec(y)
    c = inner(a, b) / math.sqrt(q(a) * q(b))
    if abs(c) > 1.0 + 1e-12:
        return None
    return math.acos(min(1.0, abs(c)))


def isometry_from_pair(mL: MobiusMap, mR: MobiusMap) -> np.ndarray:
    """4x4 matrix of X -> mL X mR^T in chart coordinates."""
    A, B = mL.matrix(), mR.matrix()
    M = np.zeros((4, 4))
    for j in range(4):
        e = np.zeros(4)
        e[j] = 1.0
        M[:, j] = chart_inv_np(A @ chart_np(e) @ B.T)
    return M


def apply_isometry(M: np.ndarray, p: EinPoint) -> EinPoint:
    return projective_to_ein(M @ np.asarray(p.vector, dtype=float))


@dataclass
class SpacelikePlane:
    normal: np.ndarray
    margin: float = 0.0

    def __post_init__(self):
        self.normal = np.asarray(self.normal, dtype=float)
        n = -q(self.normal)
        if n <= 0:
            raise ValueError("normal must be timelike")
        self.normal = self.normal / math.sqrt(n)


def _turn_rep(t) -> np.ndarray:
    return np.array([math.sin(math.pi * t), math.cos(math.pi * t)])


def unwrap_turns(ts) -> np.ndarray:
    """Non-decreasing representatives: each entry is the least value >= the previous."""
    out = np.empty(len(ts))
    for i, t in enumerate(ts):
        t = float(t) % 1.0
        out[i] = t if i == 0 else out[i - 1] + (t - out[i - 1]) % 1.0
    return out


def canonical_lifts(xiL, xiR) -> np.ndarray:
    """Null lifts of a cyclically ordered configuration with consistent signs.

    Turn representatives (sin pi t, cos pi t) are taken along monotone
    unwrappings of both coordinates; for an order-preserving configuration all
    pairwise products are then non-positive.
    """
    tL = unwrap_turns([x.turns_float() for x in xiL])
    tR = unwrap_turns([x.turns_float() for x in xiR])
    P = np.empty((len(tL), 4))
    for i, (a, b) in enumerate(zip(tL, tR)):
        P[i] = chart_inv_np(np.outer(_turn_rep(a), _turn_rep(b)))
    return P


def disjoint_spacelike_plane(points, lifts=None, tol=1e-12) -> SpacelikePlane:
    """Timelike normal n with <n, p> > 0 on every canonical lift p."""
    if lifts is None:
        lifts = canonical_lifts([p.xiL for p in points], [p.xiR for p in points])
    P = np.asarray(lifts, dtype=float)
    G = P @ ETA @ P.T
    scale = np.outer(np.linalg.norm(P, axis=1), np.linalg.norm(P, axis=1))
    off = ~np.eye(len(P), dtype=bool)
    bad = np.argwhere(off & (G > tol * scale))
    if len(bad):
        i, j = (int(v) for v in bad[0])
        raise NoChartFound("configuration is not acausal", witness=[i, j])
    n = -P.sum(axis=0)
    if q(n) >= -tol * float(np.dot(n, n)):
        raise NoChartFound("no spacelike plane separates the configuration")
    margins = (P @ ETA @ n) / np.linalg.norm(P, axis=1)
    m = float(margins.min()) / math.sqrt(-q(n))
    if m <= tol:
        raise NoChartFound("configuration touches every candidate plane",
                           witness=[int(np.argmin(margins))])
    return SpacelikePlane(n, m)


def rhombus(a: CirclePoint, a2: CirclePoint, b: CirclePoint, b2: CirclePoint) -> dict:
    """The four corners (a,b), (a',b), (a',b'), (a,b') with their lightlike sides."""
    if a == a2 or b == b2:
        raise DegenerateInput("rhombus needs a != a' and b != b'")
    pts = [EinPoint(a, b), EinPoint(a2, b), EinPoint(a2, b2), EinPoint(a, b2)]
    return {"points": pts,
            "lightlike_edges": [(0, 1), (1, 2), (2, 3), (0, 3)],
            "axes": [(0, 2), (1, 3)]}


def standard_rhombus() -> dict:
    t = CirclePoint.from_turns
    return rhombus(t(0), t("1/2"), t("1/4"), t("3/4"))
