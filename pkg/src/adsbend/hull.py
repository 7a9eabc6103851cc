"""Convex hulls of finite acausal boundary configurations in AdS^3.

Vertices are lifted to null vectors with consistent signs, dehomogenized in
the affine chart of a spacelike plane disjoint from them, and hulled there.
Face hyperplanes are pulled back to R^{2,2}; their normals are timelike for
spacelike faces.  Exterior dihedral angles are hyperbolic angles between unit
face normals, positive on bending edges and negative on the equator.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import ConvexHull
from scipy.spatial import QhullError

from .ads import (ETA, SpacelikePlane, canonical_lifts, chart_np, disjoint_spacelike_plane,
                  ein_from_lr, inner, isometry_from_pair)
from .circle import CirclePoint, DiscreteCircleMap, Geodesic, MobiusMap, mobius_from_triples
from .errors import (ChartFailure, DegenerateEdge, DegenerateHull, NoChartFound,
                     NonTreeAdjacency)
from .lamination import Leaf, PolyhedralLamination

SIDES = ("future", "past")


def time_field(x):
    """Future-pointing tangent field t(x) = (-x2, x1, 0, 0)."""
    return np.array([-x[1], x[0], 0.0, 0.0])


@dataclass
class Face:
    verts: tuple
    normal: np.ndarray
    future: bool
    lightlike: bool = False

    @property
    def side(self):
        return "future" if self.future else "past"


@dataclass
class Edge:
    i: int
    j: int
    faces: tuple
    kind: str
    angle: float = None
    lightlike: bool = False


@dataclass
class IdealPolyhedron:
    xiL: list
    xiR: list
    lifts: np.ndarray
    chart: SpacelikePlane
    coords: np.ndarray
    faces: list
    edges: dict
    flat: bool = False

    @property
    def n(self):
        return len(self.xiL)

    @property
    def vertices(self):
        return [ein_from_lr(a, b) for a, b in zip(self.xiL, self.xiR)]

    @property
    def degenerate(self) -> bool:
        return any(f.lightlike for f in self.faces) or any(e.lightlike for e in self.edges.values())

    def faces_on(self, side):
        return [k for k, f in enumerate(self.faces) if f.side == side]

    def equator(self):
        return sorted(e for e, d in self.edges.items() if d.kind == "equator")

    def bend_edges(self, side):
        return sorted(e for e, d in self.edges.items() if d.kind == "bend_" + side)

    def __repr__(self):
        return (f"IdealPolyhedron(n={self.n}, faces={len(self.faces)}, "
                f"edges={len(self.edges)}, flat={self.flat})")


def _unit_normal(N):
    s = -inner(N, N)
    return N / math.sqrt(s) if s > 0 else None


def _cofactor_normal(A):
    """Vector c with det[A; y] = c . y, for A of shape (3, 4)."""
    return np.array([(-1) ** (j + 3) * np.linalg.det(np.delete(A, j, axis=1)) for j in range(4)])


def _as_config(u):
    if isinstance(u, DiscreteCircleMap):
        return list(u.support), list(u.values)
    pts = list(u)
    return [p.xiL for p in pts], [p.xiR for p in pts]


def convex_hull(u, merge_tol=1e-6, allow_flat=True, tol=1e-10) -> IdealPolyhedron:
    """Hull of an order-preserving configuration.

    u is a DiscreteCircleMap xiL -> xiR (validated acausal on construction) or
    a list of EinPoints already in cyclic order, which admits weakly monotone
    limits such as the rhombus.
    """
    xiL, xiR = _as_config(u)
    n = len(xiL)
    if n < 4:
        raise DegenerateHull("a hull needs at least 4 vertices")
    P = canonical_lifts(xiL, xiR)
    try:
        plane = disjoint_spacelike_plane(None, lifts=P)
    except NoChartFound as e:
        raise ChartFailure(str(e), **e.details) from e
    Pn = P / np.linalg.norm(P, axis=1)[:, None]
    w = ETA @ plane.normal
    Y = P / (P @ w)[:, None]
    B = np.linalg.svd(w[None, :])[2][1:].T
    C = (Y - Y.mean(axis=0)) @ B
    sv = np.linalg.svd(Pn, compute_uv=False)
    if sv[3] < tol * sv[0]:
        if not allow_flat:
            raise DegenerateHull("configuration is coplanar")
        return _flat_hull(xiL, xiR, P, plane, C)
    try:
        h = ConvexHull(C)
    except QhullError as e:
        raise DegenerateHull("hull computation failed") from e
    if len(h.vertices) != n:
        raise DegenerateHull("some vertices are not extreme",
                             missing=sorted(set(range(n)) - set(h.vertices.tolist())))
    total = P.sum(axis=0)
    tris = []
    for s in h.simplices:
        s = tuple(sorted(int(v) for v in s))
        N = ETA @ _cofactor_normal(Pn[list(s)])
        if inner(N, total) > 0:
            N = -N
        N = N / np.linalg.norm(N)
        light = -inner(N, N) <= tol
        fut = inner(N, time_field(P[list(s)].sum(axis=0))) > 0
        tris.append((s, N, fut, light))
    # merge coplanar neighbours of equal time orientation
    parent = list(range(len(tris)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    edge_tris = {}
    for t, (s, *_rest) in enumerate(tris):
        for a, b in ((s[0], s[1]), (s[0], s[2]), (s[1], s[2])):
            edge_tris.setdefault((a, b), []).append(t)
    for e, ts in edge_tris.items():
        if len(ts) != 2:
            raise DegenerateHull("non-manifold hull edge", edge=list(e))
        t1, t2 = ts
        if tris[t1][2] != tris[t2][2] or tris[t1][3] or tris[t2][3]:
            continue
        n1, n2 = _unit_normal(tris[t1][1]), _unit_normal(tris[t2][1])
        if math.acosh(max(1.0, abs(inner(n1, n2)))) < merge_tol:
            parent[find(t1)] = find(t2)
    groups = {}
    for t in range(len(tris)):
        groups.setdefault(find(t), []).append(t)
    faces, face_of = [], {}
    for root, ts in sorted(groups.items(), key=lambda kv: min(tris[t][0] for t in kv[1])):
        verts = tuple(sorted({v for t in ts for v in tris[t][0]}))
        s, N, fut, light = tris[ts[0]]
        if len(ts) > 1:
            N = sum(tris[t][1] for t in ts)
            N = N / np.linalg.norm(N)
        un = _unit_normal(N)
        faces.append(Face(verts, un if un is not None and not light else N, fut, light))
        for t in ts:
            face_of[t] = len(faces) - 1
    edges = {}
    for e, (t1, t2) in edge_tris.items():
        f1, f2 = face_of[t1], face_of[t2]
        if f1 == f2:
            continue
        F1, F2 = faces[f1], faces[f2]
        kind = ("bend_" + F1.side) if F1.future == F2.future else "equator"
        pi, pj = Pn[e[0]], Pn[e[1]]
        light = abs(inner(pi, pj)) <= tol
        angle = None
        if not (light or F1.lightlike or F2.lightlike):
            mag = math.acosh(max(1.0, abs(inner(F1.normal, F2.normal))))
            angle = mag if kind != "equator" else -mag
        edges[e] = Edge(e[0], e[1], (f1, f2), kind, angle, light)
    return IdealPolyhedron(list(xiL), list(xiR), P, plane, C, faces, edges, False)


def _flat_hull(xiL, xiR, P, plane, C) -> IdealPolyhedron:
    n = len(xiL)
    v = np.linalg.svd(P / np.linalg.norm(P, axis=1)[:, None])[2][-1]
    N = ETA @ v
    if inner(N, P.sum(axis=0)) > 0:
        N = -N
    un = _unit_normal(N)
    light = un is None
    N = N / np.linalg.norm(N) if light else un
    x = P.sum(axis=0)
    fut = inner(N, time_field(x)) > 0
    verts = tuple(range(n))
    faces = [Face(verts, N, fut, light), Face(verts, -N, not fut, light)]
    if not fut:
        faces.reverse()
    edges = {}
    for i in range(n):
        e = tuple(sorted((i, (i + 1) % n)))
        edges[e] = Edge(e[0], e[1], (0, 1), "equator", None if light else -0.0, False)
    return IdealPolyhedron(list(xiL), list(xiR), P, plane, C, faces, edges, True)


def dihedral_angles(P: IdealPolyhedron) -> dict:
    """Signed exterior angle per edge (i, j)."""
    out = {}
    for e, d in P.edges.items():
        if d.angle is None:
            raise DegenerateEdge("edge is not spacelike or meets a lightlike face", edge=list(e))
        out[e] = d.angle
    return out


def vertex_angle_sums(P: IdealPolyhedron):
    ang = dihedral_angles(P)
    sums = [0.0] * P.n
    for (i, j), a in ang.items():
        sums[i] += a
        sums[j] += a
    return sums


def _reflection(m):
    return np.eye(4) - 2 * np.outer(m, ETA @ m) / inner(m, m)


def boost(v, w):
    """Isometry fixing the plane through v-perp and w-perp's intersection, taking w-perp to v-perp."""
    return _reflection(v + w) @ _reflection(v)


@dataclass
class PleatedBoundary:
    side: str
    positions: list
    lamination: PolyhedralLamination
    isometries: dict
    leaf_edges: list = field(default_factory=list)

    def as_map(self, targets) -> DiscreteCircleMap:
        """Vertex-indexed map developed position -> targets[i]."""
        return DiscreteCircleMap(self.positions, targets, check=False)


def develop_boundary(P: IdealPolyhedron, side: str) -> PleatedBoundary:
    """Unfold one boundary component onto the reference plane x2 = 0."""
    if side not in SIDES:
        raise ValueError("side must be 'future' or 'past'")
    fids = P.faces_on(side)
    if any(P.faces[f].lightlike for f in fids):
        raise DegenerateEdge("boundary contains lightlike faces")
    adj = {f: [] for f in fids}
    inner_edges = []
    for e, d in P.edges.items():
        f1, f2 = d.faces
        if f1 in adj and f2 in adj and f1 != f2:
            adj[f1].append((f2, e))
            adj[f2].append((f1, e))
            inner_edges.append(e)
    root = min(fids, key=lambda f: P.faces[f].verts)
    if len(inner_edges) != len(fids) - 1:
        raise NonTreeAdjacency("face adjacency is not a tree", faces=len(fids), edges=len(inner_edges))
    rv = P.faces[root].verts[:3]
    m = mobius_from_triples([P.xiL[i] for i in rv], [P.xiR[i] for i in rv])
    G = {root: isometry_from_pair(MobiusMap.identity(), m.inverse())}
    queue = deque([root])
    while queue:
        f = queue.popleft()
        for g, _ in adj[f]:
            if g in G:
                continue
            v, w = P.faces[g].normal, P.faces[f].normal
            if inner(v, w) > 0:
                v = -v
            G[g] = G[f] @ boost(v, w)
            queue.append(g)
    if len(G) != len(fids):
        raise NonTreeAdjacency("face adjacency is disconnected")
    pos = [None] * P.n
    for f, M in G.items():
        for i in P.faces[f].verts:
            if pos[i] is not None:
                continue
            X = chart_np(M @ P.lifts[i])
            c = X[:, 0] if np.linalg.norm(X[:, 0]) >= np.linalg.norm(X[:, 1]) else X[:, 1]
            pos[i] = CirclePoint(float(c[0]), float(c[1]))
    leaves, leaf_edges = [], []
    for e in sorted(inner_edges):
        d = P.edges[e]
        if d.angle is None:
            raise DegenerateEdge("bending edge is not spacelike", edge=list(e))
        if d.angle > 0:
            leaves.append(Leaf(Geodesic(pos[e[0]], pos[e[1]]), d.angle))
            leaf_edges.append(e)
    lam = PolyhedralLamination(leaves, allow_shared=True, check=False)
    return PleatedBoundary(side, pos, lam, G, leaf_edges)


def bending_laminations(P: IdealPolyhedron):
    """(lam_minus, lam_plus, dev_minus, dev_plus); dev maps xiL_i to developed positions."""
    fut = develop_boundary(P, "future")
    past = develop_boundary(P, "past")
    dev_p = DiscreteCircleMap(P.xiL, fut.positions, check=False)
    dev_m = DiscreteCircleMap(P.xiL, past.positions, check=False)
    return past.lamination, fut.lamination, dev_m, dev_p


def _triangles(P: IdealPolyhedron, side):
    out = []
    for f in P.faces_on(side):
        v = P.faces[f].verts
        for r in range(1, len(v) - 1):
            out.append((v[0], v[r], v[r + 1]))
    return out


def _bary(st):
    s, t = st
    return np.array([1 - s, s * (1 - t), s * t])


def _bary_jac(st):
    s, t = st
    return np.array([[-1.0, 1 - t, t], [0.0, -s, s]])


def width(P: IdealPolyhedron, starts=2) -> float:
    """Max timelike distance between the past and future boundaries.

    Start grid: barycenter and edge-midpoint pairs on every (past, future)
    triangle pair.  The best `starts` grid points of each triangle pair are
    refined with L-BFGS-B in (s, t) coordinates of both triangles, minimizing
    |<x,y>| / sqrt(q(x) q(y)) = cos(distance).
    """
    if P.flat:
        return 0.0
    L = P.lifts
    past, fut = _triangles(P, "past"), _triangles(P, "future")

    def objective(z, A, B):
        x, y = _bary(z[:2]) @ A, _bary(z[2:]) @ B
        qx, qy = -inner(x, x), -inner(y, y)
        if qx <= 1e-300 or qy <= 1e-300:
            return 1e6, np.zeros(4)
        c = inner(x, y)
        r = math.sqrt(qx * qy)
        f = abs(c) / r
        gx = (math.copysign(1.0, c) * (ETA @ y) + f * r / qx * (ETA @ x)) / r
        gy = (math.copysign(1.0, c) * (ETA @ x) + f * r / qy * (ETA @ y)) / r
        grad = np.concatenate([_bary_jac(z[:2]) @ A @ gx, _bary_jac(z[2:]) @ B @ gy])
        return f, grad

    grid = [(2 / 3, 0.5), (0.5, 0.0), (0.5, 1.0), (1.0, 0.5)]
    zs = [np.array(g1 + g2) for g1 in grid for g2 in grid]
    best = math.inf
    for a in past:
        A = L[list(a)]
        for b in fut:
            B = L[list(b)]
            vals = sorted(((objective(z, A, B)[0], k) for k, z in enumerate(zs)))
            for val, k in vals[:starts]:
                r = minimize(objective, zs[k], args=(A, B), jac=True, method="L-BFGS-B",
                             bounds=[(0, 1)] * 4, options={"ftol": 1e-15, "gtol": 1e-12})
                best = min(best, float(r.fun), val)
    return math.acos(min(1.0, best))
