"""Numerical realization of equator graphs as ideal polyhedra, and hull diagnostics.

Unknowns are the boundary coordinates (xiL_i, xiR_i) in turns of all vertices
except three pinned ones.  Each face of the graph on either side is fan
triangulated; the residual compares signed dihedral angles of this prescribed
triangulated surface with the targets (graph weights on chords and equator,
zero on fan diagonals).  A damped Gauss-Newton (Levenberg-Marquardt) loop
with central-difference Jacobians drives the residual to zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ads import ETA, canonical_lifts, inner
from .circle import CirclePoint, DiscreteCircleMap, Geodesic, mobius_from_triples
from .errors import CombinatoricsMismatch, NonConvergence, SolverError
from .hull import (IdealPolyhedron, _cofactor_normal, bending_laminations, convex_hull,
                   dihedral_angles, width)
from .eqgraph import Chord, EquatorGraph
from .lamination import Leaf, PolyhedralLamination, boundedness_bounds
from .quake import EarthquakeMap, qs_constant

PINS_TURNS = (Fraction(0), Fraction(1, 4), Fraction(1, 2))


def pinned_vertices(n):
    return (0, n // 3, 2 * n // 3)


def _faces(k, chords):
    """Regions of the k-gon cut by non-crossing chords, as cyclic vertex lists."""
    faces = [list(range(k))]
    for i, j in chords:
        for f in faces:
            if i in f and j in f:
                a, b = f.index(i), f.index(j)
                a, b = min(a, b), max(a, b)
                faces.remove(f)
                faces.append(f[a:b + 1])
                faces.append(f[b:] + f[:a + 1])
                break
    return faces


@dataclass
class Surface:
    """Fan-triangulated boundary component with target angles per edge."""

    triangles: list
    targets: dict = field(default_factory=dict)
    diagonals: list = field(default_factory=list)


def triangulate(g, kind):
    chords = [(c.i, c.j) for c in g.chords if c.kind == kind]
    tris, diags = [], []
    for f in _faces(g.k, chords):
        for r in range(1, len(f) - 1):
            tris.append(tuple(sorted((f[0], f[r], f[r + 1]))))
            if r > 1:
                diags.append(tuple(sorted((f[0], f[r]))))
    return Surface(tris, {(c.i, c.j): float(c.w) for c in g.chords if c.kind == kind}, diags)


class Problem:
    """Residual map for a graph with fixed triangulation and pins."""

    def __init__(self, g):
        self.g = g
        self.n = n = g.k
        self.pins = pinned_vertices(n)
        self.free = [i for i in range(n) if i not in self.pins]
        self.plus = triangulate(g, "plus")
        self.minus = triangulate(g, "minus")
        edge_tris = {}
        for t in self.plus.triangles + self.minus.triangles:
            for e in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2])):
                edge_tris.setdefault(e, []).append(t)
        self.edges, self.targets, self.signs = [], [], []
        for i in range(n):
            e = tuple(sorted((i, (i + 1) % n)))
            self._add(e, float(g.equator[i]), -1.0, edge_tris)
        for s in (self.plus, self.minus):
            for e, w in sorted(s.targets.items()):
                self._add(e, w, 1.0, edge_tris)
            for e in s.diagonals:
                self._add(e, 0.0, 1.0, edge_tris)
        self.targets = np.array(self.targets)
        self.triangles = sorted({t for ts in edge_tris.values() for t in ts})
        self.tindex = {t: a for a, t in enumerate(self.triangles)}

    def _add(self, e, target, sign, edge_tris):
        ts = edge_tris.get(e, [])
        if len(ts) != 2:
            raise SolverError("graph does not triangulate to a closed surface", edge=list(e))
        self.edges.append((e, ts[0], ts[1]))
        self.targets.append(target)
        self.signs.append(sign)

    def turns(self, z):
        tL = np.empty(self.n)
        tR = np.empty(self.n)
        for p, t in zip(self.pins, PINS_TURNS):
            tL[p] = tR[p] = float(t)
        m = len(self.free)
        tL[self.free] = z[:m]
        tR[self.free] = z[m:]
        return tL, tR

    def ordered(self, z) -> bool:
        tL, tR = self.turns(z)
        return bool(np.all(np.diff(tL) > 0) and np.all(np.diff(tR) > 0)
                    and tL[-1] < 1 and tR[-1] < 1)

    def lifts(self, z):
        tL, tR = self.turns(z)
        return canonical_lifts([CirclePoint.from_turns(t) for t in tL],
                               [CirclePoint.from_turns(t) for t in tR])

    def angles(self, z):
        """Signed angles on all target edges, or None if a face is not spacelike."""
        P = self.lifts(z)
        P = P / np.linalg.norm(P, axis=1)[:, None]
        c = P.sum(axis=0)
        normals = []
        for t in self.triangles:
            N = ETA @ _cofactor_normal(P[list(t)])
            if inner(N, c) > 0:
                N = -N
            s = -inner(N, N)
            if s <= 1e-14 * float(np.dot(N, N)):
                return None
            normals.append(N / math.sqrt(s))
        out = np.empty(len(self.edges))
        for a, (e, t1, t2) in enumerate(self.edges):
            n1, n2 = normals[self.tindex[t1]], normals[self.tindex[t2]]
            k = [v for v in t1 if v not in e][0]
            l = [v for v in t2 if v not in e][0]
            conv = -(inner(n1, P[l]) + inner(n2, P[k]))
            mag = math.acosh(max(1.0, abs(inner(n1, n2))))
            out[a] = self.signs[a] * math.copysign(mag, conv)
        return out

    def residual(self, z):
        a = self.angles(z)
        return None if a is None else a - self.targets


def warm_start(g, pins=None):
    """xiL equally spaced; xiR its left earthquake along twice the plus chords."""
    n = g.k
    pins = pins or pinned_vertices(n)
    xL = [CirclePoint.from_turns(i / n) for i in range(n)]
    lam = PolyhedralLamination([Leaf(Geodesic(xL[i], xL[j]), 2 * float(w))
                                for (i, j), w in _chord_pairs(g, "plus")],
                               allow_shared=True, check=False)
    E = EarthquakeMap(lam, "left")
    xR = [E(x) for x in xL]
    target = [CirclePoint.from_turns(t) for t in PINS_TURNS]
    mL = mobius_from_triples([xL[p] for p in pins], target)
    mR = mobius_from_triples([xR[p] for p in pins], target)
    tL = np.array([mL(x).turns_float() for x in xL])
    tR = np.array([mR(x).turns_float() for x in xR])
    for p, t in zip(pins, PINS_TURNS):
        tL[p] = tR[p] = float(t)
    return tL, tR


def _chord_pairs(g, kind):
    return [((c.i, c.j), c.w) for c in g.chords if c.kind == kind]


def _jacobian(prob, z, r0, h=1e-6):
    J = np.empty((len(r0), len(z)))
    for j in range(len(z)):
        zp, zm = z.copy(), z.copy()
        zp[j] += h
        zm[j] -= h
        rp, rm = prob.residual(zp), prob.residual(zm)
        if rp is None or rm is None or not (prob.ordered(zp) and prob.ordered(zm)):
            # one-sided fallback
            if rp is not None and prob.ordered(zp):
                J[:, j] = (rp - r0) / h
            elif rm is not None and prob.ordered(zm):
                J[:, j] = (r0 - rm) / h
            else:
                J[:, j] = 0.0
        else:
            J[:, j] = (rp - rm) / (2 * h)
    return J


def _levenberg_marquardt(prob, z, tol, max_iter):
    r = prob.residual(z)
    if r is None or not prob.ordered(z):
        raise SolverError("initial configuration is infeasible")
    cost = float(r @ r)
    mu = 1e-3
    it = 0
    for it in range(max_iter):
        if np.max(np.abs(r)) < tol:
            break
        J = _jacobian(prob, z, r)
        A = J.T @ J
        gvec = J.T @ r
        accepted = False
        for _ in range(40):
            D = np.diag(np.maximum(np.diag(A), 1e-12))
            try:
                step = -np.linalg.solve(A + mu * D, gvec)
            except np.linalg.LinAlgError:
                mu *= 4
                continue
            zn = z + step
            rn = prob.residual(zn) if prob.ordered(zn) else None
            if rn is not None and float(rn @ rn) < cost:
                z, r, cost = zn, rn, float(rn @ rn)
                mu = max(mu / 2, 1e-12)
                accepted = True
                break
            mu *= 2
        if not accepted:
            break
    return z, r, it


def realize(g, tol=1e-10, max_iter=200, seed=0, init=None):
    """Find (xiL, xiR) whose hull has the combinatorics and angles of g.

    Returns (u, residual): u is the map xiL_i -> xiR_i and residual is the max
    deviation of the hull's dihedral angles from the graph weights, measured
    on the final hull with the pins at their exact values.  `seed`
    perturbs the warm start by a deterministic jitter when nonzero.
    """
    prob = Problem(g)
    tL, tR = init if init is not None else warm_start(g, prob.pins)
    z0 = np.concatenate([np.asarray(tL)[prob.free], np.asarray(tR)[prob.free]])
    if seed:
        rng = np.random.default_rng(seed)
        zj = z0 + rng.normal(scale=1e-3, size=z0.shape)
        if prob.ordered(zj) and prob.residual(zj) is not None:
            z0 = zj
    z, r, it = _levenberg_marquardt(prob, z0, tol, max_iter)
    tL, tR = prob.turns(z)
    u = _config(tL, tR, prob.pins)
    rmax = float(np.max(np.abs(r)))
    if rmax >= tol:
        raise NonConvergence("residual above tolerance", best=u, residual=rmax)
    P = convex_hull(u)
    if _plus_is_past(P, g):
        u = _config(tR, tL, prob.pins)
        P = convex_hull(u)
    return u, _check_combinatorics(P, g)


def _config(tL, tR, pins):
    def pt(i, t):
        if i in pins:
            return CirclePoint.from_turns(PINS_TURNS[pins.index(i)])
        return CirclePoint.from_turns(float(t))
    xL = [pt(i, t) for i, t in enumerate(tL)]
    xR = [pt(i, t) for i, t in enumerate(tR)]
    return DiscreteCircleMap(xL, xR, check=False)


def _plus_is_past(P: IdealPolyhedron, g) -> bool:
    plus = [(c.i, c.j) for c in g.chords if c.kind == "plus"]
    for e in plus:
        if e in P.edges:
            return P.edges[e].kind == "bend_past"
    # no plus chord: compare with minus chords
    for c in g.chords:
        if (c.i, c.j) in P.edges:
            return P.edges[(c.i, c.j)].kind == "bend_future"
    return False


def _check_combinatorics(P: IdealPolyhedron, g) -> float:
    """Max angle deviation; raises CombinatoricsMismatch if edges differ."""
    want = {tuple(sorted((i, (i + 1) % g.k))): ("equator", float(g.equator[i])) for i in range(g.k)}
    for c in g.chords:
        want[(c.i, c.j)] = ("bend_future" if c.kind == "plus" else "bend_past", float(c.w))
    have = {e: d.kind for e, d in P.edges.items()}
    if set(have) != set(want) or any(have[e] != want[e][0] for e in want):
        extra = sorted(set(have) - set(want))
        missing = sorted(set(want) - set(have))
        raise CombinatoricsMismatch("hull combinatorics differ from the graph",
                                    extra=[list(e) for e in extra],
                                    missing=[list(e) for e in missing])
    ang = dihedral_angles(P)
    return max(abs(ang[e] - w) for e, (_, w) in want.items())


def extract_graph(P: IdealPolyhedron):
    """Equator graph of a non-degenerate hull: vertices at xiL, weights = dihedral angles."""
    ang = dihedral_angles(P)
    n = P.n
    eq = [ang[tuple(sorted((i, (i + 1) % n)))] for i in range(n)]
    chords = [Chord(e[0], e[1], "plus" if d.kind == "bend_future" else "minus", ang[e])
              for e, d in sorted(P.edges.items()) if d.kind != "equator"]
    return EquatorGraph(list(P.xiL), eq, chords)


def hull_diagnostics(P: IdealPolyhedron, eps=0.5) -> dict:
    """Width, width margin, bending boundedness and quasi-symmetry constants."""
    w = width(P)
    out = {"width": w, "margin": math.pi / 2 - w}
    lm, lp, dm, dp = bending_laminations(P)
    out["bounds_minus"] = list(boundedness_bounds(lm)) if len(lm) else [0, 0]
    out["bounds_plus"] = list(boundedness_bounds(lp)) if len(lp) else [0, 0]
    K = {}
    for name, dev in (("minus", dm), ("plus", dp)):
        pos = list(dev.values)
        for side, target in (("L", P.xiL), ("R", P.xiR)):
            v = DiscreteCircleMap(pos, list(target), check=False)
            K[f"{side}_{name}"] = qs_constant(v, eps).K if P.n >= 4 else 1.0
    out["K"] = K
    return out
