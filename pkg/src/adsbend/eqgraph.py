"""Weighted equator graphs: vertices on the circle joined by an equatorial cycle
of negative edges and by positively weighted plus/minus chords.

Gap i is the equatorial edge (v_i, v_{i+1}); its weight is equator[i].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations

import numpy as np

from .circle import CirclePoint, Geodesic, HypPoint, cyclic_sorted, is_exact, turns_str, visual_distance
from .errors import (BadK, DegenerateM, InvalidGraph, MixedVertex, NonRationalWeights,
                     ParityObstruction, SplitObstruction)
from .lamination import Leaf, PolyhedralLamination, lamination_distance, truncate

KINDS = ("plus", "minus")


@dataclass(frozen=True)
class Chord:
    i: int
    j: int
    kind: str
    w: object

    def ends(self):
        return (self.i, self.j)


def _crosses(c1: Chord, c2: Chord) -> bool:
    a, b = sorted(c1.ends())
    inside = lambda v: a < v < b
    if set(c1.ends()) & set(c2.ends()):
        return False
    return inside(c2.i) != inside(c2.j)


@dataclass(frozen=True)
class EquatorGraph:
    positions: tuple
    equator: tuple
    chords: tuple
    types: tuple = None

    def __post_init__(self):
        k = len(self.positions)
        object.__setattr__(self, "positions", tuple(self.positions))
        object.__setattr__(self, "equator", tuple(self.equator))
        chords = tuple(Chord(min(c.i, c.j), max(c.i, c.j), c.kind, c.w) for c in self.chords)
        object.__setattr__(self, "chords", chords)
        if self.types is None:
            object.__setattr__(self, "types", ("untyped",) * k)
        else:
            object.__setattr__(self, "types", tuple(self.types))
        if k < 3:
            raise InvalidGraph("an equator graph needs at least 3 vertices")
        if len(self.equator) != k or len(self.types) != k:
            raise InvalidGraph("equator weights and types must match the vertex count")
        for i in range(k):
            if self.positions[i] == self.positions[(i + 1) % k]:
                raise InvalidGraph("repeated vertex position", index=i)
        if list(self.positions) != cyclic_sorted(self.positions):
            raise InvalidGraph("vertices must be listed in cyclic order")
        seen = set()
        for c in chords:
            if c.kind not in KINDS:
                raise InvalidGraph(f"unknown chord kind {c.kind!r}")
            if not (0 <= c.i < k and 0 <= c.j < k) or c.i == c.j:
                raise InvalidGraph("chord endpoints out of range", chord=[c.i, c.j])
            if c.j - c.i == 1 or (c.i == 0 and c.j == k - 1):
                raise InvalidGraph("chord joins equator-adjacent vertices", chord=[c.i, c.j])
            if (c.i, c.j) in seen:
                raise InvalidGraph("repeated chord", chord=[c.i, c.j])
            seen.add((c.i, c.j))
        for c1, c2 in combinations(chords, 2):
            if c1.kind == c2.kind and _crosses(c1, c2):
                raise InvalidGraph("chords of equal type cross", chords=[[c1.i, c1.j], [c2.i, c2.j]])

    @property
    def k(self) -> int:
        return len(self.positions)

    def chord_total(self, v):
        return sum((c.w for c in self.chords if v in c.ends()), Fraction(0))

    def vertex_sum(self, v):
        k = self.k
        return self.chord_total(v) + self.equator[v] + self.equator[(v - 1) % k]

    def separation(self, i, j):
        """Chord weight separating gap i from gap j (i < j)."""
        inside = lambda v: i < v <= j
        return sum((c.w for c in self.chords if inside(c.i) != inside(c.j)), Fraction(0))

    def gap_pairs(self):
        k = self.k
        for i in range(k):
            for j in range(i + 2, k):
                if not (i == 0 and j == k - 1):
                    yield i, j

    def replace(self, **kw) -> "EquatorGraph":
        d = dict(positions=self.positions, equator=self.equator, chords=self.chords, types=self.types)
        d.update(kw)
        return EquatorGraph(**d)

    def __repr__(self):
        return f"EquatorGraph(k={self.k}, chords={len(self.chords)})"


@dataclass
class ConditionReport:
    c1: bool
    c2: bool
    c3: bool
    c4: bool
    c2_witnesses: list = field(default_factory=list)
    c3_witnesses: list = field(default_factory=list)
    c4_witnesses: list = field(default_factory=list)
    vertex_sums: list = field(default_factory=list)
    slacks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.c1 and self.c2 and self.c3 and self.c4

    def to_json(self) -> dict:
        s = lambda x: str(x) if is_exact(x) else repr(float(x))
        return {"passed": self.passed,
                "conditions": {"1": self.c1, "2": self.c2, "3": self.c3, "4": self.c4},
                "c2_witnesses": self.c2_witnesses,
                "c3_witnesses": [[v, s(x)] for v, x in self.c3_witnesses],
                "c4_witnesses": [[i, j, s(x)] for (i, j), x in
                                 ((w, self.slacks[w]) for w in self.c4_witnesses)],
                "vertex_sums": [s(x) for x in self.vertex_sums],
                "min_slack": s(min(self.slacks.values())) if self.slacks else None}


def _lcd(ws):
    return reduce(lambda a, b: a * b // math.gcd(a, b), (Fraction(w).denominator for w in ws), 1)


def separation_matrix(g: EquatorGraph):
    """S[i, j] = chord weight separating gap i from gap j, as integers over D."""
    k = g.k
    ws = [c.w for c in g.chords]
    exact = all(is_exact(w) for w in ws)
    D = _lcd(ws) if exact else 1
    S = np.zeros((k, k), dtype=np.int64 if exact else float)
    I = np.arange(k)[:, None]
    J = np.arange(k)[None, :]
    for c in g.chords:
        w = int(Fraction(c.w) * D) if exact else float(c.w)
        ina = (I < c.i) & (c.i <= J)
        inb = (I < c.j) & (c.j <= J)
        S += w * (ina ^ inb)
    return S, D


def check_conditions(g: EquatorGraph) -> ConditionReport:
    k = g.k
    c2w = [["equator", i] for i in range(k) if not g.equator[i] < 0]
    c2w += [["chord", c.i, c.j] for c in g.chords if not c.w > 0]
    tot = [Fraction(0)] * k
    for c in g.chords:
        tot[c.i] += c.w
        tot[c.j] += c.w
    sums = [tot[v] + g.equator[v] + g.equator[(v - 1) % k] for v in range(k)]
    c3w = [(v, s) for v, s in enumerate(sums) if s != 0]
    S, D = separation_matrix(g)
    exact = S.dtype != float
    sep = (lambda i, j: Fraction(int(S[i, j]), D)) if exact else (lambda i, j: S[i, j])
    slacks = {(i, j): sep(i, j) + g.equator[i] + g.equator[j] for i, j in g.gap_pairs()}
    c4w = [p for p, s in slacks.items() if not s > 0]
    return ConditionReport(True, not c2w, not c3w, not c4w, c2w, c3w, c4w, sums, slacks)


def _exact_turns(x: CirclePoint):
    t = x.turns
    if not is_exact(t):
        raise NonRationalWeights("vertex positions must be rational turns", point=str(x))
    return Fraction(t)


def _min_gap(ts):
    ts = sorted(ts)
    return min((ts[(i + 1) % len(ts)] - ts[i]) % 1 for i in range(len(ts)))


def build_gamma0(lam_minus: PolyhedralLamination, lam_plus: PolyhedralLamination, k: int,
                 delta_split=None):
    """Leaf-split graph with one chord endpoint of weight Lambda/k per vertex.

    Returns (graph, binmap) with binmap[c] = (kind, leaf index) for each chord.
    """
    leaves = [("minus", i, l) for i, l in enumerate(lam_minus.leaves)]
    leaves += [("plus", i, l) for i, l in enumerate(lam_plus.leaves)]
    if not leaves:
        raise InvalidGraph("no leaves to build from")
    for _, _, l in leaves:
        if not is_exact(l.weight):
            raise NonRationalWeights("leaf weights must be rational")
    ends = []
    for _, _, l in leaves:
        ends += [_exact_turns(l.a), _exact_turns(l.b)]
    if len(set(ends)) != len(ends):
        raise InvalidGraph("leaves share endpoints")
    if not isinstance(k, int) or k <= 0:
        raise BadK("k must be a positive integer")
    lam = 2 * sum((Fraction(l.weight) for _, _, l in leaves), Fraction(0))
    u = lam / k
    copies = []
    for kind, i, l in leaves:
        c = Fraction(l.weight) / u
        if c.denominator != 1:
            raise BadK("k is not an admissible multiple", k=k, leaf=[kind, i])
        copies.append(int(c))
    if delta_split is None:
        delta_split = Fraction(1, 64 * k)
    gap = min(Fraction(delta_split), _min_gap(ends) / 2)
    verts = []  # (turns, chord id)
    binmap = []
    chord_ends = []
    for (kind, i, l), c in zip(leaves, copies):
        a, b = _exact_turns(l.a), _exact_turns(l.b)
        step = gap / c
        for s in range(c):
            cid = len(binmap)
            binmap.append((kind, i))
            verts.append(((a + s * step) % 1, cid))
            verts.append(((b - s * step) % 1, cid))
            chord_ends.append(kind)
    verts.sort()
    where = {}
    for idx, (_, cid) in enumerate(verts):
        where.setdefault(cid, []).append(idx)
    chords = [Chord(*where[cid], chord_ends[cid], u) for cid in range(len(binmap))]
    positions = [CirclePoint.from_turns(t) for t, _ in verts]
    types = [chord_ends[cid] for _, cid in verts]
    return EquatorGraph(positions, [-u / 2] * len(verts), chords, types), binmap


def color_vertices(g: EquatorGraph):
    """Assign vertex types from incident chords; returns (graph, min plus/minus visual distance)."""
    types = []
    for v in range(g.k):
        kinds = {c.kind for c in g.chords if v in c.ends()}
        if len(kinds) > 1:
            raise MixedVertex("vertex meets chords of both types; increase k or perturb", vertex=v)
        types.append(kinds.pop() if kinds else "untyped")
    o = HypPoint.origin()
    plus = [g.positions[v] for v in range(g.k) if types[v] == "plus"]
    minus = [g.positions[v] for v in range(g.k) if types[v] == "minus"]
    delta = None
    if plus and minus:
        delta = min(visual_distance(o, a, b) for a in plus for b in minus)
    return g.replace(types=types), delta


def resolve_equator(g: EquatorGraph):
    """Equator weights x with x_{i-1} + x_i = -(chord total at v_i), or None if unsolvable."""
    k = g.k
    c = [g.chord_total(v) for v in range(k)]
    # x_i = p_i + (-1)^(i+1) X with X = x_{k-1}
    p, prev = [], Fraction(0)
    for i in range(k):
        prev = -c[i] - prev
        p.append(prev)
    sgn = [(-1) ** (i + 1) for i in range(k)]
    if k % 2:
        X = p[k - 1] / 2
        return [p[i] + sgn[i] * X for i in range(k)]
    if p[k - 1] != 0:
        return None
    # free alternating direction: pick the midpoint of the negativity window
    o = max(p[i] for i in range(0, k, 2))
    e = max(p[i] for i in range(1, k, 2))
    t = (e - o) / 2
    return [p[i] + (t if i % 2 == 0 else -t) for i in range(k)]


def _chord_type(g: EquatorGraph, i, j):
    o = HypPoint.origin()
    best = {}
    for kind in KINDS:
        ds = [0.0 if v in (i, j) else min(visual_distance(o, g.positions[v], g.positions[i]),
                                           visual_distance(o, g.positions[v], g.positions[j]))
              for v in range(g.k) if g.types[v] == kind
              or any(c.kind == kind and v in c.ends() for c in g.chords)]
        best[kind] = min(ds) if ds else math.inf
    return "plus" if best["plus"] <= best["minus"] else "minus"


def fix_condition4(g: EquatorGraph, delta):
    """Add chords of weight delta across every empty non-adjacent gap pair.

    Returns (graph, added) where added lists the new chords, including any
    parity-balancing chord needed to re-solve the equator for even k.
    """
    delta = Fraction(delta)
    if not delta > 0:
        raise ValueError("delta must be positive")
    rep = check_conditions(g)
    if not (rep.c1 and rep.c2 and rep.c3):
        raise InvalidGraph("fix_condition4 needs a graph passing conditions (1)-(3)")
    chords = list(g.chords)
    added = []
    while True:
        cur = g.replace(chords=chords)
        empty = [(i, j) for i, j in cur.gap_pairs() if cur.separation(i, j) == 0]
        if not empty:
            break
        i, j = empty[0]
        ch = Chord(i, j, _chord_type(cur, i, j), delta)
        chords.append(ch)
        added.append(ch)
    if not added:
        return g, []
    cur = g.replace(chords=chords)
    x = resolve_equator(cur)
    if x is None:
        # for even k the alternating sum of chord totals must vanish; a chord
        # joining two vertices of parity e shifts it by 2 w (-1)^e
        alt = sum(((-1) ** v * cur.chord_total(v) for v in range(g.k)), Fraction(0))
        w = abs(alt) / 2
        parity = 0 if alt < 0 else 1
        cand = None
        for kind in KINDS:
            for p, r in combinations(range(g.k), 2):
                if p % 2 != parity or r % 2 != parity:
                    continue
                if r - p == 1 or (p == 0 and r == g.k - 1):
                    continue
                ch = Chord(p, r, kind, w)
                if any((c.i, c.j) == (p, r) for c in chords):
                    continue
                if any(c.kind == kind and _crosses(c, ch) for c in chords):
                    continue
                score = (min(r - p, g.k - (r - p)), -p, -r, kind == "plus")
                if cand is None or score > cand[0]:
                    cand = (score, ch)
        if cand is None:
            raise ParityObstruction("no balancing chord available", k=g.k)
        chords.append(cand[1])
        added.append(cand[1])
        cur = g.replace(chords=chords)
        x = resolve_equator(cur)
        if x is None:
            raise ParityObstruction("equator re-solve infeasible after balancing", k=g.k)
    if not all(v < 0 for v in x):
        raise ParityObstruction("re-solved equator weights are not all negative",
                                equator=[str(v) for v in x])
    return g.replace(chords=chords, equator=x), added


def _gcd_fraction(ws):
    ws = [Fraction(w) for w in ws]
    num = reduce(math.gcd, (w.numerator for w in ws))
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (w.denominator for w in ws))
    return Fraction(num, den)


def min_separation(g: EquatorGraph):
    pairs = list(g.gap_pairs())
    if not pairs:
        return None
    S, D = separation_matrix(g)
    m = min(S[i, j] for i, j in pairs)
    return Fraction(int(m), D) if S.dtype != float else m


def _interleave(a, b):
    """Merge two sequences keeping each order, spreading b evenly through a."""
    out, i, j = [], 0, 0
    while i < len(a) or j < len(b):
        if j >= len(b) or (i < len(a) and (i + 1) * len(b) <= (j + 1) * len(a)):
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    return out


def _split_with(g: EquatorGraph, eps, interleave=False):
    k = g.k
    exact = all(x.hint is not None and is_exact(x.hint) for x in g.positions)
    ts = [Fraction(x.hint) if exact else x.turns_float() for x in g.positions]
    # fan entries per vertex: (sort key, chord id, copy index)
    fans = [[] for _ in range(k)]
    S = {}
    for cid, c in enumerate(g.chords):
        n = Fraction(c.w) / eps
        if n.denominator != 1:
            return None
        S[cid] = int(n)
        kind_key = 0 if c.kind == "plus" else 1
        for s in range(S[cid]):
            off_i = (ts[c.j] - ts[c.i]) % 1
            off_j = (ts[c.i] - ts[c.j]) % 1
            fans[c.i].append(((-off_i, kind_key, s), cid, s))
            fans[c.j].append(((-off_j, kind_key, S[cid] - 1 - s), cid, s))
    biggest = max((len(f) for f in fans), default=1)
    if any(len(f) == 0 for f in fans):
        raise InvalidGraph("every vertex needs a chord before splitting")
    gaps = [(ts[(v + 1) % k] - ts[v]) % 1 for v in range(k)]
    step = min(gaps) / (2 * biggest)
    pos, owner = [], {}
    for v in range(k):
        fan = sorted(fans[v])
        if interleave:
            fan = _interleave([e for e in fan if e[0][1] == 0], [e for e in fan if e[0][1] == 1])
        for r, (_, cid, s) in enumerate(fan):
            owner.setdefault((cid, s), []).append(len(pos))
            pos.append(((ts[v] + r * step) % 1, g.types[v]))
    order = sorted(range(len(pos)), key=lambda i: pos[i][0])
    rank = {old: new for new, old in enumerate(order)}
    chords = []
    for (cid, s), (a, b) in owner.items():
        chords.append(Chord(rank[a], rank[b], g.chords[cid].kind, eps))
    positions = [CirclePoint.from_turns(pos[i][0]) for i in order]
    types = [pos[i][1] for i in order]
    return EquatorGraph(positions, [-eps / 2] * len(pos), chords, types)


def split_vertices(g: EquatorGraph, max_vertices=4000) -> EquatorGraph:
    """Replace vertices by fans of copies so every equator weight is below m/2."""
    rep = check_conditions(g)
    if not (rep.c1 and rep.c2 and rep.c3):
        raise InvalidGraph("split_vertices needs a graph passing conditions (1)-(3)")
    if rep.c4:
        return g
    m = min_separation(g)
    if m == 0:
        raise DegenerateM("a non-adjacent gap pair has zero separation; run fix_condition4 first")
    base = _gcd_fraction([c.w for c in g.chords])
    n = max(1, math.ceil(base / (m / 2)))
    eps = base / n
    last = None
    for _ in range(3):
        total = sum((Fraction(c.w) for c in g.chords), Fraction(0))
        if 2 * total / eps > max_vertices:
            break
        for interleave in (False, True):
            out = _split_with(g, eps, interleave)
            if out is None:
                break
            rep = check_conditions(out)
            if rep.passed:
                return out
            last = rep.c4_witnesses[0]
        eps /= 2
    raise SplitObstruction("vertex splitting did not reach condition (4)",
                           witness=list(last) if last else None, m=str(m))


def graph_to_laminations(g: EquatorGraph):
    """(minus, plus) laminations carried by the chords."""
    out = {}
    for kind in KINDS:
        leaves = [Leaf(Geodesic(g.positions[c.i], g.positions[c.j]), c.w)
                  for c in g.chords if c.kind == kind]
        out[kind] = PolyhedralLamination(leaves, allow_shared=True, check=False)
    return out["minus"], out["plus"]


@dataclass
class Approximation:
    graph: EquatorGraph
    distance: float
    bound: float
    added: list
    lam_minus: PolyhedralLamination
    lam_plus: PolyhedralLamination
    delta: float = None


def approximate(lam_minus, lam_plus, o: HypPoint, n, k: int, delta=None,
                delta_split=None) -> Approximation:
    """truncate -> build_gamma0 -> color -> fix_condition4 -> split_vertices."""
    tm, tp = truncate(lam_minus, o, n), truncate(lam_plus, o, n)
    if delta is None:
        delta = Fraction(1, n) if isinstance(n, int) else Fraction(1 / n).limit_denominator(10 ** 6)
    g0, _ = build_gamma0(tm, tp, k, delta_split)
    g1, sep_delta = color_vertices(g0)
    g2, added = fix_condition4(g1, delta)
    g3 = split_vertices(g2)
    gm, gp = graph_to_laminations(g3)
    dist = lamination_distance(gm, tm) + lamination_distance(gp, tp)
    if delta_split is None:
        delta_split = Fraction(1, 64 * k)
    mass = float(sum((c.w for c in g3.chords), Fraction(0)))
    spread = float(delta_split) + (1.0 / (2 * g3.k) if g3 is not g2 else 0.0)
    bound = 4 * math.pi * spread * mass + float(sum((c.w for c in added), Fraction(0)))
    return Approximation(g3, dist, bound, added, tm, tp, sep_delta)


def to_json(g: EquatorGraph) -> dict:
    s = lambda x: str(x) if is_exact(x) else repr(float(x))
    k = g.k
    edges = [{"i": i, "j": (i + 1) % k, "kind": "equator", "w": s(g.equator[i])} for i in range(k)]
    edges += [{"i": c.i, "j": c.j, "kind": c.kind, "w": s(c.w)} for c in g.chords]
    return {"vertices": [{"pos": turns_str(p), "type": t} for p, t in zip(g.positions, g.types)],
            "edges": edges}


def from_json(obj) -> EquatorGraph:
    try:
        return _from_json(obj)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        if isinstance(e, InvalidGraph):
            raise
        raise InvalidGraph(f"malformed graph: {e}") from e


def _from_json(obj) -> EquatorGraph:
    from .circle import as_number
    verts = obj["vertices"]
    k = len(verts)
    positions = [CirclePoint.from_turns(v["pos"]) for v in verts]
    types = [v.get("type", "untyped") for v in verts]
    equator = [None] * k
    chords = []
    for e in obj["edges"]:
        i, j, kind, w = int(e["i"]), int(e["j"]), e["kind"], as_number(e["w"])
        if kind == "equator":
            if (i + 1) % k == j:
                equator[i] = w
            elif (j + 1) % k == i:
                equator[j] = w
            else:
                raise InvalidGraph("equator edge between non-consecutive vertices", edge=[i, j])
        else:
            chords.append(Chord(i, j, kind, w))
    if any(x is None for x in equator):
        raise InvalidGraph("missing equator edge")
    return EquatorGraph(positions, equator, chords, types)
