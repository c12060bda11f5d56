"""Weighted planar and surface separators, the three-way driver and the outer loop."""

from __future__ import annotations

import json
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

from .embedded import EmbeddedGraph, induced_embedding, triangulate
from .errors import DegenerateFace, IterationLimitExceeded, NotPlanar, SurfsepError

log = logging.getLogger(__name__)

ALPHA = 2 / 3


# -- results and verification ------------------------------------------------------------


@dataclass
class TraceStep:
    """One iteration of the outer loop."""

    kind: str  # "planar", "cycle", "separator", "frame", "fallback"
    n_j: int
    g_j: int
    k: int
    added: int
    genus_before: int | None = None
    genus_after: int | None = None
    stage: str = ""
    frame: dict | None = None


@dataclass
class SeparatorResult:
    vertices: list[int]
    alpha: float
    component_weights: list[float]
    removed_cycles: list[list[int]] = field(default_factory=list)
    size_bound_checked: bool = False
    total_weight: float = 0
    trace: list[TraceStep] = field(default_factory=list)
    constants: dict = field(default_factory=dict)

    @property
    def vertex_set(self) -> set[int]:
        return set(self.vertices)

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def balance(self) -> float:
        """Largest component weight as a fraction of the total weight."""
        if not self.component_weights or not self.total_weight:
            return 0.0
        return max(self.component_weights) / self.total_weight

    @property
    def balanced(self) -> bool:
        return all(w <= self.alpha * self.total_weight for w in self.component_weights)

    def to_dict(self) -> dict:
        return {
            "separator": self.vertices,
            "alpha": self.alpha,
            "total_weight": self.total_weight,
            "component_weights": self.component_weights,
            "removed_cycles": self.removed_cycles,
            "size_bound_checked": self.size_bound_checked,
            "constants": self.constants,
            "trace": [
                {k: v for k, v in step.__dict__.items() if v is not None and v != ""} for step in self.trace
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    alpha: float
    total_weight: float
    component_weights: tuple
    separator_size: int

    @property
    def max_component(self) -> float:
        return max(self.component_weights, default=0)


def _components(adj: Sequence[Sequence[int]], n: int, removed: set[int]) -> list[list[int]]:
    seen = [False] * n
    for v in removed:
        seen[v] = True
    out = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        i = 0
        while i < len(comp):
            u = comp[i]
            i += 1
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
        out.append(comp)
    return out


def component_weights(G: EmbeddedGraph, S, weights=None) -> list[float]:
    comps = _components(G.adjacency, G.n, set(S))
    if weights is None:
        ws = [len(c) for c in comps]
    else:
        ws = [sum(weights[v] for v in c) for c in comps]
    return sorted(ws, reverse=True)


def verify_separator(G: EmbeddedGraph, S, alpha: float = ALPHA, weights=None) -> VerificationReport:
    """Recompute the components of G minus S and compare each against alpha * W."""
    S = set(S)
    bad = [v for v in S if not 0 <= v < G.n]
    if bad:
        raise SurfsepError(f"separator vertices out of range: {bad[:5]}")
    total = G.n if weights is None else sum(weights)
    ws = component_weights(G, S, weights)
    passed = all(w <= alpha * total for w in ws)
    return VerificationReport(passed, alpha, total, tuple(ws), len(S))


def _result(G: EmbeddedGraph, S, alpha: float, weights=None, **extra) -> SeparatorResult:
    S = sorted(set(S))
    total = G.n if weights is None else sum(weights)
    return SeparatorResult(S, alpha, component_weights(G, S, weights), total_weight=total, **extra)


# -- graph surgery -----------------------------------------------------------------------


def simplify(G: EmbeddedGraph) -> EmbeddedGraph:
    """Drop loops and all but the lowest-id copy of parallel edges."""
    keep = {}
    for e, (u, v) in enumerate(G.edge_ends):
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key not in keep:
            keep[key] = e
    if len(keep) == G.m:
        return G
    new_id = {e: i for i, e in enumerate(sorted(keep.values()))}
    ends = [G.edge_ends[e] for e in sorted(keep.values())]
    rot = [
        [2 * new_id[d >> 1] + (d & 1) for d in r if (d >> 1) in new_id]
        for r in G.rotation
    ]
    return EmbeddedGraph(G.n, ends, rot, labels=G.labels, validate=False)


def contract_tree(G: EmbeddedGraph, C: set[int], tree_darts: dict[int, list[int]], root: int) -> EmbeddedGraph:
    """Contract the connected set C (spanned by ``tree_darts``: vertex -> child
    darts) into one vertex, keeping the rotation system consistent.

    The merged vertex takes index 0 and the label -1; every other vertex keeps
    its label.  Edges inside C are dropped.
    """
    children = {d for ds in tree_darts.values() for d in ds}
    tour = []
    # iterative Euler tour around the tree
    iters = []

    def darts_around(v, entry):
        r = G.rotation[v]
        if entry is None:
            return iter(r)
        i = r.index(entry ^ 1)
        return iter(r[i + 1:] + r[:i])

    iters.append(darts_around(root, None))
    while iters:
        it = iters[-1]
        advanced = False
        for d in it:
            if d in children:
                iters.append(darts_around(G.head(d), d))
                advanced = True
                break
            if G.head(d) in C:
                continue
            tour.append(d)
        if not advanced:
            iters.pop()
    rest = [v for v in range(G.n) if v not in C]
    local = {v: i + 1 for i, v in enumerate(rest)}
    for v in C:
        local[v] = 0
    new_edge = {}
    ends = []
    for e, (u, v) in enumerate(G.edge_ends):
        if u in C and v in C:
            continue
        new_edge[e] = len(ends)
        ends.append((local[u], local[v]))

    def nd(d):
        return 2 * new_edge[d >> 1] + (d & 1)

    rot = [[nd(d) for d in tour]]
    for v in rest:
        rot.append([nd(d) for d in G.rotation[v] if (d >> 1) in new_edge])
    labels = [-1] + [G.labels[v] for v in rest]
    return EmbeddedGraph(len(rest) + 1, ends, rot, labels=labels, validate=False)


def bfs(G: EmbeddedGraph, root: int):
    """Distances, parent darts and levels of a BFS from root (unreached: -1)."""
    dist = [-1] * G.n
    pdart = [-1] * G.n
    dist[root] = 0
    order = [root]
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        for d in G.rotation[u]:
            w = G.head(d)
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                pdart[w] = d
                order.append(w)
    levels: list[list[int]] = [[] for _ in range(max(dist) + 1)]
    for v in order:
        levels[dist[v]].append(v)
    return dist, pdart, levels


def center_root(G: EmbeddedGraph, start: int) -> int:
    """Middle vertex of a double-sweep BFS path (a cheap approximate center)."""
    _, _, lv = bfs(G, start)
    a = min(lv[-1])
    dist, pdart, lv = bfs(G, a)
    b = min(lv[-1])
    path = [b]
    while path[-1] != a:
        path.append(G.tail(pdart[path[-1]]))
    return path[len(path) // 2]


def _heavy_component(G: EmbeddedGraph, weights, removed: set[int], frac: float):
    total = sum(weights)
    for comp in _components(G.adjacency, G.n, removed):
        if sum(weights[v] for v in comp) > frac * total:
            return comp
    return None


# -- weighted planar separator -----------------------------------------------------------


def _median_level_separator(G: EmbeddedGraph, w: Sequence[float], root: int) -> set[int]:
    """The BFS level holding the weighted median; both sides weigh at most W/2."""
    _, _, levels = bfs(G, root)
    total = sum(w)
    acc = 0
    for lev in levels:
        lw = sum(w[v] for v in lev)
        if acc + lw >= total / 2:
            return set(lev)
        acc += lw
    return set(levels[-1])


def _planar_step(G: EmbeddedGraph, w: Sequence[float], c: Sequence[float] | None = None) -> set[int]:
    """One fundamental-cycle separator step on a connected genus-0 graph.

    ``c`` is the price of putting each vertex into the separator (default 1);
    level and cycle choices minimize price among the balanced options.
    """
    total = sum(w)
    c = [1] * G.n if c is None else c
    cbar = sum(c) / max(G.n, 1)
    heavy = [v for v in range(G.n) if w[v] > ALPHA * total]
    if heavy:
        return {heavy[0]}
    root = center_root(G, 0)
    try:
        T = triangulate(simplify(G))
    except DegenerateFace:
        return _median_level_separator(G, w, root)
    dist, pdart, levels = bfs(T, root)
    h = len(levels) - 1
    acc = 0
    lm = h
    for l, lev in enumerate(levels):
        acc += sum(w[v] for v in lev)
        if acc >= total / 2:
            lm = l
            break

    def size(l):
        return sum(c[v] for v in levels[l]) if 0 <= l <= h else 0

    # any single level with at most alpha*W on either side is already a separator
    lw = [sum(w[v] for v in lev) for lev in levels]
    below = 0
    single = None
    for l in range(h + 1):
        above = total - below - lw[l]
        if below <= ALPHA * total and above <= ALPHA * total and (single is None or size(l) < size(single)):
            single = l
        below += lw[l]
    best = _planar_levels_and_cycle(T, w, c, cbar, levels, lm, root, total, size)
    if single is not None and size(single) <= sum(c[v] for v in best):
        return set(levels[single])
    return best


def _planar_levels_and_cycle(T, w, c, cbar, levels, lm, root, total, size) -> set[int]:
    """Two cheap levels around the median plus, if needed, a fundamental cycle of the band."""
    h = len(levels) - 1
    l0 = min(range(-1, lm + 1), key=lambda l: (size(l) + 2 * cbar * (lm - l), -l))
    l2 = min(range(lm, h + 2), key=lambda l: (size(l) + 2 * cbar * (l - lm), l))
    S = set()
    for l in (l0, l2):
        if 0 <= l <= h:
            S |= set(levels[l])
    band = [v for l in range(l0 + 1, min(l2, h + 1)) for v in levels[l]]
    if sum(w[v] for v in band) <= ALPHA * total or not band:
        return S
    # contract levels <= l0 into a single root, drop levels >= l2
    low = {v for l in range(0, l0 + 1) for v in levels[l]}
    keep = set(band) | low
    H = induced_embedding(T, keep)
    keep_sorted = sorted(keep)  # H renumbers kept vertices in increasing order
    back = dict(enumerate(keep_sorted))
    if low:
        low_local = {i for i, v in back.items() if v in low}
        hd, hp, _ = bfs(H, keep_sorted.index(root))
        tree: dict[int, list[int]] = {}
        for v in low_local:
            if hp[v] >= 0 and H.tail(hp[v]) in low_local:
                tree.setdefault(H.tail(hp[v]), []).append(hp[v])
        K = contract_tree(H, low_local, tree, keep_sorted.index(root))
        rest = [i for i in range(H.n) if i not in low_local]
        kback = {0: None}
        for j, i in enumerate(rest):
            kback[j + 1] = back[i]
        kroot = 0
    else:
        K = H
        kback = {i: back[i] for i in range(H.n)}
        kroot = keep_sorted.index(root)
    kw = [0 if kback[i] is None else w[kback[i]] for i in range(K.n)]
    kc = [0 if kback[i] is None else c[kback[i]] for i in range(K.n)]
    try:
        KT = triangulate(simplify(K))
    except DegenerateFace:
        sub = _median_level_separator(K, kw, kroot)
        return S | {kback[i] for i in sub if kback[i] is not None}
    cyc = best_fundamental_cycle(KT, kw, kroot, kc, ALPHA * total)
    return S | {kback[i] for i in cyc if kback[i] is not None}


def best_fundamental_cycle(
    T: EmbeddedGraph,
    w: Sequence[float],
    root: int,
    cost: Sequence[float] | None = None,
    limit: float | None = None,
) -> list[int]:
    """Vertices of the cheapest BFS fundamental cycle whose heavier side is
    at most ``limit``; without such a cycle, the one minimizing the heavier side.

    T must be a connected planar triangulation.  Vertex weights are charged
    to one incident face each; the dual spanning tree of non-tree edges then
    gives every cycle's side weights as a subtree sum, corrected for the
    weights of vertices lying on the cycle itself.
    """
    dist, pdart, _ = bfs(T, root)
    tree = {pdart[v] >> 1 for v in range(T.n) if pdart[v] >= 0}
    fo = T.face_of
    nf = len(T.faces)
    rep = [fo[T.rotation[v][0]] for v in range(T.n)]
    fw = [0.0] * nf
    for v in range(T.n):
        fw[rep[v]] += w[v]
    # dual tree rooted at face 0
    parent_edge = [-1] * nf
    order = [0]
    seen = [False] * nf
    seen[0] = True
    i = 0
    while i < len(order):
        f = order[i]
        i += 1
        for d in T.faces[f].darts:
            if (d >> 1) in tree:
                continue
            g = fo[d ^ 1]
            if not seen[g]:
                seen[g] = True
                parent_edge[g] = d >> 1
                order.append(g)
    sub = fw[:]
    for f in reversed(order[1:]):
        e = parent_edge[f]
        a, b = fo[2 * e], fo[2 * e + 1]
        p = a if b == f else b
        sub[p] += sub[f]
    # Euler-tour intervals
    kids: dict[int, list[int]] = {}
    for f in order[1:]:
        e = parent_edge[f]
        a, b = fo[2 * e], fo[2 * e + 1]
        kids.setdefault(a if b == f else b, []).append(f)
    tin = [0] * nf
    tout = [0] * nf
    t = 0
    stack = [(0, False)]
    while stack:
        f, done = stack.pop()
        if done:
            tout[f] = t - 1
            continue
        tin[f] = t
        t += 1
        stack.append((f, True))
        for c in kids.get(f, ()):
            stack.append((c, False))
    total = sum(w)
    best = None
    for f in order[1:]:
        e = parent_edge[f]
        u, v = T.edge_ends[e]
        path = _tree_cycle(T, pdart, dist, u, v)
        cw_in = sum(w[x] for x in path if tin[f] <= tin[rep[x]] <= tout[f])
        cw = sum(w[x] for x in path)
        inside = sub[f] - cw_in
        outside = total - sub[f] - (cw - cw_in)
        heavier = max(inside, outside)
        price = len(path) if cost is None else sum(cost[x] for x in path)
        if limit is not None and heavier <= limit:
            key = (0, price, heavier, e)
        else:
            key = (1, heavier, price, e)
        if best is None or key < best[0]:
            best = (key, path)
    if best is None:
        return [root]
    return best[1]


def _tree_cycle(T: EmbeddedGraph, pdart, dist, u: int, v: int) -> list[int]:
    a, b = u, v
    left, right = [a], [b]
    while dist[a] > dist[b]:
        a = T.tail(pdart[a])
        left.append(a)
    while dist[b] > dist[a]:
        b = T.tail(pdart[b])
        right.append(b)
    while a != b:
        a = T.tail(pdart[a])
        b = T.tail(pdart[b])
        left.append(a)
        right.append(b)
    return left + right[-2::-1]


def weighted_planar_separator(
    G: EmbeddedGraph,
    weights: Sequence[float] | None = None,
    alpha: float = ALPHA,
    max_rounds: int | None = None,
    costs: Sequence[float] | None = None,
) -> SeparatorResult:
    """2/3-balanced vertex separator of a genus-0 graph with vertex weights.

    Each round splits the currently heavy component with the level/cycle
    construction; rounds repeat until no component is heavy.
    """
    if any(g != 0 for g in G.genus_per_component):
        raise NotPlanar("weighted_planar_separator needs a genus-0 embedding")
    w = [1] * G.n if weights is None else list(weights)
    S: set[int] = set()
    rounds = 0
    limit = max_rounds or (G.n + 5)
    while True:
        comp = _heavy_component(G, w, S, alpha)
        if comp is None:
            break
        rounds += 1
        if rounds > limit:
            raise IterationLimitExceeded("planar separator did not converge")
        H = induced_embedding(G, comp)
        back = sorted(comp)
        hw = [w[v] for v in back]
        if sum(hw) <= 0:
            break
        part = _planar_step(H, hw, None if costs is None else [costs[v] for v in back])
        if not part:
            part = {max(range(H.n), key=lambda i: (hw[i], -i))}
        S |= {back[i] for i in part}
    return _result(G, S, alpha, w if weights is not None else None)


# -- weighted surface separator --------------------------------------------------------------


def shortest_nonseparating_cycle(G: EmbeddedGraph, root: int, cost=None) -> list[int] | None:
    """Shortest fundamental cycle of a tree-cotree leftover edge (BFS tree from root).

    Leftover edges exist exactly when the component has positive genus and
    their fundamental cycles are non-separating.  Returns vertices.
    """
    dist, pdart, _ = bfs(G, root)
    tree = {pdart[v] >> 1 for v in range(G.n) if pdart[v] >= 0}
    fo = G.face_of
    nf = len(G.faces)
    seen = [False] * nf
    cotree = set()
    for s in range(nf):
        if seen[s]:
            continue
        seen[s] = True
        queue = deque([s])
        while queue:
            f = queue.popleft()
            for d in G.faces[f].darts:
                e = d >> 1
                if e in tree:
                    continue
                g = fo[d ^ 1]
                if not seen[g]:
                    seen[g] = True
                    cotree.add(e)
                    queue.append(g)
    best = None
    for e, (u, v) in enumerate(G.edge_ends):
        if e in tree or e in cotree or dist[u] < 0:
            continue
        path = _tree_cycle(G, pdart, dist, u, v)
        price = len(path) if cost is None else sum(cost[x] for x in path)
        if best is None or price < best[0]:
            best = (price, path)
    return None if best is None else best[1]


def weighted_surface_separator(
    G: EmbeddedGraph,
    weights: Sequence[float] | None = None,
    alpha: float = ALPHA,
    costs: Sequence[float] | None = None,
) -> SeparatorResult:
    """Separator for a weighted graph of any genus.

    While the heavy component has positive genus, cut it along its shortest
    non-separating tree-cotree cycle; once it is planar, finish with the
    weighted planar separator.
    """
    w = [1] * G.n if weights is None else list(weights)
    S: set[int] = set()
    cycles = []
    limit = G.n + G.genus + 5
    for _ in range(limit):
        comp = _heavy_component(G, w, S, alpha)
        if comp is None:
            break
        H = induced_embedding(G, comp)
        back = sorted(comp)
        hw = [w[v] for v in back]
        if H.genus == 0:
            hc = None if costs is None else [costs[v] for v in back]
            part = weighted_planar_separator(H, hw, alpha, costs=hc).vertices
            # the planar separator balances against the component's weight,
            # which is at most the total
            S |= {back[i] for i in part}
            continue
        hc = None if costs is None else [costs[v] for v in back]
        cyc = shortest_nonseparating_cycle(H, center_root(H, 0), hc)
        if cyc is None:  # defensive: positive genus always leaves an edge
            raise SurfsepError("no leftover edge in a positive-genus component")
        cycles.append([back[i] for i in cyc])
        S |= {back[i] for i in cyc}
    else:
        raise IterationLimitExceeded("surface separator did not converge")
    res = _result(G, S, alpha, w if weights is not None else None)
    res.constants["cut_cycles"] = len(cycles)
    return res


# -- lifting a frame graph to a vertex-face incidence graph ---------------------------------------


@dataclass
class RadialGraph:
    graph: EmbeddedGraph
    weights: list[int]
    vertex_of: list[int]  # radial node -> G vertex, or -1 for face nodes
    face_vertices: dict[int, list[int]]  # face node -> G vertices on its boundary


def radial_graph(G: EmbeddedGraph, fg) -> RadialGraph:
    """Vertex-face incidence graph of a frame subgraph with its face weights.

    One node per frame vertex (weight 1) and per frame face (weight = G
    vertices strictly inside), one edge per frame dart joining its tail to
    its face.  Removing a face node together with its boundary vertices
    detaches everything strictly inside that face.
    """
    verts = sorted(fg.vertices)
    vid = {v: i for i, v in enumerate(verts)}
    nv = len(verts)
    face_of_dart = {}
    for i, orbit in enumerate(fg.faces):
        for d in orbit:
            face_of_dart[d] = i
    darts = sorted(face_of_dart)
    eid = {d: i for i, d in enumerate(darts)}
    ends = [(vid[G.tail(d)], nv + face_of_dart[d]) for d in darts]
    vrot = [[] for _ in range(nv)]
    for v in verts:
        vrot[vid[v]] = [2 * eid[d] for d in G.rotation[v] if d in eid]
    best = None
    for flip in (False, True):
        frot = []
        for orbit in fg.faces:
            seq = [2 * eid[d] + 1 for d in orbit]
            frot.append(seq[::-1] if flip else seq)
        R = EmbeddedGraph(nv + len(fg.faces), ends, vrot + frot, validate=False)
        quads = sum(1 for f in R.faces if len(f.darts) == 4)
        key = (R.genus, -quads)
        if best is None or key < best[0]:
            best = (key, R)
    R = best[1]
    weights = [1] * nv + list(fg.face_weight)
    vertex_of = verts + [-1] * len(fg.faces)
    fverts = {nv + i: sorted({G.tail(d) for d in orbit}) for i, orbit in enumerate(fg.faces)}
    return RadialGraph(R, weights, vertex_of, fverts)


def frame_separator(G: EmbeddedGraph, fg) -> set[int]:
    """Lift a weighted frame subgraph to a separator of G."""
    rg = radial_graph(G, fg)
    costs = [1 if v >= 0 else len(rg.face_vertices[x]) for x, v in enumerate(rg.vertex_of)]
    res = weighted_surface_separator(rg.graph, rg.weights, costs=costs)
    S = set()
    for x in res.vertices:
        if rg.vertex_of[x] >= 0:
            S.add(rg.vertex_of[x])
        else:
            S.update(rg.face_vertices[x])
    return S


# -- the three-way driver -------------------------------------------------------------------------


@dataclass
class NonContractibleCycle:
    cycle: list[int]  # darts
    stage: str


@dataclass
class SeparatorFound:
    vertices: set[int]
    stage: str


@dataclass
class FrameFound:
    frame: object  # frame.FrameGraph
    report: object  # frame.FrameReport
    loops: list
    cycles: list[list[int]]


DriverOutcome = Union[NonContractibleCycle, SeparatorFound, FrameFound]


def lemma_main_driver(
    G: EmbeddedGraph, k: int, alpha: float = ALPHA, on_overlap: str = "keep", oracle=None
) -> DriverOutcome:
    """Short non-contractible cycle, small separator, or weighted frame graph.

    G must be a connected triangulation of positive genus.  Stages run in
    order and the first one that succeeds decides the outcome.
    """
    from . import frame as fr
    from .planarity import ContractibilityOracle
    from .voronoi import decompose, scan_boss_pairs

    if k < 4:
        raise SurfsepError("k must be at least 4")
    n = G.n
    oracle = oracle or ContractibilityOracle(G)
    decomp = decompose(G, k)
    cyc = scan_boss_pairs(G, decomp, oracle)
    if cyc is not None:
        return NonContractibleCycle(cyc, "two-region-scan")
    bs = fr.branch_structure(G, decomp)
    loops = fr.pre_frame_loops(G, decomp, bs, on_overlap)
    for loop in loops:
        S = fr.loop_is_separator(G, loop, alpha)
        if S is not None:
            return SeparatorFound(S, "pre-frame-loop")
    censuses = [fr.loop_inside_census(G, loop) for loop in loops]
    for loop, cen in zip(loops, censuses):
        if cen.n0 > 2 * n / 3:
            return SeparatorFound(fr.separator_from_large_inside(G, decomp, loop, cen), "large-inside")
    cores = {b: fr.core_of(G, decomp, b) for b in decomp.bosses}
    for b in decomp.bosses:
        core = cores[b]
        if core.cycle is not None:
            S = fr.cycle_vertices(G, core.cycle)
            if fr.is_balanced(G, S, alpha):
                return SeparatorFound(S, "core")
    ls = fr.level_structures(G, decomp, oracle)
    if ls.noncontractible:
        best = min(ls.noncontractible, key=lambda c: (0 if oracle.homology_class(c.darts) else 1, len(c.darts)))
        return NonContractibleCycle(best.darts, "level-cycle")
    fcs = fr.frame_cycles(G, loops, censuses)
    for c in fcs.cycles:
        if not fr.is_simple_cycle(G, c):
            raise SurfsepError("frame cycle is not simple")
    H = fr.frame_graph(G, fcs, bs)
    floors, ceilings = fr.floor_and_ceiling_cycles(G, decomp, ls, cores, bs)
    Hm = fr.modified_frame_graph(G, H, floors, ceilings)
    report = fr.frame_report(G, Hm, k)
    return FrameFound(Hm, report, loops, fcs.cycles)


# -- outer loop ---------------------------------------------------------------------------------------


def _total_genus(T: EmbeddedGraph, removed: set[int]) -> int:
    keep = [v for v in range(T.n) if v not in removed]
    return induced_embedding(T, keep).genus if keep else 0


def auto_k(n_j: int, g_j: int) -> int:
    return max(4, math.ceil(math.sqrt(n_j / max(g_j, 1))))


def find_separator(
    G: EmbeddedGraph,
    alpha: float = ALPHA,
    k: int | None = None,
    on_overlap: str = "keep",
    max_iterations: int | None = None,
    frame_hook: Callable | None = None,
) -> SeparatorResult:
    """Balanced separator of an embedded graph of any genus.

    Repeatedly takes the component of G minus S with more than alpha*n
    vertices, triangulates it and either applies the planar separator (genus
    0) or runs the driver: a non-contractible cycle is added to S and the
    loop continues; a separator or a lifted frame separator is added to S.
    The loop stops once no component is too heavy.
    """
    n = G.n
    S: set[int] = set()
    trace: list[TraceStep] = []
    removed_cycles: list[list[int]] = []
    if n == 0:
        return SeparatorResult([], alpha, [], total_weight=0)
    base = simplify(G)
    try:
        T = triangulate(base)
    except DegenerateFace:
        T = base
    g0 = T.genus
    limit = max_iterations or (2 * g0 + 2 * math.isqrt(n) + 10)
    unit = [1] * n
    for _ in range(limit):
        comp = _heavy_component(T, unit, S, alpha)
        if comp is None:
            break
        back = sorted(comp)
        Gj = simplify(induced_embedding(T, back))
        try:
            Gj = triangulate(Gj)
        except DegenerateFace:
            pass
        n_j, g_j = Gj.n, Gj.genus
        if g_j == 0:
            part = weighted_planar_separator(Gj).vertices
            S |= {back[i] for i in part}
            trace.append(TraceStep("planar", n_j, 0, 0, len(part)))
            continue
        k_j = k or auto_k(n_j, g_j)
        try:
            outcome = lemma_main_driver(Gj, k_j, alpha, on_overlap)
        except SurfsepError as exc:
            log.warning("driver failed on component of %d vertices (%s); cutting directly", n_j, exc)
            part = weighted_surface_separator(Gj).vertices
            S |= {back[i] for i in part}
            trace.append(TraceStep("fallback", n_j, g_j, k_j, len(part), stage=type(exc).__name__))
            continue
        if isinstance(outcome, NonContractibleCycle):
            verts = sorted({back[Gj.tail(d)] for d in outcome.cycle})
            before = _total_genus(T, S)
            S |= set(verts)
            after = _total_genus(T, S)
            removed_cycles.append(verts)
            trace.append(TraceStep("cycle", n_j, g_j, k_j, len(verts), before, after, outcome.stage))
            if after >= before:
                log.warning("cycle removal did not lower the genus (%d -> %d)", before, after)
        elif isinstance(outcome, SeparatorFound):
            S |= {back[i] for i in outcome.vertices}
            trace.append(TraceStep("separator", n_j, g_j, k_j, len(outcome.vertices), stage=outcome.stage))
        else:
            if frame_hook is not None:
                frame_hook(Gj, outcome)
            part = frame_separator(Gj, outcome.frame)
            S |= {back[i] for i in part}
            rep = outcome.report
            trace.append(
                TraceStep(
                    "frame", n_j, g_j, k_j, len(part),
                    frame={
                        "max_face_weight": rep.max_face_weight,
                        "two_connected": rep.two_connected,
                        "max_face_size": rep.max_face_size,
                        "face_count": rep.face_count,
                        "cellular": rep.cellular,
                        "failures": rep.failures(),
                    },
                )
            )
    else:
        raise IterationLimitExceeded(f"no balanced separator after {limit} rounds")
    res = _result(G, S, alpha, removed_cycles=removed_cycles, trace=trace)
    g = max(g0, 1)
    res.constants = {
        "genus": g0,
        "size_over_sqrt_gn": round(len(S) / math.sqrt(g * n), 6),
        "cycle_removals": len(removed_cycles),
    }
    res.size_bound_checked = len(removed_cycles) <= g0
    return res


def trim_separator(G: EmbeddedGraph, S, alpha: float = ALPHA, weights=None) -> set[int]:
    """Greedily return separator vertices to the graph while balance holds.

    Vertices are tried in increasing order; a vertex is dropped when it and
    the components it touches together stay within alpha * W.  The result
    is a minimal (not minimum) balanced subset of S.
    """
    w = [1] * G.n if weights is None else list(weights)
    limit = alpha * sum(w)
    S = set(S)
    parent = list(range(G.n))
    size = [0.0] * G.n

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        a, b = find(a), find(b)
        if a != b:
            parent[b] = a
            size[a] += size[b]
        return a

    adj = G.adjacency
    for v in range(G.n):
        if v not in S:
            size[v] = w[v]
    for v in range(G.n):
        if v in S:
            continue
        for u in adj[v]:
            if u not in S:
                union(v, u)
    for v in sorted(S):
        roots = {find(u) for u in adj[v] if u not in S}
        if w[v] + sum(size[r] for r in roots) <= limit:
            S.discard(v)
            size[v] = w[v]
            for r in roots:
                union(v, r)
    return S
