"""Ridge edges, connectors, pre-frame loops, floors/ceilings and the frame graph.

All dual objects are expressed through the primal graph: a triangle id is a
dual vertex and dual dart ``d`` crosses primal dart ``d``, leaving the
triangle on the left of ``d``.  Its left dual face is the primal vertex
``tail(d)``, its right dual face is ``head(d)``.
"""

from __future__ import annotations

import json
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx

from .embedded import EmbeddedGraph
from .errors import InsideNotPlanar, InvariantViolation, OverlappingTreePaths
from .planarity import ContractibilityOracle
from .voronoi import VoronoiDecomposition, bfs_levels

log = logging.getLogger(__name__)

FACE_SIZE_CONSTANT = 23
FACE_COUNT_CONSTANT = 50


# -- small helpers --------------------------------------------------------------


def components_without(G: EmbeddedGraph, removed: Iterable[int], weights=None) -> list[tuple[list[int], float]]:
    """Connected components of G minus ``removed`` with their total weights."""
    removed = set(removed)
    seen = set(removed)
    adj = G.adjacency
    out = []
    for s in range(G.n):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        i = 0
        while i < len(comp):
            u = comp[i]
            i += 1
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
        wt = len(comp) if weights is None else sum(weights[v] for v in comp)
        out.append((comp, wt))
    return out


def is_balanced(G: EmbeddedGraph, S: Iterable[int], alpha: float, weights=None) -> bool:
    total = G.n if weights is None else sum(weights)
    return all(w <= alpha * total for _, w in components_without(G, S, weights))


def triangle_parts(G: EmbeddedGraph, walls: set[int]) -> list[int]:
    """Label every face by its component after cutting the surface along ``walls`` (edge ids)."""
    fo = G.face_of
    nf = len(G.faces)
    part = [-1] * nf
    p = 0
    for s in range(nf):
        if part[s] != -1:
            continue
        part[s] = p
        stack = [s]
        while stack:
            f = stack.pop()
            for d in G.faces[f].darts:
                if (d >> 1) in walls:
                    continue
                g = fo[d ^ 1]
                if part[g] == -1:
                    part[g] = p
                    stack.append(g)
        p += 1
    return part


def vertex_part(G: EmbeddedGraph, part: list[int], skip: set[int]) -> dict[int, int]:
    out = {}
    fo = G.face_of
    for v in range(G.n):
        if v in skip or not G.rotation[v]:
            continue
        out[v] = part[fo[G.rotation[v][0]]]
    return out


def vertex_region_boundary(G: EmbeddedGraph, X: set[int]) -> list[tuple[list[int], list[int]]]:
    """Boundary of the dual region formed by the vertex cells of X.

    Returns ``(dual_darts, walk)`` per boundary cycle: ``dual_darts`` are the
    primal darts leaving X (each crossed by one dual boundary edge) and
    ``walk`` is the closed primal walk through the X-vertices along that
    cycle.  The outside of X lies on the left of every walk dart.
    """
    succ = G.succ
    nxt = {}
    jumps = {}
    for u in X:
        for d in G.rotation[u]:
            if G.head(d) in X:
                continue
            d2 = succ(d)
            path = []
            while G.head(d2) in X:
                path.append(d2)
                d2 = succ(d2 ^ 1)
            nxt[d] = d2
            jumps[d] = path
    out = []
    done = set()
    for d in sorted(nxt):
        if d in done:
            continue
        cyc, walk = [], []
        while d not in done:
            done.add(d)
            cyc.append(d)
            walk.extend(jumps[d])
            d = nxt[d]
        out.append((cyc, walk))
    return out


def cancel_and_split(G: EmbeddedGraph, walk: Sequence[int]) -> list[list[int]]:
    """Drop darts whose reverse is also on the walk and split the rest into simple cycles."""
    present = set(walk)
    rest = [d for d in walk if (d ^ 1) not in present]
    if not rest:
        return []
    # chain each dart to the next remaining dart (in walk order) leaving its head
    k = len(rest)
    by_tail: dict[int, list[int]] = {}
    for i, d in enumerate(rest):
        by_tail.setdefault(G.tail(d), []).append(i)
    used_out = set()
    nxt = {}
    for i, d in enumerate(rest):
        cands = by_tail.get(G.head(d), [])
        # first candidate cyclically after position i that is still free
        best = None
        for j in cands:
            if j in used_out:
                continue
            key = (j - i - 1) % k
            if best is None or key < best[0]:
                best = (key, j)
        if best is None:
            raise InvariantViolation("dart-cancellation", "remaining darts are not balanced")
        used_out.add(best[1])
        nxt[i] = best[1]
    cycles = []
    done = set()
    for s in range(k):
        if s in done:
            continue
        closed = []
        i = s
        while i not in done:
            done.add(i)
            closed.append(rest[i])
            i = nxt[i]
        cycles.extend(_split_simple(G, closed))
    return cycles


def _split_simple(G: EmbeddedGraph, closed: list[int]) -> list[list[int]]:
    out = []
    stack: list[int] = []
    pos: dict[int, int] = {}
    for d in closed:
        t = G.tail(d)
        if t in pos:
            i = pos[t]
            out.append(stack[i:])
            for x in stack[i:]:
                pos.pop(G.tail(x), None)
            del stack[i:]
        pos[t] = len(stack)
        stack.append(d)
    if stack:
        out.append(stack)
    return [c for c in out if not (len(c) == 2 and c[0] ^ 1 == c[1])]


def cycle_vertices(G: EmbeddedGraph, darts: Iterable[int]) -> set[int]:
    out = set()
    for d in darts:
        out.add(G.tail(d))
        out.add(G.head(d))
    return out


def is_simple_cycle(G: EmbeddedGraph, darts: Sequence[int]) -> bool:
    k = len(darts)
    if k == 0:
        return False
    tails = [G.tail(d) for d in darts]
    if len(set(tails)) != k:
        return False
    return all(G.head(darts[i]) == tails[(i + 1) % k] for i in range(k))


@dataclass
class SideInfo:
    """Left side of a simple cycle: triangle ids and vertices strictly inside."""

    triangles: set[int]
    vertices: set[int]
    separating: bool
    truncated: bool = False


def left_side(G: EmbeddedGraph, cycle: Sequence[int], cap: int | None = None) -> SideInfo:
    """Flood the faces on the left of ``cycle``; stop early past ``cap`` vertices."""
    fo = G.face_of
    walls = {d >> 1 for d in cycle}
    on = cycle_vertices(G, cycle)
    right = {fo[d ^ 1] for d in cycle}
    tris = {fo[d] for d in cycle}
    if tris & right:
        return SideInfo(tris, set(), False)
    verts: set[int] = set()
    stack = list(tris)
    while stack:
        f = stack.pop()
        for d in G.faces[f].darts:
            v = G.tail(d)
            if v not in on:
                verts.add(v)
            if (d >> 1) in walls:
                continue
            g = fo[d ^ 1]
            if g in right:
                return SideInfo(tris, verts, False)
            if g not in tris:
                tris.add(g)
                stack.append(g)
        if cap is not None and len(verts) > cap:
            return SideInfo(tris, verts, True, truncated=True)
    return SideInfo(tris, verts, True)


# -- ridge edges and branch structure ---------------------------------------------------


def _bridges(nodes: Iterable[int], edges: list[tuple[int, int, int]]) -> tuple[set[int], dict, dict]:
    """Bridges of an undirected multigraph given as (key, a, b) triples.

    Returns the bridge keys plus DFS parent/tree info used for side counts.
    """
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in nodes}
    for key, a, b in edges:
        adj[a].append((b, key))
        adj[b].append((a, key))
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    parent_key: dict[int, int] = {}
    parent: dict[int, int] = {}
    order: list[int] = []
    bridges = set()
    t = 0
    for root in sorted(adj):
        if root in disc:
            continue
        disc[root] = low[root] = t
        t += 1
        order.append(root)
        parent[root] = -1
        parent_key[root] = -1
        stack = [(root, iter(adj[root]))]
        while stack:
            v, it = stack[-1]
            advanced = False
            for w, key in it:
                if key == parent_key[v]:
                    continue
                if w not in disc:
                    disc[w] = low[w] = t
                    t += 1
                    order.append(w)
                    parent[w] = v
                    parent_key[w] = key
                    stack.append((w, iter(adj[w])))
                    advanced = True
                    break
                low[v] = min(low[v], disc[w])
            if not advanced:
                stack.pop()
                p = parent[v]
                if p != -1:
                    low[p] = min(low[p], low[v])
                    if low[v] > disc[p]:
                        bridges.add(parent_key[v])
    return bridges, parent, {"order": order, "parent_key": parent_key}


def ridge_edges(G: EmbeddedGraph, decomp: VoronoiDecomposition, b: int) -> set[int]:
    """Primal edge ids of vor(b) whose dual edge is a ridge edge.

    The dual edge of a non-tree edge e is a ridge edge when the fundamental
    cycle of e has boundary cycles of vor(b) on both sides.  Inside the graph
    of triangles touching vor(b), linked across non-tree edges, that is the
    same as e's dual being a bridge with boundary triangles on both sides.
    """
    asg = decomp.assignment
    fo = G.face_of
    region = decomp.regions[b]
    inreg = set(region)
    tree = {decomp.parent_dart[v] >> 1 for v in region if decomp.parent[v] != -1}
    tris = set()
    boundary_tri = set()
    edges = []
    for v in region:
        for d in G.rotation[v]:
            e = d >> 1
            f = fo[d]
            tris.add(f)
            if asg[G.head(d)] != b:
                boundary_tri.add(f)
                boundary_tri.add(fo[d ^ 1])
            if e in tree:
                continue
            if G.tail(d) == G.head(d):
                continue
            # each edge once: from its lower dart id, or the only dart leaving the region
            other = G.head(d)
            if other in inreg and (d & 1):
                continue
            edges.append((e, fo[d], fo[d ^ 1]))
    for _, a, c in edges:
        tris.add(a)
        tris.add(c)
    bridges, parent, info = _bridges(tris, edges)
    if not bridges:
        return set()
    order = info["order"]
    pkey = info["parent_key"]
    count = {v: (1 if v in boundary_tri else 0) for v in tris}
    for v in reversed(order):
        p = parent[v]
        if p != -1:
            count[p] += count[v]
    # component totals at DFS roots
    root_of = {}
    for v in order:
        root_of[v] = v if parent[v] == -1 else root_of[parent[v]]
    out = set()
    for v in order:
        key = pkey[v]
        if key in bridges:
            u, w = G.edge_ends[key]
            if u not in inreg or w not in inreg:
                continue
            below = count[v]
            total = count[root_of[v]]
            if below > 0 and total - below > 0:
                out.add(key)
    return out


@dataclass
class Connector:
    darts: list[int]
    closed: bool = False
    dangling: bool = False

    @property
    def first(self) -> int:
        return self.darts[0]

    @property
    def last(self) -> int:
        return self.darts[-1]


@dataclass
class BranchStructure:
    boundary_edges: set[int]
    ridge_edges: set[int]
    degree: list[int]
    branch_vertices: list[int]
    connectors: list[Connector]

    @property
    def branch_triangle_edges(self) -> set[int]:
        return self._tri_edges

    def __post_init__(self):
        self._tri_edges = set()


def branch_structure(G: EmbeddedGraph, decomp: VoronoiDecomposition) -> BranchStructure:
    asg = decomp.assignment
    B = {e for e, (u, v) in enumerate(G.edge_ends) if asg[u] != asg[v]}
    R = set()
    for b in decomp.bosses:
        R |= ridge_edges(G, decomp, b)
    marked = B | R
    fo = G.face_of
    nf = len(G.faces)
    degree = [sum(1 for d in G.faces[f].darts if (d >> 1) in marked) for f in range(nf)]
    branch = [f for f in range(nf) if degree[f] == 3]
    connectors: list[Connector] = []
    seen_edges: set[frozenset] = set()
    visited_tris = set(branch)

    def step(cur, via):
        for d2 in G.faces[cur].darts:
            if (d2 >> 1) in marked and d2 != via:
                return d2
        return None

    for t in branch:
        for d in G.faces[t].darts:
            if (d >> 1) not in marked:
                continue
            path = [d]
            cur = fo[d ^ 1]
            dangling = False
            while degree[cur] == 2:
                visited_tris.add(cur)
                nd = step(cur, path[-1] ^ 1)
                path.append(nd)
                cur = fo[nd ^ 1]
            if degree[cur] != 3:
                dangling = True
                visited_tris.add(cur)
            key = frozenset(x >> 1 for x in path)
            if key in seen_edges:
                continue
            seen_edges.add(key)
            connectors.append(Connector(path, dangling=dangling))
    # closed connectors: marked cycles without any branch vertex
    for t in range(nf):
        if degree[t] != 2 or t in visited_tris:
            continue
        start = next(d for d in G.faces[t].darts if (d >> 1) in marked)
        path = [start]
        visited_tris.add(t)
        cur = fo[start ^ 1]
        while cur != t:
            visited_tris.add(cur)
            nd = step(cur, path[-1] ^ 1)
            path.append(nd)
            cur = fo[nd ^ 1]
        connectors.append(Connector(path, closed=True))
    bs = BranchStructure(B, R, degree, branch, connectors)
    for t in branch:
        bs._tri_edges.update(d >> 1 for d in G.faces[t].darts)
    n_dangling = sum(c.dangling for c in connectors)
    if n_dangling:
        log.warning("%d connectors end at a non-branch dual vertex", n_dangling)
    return bs


# -- pre-frame loops ----------------------------------------------------------------------


@dataclass
class PreFrameLoop:
    darts: list[int]
    connector: Connector
    loop_type: str
    bosses: tuple[int, ...]
    body: list[int]
    repeated_darts: int = 0

    @property
    def vertices(self) -> set[int]:
        return {self._G.tail(d) for d in self.darts}

    def bind(self, G):
        self._G = G
        return self


def pre_frame_loops(
    G: EmbeddedGraph, decomp: VoronoiDecomposition, bs: BranchStructure, on_overlap: str = "keep"
) -> list[PreFrameLoop]:
    """One closed loop per connector: two tree paths through each side's boss
    joined by the darts crossed by the connector's first and last dual darts.

    ``on_overlap`` is ``"keep"`` (tolerate a dart used twice, counted in
    ``repeated_darts``) or ``"raise"``.
    """
    asg = decomp.assignment
    fo = G.face_of
    out = []
    for con in bs.connectors:
        if con.dangling:
            continue
        d1, dm = con.first, con.last
        lf, rf = G.tail(d1), G.head(d1)
        ll, rl = G.tail(dm), G.head(dm)
        bR, bL = asg[rf], asg[lf]
        if asg[rl] != bR or asg[ll] != bL:
            raise InvariantViolation("pre-frame-loop", "connector sides change boss along the way")
        darts = (
            decomp.tree_path_up(rf)
            + decomp.tree_path_down(rl)
            + [dm ^ 1]
            + decomp.tree_path_up(ll)
            + decomp.tree_path_down(lf)
            + [d1]
        )
        for i, d in enumerate(darts):
            if G.head(d) != G.tail(darts[(i + 1) % len(darts)]):
                raise InvariantViolation("pre-frame-loop", "loop is not closed")
        repeated = len(darts) - len(set(darts))
        if repeated and on_overlap == "raise":
            raise OverlappingTreePaths(f"connector at dart {d1}: {repeated} darts repeat")
        body = [fo[d ^ 1] for d in con.darts[:-1]]
        loop_type = "A" if bL != bR else "B"
        bosses = (bL, bR) if bL != bR else (bL,)
        out.append(PreFrameLoop(darts, con, loop_type, bosses, body, repeated).bind(G))
    return out


@dataclass
class LoopCensus:
    """Vertex counts of the surface parts cut out by a loop."""

    loop_vertices: set[int]
    part: list[int]
    inside_part: int | None
    parts: dict[int, list[int]]

    @property
    def n0(self) -> int:
        return len(self.parts.get(self.inside_part, [])) if self.inside_part is not None else 0

    def outside_parts(self) -> list[tuple[int, list[int]]]:
        return sorted(
            ((p, vs) for p, vs in self.parts.items() if p != self.inside_part),
            key=lambda x: (-len(x[1]), x[0]),
        )

    @property
    def outside(self) -> int:
        return sum(len(vs) for _, vs in self.outside_parts())


def loop_inside_census(G: EmbeddedGraph, loop: PreFrameLoop) -> LoopCensus:
    walls = {d >> 1 for d in loop.darts}
    on = {G.tail(d) for d in loop.darts}
    part = triangle_parts(G, walls)
    vp = vertex_part(G, part, on)
    parts: dict[int, list[int]] = {}
    for v, p in vp.items():
        parts.setdefault(p, []).append(v)
    inside = part[loop.body[0]] if loop.body else None
    return LoopCensus(on, part, inside, parts)


def merged_inside(loop: PreFrameLoop, census: LoopCensus, n: int) -> tuple[set[int], int]:
    """Triangle-part ids forming the inside of the loop for the frame.

    Type A: the part holding the connector body.  Type B (and any loop cutting
    more than two parts): everything except the largest outside part.
    """
    if census.inside_part is None:
        return set(), 0
    inside = {census.inside_part}
    outs = census.outside_parts()
    if loop.loop_type == "B" or len(outs) > 1:
        inside |= {p for p, _ in outs[1:]}
    count = sum(len(census.parts.get(p, [])) for p in inside)
    return inside, count


def loop_is_separator(G: EmbeddedGraph, loop: PreFrameLoop, alpha: float = 2 / 3) -> set[int] | None:
    S = {G.tail(d) for d in loop.darts}
    return S if is_balanced(G, S, alpha) else None


def separator_from_large_inside(
    G: EmbeddedGraph, decomp: VoronoiDecomposition, loop: PreFrameLoop, census: LoopCensus
) -> set[int]:
    """Planar separator of the (at most two) regions holding the inside, plus the loop."""
    from .embedded import induced_embedding, triangulate
    from .separator import simplify, weighted_planar_separator

    if census.n0 == 0:
        raise InsideNotPlanar("inside of the loop is empty")
    inside = census.parts[census.inside_part]
    owners = {decomp.assignment[v] for v in inside}
    if len(owners) > 2 or not owners <= set(loop.bosses):
        raise InsideNotPlanar(f"inside spans regions {sorted(owners)}")
    verts = set()
    for b in loop.bosses:
        verts |= set(decomp.regions[b])
    H = induced_embedding(G, verts)
    if H.genus != 0:
        raise InsideNotPlanar("two-region union has positive genus")
    local = {lab: i for i, lab in enumerate(H.labels)}
    w = [0] * H.n
    for v in inside:
        w[local[G.labels[v]]] = 1
    Hs = simplify(H)
    S_local = weighted_planar_separator(Hs, w).vertices
    back = {H.labels[i] for i in S_local}
    inv = {lab: v for v, lab in enumerate(G.labels)}
    return {inv[x] for x in back} | {G.tail(d) for d in loop.darts}


# -- frame cycles and frame graph -----------------------------------------------------------


@dataclass
class FrameCycleSet:
    cycles: list[list[int]]
    insides: list[set[int]]  # triangle ids of the loop inside each cycle came from
    source_loops: list[int]


def frame_cycles(G: EmbeddedGraph, loops: list[PreFrameLoop], censuses: list[LoopCensus]) -> FrameCycleSet:
    """Boundary cycles of every maximal loop inside, split into simple cycles."""
    n = G.n
    insides = []
    for loop, cen in zip(loops, censuses):
        parts, _ = merged_inside(loop, cen, n)
        tris = {t for t, p in enumerate(cen.part) if p in parts}
        insides.append(tris)
    order = sorted(range(len(loops)), key=lambda i: -len(insides[i]))
    kept: list[int] = []
    for i in order:
        if not insides[i]:
            continue
        if any(insides[i] <= insides[j] for j in kept):
            continue
        kept.append(i)
    kept.sort()
    cycles, cyc_inside, src = [], [], []
    for i in kept:
        X = insides[i]
        for walk in _triangle_region_boundary(G, X):
            for c in cancel_and_split(G, walk):
                cycles.append(c)
                cyc_inside.append(X)
                src.append(i)
    return FrameCycleSet(cycles, cyc_inside, src)


def _triangle_region_boundary(G: EmbeddedGraph, X: set[int]) -> list[list[int]]:
    from .embedded import region_boundary

    return region_boundary(G, X)


@dataclass
class FrameGraph:
    """Subgraph of G (edge ids) with the G-vertex count inside each face."""

    edges: set[int]
    vertices: set[int]
    face_parts: list[int]  # triangle -> part id after cutting along the subgraph
    part_weight: dict[int, int]
    faces: list[list[int]] = field(default_factory=list)  # dart orbits of the subgraph
    face_weight: list[int] = field(default_factory=list)
    face_part: list[int] = field(default_factory=list)

    @property
    def total_weight(self) -> int:
        return sum(self.part_weight.values())


def weigh_subgraph(G: EmbeddedGraph, edges: set[int]) -> FrameGraph:
    verts = set()
    for e in edges:
        verts.update(G.edge_ends[e])
    part = triangle_parts(G, edges)
    vp = vertex_part(G, part, verts)
    weight: dict[int, int] = {p: 0 for p in set(part)}
    for v, p in vp.items():
        weight[p] += 1
    fg = FrameGraph(edges, verts, part, weight)
    # dart orbits of the subgraph under the restricted rotation
    keep = [[d for d in G.rotation[v] if (d >> 1) in edges] for v in range(G.n)]
    succ = {}
    for r in keep:
        for i, d in enumerate(r):
            succ[d] = r[(i + 1) % len(r)]
    seen = set()
    assigned = set()
    for d0 in sorted(succ):
        if d0 in seen:
            continue
        orbit = []
        d = d0
        while d not in seen:
            seen.add(d)
            orbit.append(d)
            d = succ[d ^ 1]
        p = part[G.face_of[orbit[0]]]
        fg.faces.append(orbit)
        fg.face_part.append(p)
        fg.face_weight.append(weight.get(p, 0) if p not in assigned else 0)
        assigned.add(p)
    return fg


def frame_graph(G: EmbeddedGraph, fcs: FrameCycleSet, bs: BranchStructure) -> FrameGraph:
    E1 = {d >> 1 for c in fcs.cycles for d in c}
    E2 = set(bs.branch_triangle_edges)
    return weigh_subgraph(G, E1 | E2)


# -- cores, level sets, floors and ceilings ----------------------------------------------------


@dataclass
class Core:
    boss: int
    d_nb: int
    d_core: int
    vertices: set[int]
    cycle: list[int] | None  # inside on the left, boss inside


def core_of(G: EmbeddedGraph, decomp: VoronoiDecomposition, b: int) -> Core:
    k = decomp.k
    root_k = math.isqrt(k)
    levels = bfs_levels(G, b)
    total = 0
    d_nb = -1
    for d, lev in enumerate(levels):
        if total + len(lev) < k:
            total += len(lev)
            d_nb = d
        else:
            break
    d_nb = max(d_nb, 0)
    d_core = 0
    for d in range(min(d_nb, len(levels) - 1), -1, -1):
        if len(levels[d]) <= root_k:
            d_core = d
            break
    core = {v for lev in levels[: d_core + 1] for v in lev}
    cycle = None
    bnd = vertex_region_boundary(G, core)
    if bnd:
        # outside size of each boundary cycle: vertices reachable from across it
        best = None
        for dual_darts, walk in bnd:
            seeds = {G.head(d) for d in dual_darts}
            reach = _reach_avoiding(G, seeds, core)
            key = (-reach, min(G.face_of[d] for d in dual_darts))
            if best is None or key < best[0]:
                best = (key, walk)
        walk = [d ^ 1 for d in reversed(best[1])]
        for c in cancel_and_split(G, walk):
            side = left_side(G, c)
            if side.separating and b in side.vertices:
                cycle = c
                break
    return Core(b, d_nb, d_core, core, cycle)


def _reach_avoiding(G: EmbeddedGraph, seeds: set[int], avoid: set[int]) -> int:
    seen = set(seeds)
    stack = list(seeds)
    adj = G.adjacency
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in avoid and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen)


@dataclass
class LevelCycle:
    darts: list[int]
    level: int
    kind: str  # "interior" or "exterior"
    small: bool
    contractible: bool
    light: bool
    inside_vertices: set[int] = field(default_factory=set)
    inside_triangles: set[int] = field(default_factory=set)


@dataclass
class LevelStructures:
    levels: dict[int, set[int]]
    cycles: list[LevelCycle]
    noncontractible: list[LevelCycle]


def level_structures(
    G: EmbeddedGraph, decomp: VoronoiDecomposition, oracle: ContractibilityOracle | None = None
) -> LevelStructures:
    """Level sets L_nb(l) and the interior/exterior cycles of their regions.

    Only small cycles get their inside computed; large ones are recorded
    with ``small=False`` and are never used as floors or ceilings.
    """
    oracle = oracle or ContractibilityOracle(G)
    n = G.n
    root_k = math.isqrt(decomp.k)
    lv = decomp.nb_dist
    levels: dict[int, set[int]] = {}
    for v in range(n):
        if lv[v] >= 1:
            levels.setdefault(lv[v], set()).add(v)
    cycles = []
    noncontr = []
    adj = G.adjacency
    for l in sorted(levels):
        Ls = levels[l]
        seen: set[int] = set()
        for s in sorted(Ls):
            if s in seen:
                continue
            comp = {s}
            stack = [s]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w in Ls and w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            for dual_darts, walk in vertex_region_boundary(G, comp):
                across = {lv[G.head(d)] for d in dual_darts}
                if across == {l - 1}:
                    kind = "interior"
                elif across == {l + 1}:
                    kind = "exterior"
                else:
                    continue
                for c in cancel_and_split(G, walk):
                    small = len(c) <= root_k
                    lc = LevelCycle(c, l, kind, small, True, False)
                    if small:
                        lc.contractible = oracle.is_contractible(c, validate=False)
                        if not lc.contractible:
                            noncontr.append(lc)
                        else:
                            side = left_side(G, c, cap=n // 3)
                            lc.light = side.separating and not side.truncated and len(side.vertices) < n / 3
                            lc.inside_vertices = side.vertices
                            lc.inside_triangles = side.triangles
                    cycles.append(lc)
    return LevelStructures(levels, cycles, noncontr)


def _maximal(cands: list[LevelCycle]) -> list[LevelCycle]:
    order = sorted(range(len(cands)), key=lambda i: -len(cands[i].inside_triangles))
    kept: list[int] = []
    for i in order:
        tri = cands[i].inside_triangles
        if any(tri <= cands[j].inside_triangles for j in kept):
            continue
        kept.append(i)
    return [cands[i] for i in sorted(kept)]


def floor_and_ceiling_cycles(
    G: EmbeddedGraph,
    decomp: VoronoiDecomposition,
    ls: LevelStructures,
    cores: dict[int, Core],
    bs: BranchStructure,
) -> tuple[list[LevelCycle], list[LevelCycle]]:
    floors = _maximal([c for c in ls.cycles if c.kind == "interior" and c.small and c.light])
    covered = set()
    for f in floors:
        covered |= f.inside_vertices
    for b in decomp.bosses:
        if b in covered:
            continue
        core = cores[b]
        if core.cycle is None:
            continue
        side = left_side(G, core.cycle)
        lc = LevelCycle(core.cycle, 0, "core", True, side.separating, side.separating and len(side.vertices) < G.n / 3)
        lc.inside_vertices = side.vertices
        lc.inside_triangles = side.triangles
        floors.append(lc)
    branch = set(bs.branch_vertices)
    ceilings = _maximal([c for c in ls.cycles if c.kind == "exterior" and c.small and c.light])
    ceilings = [c for c in ceilings if c.inside_triangles & branch]
    return floors, ceilings


def modified_frame_graph(
    G: EmbeddedGraph, frame: FrameGraph, floors: list[LevelCycle], ceilings: list[LevelCycle]
) -> FrameGraph:
    """Replace frame edges inside floor/ceiling cycles by the cycles themselves."""
    used = [c for c in floors + ceilings if c.inside_vertices & frame.vertices]
    fo = G.face_of
    E1 = {d >> 1 for c in used for d in c.darts}
    E2 = set()
    for e in frame.edges:
        a, b = fo[2 * e], fo[2 * e + 1]
        if any(a in c.inside_triangles and b in c.inside_triangles for c in used):
            continue
        E2.add(e)
    return weigh_subgraph(G, E1 | E2)


# -- structural checks ---------------------------------------------------------------------------


@dataclass
class FrameReport:
    n: int
    k: int
    genus: int
    max_face_weight: int
    two_connected: bool
    max_face_size: int
    face_count: int
    cellular: bool

    @property
    def weight_ok(self) -> bool:
        return self.max_face_weight < self.n / 3

    @property
    def face_size_ok(self) -> bool:
        return self.max_face_size <= FACE_SIZE_CONSTANT * math.sqrt(self.k)

    @property
    def face_count_ok(self) -> bool:
        return self.face_count <= FACE_COUNT_CONSTANT * (self.n / self.k + self.genus)

    @property
    def face_size_ratio(self) -> float:
        return self.max_face_size / math.sqrt(self.k)

    @property
    def face_count_ratio(self) -> float:
        return self.face_count / (self.n / self.k + self.genus)

    def failures(self) -> list[str]:
        out = []
        if not self.weight_ok:
            out.append("face-weight")
        if not self.two_connected:
            out.append("2-connected")
        if not self.face_size_ok:
            out.append("face-size")
        if not self.face_count_ok:
            out.append("face-count")
        return out


def frame_report(G: EmbeddedGraph, fg: FrameGraph, k: int) -> FrameReport:
    H = nx.Graph()
    H.add_nodes_from(fg.vertices)
    H.add_edges_from(G.edge_ends[e] for e in fg.edges if G.edge_ends[e][0] != G.edge_ends[e][1])
    two = H.number_of_nodes() >= 3 and nx.is_biconnected(H)
    parts_used = [p for p in fg.face_part]
    cellular = len(parts_used) == len(set(parts_used)) and set(parts_used) == set(fg.part_weight)
    return FrameReport(
        n=G.n,
        k=k,
        genus=G.genus,
        max_face_weight=max(fg.part_weight.values(), default=0),
        two_connected=two,
        max_face_size=max((len(f) for f in fg.faces), default=0),
        face_count=len(fg.faces),
        cellular=cellular,
    )


def dump_frame(G: EmbeddedGraph, loops, cycles, fg: FrameGraph, report: FrameReport | None = None) -> str:
    """JSON debug dump of loops, frame cycles and the weighted frame graph (original labels)."""
    lab = G.labels

    def walk(darts):
        return [lab[G.tail(d)] for d in darts]

    doc = {
        "loops": [
            {"type": lp.loop_type, "bosses": [lab[b] for b in lp.bosses], "vertices": walk(lp.darts)}
            for lp in loops
        ],
        "frame_cycles": [walk(c) for c in cycles],
        "frame_graph": {
            "edges": sorted(sorted((lab[G.edge_ends[e][0]], lab[G.edge_ends[e][1]])) for e in fg.edges),
            "faces": [{"vertices": walk(f), "weight": w} for f, w in zip(fg.faces, fg.face_weight)],
        },
    }
    if report is not None:
        doc["report"] = {
            "max_face_weight": report.max_face_weight,
            "two_connected": report.two_connected,
            "max_face_size": report.max_face_size,
            "face_count": report.face_count,
            "cellular": report.cellular,
        }
    return json.dumps(doc, indent=1, sort_keys=True)
