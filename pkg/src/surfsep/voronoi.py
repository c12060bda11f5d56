"""k-neighbourhoods, boss vertices, Voronoi regions and the two-region cycle scan."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .embedded import EmbeddedGraph
from .errors import ComponentTooSmall, InvariantViolation
from .planarity import ContractibilityOracle

log = logging.getLogger(__name__)


def bfs_levels(G: EmbeddedGraph, v: int, limit: int | None = None) -> list[list[int]]:
    """Vertices at distance 0, 1, 2, ... from v, each level sorted by index.

    With ``limit`` the search stops once that many vertices (excluding v)
    have been collected in complete levels.
    """
    adj = G.adjacency
    seen = {v}
    levels = [[v]]
    total = 0
    while True:
        nxt = []
        for u in levels[-1]:
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        if not nxt:
            return levels
        nxt.sort()
        levels.append(nxt)
        total += len(nxt)
        if limit is not None and total >= limit:
            return levels


def distances_from(G: EmbeddedGraph, v: int) -> list[int]:
    dist = [-1] * G.n
    dist[v] = 0
    queue = deque([v])
    adj = G.adjacency
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def k_neighborhood(G: EmbeddedGraph, v: int, k: int) -> frozenset[int]:
    """Union of BFS levels 1..d for the least d reaching at least k vertices.

    v itself is never included.
    """
    levels = bfs_levels(G, v, limit=k)
    out = [u for lev in levels[1:] for u in lev]
    if len(out) < k:
        raise ComponentTooSmall(f"component of {v} has fewer than {k + 1} vertices")
    return frozenset(out)


def nrst(G: EmbeddedGraph, v: int, W) -> int:
    """The vertex of W nearest to v (distance, then index)."""
    if not W:
        raise ValueError("nrst of an empty set")
    dist = distances_from(G, v)
    return min(W, key=lambda u: (dist[u], u))


def k_max_independent_set(G: EmbeddedGraph, k: int) -> list[int]:
    """Greedy k-maximal independent set: scan vertices in index order and keep
    v whenever N_k(v) misses every neighbourhood chosen so far."""
    owner: dict[int, int] = {}
    bosses = []
    for v in range(G.n):
        nb = k_neighborhood(G, v, k)
        if any(u in owner for u in nb):
            continue
        bosses.append(v)
        for u in nb:
            owner[u] = v
    return bosses


def boss(G: EmbeddedGraph, I: Sequence[int], v: int, k: int) -> int:
    """Boss of v evaluated straight from the definition (slow; used as an oracle
    and for single queries)."""
    dist = distances_from(G, v)
    best = None
    for b in I:
        u = min(k_neighborhood(G, b, k), key=lambda x: (dist[x], x))
        key = (dist[u], u)
        if best is None or key < best[0]:
            best = (key, b)
    return best[1]


@dataclass
class VoronoiDecomposition:
    k: int
    bosses: list[int]
    assignment: list[int]
    neighborhoods: dict[int, frozenset]
    # distance from each vertex to its nearest neighbourhood vertex (the L_nb level)
    nb_dist: list[int]
    nearest: list[int]
    # BFS tree of each region: parent vertex and the dart from parent to child
    parent: list[int]
    parent_dart: list[int]
    depth: list[int]
    regions: dict[int, list[int]] = field(default_factory=dict)
    boss_violations: list[int] = field(default_factory=list)

    def region(self, b: int) -> list[int]:
        return self.regions[b]

    def tree_path_up(self, v: int) -> list[int]:
        """Darts from v up to its boss along the region's BFS tree."""
        out = []
        while self.parent[v] != -1:
            out.append(self.parent_dart[v] ^ 1)
            v = self.parent[v]
        return out

    def tree_path_down(self, v: int) -> list[int]:
        """Darts from the boss down to v."""
        return [d ^ 1 for d in reversed(self.tree_path_up(v))]


def voronoi_regions(G: EmbeddedGraph, I: Sequence[int], k: int) -> VoronoiDecomposition:
    """Assign every vertex to its boss and grow a BFS tree inside each region."""
    bosses = sorted(I)
    neighborhoods = {b: k_neighborhood(G, b, k) for b in bosses}
    owner = {}
    for b, nb in neighborhoods.items():
        for u in nb:
            if u in owner:
                raise InvariantViolation("k-mis", f"neighbourhoods of {owner[u]} and {b} intersect")
            owner[u] = b
    # multi-source BFS; each vertex keeps the least-index source at minimum distance
    n = G.n
    adj = G.adjacency
    label = [-1] * n
    dist = [-1] * n
    frontier = sorted(owner)
    for u in frontier:
        label[u] = u
        dist[u] = 0
    level = 0
    while frontier:
        level += 1
        cand: dict[int, int] = {}
        for u in frontier:
            for w in adj[u]:
                if dist[w] == -1:
                    lu = label[u]
                    if w not in cand or lu < cand[w]:
                        cand[w] = lu
        frontier = sorted(cand)
        for w in frontier:
            dist[w] = level
            label[w] = cand[w]
    if any(d < 0 for d in dist):
        raise InvariantViolation("voronoi", "graph is not connected")
    assignment = [owner[label[v]] for v in range(n)]
    violations = []
    for b in bosses:
        if assignment[b] != b:
            violations.append(b)
            assignment[b] = b
            label[b] = min(neighborhoods[b], key=lambda u: (1 if u in adj[b] else 2, u))
            dist[b] = 1
    if violations:
        log.warning("boss vertices assigned elsewhere by the nearest rule: %s", violations)

    regions: dict[int, list[int]] = {b: [] for b in bosses}
    for v in range(n):
        regions[assignment[v]].append(v)
    parent = [-1] * n
    parent_dart = [-1] * n
    depth = [0] * n
    for b in bosses:
        seen = {b}
        queue = deque([b])
        while queue:
            u = queue.popleft()
            for d in G.rotation[u]:
                w = G.head(d)
                if w not in seen and assignment[w] == b:
                    seen.add(w)
                    parent[w] = u
                    parent_dart[w] = d
                    depth[w] = depth[u] + 1
                    queue.append(w)
        if len(seen) != len(regions[b]):
            raise InvariantViolation("voronoi", f"region of boss {b} is not connected")
    return VoronoiDecomposition(
        k=k,
        bosses=bosses,
        assignment=assignment,
        neighborhoods=neighborhoods,
        nb_dist=dist,
        nearest=label,
        parent=parent,
        parent_dart=parent_dart,
        depth=depth,
        regions=regions,
        boss_violations=violations,
    )


def decompose(G: EmbeddedGraph, k: int) -> VoronoiDecomposition:
    return voronoi_regions(G, k_max_independent_set(G, k), k)


def adjacent_boss_pairs(G: EmbeddedGraph, decomp: VoronoiDecomposition) -> list[tuple[int, int]]:
    pairs = set()
    asg = decomp.assignment
    for u, v in G.edge_ends:
        a, b = asg[u], asg[v]
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    return sorted(pairs)


def _fundamental_cycles(G: EmbeddedGraph, verts: set[int], tree_darts: set[int], root_of):
    """Yield (edge, dart cycle) for every non-tree edge inside ``verts``.

    ``tree_darts`` holds parent->child darts of a spanning forest of G[verts].
    """
    parent = {G.head(d): d for d in tree_darts}
    children: dict[int, list[int]] = {}
    for d in tree_darts:
        children.setdefault(G.tail(d), []).append(G.head(d))
    depth = {}
    for r in verts:
        if r in parent:
            continue
        depth[r] = 0
        stack = [r]
        while stack:
            x = stack.pop()
            for y in children.get(x, ()):
                depth[y] = depth[x] + 1
                stack.append(y)
    tree_edges = {d >> 1 for d in tree_darts}
    for e, (u, v) in enumerate(G.edge_ends):
        if e in tree_edges or u not in verts or v not in verts or u == v:
            continue
        if root_of(u) != root_of(v):
            continue
        # path u -> lca and v -> lca
        up_u, up_v = [], []
        a, b = u, v
        while depth[a] > depth[b]:
            up_u.append(parent[a] ^ 1)
            a = G.tail(parent[a])
        while depth[b] > depth[a]:
            up_v.append(parent[b] ^ 1)
            b = G.tail(parent[b])
        while a != b:
            up_u.append(parent[a] ^ 1)
            a = G.tail(parent[a])
            up_v.append(parent[b] ^ 1)
            b = G.tail(parent[b])
        # cycle: edge v->u (dart 2e+1), then u up to lca, then lca down to v
        cycle = [2 * e + 1] + up_u + [d ^ 1 for d in reversed(up_v)]
        yield e, cycle


def combined_tree(G: EmbeddedGraph, decomp: VoronoiDecomposition, b1: int, b2: int):
    """Spanning forest of vor(b1) ∪ vor(b2): both BFS trees joined by the
    lowest-index edge between the regions, if any."""
    verts = set(decomp.regions[b1]) | set(decomp.regions[b2])
    darts = set()
    for v in verts:
        if decomp.parent[v] != -1:
            darts.add(decomp.parent_dart[v])
    asg = decomp.assignment
    link = None
    if b1 != b2:
        for e, (u, v) in enumerate(G.edge_ends):
            if {asg[u], asg[v]} == {b1, b2}:
                link = e
                break
    if link is None:
        def root_of(v):
            return asg[v]
        return verts, darts, root_of
    # re-hang b2's tree below the linking endpoint in vor(b1)
    u, v = G.edge_ends[link]
    if asg[u] != b1:
        u, v = v, u
    tree_adj: dict[int, list[int]] = {}
    for d in darts:
        tree_adj.setdefault(G.tail(d), []).append(d)
        tree_adj.setdefault(G.head(d), []).append(d ^ 1)
    link_dart = 2 * link if G.tail(2 * link) == u else 2 * link + 1
    tree_adj.setdefault(u, []).append(link_dart)
    tree_adj.setdefault(v, []).append(link_dart ^ 1)
    out = set()
    seen = {b1}
    queue = deque([b1])
    while queue:
        x = queue.popleft()
        for d in sorted(tree_adj.get(x, ())):
            w = G.head(d)
            if w not in seen:
                seen.add(w)
                out.add(d)
                queue.append(w)

    def root_of(_v):
        return b1

    return verts, out, root_of


def noncontractible_in_two_regions(
    G: EmbeddedGraph,
    decomp: VoronoiDecomposition,
    b1: int,
    b2: int,
    oracle: ContractibilityOracle | None = None,
) -> list[int] | None:
    """Shortest non-contractible fundamental cycle of the combined region tree.

    Returns a dart list, or None when every fundamental cycle is contractible
    (which, by the 3-path condition, means the union holds no
    non-contractible cycle at all).
    """
    oracle = oracle or ContractibilityOracle(G)
    verts, darts, root_of = combined_tree(G, decomp, b1, b2)
    best = None  # shortest homologically non-trivial (hence non-separating) cycle
    best_sep = None  # shortest separating non-contractible cycle, used only as a fallback
    for _, cyc in _fundamental_cycles(G, verts, darts, root_of):
        if oracle.homology_class(cyc):
            if best is None or len(cyc) < len(best):
                best = cyc
        elif best is None and (best_sep is None or len(cyc) < len(best_sep)):
            if not oracle.is_contractible(cyc, validate=False):
                best_sep = cyc
    return best if best is not None else best_sep


def scan_boss_pairs(
    G: EmbeddedGraph, decomp: VoronoiDecomposition, oracle: ContractibilityOracle | None = None
) -> list[int] | None:
    """Two-region scan over every boss (alone) and every adjacent boss pair."""
    oracle = oracle or ContractibilityOracle(G)
    if not any(oracle.signature):
        return None  # no cohomology at all: genus 0
    best = None
    pairs = [(b, b) for b in decomp.bosses] + adjacent_boss_pairs(G, decomp)
    for b1, b2 in pairs:
        cyc = noncontractible_in_two_regions(G, decomp, b1, b2, oracle)
        if cyc is None:
            continue
        key = (0 if oracle.homology_class(cyc) else 1, len(cyc))
        if best is None or key < best[0]:
            best = (key, cyc)
    return None if best is None else best[1]
