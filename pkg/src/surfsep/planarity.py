"""Planarity testing with an embedding witness, and contractibility of cycles."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import networkx as nx

from .embedded import EmbeddedGraph, check_cycle, cycle_sides


@dataclass(frozen=True)
class PlanarityResult:
    planar: bool
    embedding: EmbeddedGraph | None = None


def is_planar(n: int, edges: Sequence[tuple[int, int]]) -> PlanarityResult:
    """Test planarity of an abstract multigraph; return a genus-0 rotation when planar.

    Parallel edges are placed next to each other in the rotation and loops are
    inserted as adjacent dart pairs, neither of which affects planarity.
    """
    simple = nx.Graph()
    simple.add_nodes_from(range(n))
    simple.add_edges_from((u, v) for u, v in edges if u != v)
    planar, emb = nx.check_planarity(simple)
    if not planar:
        return PlanarityResult(False, None)
    by_pair: dict[tuple[int, int], list[int]] = {}
    loops: dict[int, list[int]] = {}
    for e, (u, v) in enumerate(edges):
        if u == v:
            loops.setdefault(u, []).append(e)
        else:
            by_pair.setdefault((u, v), []).append(2 * e)
            by_pair.setdefault((v, u), []).insert(0, 2 * e + 1)
    rot = []
    for v in range(n):
        r = []
        for w in emb.neighbors_cw_order(v):
            r.extend(by_pair[v, w])
        for e in loops.get(v, ()):
            r.extend((2 * e, 2 * e + 1))
        rot.append(r)
    return PlanarityResult(True, EmbeddedGraph(n, list(edges), rot))


def side_euler_characteristic(G: EmbeddedGraph, region) -> int:
    """V - E + F of the closure of a face set."""
    verts = set()
    edges = set()
    for f in region:
        for d in G.faces[f].darts:
            verts.add(G.tail(d))
            edges.add(d >> 1)
    return len(verts) - len(edges) + len(region)


def is_contractible(G: EmbeddedGraph, cycle: Sequence[int]) -> bool:
    """A simple cycle is contractible iff it separates and one side is a disk."""
    sides = cycle_sides(G, cycle)
    if not sides.separating:
        return False
    return any(side_euler_characteristic(G, s) == 1 for s in (sides.left, sides.right))


class ContractibilityOracle:
    """Repeated contractibility queries against one embedded graph.

    A Z2 cohomology basis from a tree-cotree decomposition rejects
    non-separating cycles with a bitmask XOR; separating cycles fall back to
    flooding both sides in lockstep so the smaller side is found first.
    """

    def __init__(self, G: EmbeddedGraph):
        self.G = G
        self.signature = self._cohomology(G)
        # on the sphere and the torus every separating simple cycle bounds a disk
        self._separating_is_disk = G.num_components == 1 and G.genus <= 1

    @staticmethod
    def _cohomology(G: EmbeddedGraph) -> list[int]:
        in_tree = [False] * G.m
        seen = [False] * G.n
        for s in range(G.n):
            if seen[s]:
                continue
            seen[s] = True
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for d in G.rotation[u]:
                    w = G.head(d)
                    if not seen[w]:
                        seen[w] = True
                        in_tree[d >> 1] = True
                        queue.append(w)
        fo = G.face_of
        nf = len(G.faces)
        parent = [-1] * nf  # dual edge to parent face
        depth = [0] * nf
        fseen = [False] * nf
        in_cotree = [False] * G.m
        for s in range(nf):
            if fseen[s]:
                continue
            fseen[s] = True
            queue = deque([s])
            while queue:
                f = queue.popleft()
                for d in G.faces[f].darts:
                    e = d >> 1
                    if in_tree[e]:
                        continue
                    g = fo[d ^ 1]
                    if not fseen[g]:
                        fseen[g] = True
                        parent[g] = d
                        depth[g] = depth[f] + 1
                        in_cotree[e] = True
                        queue.append(g)
        sig = [0] * G.m
        bit = 0
        for e in range(G.m):
            if in_tree[e] or in_cotree[e]:
                continue
            mask = 1 << bit
            bit += 1
            sig[e] |= mask
            a, b = fo[2 * e], fo[2 * e + 1]
            while a != b:
                if depth[a] < depth[b]:
                    a, b = b, a
                d = parent[a]
                sig[d >> 1] ^= mask
                a = fo[d]
        return sig

    def homology_class(self, cycle: Sequence[int]) -> int:
        h = 0
        sig = self.signature
        for d in cycle:
            h ^= sig[d >> 1]
        return h

    def is_contractible(self, cycle: Sequence[int], validate: bool = True) -> bool:
        if validate:
            check_cycle(self.G, cycle)
        if self.homology_class(cycle):
            return False
        if self._separating_is_disk:
            return True
        G = self.G
        fo = G.face_of
        blocked = {d >> 1 for d in cycle}
        sides = [set(fo[d] for d in cycle), set(fo[d ^ 1] for d in cycle)]
        if sides[0] & sides[1]:
            return False
        queues = [deque(sides[0]), deque(sides[1])]
        finished = [False, False]
        while not all(finished):
            for i in (0, 1):
                if finished[i]:
                    continue
                if not queues[i]:
                    finished[i] = True
                    if side_euler_characteristic(G, sides[i]) == 1:
                        return True
                    continue
                f = queues[i].popleft()
                for d in G.faces[f].darts:
                    if (d >> 1) in blocked:
                        continue
                    g = fo[d ^ 1]
                    if g in sides[1 - i]:
                        return False  # defensive: homology said separating
                    if g not in sides[i]:
                        sides[i].add(g)
                        queues[i].append(g)
        return False
