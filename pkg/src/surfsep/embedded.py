"""Rotation-system representation of graphs embedded on orientable surfaces.

Darts are plain integers: edge ``e`` with ends ``(u, v)`` owns dart ``2*e``
(u -> v, the *forward* dart) and ``2*e + 1`` (v -> u).  Reversal is ``d ^ 1``.

Face convention: ``next(d)`` is the rotation successor, at ``head(d)``, of
``rev(d)``.  The orbit of ``d`` under ``next`` is the face to the left of ``d``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .errors import (
    DegenerateFace,
    IndexOutOfRange,
    MalformedRotation,
    NonIntegerGenus,
    NotACycle,
)


class Dart(NamedTuple):
    edge: int
    forward: bool

    @property
    def id(self) -> int:
        return 2 * self.edge + (0 if self.forward else 1)

    @classmethod
    def from_id(cls, d: int) -> "Dart":
        return cls(d >> 1, not (d & 1))


def rev(d: int) -> int:
    return d ^ 1


def edge_of(d: int) -> int:
    return d >> 1


@dataclass(frozen=True)
class Face:
    id: int
    darts: tuple[int, ...]

    def __len__(self):
        return len(self.darts)


class EmbeddedGraph:
    """Immutable graph with a rotation system.

    ``labels`` maps local vertex indices to caller-facing ids; it defaults to
    the identity and is carried through :func:`induced_embedding` so that
    results on subgraphs can be reported in terms of the original graph.
    """

    def __init__(
        self,
        n: int,
        edge_ends: Sequence[tuple[int, int]],
        rotation: Sequence[Sequence[int]],
        labels: Sequence[int] | None = None,
        validate: bool = True,
    ):
        self.n = n
        self.edge_ends = tuple((int(u), int(v)) for u, v in edge_ends)
        self.rotation = tuple(tuple(int(d) for d in r) for r in rotation)
        self.labels = tuple(range(n)) if labels is None else tuple(labels)
        if validate:
            self._validate()
        m2 = 2 * len(self.edge_ends)
        succ = [0] * m2
        for r in self.rotation:
            k = len(r)
            for i, d in enumerate(r):
                succ[d] = r[(i + 1) % k]
        self._succ = succ

    def _validate(self):
        n = self.n
        if len(self.rotation) != n:
            raise MalformedRotation(f"expected {n} rotations, got {len(self.rotation)}")
        if len(self.labels) != n:
            raise MalformedRotation("labels length differs from vertex count")
        for e, (u, v) in enumerate(self.edge_ends):
            if not (0 <= u < n and 0 <= v < n):
                raise IndexOutOfRange(f"edge {e} has endpoint outside [0, {n})")
        m2 = 2 * len(self.edge_ends)
        seen = [False] * m2
        for v, r in enumerate(self.rotation):
            for d in r:
                if not 0 <= d < m2:
                    raise IndexOutOfRange(f"dart {d} at vertex {v} does not exist")
                if seen[d]:
                    raise MalformedRotation(f"dart {d} listed twice")
                seen[d] = True
                if self.tail(d) != v:
                    raise MalformedRotation(f"dart {d} listed at {v}, its tail is {self.tail(d)}")
        missing = [d for d in range(m2) if not seen[d]]
        if missing:
            raise MalformedRotation(f"darts missing from rotation: {missing[:5]}")

    # -- basic accessors ----------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edge_ends)

    @property
    def num_darts(self) -> int:
        return 2 * len(self.edge_ends)

    def tail(self, d: int) -> int:
        u, v = self.edge_ends[d >> 1]
        return v if d & 1 else u

    def head(self, d: int) -> int:
        u, v = self.edge_ends[d >> 1]
        return u if d & 1 else v

    def succ(self, d: int) -> int:
        """Rotation successor of ``d`` around its tail."""
        return self._succ[d]

    def face_next(self, d: int) -> int:
        return self._succ[d ^ 1]

    def neighbors(self, v: int) -> list[int]:
        return [self.head(d) for d in self.rotation[v]]

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """Neighbour lists in rotation order (loops and multi-edges kept)."""
        return [self.neighbors(v) for v in range(self.n)]

    def find_dart(self, u: int, v: int) -> int | None:
        for d in self.rotation[u]:
            if self.head(d) == v:
                return d
        return None

    # -- faces ----------------------------------------------------------------

    @cached_property
    def _face_data(self):
        m2 = self.num_darts
        face_of = [-1] * m2
        faces = []
        succ = self._succ
        for start in range(m2):
            if face_of[start] != -1:
                continue
            fid = len(faces)
            orbit = []
            d = start
            while face_of[d] == -1:
                face_of[d] = fid
                orbit.append(d)
                d = succ[d ^ 1]
            faces.append(Face(fid, tuple(orbit)))
        return faces, face_of

    @property
    def faces(self) -> list[Face]:
        return self._face_data[0]

    @property
    def face_of(self) -> list[int]:
        """Face id to the left of each dart."""
        return self._face_data[1]

    def face_vertices(self, f: int) -> list[int]:
        return [self.tail(d) for d in self.faces[f].darts]

    # -- connectivity -----------------------------------------------------------

    @cached_property
    def component_of(self) -> list[int]:
        comp = [-1] * self.n
        c = 0
        for s in range(self.n):
            if comp[s] != -1:
                continue
            comp[s] = c
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self.adjacency[u]:
                    if comp[w] == -1:
                        comp[w] = c
                        queue.append(w)
            c += 1
        return comp

    @property
    def num_components(self) -> int:
        return max(self.component_of, default=-1) + 1

    @cached_property
    def genus_per_component(self) -> list[int]:
        ncomp = self.num_components
        V = [0] * ncomp
        E = [0] * ncomp
        F = [0] * ncomp
        for v in range(self.n):
            V[self.component_of[v]] += 1
        for u, _ in self.edge_ends:
            E[self.component_of[u]] += 1
        for face in self.faces:
            F[self.component_of[self.tail(face.darts[0])]] += 1
        out = []
        for c in range(ncomp):
            f = F[c] if E[c] else 1  # an isolated vertex bounds one face
            chi = V[c] - E[c] + f
            if (2 - chi) % 2 or chi > 2:
                raise NonIntegerGenus(f"component {c}: V-E+F = {chi}")
            out.append((2 - chi) // 2)
        return out

    @property
    def genus(self) -> int:
        return sum(self.genus_per_component)

    def __eq__(self, other):
        if not isinstance(other, EmbeddedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.edge_ends == other.edge_ends
            and self.rotation == other.rotation
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.n, self.edge_ends, self.rotation))

    def __repr__(self):
        return f"EmbeddedGraph(n={self.n}, m={self.m}, faces={len(self.faces)}, genus={self.genus})"


def build_embedded_graph(n, edge_ends, rotation, labels=None) -> EmbeddedGraph:
    """Validate and build an embedded graph.

    ``rotation`` may contain :class:`Dart` tuples or integer dart ids.
    """
    rot = [[d.id if isinstance(d, Dart) else int(d) for d in r] for r in rotation]
    return EmbeddedGraph(n, edge_ends, rot, labels=labels)


def faces(G: EmbeddedGraph) -> list[Face]:
    return list(G.faces)


def euler_genus(G: EmbeddedGraph) -> list[int]:
    """Genus of every connected component; ``sum`` gives the total genus."""
    return list(G.genus_per_component)


# -- dual ------------------------------------------------------------------------


@dataclass(frozen=True)
class DualGraph:
    """Dual of an embedded graph.

    ``embedding`` is itself an :class:`EmbeddedGraph` whose vertex ``f`` is
    primal face ``f`` and whose edge ``e`` crosses primal edge ``e``.  Dual
    dart ``d`` crosses primal dart ``d``; it leaves the face to the left of
    ``d``, so its left dual face is the primal vertex ``tail(d)``.
    """

    embedding: EmbeddedGraph

    @property
    def nodes(self) -> range:
        return range(self.embedding.n)

    @property
    def dual_edges(self) -> tuple[tuple[int, int], ...]:
        return self.embedding.edge_ends

    def crossing(self, dual_edge: int) -> int:
        return dual_edge

    def degree(self, node: int) -> int:
        return len(self.embedding.rotation[node])


def dual(G: EmbeddedGraph) -> DualGraph:
    fo = G.face_of
    ends = [(fo[2 * e], fo[2 * e + 1]) for e in range(G.m)]
    rot = [list(f.darts) for f in G.faces]
    return DualGraph(EmbeddedGraph(len(G.faces), ends, rot, validate=False))


# -- triangulation -------------------------------------------------------------------


def triangulate(G: EmbeddedGraph) -> EmbeddedGraph:
    """Split every face into triangles by fanning from its lowest-index vertex.

    New edges are appended after the original ones, so edge ``e < G.m`` keeps
    its meaning.  When the fan would need a loop (the lowest vertex recurs on
    the face), the anchor moves to the first position that avoids one.
    """
    ends = list(G.edge_ends)
    rot = [list(r) for r in G.rotation]

    def tail(d):
        u, v = ends[d >> 1]
        return v if d & 1 else u

    def head(d):
        u, v = ends[d >> 1]
        return u if d & 1 else v

    for face in G.faces:
        darts = list(face.darts)
        if len(darts) < 3:
            raise DegenerateFace(f"face {face.id} has {len(darts)} darts")
        anchor = min(range(len(darts)), key=lambda i: (tail(darts[i]), i))
        while len(darts) > 3:
            k = len(darts)
            i = anchor
            if head(darts[(i + 1) % k]) == tail(darts[i]):
                for j in range(k):
                    if head(darts[(j + 1) % k]) != tail(darts[j]):
                        i = j
                        break
                else:
                    raise DegenerateFace(f"face {face.id} admits only loop chords")
            d_i, d_j = darts[i], darts[(i + 1) % k]
            a, c = tail(d_i), head(d_j)
            e = len(ends)
            ends.append((c, a))
            x, rx = 2 * e, 2 * e + 1
            rc = rot[c]
            rc.insert(rc.index(d_j ^ 1) + 1, x)
            ra = rot[a]
            ra.insert(ra.index(d_i), rx)
            if i + 1 < k:
                darts[i : i + 2] = [rx]
            else:
                darts = [rx] + darts[1:-1]
                i = 0
            anchor = i
    return EmbeddedGraph(G.n, ends, rot, labels=G.labels, validate=False)


def is_triangulated(G: EmbeddedGraph) -> bool:
    return all(len(f) == 3 for f in G.faces)


# -- cycles and regions ---------------------------------------------------------------


def check_cycle(G: EmbeddedGraph, cycle: Sequence[int]) -> None:
    """Raise NotACycle unless ``cycle`` is a closed dart walk with distinct vertices."""
    if not cycle:
        raise NotACycle("empty cycle")
    k = len(cycle)
    seen = set()
    for i, d in enumerate(cycle):
        if not 0 <= d < G.num_darts:
            raise NotACycle(f"dart {d} does not exist")
        if G.head(d) != G.tail(cycle[(i + 1) % k]):
            raise NotACycle("darts do not chain")
        t = G.tail(d)
        if t in seen:
            raise NotACycle(f"vertex {t} repeated")
        seen.add(t)
    if k == 2 and cycle[0] >> 1 == cycle[1] >> 1:
        raise NotACycle("a single edge traversed twice is not a cycle")


@dataclass(frozen=True)
class CycleSides:
    left: frozenset
    right: frozenset
    separating: bool


def _flood(G: EmbeddedGraph, seeds: Iterable[int], blocked: set[int]) -> set[int]:
    fo = G.face_of
    fcs = G.faces
    seen = set(seeds)
    stack = list(seen)
    while stack:
        f = stack.pop()
        for d in fcs[f].darts:
            if (d >> 1) in blocked:
                continue
            g = fo[d ^ 1]
            if g not in seen:
                seen.add(g)
                stack.append(g)
    return seen


def cycle_sides(G: EmbeddedGraph, cycle: Sequence[int]) -> CycleSides:
    """Face sets on the left and right of a simple directed cycle.

    For a non-separating cycle both sides are the same face set and
    ``separating`` is False.
    """
    check_cycle(G, cycle)
    fo = G.face_of
    blocked = {d >> 1 for d in cycle}
    left_seeds = {fo[d] for d in cycle}
    right_seeds = {fo[d ^ 1] for d in cycle}
    left = _flood(G, left_seeds, blocked)
    if left & right_seeds:
        frozen = frozenset(left)
        return CycleSides(frozen, frozen, False)
    right = _flood(G, right_seeds, blocked)
    return CycleSides(frozenset(left), frozenset(right), True)


def region_boundary(G: EmbeddedGraph, region: Iterable[int]) -> list[list[int]]:
    """Boundary of a face set as closed dart walks with the region on their left."""
    R = set(region)
    fo = G.face_of
    succ = G._succ
    nxt = {}
    for f in R:
        for d in G.faces[f].darts:
            if fo[d ^ 1] in R:
                continue
            d2 = succ[d ^ 1]
            while fo[d2 ^ 1] in R:
                d2 = succ[d2]
            nxt[d] = d2
    cycles = []
    done = set()
    for d in sorted(nxt):
        if d in done:
            continue
        cyc = []
        while d not in done:
            done.add(d)
            cyc.append(d)
            d = nxt[d]
        cycles.append(cyc)
    return cycles


def induced_embedding(G: EmbeddedGraph, keep: Iterable[int]) -> EmbeddedGraph:
    """Subgraph on ``keep`` with each rotation restricted to surviving darts.

    Vertices are renumbered densely in increasing order; ``labels`` carries
    the original ids.
    """
    keep = sorted(set(keep))
    local = {v: i for i, v in enumerate(keep)}
    new_edge = {}
    ends = []
    for e, (u, v) in enumerate(G.edge_ends):
        if u in local and v in local:
            new_edge[e] = len(ends)
            ends.append((local[u], local[v]))
    rot = []
    for v in keep:
        r = []
        for d in G.rotation[v]:
            ne = new_edge.get(d >> 1)
            if ne is not None:
                r.append(2 * ne + (d & 1))
        rot.append(r)
    labels = [G.labels[v] for v in keep]
    return EmbeddedGraph(len(keep), ends, rot, labels=labels, validate=False)


# -- .rot text format ------------------------------------------------------------------


def dart_token(d: int) -> str:
    return f"{d >> 1}{'-' if d & 1 else '+'}"


def parse_dart_token(tok: str) -> int:
    if not tok or tok[-1] not in "+-" or not tok[:-1].isdigit():
        raise MalformedRotation(f"bad dart token {tok!r}")
    return 2 * int(tok[:-1]) + (1 if tok[-1] == "-" else 0)


def to_rot(G: EmbeddedGraph) -> str:
    lines = [f"{G.n} {G.m}"]
    lines += [f"edge {e} {u} {v}" for e, (u, v) in enumerate(G.edge_ends)]
    for v, r in enumerate(G.rotation):
        lines.append(" ".join(["rot", str(v)] + [dart_token(d) for d in r]))
    return "\n".join(lines) + "\n"


def from_rot(text: str) -> EmbeddedGraph:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if line:
            rows.append(line)
    if not rows or len(rows[0]) != 2:
        raise MalformedRotation("header must be 'n m'")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
    except ValueError as exc:
        raise MalformedRotation("header must be two integers") from exc
    ends: list = [None] * m
    rot: list = [None] * n
    for row in rows[1:]:
        kind = row[0]
        try:
            if kind == "edge" and len(row) == 4:
                e, u, v = int(row[1]), int(row[2]), int(row[3])
                if not 0 <= e < m:
                    raise IndexOutOfRange(f"edge id {e} outside [0, {m})")
                ends[e] = (u, v)
            elif kind == "rot" and len(row) >= 2:
                v = int(row[1])
                if not 0 <= v < n:
                    raise IndexOutOfRange(f"vertex {v} outside [0, {n})")
                rot[v] = [parse_dart_token(t) for t in row[2:]]
            else:
                raise MalformedRotation(f"unrecognised line: {' '.join(row)}")
        except ValueError as exc:
            raise MalformedRotation(f"bad integer in line: {' '.join(row)}") from exc
    if any(x is None for x in ends):
        raise MalformedRotation("some edges are not defined")
    rot = [r if r is not None else [] for r in rot]
    return EmbeddedGraph(n, ends, rot)


def read_rot(path) -> EmbeddedGraph:
    with open(path) as fh:
        return from_rot(fh.read())


def write_rot(G: EmbeddedGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(to_rot(G))
