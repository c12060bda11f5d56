"""Deterministic instance generators for the test and experiment families."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .embedded import EmbeddedGraph, triangulate
from .errors import SurfsepError, TooSmall

FAMILIES = ("planar-grid", "torus-grid", "genus-sum", "random-triangulation")


def _grid(rows: int, cols: int, wrap: bool) -> EmbeddedGraph:
    def vid(i, j):
        return (i % rows) * cols + (j % cols)

    ends = []
    east = {}
    north = {}
    for i in range(rows):
        for j in range(cols):
            if wrap or j + 1 < cols:
                east[i, j] = len(ends)
                ends.append((vid(i, j), vid(i, j + 1)))
            if wrap or i + 1 < rows:
                north[i, j] = len(ends)
                ends.append((vid(i, j), vid(i + 1, j)))
    rot = []
    for i in range(rows):
        for j in range(cols):
            r = []
            if (i, j) in east:
                r.append(2 * east[i, j])
            if (i, j) in north:
                r.append(2 * north[i, j])
            west = (i, (j - 1) % cols) if wrap else (i, j - 1)
            if west in east:
                r.append(2 * east[west] + 1)
            south = ((i - 1) % rows, j) if wrap else (i - 1, j)
            if south in north:
                r.append(2 * north[south] + 1)
            rot.append(r)
    return EmbeddedGraph(rows * cols, ends, rot)


def gen_planar_grid(rows: int, cols: int) -> EmbeddedGraph:
    if rows < 1 or cols < 1:
        raise TooSmall("grid needs at least one row and column")
    return _grid(rows, cols, wrap=False)


def gen_torus_grid(rows: int, cols: int) -> EmbeddedGraph:
    """rows x cols grid with wrap-around: V = rc, E = 2rc, F = rc, genus 1."""
    if rows < 3 or cols < 3:
        raise TooSmall("torus grid needs rows, cols >= 3")
    return _grid(rows, cols, wrap=True)


def _connect_faces(G: EmbeddedGraph, fa: int, H: EmbeddedGraph, fb: int) -> EmbeddedGraph:
    """Connected sum of G and H through a tube joining face fa of G to face fb of H.

    Both faces must have the same length; each corner of fa is joined to a
    corner of fb and the two faces are replaced by a ring of quadrilaterals.
    """
    da = G.faces[fa].darts
    db = H.faces[fb].darts
    if len(da) != len(db):
        raise SurfsepError("tube faces must have equal length")
    k = len(da)
    off = G.n
    eoff = G.m
    ends = list(G.edge_ends) + [(u + off, v + off) for u, v in H.edge_ends]
    base_rot = [list(r) for r in G.rotation] + [[d + 2 * eoff for d in r] for r in H.rotation]
    target = G.genus + H.genus
    # each corner of a face sits between rev(previous dart) and the current dart
    for shift in range(k):
        rot = [list(r) for r in base_rot]
        tube_ends = list(ends)
        for i in range(k):
            va = G.tail(da[i])
            j = (shift - i) % k
            vb = H.tail(db[j]) + off
            e = len(tube_ends)
            tube_ends.append((va, vb))
            ra = rot[va]
            ra.insert(ra.index(da[i]), 2 * e)
            rb = rot[vb]
            dbj = db[j] + 2 * eoff
            rb.insert(rb.index(dbj), 2 * e + 1)
        cand = EmbeddedGraph(G.n + H.n, tube_ends, rot)
        if cand.genus == target and len(cand.faces) == len(G.faces) + len(H.faces) - 2 + k:
            return cand
    raise SurfsepError("could not attach tube with a consistent orientation")


def gen_genus_sum(g: int, patch_size: int = 6) -> EmbeddedGraph:
    """Connected sum of g toroidal grids of side ``patch_size`` (genus g)."""
    if g < 1:
        raise TooSmall("genus-sum needs g >= 1")
    if patch_size < 4:
        raise TooSmall("patch_size must be >= 4")
    G = gen_torus_grid(patch_size, patch_size)
    far = (patch_size // 2) * patch_size + patch_size // 2
    for _ in range(1, g):
        H = gen_torus_grid(patch_size, patch_size)
        # face starting at the last torus's far vertex; H's face at its vertex 0
        last_far = G.n - patch_size * patch_size + far
        fa = G.face_of[G.rotation[last_far][0]]
        fb = H.face_of[H.rotation[0][0]]
        G = _connect_faces(G, fa, H, fb)
    return G


def gen_random_triangulation(n: int, seed: int) -> EmbeddedGraph:
    """Delaunay triangulation of n random points, outer face fanned (genus 0)."""
    from scipy.spatial import Delaunay

    if n < 4:
        raise TooSmall("random triangulation needs n >= 4")
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    tri = Delaunay(pts)
    edges = set()
    for a, b, c in tri.simplices:
        for u, v in ((a, b), (b, c), (a, c)):
            edges.add((min(u, v), max(u, v)))
    edges = sorted((int(u), int(v)) for u, v in edges)
    out = [[] for _ in range(n)]
    for e, (u, v) in enumerate(edges):
        out[u].append(2 * e)
        out[v].append(2 * e + 1)

    def angle(v, d):
        u, w = edges[d >> 1]
        other = w if d & 1 == 0 else u
        dx, dy = pts[other] - pts[v]
        return math.atan2(dy, dx)

    rot = [sorted(r, key=lambda d, v=v: angle(v, d)) for v, r in enumerate(out)]
    return triangulate(EmbeddedGraph(n, edges, rot))


@dataclass(frozen=True)
class InstanceSpec:
    family: str
    size: tuple = field(default_factory=tuple)
    seed: int = 0

    def build(self) -> EmbeddedGraph:
        if self.family == "planar-grid":
            return gen_planar_grid(*self.size)
        if self.family == "torus-grid":
            return gen_torus_grid(*self.size)
        if self.family == "genus-sum":
            return gen_genus_sum(*self.size)
        if self.family == "random-triangulation":
            return gen_random_triangulation(self.size[0], self.seed)
        raise SurfsepError(f"unknown family {self.family!r}")

    def label(self) -> str:
        return f"{self.family}:{'x'.join(map(str, self.size))}:{self.seed}"
