import itertools
import random

import numpy as np
import pytest

from oracles import brute_contractible, enumerate_simple_cycles, random_embedded_graph, small_corpus
from surfsep.embedded import EmbeddedGraph, triangulate
from surfsep.errors import ComponentTooSmall
from surfsep.generators import gen_planar_grid, gen_torus_grid
from surfsep.planarity import ContractibilityOracle
from surfsep.voronoi import (
    adjacent_boss_pairs,
    bfs_levels,
    boss,
    decompose,
    k_max_independent_set,
    k_neighborhood,
    noncontractible_in_two_regions,
    nrst,
    scan_boss_pairs,
    voronoi_regions,
)


def path(n):
    ends = [(i, i + 1) for i in range(n - 1)]
    rot = [[] for _ in range(n)]
    for e, (u, v) in enumerate(ends):
        rot[u].append(2 * e)
        rot[v].append(2 * e + 1)
    return EmbeddedGraph(n, ends, rot)


def star(leaves):
    ends = [(0, i) for i in range(1, leaves + 1)]
    rot = [[2 * e for e in range(leaves)]] + [[2 * e + 1] for e in range(leaves)]
    return EmbeddedGraph(leaves + 1, ends, rot)


def complete(n, seed=0):
    ends = list(itertools.combinations(range(n), 2))
    rot = [[] for _ in range(n)]
    for e, (u, v) in enumerate(ends):
        rot[u].append(2 * e)
        rot[v].append(2 * e + 1)
    rng = random.Random(seed)
    for r in rot:
        rng.shuffle(r)
    return EmbeddedGraph(n, ends, rot)


def test_bfs_levels_on_path():
    assert bfs_levels(path(5), 2) == [[2], [1, 3], [0, 4]]


def test_bfs_levels_isolated_vertex():
    G = EmbeddedGraph(2, [], [[], []])
    assert bfs_levels(G, 0) == [[0]]


def test_bfs_levels_match_matrix_powers():
    G = gen_torus_grid(6, 6)
    A = np.zeros((G.n, G.n), dtype=int)
    for u, v in G.edge_ends:
        A[u, v] = A[v, u] = 1
    v = 7
    reach = np.zeros(G.n, dtype=int)
    reach[v] = 1
    seen = {v}
    for level in bfs_levels(G, v)[1:]:
        reach = (A @ reach > 0).astype(int) | reach
        new = {u for u in range(G.n) if reach[u]} - seen
        assert new == set(level)
        seen |= new


def test_k_neighborhood_examples():
    assert k_neighborhood(star(5), 0, 3) == frozenset(range(1, 6))
    assert k_neighborhood(path(5), 2, 2) == frozenset({1, 3})
    G = gen_torus_grid(4, 4)
    nb = k_neighborhood(G, 0, 5)
    levels = bfs_levels(G, 0)
    assert len(levels[1]) == 4
    assert nb == frozenset(levels[1] + levels[2])
    assert 0 not in nb


def test_k_neighborhood_component_too_small():
    with pytest.raises(ComponentTooSmall):
        k_neighborhood(path(3), 0, 5)


def test_mis_on_short_path_and_complete_graph():
    assert k_max_independent_set(path(6), 3) == [0]
    assert k_max_independent_set(complete(7), 4) == [0]


def check_mis(G, k, I):
    nbs = {v: k_neighborhood(G, v, k) for v in range(G.n)}
    for a, b in itertools.combinations(I, 2):
        assert not nbs[a] & nbs[b]
    used = set().union(*(nbs[b] for b in I))
    for v in range(G.n):
        if v not in I:
            assert nbs[v] & used, f"{v} could be added"


@pytest.mark.parametrize("r,k", [(6, 4), (8, 8), (10, 6), (12, 12)])
def test_mis_properties_on_tori(r, k):
    G = triangulate(gen_torus_grid(r, r))
    check_mis(G, k, k_max_independent_set(G, k))


def check_decomposition(G, dec):
    # partition, connectivity, boss oracle, tree paths
    assert sorted(v for reg in dec.regions.values() for v in reg) == list(range(G.n))
    adj = G.adjacency
    for b, reg in dec.regions.items():
        assert b in reg
        comp = {b}
        stack = [b]
        inreg = set(reg)
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in inreg and w not in comp:
                    comp.add(w)
                    stack.append(w)
        assert comp == inreg
    for v in range(G.n):
        if v not in dec.boss_violations:
            assert dec.assignment[v] == boss(G, dec.bosses, v, dec.k)
        up = dec.tree_path_up(v)
        if up:
            assert G.tail(up[0]) == v and G.head(up[-1]) == dec.assignment[v]
            assert all(G.head(up[i]) == G.tail(up[i + 1]) for i in range(len(up) - 1))
            assert all(dec.assignment[G.head(d)] == dec.assignment[v] for d in up)


@pytest.mark.parametrize("r", [5, 8, 11])
def test_decomposition_on_tori(r):
    G = triangulate(gen_torus_grid(r, r))
    check_decomposition(G, decompose(G, max(4, r)))


def test_single_boss_region_is_everything():
    G = path(6)
    dec = voronoi_regions(G, [0], 3)
    assert dec.regions == {0: list(range(6))}


def test_two_bosses_on_a_path_split_contiguously():
    G = path(12)
    dec = voronoi_regions(G, [1, 10], 2)
    assert dec.regions[1] == list(range(0, 6))
    assert dec.regions[10] == list(range(6, 12))
    assert [dec.assignment[v] for v in range(12)] == [boss(G, [1, 10], v, 2) for v in range(12)]


def test_symmetric_tie_goes_to_lower_index():
    G = path(11)
    dec = voronoi_regions(G, [1, 9], 1)
    # vertex 5 is at distance 3 from both neighbourhoods {0, 2} and {8, 10}
    assert dec.assignment[5] == 1 == boss(G, [1, 9], 5, 1)
    assert nrst(G, 5, [8, 2]) == 2


def test_planar_instances_never_yield_a_cycle():
    G = triangulate(gen_planar_grid(8, 8))
    dec = decompose(G, 6)
    assert scan_boss_pairs(G, dec) is None
    for b1, b2 in adjacent_boss_pairs(G, dec):
        assert noncontractible_in_two_regions(G, dec, b1, b2) is None


def test_tree_union_yields_none():
    G = path(10)
    dec = decompose(G, 2)
    for b1, b2 in adjacent_boss_pairs(G, dec):
        assert noncontractible_in_two_regions(G, dec, b1, b2) is None


def test_meridian_found_when_two_regions_cover_the_torus():
    G = triangulate(gen_torus_grid(4, 4))
    dec = decompose(G, 4)
    oracle = ContractibilityOracle(G)
    pairs = [(b, b) for b in dec.bosses] + adjacent_boss_pairs(G, dec)
    found = [noncontractible_in_two_regions(G, dec, a, b, oracle) for a, b in pairs]
    cyc = next(c for c in found if c is not None)
    assert not brute_contractible(G, cyc)


def exhaustive_has_noncontractible(G, verts):
    """Any simple cycle of G[verts] that bounds no disk?"""
    keep = set(verts)
    for c in enumerate_simple_cycles(G):
        if all(G.tail(d) in keep for d in c) and not brute_contractible(G, c):
            return True
    return False


def test_two_region_scan_is_exhaustive_on_small_graphs():
    checked = 0
    for G in small_corpus(200, seed=11):
        if G.n < 5:
            continue
        dec = decompose(G, 4)
        oracle = ContractibilityOracle(G)
        pairs = [(b, b) for b in dec.bosses] + adjacent_boss_pairs(G, dec)
        for b1, b2 in pairs:
            verts = set(dec.regions[b1]) | set(dec.regions[b2])
            got = noncontractible_in_two_regions(G, dec, b1, b2, oracle)
            if got is None:
                assert not exhaustive_has_noncontractible(G, verts)
            else:
                assert not brute_contractible(G, got)
                assert {G.tail(d) for d in got} <= verts
            checked += 1
    assert checked >= 100
