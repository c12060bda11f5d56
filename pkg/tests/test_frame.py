import math

import pytest

from surfsep import frame as fr
from surfsep.embedded import triangulate
from surfsep.errors import OverlappingTreePaths
from surfsep.generators import gen_planar_grid, gen_torus_grid
from surfsep.planarity import ContractibilityOracle
from surfsep.separator import simplify
from surfsep.voronoi import decompose


@pytest.fixture(scope="module")
def torus16():
    G = triangulate(gen_torus_grid(16, 16))
    dec = decompose(G, 16)
    bs = fr.branch_structure(G, dec)
    loops = fr.pre_frame_loops(G, dec, bs)
    return G, dec, bs, loops


def test_vertex_region_boundary_of_single_vertex():
    G = triangulate(gen_planar_grid(5, 5))
    v = 12
    [(dual_darts, walk)] = fr.vertex_region_boundary(G, {v})
    assert sorted(dual_darts) == sorted(G.rotation[v])
    assert walk == []


def test_vertex_region_boundary_walk_has_outside_on_left():
    G = triangulate(gen_planar_grid(6, 6))
    X = {14, 15, 20, 21}
    [(dual_darts, walk)] = fr.vertex_region_boundary(G, X)
    assert {G.head(d) for d in dual_darts}.isdisjoint(X)
    assert fr.cycle_vertices(G, walk) <= X
    side = fr.left_side(G, walk)
    assert side.separating and side.vertices.isdisjoint(X)
    assert len(side.vertices) == G.n - len(X)


def test_cancel_and_split_removes_back_and_forth():
    G = gen_torus_grid(4, 4)
    a, b = G.find_dart(0, 1), G.find_dart(1, 5)
    c, d = G.find_dart(5, 4), G.find_dart(4, 0)
    spur = G.find_dart(1, 2)
    walk = [a, spur, spur ^ 1, b, c, d]
    assert fr.cancel_and_split(G, walk) == [[a, b, c, d]]


def test_cancel_and_split_splits_figure_eight():
    G = gen_torus_grid(5, 5)
    first = [G.find_dart(u, v) for u, v in [(0, 1), (1, 6), (6, 5), (5, 0)]]
    second = [G.find_dart(u, v) for u, v in [(0, 4), (4, 24), (24, 20), (20, 0)]]
    cycles = fr.cancel_and_split(G, first + second)
    assert sorted(map(sorted, cycles)) == sorted([sorted(first), sorted(second)])
    assert all(fr.is_simple_cycle(G, c) for c in cycles)


def test_ridge_edges_are_intra_region_non_tree(torus16):
    G, dec, bs, _ = torus16
    tree = {dec.parent_dart[v] >> 1 for v in range(G.n) if dec.parent[v] != -1}
    for e in bs.ridge_edges:
        u, v = G.edge_ends[e]
        assert dec.assignment[u] == dec.assignment[v]
        assert e not in tree


def test_connectors_join_branch_vertices(torus16):
    G, dec, bs, _ = torus16
    branch = set(bs.branch_vertices)
    fo = G.face_of
    marked = bs.boundary_edges | bs.ridge_edges
    for con in bs.connectors:
        if con.closed:
            continue
        assert fo[con.first] in branch and fo[con.last ^ 1] in branch
        assert all((d >> 1) in marked for d in con.darts)
        inner = [fo[d ^ 1] for d in con.darts[:-1]]
        assert all(bs.degree[t] == 2 for t in inner)


def test_pre_frame_loops_are_closed(torus16):
    G, dec, bs, loops = torus16
    assert loops
    for loop in loops:
        k = len(loop.darts)
        assert all(G.head(loop.darts[i]) == G.tail(loop.darts[(i + 1) % k]) for i in range(k))
        assert loop.repeated_darts == len(loop.darts) - len(set(loop.darts))
        assert loop.loop_type in "AB"


def test_census_conservation(torus16):
    G, dec, bs, loops = torus16
    for loop in loops:
        cen = fr.loop_inside_census(G, loop)
        assert cen.n0 + len(cen.loop_vertices) + cen.outside == G.n


def test_frame_cycles_are_simple_and_graph_meets_bounds(torus16):
    G, dec, bs, loops = torus16
    cens = [fr.loop_inside_census(G, lp) for lp in loops]
    fcs = fr.frame_cycles(G, loops, cens)
    assert fcs.cycles and all(fr.is_simple_cycle(G, c) for c in fcs.cycles)
    H = fr.frame_graph(G, fcs, bs)
    cores = {b: fr.core_of(G, dec, b) for b in dec.bosses}
    ls = fr.level_structures(G, dec, ContractibilityOracle(G))
    floors, ceilings = fr.floor_and_ceiling_cycles(G, dec, ls, cores, bs)
    Hm = fr.modified_frame_graph(G, H, floors, ceilings)
    rep = fr.frame_report(G, Hm, dec.k)
    assert rep.failures() == []
    assert rep.cellular
    # face weights account for every vertex off the frame
    assert Hm.total_weight + len(Hm.vertices) == G.n


def test_overlap_strategy_raise_only_when_paths_repeat(torus16):
    G, dec, bs, loops = torus16
    if any(lp.repeated_darts for lp in loops):
        with pytest.raises(OverlappingTreePaths):
            fr.pre_frame_loops(G, dec, bs, on_overlap="raise")
    else:
        assert len(fr.pre_frame_loops(G, dec, bs, on_overlap="raise")) == len(loops)


def test_core_definition():
    G = triangulate(gen_torus_grid(20, 20))
    dec = decompose(G, 64)
    root_k = math.isqrt(64)
    for b in dec.bosses:
        core = fr.core_of(G, dec, b)
        assert 0 <= core.d_core <= core.d_nb
        assert b in core.vertices and len(core.vertices) < 64
        if core.cycle is not None:
            assert fr.is_simple_cycle(G, core.cycle)
            side = fr.left_side(G, core.cycle)
            assert b in side.vertices
            assert len(core.cycle) <= root_k or core.d_core == 0


def test_level_cycles_are_simple_and_flagged():
    G = triangulate(gen_torus_grid(24, 24))
    dec = decompose(G, 24)
    ls = fr.level_structures(G, dec)
    assert ls.cycles
    for c in ls.cycles:
        assert fr.is_simple_cycle(G, c.darts)
        assert c.kind in ("interior", "exterior")
        assert c.small == (len(c.darts) <= math.isqrt(24))
        if c.light:
            assert c.small and c.contractible and len(c.inside_vertices) < G.n / 3


def test_dump_frame_is_json(torus16):
    import json

    G, dec, bs, loops = torus16
    cens = [fr.loop_inside_census(G, lp) for lp in loops]
    fcs = fr.frame_cycles(G, loops, cens)
    H = fr.frame_graph(G, fcs, bs)
    doc = json.loads(fr.dump_frame(G, loops, fcs.cycles, H, fr.frame_report(G, H, 16)))
    assert len(doc["loops"]) == len(loops)
    assert sum(f["weight"] for f in doc["frame_graph"]["faces"]) == H.total_weight


def test_weigh_subgraph_of_a_meridian_pair():
    # two parallel meridians cut the torus into two annuli
    G = simplify(gen_torus_grid(6, 6))
    edges = {G.find_dart(v, (v + 6) % 36) >> 1 for v in range(0, 36, 6)}
    edges |= {G.find_dart(v, (v + 6) % 36) >> 1 for v in range(3, 36, 6)}
    fg = fr.weigh_subgraph(G, edges)
    assert sorted(fg.part_weight.values()) == [12, 12]
