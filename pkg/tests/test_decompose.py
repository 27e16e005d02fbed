import json

import networkx as nx
import pytest
from hypothesis import given

from locallim.decompose import core_of, decompose, kernel_of, rebuild_core, split_complex, structure_stats
from locallim.errors import ContractViolation
from locallim.graphcore import Graph, MultiGraph, components

from .conftest import random_graph
from .strategies import graphs


def figure_eight():
    return Graph.from_edges(5, [(1, 2), (2, 3), (1, 3), (1, 4), (4, 5), (1, 5)])


def excess(g: Graph) -> int:
    return g.m - g.n


def test_split_examples(k4):
    uni = Graph.from_edges(5, [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5)])
    cx, rest = split_complex(uni)
    assert cx.n == 0 and rest == uni
    g = Graph.from_edges(6, [*k4.edges, (5, 6)])
    cx, rest = split_complex(g)
    assert cx.vertices == {1, 2, 3, 4} and cx.m == 6
    assert rest.vertices == {5, 6} and rest.edges == {(5, 6)}
    tree = Graph.from_edges(4, [(1, 2), (2, 3), (2, 4)])
    assert split_complex(tree)[0].n == 0


@given(graphs(max_n=11))
def test_split_agrees_with_cycle_space(g):
    cx, rest = split_complex(g)
    assert cx.vertices | rest.vertices == g.vertices and not cx.vertices & rest.vertices
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.edges)
    for comp in nx.connected_components(h):
        sub = h.subgraph(comp)
        dim = sub.number_of_edges() - sub.number_of_nodes() + 1
        assert (comp <= cx.vertices) == (dim >= 2)


def test_core_examples(k4, theta):
    pendant = Graph.from_edges(7, [*k4.edges, (4, 5), (5, 6), (6, 7)])
    assert core_of(pendant) == k4
    assert core_of(theta) == theta
    assert core_of(k4) == k4


def test_core_rejects_non_complex():
    with pytest.raises(ContractViolation):
        core_of(Graph.from_edges(3, [(1, 2), (2, 3), (1, 3)]))


def test_kernel_theta(theta):
    k, kmap, paths, sub = kernel_of(theta)
    assert k.n == 2 and k.m == 3
    assert {tuple(sorted((kmap[a], kmap[b]))) for a, b in k.edges} == {(1, 2)}
    assert sorted(sub.values()) == [0, 1, 1]


def test_kernel_figure_eight():
    k, kmap, paths, sub = kernel_of(figure_eight())
    assert k.n == 1 and k.m == 2
    assert all(a == b for a, b in k.edges)
    assert sorted(sub.values()) == [2, 2]
    # loop paths start at the smaller neighbour
    assert sorted(paths.values()) == [(2, 3), (4, 5)]


def test_kernel_k4(k4):
    k, kmap, paths, sub = kernel_of(k4)
    assert k.m == 6 and set(sub.values()) == {0}


def test_kernel_rejects_bare_cycle():
    with pytest.raises(ContractViolation):
        kernel_of(Graph.from_edges(4, [(1, 2), (2, 3), (3, 4), (1, 4)]))


def test_rebuild_examples(k4, theta):
    for c in (k4, theta, figure_eight()):
        k, kmap, paths, _ = kernel_of(c)
        assert rebuild_core(k, paths, kmap) == c


def test_rebuild_rejects_reused_interior():
    k = MultiGraph(frozenset({1, 2}), ((1, 2), (1, 2), (1, 2)))
    with pytest.raises(ContractViolation):
        rebuild_core(k, {0: (), 1: (3,), 2: (3,)}, {1: 1, 2: 2})


def test_decompose_forest():
    g = Graph.from_edges(5, [(1, 2), (2, 3), (4, 5)])
    d = decompose(g)
    assert d.non_complex_part == g
    assert d.complex_part.n == d.core.n == d.kernel.n == 0
    assert not d.subdivision and not d.edge_paths


def test_decompose_mixed(k4):
    # K4 with a pendant tree, plus a separate unicyclic component
    edges = [*k4.edges, (4, 5), (5, 6), (5, 7), (8, 9), (9, 10), (8, 10), (10, 11)]
    d = decompose(Graph.from_edges(11, edges))
    assert d.complex_part.vertices == set(range(1, 8))
    assert d.core == k4
    assert d.kernel.n == 4 and d.kernel.m == 6
    assert d.non_complex_part.vertices == {8, 9, 10, 11}


def test_decompose_two_k4():
    g = Graph.from_edges(8, [(a, b) for s in (0, 4) for a in range(1 + s, 5 + s) for b in range(a + 1, 5 + s)])
    d = decompose(g)
    assert d.kernel.n == 8 and d.kernel.m == 12


def check_invariants(g: Graph) -> None:
    d = decompose(g)
    assert d.complex_part.vertices | d.non_complex_part.vertices == g.vertices
    assert not d.complex_part.vertices & d.non_complex_part.vertices
    for comp in components(d.complex_part):
        sub = d.complex_part.induced(comp)
        assert sub.m >= sub.n + 1
    for comp in components(d.non_complex_part):
        sub = d.non_complex_part.induced(comp)
        assert sub.m <= sub.n
    if d.core.n:
        assert min(d.core.degree(v) for v in d.core.vertices) >= 2
        assert min(d.kernel.degrees().values()) >= 3
        assert core_of(d.core) == d.core
        assert excess(d.core) == d.kernel.m - d.kernel.n == excess(d.complex_part)
        assert rebuild_core(d.kernel, d.edge_paths, d.kernel_vertex_map) == d.core
        assert set(d.kernel_vertex_map.values()) <= d.core.vertices
        # the core is the 2-core of the complex part
        h = nx.Graph(list(d.complex_part.edges))
        assert set(nx.k_core(h, 2).nodes) == d.core.vertices
    for e, p in d.edge_paths.items():
        assert d.subdivision[e] == len(p)
    assert sum(d.subdivision.values()) == d.core.n - d.kernel.n
    assert d.largest == components(g)[0]


@given(graphs(max_n=12))
def test_invariants_hypothesis(g):
    check_invariants(g)


@pytest.mark.parametrize("seed", range(30))
def test_invariants_random_sparse(seed):
    n = 30 + 10 * (seed % 5)
    check_invariants(random_graph(n, (1.0 + 0.1 * (seed % 8)) / n, seed))


def test_kernel_edge_ids_stable():
    g = figure_eight()
    assert kernel_of(g)[2] == kernel_of(g)[2]


def test_structure_stats_examples(k4):
    tree = Graph.from_edges(10, [(i, i + 1) for i in range(1, 10)])
    s = structure_stats(decompose(tree))
    assert (s.n_U, s.m_U, s.v_Q, s.v_L) == (10, 9, 0, 10)
    s = structure_stats(decompose(k4))
    assert (s.v_Q, s.v_C, s.v_K, s.e_K, s.n_U) == (4, 4, 4, 6, 0)
    s = structure_stats(decompose(Graph.from_edges(5, k4.edges)))
    assert (s.v_L, s.n_U) == (4, 1)


def test_structure_stats_rest_of_q(k4):
    g = Graph.from_edges(9, [*k4.edges, (5, 6), (6, 7), (5, 7), (5, 8), (8, 9), (7, 9), (4, 9)])
    s = structure_stats(decompose(g))
    assert s.v_Q == 9 and s.v_L == 9 and s.v_Rest_of_Q == 0
    g = Graph.from_edges(10, [*k4.edges, (5, 6), (6, 7), (5, 7), (5, 8), (7, 8)])
    s = structure_stats(decompose(g))
    assert s.v_Q == 8 and s.v_L == 4 and s.v_Rest_of_Q == 4
    assert len(s.as_row()) == len(s.FIELDS)


def test_decomposition_json_fields(k4):
    doc = json.loads(decompose(k4).to_json())
    assert set(doc) == {"complex_part", "non_complex_part", "core", "kernel", "kernel_vertex_map", "edge_paths", "subdivision", "largest"}
