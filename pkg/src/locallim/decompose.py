"""Complex part / core / kernel decomposition and its inverse."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .errors import ContractViolation
from .graphcore import Graph, MultiGraph, _norm, components


@dataclass(frozen=True)
class Decomposition:
    complex_part: Graph
    non_complex_part: Graph
    core: Graph
    kernel: MultiGraph
    kernel_vertex_map: dict[int, int]
    edge_paths: dict[int, tuple[int, ...]]
    subdivision: dict[int, int]
    largest: tuple[int, ...]

    def to_json(self) -> str:
        def g(x):
            return {"vertices": sorted(x.vertices), "edges": [list(e) for e in x.sorted_edges()]}

        doc = {
            "complex_part": g(self.complex_part),
            "non_complex_part": g(self.non_complex_part),
            "core": g(self.core),
            "kernel": {"vertices": sorted(self.kernel.vertices), "edges": [list(e) for e in self.kernel.edges]},
            "kernel_vertex_map": {str(k): v for k, v in sorted(self.kernel_vertex_map.items())},
            "edge_paths": {str(k): list(v) for k, v in sorted(self.edge_paths.items())},
            "subdivision": {str(k): v for k, v in sorted(self.subdivision.items())},
            "largest": list(self.largest),
        }
        return json.dumps(doc, indent=2)


@dataclass(frozen=True)
class StructureStats:
    n: int
    m: int
    n_U: int
    m_U: int
    v_Q: int
    v_C: int
    v_K: int
    e_K: int
    v_L: int
    v_Rest_of_Q: int

    FIELDS = ("n", "m", "n_U", "m_U", "v_Q", "v_C", "v_K", "e_K", "v_L", "v_Rest_of_Q")

    def as_row(self) -> list[int]:
        return [getattr(self, f) for f in self.FIELDS]

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


def _excess_by_component(g: Graph) -> list[tuple[tuple[int, ...], int]]:
    comps = components(g)
    where = {}
    for i, c in enumerate(comps):
        for v in c:
            where[v] = i
    ecount = [0] * len(comps)
    for u, _ in g.edges:
        ecount[where[u]] += 1
    return [(c, ecount[i] - len(c)) for i, c in enumerate(comps)]


def split_complex(g: Graph) -> tuple[Graph, Graph]:
    """Complex components are those with at least two independent cycles,
    i.e. ``e >= v + 1``."""
    cx: set[int] = set()
    for comp, excess in _excess_by_component(g):
        if excess >= 1:
            cx.update(comp)
    rest = g.vertices - cx
    return g.induced(cx), g.induced(rest)


def has_complex_component(g: Graph) -> bool:
    """Union-find excess check; cheaper than ``split_complex`` for rejection loops."""
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    # a component is complex iff it receives two cycle-closing edges
    cycles: dict[int, int] = {}
    for u, v in g.edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            k = cycles.get(ru, 0) + 1
            if k >= 2:
                return True
            cycles[ru] = k
        else:
            parent[ru] = rv
            k = cycles.pop(ru, 0) + cycles.get(rv, 0)
            if k >= 2:
                return True
            if k:
                cycles[rv] = k
    return False


def _prune_leaves(g: Graph) -> Graph:
    deg = {v: len(nb) for v, nb in g.adj.items()}
    adj = g.adj
    removed = set()
    stack = [v for v, d in deg.items() if d <= 1]
    while stack:
        v = stack.pop()
        if v in removed:
            continue
        removed.add(v)
        for w in adj[v]:
            if w not in removed:
                deg[w] -= 1
                if deg[w] <= 1:
                    stack.append(w)
    if not removed:
        return g
    return g.induced(g.vertices - removed)


def core_of(q: Graph) -> Graph:
    for comp, excess in _excess_by_component(q):
        if excess < 1:
            raise ContractViolation(f"component containing {comp[0]} is not complex")
    return _prune_leaves(q)


def kernel_of(c: Graph) -> tuple[MultiGraph, dict[int, int], dict[int, tuple[int, ...]], dict[int, int]]:
    """Contract maximal degree-2 paths of a core into kernel edges.

    Returns ``(kernel, kernel_vertex_map, edge_paths, subdivision)``.  Kernel
    vertices are ``1..v(K)`` assigned in order of original label; paths run
    from the smaller kernel id to the larger, loops start so that the first
    interior vertex is the smaller of the two candidates.
    """
    adj = c.adj
    for v, nb in adj.items():
        if len(nb) < 2:
            raise ContractViolation(f"vertex {v} has degree {len(nb)} < 2; not a core")
    for comp, excess in _excess_by_component(c):
        if excess < 1:
            raise ContractViolation(f"component containing {comp[0]} is a bare cycle")
    branch = sorted(v for v, nb in adj.items() if len(nb) >= 3)
    kid = {v: i for i, v in enumerate(branch, start=1)}
    used: set[tuple[int, int]] = set()
    raw = []
    for s in branch:
        for first in adj[s]:
            if _norm(s, first) in used:
                continue
            path = []
            prev, cur = s, first
            used.add(_norm(prev, cur))
            while cur not in kid:
                path.append(cur)
                a, b = adj[cur]
                nxt = b if a == prev else a
                prev, cur = cur, nxt
                used.add(_norm(prev, cur))
            a, b = kid[s], kid[cur]
            if a > b:
                a, b = b, a
                path.reverse()
            elif a == b and path[0] > path[-1]:
                path.reverse()
            raw.append((a, b, tuple(path)))
    raw.sort()
    kernel = MultiGraph(frozenset(kid.values()), tuple((a, b) for a, b, _ in raw))
    paths = {i: p for i, (_, _, p) in enumerate(raw)}
    sub = {i: len(p) for i, p in paths.items()}
    return kernel, {i: v for v, i in kid.items()}, paths, sub


def rebuild_core(k: MultiGraph, edge_paths: dict[int, tuple[int, ...]], kernel_vertex_map: dict[int, int]) -> Graph:
    if set(kernel_vertex_map) != set(k.vertices):
        raise ContractViolation("kernel_vertex_map does not cover the kernel vertices")
    labels = set(kernel_vertex_map.values())
    if len(labels) != len(kernel_vertex_map):
        raise ContractViolation("kernel_vertex_map is not injective")
    verts = set(labels)
    edges: set[tuple[int, int]] = set()
    for i, (a, b) in enumerate(k.edges):
        path = edge_paths.get(i, ())
        chain = [kernel_vertex_map[a], *path, kernel_vertex_map[b]]
        for x in path:
            if x in verts:
                raise ContractViolation(f"interior vertex {x} reused")
            verts.add(x)
        for x, y in zip(chain, chain[1:]):
            if x == y:
                raise ContractViolation(f"kernel edge {i} rebuilds to a loop")
            e = _norm(x, y)
            if e in edges:
                raise ContractViolation(f"kernel edge {i} rebuilds to a parallel edge")
            edges.add(e)
    return Graph._trusted(frozenset(verts), frozenset(edges))


_EMPTY_MULTI = MultiGraph(frozenset(), ())


def decompose(g: Graph) -> Decomposition:
    cx, rest = split_complex(g)
    largest = components(g)[0] if g.n else ()
    if cx.n == 0:
        return Decomposition(cx, rest, cx, _EMPTY_MULTI, {}, {}, {}, largest)
    core = _prune_leaves(cx)
    kernel, kmap, paths, sub = kernel_of(core)
    return Decomposition(cx, rest, core, kernel, kmap, paths, sub, largest)


def structure_stats(d: Decomposition) -> StructureStats:
    q = d.complex_part
    q_largest = len(components(q)[0]) if q.n else 0
    return StructureStats(
        n=q.n + d.non_complex_part.n,
        m=q.m + d.non_complex_part.m,
        n_U=d.non_complex_part.n,
        m_U=d.non_complex_part.m,
        v_Q=q.n,
        v_C=d.core.n,
        v_K=d.kernel.n,
        e_K=d.kernel.m,
        v_L=len(d.largest),
        v_Rest_of_Q=q.n - q_largest,
    )
