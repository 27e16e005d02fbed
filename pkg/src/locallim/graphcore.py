"""Labelled simple graphs, multigraphs and the traversal primitives built on them.

Vertices are positive integers.  A graph produced by ``parse_graph`` or the
samplers lives on ``1..n``; subgraphs produced by the decomposition keep the
labels of the graph they were cut from.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import ContractViolation, ParseError
from .planarity import lr_planar

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on an explicit vertex set.

    ``edges`` holds pairs ``(u, v)`` with ``u < v``.
    """

    vertices: frozenset[int]
    edges: frozenset[Edge]

    def __post_init__(self):
        for u, v in self.edges:
            if u >= v:
                raise ContractViolation(f"edge {(u, v)} is a loop or not normalised (need u < v)")
            if u not in self.vertices or v not in self.vertices:
                raise ContractViolation(f"edge {(u, v)} has an endpoint outside the vertex set")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]] = ()) -> "Graph":
        """Graph on ``1..n``; edges may be given in either orientation."""
        es = set()
        for u, v in edges:
            if u == v:
                raise ContractViolation(f"loop at vertex {u}")
            e = _norm(u, v)
            if e in es:
                raise ContractViolation(f"duplicate edge {e}")
            es.add(e)
        return cls(frozenset(range(1, n + 1)), frozenset(es))

    @classmethod
    def _trusted(cls, vertices: frozenset[int], edges: frozenset[Edge]) -> "Graph":
        # skips validation; callers guarantee normalised, in-range edges
        g = object.__new__(cls)
        object.__setattr__(g, "vertices", vertices)
        object.__setattr__(g, "edges", edges)
        return g

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adj(self) -> dict[int, list[int]]:
        """Sorted neighbour lists."""
        nb: dict[int, list[int]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        for lst in nb.values():
            lst.sort()
        return nb

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def is_standard(self) -> bool:
        """True when the vertex set is exactly ``1..n``."""
        n = self.n
        return n == 0 or (min(self.vertices) == 1 and max(self.vertices) == n)

    def induced(self, keep: Iterable[int]) -> "Graph":
        keep = frozenset(keep)
        return Graph._trusted(keep, frozenset(e for e in self.edges if e[0] in keep and e[1] in keep))

    def relabel(self, mapping: Mapping[int, int]) -> "Graph":
        return Graph(
            frozenset(mapping[v] for v in self.vertices),
            frozenset(_norm(mapping[u], mapping[v]) for u, v in self.edges),
        )

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


@dataclass(frozen=True)
class MultiGraph:
    """Undirected multigraph; loops and repeated pairs allowed.

    Edge ``i`` of ``edges`` has id ``i``; ids are what subdivision numbers
    and edge paths are keyed by.
    """

    vertices: frozenset[int]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        for u, v in self.edges:
            if u not in self.vertices or v not in self.vertices:
                raise ContractViolation(f"edge {(u, v)} has an endpoint outside the vertex set")

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> dict[int, int]:
        deg = {v: 0 for v in self.vertices}
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1  # a loop lands here twice
        return deg

    def canonical(self) -> tuple[tuple[int, ...], tuple[Edge, ...]]:
        """Id-independent form: sorted vertices and sorted normalised edges."""
        return tuple(sorted(self.vertices)), tuple(sorted(_norm(u, v) for u, v in self.edges))


@dataclass(frozen=True)
class RootedBall:
    """Induced ball around a root, relabelled ``1..b`` by (depth, original label).

    The root is always vertex 1.  ``labels[i - 1]`` is the original label of
    ball vertex ``i`` and ``depth[i - 1]`` its distance from the root.
    """

    graph: Graph
    radius: int
    depth: tuple[int, ...]
    labels: tuple[int, ...] = field(default=())
    root: int = 1

    @property
    def size(self) -> int:
        return self.graph.n

    def is_tree(self) -> bool:
        return self.graph.m == self.graph.n - 1


# ---------------------------------------------------------------------------
# edge-list text format


def _edge_rows(text: str) -> tuple[int, list[tuple[int, int, int]]]:
    """Header ``n`` and ``(line, u, v)`` rows, with count and range checks."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        rows.append((lineno, s))
    if not rows:
        raise ParseError(1, "missing 'n m' header")
    lineno, head = rows[0]
    parts = head.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ParseError(lineno, f"header must be 'n m', got {head!r}")
    n, m = int(parts[0]), int(parts[1])
    body = rows[1:]
    if len(body) != m:
        line = body[m][0] if len(body) > m else (body[-1][0] + 1 if body else lineno + 1)
        raise ParseError(line, f"expected {m} edge lines, found {len(body)}")
    out = []
    for lineno, s in body:
        parts = s.split()
        if len(parts) != 2 or not all(p.lstrip("-").isdigit() for p in parts):
            raise ParseError(lineno, f"malformed edge line {s!r}")
        u, v = int(parts[0]), int(parts[1])
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(lineno, f"label out of range 1..{n}")
        out.append((lineno, u, v))
    return n, out


def parse_graph(text: str) -> Graph:
    """Parse the ``n m`` header + ``u v`` lines format.  Lines starting with
    ``#`` and blank lines are ignored."""
    n, rows = _edge_rows(text)
    seen: set[Edge] = set()
    for lineno, u, v in rows:
        if u == v:
            raise ParseError(lineno, f"loop at vertex {u}")
        if u > v:
            raise ParseError(lineno, f"edge must satisfy u < v, got {u} {v}")
        if (u, v) in seen:
            raise ParseError(lineno, f"duplicate edge {u} {v}")
        seen.add((u, v))
    return Graph._trusted(frozenset(range(1, n + 1)), frozenset(seen))


def parse_multigraph(text: str) -> MultiGraph:
    """Same layout as ``parse_graph``; loops and repeated edges are allowed."""
    n, rows = _edge_rows(text)
    return MultiGraph(frozenset(range(1, n + 1)), tuple((u, v) for _, u, v in rows))


def format_graph(g: Graph, comments: Iterable[str] = ()) -> str:
    if not g.is_standard():
        raise ContractViolation("only graphs on 1..n can be serialised")
    out = [f"# {c}" for c in comments]
    out.append(f"{g.n} {g.m}")
    out.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# traversal


def components(g: Graph) -> list[tuple[int, ...]]:
    """Connected components, largest first, ties by smallest label."""
    adj = g.adj
    seen: set[int] = set()
    comps = []
    for s in sorted(g.vertices):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        comp.sort()
        comps.append(tuple(comp))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def largest_component(g: Graph) -> tuple[int, ...]:
    if g.n == 0:
        raise ContractViolation("largest component of the empty graph")
    return components(g)[0]


def distance(g: Graph, u: int, v: int) -> int | None:
    """Shortest-path length, or None when ``u`` and ``v`` are disconnected."""
    if u not in g.vertices or v not in g.vertices:
        raise ContractViolation("vertex outside the graph")
    if u == v:
        return 0
    adj = g.adj
    dist = {u: 0}
    q = deque([u])
    while q:
        x = q.popleft()
        d = dist[x] + 1
        for y in adj[x]:
            if y not in dist:
                if y == v:
                    return d
                dist[y] = d
                q.append(y)
    return None


def bfs_depths(g: Graph, v: int, radius: int) -> dict[int, int]:
    """Distances from ``v`` for every vertex within ``radius``."""
    adj = g.adj
    dist = {v: 0}
    frontier = [v]
    for d in range(1, radius + 1):
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist:
                    dist[y] = d
                    nxt.append(y)
        if not nxt:
            break
        frontier = nxt
    return dist


def ball(g: Graph, v: int, radius: int) -> RootedBall:
    if v not in g.vertices:
        raise ContractViolation(f"root {v} not in graph")
    if radius < 0:
        raise ContractViolation("radius must be non-negative")
    dist = bfs_depths(g, v, radius)
    order = sorted(dist, key=lambda x: (dist[x], x))
    new = {x: i for i, x in enumerate(order, start=1)}
    adj = g.adj
    edges = set()
    for x in order:
        nx_ = new[x]
        for y in adj[x]:
            ny = new.get(y)
            if ny is not None and nx_ < ny:
                edges.add((nx_, ny))
    bg = Graph._trusted(frozenset(range(1, len(order) + 1)), frozenset(edges))
    return RootedBall(bg, radius, tuple(dist[x] for x in order), tuple(order))


def is_planar(g: Graph) -> bool:
    n, m = g.n, g.m
    if n >= 3 and m > 3 * n - 6:
        return False
    # K3,3 has 9 edges and K5 10; on 5 vertices only K5 itself is non-planar
    if m <= 8 or n <= 5:
        return True
    return lr_planar(g.vertices, g.adj)
