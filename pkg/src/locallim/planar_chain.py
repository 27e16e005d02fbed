"""Edge-swap Markov chain on planar graphs with a fixed edge count.

A step removes a uniform edge and adds a uniform non-edge; the move is kept
iff the result is planar.  The proposal is symmetric, so the uniform law on
the chain's communicating class is stationary.  Irreducibility is not
established, so samples are approximate.

Planarity of ``G - e + f`` only needs checking when both ends of ``f`` lie in
one component of ``G - e``; the check then runs on the kernel of that
component's 2-core, which is usually tiny.
"""

from __future__ import annotations

import numpy as np

from .graphcore import Graph, _norm
from .planarity import lr_planar


def _start_edges(n: int, m: int) -> list[tuple[int, int]]:
    # path 3..n plus two apexes 1, 2 joined to everything: 3n - 6 edges, planar
    order = []
    order.extend((i, i + 1) for i in range(3, n))
    order.append((1, 2))
    for v in range(3, n + 1):
        order.append((1, v))
        order.append((2, v))
    if n == 2:
        order = [(1, 2)]
    return order[:m]


class _Draws:
    """Block-buffered integer draws from one generator."""

    def __init__(self, rng: np.random.Generator, block: int = 1 << 15):
        self.rng = rng
        self.block = block
        self._u: list[float] = []
        self._i = 0

    def below(self, k: int) -> int:
        if self._i >= len(self._u):
            self._u = self.rng.random(self.block).tolist()
            self._i = 0
        x = self._u[self._i]
        self._i += 1
        return int(x * k)


class PlanarChain:
    """Pure Python chain; the reference for ``FastPlanarChain``."""

    approximate = True

    def __init__(self, n: int, m: int, rng: np.random.Generator, start: Graph | None = None):
        self.n = n
        self.m = m
        edges = sorted(start.edges) if start is not None else _start_edges(n, m)
        self.edges: list[tuple[int, int]] = list(edges)
        self.index = {e: i for i, e in enumerate(self.edges)}
        self.adj: list[set[int]] = [set() for _ in range(n + 1)]
        for u, v in self.edges:
            self.adj[u].add(v)
            self.adj[v].add(u)
        self.draws = _Draws(rng)
        self.proposals = 0
        self.accepted = 0

    def graph(self) -> Graph:
        return Graph._trusted(frozenset(range(1, self.n + 1)), frozenset(self.edges))

    def run(self, steps: int) -> None:
        for _ in range(steps):
            self.step()

    def step(self) -> bool:
        n, m = self.n, self.m
        self.proposals += 1
        if m == 0 or m == n * (n - 1) // 2:
            return False
        d = self.draws
        e = self.edges[d.below(m)]
        adj = self.adj
        while True:
            a = d.below(n) + 1
            b = d.below(n) + 1
            if a != b and b not in adj[a]:
                break
        u, v = e
        adj[u].discard(v)
        adj[v].discard(u)
        if self._planar_with(a, b):
            f = _norm(a, b)
            i = self.index.pop(e)
            self.edges[i] = f
            self.index[f] = i
            adj[a].add(b)
            adj[b].add(a)
            self.accepted += 1
            return True
        adj[u].add(v)
        adj[v].add(u)
        return False

    def _planar_with(self, a: int, b: int) -> bool:
        adj = self.adj
        seen = {a}
        stack = [a]
        found = False
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        found = b in seen
        if not found:
            return True
        return _component_planar_with(adj, seen, a, b)


def _component_planar_with(adj, comp: set[int], a: int, b: int) -> bool:
    nb = {x: set(adj[x]) for x in comp}
    nb[a].add(b)
    nb[b].add(a)
    # 2-core
    stack = [x for x, s in nb.items() if len(s) <= 1]
    while stack:
        x = stack.pop()
        s = nb.pop(x, None)
        if s is None:
            continue
        for y in s:
            t = nb.get(y)
            if t is not None:
                t.discard(x)
                if len(t) <= 1:
                    stack.append(y)
    # contract degree-2 vertices
    branch = [x for x, s in nb.items() if len(s) >= 3]
    if len(branch) < 5:
        return True
    kid = set(branch)
    kedges = set()
    for s in branch:
        for first in nb[s]:
            prev, cur = s, first
            while cur not in kid:
                p, q = nb[cur]
                prev, cur = cur, (q if p == prev else p)
            if cur != s:
                kedges.add(_norm(s, cur))
    if len(kedges) < 9:
        return True
    kadj: dict[int, list[int]] = {x: [] for x in branch}
    for x, y in kedges:
        kadj[x].append(y)
        kadj[y].append(x)
    return lr_planar(branch, kadj)


FAST_MAX_N = 2048


class FastPlanarChain:
    """numba-backed chain with the same trajectory as ``PlanarChain``.

    Uses dense ``(n+1)^2`` adjacency storage, so it is limited to
    ``n <= FAST_MAX_N``.
    """

    approximate = True

    def __init__(self, n: int, m: int, rng: np.random.Generator, start: Graph | None = None, block: int = 1 << 15):
        from . import _fastplanar

        if n > FAST_MAX_N:
            raise ValueError(f"FastPlanarChain supports n <= {FAST_MAX_N}")
        self._run = _fastplanar.chain_run
        self.n = n
        self.m = m
        self.rng = rng
        self.block = block
        edges = sorted(start.edges) if start is not None else _start_edges(n, m)
        self.eu = np.array([u for u, _ in edges], dtype=np.int64)
        self.ev = np.array([v for _, v in edges], dtype=np.int64)
        self.A = np.zeros((n + 1, n + 1), dtype=np.uint8)
        self.nbr = np.zeros((n + 1, max(n, 1)), dtype=np.int32)
        self.deg = np.zeros(n + 1, dtype=np.int64)
        for u, v in edges:
            self.A[u, v] = self.A[v, u] = 1
            self.nbr[u, self.deg[u]] = v
            self.deg[u] += 1
            self.nbr[v, self.deg[v]] = u
            self.deg[v] += 1
        self.stamp = np.zeros(n + 1, dtype=np.int64)
        self.rstamp = np.zeros(n + 1, dtype=np.int64)
        self.dloc = np.zeros(n + 1, dtype=np.int64)
        self.kidx = np.full(n + 1, -1, dtype=np.int64)
        self.tick = 0
        self.U = np.empty(0)
        self.pos = 0
        self.proposals = 0
        self.accepted = 0

    def graph(self) -> Graph:
        edges = frozenset(zip(self.eu.tolist(), self.ev.tolist()))
        return Graph._trusted(frozenset(range(1, self.n + 1)), edges)

    def run(self, steps: int) -> None:
        if self.m == 0 or self.m == self.n * (self.n - 1) // 2:
            self.proposals += steps
            return
        left = steps
        while left > 0:
            done, self.pos, acc, self.tick = self._run(
                left, self.n, self.m, self.A, self.nbr, self.deg, self.eu, self.ev,
                self.U, self.pos, self.stamp, self.rstamp, self.dloc, self.kidx, self.tick,
            )
            left -= done
            self.proposals += done
            self.accepted += acc
            if left > 0:
                self.U = np.concatenate((self.U[self.pos :], self.rng.random(self.block)))
                self.pos = 0


def make_chain(n: int, m: int, rng: np.random.Generator, start: Graph | None = None):
    if n <= FAST_MAX_N:
        return FastPlanarChain(n, m, rng, start)
    return PlanarChain(n, m, rng, start)
