"""Seeded samplers for the random objects used in the local-limit experiments.

Every sampler takes a ``numpy.random.Generator`` (see ``locallim.rng``) and
is otherwise a pure function of its arguments.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Callable

import numpy as np

from .decompose import _excess_by_component, has_complex_component
from .errors import BudgetError, ContractViolation, EmptyClassError
from .graphcore import Graph, MultiGraph, RootedBall, _norm, ball, is_planar
from .planar_chain import make_chain
from .rng import uniform_ints
from .trees import PlaneTree

CAPPED = None


@dataclass(frozen=True)
class RootedForest:
    graph: Graph
    t: int

    @property
    def roots(self) -> range:
        return range(1, self.t + 1)


def prufer_decode(seq: list[int], labels: list[int]) -> list[tuple[int, int]]:
    """Edges of the tree on ``labels`` whose Prüfer sequence is ``seq``."""
    if len(labels) == 1:
        return []
    deg = dict.fromkeys(labels, 1)
    for s in seq:
        deg[s] += 1
    leaves = [v for v in labels if deg[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for s in seq:
        leaf = heapq.heappop(leaves)
        edges.append(_norm(leaf, s))
        deg[s] -= 1
        if deg[s] == 1:
            heapq.heappush(leaves, s)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append(_norm(u, v))
    return edges


def sample_cayley_tree(n: int, rng: np.random.Generator) -> Graph:
    if n < 1:
        raise ContractViolation("tree needs n >= 1")
    seq = uniform_ints(rng, 1, n + 1, max(n - 2, 0))
    edges = prufer_decode(seq, list(range(1, n + 1)))
    return Graph._trusted(frozenset(range(1, n + 1)), frozenset(edges))


def sample_forest(n: int, t: int, rng: np.random.Generator) -> RootedForest:
    """Uniform forest on ``1..n`` with ``t`` trees rooted at ``1..t``.

    The roots are merged into a super-vertex (label 0) of Prüfer weight ``t``;
    each super-vertex edge is then handed to a uniform root.
    """
    if not 1 <= t <= n:
        raise ContractViolation(f"need 1 <= t <= n, got t={t}, n={n}")
    verts = frozenset(range(1, n + 1))
    if t == n:
        return RootedForest(Graph._trusted(verts, frozenset()), t)
    # one block of uniforms: n-t-1 sequence entries, then up to n-t root picks
    # (the super-vertex has degree at most n-t)
    us = rng.random(2 * (n - t) - 1).tolist()
    # a draw from 1..n that lands in 1..t stands for the super-vertex
    seq = [x if x > t else 0 for x in (1 + int(u * n) for u in us[: n - t - 1])]
    tree = prufer_decode(seq, [0, *range(t + 1, n + 1)])
    star = [w for u, w in tree if u == 0]
    picks = [1 + int(u * t) for u in us[n - t - 1 : n - t - 1 + len(star)]]
    edges = [e for e in tree if e[0] != 0]
    edges.extend((r, w) for r, w in zip(picks, star))
    return RootedForest(Graph._trusted(verts, frozenset(edges)), t)


def sample_gw_ball(c: float, radius: int, rng: np.random.Generator) -> PlaneTree:
    if c < 0 or radius < 0:
        raise ContractViolation("need c >= 0 and radius >= 0")
    counts: list[int] = []
    width = 1
    for _ in range(radius):
        if width == 0:
            break
        level = rng.poisson(c, width).tolist()
        counts.extend(level)
        width = sum(level)
    return PlaneTree(tuple(counts), radius)


def sample_gw_total(c: float, cap: int, rng: np.random.Generator) -> int | None:
    """Total progeny of GW(Po(c)); ``CAPPED`` (None) once it exceeds ``cap``."""
    if not 0 <= c <= 1:
        raise ContractViolation("total progeny sampling needs 0 <= c <= 1")
    if cap < 1:
        raise ContractViolation("cap must be >= 1")
    total = alive = 1
    while alive:
        # children of a whole generation: sum of iid Po(c) is Po(c * alive)
        alive = int(rng.poisson(c * alive))
        total += alive
        if total > cap:
            return CAPPED
    return total


def sample_gw_totals(c: float, cap: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorised ``sample_gw_total``; capped draws are reported as -1."""
    if not 0 <= c <= 1:
        raise ContractViolation("total progeny sampling needs 0 <= c <= 1")
    total = np.ones(size, dtype=np.int64)
    alive = np.ones(size, dtype=np.int64)
    idx = np.arange(size)
    while idx.size:
        kids = rng.poisson(c * alive[idx])
        total[idx] += kids
        alive[idx] = kids
        over = total[idx] > cap
        total[idx[over]] = -1
        idx = idx[(kids > 0) & ~over]
    return total


def skeleton_children(k: int, radius: int, poisson: Callable[[], int]) -> list[list[int]]:
    """Child lists of the radius-``radius`` ball of SK(k), root 0.

    Ids increase from parent to child, so ``range(len(result))`` is a valid
    top-down order.
    """
    children: list[list[int]] = [[]]

    def new(parent: int) -> int:
        children.append([])
        y = len(children) - 1
        children[parent].append(y)
        return y

    def grow(v: int, generations: int) -> None:
        frontier = [v]
        for _ in range(generations):
            nxt = []
            for x in frontier:
                for _ in range(poisson()):
                    nxt.append(new(x))
            if not nxt:
                return
            frontier = nxt

    spine = []
    if radius > 0:
        for _ in range(k):
            prev = 0
            for j in range(1, radius + 1):
                prev = new(prev)
                spine.append((prev, j))
    grow(0, radius)
    for y, j in spine:
        grow(y, radius - j)
    return children


def sample_skeleton_ball(k: int, radius: int, rng: np.random.Generator) -> RootedBall:
    if k < 0 or radius < 0:
        raise ContractViolation("need k >= 0 and radius >= 0")
    ch = skeleton_children(k, radius, lambda: int(rng.poisson(1.0)))
    edges = frozenset((x + 1, y + 1) for x, ys in enumerate(ch) for y in ys)
    g = Graph._trusted(frozenset(range(1, len(ch) + 1)), edges)
    return ball(g, 1, radius)


def _pair_from_index(x: int) -> tuple[int, int]:
    # colex order over pairs u < v (0-based): index = v(v-1)/2 + u
    v = (1 + isqrt(1 + 8 * x)) // 2
    u = x - v * (v - 1) // 2
    return (u + 1, v + 1)


@lru_cache(maxsize=32)
def _pair_table(N: int) -> tuple[tuple[int, int], ...]:
    return tuple(_pair_from_index(x) for x in range(N))


def sample_gnm(n: int, m: int, rng: np.random.Generator) -> Graph:
    """Uniform graph with ``m`` edges via a sparse partial Fisher-Yates shuffle
    of the ``n(n-1)/2`` pair indices."""
    N = n * (n - 1) // 2
    if not 0 <= m <= N or n < 0:
        raise ContractViolation(f"m={m} outside 0..{N}")
    verts = frozenset(range(1, n + 1))
    if m == 0:
        return Graph._trusted(verts, frozenset())
    js = [i + int(u * (N - i)) for i, u in enumerate(rng.random(m).tolist())]
    swap: dict[int, int] = {}
    picks = []
    for i, j in enumerate(js):
        picks.append(swap.get(j, j))
        swap[j] = swap.get(i, i)
    if N <= 4096:
        table = _pair_table(N)
        edges = [table[x] for x in picks]
    else:
        edges = [_pair_from_index(x) for x in picks]
    return Graph._trusted(verts, frozenset(edges))


def sample_noncomplex(n: int, m: int, max_tries: int, rng: np.random.Generator) -> Graph:
    """Uniform graph without complex components, by rejection from G(n, m)."""
    if n < 1:
        raise ContractViolation("need n >= 1")
    for _ in range(max_tries):
        g = sample_gnm(n, m, rng)
        if not has_complex_component(g):
            return g
    raise BudgetError(f"no complex-free graph in {max_tries} attempts (n={n}, m={m})", attempts=max_tries)


def _check_core(core: Graph) -> None:
    for v, nb in core.adj.items():
        if len(nb) < 2:
            raise ContractViolation(f"core vertex {v} has degree {len(nb)} < 2")
    for comp, excess in _excess_by_component(core):
        if excess < 1:
            raise ContractViolation(f"core component containing {comp[0]} is not complex")


def sample_complexpart(core: Graph, q: int, rng: np.random.Generator) -> Graph:
    """Uniform complex graph on ``1..q`` whose core is ``core`` (on ``1..v(core)``)."""
    if not core.is_standard():
        raise ContractViolation("core must be labelled 1..v(core)")
    _check_core(core)
    if core.n > q:
        raise ContractViolation(f"core has {core.n} vertices > q={q}")
    forest = sample_forest(q, core.n, rng)
    return Graph._trusted(forest.graph.vertices, forest.graph.edges | core.edges)


@lru_cache(maxsize=64)
def _kernel_plan(kernel: MultiGraph) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """Validated kernel: edge ids of loops, and groups of parallel non-loop edges."""
    nk = kernel.n
    if set(kernel.vertices) != set(range(1, nk + 1)):
        raise ContractViolation("kernel vertices must be 1..v(kernel)")
    for v, d in kernel.degrees().items():
        if d < 3:
            raise ContractViolation(f"kernel vertex {v} has degree {d} < 3")
    groups: dict[tuple[int, int], list[int]] = {}
    for i, (a, b) in enumerate(kernel.edges):
        groups.setdefault(_norm(a, b), []).append(i)
    loops = tuple(i for (a, b), ids in groups.items() if a == b for i in ids)
    multi = tuple(tuple(ids) for (a, b), ids in groups.items() if a != b and len(ids) > 1)
    return loops, multi


def sample_core_given_kernel(kernel: MultiGraph, k: int, max_tries: int, rng: np.random.Generator) -> Graph:
    """Uniform core with the given kernel and ``v(kernel) + k`` vertices.

    The ``k`` new vertices (labels after the kernel's) are spread over the
    kernel edges as a uniformly random family of ordered sequences, and the
    draw is rejected while the result is not simple.  Kernel vertices must be
    ``1..v(kernel)``.
    """
    loops, multi = _kernel_plan(kernel)
    if k < 0:
        raise ContractViolation("k must be >= 0")
    nk = kernel.n
    for _ in range(max_tries):
        seqs = _random_arrangement(k, kernel.m, rng)
        if any(len(seqs[i]) < 2 for i in loops):
            continue
        if any(sum(1 for i in ids if not seqs[i]) > 1 for ids in multi):
            continue
        edges = set()
        for (a, b), seq in zip(kernel.edges, seqs):
            prev = a
            for x in seq:
                x += nk + 1
                edges.add((prev, x) if prev < x else (x, prev))
                prev = x
            edges.add(_norm(prev, b))
        return Graph._trusted(frozenset(range(1, nk + k + 1)), frozenset(edges))
    raise BudgetError(f"no simple subdivision in {max_tries} attempts (k={k})", attempts=max_tries)


def _random_arrangement(k: int, parts: int, rng: np.random.Generator) -> list[list[int]]:
    """Uniform family of ``parts`` ordered sequences that together hold ``0..k-1``.

    The ``k`` items and ``parts - 1`` identical bars are sorted by iid uniform
    keys; every family arises from the same number of bar orders.
    """
    slots = k + parts - 1
    keys = rng.random(slots)
    if slots <= 64:
        order = sorted(range(slots), key=keys.__getitem__)
    else:
        order = np.argsort(keys).tolist()
    seqs: list[list[int]] = [[]]
    for x in order:
        if x < k:
            seqs[-1].append(x)
        else:
            seqs.append([])
    return seqs


# ---------------------------------------------------------------------------
# planar graphs


def max_planar_edges(n: int) -> int:
    return n * (n - 1) // 2 if n < 3 else 3 * n - 6


def sample_planar(n: int, m: int, method: str, budget: int, rng: np.random.Generator) -> Graph:
    """Planar graph with ``m`` edges on ``1..n``.

    ``rejection`` is exactly uniform.  ``mcmc`` runs ``budget`` edge-swap
    proposals from a fixed planar start and returns the final state; it is an
    approximation whose quality depends on mixing.
    """
    N = n * (n - 1) // 2
    if not 0 <= m <= N:
        raise ContractViolation(f"m={m} outside 0..{N}")
    if m > max_planar_edges(n):
        raise EmptyClassError(f"no planar graph on {n} vertices has {m} edges")
    if method == "rejection":
        for _ in range(budget):
            g = sample_gnm(n, m, rng)
            if is_planar(g):
                return g
        raise BudgetError(f"no planar G({n},{m}) in {budget} attempts", attempts=budget)
    if method == "mcmc":
        chain = make_chain(n, m, rng)
        chain.run(budget)
        return chain.graph()
    raise ContractViolation(f"unknown planar sampling method {method!r}")
