"""Brute-force enumeration of small graph classes.

These are independent of the samplers and of ``decompose``: each class is
listed by filtering edge subsets with direct union-find or leaf-pruning
checks.  Everything here is exponential and meant for n <= 6.
"""

from __future__ import annotations

from itertools import combinations

from .graphcore import Graph, MultiGraph

EdgeSet = frozenset


def pairs(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(1, n + 1), 2))


def _find(parent: dict, x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _component_stats(n: int, edges) -> dict[int, list[int]]:
    """Root -> [vertices, edges] per component."""
    parent = {v: v for v in range(1, n + 1)}
    for u, v in edges:
        a, b = _find(parent, u), _find(parent, v)
        if a != b:
            parent[a] = b
    stats: dict[int, list[int]] = {}
    for v in range(1, n + 1):
        stats.setdefault(_find(parent, v), [0, 0])[0] += 1
    for u, _ in edges:
        stats[_find(parent, u)][1] += 1
    return stats


def _is_forest(n: int, edges) -> bool:
    return all(e == v - 1 for v, e in _component_stats(n, edges).values())


def all_trees(n: int) -> list[EdgeSet]:
    return [frozenset(s) for s in combinations(pairs(n), n - 1) if _is_forest(n, s)]


def all_forests(n: int, t: int) -> list[EdgeSet]:
    out = []
    for s in combinations(pairs(n), n - t):
        if not _is_forest(n, s):
            continue
        parent = {v: v for v in range(1, n + 1)}
        for u, v in s:
            parent[_find(parent, u)] = _find(parent, v)
        if len({_find(parent, r) for r in range(1, t + 1)}) == t:
            out.append(frozenset(s))
    return out


def all_gnm(n: int, m: int) -> list[EdgeSet]:
    return [frozenset(s) for s in combinations(pairs(n), m)]


def all_noncomplex(n: int, m: int) -> list[EdgeSet]:
    return [
        frozenset(s)
        for s in combinations(pairs(n), m)
        if all(e <= v for v, e in _component_stats(n, s).values())
    ]


def _leaf_pruned(n: int, edges) -> tuple[frozenset, frozenset]:
    adj = {v: set() for v in range(1, n + 1)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    changed = True
    while changed:
        changed = False
        for v in list(adj):
            if len(adj[v]) <= 1:
                for w in adj.pop(v):
                    adj[w].discard(v)
                changed = True
    es = frozenset((u, v) for u in adj for v in adj[u] if u < v)
    return frozenset(adj), es


def all_complexparts(core: Graph, q: int) -> list[EdgeSet]:
    """Complex graphs on ``1..q`` whose core is exactly ``core``."""
    c = core.n
    extra = [(u, v) for u, v in pairs(q) if v > c]
    out = []
    for r in range(len(extra) + 1):
        for s in combinations(extra, r):
            edges = core.edges | frozenset(s)
            verts, es = _leaf_pruned(q, edges)
            if verts != core.vertices or es != core.edges:
                continue
            if all(e >= v + 1 for v, e in _component_stats(q, edges).values()):
                out.append(frozenset(edges))
    return out


def _kernel_signature(n: int, edges, branch: set[int]) -> list[tuple[int, int]] | None:
    adj = {v: [] for v in range(1, n + 1)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    if any(len(a) < 2 for a in adj.values()):
        return None
    if {v for v, a in adj.items() if len(a) >= 3} != branch:
        return None
    ends = []
    seen = set()
    for s in branch:
        for first in adj[s]:
            if (s, first) in seen:
                continue
            prev, cur = s, first
            seen.add((prev, cur))
            while cur not in branch:
                a, b = adj[cur]
                prev, cur = cur, (b if a == prev else a)
                seen.add((prev, cur))
            seen.add((cur, prev))
            ends.append(tuple(sorted((s, cur))))
    # every vertex must lie on a branch-to-branch path (no free cycles)
    covered = {x for e in seen for x in e}
    if covered != set(range(1, n + 1)):
        return None
    return sorted(ends)


def all_cores_given_kernel(kernel: MultiGraph, k: int) -> list[EdgeSet]:
    nk = kernel.n
    n = nk + k
    target = sorted(tuple(sorted(e)) for e in kernel.edges)
    branch = set(range(1, nk + 1))
    out = []
    for r in range(len(pairs(n)) + 1):
        for s in combinations(pairs(n), r):
            if _kernel_signature(n, s, branch) == target:
                out.append(frozenset(s))
    return out


def _has_k5(adj, verts) -> bool:
    return any(all(b in adj[a] for a, b in combinations(s, 2)) for s in combinations(verts, 5))


def _has_k33(adj, verts) -> bool:
    for s in combinations(verts, 6):
        for left in combinations(s, 3):
            if s[0] not in left:
                continue
            right = [x for x in s if x not in left]
            if all(b in adj[a] for a in left for b in right):
                return True
    return False


def _has_subdivided_k5(adj, verts) -> bool:
    # K5 with one edge subdivided: the only 6-vertex K5 subdivision
    for s in combinations(verts, 6):
        for mid in s:
            rest = [x for x in s if x != mid]
            nb = [x for x in rest if x in adj[mid]]
            for a, b in combinations(nb, 2):
                if all(y in adj[x] for x, y in combinations(rest, 2) if {x, y} != {a, b}):
                    return True
    return False


def brute_planar(n: int, edges) -> bool:
    """Kuratowski check, exact for n <= 6."""
    if n > 6:
        raise ValueError("brute_planar is exact only for n <= 6")
    adj = {v: set() for v in range(1, n + 1)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    verts = list(range(1, n + 1))
    return not (_has_k5(adj, verts) or _has_k33(adj, verts) or _has_subdivided_k5(adj, verts))


def all_planar(n: int, m: int) -> list[EdgeSet]:
    return [frozenset(s) for s in combinations(pairs(n), m) if brute_planar(n, s)]
