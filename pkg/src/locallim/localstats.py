"""Ball codes, root policies, empirical ball distributions and TV distance."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping

import numpy as np

from .decompose import decompose, split_complex
from .errors import ContractViolation, EmptyTargetError, OversizeError
from .graphcore import Graph, RootedBall, ball, components
from .trees import PlaneTree, ahu_code

DEFAULT_SIZE_LIMIT = 64
OVERSIZE = b"OVERSIZE"


class BallCode(bytes):
    """Canonical code of a rooted ball.  Tree codes start with ``T``."""

    @property
    def is_tree(self) -> bool:
        return self[:1] == b"T"


# ---------------------------------------------------------------------------
# encodings


def plane_code(b: RootedBall) -> PlaneTree:
    """Plane tree of a tree ball, children ordered by original label."""
    if not b.is_tree():
        raise ContractViolation("plane_code needs a tree ball")
    adj = b.graph.adj
    depth = b.depth
    # ball ids are sorted by (depth, original label), so id order is label order within a level
    counts = []
    queue = [b.root]
    head = 0
    while head < len(queue):
        x = queue[head]
        head += 1
        if depth[x - 1] >= b.radius:
            continue
        kids = [y for y in adj[x] if depth[y - 1] == depth[x - 1] + 1]
        counts.append(len(kids))
        queue.extend(kids)
    return PlaneTree(tuple(counts), b.radius)


def ball_code(b: RootedBall, limit: int = DEFAULT_SIZE_LIMIT) -> BallCode:
    if b.size > limit:
        raise OversizeError(f"ball has {b.size} vertices > limit {limit}")
    n = b.size
    adj = [[y - 1 for y in b.graph.adj[x]] for x in range(1, n + 1)]
    if b.is_tree():
        depth = b.depth
        children = [[y for y in adj[x] if depth[y] == depth[x] + 1] for x in range(n)]
        return BallCode(ahu_code(children, range(n)))
    return BallCode(_canonical_graph_code(adj, b.depth))


def ball_code_at(g: Graph, v: int, radius: int, limit: int = DEFAULT_SIZE_LIMIT) -> BallCode:
    """``ball_code(ball(g, v, radius))`` without building the ball for trees."""
    adj = g.adj
    parent = {v: 0}
    order = [v]
    children: list[list[int]] = [[]]
    depth = [0]
    tree = True
    head = 0
    while head < len(order) and tree:
        x = order[head]
        px = parent[x]
        d = depth[head]
        for y in adj[x]:
            if y == px:
                continue
            if y in parent:
                tree = False
                break
            if d < radius:
                parent[y] = x
                children[head].append(len(order))
                order.append(y)
                children.append([])
                depth.append(d + 1)
        head += 1
        if len(order) > limit:
            raise OversizeError(f"ball at {v} has more than {limit} vertices")
    if tree:
        return BallCode(ahu_code(children, range(len(order))))
    return ball_code(ball(g, v, radius), limit)


def _refine(adj: list[list[int]], col: list[int]) -> list[int]:
    ncol = len(set(col))
    while True:
        sig = [(col[i], tuple(sorted(col[j] for j in adj[i]))) for i in range(len(adj))]
        rank = {s: r for r, s in enumerate(sorted(set(sig)))}
        new = [rank[s] for s in sig]
        if len(rank) == ncol:
            return new
        col, ncol = new, len(rank)


def _canonical_graph_code(adj: list[list[int]], depth: Iterable[int]) -> bytes:
    """Minimum edge serialisation over an individualisation-refinement tree.

    The initial colouring by (depth, degree) fixes the root at position 0.
    The search tree is isomorphism invariant, so the minimum over its leaves
    is a canonical form.
    """
    n = len(adj)
    keys = [(d, len(adj[i])) for i, d in enumerate(depth)]
    rank = {k: r for r, k in enumerate(sorted(set(keys)))}
    start = _refine(adj, [rank[k] for k in keys])
    edges = [(i, j) for i in range(n) for j in adj[i] if i < j]
    best: list[tuple[tuple[int, int], ...] | None] = [None]

    def search(col: list[int]) -> None:
        sizes = Counter(col)
        target = min((c for c, s in sizes.items() if s > 1), default=None)
        if target is None:
            ser = tuple(sorted((min(col[i], col[j]), max(col[i], col[j])) for i, j in edges))
            if best[0] is None or ser < best[0]:
                best[0] = ser
            return
        for v in range(n):
            if col[v] != target:
                continue
            ind = [2 * c + (1 if c == target and i != v else 0) for i, c in enumerate(col)]
            search(_refine(adj, ind))

    search(start)
    flat = [x for e in best[0] for x in e]
    return b"G" + bytes([n]) + bytes(flat)


# ---------------------------------------------------------------------------
# census


def _plane_counts_at(adj: Mapping[int, list[int]], v: int, radius: int) -> tuple[int, ...] | None:
    parent = {v: 0}
    frontier = [v]
    counts: list[int] = []
    for _ in range(radius):
        nxt = []
        for x in frontier:
            px = parent[x]
            k = 0
            for y in adj[x]:
                if y == px:
                    continue
                if y in parent:
                    return None
                parent[y] = x
                nxt.append(y)
                k += 1
            counts.append(k)
        frontier = nxt
        if not frontier:
            return tuple(counts)
    # boundary vertices must not close a cycle inside the ball
    for x in frontier:
        px = parent[x]
        for y in adj[x]:
            if y != px and y in parent:
                return None
    return tuple(counts)


def census_counts(g: Graph, radius: int) -> Counter:
    """Plane tree -> number of vertices whose radius-``radius`` ball is that tree."""
    adj = g.adj
    raw: Counter = Counter()
    for v in g.vertices:
        key = _plane_counts_at(adj, v, radius)
        if key is not None:
            raw[key] += 1
    return Counter({PlaneTree(k, radius): c for k, c in raw.items()})


def census(g: Graph, radius: int, t: PlaneTree) -> int:
    if t.radius != radius:
        return 0
    adj = g.adj
    return sum(1 for v in g.vertices if _plane_counts_at(adj, v, radius) == t.child_counts)


# ---------------------------------------------------------------------------
# root policies


class RootPolicy(str, Enum):
    UNIFORM = "uniform"
    LARGEST_COMPONENT = "largest_component"
    REST = "rest"
    COMPLEX_PART = "complex_part"
    NON_COMPLEX_PART = "non_complex_part"
    CORE = "core"
    KERNEL = "kernel"

    @classmethod
    def parse(cls, text: str) -> "RootPolicy":
        try:
            return cls(text.replace("-", "_"))
        except ValueError:
            raise ContractViolation(f"unknown root policy {text!r}") from None


def policy_target(g: Graph, policy: RootPolicy) -> tuple[Graph, tuple[int, ...]]:
    """Host graph the ball is taken in and the candidate roots (sorted).

    Each policy roots the substructure it names: the core and kernel policies
    take balls inside the core, the others inside a union of components of
    ``g`` (where balls agree with balls in ``g``).
    """
    policy = RootPolicy(policy)
    if policy is RootPolicy.UNIFORM:
        return g, tuple(sorted(g.vertices))
    if policy in (RootPolicy.LARGEST_COMPONENT, RootPolicy.REST):
        big = components(g)[0] if g.n else ()
        if policy is RootPolicy.LARGEST_COMPONENT:
            return g, tuple(sorted(big))
        return g, tuple(sorted(g.vertices - set(big)))
    if policy in (RootPolicy.COMPLEX_PART, RootPolicy.NON_COMPLEX_PART):
        cx, rest = split_complex(g)
        host = cx if policy is RootPolicy.COMPLEX_PART else rest
        return g, tuple(sorted(host.vertices))
    d = decompose(g)
    if policy is RootPolicy.CORE:
        return d.core, tuple(sorted(d.core.vertices))
    return d.core, tuple(sorted(d.kernel_vertex_map.values()))


# ---------------------------------------------------------------------------
# distributions


def _hex_entries(probs: Mapping[bytes, float]) -> list[dict]:
    items = sorted(probs.items(), key=lambda kv: (-kv[1], kv[0]))
    return [{"code": bytes(c).hex(), "prob": p} for c, p in items]


@dataclass
class EmpiricalDist:
    counts: Counter = field(default_factory=Counter)
    total: int = 0
    skipped: int = 0
    provenance: dict = field(default_factory=dict)

    def add(self, code: bytes, k: int = 1) -> None:
        self.counts[BallCode(code)] += k
        self.total += k

    def merge(self, other: "EmpiricalDist") -> "EmpiricalDist":
        c = Counter(self.counts)
        c.update(other.counts)
        return EmpiricalDist(c, self.total + other.total, self.skipped + other.skipped, dict(self.provenance))

    def probs(self) -> dict[bytes, float]:
        if self.total == 0:
            raise ContractViolation("empirical distribution has no samples")
        return {c: k / self.total for c, k in self.counts.items()}

    @property
    def leftover(self) -> float:
        return 0.0

    def to_json(self) -> str:
        doc = {
            "origin": {"kind": "empirical", "total": self.total, "skipped": self.skipped},
            "leftover": 0.0,
            "entries": _hex_entries(self.probs()),
            "provenance": self.provenance,
        }
        return json.dumps(doc, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["code", "count", "frequency"])
        for c, k in sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0])):
            w.writerow([bytes(c).hex(), k, format(k / self.total, ".9g")])
        return buf.getvalue()


RngSource = np.random.Generator | Callable[[int], np.random.Generator]


def empirical_dist(
    samples: Iterable[Graph],
    policy: RootPolicy | str,
    radius: int,
    rng: RngSource,
    roots: int | str = 1,
    limit: int = DEFAULT_SIZE_LIMIT,
    provenance: dict | None = None,
) -> EmpiricalDist:
    """Pooled ball-code counts over ``samples``.

    ``roots`` roots are drawn per sample, uniformly and with replacement from
    the policy's target set; ``roots="all"`` uses every target vertex once.
    ``rng`` is either one generator or a map from sample index to generator.
    Samples with an empty target set are skipped and tallied.  Balls above
    ``limit`` vertices are counted under ``OVERSIZE``.
    """
    policy = RootPolicy.parse(policy) if isinstance(policy, str) else policy
    out = EmpiricalDist(provenance=dict(provenance or {}, policy=policy.value, radius=radius, roots=roots))
    for i, g in enumerate(samples):
        host, target = policy_target(g, policy)
        if not target:
            out.skipped += 1
            continue
        if roots == "all":
            chosen = list(target)
        else:
            r = rng(i) if callable(rng) else rng
            chosen = [target[j] for j in r.integers(0, len(target), size=int(roots)).tolist()]
        for v in chosen:
            try:
                out.add(ball_code_at(host, v, radius, limit))
            except OversizeError:
                out.add(OVERSIZE)
    if out.total == 0:
        raise EmptyTargetError(f"all {out.skipped} samples had an empty {policy.value} target set")
    return out


def _as_probs(d) -> tuple[dict[bytes, float], float]:
    if isinstance(d, EmpiricalDist):
        return d.probs(), 0.0
    return dict(d.mass), float(d.leftover)


def tv_distance(d1, d2) -> float:
    """Half the L1 distance over codes plus half the leftover difference."""
    p1, l1 = _as_probs(d1)
    p2, l2 = _as_probs(d2)
    s = sum(abs(p1.get(c, 0.0) - p2.get(c, 0.0)) for c in set(p1) | set(p2))
    return 0.5 * s + 0.5 * abs(l1 - l2)
