"""Left-right planarity test (Brandes' formulation of de Fraysseix-Rosenstiehl).

Only the testing phase is implemented: no embedding is produced.  Both DFS
passes are iterative so the test works on graphs far deeper than the
interpreter recursion limit.
"""

from __future__ import annotations

from typing import Collection, Mapping, Sequence


class _Interval:
    __slots__ = ("low", "high")

    def __init__(self, low=None, high=None):
        self.low = low
        self.high = high

    def empty(self):
        return self.low is None and self.high is None

    def copy(self):
        return _Interval(self.low, self.high)

    def conflicting(self, b, lowpt):
        return not self.empty() and lowpt[self.high] > lowpt[b]


class _Pair:
    __slots__ = ("left", "right")

    def __init__(self, left=None, right=None):
        self.left = left if left is not None else _Interval()
        self.right = right if right is not None else _Interval()

    def swap(self):
        self.left, self.right = self.right, self.left

    def lowest(self, lowpt):
        if self.left.empty():
            return lowpt[self.right.low]
        if self.right.empty():
            return lowpt[self.left.low]
        return min(lowpt[self.left.low], lowpt[self.right.low])


def lr_planar(vertices: Collection[int], adj: Mapping[int, Sequence[int]]) -> bool:
    n = len(vertices)
    m = sum(len(adj[v]) for v in vertices) // 2
    if n > 2 and m > 3 * n - 6:
        return False
    return _LRTest(vertices, adj).run()


class _LRTest:
    def __init__(self, vertices, adj):
        self.vertices = sorted(vertices)
        self.adj = adj
        self.height = {v: None for v in self.vertices}
        self.parent_edge = {v: None for v in self.vertices}
        self.out = {v: [] for v in self.vertices}
        self.lowpt = {}
        self.lowpt2 = {}
        self.nesting = {}
        self.ref = {}
        self.lowpt_edge = {}
        self.stack_bottom = {}
        self.S: list[_Pair] = []

    def run(self) -> bool:
        roots = []
        for v in self.vertices:
            if self.height[v] is None:
                self.height[v] = 0
                roots.append(v)
                self._orient(v)
        self.ordered = {
            v: sorted(self.out[v], key=lambda w, v=v: self.nesting[(v, w)]) for v in self.vertices
        }
        return all(self._test(r) for r in roots)

    # -- phase 1: DFS orientation, lowpoints, nesting depths ---------------

    def _orient(self, root):
        height, lowpt, lowpt2, adj = self.height, self.lowpt, self.lowpt2, self.adj
        oriented = set()
        ind = {root: 0}
        resumed = set()
        stack = [root]
        while stack:
            v = stack.pop()
            e = self.parent_edge[v]
            nbrs = adj[v]
            i = ind.setdefault(v, 0)
            while i < len(nbrs):
                w = nbrs[i]
                vw = (v, w)
                if vw not in resumed:
                    if vw in oriented or (w, v) in oriented:
                        i += 1
                        continue
                    oriented.add(vw)
                    self.out[v].append(w)
                    lowpt[vw] = height[v]
                    lowpt2[vw] = height[v]
                    if height[w] is None:
                        self.parent_edge[w] = vw
                        height[w] = height[v] + 1
                        resumed.add(vw)
                        ind[v] = i
                        stack.append(v)
                        stack.append(w)
                        break
                    lowpt[vw] = height[w]
                self.nesting[vw] = 2 * lowpt[vw] + (1 if lowpt2[vw] < height[v] else 0)
                if e is not None:
                    if lowpt[vw] < lowpt[e]:
                        lowpt2[e] = min(lowpt[e], lowpt2[vw])
                        lowpt[e] = lowpt[vw]
                    elif lowpt[vw] > lowpt[e]:
                        lowpt2[e] = min(lowpt2[e], lowpt[vw])
                    else:
                        lowpt2[e] = min(lowpt2[e], lowpt2[vw])
                i += 1
            else:
                ind[v] = i

    # -- phase 2: constraint stack -----------------------------------------

    def _top(self):
        return self.S[-1] if self.S else None

    def _test(self, root) -> bool:
        height, lowpt = self.height, self.lowpt
        ind = {root: 0}
        resumed = set()
        stack = [root]
        while stack:
            v = stack.pop()
            e = self.parent_edge[v]
            outs = self.ordered[v]
            i = ind.setdefault(v, 0)
            descended = False
            while i < len(outs):
                w = outs[i]
                ei = (v, w)
                if ei not in resumed:
                    self.stack_bottom[ei] = self._top()
                    if ei == self.parent_edge[w]:
                        resumed.add(ei)
                        ind[v] = i
                        stack.append(v)
                        stack.append(w)
                        descended = True
                        break
                    self.lowpt_edge[ei] = ei
                    self.S.append(_Pair(right=_Interval(ei, ei)))
                if lowpt[ei] < height[v]:
                    if i == 0:
                        self.lowpt_edge[e] = self.lowpt_edge[ei]
                    elif not self._add_constraints(ei, e):
                        return False
                i += 1
            if descended:
                continue
            ind[v] = i
            if e is not None:
                self._remove_back_edges(e)
        return True

    def _add_constraints(self, ei, e) -> bool:
        lowpt, ref, S = self.lowpt, self.ref, self.S
        P = _Pair()
        while True:
            Q = S.pop()
            if not Q.left.empty():
                Q.swap()
            if not Q.left.empty():
                return False
            if lowpt[Q.right.low] > lowpt[e]:
                if P.right.empty():
                    P.right = Q.right.copy()
                else:
                    ref[P.right.low] = Q.right.high
                P.right.low = Q.right.low
            else:
                ref[Q.right.low] = self.lowpt_edge[e]
            if self._top() is self.stack_bottom[ei]:
                break
        while S and (S[-1].left.conflicting(ei, lowpt) or S[-1].right.conflicting(ei, lowpt)):
            Q = S.pop()
            if Q.right.conflicting(ei, lowpt):
                Q.swap()
            if Q.right.conflicting(ei, lowpt):
                return False
            ref[P.right.low] = Q.right.high
            if Q.right.low is not None:
                P.right.low = Q.right.low
            if P.left.empty():
                P.left = Q.left.copy()
            else:
                ref[P.left.low] = Q.left.high
            P.left.low = Q.left.low
        if not (P.left.empty() and P.right.empty()):
            S.append(P)
        return True

    def _remove_back_edges(self, e):
        lowpt, ref, S = self.lowpt, self.ref, self.S
        u = e[0]
        hu = self.height[u]
        while S and S[-1].lowest(lowpt) == hu:
            S.pop()
        if S:
            P = S.pop()
            while P.left.high is not None and P.left.high[1] == u:
                P.left.high = ref.get(P.left.high)
            if P.left.high is None and P.left.low is not None:
                ref[P.left.low] = P.right.low
                P.left.low = None
            while P.right.high is not None and P.right.high[1] == u:
                P.right.high = ref.get(P.right.high)
            if P.right.high is None and P.right.low is not None:
                ref[P.right.low] = P.left.low
                P.right.low = None
            S.append(P)
        if lowpt[e] < hu:
            hl = S[-1].left.high
            hr = S[-1].right.high
            if hl is not None and (hr is None or lowpt[hl] > lowpt[hr]):
                ref[e] = hl
            else:
                ref[e] = hr
