"""numba kernels for the planar edge-swap chain.

``lr_planar_csr`` is the left-right test of ``planarity.py`` over a CSR
adjacency; ``chain_run`` advances the chain in place.  Both mirror the pure
Python versions step for step, so the two chains produce identical
trajectories from the same uniform stream.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _lowest(S, t, lowpt):
    if S[t, 0] == -1 and S[t, 1] == -1:
        return lowpt[S[t, 2]]
    if S[t, 2] == -1 and S[t, 3] == -1:
        return lowpt[S[t, 0]]
    return min(lowpt[S[t, 0]], lowpt[S[t, 2]])


@njit(cache=True)
def _conflicting(low, high, b, lowpt):
    return not (low == -1 and high == -1) and lowpt[high] > lowpt[b]


@njit(cache=True)
def lr_planar_csr(nv, off, adjv):
    M2 = off[nv]
    M = M2 // 2
    if nv > 2 and M > 3 * nv - 6:
        return False
    if M == 0:
        return True
    uid_of = np.full(M2, -1, np.int64)
    src = np.empty(M, np.int64)
    dst = np.empty(M, np.int64)
    nid = 0
    for v in range(nv):
        for p in range(off[v], off[v + 1]):
            w = adjv[p]
            if v < w:
                uid_of[p] = nid
                for q in range(off[w], off[w + 1]):
                    if adjv[q] == v:
                        uid_of[q] = nid
                        break
                nid += 1
    oriented = np.zeros(M, np.bool_)
    resumed = np.zeros(M, np.bool_)
    height = np.full(nv, -1, np.int64)
    parent_edge = np.full(nv, -1, np.int64)
    lowpt = np.zeros(M, np.int64)
    lowpt2 = np.zeros(M, np.int64)
    nesting = np.zeros(M, np.int64)
    outs = np.empty(M2, np.int64)
    outc = np.zeros(nv, np.int64)
    ind = np.zeros(nv, np.int64)
    stack = np.empty(nv + 1, np.int64)
    roots = np.empty(nv, np.int64)
    nroots = 0

    # phase 1: orientation
    for r in range(nv):
        if height[r] != -1:
            continue
        height[r] = 0
        roots[nroots] = r
        nroots += 1
        sp = 0
        stack[sp] = r
        sp += 1
        while sp > 0:
            sp -= 1
            v = stack[sp]
            e = parent_edge[v]
            while ind[v] < off[v + 1] - off[v]:
                p = off[v] + ind[v]
                w = adjv[p]
                u_ = uid_of[p]
                if not (resumed[u_] and src[u_] == v):
                    if oriented[u_]:
                        ind[v] += 1
                        continue
                    oriented[u_] = True
                    src[u_] = v
                    dst[u_] = w
                    outs[off[v] + outc[v]] = u_
                    outc[v] += 1
                    lowpt[u_] = height[v]
                    lowpt2[u_] = height[v]
                    if height[w] == -1:
                        parent_edge[w] = u_
                        height[w] = height[v] + 1
                        resumed[u_] = True
                        stack[sp] = v
                        sp += 1
                        stack[sp] = w
                        sp += 1
                        break
                    lowpt[u_] = height[w]
                nesting[u_] = 2 * lowpt[u_] + (1 if lowpt2[u_] < height[v] else 0)
                if e != -1:
                    if lowpt[u_] < lowpt[e]:
                        lowpt2[e] = min(lowpt[e], lowpt2[u_])
                        lowpt[e] = lowpt[u_]
                    elif lowpt[u_] > lowpt[e]:
                        lowpt2[e] = min(lowpt2[e], lowpt[u_])
                    else:
                        lowpt2[e] = min(lowpt2[e], lowpt2[u_])
                ind[v] += 1

    # out-edges by nesting depth (stable insertion sort)
    for v in range(nv):
        base = off[v]
        for i in range(1, outc[v]):
            x = outs[base + i]
            j = i - 1
            while j >= 0 and nesting[outs[base + j]] > nesting[x]:
                outs[base + j + 1] = outs[base + j]
                j -= 1
            outs[base + j + 1] = x

    # phase 2: testing
    S = np.full((M + 1, 4), -1, np.int64)  # columns: L.low, L.high, R.low, R.high
    sS = 0
    ref = np.full(M, -1, np.int64)
    lowpt_edge = np.full(M, -1, np.int64)
    stack_bottom = np.zeros(M, np.int64)
    resumed2 = np.zeros(M, np.bool_)
    ind2 = np.zeros(nv, np.int64)
    for ri in range(nroots):
        sp = 0
        stack[sp] = roots[ri]
        sp += 1
        while sp > 0:
            sp -= 1
            v = stack[sp]
            e = parent_edge[v]
            descended = False
            while ind2[v] < outc[v]:
                i = ind2[v]
                ei = outs[off[v] + i]
                w = dst[ei]
                if not resumed2[ei]:
                    stack_bottom[ei] = sS
                    if ei == parent_edge[w]:
                        resumed2[ei] = True
                        stack[sp] = v
                        sp += 1
                        stack[sp] = w
                        sp += 1
                        descended = True
                        break
                    lowpt_edge[ei] = ei
                    S[sS, 0] = -1
                    S[sS, 1] = -1
                    S[sS, 2] = ei
                    S[sS, 3] = ei
                    sS += 1
                if lowpt[ei] < height[v]:
                    if i == 0:
                        lowpt_edge[e] = lowpt_edge[ei]
                    else:
                        sS = _add_constraints(ei, e, S, sS, lowpt, ref, lowpt_edge, stack_bottom)
                        if sS < 0:
                            return False
                ind2[v] += 1
            if descended:
                continue
            if e != -1:
                sS = _remove_back_edges(e, S, sS, lowpt, ref, src, dst, height)
    return True


@njit(cache=True)
def _add_constraints(ei, e, S, sS, lowpt, ref, lowpt_edge, stack_bottom):
    PLl = -1
    PLh = -1
    PRl = -1
    PRh = -1
    while True:
        sS -= 1
        QLl, QLh, QRl, QRh = S[sS, 0], S[sS, 1], S[sS, 2], S[sS, 3]
        if not (QLl == -1 and QLh == -1):
            QLl, QLh, QRl, QRh = QRl, QRh, QLl, QLh
        if not (QLl == -1 and QLh == -1):
            return -1
        if lowpt[QRl] > lowpt[e]:
            if PRl == -1 and PRh == -1:
                PRl, PRh = QRl, QRh
            elif PRl != -1:
                ref[PRl] = QRh
            PRl = QRl
        else:
            ref[QRl] = lowpt_edge[e]
        if sS == stack_bottom[ei]:
            break
    while sS > 0 and (
        _conflicting(S[sS - 1, 0], S[sS - 1, 1], ei, lowpt) or _conflicting(S[sS - 1, 2], S[sS - 1, 3], ei, lowpt)
    ):
        sS -= 1
        QLl, QLh, QRl, QRh = S[sS, 0], S[sS, 1], S[sS, 2], S[sS, 3]
        if _conflicting(QRl, QRh, ei, lowpt):
            QLl, QLh, QRl, QRh = QRl, QRh, QLl, QLh
        if _conflicting(QRl, QRh, ei, lowpt):
            return -1
        if PRl != -1:
            ref[PRl] = QRh
        if QRl != -1:
            PRl = QRl
        if PLl == -1 and PLh == -1:
            PLl, PLh = QLl, QLh
        elif PLl != -1:
            ref[PLl] = QLh
        PLl = QLl
    if not (PLl == -1 and PLh == -1 and PRl == -1 and PRh == -1):
        S[sS, 0] = PLl
        S[sS, 1] = PLh
        S[sS, 2] = PRl
        S[sS, 3] = PRh
        sS += 1
    return sS


@njit(cache=True)
def _remove_back_edges(e, S, sS, lowpt, ref, src, dst, height):
    u = src[e]
    hu = height[u]
    while sS > 0 and _lowest(S, sS - 1, lowpt) == hu:
        sS -= 1
    if sS > 0:
        t = sS - 1
        while S[t, 1] != -1 and dst[S[t, 1]] == u:
            S[t, 1] = ref[S[t, 1]]
        if S[t, 1] == -1 and S[t, 0] != -1:
            ref[S[t, 0]] = S[t, 2]
            S[t, 0] = -1
        while S[t, 3] != -1 and dst[S[t, 3]] == u:
            S[t, 3] = ref[S[t, 3]]
        if S[t, 3] == -1 and S[t, 2] != -1:
            ref[S[t, 2]] = S[t, 0]
            S[t, 2] = -1
    if lowpt[e] < hu:
        t = sS - 1
        hl = S[t, 1]
        hr = S[t, 3]
        if hl != -1 and (hr == -1 or lowpt[hl] > lowpt[hr]):
            ref[e] = hl
        else:
            ref[e] = hr
    return sS


# ---------------------------------------------------------------------------
# chain


@njit(cache=True)
def _next_on_path(x, prev, nbr, deg, a, b, rstamp, rcur):
    for j in range(deg[x]):
        y = nbr[x, j]
        if y != prev and rstamp[y] != rcur:
            return y
    if x == a and b != prev and rstamp[b] != rcur:
        return b
    if x == b and a != prev and rstamp[a] != rcur:
        return a
    return -1


@njit(cache=True)
def _planar_with(a, b, nbr, deg, stamp, rstamp, dloc, kidx, cur):
    # component of a in G - e
    comp = np.empty(nbr.shape[0], np.int64)
    nc = 0
    stamp[a] = cur
    comp[nc] = a
    nc += 1
    head = 0
    while head < nc:
        x = comp[head]
        head += 1
        for j in range(deg[x]):
            y = nbr[x, j]
            if stamp[y] != cur:
                stamp[y] = cur
                comp[nc] = y
                nc += 1
    if stamp[b] != cur:
        return True
    # 2-core of component + ab; rstamp == cur marks pruned vertices
    queue = np.empty(nc, np.int64)
    qn = 0
    for i in range(nc):
        x = comp[i]
        dloc[x] = deg[x] + (1 if (x == a or x == b) else 0)
        if dloc[x] <= 1:
            queue[qn] = x
            qn += 1
    qh = 0
    while qh < qn:
        x = queue[qh]
        qh += 1
        if rstamp[x] == cur:
            continue
        rstamp[x] = cur
        for j in range(deg[x]):
            y = nbr[x, j]
            if rstamp[y] != cur:
                dloc[y] -= 1
                if dloc[y] <= 1:
                    queue[qn] = y
                    qn += 1
        y = -1
        if x == a:
            y = b
        elif x == b:
            y = a
        if y != -1 and rstamp[y] != cur:
            dloc[y] -= 1
            if dloc[y] <= 1:
                queue[qn] = y
                qn += 1
    B = 0
    branch = np.empty(nc, np.int64)
    for i in range(nc):
        x = comp[i]
        if rstamp[x] != cur and dloc[x] >= 3:
            kidx[x] = B
            branch[B] = x
            B += 1
    if B < 5:
        for i in range(B):
            kidx[branch[i]] = -1
        return True
    KM = np.zeros((B, B), np.uint8)
    ne = 0
    for i in range(B):
        s = branch[i]
        # neighbours of s in the core, including the virtual edge
        for j in range(deg[s] + 1):
            if j < deg[s]:
                y = nbr[s, j]
            elif s == a:
                y = b
            elif s == b:
                y = a
            else:
                break
            if rstamp[y] == cur:
                continue
            prev = s
            c = y
            while kidx[c] == -1:
                nxt = _next_on_path(c, prev, nbr, deg, a, b, rstamp, cur)
                prev = c
                c = nxt
            ci = kidx[c]
            if ci != i and KM[i, ci] == 0:
                KM[i, ci] = 1
                KM[ci, i] = 1
                ne += 1
    for i in range(B):
        kidx[branch[i]] = -1
    if ne < 9:
        return True
    if ne > 3 * B - 6:
        return False
    off = np.zeros(B + 1, np.int64)
    for i in range(B):
        cnt = 0
        for j in range(B):
            cnt += KM[i, j]
        off[i + 1] = off[i] + cnt
    adjv = np.empty(off[B], np.int64)
    for i in range(B):
        p = off[i]
        for j in range(B):
            if KM[i, j]:
                adjv[p] = j
                p += 1
    return lr_planar_csr(B, off, adjv)


@njit(cache=True)
def _remove_adj(nbr, deg, u, v):
    for j in range(deg[u]):
        if nbr[u, j] == v:
            deg[u] -= 1
            nbr[u, j] = nbr[u, deg[u]]
            return


@njit(cache=True)
def chain_run(steps, n, m, A, nbr, deg, eu, ev, U, pos, stamp, rstamp, dloc, kidx, tick):
    """Advance up to ``steps`` proposals; stops early when ``U`` runs low.

    Returns (steps done, new position in U, accepted, tick).
    """
    done = 0
    acc = 0
    L = U.shape[0]
    while done < steps:
        if pos + 1 > L:
            break
        start = pos
        i = int(U[pos] * m)
        pos += 1
        got = False
        a = 0
        b = 0
        while pos + 2 <= L:
            a = int(U[pos] * n) + 1
            b = int(U[pos + 1] * n) + 1
            pos += 2
            if a != b and A[a, b] == 0:
                got = True
                break
        if not got:
            pos = start
            break
        u = eu[i]
        v = ev[i]
        A[u, v] = 0
        A[v, u] = 0
        _remove_adj(nbr, deg, u, v)
        _remove_adj(nbr, deg, v, u)
        tick += 1
        if _planar_with(a, b, nbr, deg, stamp, rstamp, dloc, kidx, tick):
            x, y = (a, b) if a < b else (b, a)
            eu[i] = x
            ev[i] = y
            acc += 1
        else:
            x, y = u, v
        A[x, y] = 1
        A[y, x] = 1
        nbr[x, deg[x]] = y
        deg[x] += 1
        nbr[y, deg[y]] = x
        deg[y] += 1
        done += 1
    return done, pos, acc, tick
