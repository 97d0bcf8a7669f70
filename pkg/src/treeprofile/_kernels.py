"""Numba kernels for tree construction, BFS statistics and the centroid pass.

All kernels take plain int64 arrays.  The centroid kernel accumulates
short convolutions inline (schoolbook, exact in int64) and emits depth
vectors longer than ``conv_threshold`` as tasks for the caller to convolve
with an FFT; that keeps the hot path free of Python while the rare tall
components (path-like trees) still get O(L log L) treatment.
"""

from __future__ import annotations

import numpy as np
from numba import njit

I8 = np.int64


@njit(cache=True)
def build_tree_arrays(offspring):
    """Parent array and CSR children lists from a preorder outdegree sequence."""
    n = offspring.shape[0]
    parent = np.full(n, -1, dtype=I8)
    child_off = np.zeros(n + 1, dtype=I8)
    for i in range(n):
        child_off[i + 1] = child_off[i] + offspring[i]
    children = np.empty(child_off[n], dtype=I8)
    used = np.zeros(n, dtype=I8)
    stack = np.empty(n + 1, dtype=I8)
    top = 0
    stack[0] = 0
    for v in range(1, n):
        while top >= 0 and used[stack[top]] == offspring[stack[top]]:
            top -= 1
        u = stack[top]
        parent[v] = u
        children[child_off[u] + used[u]] = v
        used[u] += 1
        top += 1
        stack[top] = v
    return parent, child_off, children


@njit(cache=True)
def depths_from_parent(parent):
    """Depths for preorder-indexed trees (parent[i] < i)."""
    n = parent.shape[0]
    depth = np.zeros(n, dtype=I8)
    for i in range(1, n):
        depth[i] = depth[parent[i]] + 1
    return depth


@njit(cache=True)
def subtree_sizes(parent):
    n = parent.shape[0]
    size = np.ones(n, dtype=I8)
    for i in range(n - 1, 0, -1):
        size[parent[i]] += size[i]
    return size


@njit(cache=True)
def adjacency_from_edges(n, edges):
    """CSR adjacency from 0-based edge pairs."""
    m = edges.shape[0]
    deg = np.zeros(n, dtype=I8)
    for e in range(m):
        deg[edges[e, 0]] += 1
        deg[edges[e, 1]] += 1
    off = np.zeros(n + 1, dtype=I8)
    for i in range(n):
        off[i + 1] = off[i] + deg[i]
    adj = np.empty(off[n], dtype=I8)
    fill = np.zeros(n, dtype=I8)
    for e in range(m):
        u, v = edges[e, 0], edges[e, 1]
        adj[off[u] + fill[u]] = v
        fill[u] += 1
        adj[off[v] + fill[v]] = u
        fill[v] += 1
    return off, adj


@njit(cache=True)
def bfs_depths(off, adj, source, n):
    """Distances from one source; unreachable vertices get -1."""
    dist = np.full(n, -1, dtype=I8)
    queue = np.empty(n, dtype=I8)
    dist[source] = 0
    queue[0] = source
    head, tail = 0, 1
    while head < tail:
        u = queue[head]
        head += 1
        for j in range(off[u], off[u + 1]):
            v = adj[j]
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue[tail] = v
                tail += 1
    return dist


@njit(cache=True)
def distance_counts_naive(off, adj, n):
    """Ordered pair counts per distance via BFS from every vertex; O(n^2)."""
    lam = np.zeros(n, dtype=I8)
    dist = np.empty(n, dtype=I8)
    queue = np.empty(n, dtype=I8)
    for s in range(n):
        for i in range(n):
            dist[i] = -1
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            for j in range(off[u], off[u + 1]):
                v = adj[j]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue[tail] = v
                    tail += 1
        for i in range(n):
            lam[dist[i]] += 1
    return lam


@njit(cache=True)
def farthest_vertex(off, adj, source, n):
    dist = bfs_depths(off, adj, source, n)
    best, bestd = source, 0
    for i in range(n):
        if dist[i] > bestd:
            best, bestd = i, dist[i]
    return best, bestd


@njit(cache=True)
def wiener_from_parent(parent):
    """Sum of pairwise distances via edge cut sizes: sum_e s_e (n - s_e)."""
    n = parent.shape[0]
    size = subtree_sizes(parent)
    total = 0
    for i in range(1, n):
        total += size[i] * (n - size[i])
    return total


@njit(cache=True)
def holder_seminorm_sq(g, alpha, scale):
    """Squared Holder-alpha seminorm of lattice values g over the grid
    k * scale: max over pairs of |g[j] - g[k]|^2 / (|j - k| * scale)^(2a)."""
    m = g.shape[0]
    best = 0.0
    for lag in range(1, m):
        dmax = 0.0
        for k in range(m - lag):
            d = g[k + lag] - g[k]
            if d < 0.0:
                d = -d
            if d > dmax:
                dmax = d
        val = (dmax / (lag * scale) ** alpha) ** 2
        if val > best:
            best = val
    return best


@njit(cache=True)
def _grow(buf, need):
    cap = buf.shape[0]
    if need <= cap:
        return buf
    newcap = cap
    while newcap < need:
        newcap *= 2
    out = np.empty(newcap, dtype=buf.dtype)
    out[: buf.shape[0]] = buf
    return out


@njit(cache=True)
def centroid_accumulate(off, adj, n, conv_threshold):
    """Centroid-decomposition pass over the tree given by CSR (off, adj).

    Returns (lam, task_data, task_bounds, task_sign) where lam holds the
    inline-accumulated ordered pair counts for distances >= 1, and each
    task slice task_data[task_bounds[t]:task_bounds[t+1]] is a depth-count
    vector whose signed self-convolution the caller still has to add.
    """
    alive = np.ones(n, dtype=np.uint8)
    # conv indices i+j reach 2*maxd, which can exceed n-1; the surplus
    # cancels between the +h*h and -h_b*h_b terms but must stay in bounds
    lam = np.zeros(2 * n + 2, dtype=I8)

    # scratch reused across components; trees have no cycles, so a BFS
    # parent check doubles as the visited test within a component
    order = np.empty(n, dtype=I8)
    par = np.empty(n, dtype=I8)
    sz = np.empty(n, dtype=I8)
    dist = np.empty(n, dtype=I8)
    branch = np.empty(n, dtype=I8)
    queue = np.empty(n, dtype=I8)

    comp_v = np.empty(n + 1, dtype=I8)
    comp_s = np.empty(n + 1, dtype=I8)
    comp_v[0] = 0
    comp_s[0] = n
    sp = 1

    task_data = np.empty(1024, dtype=I8)
    task_bounds = np.empty(16, dtype=I8)
    task_sign = np.empty(16, dtype=np.int8)
    task_bounds[0] = 0
    task_count = 0
    data_len = 0

    while sp > 0:
        sp -= 1
        s = comp_v[sp]
        size = comp_s[sp]
        if size == 1:
            alive[s] = 0
            continue

        # BFS from s; `order` lists the component with parents first
        order[0] = s
        par[s] = -1
        head, tail = 0, 1
        while head < tail:
            u = order[head]
            head += 1
            for j in range(off[u], off[u + 1]):
                v = adj[j]
                if alive[v] == 1 and v != par[u]:
                    par[v] = u
                    order[tail] = v
                    tail += 1
        # subtree sizes rooted at s
        for i in range(tail):
            sz[order[i]] = 1
        for i in range(tail - 1, 0, -1):
            sz[par[order[i]]] += sz[order[i]]

        # centroid: minimise the largest remaining part, ties to lower index
        best = -1
        best_part = size + 1
        for i in range(tail):
            v = order[i]
            part = size - sz[v]
            for j in range(off[v], off[v + 1]):
                u = adj[j]
                if alive[u] == 1 and u != par[v] and sz[u] > part:
                    part = sz[u]
            if part < best_part or (part == best_part and v < best):
                best = v
                best_part = part
        c = best

        # BFS from the centroid: distances and branch ids
        maxd = 1
        dist[c] = 0
        branch[c] = -1
        par[c] = -1
        queue[0] = c
        tail = 1
        nb = 0
        for j in range(off[c], off[c + 1]):
            v = adj[j]
            if alive[v] == 1:
                dist[v] = 1
                branch[v] = nb
                par[v] = c
                nb += 1
                queue[tail] = v
                tail += 1
        head = 1
        while head < tail:
            u = queue[head]
            head += 1
            for j in range(off[u], off[u + 1]):
                v = adj[j]
                if alive[v] == 1 and v != par[u]:
                    par[v] = u
                    dist[v] = dist[u] + 1
                    branch[v] = branch[u]
                    if dist[v] > maxd:
                        maxd = dist[v]
                    queue[tail] = v
                    tail += 1
        if tail != size:
            raise RuntimeError("centroid BFS size mismatch")

        # whole-component depth counts: inline or emit
        h = np.zeros(maxd + 1, dtype=I8)
        for i in range(tail):
            h[dist[queue[i]]] += 1
        if maxd + 1 <= conv_threshold:
            for i in range(maxd + 1):
                hi = h[i]
                if hi != 0:
                    for j in range(maxd + 1):
                        d = i + j
                        if d >= 1 and h[j] != 0:
                            lam[d] += hi * h[j]
        else:
            task_data = _grow(task_data, data_len + maxd + 1)
            for i in range(maxd + 1):
                task_data[data_len + i] = h[i]
            data_len += maxd + 1
            task_bounds = _grow(task_bounds, task_count + 2)
            task_sign = _grow(task_sign, task_count + 1)
            task_bounds[task_count + 1] = data_len
            task_sign[task_count] = 1
            task_count += 1

        # per-branch depth counts (subtract same-branch pairs)
        bmax = np.zeros(nb, dtype=I8)
        bsz = np.zeros(nb, dtype=I8)
        for i in range(1, tail):
            b = branch[queue[i]]
            bsz[b] += 1
            if dist[queue[i]] > bmax[b]:
                bmax[b] = dist[queue[i]]
        boff = np.zeros(nb + 1, dtype=I8)
        for b in range(nb):
            boff[b + 1] = boff[b] + bmax[b] + 1
        hb = np.zeros(boff[nb], dtype=I8)
        for i in range(1, tail):
            v = queue[i]
            hb[boff[branch[v]] + dist[v]] += 1
        for b in range(nb):
            L = bmax[b] + 1
            base = boff[b]
            if L <= conv_threshold:
                for i in range(1, L):
                    hi = hb[base + i]
                    if hi != 0:
                        for j in range(1, L):
                            if hb[base + j] != 0:
                                lam[i + j] -= hi * hb[base + j]
            else:
                task_data = _grow(task_data, data_len + L)
                for i in range(L):
                    task_data[data_len + i] = hb[base + i]
                data_len += L
                task_bounds = _grow(task_bounds, task_count + 2)
                task_sign = _grow(task_sign, task_count + 1)
                task_bounds[task_count + 1] = data_len
                task_sign[task_count] = -1
                task_count += 1

        # retire the centroid, recurse on its branches
        alive[c] = 0
        for j in range(off[c], off[c + 1]):
            v = adj[j]
            if alive[v] == 1:
                comp_v[sp] = v
                comp_s[sp] = bsz[branch[v]]
                sp += 1

    return lam, task_data[:data_len], task_bounds[: task_count + 1], task_sign[:task_count]
