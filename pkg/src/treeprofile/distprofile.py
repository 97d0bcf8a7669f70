"""Subquadratic exact distance profiles via centroid decomposition.

At each centroid c the ordered pairs routed through c are counted as
h * h - sum_i h_i * h_i (a difference of self-convolutions of depth-count
vectors), which yields the full distance profile in O(n log^2 n).  All
counts are exact integers: short convolutions are schoolbook in int64,
long ones use a real FFT whose rounding is protected by an a priori error
bound with schoolbook fallback.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .treecore import DistanceProfileCounts, _trim

__all__ = [
    "convolve_counts",
    "distance_profile_fast",
    "wiener_fast",
    "CentroidNode",
    "centroid_decomposition",
    "bench_rows",
]

# Above this length a self-convolution goes through the FFT path.
_CONV_THRESHOLD = 1536
# FFT rounding guard: bound * length * 2^-53 must stay below this.
_GUARD = 0.25


def convolve_counts(a, b) -> np.ndarray:
    """Exact integer convolution of two count vectors.

    Small products use schoolbook int64 arithmetic.  Large products use a
    float FFT, accepted only if max_coefficient * length * 2**-53 < 0.25,
    where max_coefficient bounds the largest exact output entry; otherwise
    falls back to the exact schoolbook path.
    """
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    out_len = len(a) + len(b) - 1
    amax, bmax = int(a.max(initial=0)), int(b.max(initial=0))
    bound = min(int(a.sum()) * bmax, int(b.sum()) * amax,
                amax * bmax * min(len(a), len(b)))
    if bound >= 1 << 62:
        # exact big-integer arithmetic; beyond any in-tree count but keeps
        # the public contract ("always exact") honest
        out = np.convolve(a.astype(object), b.astype(object))
        return out.astype(np.int64) if int(max(out)) < 1 << 63 else out
    small = min(len(a), len(b)) <= 64 or len(a) * len(b) <= 1 << 21
    if not small and bound * out_len * 2.0 ** -53 < _GUARD:
        size = 1
        while size < out_len:
            size *= 2
        fa = np.fft.rfft(a.astype(np.float64), size)
        fb = np.fft.rfft(b.astype(np.float64), size)
        conv = np.fft.irfft(fa * fb, size)[:out_len]
        out = np.rint(conv).astype(np.int64)
        if np.max(np.abs(conv - out)) < _GUARD:
            return out
        # rounding residual too large: redo exactly
    return np.convolve(a, b)


def _profile_counts_raw(t) -> np.ndarray:
    n = t.n
    if n == 1:
        return np.array([1], dtype=np.int64)
    off, adj = t.adjacency()
    lam, data, bounds, signs = K.centroid_accumulate(off, adj, n, _CONV_THRESHOLD)
    lam = lam.copy()
    for ti in range(len(signs)):
        vec = data[bounds[ti]:bounds[ti + 1]]
        conv = convolve_counts(vec, vec)
        stop = min(len(conv), len(lam))
        if signs[ti] > 0:
            lam[1:stop] += conv[1:stop]
        else:
            lam[1:stop] -= conv[1:stop]
    lam[0] = n
    lam = lam[:n]  # distances in a tree are at most n - 1
    return _trim(lam)


def distance_profile_fast(t) -> DistanceProfileCounts:
    """Exact distance profile in O(n log^2 n); equals the naive BFS count."""
    return DistanceProfileCounts(_profile_counts_raw(t))


def wiener_fast(t) -> int:
    """Wiener index (1/2) sum_i i * Lambda(i) from the fast profile."""
    lam = _profile_counts_raw(t)
    total = int(np.sum(np.arange(len(lam), dtype=np.int64) * lam, dtype=np.int64))
    return total // 2


@dataclass
class CentroidNode:
    """One component of the centroid decomposition (for inspection/tests)."""

    centroid: int
    size: int
    children: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return 1 + max((c.depth for c in self.children), default=0)


def centroid_decomposition(t) -> CentroidNode:
    """Materialised decomposition tree; every child component has size
    at most half of its parent (rounded up)."""
    off, adj = t.adjacency()
    n = t.n
    alive = np.ones(n, dtype=bool)

    def component(start):
        comp = [start]
        par = {start: -1}
        i = 0
        while i < len(comp):
            u = comp[i]
            i += 1
            for w in adj[off[u]:off[u + 1]]:
                w = int(w)
                if alive[w] and w != par[u]:
                    par[w] = u
                    comp.append(w)
        return comp, par

    def build(start):
        comp, par = component(start)
        size = len(comp)
        sz = {v: 1 for v in comp}
        for v in reversed(comp[1:]):
            sz[par[v]] += sz[v]
        best, best_part = -1, size + 1
        for v in comp:
            part = size - sz[v]
            for w in adj[off[v]:off[v + 1]]:
                w = int(w)
                if alive[w] and w != par[v]:
                    part = max(part, sz[w])
            if part < best_part or (part == best_part and v < best):
                best, best_part = v, part
        node = CentroidNode(best, size)
        alive[best] = False
        for w in adj[off[best]:off[best + 1]]:
            w = int(w)
            if alive[w]:
                node.children.append(build(w))
        return node

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 2 * int(np.log2(max(n, 2))) + 64))
    try:
        return build(0)
    finally:
        sys.setrecursionlimit(old)


def bench_rows(sizes, sample_tree, include_naive_upto: int = 4096) -> list[dict]:
    """Benchmark harness rows: n, algorithm, wall_ms, checksum.

    ``sample_tree(n)`` supplies the tree for each size.  The checksum is
    sum_i (i+1) Lambda(i) mod 2^61 - 1, identical across algorithms.
    """
    mod = (1 << 61) - 1
    rows = []
    _profile_counts_raw(sample_tree(64))  # warm the jit kernels
    for n in sizes:
        t = sample_tree(int(n))
        algos = [("fast", distance_profile_fast)]
        if t.n <= include_naive_upto:
            from .treecore import distance_profile_naive
            algos.append(("naive", distance_profile_naive))
        for name, fn in algos:
            t0 = time.perf_counter()
            dp = fn(t)
            ms = (time.perf_counter() - t0) * 1e3
            lam = dp.counts
            chk = int(np.sum((np.arange(len(lam), dtype=object) + 1) * lam) % mod)
            rows.append({"n": t.n, "algorithm": name,
                         "wall_ms": round(ms, 3), "checksum": chk})
    return rows
