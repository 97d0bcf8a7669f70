"""Core tree types, profiles by definition, Wiener index and rerooting.

An :class:`OrderedTree` stores vertices in depth-first (preorder) order,
so child lists are contiguous and parents precede children; this keeps
traversals cache friendly for million-node trees.  A
:class:`LabelledTree` is an unrooted tree on labels 1..n given by its
edge list.

The height profile counts vertices per depth; the distance profile
counts ordered vertex pairs per distance (including coincident pairs at
distance 0).  Both are extended to real arguments by the triangular
kernel, i.e. linear interpolation through the integer counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K

__all__ = [
    "OrderedTree",
    "LabelledTree",
    "PointedTree",
    "ProfileCounts",
    "DistanceProfileCounts",
    "TreeError",
    "height_profile",
    "interpolate",
    "distance_profile_naive",
    "distance_profile_from_rootings",
    "wiener_index",
    "wiener_via_edge_cuts",
    "width_height_diameter",
    "diameter",
    "reroot_transform",
]


class TreeError(ValueError):
    """Malformed tree input."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class OrderedTree:
    """Rooted ordered tree; vertex 0 is the root, indices are preorder."""

    n: int
    parent: np.ndarray      # parent index, -1 for the root
    child_off: np.ndarray   # CSR offsets into `children`
    children: np.ndarray    # concatenated ordered child lists

    @staticmethod
    def from_offspring(offspring) -> "OrderedTree":
        """Build from the preorder outdegree sequence (sums to n-1)."""
        xi = np.ascontiguousarray(offspring, dtype=np.int64)
        n = len(xi)
        if n < 1:
            raise TreeError("empty offspring sequence")
        if int(xi.sum()) != n - 1:
            raise TreeError("outdegrees must sum to n - 1")
        if n > 1:
            walk = np.cumsum(xi - 1)
            if walk[-1] != -1 or walk[:-1].min() < 0:
                raise TreeError("offspring sequence is not a valid preorder code")
        parent, off, ch = K.build_tree_arrays(xi)
        return OrderedTree(n, _frozen(parent), _frozen(off), _frozen(ch))

    @staticmethod
    def from_parenthesis(s: str) -> "OrderedTree":
        """Parse a balanced parenthesis string, one '()' pair per vertex."""
        s = s.strip()
        if not s:
            raise TreeError("empty parenthesis string")
        counts = []
        stack = []
        for chv in s:
            if chv == "(":
                counts.append(0)
                if stack:
                    counts[stack[-1]] += 1
                elif len(counts) > 1:
                    raise TreeError("multiple roots in parenthesis string")
                stack.append(len(counts) - 1)
            elif chv == ")":
                if not stack:
                    raise TreeError("unbalanced parenthesis string")
                stack.pop()
            else:
                raise TreeError(f"unexpected character {chv!r}")
        if stack:
            raise TreeError("unbalanced parenthesis string")
        return OrderedTree.from_offspring(np.array(counts, dtype=np.int64))

    def offspring(self) -> np.ndarray:
        return np.diff(self.child_off)

    def shape_key(self) -> tuple:
        """Canonical hashable form: the preorder outdegree tuple."""
        return tuple(int(x) for x in self.offspring())

    def depths(self) -> np.ndarray:
        return K.depths_from_parent(self.parent)

    def subtree_sizes(self) -> np.ndarray:
        return K.subtree_sizes(self.parent)

    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        if self.n == 1:
            return np.zeros(2, dtype=np.int64), np.empty(0, dtype=np.int64)
        edges = np.empty((self.n - 1, 2), dtype=np.int64)
        edges[:, 0] = np.arange(1, self.n)
        edges[:, 1] = self.parent[1:]
        return K.adjacency_from_edges(self.n, edges)

    def to_parenthesis(self) -> str:
        out = []
        xi = self.offspring()
        # preorder emit: "(" entering a vertex, ")" when its subtree is done
        pending = []
        for v in range(self.n):
            out.append("(")
            pending.append(int(xi[v]))
            while pending and pending[-1] == 0:
                pending.pop()
                out.append(")")
                if pending:
                    pending[-1] -= 1
        return "".join(out)

    def as_labelled(self, labels) -> "LabelledTree":
        """Forget root and ordering; relabel vertex i as labels[i] (1-based)."""
        lab = np.asarray(labels, dtype=np.int64)
        if self.n == 1:
            return LabelledTree(1, np.empty((0, 2), dtype=np.int64))
        edges = np.empty((self.n - 1, 2), dtype=np.int64)
        edges[:, 0] = lab[np.arange(1, self.n)]
        edges[:, 1] = lab[self.parent[1:]]
        return LabelledTree(self.n, edges)

    def validate(self):
        if int(self.offspring().sum()) != self.n - 1:
            raise TreeError("outdegree sum violated")
        for v in range(self.n):
            for c in self.children[self.child_off[v]:self.child_off[v + 1]]:
                if self.parent[c] != v:
                    raise TreeError("parent/children inconsistent")
        if self.n > 1 and not np.all(self.parent[1:] < np.arange(1, self.n)):
            raise TreeError("indices are not in depth-first order")


@dataclass(frozen=True)
class LabelledTree:
    """Unrooted tree on labels 1..n as an (n-1) x 2 edge array."""

    n: int
    edges: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", _frozen(e))
        if e.shape[0] != self.n - 1:
            raise TreeError("a tree on n vertices has n - 1 edges")
        if self.n > 1:
            if e.min() < 1 or e.max() > self.n:
                raise TreeError("labels must lie in 1..n")
            # connected + acyclic via union-find
            root = list(range(self.n + 1))

            def find(x):
                while root[x] != x:
                    root[x] = root[root[x]]
                    x = root[x]
                return x

            for u, v in e:
                ru, rv = find(int(u)), find(int(v))
                if ru == rv:
                    raise TreeError("edge list contains a cycle")
                root[ru] = rv

    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        return K.adjacency_from_edges(self.n, self.edges - 1)

    def edge_key(self) -> tuple:
        """Canonical hashable form: sorted tuple of sorted edge pairs."""
        return tuple(sorted((int(min(u, v)), int(max(u, v))) for u, v in self.edges))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n + 1, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg[1:]

    def rooted_at(self, label: int) -> OrderedTree:
        """Root at `label`, ordering children by ascending label."""
        if not 1 <= label <= self.n:
            raise TreeError("root label out of range")
        off, adj = self.adjacency()
        adj = adj.copy()
        for i in range(self.n):  # ascending-label child order
            adj[off[i]:off[i + 1]] = np.sort(adj[off[i]:off[i + 1]])
        xi = np.empty(self.n, dtype=np.int64)
        order = np.empty(self.n, dtype=np.int64)
        visited = np.zeros(self.n, dtype=bool)
        stack = [(int(label) - 1, -1)]
        pos = 0
        while stack:
            v, pv = stack.pop()
            order[pos] = v
            visited[v] = True
            kids = [int(u) for u in adj[off[v]:off[v + 1]] if u != pv]
            xi[pos] = len(kids)
            pos += 1
            for u in reversed(kids):
                stack.append((u, v))
        return OrderedTree.from_offspring(xi)

    def to_csv(self) -> str:
        return "".join(f"{int(u)},{int(v)}\n" for u, v in self.edges)

    @staticmethod
    def from_csv(text: str) -> "LabelledTree":
        pairs = []
        for line in text.strip().splitlines():
            line = line.strip()
            if not line:
                continue
            u, v = line.split(",")
            pairs.append((int(u), int(v)))
        if not pairs:
            return LabelledTree(1, np.empty((0, 2), dtype=np.int64))
        n = max(max(u, v) for u, v in pairs)
        return LabelledTree(n, np.array(pairs, dtype=np.int64))


@dataclass(frozen=True)
class PointedTree:
    """A rooted ordered tree with one marked vertex."""

    tree: OrderedTree
    mark: int

    def __post_init__(self):
        if not 0 <= self.mark < self.tree.n:
            raise TreeError("mark out of range")


@dataclass(frozen=True)
class ProfileCounts:
    """Vertex counts per depth, L(0..H)."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", _frozen(c))
        if len(c) == 0 or c[0] != 1:
            raise TreeError("rooted profile needs L(0) = 1")
        if c[-1] == 0 and len(c) > 1:
            raise TreeError("trailing zero in profile")

    @property
    def height(self) -> int:
        return len(self.counts) - 1

    @property
    def size(self) -> int:
        return int(self.counts.sum())

    @property
    def width(self) -> int:
        return int(self.counts.max())


@dataclass(frozen=True)
class DistanceProfileCounts:
    """Ordered-pair counts per distance, Lambda(0..D); Lambda(0) = n."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", _frozen(c))
        n = int(c[0])
        if int(c.sum()) != n * n:
            raise TreeError("distance profile must sum to n^2")
        if len(c) > 1 and (c[-1] == 0 or np.any(c[1:] % 2)):
            raise TreeError("counts at positive distance must be even and trimmed")

    @property
    def n(self) -> int:
        return int(self.counts[0])

    @property
    def diameter(self) -> int:
        return len(self.counts) - 1


def height_profile(t: OrderedTree) -> ProfileCounts:
    """L(i) = number of vertices at depth i."""
    return ProfileCounts(np.bincount(t.depths()))


def interpolate(profile, x):
    """Triangular-kernel interpolation; exact counts at integers, 0 outside."""
    counts = profile.counts if hasattr(profile, "counts") else np.asarray(profile)
    knots = np.arange(-1, len(counts) + 1, dtype=float)
    vals = np.concatenate(([0.0], counts.astype(float), [0.0]))
    return np.interp(x, knots, vals, left=0.0, right=0.0)


def _trim(lam: np.ndarray) -> np.ndarray:
    nz = np.nonzero(lam)[0]
    return lam[: nz[-1] + 1] if len(nz) else lam[:1]


def distance_profile_naive(t) -> DistanceProfileCounts:
    """Ordered pairs per distance by BFS from every vertex; the O(n^2) oracle."""
    off, adj = t.adjacency()
    n = t.n
    lam = K.distance_counts_naive(off, adj, n)
    return DistanceProfileCounts(_trim(lam))


def distance_profile_from_rootings(t: LabelledTree) -> DistanceProfileCounts:
    """Sum of height profiles over all rootings; equals the distance profile."""
    acc = np.zeros(t.n, dtype=np.int64)
    for label in range(1, t.n + 1):
        prof = height_profile(t.rooted_at(label)).counts
        acc[: len(prof)] += prof
    return DistanceProfileCounts(_trim(acc))


def wiener_index(dp: DistanceProfileCounts) -> int:
    """Half the sum of i * Lambda(i), an exact integer."""
    i = np.arange(len(dp.counts), dtype=object)
    total = int(sum(i * dp.counts))
    if total % 2:
        raise TreeError("odd ordered-distance total")
    return total // 2


def wiener_via_edge_cuts(t: OrderedTree) -> int:
    """Wiener index in O(n): each edge contributes s_e * (n - s_e) pairs."""
    return int(K.wiener_from_parent(t.parent))


def diameter(t) -> int:
    if t.n == 1:
        return 0
    off, adj = t.adjacency()
    far, _ = K.farthest_vertex(off, adj, 0, t.n)
    _, d = K.farthest_vertex(off, adj, far, t.n)
    return int(d)


def width_height_diameter(t: OrderedTree) -> tuple[int, int, int]:
    prof = height_profile(t)
    return prof.width, prof.height, diameter(t)


def reroot_transform(pt: PointedTree) -> PointedTree:
    """Pointed rerooting surgery that preserves the unconditioned tree law.

    For a mark v below the root: cut the edge to its parent pr(v), attach v
    as the last child of the old root, and reroot at pr(v).  The fringe
    subtree at the mark is carried over unchanged.  Marking the root is a
    fixed point.
    """
    t, v = pt.tree, pt.mark
    if v == 0:
        return pt
    n = t.n
    kids = [list(map(int, t.children[t.child_off[u]:t.child_off[u + 1]]))
            for u in range(n)]
    parent = t.parent
    pr = int(parent[v])
    kids[pr].remove(v)
    kids[0].append(v)
    # ancestor path old-root -> pr, edges to be flipped
    path = [pr]
    while path[-1] != 0:
        path.append(int(parent[path[-1]]))
    path.reverse()  # [0, ..., pr]
    for a, b in zip(path[:-1], path[1:]):
        kids[a].remove(b)
    for a, b in zip(path[:-1], path[1:]):
        kids[b].append(a)
    # renumber in preorder from the new root pr
    xi = np.empty(n, dtype=np.int64)
    newpos = np.empty(n, dtype=np.int64)
    stack = [pr]
    pos = 0
    while stack:
        u = stack.pop()
        newpos[u] = pos
        xi[pos] = len(kids[u])
        pos += 1
        stack.extend(reversed(kids[u]))
    tree = OrderedTree.from_offspring(xi)
    return PointedTree(tree, int(newpos[v]))


def fringe_shape(pt: PointedTree) -> tuple:
    """Preorder outdegree tuple of the fringe subtree at the mark."""
    t, v = pt.tree, pt.mark
    sizes = t.subtree_sizes()
    xi = t.offspring()
    return tuple(int(x) for x in xi[v: v + int(sizes[v])])
