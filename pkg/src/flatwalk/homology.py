"""Relative homology H1(X, cone points; Z) from the triangulation.

Every vertex is a cone (or marked) point, so the relative group is C1 / im(boundary).
Edges outside a spanning tree of the dual graph form a basis; tree edges are solved by
peeling leaf triangles.
"""
from collections import deque
from functools import lru_cache

from .errors import RankDeficiency
from .surface import stratum


def add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def neg(u):
    return tuple(-a for a in u)


def scale(u, k):
    return tuple(k * a for a in u)


class HomologyData:
    def __init__(self, surface):
        self.surface = surface
        n_tri = len(surface.triangles)
        parent = list(range(n_tri))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        tri_of = surface.tri_of
        tree = set()
        for l in sorted(surface.edge_reps(), reverse=True):
            a, b = find(tri_of[l]), find(tri_of[surface.glue[l]])
            if a != b:
                parent[a] = b
                tree.add(l)
        basis = [l for l in surface.edge_reps() if l not in tree]
        h = stratum(surface).rel_homology_dim
        if len(basis) != h:
            raise RankDeficiency(f"found {len(basis)} basis edges, expected h = {h}")
        self.basis = tuple(basis)
        self.tree = frozenset(tree)
        self.h = h
        cls = [None] * surface.n_labels
        for k, l in enumerate(basis):
            e = tuple(1 if i == k else 0 for i in range(h))
            cls[l] = e
            cls[surface.glue[l]] = neg(e)
        pending = deque(range(n_tri))
        guard = 0
        while pending:
            t = pending.popleft()
            tri = surface.triangles[t]
            unknown = [x for x in tri if cls[x] is None]
            if len(unknown) == 1:
                x = unknown[0]
                y, z = (w for w in tri if w != x)
                cls[x] = neg(add(cls[y], cls[z]))
                cls[surface.glue[x]] = add(cls[y], cls[z])
                pending.append(tri_of[surface.glue[x]])
            elif len(unknown) > 1:
                pending.append(t)
                guard += 1
                if guard > 10 * n_tri * n_tri + 10:
                    raise RankDeficiency("leaf peeling stalled")
        for tri in surface.triangles:
            s = add(add(cls[tri[0]], cls[tri[1]]), cls[tri[2]])
            if any(s):
                raise RankDeficiency("triangle relation violated")
        self.classes = tuple(cls)

    def zero(self):
        return (0,) * self.h

    def tree_path(self, src, dst):
        """Exit labels of the dual-tree path from triangle src to triangle dst."""
        s = self.surface
        prev = {src: None}
        queue = deque([src])
        while queue:
            t = queue.popleft()
            if t == dst:
                break
            for l in s.triangles[t]:
                rep = min(l, s.glue[l])
                if rep not in self.tree:
                    continue
                u = s.tri_of[s.glue[l]]
                if u not in prev:
                    prev[u] = (t, l)
                    queue.append(u)
        path = []
        t = dst
        while prev[t] is not None:
            t0, l = prev[t]
            path.append(l)
            t = t0
        return path[::-1]

    def dual_basis_loops(self):
        """For basis edge k: loop exits tri_of[b_k] through b_k then returns along the tree."""
        s = self.surface
        loops = []
        for b in self.basis:
            start = s.tri_of[b]
            back = self.tree_path(s.tri_of[s.glue[b]], start)
            loops.append([b] + back)
        return loops


@lru_cache(maxsize=64)
def _cached(surface):
    return HomologyData(surface)


def homology_data(surface):
    return _cached(surface)
