"""Saddle connections: enumeration by unfolding, growth census, short connections."""
import math
from dataclasses import dataclass

from .errors import BudgetExceeded
from .field import Vec
from .homology import homology_data, neg
from .linalg import rank
from .unfold import _seg_dist, exact_square, unfold_corner

DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True)
class SaddleConnection:
    start_cone: int
    end_cone: int
    holonomy: Vec
    homology: tuple
    start_corner: int
    end_corner: int
    frame: tuple = None

    @property
    def vector(self):
        """Holonomy in the plane; applies the float frame on framed surfaces."""
        if self.frame is None:
            return self.holonomy
        (a, b), (c, d) = self.frame
        x, y = self.holonomy.to_float()
        return (a * x + b * y, c * x + d * y)

    @property
    def length2(self):
        if self.frame is not None:
            x, y = self.vector
            return x * x + y * y
        h = self.holonomy
        return h.x * h.x + h.y * h.y

    @property
    def length(self):
        return math.sqrt(float(self.length2))

    @property
    def angle(self):
        v = self.vector
        x, y = v if self.frame is not None else v.to_float()
        a = math.atan2(y, x)
        return a + 2 * math.pi if a < 0 else a

    def reversed(self):
        return SaddleConnection(self.end_cone, self.start_cone, -self.holonomy, neg(self.homology),
                                self.end_corner, self.start_corner, self.frame)


def homology_basis(surface):
    """Directed edges whose relative classes form a Z-basis."""
    return list(homology_data(surface).basis)


def _sort_key(sc):
    return (float(sc.length2), sc.angle)


def enumerate_saddle_connections(surface, L, budget=DEFAULT_BUDGET):
    """Every oriented saddle connection of length <= L, sorted by length then angle."""
    if not float(L) > 0:
        raise ValueError("length bound must be positive")
    classes = homology_data(surface).classes
    vertex_of = surface.vertex_of
    frame = surface.frame
    if frame is not None:
        # unfold the exact base surface far enough, then filter by framed length
        Lf = float(L)
        L = Lf * _inverse_norm(frame) * (1 + 1e-9)
        limit = Lf * Lf * (1 + 1e-12)
        frame = tuple(tuple(float(v) for v in row) for row in frame)
        (fa, fb), (fc, fd) = frame
        reach = Lf * (1 + 1e-9) + 1e-12

        def prune(A, B):
            ax, ay, bx, by = float(A.x), float(A.y), float(B.x), float(B.y)
            return _seg_dist(fa * ax + fb * ay, fc * ax + fd * ay, fa * bx + fb * by, fc * bx + fd * by) > reach
    else:
        prune = None
    L2 = exact_square(L)
    found = {}

    def emit(l, Q, cls, arrival):
        key = (l, Q)
        if key not in found:
            sc = SaddleConnection(vertex_of[l], vertex_of[arrival], Q, cls, l, arrival, frame)
            if frame is None or sc.length2 <= limit:
                found[key] = sc

    for l in range(surface.n_labels):
        v = surface.hol[l]
        if v.x * v.x + v.y * v.y <= L2:
            emit(l, v, classes[l], surface.glue[l])
        u, w = surface.corner_rays(l)
        try:
            for Q, cls, arr in unfold_corner(surface, l, L, classes, u, w, budget=budget, prune=prune):
                emit(l, Q, cls, arr)
        except BudgetExceeded as exc:
            raise BudgetExceeded(f"saddle enumeration exceeded its budget of {budget} triangles") from exc
    return sorted(found.values(), key=_sort_key)


def _inverse_norm(m):
    """Operator 2-norm of the inverse of a 2x2 matrix."""
    (a, b), (c, d) = ((float(v) for v in row) for row in m)
    det = a * d - b * c
    s2 = a * a + b * b + c * c + d * d
    smin2 = (s2 - math.sqrt(max(s2 * s2 - 4 * det * det, 0.0))) / 2
    return 1.0 / math.sqrt(smin2)


def saddle_growth_census(surface, L_max, steps, budget=DEFAULT_BUDGET):
    """Counts at geometric checkpoints L_max * 2^(k - steps + 1), k = 0..steps-1,
    with the quadratic growth diagnostic count / L^2."""
    if not float(L_max) > 0:
        raise ValueError("length bound must be positive")
    conns = enumerate_saddle_connections(surface, L_max, budget)
    lengths = [c.length2 for c in conns]
    rows = []
    for k in range(steps):
        Lk = float(L_max) * 2.0 ** (k - steps + 1)
        L2 = exact_square(Lk) if surface.frame is None else Lk * Lk * (1 + 1e-12)
        n = sum(1 for x in lengths if x <= L2)
        rows.append((Lk, n, n / (Lk * Lk)))
    return rows


def short_saddles(surface, eps, estimator=None):
    """Connections whose extremal-length estimate is <= eps, plus boundary connections of
    cylinders with short cores.  Returns (connections, j) with j the rank of their classes."""
    from . import regular

    if estimator is None:
        estimator = regular.ext_estimate
    area = float(surface.area)
    # ext_estimate = l^2 / area, so the bound on l is sqrt(eps * area)
    Lb = math.sqrt(eps * area) * (1 + 1e-12)
    conns = [c for c in enumerate_saddle_connections(surface, Lb)
             if estimator(surface, c.length) <= eps]
    seen = {(c.start_corner, c.holonomy) for c in conns}
    for cyl_conn in regular.short_cylinder_boundaries(surface, eps):
        if (cyl_conn.start_corner, cyl_conn.holonomy) not in seen:
            seen.add((cyl_conn.start_corner, cyl_conn.holonomy))
            conns.append(cyl_conn)
    conns.sort(key=_sort_key)
    j = rank([list(c.homology) for c in conns]) if conns else 0
    return conns, j


def holonomy_from_class(surface, cls):
    """Sum of basis-edge holonomies weighted by the class coordinates."""
    basis = homology_data(surface).basis
    x = surface.hol[basis[0]].x * 0
    y = x
    for b, k in zip(basis, cls):
        if k:
            x = x + surface.hol[b].x * k
            y = y + surface.hol[b].y * k
    return Vec(x, y)

