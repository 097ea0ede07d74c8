"""Developing the surface into the plane: wedge unfolding, sweeps around cone points,
and straight-line tracing through triangles.  All decisions are exact sign tests."""
import math
from fractions import Fraction

from .errors import BudgetExceeded
from .field import FieldScalar, Vec, cross, dot, rational
from .homology import add

EAST = Vec(FieldScalar(1), FieldScalar(0))


def exact_square(L):
    """L^2 as an exact field element (floats are exact dyadic rationals)."""
    if isinstance(L, FieldScalar):
        return L * L
    q = rational(Fraction(L) if isinstance(L, float) else L)
    return FieldScalar(q * q)


def in_corner(surface, l, d):
    """Is direction d in the half-open corner sweep [u, w) at corner l?"""
    u, w = surface.corner_rays(l)
    c = cross(u, d).sign()
    if c == 0:
        return dot(u, d).sign() > 0
    return c > 0 and cross(d, w).sign() > 0


def corner_containing(surface, vertex, d):
    for l in surface.cone_points[vertex].corners:
        if in_corner(surface, l, d):
            return l
    raise AssertionError("direction not found around cone point")


def corners_with_direction(surface, d):
    """All corners (over all cone points) whose half-open sweep contains d."""
    return [l for l in range(surface.n_labels) if in_corner(surface, l, d)]


def same_direction(a, b):
    return cross(a, b).sign() == 0 and dot(a, b).sign() > 0


def sweep(surface, l, d, target, ccw=True):
    """Corner holding the first occurrence of direction ``target`` when turning from ray
    (l, d) counter-clockwise (or clockwise).  ``d`` must lie in the sweep of corner l.

    Every corner spans less than pi, so turning from d to -d always stops after exactly pi.
    """
    if in_corner(surface, l, target):
        c = cross(d, target).sign() if ccw else cross(target, d).sign()
        if c > 0 or same_direction(d, target):
            return l
    step = surface.ccw_corner if ccw else surface.cw_corner
    cur = l
    for _ in range(surface.n_labels + 1):
        cur = step(cur)
        if in_corner(surface, cur, target):
            return cur
    raise AssertionError("sweep did not find the target direction")


def rotate_pi(surface, l, d, ccw=True):
    """Corner holding -d reached by turning exactly pi from ray (l, d)."""
    return sweep(surface, l, d, -d, ccw)


# -- wedge unfolding ------------------------------------------------------------

def _seg_dist(ax, ay, bx, by):
    """Euclidean distance from the origin to segment AB (floats)."""
    dx, dy = bx - ax, by - ay
    den = dx * dx + dy * dy
    if den <= 0:
        return math.hypot(ax, ay)
    t = -(ax * dx + ay * dy) / den
    if t < 0:
        t = 0.0
    elif t > 1:
        t = 1.0
    return math.hypot(ax + t * dx, ay + t * dy)


def unfold_corner(surface, l, L, classes=None, lo=None, hi=None, budget=200000, prune=None):
    """Vertices visible from corner l strictly inside the open wedge (lo, hi) within distance L.

    Yields (Q, class_of_Q, arrival_corner).  ``arrival_corner`` is the corner at Q whose
    sweep contains the direction back to the origin.  ``prune(A, B)`` may cut branches.
    """
    hol = surface.hol
    glue = surface.glue
    nxt = surface.nxt
    prv = surface.prv
    L2 = exact_square(L)
    Lf = float(L) * (1 + 1e-9) + 1e-12
    a = nxt[l]
    b = prv[l]
    P1 = hol[l]
    P2 = P1 + hol[a]
    if lo is None:
        lo = P1
    if hi is None:
        hi = P2
    if classes is not None:
        c1 = classes[l]
        c2 = add(c1, classes[a])
    else:
        c1 = c2 = None
    stack = [(a, P1, P2, lo, hi, c1, c2)]
    steps = 0
    while stack:
        e, A, B, lo_, hi_, cA, cB = stack.pop()
        if _seg_dist(float(A.x), float(A.y), float(B.x), float(B.y)) > Lf:
            continue
        if prune is not None and prune(A, B):
            continue
        steps += 1
        if steps > budget:
            raise BudgetExceeded(f"unfolding visited more than {budget} triangles")
        f = glue[e]
        c = nxt[f]
        e2 = nxt[c]
        Q = A + hol[c]
        cQ = add(cA, classes[c]) if classes is not None else None
        s_lo = cross(lo_, Q).sign()
        s_hi = cross(Q, hi_).sign()
        if s_lo > 0 and s_hi > 0:
            if (Q.x * Q.x + Q.y * Q.y) <= L2:
                yield Q, cQ, e2
            stack.append((e2, Q, B, Q, hi_, cQ, cB))
            stack.append((c, A, Q, lo_, Q, cA, cQ))
        elif s_lo <= 0:
            stack.append((e2, Q, B, lo_, hi_, cQ, cB))
        else:
            stack.append((c, A, Q, lo_, hi_, cA, cQ))


def half_plane_vertices(surface, l0, d0, L, classes=None, budget=200000, prune=None):
    """Vertices visible from the cone point of corner l0 in the open half-plane to the left
    of ray (l0, d0), i.e. swept counter-clockwise by an angle in (0, pi).

    Yields (Q, class, arrival_corner) like :func:`unfold_corner`.
    """
    end = -d0
    L2 = exact_square(L)
    cur = l0
    first = True
    for _ in range(surface.n_labels + 1):
        u, w = surface.corner_rays(cur)
        if not first:
            if same_direction(u, end):
                return
            v = surface.hol[cur]
            if v.x * v.x + v.y * v.y <= L2:
                yield v, (classes[cur] if classes is not None else None), surface.glue[cur]
        lo = d0 if first else u
        last = in_corner(surface, cur, end) and (not first or cross(d0, end).sign() > 0)
        hi = end if last else w
        yield from unfold_corner(surface, cur, L, classes, lo, hi, budget, prune)
        if last:
            return
        first = False
        cur = surface.ccw_corner(cur)
    raise AssertionError("half-plane walk did not terminate")


# -- straight-line tracing -----------------------------------------------------

class Trace:
    """Result of tracing a straight segment through triangles."""

    __slots__ = ("pieces", "crossed", "end_vertex", "end_corner", "end_class", "end_point")

    def __init__(self):
        self.pieces = []  # (triangle, start_local, end_local, t_start, t_end)
        self.crossed = []  # labels exited, in order
        self.end_vertex = None
        self.end_corner = None
        self.end_class = None
        self.end_point = None


def _offset(surface, t, known):
    """Developed position of the first vertex of triangle t given {label: start position}."""
    first = surface.triangles[t][0]
    return known[first]


def _lerp_t(A, B, D):
    """Parameter t where the line t*D crosses the line through A, B."""
    BA = B - A
    return cross(A, BA) / cross(D, BA)


def trace_from_corner(surface, l, D, classes=None, t_max=FieldScalar(1), budget=100000):
    """Trace t*D, t in [0, t_max], from the cone point at corner l (D in the corner sweep).

    Stops at the first vertex hit, or at t_max.  ``t_max=None`` traces until a vertex.
    """
    hol, glue, nxt, prv = surface.hol, surface.glue, surface.nxt, surface.prv
    tr = Trace()
    t0 = surface.tri_of[l]
    u = hol[l]
    if same_direction(u, D):
        # along the edge itself
        P = hol[l]
        te = P.x / D.x if D.x else P.y / D.y
        if t_max is not None and te > t_max:
            off = _offset(surface, t0, {l: Vec(FieldScalar(0), FieldScalar(0)), nxt[l]: P, prv[l]: P + hol[nxt[l]]})
            end = D.scale(t_max)
            tr.pieces.append((t0, -off, end - off, FieldScalar(0), t_max))
            tr.end_point = end
            return tr
        off = _offset(surface, t0, {l: Vec(FieldScalar(0), FieldScalar(0)), nxt[l]: P, prv[l]: P + hol[nxt[l]]})
        tr.pieces.append((t0, -off, P - off, FieldScalar(0), te))
        tr.end_vertex = surface.vertex_of[nxt[l]]
        tr.end_corner = glue[l]
        tr.end_class = classes[l] if classes is not None else None
        tr.end_point = P
        return tr
    a = nxt[l]
    P1 = hol[l]
    P2 = P1 + hol[a]
    zero = Vec(FieldScalar(0), FieldScalar(0))
    c1 = classes[l] if classes is not None else None
    c2 = add(c1, classes[a]) if classes is not None else None
    off = _offset(surface, t0, {l: zero, a: P1, prv[l]: P2})
    return _walk(surface, tr, t0, off, zero, FieldScalar(0), a, P1, P2, c1, c2, D, t_max, budget, classes)


def trace_from_point(surface, t, z_local, D, t_max=FieldScalar(1), budget=100000):
    """Trace Z + s*D, s in [0, t_max], from an interior point Z of triangle t."""
    V = surface.triangle_points(t)
    rel = [v - z_local for v in V]
    labels = surface.triangles[t]
    for k in range(3):
        A, B = rel[k], rel[(k + 1) % 3]
        if cross(A, D).sign() > 0 and cross(D, B).sign() > 0:
            break
    else:
        raise AssertionError("no exit edge from interior point")
    tr = Trace()
    off = rel[0]
    zero = Vec(FieldScalar(0), FieldScalar(0))
    return _walk(surface, tr, t, off, zero, FieldScalar(0), labels[k], A, B, None, None, D, t_max, budget)


def _walk(surface, tr, tri, off, X_in, t_in, e, A, B, cA, cB, D, t_max, budget, classes=None):
    hol, glue, nxt = surface.hol, surface.glue, surface.nxt
    for _ in range(budget):
        t_out = _lerp_t(A, B, D)
        if t_max is not None and t_out >= t_max:
            X_end = D.scale(t_max)
            tr.pieces.append((tri, X_in - off, X_end - off, t_in, t_max))
            tr.end_point = X_end
            return tr
        X_out = D.scale(t_out)
        tr.pieces.append((tri, X_in - off, X_out - off, t_in, t_out))
        tr.crossed.append(e)
        f = glue[e]
        c = nxt[f]
        e2 = nxt[c]
        Q = A + hol[c]
        cQ = add(cA, classes[c]) if classes is not None else None
        tri = surface.tri_of[f]
        off = _offset(surface, tri, {f: B, c: A, e2: Q})
        X_in, t_in = X_out, t_out
        s = cross(D, Q).sign()
        if s == 0:
            tQ = Q.x / D.x if D.x else Q.y / D.y
            if t_max is not None and tQ > t_max:
                X_end = D.scale(t_max)
                tr.pieces.append((tri, X_in - off, X_end - off, t_in, t_max))
                tr.end_point = X_end
                return tr
            tr.pieces.append((tri, X_in - off, Q - off, t_in, tQ))
            tr.end_vertex = surface.vertex_of[e2]
            tr.end_corner = e2
            tr.end_class = cQ
            tr.end_point = Q
            return tr
        if s > 0:
            e, B, cB = c, Q, cQ
        else:
            e, A, cA = e2, Q, cQ
    raise BudgetExceeded(f"trace exceeded {budget} triangle crossings")
