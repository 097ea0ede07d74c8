"""Intersection numbers: crossing counts of traced geodesics, the homological pairing,
cylinder-atlas counts, relation transfer checks and twist numbers."""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cylinders import direction_key, direction_periodicity
from .errors import NotTransversal, ParallelDirection, ParallelOverlap
from .field import FieldScalar, Q, Vec, cross, dot
from .homology import homology_data
from .kernels import classify_pairs
from .linalg import rref, solve
from .unfold import EAST, sweep, trace_from_corner, trace_from_point

FLOAT_TOL = 1e-9


# -- traced paths and crossing counts -----------------------------------------------

@dataclass
class Path:
    """A straight path traced through triangles; pieces are (tri, p0, p1, t0, t1) with
    local coordinates and the global parameter range.  Closed paths have period 1."""

    surface: object
    pieces: list
    closed: bool

    @cached_property
    def arrays(self):
        order = sorted(range(len(self.pieces)), key=lambda k: self.pieces[k][0])
        coords = np.array([[float(c) for c in (*self.pieces[k][1], *self.pieces[k][2])] for k in order],
                          dtype=np.float64).reshape(-1, 4)
        tris = np.array([self.pieces[k][0] for k in order], dtype=np.int64)
        return coords, tris, order


def saddle_path(surface, sc):
    """Trace a saddle connection from its start corner."""
    tr = trace_from_corner(surface, sc.start_corner, sc.holonomy, t_max=FieldScalar(1))
    if tr.end_vertex is None or tr.end_point != sc.holonomy:
        raise ValueError("traced segment does not end at a cone point at its holonomy")
    return Path(surface, tr.pieces, closed=False)


_GRID = [(Q(a), Q(b)) for b in ("1/2", "1/3", "2/3", "2/5") for a in ("1/3", "1/2", "1/5", "2/7", "3/11")]


def _interior_point(dec, cyl, with_height=False):
    """A point strictly inside both the cylinder and one triangle, with its triangle
    (and its height as a fraction of the cylinder height if asked)."""
    S = dec.surface
    for a, b in _GRID:
        d_rot = Vec(cyl.circ * a, cyl.height * b)
        corner = sweep(dec.rotated, cyl.crossing_corner, EAST, d_rot, ccw=True)
        d = _from_rotated(dec, d_rot)
        tr = trace_from_corner(S, corner, d, t_max=FieldScalar(1))
        if tr.end_vertex is not None:
            continue
        tri, _, z, _, _ = tr.pieces[-1]
        pts = S.triangle_points(tri)
        if all(cross(pts[(k + 1) % 3] - pts[k], z - pts[k]).sign() > 0 for k in range(3)):
            return (tri, z, b) if with_height else (tri, z)
    raise AssertionError("no interior point found in the cylinder")


def core_path(dec, i):
    """Closed core curve of cylinder i, traced in the original surface from a point
    strictly inside the cylinder."""
    cyl = dec.cylinders[i]
    S = dec.surface
    tri, z = _interior_point(dec, cyl)
    D = _from_rotated(dec, Vec(cyl.circ, FieldScalar(0)))
    tr = trace_from_point(S, tri, z, D, t_max=FieldScalar(1))
    last = tr.pieces[-1]
    if last[0] != tri or last[2] != z:
        raise AssertionError("core curve did not close up")
    return Path(S, tr.pieces, closed=True)


def _from_rotated(dec, v):
    p, q = dec.direction.x, dec.direction.y
    n2 = dec.scale2
    return Vec((p * v.x - q * v.y) / n2, (q * v.x + p * v.y) / n2)


def _exact_crossing(P, R):
    """Global parameters (s, t) where pieces P and R meet, or None; raises on overlap."""
    _, p0, p1, a0, a1 = P
    _, q0, q1, b0, b1 = R
    r = p1 - p0
    s = q1 - q0
    den = cross(r, s)
    qp = q0 - p0
    if den.sign() == 0:
        if cross(qp, r).sign() != 0:
            return None
        # collinear: overlap of positive length is a shared segment
        rr = dot(r, r)
        t0 = dot(qp, r) / rr
        t1 = dot(q1 - p0, r) / rr
        lo, hi = (t0, t1) if t0 <= t1 else (t1, t0)
        lo = max(lo, FieldScalar(0))
        hi = min(hi, FieldScalar(1))
        if lo < hi:
            raise ParallelOverlap("paths share a segment")
        if lo == hi:
            a = lo
            b = dot(p0 + r.scale(a) - q0, s) / dot(s, s)
            return a0 + (a1 - a0) * a, b0 + (b1 - b0) * b
        return None
    a = cross(qp, s) / den
    b = cross(qp, r) / den
    if a.sign() < 0 or b.sign() < 0 or a > 1 or b > 1:
        return None
    return a0 + (a1 - a0) * a, b0 + (b1 - b0) * b


def _normalize(t, closed):
    if closed and t == 1:
        return FieldScalar(0)
    return t


def geometric_intersection(p1, p2, tol=FLOAT_TOL):
    """Number of transversal crossing points of two traced paths, excluding cone points."""
    A, ta, oa = p1.arrays
    B, tb, ob = p2.arrays
    robust, amb = classify_pairs(A, ta, B, tb, tol)
    points = set()
    for i, j in amb:
        P = p1.pieces[oa[i]]
        R = p2.pieces[ob[j]]
        hit = _exact_crossing(P, R)
        if hit is None:
            continue
        s, t = _normalize(hit[0], p1.closed), _normalize(hit[1], p2.closed)
        if (not p1.closed and (s.sign() == 0 or s == 1)) or (not p2.closed and (t.sign() == 0 or t == 1)):
            continue
        points.add((s, t))
    return robust + len(points)


# -- homological pairing ---------------------------------------------------------------

def _anchor_offsets(surface, classes):
    """Class position of the start of each label relative to its triangle's first vertex."""
    off = [None] * surface.n_labels
    zero = tuple(0 for _ in classes[0])
    for tri in surface.triangles:
        a, b, c = tri
        off[a] = zero
        off[b] = classes[a]
        off[c] = tuple(x + y for x, y in zip(classes[a], classes[b]))
    return off


def loop_class(surface, crossed):
    """Relative class of a closed loop given by the labels it exits through, in order."""
    hd = homology_data(surface)
    cls = hd.classes
    off = _anchor_offsets(surface, cls)
    total = [0] * hd.h
    for e in crossed:
        f = surface.glue[e]
        for k in range(hd.h):
            total[k] += off[e][k] + cls[e][k] - off[f][k]
    return tuple(total)


def pair_with_loop(surface, cls, crossed):
    """Intersection number of a relative class with a closed loop in the complement of the
    cone points, counted on the basis-edge chain representative of the class."""
    hd = homology_data(surface)
    index = {b: k for k, b in enumerate(hd.basis)}
    total = 0
    for e in crossed:
        if e in index:
            total -= cls[index[e]]
        else:
            f = surface.glue[e]
            if f in index:
                total += cls[index[f]]
    return total


def boundary(surface, cls):
    """Boundary of a relative class as a vector indexed by cone point."""
    hd = homology_data(surface)
    out = [0] * len(surface.cone_points)
    for k, b in enumerate(hd.basis):
        if cls[k]:
            out[surface.vertex_of[surface.glue[b]]] += cls[k]
            out[surface.vertex_of[b]] -= cls[k]
    return tuple(out)


def is_absolute(surface, cls):
    return not any(boundary(surface, cls))


class _PairingData:
    def __init__(self, surface):
        hd = homology_data(surface)
        self.loops = hd.dual_basis_loops()
        self.loop_classes = [loop_class(surface, lp) for lp in self.loops]


_PAIRING = {}


def _pairing(surface):
    key = id(surface)
    if key not in _PAIRING or _PAIRING[key][0] is not surface:
        _PAIRING[key] = (surface, _PairingData(surface))
    return _PAIRING[key][1]


def algebraic_intersection(c1, c2, surface):
    """Intersection pairing of two absolute classes given in the relative basis."""
    if not (is_absolute(surface, c1) and is_absolute(surface, c2)):
        raise ValueError("algebraic intersection needs absolute classes")
    pd = _pairing(surface)
    cols = pd.loop_classes
    A = [[cols[k][r] for k in range(len(cols))] for r in range(len(c2))]
    y = solve(A, list(c2))
    if y is None:
        raise ValueError("class is not represented by loops")
    total = Q(0)
    for k, yk in enumerate(y):
        if yk:
            total += yk * pair_with_loop(surface, c1, pd.loops[k])
    if total.denominator != 1:
        raise AssertionError("non-integral intersection number")
    return int(total)


def intersection_matrix(surface, classes):
    return [[algebraic_intersection(a, b, surface) for b in classes] for a in classes]


# -- the cylinder atlas -------------------------------------------------------------

@dataclass(frozen=True)
class Traversal:
    cylinder: int
    bottom: FieldScalar
    top: FieldScalar
    sign: int


def _mod(x, c):
    return x - c * (x / c).floor()


def atlas_walk(dec, sc):
    """Cylinder crossings of a saddle connection, in order, from the decomposition data.

    Positions are horizontal coordinates in each cylinder's frame: the bottom boundary
    starts at 0 and the top boundary at the crossing vector's x."""
    w = dec.to_rotated(sc.holonomy)
    if w.y.sign() == 0:
        return []
    sign = 1
    start = sc.start_corner
    if w.y.sign() < 0:
        w = -w
        sign = -1
        start = sc.end_corner
    rot = dec.rotated
    s0 = dec.sigma_of_corner[sweep(rot, start, w, EAST, ccw=False)]
    k = dec.above[s0]
    cyl = dec.cylinders[k]
    X = cyl.bottom_offsets[cyl.bottom.index(s0)]
    rem = w.y
    out = []
    slope = w.x / w.y
    while True:
        cyl = dec.cylinders[k]
        h = cyl.height
        top = X + slope * h
        out.append(Traversal(k, X, top, sign))
        rem = rem - h
        t0 = cyl.top_offsets[0]
        xr = _mod(top - t0, cyl.circ)
        rel = [o - t0 for o in cyl.top_offsets]
        if rem.sign() == 0:
            if xr not in rel:
                raise ValueError("segment does not end at a cone point")
            return out
        if rem.sign() < 0:
            raise ValueError("segment ends inside a cylinder")
        j = max(idx for idx, o in enumerate(rel) if o <= xr)
        if rel[j] == xr:
            raise ValueError("segment passes through a cone point")
        s = cyl.top[j]
        k = dec.above[s]
        nxt = dec.cylinders[k]
        X = nxt.bottom_offsets[nxt.bottom.index(s)] + (xr - rel[j])


def signed_counts(dec, sc):
    """Signed number of traversals of each cylinder."""
    out = [0] * len(dec.cylinders)
    for t in atlas_walk(dec, sc):
        out[t.cylinder] += t.sign
    return out


def eq31_intersection(sc, dec):
    """Per-cylinder crossing numbers as transverse displacement over height.

    The displacement of each traversal is the full height, so the quotient is exact; its
    integrality is asserted."""
    w = dec.to_rotated(sc.holonomy)
    if w.y.sign() == 0:
        raise ParallelDirection("segment is parallel to the decomposition direction")
    disp = [FieldScalar(0)] * len(dec.cylinders)
    for t in atlas_walk(dec, sc):
        cyl = dec.cylinders[t.cylinder]
        bottom = Vec(t.bottom, FieldScalar(0))
        top = Vec(t.top, cyl.height)
        # transverse displacement = length * sin(angle), i.e. the cross product with the unit direction
        disp[t.cylinder] = disp[t.cylinder] + cross(EAST, top - bottom)
    out = []
    for d, cyl in zip(disp, dec.cylinders):
        q = d / cyl.height
        if not q.is_integer():
            raise AssertionError(f"non-integral crossing number {q}")
        out.append(abs(int(q)))
    return out


def core_crossings(dec, sc):
    """Oracle: crossing count of the traced segment with each traced core curve."""
    path = saddle_path(dec.surface, sc)
    return [geometric_intersection(path, core_path(dec, i)) for i in range(len(dec.cylinders))]


# -- twist numbers --------------------------------------------------------------------

def first_traversal(dec, i, sc):
    for t in atlas_walk(dec, sc):
        if t.cylinder == i:
            return t
    raise NotTransversal(f"segment does not cross cylinder {i}")


def dehn_twist(dec, i, traversal, times=1):
    """The traversal after applying ``times`` right Dehn twists along cylinder i."""
    c = dec.cylinders[i].circ
    return Traversal(traversal.cylinder, traversal.bottom, traversal.top + c * times, traversal.sign)


def twist_of_traversals(circ, t1, t2):
    """Signed twist units separating two crossings of a cylinder, leftmost lifts."""
    return (((t2.top - t1.top) / circ).floor()) - (((t2.bottom - t1.bottom) / circ).floor())


def twist(dec, i, D1, D2):
    """Twist of D2 relative to D1 around the core of cylinder i."""
    t1 = first_traversal(dec, i, D1)
    t2 = first_traversal(dec, i, D2)
    return twist_of_traversals(dec.cylinders[i].circ, t1, t2)


# -- relation transfer --------------------------------------------------------------

@dataclass(frozen=True)
class LinearRelation:
    target: int
    coefficients: tuple  # ((index, FieldScalar), ...)

    def holds(self, conns):
        v = conns[self.target].holonomy
        acc = Vec(FieldScalar(0), FieldScalar(0))
        for j, c in self.coefficients:
            acc = acc + conns[j].holonomy.scale(c)
        return acc == v


def derive_relations(conns):
    """Express every non-pivot holonomy vector in the pivot ones (exact row reduction)."""
    if len(conns) < 2:
        return []
    rows = [[FieldScalar.lift(c.holonomy.x) for c in conns], [FieldScalar.lift(c.holonomy.y) for c in conns]]
    m, piv = rref(rows)
    out = []
    for j in range(len(conns)):
        if j in piv:
            continue
        coeffs = tuple((p, m[r][j]) for r, p in enumerate(piv) if m[r][j])
        rel = LinearRelation(j, coeffs)
        if not rel.holds(conns):
            raise AssertionError("derived relation fails the holonomy identity")
        out.append(rel)
    return out


class DecompositionCache:
    """Decompositions keyed by direction so every census reuses them."""

    def __init__(self, surface):
        self.surface = surface
        self._decs = {}

    def get(self, v):
        if v.x.sign() < 0 or (v.x.sign() == 0 and v.y.sign() < 0):
            v = -v
        key = direction_key(v)
        if key not in self._decs:
            self._decs[key] = direction_periodicity(self.surface, v)
        return self._decs[key]


def _sigma_of(dec, sc):
    w = dec.to_rotated(sc.holonomy)
    if w.y.sign() != 0:
        raise ValueError("connection is not in the decomposition direction")
    corner = sc.start_corner if w.x.sign() > 0 else sc.end_corner
    return dec.sigma_of_corner[corner]


def signed_intersection(w, w1, cache):
    """Height-weighted signed crossings of w through the cylinders in the direction of w1,
    normalized by the height of the cylinder above w1."""
    dec = cache.get(w1.holonomy)
    ref = dec.cylinders[dec.above[_sigma_of(dec, w1)]].height
    total = FieldScalar(0)
    for t in atlas_walk(dec, w):
        total = total + dec.cylinders[t.cylinder].height * t.sign
    return total / ref


def theorem45_residuals(relation, conns, test_objects, cache, coefficients=None):
    """Residual i(w_target, T) - sum c_j i(w_j, T) for each test object T."""
    coeffs = relation.coefficients if coefficients is None else coefficients
    out = []
    for T in test_objects:
        r = signed_intersection(conns[relation.target], T, cache)
        for j, c in coeffs:
            r = r - c * signed_intersection(conns[j], T, cache)
        out.append(r)
    return out


def verify_theorem45(relation, conns, test_objects, cache):
    """Residuals per test object; all are exactly zero when the transfer holds."""
    return theorem45_residuals(relation, conns, test_objects, cache)


def theorem46_residuals(relation, conns, dec, cylinders=None):
    """Residuals of the transferred identity against unsigned core-curve crossing counts."""
    idx = range(len(dec.cylinders)) if cylinders is None else cylinders
    counts = {}

    def count(j):
        if j not in counts:
            n = [0] * len(dec.cylinders)
            for t in atlas_walk(dec, conns[j]):
                n[t.cylinder] += 1
            counts[j] = n
        return counts[j]

    out = []
    for b in idx:
        r = FieldScalar(count(relation.target)[b])
        for j, c in relation.coefficients:
            r = r - c * count(j)[b]
        out.append(r)
    return out


def verify_theorem46(relation, conns, dec, cylinders=None, slack=4):
    res = theorem46_residuals(relation, conns, dec, cylinders)
    worst = max((abs(r) for r in res), default=FieldScalar(0))
    return res, worst, worst <= slack

