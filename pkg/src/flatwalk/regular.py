"""Short curves, the large/small cylinder split, regular triangulations and G(X).

Extremal length is replaced by a flat estimate: flat length squared over area, bracketed
above by 1/modulus for cylinder curves.  Framed (float-tainted) surfaces are handled by
decomposing the exact base and measuring through the frame.
"""
import math
from dataclasses import dataclass, field, replace
from functools import cmp_to_key

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

from .cylinders import direction_key, direction_periodicity
from .errors import NotPeriodic, NotTransversal, SeedNotExtendable, TwistPreconditionFailed
from .field import FieldScalar, Q, Vec, cross
from .intersect import (
    Path,
    _from_rotated,
    _interior_point,
    algebraic_intersection,
    eq31_intersection,
    geometric_intersection,
    is_absolute,
    saddle_path,
    twist,
)
from .saddle import SaddleConnection, enumerate_saddle_connections
from .surface import TranslationSurface, stratum
from .unfold import trace_from_point

EPS0 = 0.04
C_LEN = 4.0
C_CROSS = 8
C_44 = 8.0

LARGE = "large_cylinder"
SMALL = "small"
NOT_SHORT = "not_short"


# -- frames ---------------------------------------------------------------------------

def base_surface(surface):
    """The exact surface underneath a framed one (the surface itself when untainted)."""
    if surface.frame is None:
        return surface
    return TranslationSurface(surface.triangles, surface.hol, surface.glue)


def _frame(surface):
    return surface.frame or ((1.0, 0.0), (0.0, 1.0))


def _apply(frame, v):
    (a, b), (c, d) = frame
    x, y = float(v.x), float(v.y)
    return a * x + b * y, c * x + d * y


def _det(frame):
    (a, b), (c, d) = frame
    return a * d - b * c


def _normalized(v):
    return -v if v.x.sign() < 0 or (v.x.sign() == 0 and v.y.sign() < 0) else v


def _framed_conn(surface, conn):
    return replace(conn, frame=surface.frame) if surface.frame is not None else conn


def _unoriented_key(conn):
    a = (conn.start_corner, conn.holonomy)
    b = (conn.end_corner, -conn.holonomy)
    return min(a, b, key=lambda k: (k[0], float(k[1].x), float(k[1].y)))


# -- estimates and short curves -----------------------------------------------------------

@dataclass(frozen=True)
class CylinderCurve:
    """Core curve of one cylinder, measured in the (possibly framed) metric."""

    direction: Vec
    index: int
    circumference: float
    area: float
    modulus: float
    estimate: float
    core_class: tuple
    decomposition: object = field(compare=False, repr=False, hash=False)

    @property
    def cylinder(self):
        return self.decomposition.cylinders[self.index]

    @property
    def bracket(self):
        return (self.estimate, 1.0 / self.modulus)

    def boundary_connections(self, surface):
        cyl = self.cylinder
        conns = self.decomposition.connections
        return [_framed_conn(surface, conns[s]) for s in (*cyl.bottom, *cyl.top)]


@dataclass(frozen=True)
class LoopCurve:
    """A closed saddle loop in a direction without a cylinder decomposition."""

    connection: SaddleConnection
    estimate: float

    @property
    def bracket(self):
        return (self.estimate, math.inf)


@dataclass(frozen=True)
class ShortCurveReport:
    curve: object
    ext_estimate: float
    bracket: tuple
    classification: str

    @property
    def cylinder(self):
        return self.curve if isinstance(self.curve, CylinderCurve) else None


def ext_estimate(surface, target):
    """Flat extremal-length estimate length^2 / area.

    ``target`` may be a flat length, a saddle connection or a measured cylinder curve."""
    if isinstance(target, (CylinderCurve, LoopCurve)):
        return target.estimate
    if isinstance(target, SaddleConnection):
        length2 = float(replace(target, frame=surface.frame).length2)
    else:
        length2 = float(target) ** 2
    return length2 / float(surface.area)


def ext_bracket(surface, target):
    """(lower, upper) flat bracket: length^2/area and 1/modulus (infinite if no cylinder)."""
    if isinstance(target, (CylinderCurve, LoopCurve)):
        return target.bracket
    return (ext_estimate(surface, target), math.inf)


def measure_cylinders(surface, direction, dec=None):
    """CylinderCurve for every cylinder of the decomposition in a base direction."""
    base = base_surface(surface)
    if dec is None:
        dec = direction_periodicity(base, direction)
    frame = _frame(surface)
    det = _det(frame)
    total = float(surface.area)
    v = dec.direction
    out = []
    for i, cyl in enumerate(dec.cylinders):
        core = v.scale(cyl.circ / dec.scale2)
        x, y = _apply(frame, core)
        circ2 = x * x + y * y
        area = float(cyl.area) * det
        out.append(CylinderCurve(_normalized(v), i, math.sqrt(circ2), area, area / circ2,
                                 circ2 / total, cyl.core_class, dec))
    return out


def classify_curve(modulus, estimate, eps0, tau):
    """Threshold rule: short iff estimate <= eps0; large iff also a cylinder of
    modulus >= e^(-2 tau)."""
    if estimate > eps0:
        return NOT_SHORT
    if modulus is not None and modulus >= math.exp(-2 * tau):
        return LARGE
    return SMALL


def _scan_connections(surface, cutoff):
    return enumerate_saddle_connections(surface, cutoff)


def classify_short_curves(surface, eps0=EPS0, tau=0.0, cutoff=None):
    """Reports for cylinder curves in every saddle direction up to ``cutoff`` and for
    short saddle loops in directions that do not decompose, sorted by estimate."""
    area = float(surface.area)
    if cutoff is None:
        cutoff = math.sqrt(eps0 * area)
    cutoff *= 1 + 1e-12
    conns = _scan_connections(surface, cutoff)
    dirs = {}
    for c in conns:
        v = _normalized(c.holonomy)
        dirs.setdefault(direction_key(v), v)
    reports = []
    periodic = set()
    for key, v in dirs.items():
        try:
            curves = measure_cylinders(surface, v)
        except NotPeriodic:
            continue
        periodic.add(key)
        for cc in curves:
            cls = classify_curve(cc.modulus, cc.estimate, eps0, tau)
            reports.append(ShortCurveReport(cc, cc.estimate, cc.bracket, cls))
    # loops in periodic directions lie on cylinder boundaries and are represented by cores
    seen = set()
    for c in conns:
        if c.start_cone != c.end_cone or direction_key(_normalized(c.holonomy)) in periodic:
            continue
        est = ext_estimate(surface, c)
        key = _unoriented_key(c)
        if est > eps0 or key in seen:
            continue
        seen.add(key)
        loop = LoopCurve(c, est)
        reports.append(ShortCurveReport(loop, est, loop.bracket, classify_curve(None, est, eps0, tau)))
    reports.sort(key=lambda r: (r.ext_estimate, r.classification))
    return reports


def short_cylinder_boundaries(surface, eps):
    """Boundary saddle connections (both orientations) of cylinders with estimate <= eps."""
    out = []
    for r in classify_short_curves(surface, eps0=eps):
        if r.classification != NOT_SHORT and r.cylinder is not None:
            for c in r.curve.boundary_connections(surface):
                out.extend((c, c.reversed()))
    return out


def g_function(surface, eps0=EPS0, reports=None):
    """1 + product of 1/sqrt(estimate) over short curves; the empty product is 1."""
    if reports is None:
        reports = classify_short_curves(surface, eps0)
    prod = 1.0
    for r in reports:
        if r.classification != NOT_SHORT:
            prod /= math.sqrt(r.ext_estimate)
    return 1.0 + prod


# -- regular triangulations --------------------------------------------------------------

@dataclass(frozen=True)
class EdgeRecord:
    connection: SaddleConnection
    length: float
    pieces: tuple
    thick_size: float
    ratio: float
    ok: bool


@dataclass
class RegularTriangulation:
    surface: object
    tau: float
    edges: list
    excluded_cylinders: list
    small_cylinders: list
    faces: list
    pieces: list
    piece_diameters: list
    records: list
    arc_crossings: list
    constants: dict
    conditions: dict

    @property
    def ok(self):
        return all(self.conditions.values())

    def edge_pieces(self):
        return {_unoriented_key(r.connection): r.pieces for r in self.records}


def _crosses(surface, p1, p2):
    return geometric_intersection(p1, p2) > 0


def _enters(conn, curves):
    """True if the connection meets the interior of any of the given cylinders."""
    for cc in curves:
        dec = cc.decomposition
        if cross(dec.direction, conn.holonomy).sign() == 0:
            continue
        if eq31_intersection(conn, dec)[cc.index] > 0:
            return True
    return False


def _outgoing_order(base, half_edges):
    """Half-edges grouped by cone point, sorted counter-clockwise."""
    pos = {}
    for p in base.cone_points:
        for k, l in enumerate(p.corners):
            pos[l] = (p.id, k)

    def cmp(h1, h2):
        a, b = pos[h1[1]], pos[h2[1]]
        if a != b:
            return -1 if a < b else 1
        s = cross(h1[2], h2[2]).sign()
        return -s

    order = {}
    for h in sorted(half_edges, key=cmp_to_key(cmp)):
        order.setdefault(pos[h[1]][0], []).append(h)
    return order


def trace_faces(base, edges):
    """Face cycles of the graph formed by the given saddle connections.

    Each cycle is a list of oriented connections with the face on its left."""
    half = []
    for i, c in enumerate(edges):
        half.append((i, c.start_corner, c.holonomy, c))
        r = c.reversed()
        half.append((i, r.start_corner, r.holonomy, r))
    order = _outgoing_order(base, half)
    where = {}
    for v, hs in order.items():
        for k, h in enumerate(hs):
            where[(h[0], h[1], h[2])] = (v, k)
    twin = {}
    for k in range(0, len(half), 2):
        a, b = half[k], half[k + 1]
        twin[(a[0], a[1], a[2])] = b
        twin[(b[0], b[1], b[2])] = a
    done = set()
    faces = []
    for h in half:
        key = (h[0], h[1], h[2])
        if key in done:
            continue
        cycle = []
        cur = h
        while (cur[0], cur[1], cur[2]) not in done:
            ck = (cur[0], cur[1], cur[2])
            done.add(ck)
            cycle.append(cur[3])
            t = twin[ck]
            v, k = where[(t[0], t[1], t[2])]
            cur = order[v][k - 1]
        faces.append(cycle)
    return faces


def _is_triangle(face):
    if len(face) != 3:
        return False
    total = face[0].holonomy + face[1].holonomy + face[2].holonomy
    return total.is_zero() and cross(face[0].holonomy, face[1].holonomy).sign() > 0


def _triangle_corner_distances(surface, face):
    frame = _frame(surface)
    v1 = _apply(frame, face[0].holonomy)
    v2 = _apply(frame, face[1].holonomy)
    pts = [(0.0, 0.0), v1, (v1[0] + v2[0], v1[1] + v2[1])]
    cx = sum(p[0] for p in pts) / 3
    cy = sum(p[1] for p in pts) / 3
    return [(c.start_cone, math.hypot(p[0] - cx, p[1] - cy)) for c, p in zip(face, pts)]


def _piece_diameters(surface, faces, pieces, n_cones):
    """Flat diameter of each piece: graph distances between cone points and face
    centroids, with centroid-to-corner lengths as edge weights."""
    out = []
    for piece in pieces:
        n = n_cones + len(piece)
        best = {}
        for j, f in enumerate(piece):
            for cone, d in _triangle_corner_distances(surface, faces[f]):
                key = (n_cones + j, cone)
                best[key] = min(best.get(key, math.inf), d)
        rows = [k[0] for k in best] + [k[1] for k in best]
        cols = [k[1] for k in best] + [k[0] for k in best]
        vals = list(best.values()) * 2
        g = coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        dist = shortest_path(g, method="D", directed=False)
        used = sorted({k[1] for k in best}) + list(range(n_cones, n))
        sub = dist[np.ix_(used, used)]
        out.append(float(sub[np.isfinite(sub)].max()))
    return out


def _pieces(faces, tri_faces, cut_keys):
    """Connected components of triangle faces, adjacency blocked by cut edges."""
    by_edge = {}
    for f in tri_faces:
        for c in faces[f]:
            k = _unoriented_key(c)
            if k not in cut_keys:
                by_edge.setdefault(k, []).append(f)
    parent = {f: f for f in tri_faces}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for fs in by_edge.values():
        for a in fs[1:]:
            parent[find(a)] = find(fs[0])
    groups = {}
    for f in tri_faces:
        groups.setdefault(find(f), []).append(f)
    return sorted(groups.values())


def perpendicular_arc(cc, margin=Q("1/100")):
    """Paths (down, up) of the arc crossing the cylinder perpendicular to its core,
    stopping ``margin`` of the height short of each boundary."""
    dec = cc.decomposition
    cyl = cc.cylinder
    tri, z, b = _interior_point(dec, cyl, with_height=True)
    up = _from_rotated(dec, Vec(FieldScalar(0), cyl.height))
    paths = []
    for D, t in ((-up, b - margin), (up, 1 - b - margin)):
        tr = trace_from_point(dec.surface, tri, z, D, t_max=FieldScalar(t))
        paths.append(Path(dec.surface, tr.pieces, closed=False))
    return paths


def arc_crossings(cc, edge_paths):
    arcs = perpendicular_arc(cc)
    return sum(geometric_intersection(a, p) for a in arcs for p in edge_paths)


def _required_edges(base, excluded):
    s = stratum(base)
    V = len(base.cone_points)
    full = 3 * (V + 2 * s.genus - 2)
    removed = sum(len(cc.cylinder.bottom) + len(cc.cylinder.top) for cc in excluded)
    return full - removed, 2 * (V + 2 * s.genus - 2) - removed


def build_regular_triangulation(surface, tau, seeds=None, eps0=EPS0, c_len=C_LEN,
                                c_cross=C_CROSS, max_doublings=6):
    """Greedy shortest-first triangulation of the complement of the large cylinders.

    Seeds and the boundaries of all short cylinders are placed first; then saddle
    connections are added by increasing length when they cross no chosen edge and avoid
    the large-cylinder interiors."""
    base = base_surface(surface)
    reports = classify_short_curves(surface, eps0, tau)
    large = [r.curve for r in reports if r.classification == LARGE]
    small = [r.curve for r in reports if r.classification == SMALL and r.cylinder is not None]
    constants = {"eps0": eps0, "tau": tau, "C_len": c_len, "C_cross": c_cross}
    n_edges, n_faces = _required_edges(base, large)

    if n_faces <= 0:
        # single-cylinder degenerate case: nothing left to triangulate
        return RegularTriangulation(surface, tau, [], large, small, [], [], [], [], [], constants,
                                    {"validity": True, "condition1": True, "condition2": True,
                                     "condition3": True})

    chosen, paths, keys = [], [], set()

    def add(conn, mandatory):
        k = _unoriented_key(conn)
        if k in keys:
            return True
        if _enters(conn, large):
            if mandatory:
                raise SeedNotExtendable("seed edge enters a large cylinder")
            return False
        p = saddle_path(base, conn)
        if any(_crosses(base, p, q) for q in paths):
            if mandatory:
                raise SeedNotExtendable("seed edges are not pairwise disjoint")
            return False
        chosen.append(_framed_conn(surface, conn))
        paths.append(p)
        keys.add(k)
        return True

    for s in seeds or []:
        add(s, True)
    cut = set()
    for cc in large + small:
        for c in cc.boundary_connections(surface):
            add(c, True)
            cut.add(_unoriented_key(c))

    frame = _frame(surface)
    L = max(math.hypot(*_apply(frame, v)) for v in base.hol) * 1.001
    for _ in range(max_doublings + 1):
        if len(chosen) >= n_edges:
            break
        for c in enumerate_saddle_connections(surface, L):
            if len(chosen) >= n_edges:
                break
            add(c, False)
        L *= 2
    if len(chosen) != n_edges:
        raise SeedNotExtendable(f"found {len(chosen)} of {n_edges} edges")

    faces = trace_faces(base, chosen)
    tri_faces = [i for i, f in enumerate(faces) if _is_triangle(f)]
    n_boundary_cycles = sum(1 for i, f in enumerate(faces) if i not in set(tri_faces))
    s = stratum(base)
    V = len(base.cone_points)
    validity = (len(tri_faces) == n_faces and n_boundary_cycles == 2 * len(large)
                and V - len(chosen) + len(tri_faces) == 2 - 2 * s.genus)

    pieces = _pieces(faces, tri_faces, cut)
    diam = _piece_diameters(surface, faces, pieces, V)
    piece_of = {f: j for j, piece in enumerate(pieces) for f in piece}
    touching = {}
    for f in tri_faces:
        for c in faces[f]:
            touching.setdefault(_unoriented_key(c), set()).add(piece_of[f])
    records = []
    for c in chosen:
        ps = tuple(sorted(touching.get(_unoriented_key(c), ())))
        size = min((diam[j] for j in ps), default=math.inf)
        ratio = c.length / size if size > 0 else math.inf
        records.append(EdgeRecord(c, c.length, ps, size, ratio, ratio <= c_len))
    cond1 = not any(_enters(c, large) for c in chosen)
    cond2 = all(r.ok for r in records)
    crossings = [arc_crossings(cc, paths) for cc in small]
    cond3 = all(n <= c_cross for n in crossings)
    if seeds and not all(r.ok for r in records if _unoriented_key(r.connection) in
                         {_unoriented_key(x) for x in seeds}):
        raise SeedNotExtendable("a seed edge is too long for its thick piece")
    return RegularTriangulation(surface, tau, chosen, large, small, faces, pieces, diam, records,
                                crossings, constants,
                                {"validity": validity, "condition1": cond1, "condition2": cond2,
                                 "condition3": cond3})


# -- crossing bound -------------------------------------------------------------------------

@dataclass(frozen=True)
class Lemma44Report:
    rows: list  # (edge, crossings, bound, ratio)
    max_ratio: float
    c44: float

    @property
    def ok(self):
        return all(n <= b for _, n, b, _ in self.rows)


def intersection_number(surface, a, b):
    """Interior crossings of two saddle connections, raised to the algebraic count when
    both are closed loops (their endpoints then meet as well)."""
    base = base_surface(surface)
    if _unoriented_key(a) == _unoriented_key(b):
        n = 0
    else:
        n = geometric_intersection(saddle_path(base, a), saddle_path(base, b))
    if is_absolute(base, a.homology) and is_absolute(base, b.homology):
        n = max(n, abs(algebraic_intersection(a.homology, b.homology, base)))
    return n


def _check_twist(tri, w, bound):
    for cc in tri.small_cylinders:
        dec = cc.decomposition
        ref = None
        for r in tri.records:
            if cross(dec.direction, r.connection.holonomy).sign() != 0:
                try:
                    eq = eq31_intersection(r.connection, dec)[cc.index]
                except NotTransversal:
                    continue
                if eq > 0:
                    ref = r.connection
                    break
        if ref is None or cross(dec.direction, w.holonomy).sign() == 0:
            continue
        try:
            tw = twist(dec, cc.index, ref, w)
        except NotTransversal:
            continue
        if abs(tw) > bound:
            raise TwistPreconditionFailed(f"twist {tw} around cylinder {cc.index} exceeds {bound}")


def lemma44_bound_check(tri, w, c44=C_44, twist_bound=C_CROSS):
    """Check i(w_T, w) <= c44 (length(w)/s + 1) for every edge w_T, where s is the smallest
    thick-piece size met by w_T."""
    _check_twist(tri, w, twist_bound)
    surface = tri.surface
    w = _framed_conn(surface, w)
    rows = []
    worst = 0.0
    for r in tri.records:
        n = intersection_number(surface, r.connection, w)
        bound = c44 * (w.length / r.thick_size + 1)
        ratio = n / (w.length / r.thick_size + 1)
        worst = max(worst, ratio)
        rows.append((r.connection, n, bound, ratio))
    return Lemma44Report(rows, worst, c44)
