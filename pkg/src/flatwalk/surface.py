"""Glued-triangle translation surfaces: construction, invariants, linear action, flips."""
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .errors import (
    ClosureViolation,
    DegenerateTriangle,
    GluingMismatch,
    NonPositiveDeterminant,
    NonTermination,
)
from .field import FieldScalar, Vec, cross, field_of, mat_mul, sgn, to_field

FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class ConePoint:
    id: int
    corners: tuple  # outgoing labels, counter-clockwise
    turns: int  # cone angle / 2pi

    @property
    def order(self):
        return self.turns - 1

    @property
    def angle_over_pi(self):
        return 2 * self.turns


@dataclass(frozen=True)
class StratumSignature:
    genus: int
    zero_orders: tuple
    rel_homology_dim: int

    @property
    def k(self):
        return len(self.zero_orders)


class TranslationSurface:
    """Triangles are ccw label triples; label l is a directed edge with holonomy hol[l].

    ``glue[l]`` is the oppositely directed partner of ``l``.  If ``frame`` is set, the
    metric surface is frame * (exact base) and the surface is float-tainted.
    """

    def __init__(self, triangles, hol, glue, frame=None):
        self.triangles = tuple(tuple(t) for t in triangles)
        self.hol = tuple(hol)
        self.glue = tuple(glue)
        self.frame = frame

    # -- combinatorics ----------------------------------------------------
    @property
    def n_labels(self):
        return len(self.hol)

    @property
    def tainted(self):
        return self.frame is not None

    @cached_property
    def _slots(self):
        n = self.n_labels
        tri_of = [0] * n
        pos_of = [0] * n
        nxt = [0] * n
        prv = [0] * n
        for t, (a, b, c) in enumerate(self.triangles):
            for p, (x, y, z) in enumerate(((a, b, c), (b, c, a), (c, a, b))):
                tri_of[x] = t
                pos_of[x] = p
                nxt[x] = y
                prv[x] = z
        return tri_of, pos_of, nxt, prv

    @property
    def tri_of(self):
        return self._slots[0]

    @property
    def pos_of(self):
        return self._slots[1]

    @property
    def nxt(self):
        return self._slots[2]

    @property
    def prv(self):
        return self._slots[3]

    def ccw_corner(self, l):
        """Next corner counter-clockwise around the start vertex of l."""
        return self.glue[self.prv[l]]

    def cw_corner(self, l):
        return self.nxt[self.glue[l]]

    def corner_rays(self, l):
        """(u, w): the corner at start(l) spans the open sweep from u to w counter-clockwise."""
        return self.hol[l], -self.hol[self.prv[l]]

    @cached_property
    def cone_points(self):
        seen = {}
        points = []
        for l in range(self.n_labels):
            if l in seen:
                continue
            corners = []
            c = l
            while c not in seen:
                seen[c] = len(points)
                corners.append(c)
                c = self.ccw_corner(c)
            turns = 0
            for c in corners:
                u, w = self.corner_rays(c)
                if sgn(u.y) < 0 and sgn(w.y) >= 0:
                    turns += 1
            points.append(ConePoint(len(points), tuple(corners), turns))
        return tuple(points)

    @cached_property
    def vertex_of(self):
        """Cone point id at the start of each label."""
        out = [0] * self.n_labels
        for p in self.cone_points:
            for c in p.corners:
                out[c] = p.id
        return tuple(out)

    def edge_reps(self):
        """One label per undirected edge (the smaller of each glued pair)."""
        return [l for l in range(self.n_labels) if l < self.glue[l]]

    @property
    def discriminant(self):
        return field_of(c for v in self.hol for c in (v.x, v.y))

    # -- geometry ---------------------------------------------------------
    def vec(self, l):
        """Metric holonomy: exact when untainted, float pair otherwise."""
        v = self.hol[l]
        if self.frame is None:
            return v
        (a, b), (c, d) = self.frame
        x, y = float(v.x), float(v.y)
        return Vec(a * x + b * y, c * x + d * y)

    @cached_property
    def base_area(self):
        total = FieldScalar(0)
        for a, b, _ in self.triangles:
            total = total + cross(self.hol[a], self.hol[b]) / 2
        return total

    @property
    def area(self):
        if self.frame is None:
            return self.base_area
        (a, b), (c, d) = self.frame
        return float(self.base_area) * (a * d - b * c)

    def triangle_points(self, t):
        """Vertices of triangle t with its first label starting at the origin."""
        a, b, _ = self.triangles[t]
        va, vb = self.vec(a), self.vec(b)
        zero = Vec(va.x * 0, va.y * 0)
        return zero, va, va + vb

    def __repr__(self):
        s = stratum(self)
        tag = " tainted" if self.tainted else ""
        return f"<TranslationSurface F={len(self.triangles)} g={s.genus} orders={s.zero_orders}{tag}>"


def build_surface(triangles, edge_holonomies, gluing):
    """Validate and assemble a surface.

    ``edge_holonomies`` maps label -> (x, y) and ``gluing`` maps label -> partner (each
    pair listed once or twice).  Labels must be 0..n-1.
    """
    triangles = [tuple(int(x) for x in t) for t in triangles]
    labels = sorted(x for t in triangles for x in t)
    n = len(labels)
    if labels != list(range(n)):
        raise ValueError("triangle labels must be exactly 0..n-1, each used once")
    if isinstance(edge_holonomies, dict):
        items = [edge_holonomies[l] for l in range(n)]
    else:
        items = list(edge_holonomies)
    if len(items) != n:
        raise ValueError("one holonomy per label required")
    hol = []
    for x, y in items:
        fx, fy = to_field(x), to_field(y)
        if fx is None or fy is None:
            raise TypeError("holonomy coordinates must be exact (int, rational or FieldScalar)")
        hol.append(Vec(fx, fy))
    field_of(c for v in hol for c in v)
    glue = [-1] * n
    pairs = gluing.items() if isinstance(gluing, dict) else gluing
    for e, f in pairs:
        e, f = int(e), int(f)
        for x, y in ((e, f), (f, e)):
            if glue[x] not in (-1, y):
                raise GluingMismatch(f"label {x} glued twice")
            glue[x] = y
    if any(g < 0 for g in glue) or any(glue[l] == l for l in range(n)):
        raise GluingMismatch("gluing must pair every label with a different label")
    for t, (a, b, c) in enumerate(triangles):
        s = hol[a] + hol[b] + hol[c]
        if not s.is_zero():
            raise ClosureViolation(f"triangle {t}: holonomies sum to {s}, not 0")
        if cross(hol[a], hol[b]).sign() <= 0:
            raise DegenerateTriangle(f"triangle {t} has non-positive area")
    for l in range(n):
        if not (hol[glue[l]] + hol[l]).is_zero():
            raise GluingMismatch(f"labels {l} and {glue[l]} are glued but holonomies are not opposite")
    surf = TranslationSurface(triangles, hol, glue)
    _ = surf.cone_points
    return surf


def stratum(surface):
    V = len(surface.cone_points)
    E = surface.n_labels // 2
    Fc = len(surface.triangles)
    chi = V - E + Fc
    genus = (2 - chi) // 2
    orders = tuple(sorted((p.order for p in surface.cone_points), reverse=True))
    return StratumSignature(genus, orders, 2 * genus + V - 1)


def gauss_bonnet_holds(surface):
    s = stratum(surface)
    return sum(s.zero_orders) == 2 * s.genus - 2


# -- linear action ------------------------------------------------------------

def _exact_matrix(A, d):
    out = []
    for row in A:
        r = []
        for x in row:
            if isinstance(x, float) and x.is_integer():
                x = int(x)
            fx = to_field(x)
            if fx is None or (fx.d and d and fx.d != d):
                return None
            r.append(fx)
        out.append(tuple(r))
    return tuple(out)


def apply_matrix(A, surface):
    """Replace every holonomy v by A v.  Non-field entries give a float-tainted surface."""
    (a, b), (c, d) = A
    det = a * d - b * c
    if sgn(det) <= 0:
        raise NonPositiveDeterminant(f"det A = {det}")
    exact = _exact_matrix(A, surface.discriminant)
    if exact is not None and surface.frame is None:
        (a, b), (c, d) = exact
        hol = [Vec(a * v.x + b * v.y, c * v.x + d * v.y) for v in surface.hol]
        return TranslationSurface(surface.triangles, hol, surface.glue)
    fl = tuple(tuple(float(x) for x in row) for row in A)
    frame = fl if surface.frame is None else mat_mul(fl, surface.frame)
    return TranslationSurface(surface.triangles, surface.hol, surface.glue, frame)


def diag_flow_matrix(t):
    return ((math.exp(t), 0.0), (0.0, math.exp(-t)))


def geodesic_flow(t, surface):
    if t == 0:
        return delaunay_retriangulate(surface)
    return delaunay_retriangulate(apply_matrix(diag_flow_matrix(t), surface))


# -- Delaunay -----------------------------------------------------------------

def _incircle(p0, p1, p2, q):
    rows = []
    for p in (p0, p1, p2):
        dx, dy = p.x - q.x, p.y - q.y
        rows.append((dx, dy, dx * dx + dy * dy))
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def edge_incircle(surface, l, vec=None):
    """Incircle determinant for the quadrilateral across label l (positive = not Delaunay)."""
    vec = vec or surface.vec
    nxt = surface.nxt
    a = nxt[l]
    m = surface.glue[l]
    c = nxt[m]
    p0 = vec(l) - vec(l)
    p1 = vec(l)
    p2 = p1 + vec(a)
    q = vec(c)
    return _incircle(p0, p1, p2, q)


def _incircle_sign(surface, l, vec):
    val = edge_incircle(surface, l, vec)
    if isinstance(val, FieldScalar):
        return val.sign()
    scale = max(abs(float(vec(x).x)) + abs(float(vec(x).y)) for x in (l, surface.nxt[l], surface.nxt[surface.glue[l]]))
    return sgn(val, FLOAT_TOL * scale ** 4)


def is_delaunay(surface):
    return all(_incircle_sign(surface, l, surface.vec) <= 0 for l in range(surface.n_labels))


class _Mutable:
    def __init__(self, s):
        self.triangles = [list(t) for t in s.triangles]
        self.hol = list(s.hol)
        self.glue = s.glue
        self.frame = s.frame
        n = len(self.hol)
        self.tri_of = [0] * n
        self.pos_of = [0] * n
        for t, tri in enumerate(self.triangles):
            for p, x in enumerate(tri):
                self.tri_of[x] = t
                self.pos_of[x] = p

    def nxt(self, l):
        t, p = self.tri_of[l], self.pos_of[l]
        return self.triangles[t][(p + 1) % 3]

    def vec(self, l):
        v = self.hol[l]
        if self.frame is None:
            return v
        (a, b), (c, d) = self.frame
        x, y = float(v.x), float(v.y)
        return Vec(a * x + b * y, c * x + d * y)

    def incircle_sign(self, l):
        a = self.nxt(l)
        m = self.glue[l]
        c = self.nxt(m)
        p1 = self.vec(l)
        p0 = p1 - p1
        val = _incircle(p0, p1, p1 + self.vec(a), self.vec(c))
        if isinstance(val, FieldScalar):
            return val.sign()
        scale = max(abs(float(self.vec(x).x)) + abs(float(self.vec(x).y)) for x in (l, a, c))
        return sgn(val, FLOAT_TOL * scale ** 4)

    def flip(self, l):
        m = self.glue[l]
        a = self.nxt(l)
        b = self.nxt(a)
        c = self.nxt(m)
        e = self.nxt(c)
        t1, t2 = self.tri_of[l], self.tri_of[m]
        new = self.hol[b] + self.hol[c]
        self.hol[l] = new
        self.hol[m] = -new
        self.triangles[t1] = [a, l, e]
        self.triangles[t2] = [b, c, m]
        for t in (t1, t2):
            for p, x in enumerate(self.triangles[t]):
                self.tri_of[x] = t
                self.pos_of[x] = p
        return (a, b, c, e)

    def freeze(self):
        return TranslationSurface(self.triangles, self.hol, self.glue, self.frame)


def flip_edge(surface, l):
    """Flip the edge carrying label l (the quadrilateral must be strictly convex)."""
    m = _Mutable(surface)
    m.flip(l)
    return m.freeze()


def delaunay_retriangulate(surface, budget=None, return_flips=False):
    """Flip non-Delaunay edges until the empty-circumcircle condition holds everywhere."""
    m = _Mutable(surface)
    n = len(m.hol)
    budget = budget if budget is not None else 2000 * n
    queue = deque(l for l in range(n) if l < m.glue[l])
    queued = set(queue)
    flips = 0
    while queue:
        l = queue.popleft()
        queued.discard(l)
        if m.incircle_sign(l) > 0:
            flips += 1
            if flips > budget:
                raise NonTermination(f"flip budget {budget} exceeded")
            for x in m.flip(l):
                r = min(x, m.glue[x])
                if r not in queued:
                    queued.add(r)
                    queue.append(r)
    out = m.freeze() if flips else surface
    return (out, flips) if return_flips else out


# -- isomorphism --------------------------------------------------------------

def _same(u, v, tol):
    if tol is None:
        return u == v
    return abs(float(u.x) - float(v.x)) <= tol and abs(float(u.y) - float(v.y)) <= tol


def _cell_structure(surface):
    """Boundary successor of each essential label in the Delaunay cell complex."""
    vec = surface.vec
    essential = [_incircle_sign(surface, l, vec) != 0 for l in range(surface.n_labels)]
    nxt, glue = surface.nxt, surface.glue
    succ = {}
    for l in range(surface.n_labels):
        if not essential[l]:
            continue
        n = nxt[l]
        steps = 0
        while not essential[n]:
            n = nxt[glue[n]]
            steps += 1
            if steps > 4 * surface.n_labels:
                raise NonTermination("cell boundary walk did not close")
        succ[l] = n
    return succ


def find_isomorphism(s1, s2):
    """Label map between the Delaunay cell complexes of two surfaces, or None."""
    d1 = delaunay_retriangulate(s1)
    d2 = delaunay_retriangulate(s2)
    tol = None
    if d1.tainted or d2.tainted:
        scale = max(max(abs(float(c)) for c in d.vec(l)) for d in (d1, d2) for l in range(d.n_labels))
        tol = 1e-7 * max(scale, 1.0)
    a1, a2 = d1.area, d2.area
    if tol is None:
        if a1 != a2:
            return None
    elif abs(float(a1) - float(a2)) > 1e-7 * max(abs(float(a1)), 1.0):
        return None
    c1, c2 = _cell_structure(d1), _cell_structure(d2)
    if len(c1) != len(c2):
        return None
    l0 = min(c1)
    v0 = d1.vec(l0)
    for cand in sorted(c2):
        if not _same(v0, d2.vec(cand), tol):
            continue
        mapping = {l0: cand}
        used = {cand}
        queue = [l0]
        ok = True
        while queue and ok:
            x = queue.pop()
            y = mapping[x]
            if not _same(d1.vec(x), d2.vec(y), tol):
                ok = False
                break
            for fx, fy in ((c1[x], c2[y]), (d1.glue[x], d2.glue[y])):
                if fx not in c1 or fy not in c2:
                    ok = False
                    break
                if fx in mapping:
                    if mapping[fx] != fy:
                        ok = False
                        break
                elif fy in used:
                    ok = False
                    break
                else:
                    mapping[fx] = fy
                    used.add(fy)
                    queue.append(fx)
        if ok and len(mapping) == len(c1):
            return mapping
    return None


def is_isomorphic(s1, s2):
    return find_isomorphism(s1, s2) is not None


def same_triangulation(s1, s2):
    """Exact equality of the stored data (no relabeling)."""
    return (
        s1.triangles == s2.triangles
        and s1.glue == s2.glue
        and all(u == v for u, v in zip(s1.hol, s2.hol))
        and s1.frame == s2.frame
    )
