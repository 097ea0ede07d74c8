"""Cylinder decompositions in periodic directions, cylinder diagrams, reconstruction
from diagram data, and the census of cylinder invariants over many directions."""
from dataclasses import dataclass, field as dc_field
from itertools import permutations

from .errors import (
    BudgetExceeded,
    InconsistentLengths,
    NonFieldDirection,
    NonPositiveHeight,
    NotPeriodic,
    SpanFailure,
)
from .field import FieldScalar, Vec, cross, field_sqrt, mat_inv, mat_vec, parse_scalar, to_field
from .homology import add, homology_data
from .linalg import independent_subset, int_det
from .saddle import SaddleConnection, enumerate_saddle_connections
from .surface import apply_matrix, build_surface, find_isomorphism
from .unfold import EAST, exact_square, corners_with_direction, half_plane_vertices, rotate_pi, sweep, trace_from_corner

WEST = -EAST
TRACE_BUDGET = 200000


@dataclass(frozen=True)
class Cylinder:
    """One maximal cylinder, measured in the rotated frame where the direction is east.

    Rotated lengths are |v|^2 / |v| = |v| times the true lengths, so ``circ`` and ``height``
    are exact field elements; true values divide by |v| (see ``scale``).
    """

    index: int
    bottom: tuple
    top: tuple
    circ: FieldScalar
    height: FieldScalar
    scale2: FieldScalar
    core_class: tuple
    crossing: Vec
    crossing_class: tuple
    crossing_corner: int
    bottom_offsets: tuple
    top_offsets: tuple

    @property
    def modulus(self):
        return self.height / self.circ

    @property
    def area(self):
        return self.circ * self.height / self.scale2

    @property
    def scale(self):
        """|v| exactly when it is a field element, else as a float."""
        r = field_sqrt(self.scale2)
        return r if r is not None else float(self.scale2) ** 0.5

    @property
    def circumference(self):
        return self.circ / self.scale

    @property
    def true_height(self):
        return self.height / self.scale


@dataclass
class CylinderDecomposition:
    surface: object
    direction: Vec
    scale2: FieldScalar
    matrix: tuple
    rotated: object
    connections: list
    lengths: list
    cylinders: list
    above: list
    below: list
    sigma_of_corner: dict = dc_field(repr=False)

    @property
    def area(self):
        return sum((c.area for c in self.cylinders), FieldScalar(0))

    def to_rotated(self, v):
        return mat_vec(self.matrix, v)


def as_direction(direction, d):
    """Coerce a direction to an exact field vector over Q(sqrt d)."""
    if isinstance(direction, Vec):
        xs = (direction.x, direction.y)
    else:
        xs = tuple(direction)
    out = []
    for x in xs:
        if isinstance(x, float):
            if not x.is_integer():
                raise NonFieldDirection(f"direction coordinate {x!r} is not an exact field element")
            x = int(x)
        if isinstance(x, str):
            x = parse_scalar(x)
        fx = to_field(x)
        if fx is None or (fx.d and fx.d != d):
            raise NonFieldDirection(f"direction coordinate {x!r} is not in Q(sqrt {d})")
        out.append(fx)
    v = Vec(*out)
    if v.is_zero():
        raise ValueError("direction must be nonzero")
    return v


def _trace_east(rot, l, classes, budget):
    try:
        return trace_from_corner(rot, l, EAST, classes, t_max=None, budget=budget)
    except BudgetExceeded as exc:
        raise NotPeriodic(f"separatrix from corner {l} did not close within {budget} triangles") from exc


def direction_periodicity(surface, direction, budget=TRACE_BUDGET):
    """Cylinder decomposition of ``surface`` in ``direction``.

    The surface is mapped by [[p, q], [-q, p]] so the direction becomes east; every
    eastward separatrix is traced exactly until it hits a cone point.
    """
    if surface.tainted:
        raise NonFieldDirection("framed surfaces are decomposed on their exact base")
    v = as_direction(direction, surface.discriminant)
    p, q = v.x, v.y
    M = ((p, q), (-q, p))
    n2 = p * p + q * q
    rot = apply_matrix(M, surface)
    classes = homology_data(surface).classes

    # eastward separatrices
    starts = corners_with_direction(rot, EAST)
    sigma_of_corner = {}
    sig = []
    for l in starts:
        tr = _trace_east(rot, l, classes, budget)
        sigma_of_corner[l] = len(sig)
        sig.append((l, tr.end_corner, tr.end_point.x, tr.end_class))
    n_sig = len(sig)
    bottom_next = [sigma_of_corner[rotate_pi(rot, s[1], WEST, ccw=False)] for s in sig]
    top_next = [sigma_of_corner[rotate_pi(rot, s[1], WEST, ccw=True)] for s in sig]

    # bottom cycles are the cylinders
    above = [None] * n_sig
    cyl_bottoms = []
    for s0 in range(n_sig):
        if above[s0] is not None:
            continue
        cyc = [s0]
        above[s0] = len(cyl_bottoms)
        s = bottom_next[s0]
        while s != s0:
            if above[s] is not None:
                raise NotPeriodic("bottom boundary walk is not a permutation")
            above[s] = len(cyl_bottoms)
            cyc.append(s)
            s = bottom_next[s]
        cyl_bottoms.append(cyc)

    total_area2 = rot.area
    below = [None] * n_sig
    cylinders = []
    for i, bot in enumerate(cyl_bottoms):
        circ = sum((sig[s][2] for s in bot), FieldScalar(0))
        l0 = sig[bot[0]][0]
        bound = _distance_bound(circ, total_area2)
        seen = _top_candidates(rot, l0, circ, bound, classes, budget)
        if not seen:
            raise NotPeriodic(f"cylinder {i}: no vertex found above the bottom boundary")
        h = min(Q.y for Q, _, _ in seen)
        level = [x for x in seen if x[0].y == h and x[0].x.sign() >= 0 and x[0].x < circ]
        if not level:
            raise NotPeriodic(f"cylinder {i}: top boundary not visible from the bottom")
        beta, beta_cls, beta_arr = min(level, key=lambda x: x[0].x)
        top0 = sigma_of_corner[sweep(rot, beta_arr, -beta, EAST, ccw=True)]
        top = [top0]
        s = top_next[top0]
        while s != top0:
            top.append(s)
            s = top_next[s]
        for s in top:
            if below[s] is not None:
                raise NotPeriodic("top boundary assigned twice")
            below[s] = i
        tcirc = sum((sig[s][2] for s in top), FieldScalar(0))
        if tcirc != circ:
            raise NotPeriodic(f"cylinder {i}: top length {tcirc} differs from bottom length {circ}")
        boffs, acc = [], FieldScalar(0)
        for s in bot:
            boffs.append(acc)
            acc = acc + sig[s][2]
        toffs, acc = [], beta.x
        for s in top:
            toffs.append(acc)
            acc = acc + sig[s][2]
        core = homology_data(surface).zero()
        for s in bot:
            core = add(core, sig[s][3])
        cylinders.append(Cylinder(i, tuple(bot), tuple(top), circ, beta.y, n2, core, beta, beta_cls,
                                  l0, tuple(boffs), tuple(toffs)))
    area = sum((c.circ * c.height for c in cylinders), FieldScalar(0))
    if area != total_area2:
        raise NotPeriodic(f"cylinders cover area {area}, surface has {total_area2}")

    Minv = mat_inv(M)
    conns = []
    for l, end, x, cls in sig:
        hol = mat_vec(Minv, Vec(x, FieldScalar(0)))
        conns.append(SaddleConnection(surface.vertex_of[l], surface.vertex_of[end], hol, cls, l, end))
    return CylinderDecomposition(surface, v, n2, M, rot, conns, [s[2] for s in sig], cylinders,
                                 above, below, sigma_of_corner)


def _top_candidates(rot, l0, circ, bound, classes, budget):
    """Vertices visible upward from the start of a bottom connection, pruned to the strip
    0 <= x < circ and to heights not above the lowest vertex found so far."""
    best = [None]

    def prune(A, B):
        if A.x.sign() < 0 and B.x.sign() < 0:
            return True
        if A.x >= circ and B.x >= circ:
            return True
        return best[0] is not None and A.y > best[0] and B.y > best[0]

    out = []
    try:
        for Q, cls, arr in half_plane_vertices(rot, l0, EAST, bound, classes, budget=budget, prune=prune):
            out.append((Q, cls, arr))
            if best[0] is None or Q.y < best[0]:
                best[0] = Q.y
    except BudgetExceeded as exc:
        raise NotPeriodic(f"cylinder height search exceeded {budget} triangles") from exc
    return out


def _distance_bound(circ, area):
    h_max = area / circ
    return (float(circ) ** 2 + float(h_max) ** 2) ** 0.5 * (1 + 1e-9) + 1e-9


# -- cylinder diagrams --------------------------------------------------------

@dataclass(frozen=True)
class CylinderDiagram:
    """For each cylinder, the cyclic bottom and top sequences of connection labels."""

    cylinders: tuple  # ((bottom labels...), (top labels...)) per cylinder

    def labels(self):
        return sorted({x for b, t in self.cylinders for x in b + t})

    def check(self):
        bots = [x for b, _ in self.cylinders for x in b]
        tops = [x for _, t in self.cylinders for x in t]
        return sorted(bots) == sorted(tops) == sorted(set(bots))

    def canonical(self):
        """Lexicographically minimal relabelled form over cylinder orders, rotations and labels."""
        best = None
        cyls = self.cylinders
        for order in permutations(range(len(cyls))):
            for form in _rotations([cyls[i] for i in order]):
                relabel = {}
                out = []
                for b, t in form:
                    nb = tuple(relabel.setdefault(x, len(relabel)) for x in b)
                    out.append((nb, t))
                out2 = tuple((b, tuple(relabel.setdefault(x, len(relabel)) for x in t)) for b, t in out)
                if best is None or out2 < best:
                    best = out2
        return best


def _rotations(cyls):
    if not cyls:
        yield ()
        return
    (b, t), rest = cyls[0], cyls[1:]
    for tail in _rotations(rest):
        for i in range(len(b)):
            for j in range(len(t)):
                yield ((b[i:] + b[:i], t[j:] + t[:j]),) + tail


def cylinder_diagram(dec):
    return CylinderDiagram(tuple((c.bottom, c.top) for c in dec.cylinders))


def decomposition_data(dec):
    """(diagram, lengths per label, crossing vector per cylinder) in the rotated frame."""
    return cylinder_diagram(dec), list(dec.lengths), [c.crossing for c in dec.cylinders]


# -- bases from decompositions -------------------------------------------------

def basis_from_decomposition(dec):
    """Independent horizontal connections extended by one crossing connection per cylinder.

    Returns a list of (kind, index, class) with kind 'sigma' or 'crossing'.
    """
    hd = homology_data(dec.surface)
    sig_cls = [c.homology for c in dec.connections]
    keep = independent_subset([list(c) for c in sig_cls])
    out = [("sigma", i, sig_cls[i]) for i in keep]
    out += [("crossing", c.index, c.crossing_class) for c in dec.cylinders]
    if len(out) != hd.h:
        raise SpanFailure(f"{len(out)} elements for relative homology of rank {hd.h}")
    det = int_det([list(x[2]) for x in out])
    if abs(det) != 1:
        raise SpanFailure(f"change of basis has determinant {det}")
    return out


# -- reconstruction from diagram data ------------------------------------------

def phi_construct(diagram, lengths, crossings, direction=None):
    """Glue parallelogram strips described by a cylinder diagram into a surface.

    ``lengths[s]`` is the horizontal length of connection s; ``crossings[i]`` is the vector
    from the start of cylinder i's first bottom connection to the start of its first top
    one.  With ``direction`` the result is mapped back from the frame where it is horizontal.
    """
    lengths = [x if isinstance(x, FieldScalar) else FieldScalar.lift(x) for x in lengths]
    if any(x.sign() <= 0 for x in lengths):
        raise InconsistentLengths("connection lengths must be positive")
    zero = FieldScalar(0)
    pos = {}
    label = {}
    hol = []
    triangles = []
    pairs = []

    def lab(P, Q):
        label[(P, Q)] = len(hol)
        hol.append(pos[Q] - pos[P])
        return label[(P, Q)]

    for i, (bot, top) in enumerate(diagram.cylinders):
        v = crossings[i]
        if v.y.sign() <= 0:
            raise NonPositiveHeight(f"cylinder {i} has non-positive height {v.y}")
        cb = sum((lengths[s] for s in bot), zero)
        ct = sum((lengths[s] for s in top), zero)
        if cb != ct:
            raise InconsistentLengths(f"cylinder {i}: bottom length {cb} != top length {ct}")
        m, n = len(bot), len(top)
        B = [("B", i, a) for a in range(m + 1)]
        T = [("T", i, b) for b in range(n + 1)]
        pos[B[0]], pos[T[0]] = Vec(zero, zero), v
        for a, s in enumerate(bot):
            pos[B[a + 1]] = pos[B[a]] + Vec(lengths[s], zero)
        for b, s in enumerate(top):
            pos[T[b + 1]] = pos[T[b]] + Vec(lengths[s], zero)
        a = b = 0
        while a < m or b < n:
            if b == n or (a < m and pos[B[a + 1]].x <= pos[T[b + 1]].x):
                tri = (B[a], B[a + 1], T[b])
                a += 1
            else:
                tri = (B[a], T[b + 1], T[b])
                b += 1
            triangles.append(tuple(lab(tri[k], tri[(k + 1) % 3]) for k in range(3)))
        pairs.append((label[(T[0], B[0])], label[(B[m], T[n])]))
        for a, s in enumerate(bot):
            pairs.append((label[(B[a], B[a + 1])], ("top", s)))
        for b, s in enumerate(top):
            label[("top", s)] = label[(T[b + 1], T[b])]
    for (P, Q), l in list(label.items()):
        if P != "top" and (Q, P) in label and (P, Q) < (Q, P):
            pairs.append((l, label[(Q, P)]))
    pairs = [(x, label[y] if isinstance(y, tuple) else y) for x, y in pairs]
    surf = build_surface(triangles, [(p.x, p.y) for p in hol], pairs)
    if direction is not None:
        p, q = direction.x, direction.y
        n2 = p * p + q * q
        surf = apply_matrix(((p / n2, -q / n2), (q / n2, p / n2)), surf)
    return surf


def phi_round_trip(dec):
    """Rebuild the surface from the decomposition's diagram data and compare."""
    diagram, lengths, crossings = decomposition_data(dec)
    rebuilt = phi_construct(diagram, lengths, crossings, dec.direction)
    return find_isomorphism(rebuilt, dec.surface) is not None


# -- census -----------------------------------------------------------------------

def direction_key(v):
    """Key shared by all positive multiples of v: the vector scaled to first nonzero coordinate 1."""
    if v.x.sign() != 0:
        return (FieldScalar(1), v.y / v.x, v.x.sign())
    return (FieldScalar(0), FieldScalar(1), v.y.sign())


def saddle_directions(surface, L):
    """One representative per unoriented saddle-connection direction with holonomy <= L.

    The representative is the shortest connection in that direction, oriented so its first
    nonzero coordinate is positive.  Sorted by length then slope.
    """
    reps = {}
    for c in enumerate_saddle_connections(surface, L):
        v = c.holonomy
        if v.x.sign() < 0 or (v.x.sign() == 0 and v.y.sign() < 0):
            v = -v
        key = direction_key(v)
        if key not in reps or (v.x * v.x + v.y * v.y) < (reps[key].x * reps[key].x + reps[key].y * reps[key].y):
            reps[key] = v
    return sorted(reps.values(), key=lambda v: (float(v.x * v.x + v.y * v.y), float(v.x), float(v.y)))


def circumference_ratios(dec):
    circs = [c.circ for c in dec.cylinders]
    if len(circs) == 1:
        return {FieldScalar(1)}
    return {a / b for i, a in enumerate(circs) for j, b in enumerate(circs) if i != j}


def height_relation(dec):
    """Sorted moduli ratios m_i / min m; fixes every linear relation among heights."""
    mods = [c.modulus for c in dec.cylinders]
    m0 = min(mods)
    return tuple(sorted(m / m0 for m in mods))


@dataclass
class CensusRow:
    cutoff: float
    n_directions: int
    ratios: set
    diagrams: set
    height_relations: set


def finiteness_census(surface, L_dir, cutoffs=None, on_decomposition=None):
    """Decompose along every saddle-connection direction up to ``L_dir``.

    Returns one row per cutoff with the cumulative sets of circumference ratios, canonical
    diagrams and height relations seen in directions of holonomy length <= cutoff.
    """
    if cutoffs is None:
        cutoffs = [L_dir]
    cutoffs = sorted(cutoffs)
    dirs = saddle_directions(surface, L_dir)
    ratios, diagrams, heights = set(), set(), set()
    rows = []
    k = 0
    for cut in cutoffs:
        cut2 = exact_square(cut)
        while k < len(dirs):
            v = dirs[k]
            if v.x * v.x + v.y * v.y > cut2:
                break
            dec = direction_periodicity(surface, v)
            if on_decomposition is not None:
                on_decomposition(dec)
            ratios |= circumference_ratios(dec)
            diagrams.add(cylinder_diagram(dec).canonical())
            heights.add(height_relation(dec))
            k += 1
        rows.append(CensusRow(cut, k, set(ratios), set(diagrams), set(heights)))
    return rows
