"""Independent reference computations used by the tests.

Nothing here imports flatwalk: each routine recomputes a quantity from first principles
(polygon tracing, lattice brute force, binary quadratic forms, point sampling).
"""
import math
from collections import Counter
from math import gcd, isqrt

PHI = (1 + 5**0.5) / 2


# -- lattices --------------------------------------------------------------------------------

def primitive_vectors(L):
    r = int(math.floor(L))
    return {(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)
            if (x or y) and gcd(x, y) == 1 and x * x + y * y <= L * L}


def lattice_saddles(A, L):
    """Holonomies of saddle connections of the torus R^2 / A Z^2 with one marked point."""
    (a, b), (c, d) = A
    det = abs(a * d - b * c)
    # |A v| >= |v| * det / |A|_F, so |v| <= L * |A|_F / det covers the disk
    r = int(math.ceil(L * math.hypot(a, b, c, d) / det)) + 1
    out = []
    for p in range(-r, r + 1):
        for q in range(-r, r + 1):
            if (p or q) and gcd(p, q) == 1:
                x, y = a * p + b * q, c * p + d * q
                if math.hypot(x, y) <= L:
                    out.append((x, y))
    return out


# -- golden L polygon ------------------------------------------------------------------------

GOLDEN_L_VERTICES = [(0, 0), (1, 0), (PHI, 0), (PHI, 1), (1, 1), (1, PHI), (0, PHI), (0, 1)]


def _inside_L(x, y):
    in_square_col = 0 < x < 1 and 0 < y < PHI
    in_row = 0 < x < PHI and 0 < y < 1
    return in_square_col or in_row


def _wrap(x, y):
    """Translate a point that just left the L back through the glued side."""
    if y >= PHI and 0 < x < 1:
        return x, y - PHI
    if y <= 0 and 0 < x < 1:
        return x, y + PHI
    if y >= 1 and 1 < x < PHI:
        return x, y - 1
    if y <= 0 and 1 < x < PHI:
        return x, y + 1
    if x >= PHI and 0 < y < 1:
        return x - PHI, y
    if x <= 0 and 0 < y < 1:
        return x + PHI, y
    if x >= 1 and 1 < y < PHI:
        return x - 1, y
    if x <= 0 and 1 < y < PHI:
        return x + 1, y
    raise ValueError(f"stuck at {(x, y)}")


def _seg_point_dist(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    t = ((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy)
    t = min(1.0, max(0.0, t))
    return math.hypot(ax + t * dx - px, ay + t * dy - py), t


def golden_L_first_vertex(start, v, tol=1e-7, offset=1e-9):
    """Trace the ray from polygon vertex ``start`` in direction ``v`` (kept slightly to its
    left so it never runs along a side) and return the distance to the first vertex hit."""
    ux, uy = v[0] / math.hypot(*v), v[1] / math.hypot(*v)
    nx, ny = -uy, ux
    x, y = start[0] + offset * nx + 1e-7 * ux, start[1] + offset * ny + 1e-7 * uy
    if not _inside_L(x, y):
        return None
    travelled = 1e-7
    limit = math.hypot(*v) + 1e-6
    while travelled < limit:
        # largest step keeping us inside the open L
        lo, hi = 0.0, 4.0
        for _ in range(60):
            mid = (lo + hi) / 2
            if _inside_L(x + mid * ux, y + mid * uy):
                lo = mid
            else:
                hi = mid
        seg = min(hi, limit - travelled + 1e-9)
        ex, ey = x + seg * ux, y + seg * uy
        hits = [t for vx, vy in GOLDEN_L_VERTICES
                for dist, t in [_seg_point_dist(vx, vy, x, y, ex, ey)] if dist < tol]
        if hits:
            return travelled + min(hits) * seg
        travelled += seg
        if travelled >= limit:
            break
        x, y = _wrap(ex, ey)
    return None


def golden_L_saddles(L, span=5):
    """Oriented saddle connections of the golden L with length <= L: every candidate
    holonomy (a + b phi, c + d phi) is traced from every polygon corner."""
    cands = set()
    vals = [a + b * PHI for a in range(-span, span + 1) for b in range(-span, span + 1)]
    vals = sorted({round(v, 12) for v in vals if abs(v) <= L + 1e-9})
    for x in vals:
        for y in vals:
            if (x or y) and math.hypot(x, y) <= L + 1e-9:
                cands.add((x, y))
    out = []
    for v in cands:
        n = math.hypot(*v)
        for P in GOLDEN_L_VERTICES:
            d = golden_L_first_vertex(P, v)
            if d is not None and abs(d - n) < 1e-6:
                out.append(v)
    return out


def sort_by_length_angle(vs):
    def key(v):
        a = math.atan2(v[1], v[0])
        return (round(math.hypot(*v), 9), a + 2 * math.pi if a < 0 else a)

    return sorted(vs, key=key)


def multiset(vs, digits=9):
    return Counter((round(x, digits) + 0.0, round(y, digits) + 0.0) for x, y in vs)


# -- modular group classes via binary quadratic forms ------------------------------------------

def _reduced_forms(D):
    """Reduced indefinite forms (a, b, c) of discriminant D > 0, D not a square."""
    s = math.sqrt(D)
    out = []
    for b in range(1, isqrt(D) + 1):
        if (b - D) % 2:
            continue
        if b >= s:
            continue
        n = (D - b * b) // 4
        if n <= 0:
            continue
        for a in range(1, n + 1):
            if n % a:
                continue
            for sa in (a, -a):
                c = -n // sa
                if s - b < 2 * abs(sa) < s + b:
                    out.append((sa, b, c))
    return out


def _rho(f, D):
    a, b, c = f
    s = math.sqrt(D)
    m = 2 * abs(c)
    # r = -b mod 2|c|, chosen in (s - 2|c|, s) when |c| < s, else in (-|c|, |c|]
    r = (-b) % m
    if abs(c) < s:
        while r > s:
            r -= m
        while r < s - m:
            r += m
        if r > s:
            r -= m
    else:
        if r > abs(c):
            r -= m
    return (c, r, (r * r - D) // (4 * c))


def form_classes(D):
    """Proper equivalence classes of forms of discriminant D, as frozensets of reduced forms."""
    seen = set()
    classes = []
    for f in _reduced_forms(D):
        if f in seen:
            continue
        cyc = []
        g = f
        while g not in cyc:
            cyc.append(g)
            g = _rho(g, D)
        seen.update(cyc)
        classes.append(frozenset(cyc))
    return classes


def _power_traces(s, tmax):
    """Traces of h^k for k >= 2 when tr h = s, up to tmax."""
    prev, cur = 2, s
    out = []
    while True:
        prev, cur = cur, s * cur - prev
        if cur > tmax:
            return out
        out.append(cur)


def modular_class_counts(R):
    """Primitive hyperbolic classes of PSL(2, Z) of length <= R, with g and g^-1 identified.

    A class of trace t corresponds to a class of forms of discriminant t^2 - 4; inversion
    corresponds to negating the form.  Proper powers are removed by the trace recursion
    tr(h^k) = s tr(h^(k-1)) - tr(h^(k-2)).
    """
    tmax = int(math.floor(2 * math.cosh(R / 2) + 1e-9))
    total, self_inv = {}, {}
    for t in range(3, tmax + 1):
        D = t * t - 4
        cls = form_classes(D)
        index = {f: i for i, c in enumerate(cls) for f in c}
        total[t] = len(cls)
        self_inv[t] = sum(1 for i, c in enumerate(cls) for f in [next(iter(c))]
                          if index[(-f[2], f[1], -f[0])] == i)
    prim, prim_self = dict(total), dict(self_inv)
    for s in range(3, tmax + 1):
        for t in _power_traces(s, tmax):
            prim[t] -= prim[s]
            prim_self[t] -= prim_self[s]
    return sum((prim[t] + prim_self[t]) // 2 for t in prim)


# -- cusp excursion by sampling ----------------------------------------------------------------

def reduce_to_domain(x, y, lam, max_iter=10_000):
    for _ in range(max_iter):
        x -= lam * math.floor(x / lam + 0.5)
        r2 = x * x + y * y
        if r2 >= 1 - 1e-15:
            return x, y
        x, y = -x / r2, y / r2
    raise RuntimeError("reduction did not terminate")


def sampled_excursion(u, v, length, lam, y0, n=4000):
    """Fraction of arclength samples along one period of the axis (u, v) lying above y0
    after reduction into the standard fundamental domain."""
    c, r = (u + v) / 2, abs(v - u) / 2
    sign = 1 if v > u else -1
    hits = 0
    for i in range(n):
        s = (i + 0.5) / n * length
        x = c + sign * r * math.tanh(s)
        y = r / math.cosh(s)
        _, yy = reduce_to_domain(x, y, lam)
        hits += yy > y0
    return hits / n
