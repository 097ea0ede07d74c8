"""Closed geodesics on Teichmuller curves H/Gamma for catalog Veech groups.

Hecke groups H_q = <S, T_lambda> are free products Z/2 * Z/q, so every hyperbolic
conjugacy class is a cyclic word in the syllables S U^k (U = S T, 1 <= k <= q-1) other than a
power of a single parabolic syllable.  All syllable matrices are nonnegative with diagonal
entries >= 1, so appending one never lowers the trace; that is the pruning certificate.
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache

from .catalog import load_surface
from .errors import BudgetExceeded, DepthExceeded, NotRealizable, StabilizerCheckFailed, UnknownSurface
from .field import F, FieldScalar, Vec, mat_mul, surd
from .kernels import excursion_walk
from .regular import base_surface, classify_short_curves, measure_cylinders
from .cylinders import direction_key, direction_periodicity
from .surface import apply_matrix, delaunay_retriangulate, is_isomorphic, stratum

DEFAULT_EPS = 0.04
DELTA = 0.35
WORD_BUDGET = 5_000_000


def _m(a, b, c, d):
    return ((FieldScalar.lift(a), FieldScalar.lift(b)), (FieldScalar.lift(c), FieldScalar.lift(d)))


PHI = F("1/2", "1/2", 5)
SQRT2 = surd(2)
SQRT5 = surd(5)


@dataclass(frozen=True)
class FuchsianGroupPresentation:
    name: str
    surface: str
    generators: dict
    relations: tuple
    cusp_representatives: tuple  # (fixed direction, parabolic generator name)
    hecke_q: int = None
    hecke_lambda: FieldScalar = None

    @property
    def enumerable(self):
        return self.hecke_q is not None


def _presentations():
    S = _m(0, -1, 1, 0)
    east = Vec(FieldScalar(1), FieldScalar(0))
    torus = FuchsianGroupPresentation(
        "torus", "torus", {"S": S, "T": _m(1, 1, 0, 1)},
        (("S", 4), ("S T", 6)), ((east, "T"),), 3, FieldScalar(1))
    golden = FuchsianGroupPresentation(
        "goldenL", "golden_L", {"S": S, "T": _m(1, PHI, 0, 1)},
        (("S", 4), ("S T", 10)), ((east, "T"),), 5, PHI)
    half = SQRT2 / 2
    octagon = FuchsianGroupPresentation(
        "octagon", "octagon", {"R": _m(half, -half, half, half), "P": _m(1, 2 + 2 * SQRT2, 0, 1)},
        (("R", 8),), ((east, "P"), (Vec(FieldScalar(1), SQRT2 - 1), "R P R^-1")))
    # the stored double pentagon is diag(1, 1/sin 72deg) applied to the metric one, so the
    # rotation by pi/5 appears conjugated by that diagonal matrix
    modulus = F("5/2", "-11/10", 5)
    pentagon = FuchsianGroupPresentation(
        "double_pentagon", "double_pentagon",
        {"R": _m(PHI / 2, -SQRT5 / 4, PHI - 1, PHI / 2), "P": _m(1, 1 / modulus, 0, 1)},
        (("R", 10),), ((east, "P"),))
    return {g.name: g for g in (torus, golden, octagon, pentagon)}


GROUPS = _presentations()
ALIASES = {"golden_L": "goldenL", "golden-L": "goldenL"}


def _lookup(surface_id):
    key = str(surface_id)
    key = key[:-5] if key.endswith(".surf") else key
    key = ALIASES.get(key, key)
    if key not in GROUPS:
        raise UnknownSurface(f"no Veech group data for {surface_id!r}")
    return GROUPS[key]


def stabilizes(matrix, surface):
    """True if the affine image of the surface is isomorphic to it."""
    return is_isomorphic(delaunay_retriangulate(apply_matrix(matrix, surface)),
                         delaunay_retriangulate(surface))


def validate_stabilizer(matrix, surface, name="matrix"):
    if (matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]) != 1:
        raise StabilizerCheckFailed(f"{name} does not have determinant 1")
    if not stabilizes(matrix, surface):
        raise StabilizerCheckFailed(f"{name} does not stabilize the surface")


@lru_cache(maxsize=None)
def veech_group(surface_id, validate=True):
    """Stored presentation, each generator checked to stabilize the catalog surface."""
    group = _lookup(surface_id)
    if validate:
        surface = load_surface(group.surface)
        for name, m in group.generators.items():
            validate_stabilizer(m, surface, name)
    return group


# -- words and records ----------------------------------------------------------------

@lru_cache(maxsize=None)
def syllables(q, lam):
    """Nonnegative matrices of the syllables S U^k, k = 1..q-1 (index k-1)."""
    S = _m(0, -1, 1, 0)
    T = _m(1, lam, 0, 1)
    U = mat_mul(S, T)
    out = []
    P = U
    for _ in range(1, q):
        M = mat_mul(S, P)
        if any(x.sign() < 0 for row in M for x in row):
            M = tuple(tuple(-x for x in row) for row in M)
        assert all(x.sign() >= 0 for row in M for x in row) and M[0][0] >= 1 and M[1][1] >= 1
        out.append(M)
        P = mat_mul(P, U)
    return tuple(out)


def canonical_rotation(word):
    return min(word[i:] + word[:i] for i in range(len(word)))


def is_primitive(word):
    n = len(word)
    return not any(n % d == 0 and word[:d] * (n // d) == word for d in range(1, n))


def inverse_word(word, q):
    """Cyclic word of the inverse class: reversed, with k -> q - k."""
    return canonical_rotation(tuple(q - k for k in reversed(word)))


def class_key(word, q):
    c = canonical_rotation(tuple(word))
    return min(c, inverse_word(c, q))


def word_matrix(group, word):
    M = _m(1, 0, 0, 1)
    syl = syllables(group.hecke_q, group.hecke_lambda)
    for k in word:
        M = mat_mul(M, syl[k - 1])
    return M


def trace_length(trace):
    return 2 * math.acosh(abs(float(trace)) / 2)


@dataclass(frozen=True)
class GeodesicRecord:
    word: tuple
    trace: FieldScalar
    length: float
    excursion_fraction: float
    j_count: int
    matrix: tuple = field(compare=False, repr=False)
    group: str = "torus"


def _is_parabolic_power(word, q):
    return all(k == 1 for k in word) or all(k == q - 1 for k in word)


def enumerate_words(group, R, order=None, budget=WORD_BUDGET):
    """Canonical keys and matrices of primitive hyperbolic classes with length <= R,
    g and g^-1 identified."""
    if not group.enumerable:
        raise NotRealizable(f"no word enumeration for group {group.name}")
    q = group.hecke_q
    syl = syllables(q, group.hecke_lambda)
    letters = list(order) if order is not None else list(range(1, q))
    bound = 2 * math.cosh(R / 2) * (1 + 1e-12)
    found = {}
    stack = [((), _m(1, 0, 0, 1))]
    nodes = 0
    while stack:
        word, M = stack.pop()
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"word tree exceeded {budget} nodes")
        tr = M[0][0] + M[1][1]
        if float(tr) > bound:
            continue
        if word and not _is_parabolic_power(word, q) and float(tr) > 2 and is_primitive(word):
            key = class_key(word, q)
            if key not in found:
                found[key] = M if canonical_rotation(word) == key else word_matrix(group, key)
        pure = word and _is_parabolic_power(word, q) and len(set(word)) == 1
        for k in letters:
            nxt = mat_mul(M, syl[k - 1])
            if pure and k == word[0]:
                # a parabolic run never grows the trace; stop once no exit fits
                if all(float(sum_diag(mat_mul(nxt, syl[j - 1]))) > bound for j in letters if j != k):
                    continue
            stack.append((word + (k,), nxt))
    return found


def sum_diag(M):
    return M[0][0] + M[1][1]


def axis_endpoints(M):
    """Repelling and attracting fixed points of a hyperbolic matrix with c != 0."""
    (a, b), (c, d) = [[float(x) for x in row] for row in M]
    t = a + d
    disc = math.sqrt(t * t - 4)
    if c == 0:
        raise ValueError("axis is vertical")
    r1 = (a - d - disc) / (2 * c)
    r2 = (a - d + disc) / (2 * c)
    # attracting fixed point has |c z + d| < 1
    return (r1, r2) if abs(c * r2 + d) < abs(c * r1 + d) else (r2, r1)


def cusp_height(eps=DEFAULT_EPS):
    """Horoball height for short-curve threshold eps: a point at height y on the modular
    curve is a unit-area lattice whose shortest vector has squared length 1/y."""
    return max(1.0, 1.0 / eps)


def excursion_fraction(record_or_matrix, group, y0=None, eps=DEFAULT_EPS, max_steps=1_000_000):
    """Fraction of one period of the axis spent above height y0 in the fundamental domain."""
    M = record_or_matrix.matrix if isinstance(record_or_matrix, GeodesicRecord) else record_or_matrix
    if y0 is None:
        y0 = cusp_height(eps)
    L = trace_length(sum_diag(M))
    u, v = axis_endpoints(M)
    walked, above = excursion_walk(u, v, L, float(group.hecke_lambda), y0, max_steps)
    if walked < L * (1 - 1e-9):
        raise DepthExceeded(f"walk stopped early; fraction >= {above / L:.6g}")
    return min(1.0, above / L)


def enumerate_closed_geodesics(group, R, eps=DEFAULT_EPS, y0=None, order=None, budget=WORD_BUDGET):
    """GeodesicRecords for all primitive unoriented hyperbolic classes of length <= R."""
    out = []
    for key, M in enumerate_words(group, R, order, budget).items():
        tr = sum_diag(M)
        L = trace_length(tr)
        if L > R:
            continue
        theta = excursion_fraction(M, group, y0=y0, eps=eps)
        out.append(GeodesicRecord(key, tr, L, theta, 1 if theta > 0 else 0, M, group.name))
    out.sort(key=lambda r: (r.length, r.word))
    return out


@dataclass(frozen=True)
class CountRow:
    theta: float
    n_theta: int
    log_n_over_r: float
    bound: float

    @property
    def passed(self):
        return self.log_n_over_r <= self.bound


def count_N_theta(group, R, theta_grid, eps=DEFAULT_EPS, delta=DELTA, records=None, y0=None):
    """Rows (theta, N_theta, log N_theta / R, 1 - theta + delta) with h = 1."""
    if records is None:
        records = enumerate_closed_geodesics(group, R, eps=eps, y0=y0)
    rows = []
    for th in theta_grid:
        n = sum(1 for r in records if r.length <= R and r.excursion_fraction >= th)
        val = math.log(n) / R if n else -math.inf
        rows.append(CountRow(float(th), n, val, 1 - th + delta))
    return rows


def huber_ratio(records, R):
    n = sum(1 for r in records if r.length <= R)
    return n * R / math.exp(R)


# -- systole along a closed geodesic -------------------------------------------------------

def _eigenframe(M):
    """P with det 1 and P^-1 M P = diag(mu, 1/mu), mu > 1, for a hyperbolic M."""
    (a, b), (c, d) = [[float(x) for x in row] for row in M]
    t = a + d
    if t < 0:
        a, b, c, d, t = -a, -b, -c, -d, -t
    disc = math.sqrt(t * t - 4)
    mu = (t + disc) / 2

    def eig(lam):
        v = (b, lam - a) if abs(b) > 1e-300 else (lam - d, c)
        n = math.hypot(*v)
        return v[0] / n, v[1] / n

    e1, e2 = eig(mu), eig(1 / mu)
    det = e1[0] * e2[1] - e1[1] * e2[0]
    if det < 0:
        e2 = (-e2[0], -e2[1])
        det = -det
    s = 1 / math.sqrt(det)
    return ((e1[0] * s, e2[0] * s), (e1[1] * s, e2[1] * s)), mu


def _inv2(P):
    (a, b), (c, d) = P
    det = a * d - b * c
    return ((d / det, -b / det), (-c / det, a / det))


def _matmul_f(A, B):
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2)) for i in range(2))


class CoreCache:
    """Cylinder decompositions of one exact surface, keyed by direction."""

    def __init__(self, surface):
        self.surface = surface
        self.decs = {}

    def get(self, v):
        if v.x.sign() < 0 or (v.x.sign() == 0 and v.y.sign() < 0):
            v = -v
        key = direction_key(v)
        if key not in self.decs:
            self.decs[key] = direction_periodicity(self.surface, v)
        return self.decs[key]


def minimal_curve_estimate(surface, cache=None):
    """Smallest flat extremal-length estimate over all cylinder core curves."""
    from .saddle import enumerate_saddle_connections

    area = float(surface.area)
    shortest = min(math.hypot(*(float(c) for c in surface.vec(l))) for l in range(surface.n_labels))
    cutoff = 2 * shortest
    scanned = 0.0
    best = math.inf
    while cutoff > scanned:
        seen = set()
        for c in enumerate_saddle_connections(surface, cutoff * (1 + 1e-12)):
            v = c.holonomy
            v = -v if v.x.sign() < 0 or (v.x.sign() == 0 and v.y.sign() < 0) else v
            k = direction_key(v)
            if k in seen:
                continue
            seen.add(k)
            dec = cache.get(v) if cache is not None else direction_periodicity(base_surface(surface), v)
            for cc in measure_cylinders(surface, v, dec):
                best = min(best, cc.estimate)
        scanned = cutoff
        # any shorter core has all its boundary connections shorter than itself
        cutoff = math.sqrt(best * area)
    return best


def systole_along_geodesic(record, surface=None, samples=32, c=1e-3, cache=None):
    """Minimal core estimate over ``samples`` points of one period of the closed geodesic,
    with the check min > c * exp(-(6g - 4) L).  Returns (minimum, bound, passed)."""
    group = GROUPS[record.group]
    if group.name not in ("torus", "goldenL"):
        raise NotRealizable(f"words of {group.name} are not mapped to affine automorphisms")
    if surface is None:
        surface = load_surface(group.surface)
    if cache is None:
        cache = CoreCache(surface)
    P, mu = _eigenframe(record.matrix)
    Pinv = _inv2(P)
    half = math.log(mu)
    best = math.inf
    for k in range(samples):
        s = half * k / samples
        A = _matmul_f(((math.exp(s), 0.0), (0.0, math.exp(-s))), Pinv)
        Y = delaunay_retriangulate(apply_matrix(A, surface))
        best = min(best, minimal_curve_estimate(Y, cache))
    g = stratum(surface).genus
    bound = c * math.exp(-(6 * g - 4) * record.length)
    return best, bound, best > bound
