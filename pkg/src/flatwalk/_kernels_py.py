"""Pure-Python/numpy implementations of the float hot loops (fallback backend)."""
import math

import numpy as np


def classify_pairs(a, tri_a, b, tri_b, tol):
    """Classify every same-triangle pair of segments from ``a`` and ``b``.

    ``a`` and ``b`` are (n, 4) float arrays of local segment coordinates x0, y0, x1, y1 and
    ``tri_a``, ``tri_b`` the triangle of each segment.  Returns (robust, ambiguous): the
    number of pairs that certainly cross in both interiors, and an (m, 2) int array of pairs
    whose float orientation tests are too close to zero to decide.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ta = np.asarray(tri_a, dtype=np.int64)
    tb = np.asarray(tri_b, dtype=np.int64)
    if len(a) == 0 or len(b) == 0:
        return 0, np.zeros((0, 2), dtype=np.int64)
    ii, jj = np.nonzero(ta[:, None] == tb[None, :])
    if len(ii) == 0:
        return 0, np.zeros((0, 2), dtype=np.int64)
    p0 = a[ii, 0:2]
    p1 = a[ii, 2:4]
    q0 = b[jj, 0:2]
    q1 = b[jj, 2:4]
    r = p1 - p0
    s = q1 - q0

    def orient(o, d, x):
        return d[:, 0] * (x[:, 1] - o[:, 1]) - d[:, 1] * (x[:, 0] - o[:, 0])

    lr = np.hypot(r[:, 0], r[:, 1])
    ls = np.hypot(s[:, 0], s[:, 1])
    eps = tol * lr * ls + 1e-300
    o1 = orient(p0, r, q0)
    o2 = orient(p0, r, q1)
    o3 = orient(q0, s, p0)
    o4 = orient(q0, s, p1)
    big = [np.abs(o) > eps for o in (o1, o2, o3, o4)]
    sure = big[0] & big[1] & big[2] & big[3]
    cross = sure & (o1 * o2 < 0) & (o3 * o4 < 0)
    apart = (big[0] & big[1] & (o1 * o2 > 0)) | (big[2] & big[3] & (o3 * o4 > 0))
    amb = ~cross & ~apart
    return int(np.count_nonzero(cross)), np.stack([ii[amb], jj[amb]], axis=1).astype(np.int64)


def _seg_length(t1, t2):
    return abs(math.log(math.tan(t2 / 2) / math.tan(t1 / 2)))


def _theta_after(t1, length, decreasing):
    g = math.log(math.tan(t1 / 2))
    g = g - length if decreasing else g + length
    return 2 * math.atan(math.exp(g))


def excursion_walk(u, v, total, lam, y0, max_steps=1_000_000):
    """Follow the geodesic from u toward v through the fundamental domain
    {|Re z| <= lam/2, |z| >= 1} of the Hecke group for hyperbolic length ``total``.

    Returns (walked, above): length actually walked and length spent at height > y0.
    """
    half = lam / 2
    c, r = (u + v) / 2, abs(v - u) / 2
    x, y = c, r
    # reduce the top of the geodesic into the domain
    for _ in range(max_steps):
        n = math.floor(x / lam + 0.5)
        if n:
            x -= n * lam
            u -= n * lam
            v -= n * lam
        if x * x + y * y < 1 - 1e-15:
            d = x * x + y * y
            x, y = -x / d, y / d
            u, v = -1 / u, -1 / v
        else:
            break
    walked = 0.0
    above = 0.0
    stuck = 0
    for _ in range(max_steps):
        c, r = (u + v) / 2, abs(v - u) / 2
        decreasing = v > u
        # on the domain boundary and heading out: cross first, without walking
        if stuck < 4 and abs(abs(x) - half) < 1e-12 and (x < 0) != decreasing:
            shift = lam if x < 0 else -lam
            x, u, v = x + shift, u + shift, v + shift
            stuck += 1
            continue
        if stuck < 4 and c != 0 and abs(x * x + y * y - 1) < 1e-12 and (c > 0) != decreasing:
            x = -x
            u, v = -1 / u, -1 / v
            stuck += 1
            continue
        stuck = 0
        th = math.atan2(y, x - c)
        best = None
        side = 0
        cands = []
        for sgn, k in ((1, 1), (-1, 2)):
            cs = (sgn * half - c) / r
            if -1 < cs < 1:
                cands.append((math.acos(cs), k))
        if c != 0:
            cs = (1 - c * c - r * r) / (2 * c * r)
            if -1 < cs < 1:
                cands.append((math.acos(cs), 3))
        for t, k in cands:
            step = th - t if decreasing else t - th
            if step > 1e-12 and (best is None or step < best):
                best, side = step, k
        if best is None:
            break
        t_exit = th - best if decreasing else th + best
        seg = _seg_length(th, t_exit)
        remaining = total - walked
        if seg >= remaining:
            t_exit = _theta_after(th, remaining, decreasing)
            seg = remaining
            side = 0
        above += _above(th, t_exit, r, y0)
        walked += seg
        if side == 0:
            break
        x, y = c + r * math.cos(t_exit), r * math.sin(t_exit)
        if side == 1:
            x, u, v = x - lam, u - lam, v - lam
        elif side == 2:
            x, u, v = x + lam, u + lam, v + lam
        else:
            x = -x
            u, v = -1 / u, -1 / v
    return walked, above


def _above(t1, t2, r, y0):
    if r <= y0:
        return 0.0
    lo, hi = min(t1, t2), max(t1, t2)
    ta = math.asin(y0 / r)
    lo, hi = max(lo, ta), min(hi, math.pi - ta)
    if hi <= lo:
        return 0.0
    return _seg_length(lo, hi)
