# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled float hot loops; same contract as the pure-Python fallback."""
import numpy as np

from libc.math cimport acos, asin, atan, atan2, cos, exp, fabs, floor, log, sin, sqrt, tan, M_PI


cdef inline double _orient(double ox, double oy, double dx, double dy, double x, double y) nogil:
    return dx * (y - oy) - dy * (x - ox)


def classify_pairs(a, tri_a, b, tri_b, double tol):
    cdef double[:, ::1] A = np.ascontiguousarray(a, dtype=np.float64).reshape(-1, 4)
    cdef double[:, ::1] B = np.ascontiguousarray(b, dtype=np.float64).reshape(-1, 4)
    cdef long long[::1] TA = np.ascontiguousarray(tri_a, dtype=np.int64)
    cdef long long[::1] TB = np.ascontiguousarray(tri_b, dtype=np.int64)
    cdef Py_ssize_t i, j, na = A.shape[0], nb = B.shape[0]
    cdef double rx, ry, sx, sy, eps, o1, o2, o3, o4
    cdef bint b1, b2, b3, b4, sure, crossing, apart
    cdef long robust = 0
    amb = []
    for i in range(na):
        rx = A[i, 2] - A[i, 0]
        ry = A[i, 3] - A[i, 1]
        for j in range(nb):
            if TA[i] != TB[j]:
                continue
            sx = B[j, 2] - B[j, 0]
            sy = B[j, 3] - B[j, 1]
            eps = tol * sqrt(rx * rx + ry * ry) * sqrt(sx * sx + sy * sy) + 1e-300
            o1 = _orient(A[i, 0], A[i, 1], rx, ry, B[j, 0], B[j, 1])
            o2 = _orient(A[i, 0], A[i, 1], rx, ry, B[j, 2], B[j, 3])
            o3 = _orient(B[j, 0], B[j, 1], sx, sy, A[i, 0], A[i, 1])
            o4 = _orient(B[j, 0], B[j, 1], sx, sy, A[i, 2], A[i, 3])
            b1 = fabs(o1) > eps
            b2 = fabs(o2) > eps
            b3 = fabs(o3) > eps
            b4 = fabs(o4) > eps
            sure = b1 and b2 and b3 and b4
            crossing = sure and o1 * o2 < 0 and o3 * o4 < 0
            apart = (b1 and b2 and o1 * o2 > 0) or (b3 and b4 and o3 * o4 > 0)
            if crossing:
                robust += 1
            elif not apart:
                amb.append((i, j))
    if amb:
        return int(robust), np.asarray(amb, dtype=np.int64)
    return int(robust), np.zeros((0, 2), dtype=np.int64)


cdef inline double _seg_length(double t1, double t2) nogil:
    return fabs(log(tan(t2 / 2) / tan(t1 / 2)))


cdef inline double _theta_after(double t1, double length, bint decreasing) nogil:
    cdef double g = log(tan(t1 / 2))
    g = g - length if decreasing else g + length
    return 2 * atan(exp(g))


cdef inline double _above(double t1, double t2, double r, double y0) nogil:
    cdef double lo, hi, ta
    if r <= y0:
        return 0.0
    lo = t1 if t1 < t2 else t2
    hi = t2 if t1 < t2 else t1
    ta = asin(y0 / r)
    if ta > lo:
        lo = ta
    if M_PI - ta < hi:
        hi = M_PI - ta
    if hi <= lo:
        return 0.0
    return _seg_length(lo, hi)


def excursion_walk(double u, double v, double total, double lam, double y0, long max_steps=1000000):
    cdef double half = lam / 2, c, r, x, y, d, th, cs, t, step, best, t_exit, seg, remaining
    cdef double walked = 0.0, above = 0.0
    cdef long n, it
    cdef int side, k, stuck
    cdef double shift
    cdef bint decreasing, found
    c = (u + v) / 2
    r = fabs(v - u) / 2
    x = c
    y = r
    for it in range(max_steps):
        n = <long>floor(x / lam + 0.5)
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
    stuck = 0
    for it in range(max_steps):
        c = (u + v) / 2
        r = fabs(v - u) / 2
        decreasing = v > u
        if stuck < 4 and fabs(fabs(x) - half) < 1e-12 and (x < 0) != decreasing:
            shift = lam if x < 0 else -lam
            x += shift
            u += shift
            v += shift
            stuck += 1
            continue
        if stuck < 4 and c != 0 and fabs(x * x + y * y - 1) < 1e-12 and (c > 0) != decreasing:
            x = -x
            u, v = -1 / u, -1 / v
            stuck += 1
            continue
        stuck = 0
        th = atan2(y, x - c)
        found = False
        best = 0.0
        side = 0
        for k in range(1, 4):
            if k == 1:
                cs = (half - c) / r
            elif k == 2:
                cs = (-half - c) / r
            else:
                if c == 0:
                    continue
                cs = (1 - c * c - r * r) / (2 * c * r)
            if not (-1 < cs < 1):
                continue
            t = acos(cs)
            step = th - t if decreasing else t - th
            if step > 1e-12 and (not found or step < best):
                best = step
                side = k
                found = True
        if not found:
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
        x = c + r * cos(t_exit)
        y = r * sin(t_exit)
        if side == 1:
            x -= lam
            u -= lam
            v -= lam
        elif side == 2:
            x += lam
            u += lam
            v += lam
        else:
            x = -x
            u, v = -1 / u, -1 / v
    return walked, above
