# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled geometry kernels.

Mirrors ``_kernels_py`` operation for operation; keep both in sync.
"""

import numpy as np

from libc.math cimport sqrt, INFINITY

cdef double EPS = 1e-9

BACKEND_NAME = "compiled"


cpdef double polygon_area(const double[:, ::1] verts):
    cdef Py_ssize_t n = verts.shape[0]
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        acc += verts[i, 0] * verts[j, 1] - verts[j, 0] * verts[i, 1]
    return 0.5 * acc


cdef bint _pip(double px, double py, const double[:, ::1] verts) nogil:
    cdef Py_ssize_t n = verts.shape[0]
    cdef Py_ssize_t i, j
    cdef bint inside = False
    cdef double y1, y2, xin
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        y1 = verts[i, 1]
        y2 = verts[j, 1]
        if (y1 > py) != (y2 > py):
            xin = verts[i, 0] + (py - y1) * (verts[j, 0] - verts[i, 0]) / (y2 - y1)
            if xin > px:
                inside = not inside
    return inside


cpdef bint point_in_polygon(double px, double py, const double[:, ::1] verts):
    return _pip(px, py, verts)


cpdef points_in_polygon(const double[:, ::1] pts, const double[:, ::1] verts):
    cdef Py_ssize_t n = pts.shape[0]
    out = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] mv = out
    cdef Py_ssize_t i
    for i in range(n):
        if _pip(pts[i, 0], pts[i, 1], verts):
            mv[i] = 1
    return out


cdef inline bint _proper(double d1, double d2, double d3, double d4) nogil:
    cdef bint a = ((d1 > EPS) and (d2 < -EPS)) or ((d1 < -EPS) and (d2 > EPS))
    cdef bint b = ((d3 > EPS) and (d4 < -EPS)) or ((d3 < -EPS) and (d4 > EPS))
    return a and b


cdef bint _seg_blocked(double ox, double oy, double tx, double ty,
                       const double[:, ::1] verts) nogil:
    cdef Py_ssize_t n = verts.shape[0]
    cdef Py_ssize_t i, j
    cdef double ax, ay, bx, by, rx, ry, ex, ey, d1, d2, d3, d4
    rx = tx - ox
    ry = ty - oy
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        ax = verts[i, 0]
        ay = verts[i, 1]
        bx = verts[j, 0]
        by = verts[j, 1]
        d1 = rx * (ay - oy) - ry * (ax - ox)
        d2 = rx * (by - oy) - ry * (bx - ox)
        ex = bx - ax
        ey = by - ay
        d3 = ex * (oy - ay) - ey * (ox - ax)
        d4 = ex * (ty - ay) - ey * (tx - ax)
        if _proper(d1, d2, d3, d4):
            return True
    return _pip(0.5 * (ox + tx), 0.5 * (oy + ty), verts)


cpdef bint segment_blocked(double ox, double oy, double tx, double ty,
                           const double[:, ::1] verts):
    return _seg_blocked(ox, oy, tx, ty, verts)


cpdef int count_visible(double ox, double oy, const double[:, ::1] pts,
                        const double[:, :, ::1] boxes, double max_range):
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t nb = boxes.shape[0]
    cdef Py_ssize_t i, k
    cdef double px, py, dx, dy
    cdef double r2 = max_range * max_range
    cdef int vis = 0
    cdef bint blocked
    for i in range(n):
        px = pts[i, 0]
        py = pts[i, 1]
        dx = px - ox
        dy = py - oy
        if dx * dx + dy * dy > r2:
            continue
        blocked = False
        for k in range(nb):
            if _seg_blocked(ox, oy, px, py, boxes[k]):
                blocked = True
                break
        if not blocked:
            vis += 1
    return vis


cpdef clip_convex(const double[:, ::1] subject, const double[:, ::1] clip):
    cdef Py_ssize_t n = subject.shape[0]
    cdef Py_ssize_t m = clip.shape[0]
    cdef Py_ssize_t cap = 2 * (n + m) + 8
    buf_a = np.empty((cap, 2), dtype=np.float64)
    buf_b = np.empty((cap, 2), dtype=np.float64)
    cdef double[:, ::1] cur = buf_a
    cdef double[:, ::1] nxt = buf_b
    cdef double[:, ::1] tmp
    cdef Py_ssize_t cur_n = n
    cdef Py_ssize_t nxt_n
    cdef Py_ssize_t e, f, i
    cdef double cx1, cy1, cx2, cy2, ex, ey
    cdef double sx, sy, px, py, side_s, side_p, t
    cdef bint p_in, s_in
    for i in range(n):
        cur[i, 0] = subject[i, 0]
        cur[i, 1] = subject[i, 1]
    for e in range(m):
        if cur_n == 0:
            break
        cx1 = clip[e, 0]
        cy1 = clip[e, 1]
        f = e + 1
        if f == m:
            f = 0
        cx2 = clip[f, 0]
        cy2 = clip[f, 1]
        ex = cx2 - cx1
        ey = cy2 - cy1
        nxt_n = 0
        for i in range(cur_n):
            if i == 0:
                sx = cur[cur_n - 1, 0]
                sy = cur[cur_n - 1, 1]
            else:
                sx = cur[i - 1, 0]
                sy = cur[i - 1, 1]
            px = cur[i, 0]
            py = cur[i, 1]
            side_s = ex * (sy - cy1) - ey * (sx - cx1)
            side_p = ex * (py - cy1) - ey * (px - cx1)
            p_in = side_p >= -EPS
            s_in = side_s >= -EPS
            if p_in:
                if not s_in:
                    t = side_s / (side_s - side_p)
                    nxt[nxt_n, 0] = sx + t * (px - sx)
                    nxt[nxt_n, 1] = sy + t * (py - sy)
                    nxt_n += 1
                nxt[nxt_n, 0] = px
                nxt[nxt_n, 1] = py
                nxt_n += 1
            elif s_in:
                t = side_s / (side_s - side_p)
                nxt[nxt_n, 0] = sx + t * (px - sx)
                nxt[nxt_n, 1] = sy + t * (py - sy)
                nxt_n += 1
        tmp = cur
        cur = nxt
        nxt = tmp
        cur_n = nxt_n
    out = np.empty((cur_n, 2), dtype=np.float64)
    cdef double[:, ::1] ov = out
    for i in range(cur_n):
        ov[i, 0] = cur[i, 0]
        ov[i, 1] = cur[i, 1]
    return out


cpdef project_polyline_arcs(const double[:, ::1] pts, const double[:, ::1] line,
                            const double[::1] cum):
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t k = line.shape[0]
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] ov = out
    if k < 2:
        return out
    cdef Py_ssize_t i, s
    cdef double px, py, ax, ay, dx, dy, len2, seg_len, t, qx, qy, d2
    cdef double best_d2, best_arc
    for i in range(n):
        px = pts[i, 0]
        py = pts[i, 1]
        best_d2 = INFINITY
        best_arc = 0.0
        for s in range(k - 1):
            ax = line[s, 0]
            ay = line[s, 1]
            dx = line[s + 1, 0] - ax
            dy = line[s + 1, 1] - ay
            len2 = dx * dx + dy * dy
            if len2 == 0.0:
                t = 0.0
                seg_len = 0.0
            else:
                t = ((px - ax) * dx + (py - ay) * dy) / len2
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
                seg_len = sqrt(len2)
            qx = px - (ax + t * dx)
            qy = py - (ay + t * dy)
            d2 = qx * qx + qy * qy
            if d2 < best_d2:
                best_d2 = d2
                best_arc = cum[s] + t * seg_len
        ov[i] = best_arc
    return out


cpdef double min_distance_to_polygon(double px, double py, const double[:, ::1] verts):
    if _pip(px, py, verts):
        return 0.0
    cdef Py_ssize_t n = verts.shape[0]
    cdef Py_ssize_t i, j
    cdef double ax, ay, dx, dy, len2, t, qx, qy, d2
    cdef double best = INFINITY
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        ax = verts[i, 0]
        ay = verts[i, 1]
        dx = verts[j, 0] - ax
        dy = verts[j, 1] - ay
        len2 = dx * dx + dy * dy
        if len2 == 0.0:
            t = 0.0
        else:
            t = ((px - ax) * dx + (py - ay) * dy) / len2
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
        qx = px - (ax + t * dx)
        qy = py - (ay + t * dy)
        d2 = qx * qx + qy * qy
        if d2 < best:
            best = d2
    return sqrt(best)
