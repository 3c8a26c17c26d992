"""Numpy implementations of the geometry kernels.

This is the reference backend: the compiled extension in ``_kernels.pyx``
mirrors these routines operation for operation so both backends make the
same floating-point decisions. Keep the two files in sync.
"""

from __future__ import annotations

import numpy as np

# Absolute tolerance shared by all predicates (meters / squared meters).
EPS = 1e-9

BACKEND_NAME = "python"


def polygon_area(verts: np.ndarray) -> float:
    """Signed area of a polygon (positive for counterclockwise rings)."""
    n = verts.shape[0]
    acc = 0.0
    for i in range(n):
        j = i + 1
        if j == n:
            j = 0
        acc += verts[i, 0] * verts[j, 1] - verts[j, 0] * verts[i, 1]
    return 0.5 * acc


def point_in_polygon(px: float, py: float, verts: np.ndarray) -> bool:
    """Even-odd containment test."""
    n = verts.shape[0]
    inside = False
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


def points_in_polygon(pts: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Vectorized even-odd test; returns a uint8 mask."""
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    x1 = verts[:, 0][None, :]
    y1 = verts[:, 1][None, :]
    x2 = np.roll(verts[:, 0], -1)[None, :]
    y2 = np.roll(verts[:, 1], -1)[None, :]
    straddle = (y1 > py) != (y2 > py)
    dy = np.where(y2 - y1 == 0.0, 1.0, y2 - y1)
    xin = x1 + (py - y1) * (x2 - x1) / dy
    hits = straddle & (xin > px)
    return (hits.sum(axis=1) % 2).astype(np.uint8)


def _proper_cross(d1, d2, d3, d4):
    a = ((d1 > EPS) & (d2 < -EPS)) | ((d1 < -EPS) & (d2 > EPS))
    b = ((d3 > EPS) & (d4 < -EPS)) | ((d3 < -EPS) & (d4 > EPS))
    return a & b


def segment_blocked(ox: float, oy: float, tx: float, ty: float, verts: np.ndarray) -> bool:
    """True when the open segment (o, t) crosses the polygon boundary or
    runs through the polygon interior."""
    ax = verts[:, 0]
    ay = verts[:, 1]
    bx = np.roll(ax, -1)
    by = np.roll(ay, -1)
    rx = tx - ox
    ry = ty - oy
    d1 = rx * (ay - oy) - ry * (ax - ox)
    d2 = rx * (by - oy) - ry * (bx - ox)
    ex = bx - ax
    ey = by - ay
    d3 = ex * (oy - ay) - ey * (ox - ax)
    d4 = ex * (ty - ay) - ey * (tx - ax)
    if bool(_proper_cross(d1, d2, d3, d4).any()):
        return True
    # Catch segments that lie inside without properly crossing an edge.
    return point_in_polygon(0.5 * (ox + tx), 0.5 * (oy + ty), verts)


def count_visible(
    ox: float,
    oy: float,
    pts: np.ndarray,
    boxes: np.ndarray,
    max_range: float,
) -> int:
    """Number of target points with an unobstructed ray from (ox, oy).

    ``boxes`` is a (B, 4, 2) array of obstacle outlines. A point beyond
    ``max_range`` counts as not visible.
    """
    n = pts.shape[0]
    if n == 0:
        return 0
    dx = pts[:, 0] - ox
    dy = pts[:, 1] - oy
    in_range = dx * dx + dy * dy <= max_range * max_range
    if boxes.shape[0] == 0:
        return int(in_range.sum())

    a = boxes.reshape(-1, 2)
    b = np.roll(boxes, -1, axis=1).reshape(-1, 2)
    ax = a[:, 0][None, :]
    ay = a[:, 1][None, :]
    bx = b[:, 0][None, :]
    by = b[:, 1][None, :]
    rx = (pts[:, 0] - ox)[:, None]
    ry = (pts[:, 1] - oy)[:, None]
    d1 = rx * (ay - oy) - ry * (ax - ox)
    d2 = rx * (by - oy) - ry * (bx - ox)
    ex = bx - ax
    ey = by - ay
    d3 = ex * (oy - ay) - ey * (ox - ax)
    d4 = ex * ((pts[:, 1][:, None]) - ay) - ey * ((pts[:, 0][:, None]) - ax)
    crossed = _proper_cross(d1, d2, d3, d4).reshape(n, -1, 4).any(axis=2)

    mids = np.empty_like(pts)
    mids[:, 0] = 0.5 * (pts[:, 0] + ox)
    mids[:, 1] = 0.5 * (pts[:, 1] + oy)
    inside = np.zeros((n, boxes.shape[0]), dtype=bool)
    for k in range(boxes.shape[0]):
        inside[:, k] = points_in_polygon(mids, boxes[k]).astype(bool)

    blocked = (crossed | inside).any(axis=1)
    return int((in_range & ~blocked).sum())


def clip_convex(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman clip of ``subject`` against a convex ``clip`` ring.

    Both rings must be counterclockwise. The result may have fewer than
    three vertices, which callers treat as an empty region.
    """
    out = [(float(subject[i, 0]), float(subject[i, 1])) for i in range(subject.shape[0])]
    m = clip.shape[0]
    for e in range(m):
        if not out:
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
        inp = out
        out = []
        k = len(inp)
        for i in range(k):
            sx, sy = inp[i - 1]
            px, py = inp[i]
            side_s = ex * (sy - cy1) - ey * (sx - cx1)
            side_p = ex * (py - cy1) - ey * (px - cx1)
            p_in = side_p >= -EPS
            s_in = side_s >= -EPS
            if p_in:
                if not s_in:
                    t = side_s / (side_s - side_p)
                    out.append((sx + t * (px - sx), sy + t * (py - sy)))
                out.append((px, py))
            elif s_in:
                t = side_s / (side_s - side_p)
                out.append((sx + t * (px - sx), sy + t * (py - sy)))
    if not out:
        return np.empty((0, 2), dtype=np.float64)
    return np.asarray(out, dtype=np.float64)


def project_polyline_arcs(pts: np.ndarray, line: np.ndarray, cum: np.ndarray) -> np.ndarray:
    """Arc length of the nearest polyline point for each query point.

    ``line`` is a (K, 2) polyline and ``cum`` its cumulative arc lengths.
    Ties resolve to the earliest segment.
    """
    n = pts.shape[0]
    if line.shape[0] < 2:
        return np.zeros(n, dtype=np.float64)
    a = line[:-1]
    d = line[1:] - a
    seg_len2 = (d * d).sum(axis=1)
    seg_len2 = np.where(seg_len2 == 0.0, 1.0, seg_len2)
    seg_len = np.sqrt((d * d).sum(axis=1))

    rel_x = pts[:, 0][:, None] - a[:, 0][None, :]
    rel_y = pts[:, 1][:, None] - a[:, 1][None, :]
    t = (rel_x * d[:, 0][None, :] + rel_y * d[:, 1][None, :]) / seg_len2[None, :]
    t = np.clip(t, 0.0, 1.0)
    qx = rel_x - t * d[:, 0][None, :]
    qy = rel_y - t * d[:, 1][None, :]
    dist2 = qx * qx + qy * qy
    best = np.argmin(dist2, axis=1)
    idx = np.arange(n)
    return cum[best] + t[idx, best] * seg_len[best]


def min_distance_to_polygon(px: float, py: float, verts: np.ndarray) -> float:
    """Distance from a point to a polygon (zero when inside)."""
    if point_in_polygon(px, py, verts):
        return 0.0
    n = verts.shape[0]
    best = np.inf
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
    return float(np.sqrt(best))
