"""Geometric constructions and queries for the risk pipeline.

Conventions: counterclockwise polygons, headings in radians measured from
+x, absolute tolerance 1e-9 m for predicates. Degenerate touching (shared
edges, zero-area slivers) counts as no overlap.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .types import GEOM_EPS, Corridor, DistanceWindow, GeometryError, Polygon, RiskCone

# Offset joints longer than this multiple of half_width are beveled.
MITER_LIMIT = 4.0
# Arc discretization bound for cones, in degrees.
MAX_CHORD_DEG = 5.0
# Spacing for edge sampling when projecting regions onto curved centerlines.
EDGE_SAMPLE_SPACING = 0.03
EDGE_SAMPLE_CAP = 64


def oriented_box_xy(cx: float, cy: float, heading: float, length: float, width: float) -> Polygon:
    """Axis box of the given dimensions, rotated to ``heading`` about its center."""
    if length <= 0.0 or width <= 0.0:
        raise GeometryError("box dimensions must be positive")
    c = math.cos(heading)
    s = math.sin(heading)
    hl = 0.5 * length
    hw = 0.5 * width
    local = ((hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw))
    verts = [(cx + c * lx - s * ly, cy + s * lx + c * ly) for lx, ly in local]
    return Polygon(np.asarray(verts, dtype=np.float64))


def oriented_box(state, meta) -> Polygon:
    """Footprint of an agent from its kinematic state and metadata."""
    x, y = state.position
    return oriented_box_xy(x, y, state.heading, meta.length, meta.width)


def _dedupe(points: np.ndarray) -> np.ndarray:
    if points.shape[0] < 2:
        return points
    keep = [0]
    for i in range(1, points.shape[0]):
        d = points[i] - points[keep[-1]]
        if d[0] * d[0] + d[1] * d[1] > GEOM_EPS * GEOM_EPS:
            keep.append(i)
    return points[keep]


def _drop_collinear(points: np.ndarray) -> np.ndarray:
    """Remove interior points lying exactly on the segment of their
    neighbors; the chord equals the arc there, so the polyline and its
    length parametrization are unchanged."""
    if points.shape[0] < 3:
        return points
    keep = [0]
    for i in range(1, points.shape[0] - 1):
        a = points[keep[-1]]
        b = points[i]
        c = points[i + 1]
        cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        along = (b[0] - a[0]) * (c[0] - a[0]) + (b[1] - a[1]) * (c[1] - a[1])
        if abs(cross) > GEOM_EPS or along <= 0.0:
            keep.append(i)
    keep.append(points.shape[0] - 1)
    return points[keep]


def build_corridor(
    path,
    vehicle_width: float,
    vehicle_length: float | None = None,
    heading: float | None = None,
) -> Corridor:
    """Buffer a planned path by half the vehicle width.

    End caps are flat. Joints are mitered, falling back to a bevel when the
    miter would exceed ``MITER_LIMIT`` times the half width. A path with no
    usable extent degenerates to the vehicle footprint, oriented by
    ``heading`` when given.
    """
    if vehicle_width <= 0.0:
        raise GeometryError("vehicle width must be positive")
    pts = np.ascontiguousarray(np.asarray(path.positions, dtype=np.float64))
    first = pts[0]
    pts = _drop_collinear(_dedupe(pts))
    hw = 0.5 * vehicle_width

    if pts.shape[0] < 2:
        length = vehicle_length if vehicle_length and vehicle_length > 0 else vehicle_width
        box = oriented_box_xy(float(first[0]), float(first[1]), heading or 0.0, length, vehicle_width)
        center = np.asarray([first], dtype=np.float64)
        return Corridor(center, np.zeros(1), hw, box, (box.vertices,))

    seg = np.diff(pts, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    dirs = seg / seg_len[:, None]
    normals = np.stack([-dirs[:, 1], dirs[:, 0]], axis=1)
    arcs = np.concatenate([[0.0], np.cumsum(seg_len)])

    n = pts.shape[0]
    left = np.empty_like(pts)
    right = np.empty_like(pts)
    left[0] = pts[0] + normals[0] * hw
    right[0] = pts[0] - normals[0] * hw
    left[-1] = pts[-1] + normals[-1] * hw
    right[-1] = pts[-1] - normals[-1] * hw
    for j in range(1, n - 1):
        m = normals[j - 1] + normals[j]
        norm = math.hypot(m[0], m[1])
        if norm < 1e-12:
            # Near-reversal: no meaningful bisector, cap the offset.
            unit = normals[j]
            cos_half = 1.0 / MITER_LIMIT
        else:
            unit = m / norm
            cos_half = max(float(unit @ normals[j]), 1.0 / MITER_LIMIT)
        scale = hw / cos_half
        left[j] = pts[j] + unit * scale
        right[j] = pts[j] - unit * scale

    ring = np.concatenate([right, left[::-1]], axis=0)
    boundary = Polygon(ring)

    pieces = []
    for i in range(n - 1):
        quad = np.array(
            [
                pts[i] - normals[i] * hw,
                pts[i + 1] - normals[i] * hw,
                pts[i + 1] + normals[i] * hw,
                pts[i] + normals[i] * hw,
            ]
        )
        pieces.append(np.ascontiguousarray(quad))
    for j in range(1, n - 1):
        turn = float(dirs[j - 1, 0] * dirs[j, 1] - dirs[j - 1, 1] * dirs[j, 0])
        if turn > 1e-12:
            wedge = np.array([pts[j], pts[j] - normals[j - 1] * hw, pts[j] - normals[j] * hw])
        elif turn < -1e-12:
            wedge = np.array([pts[j], pts[j] + normals[j] * hw, pts[j] + normals[j - 1] * hw])
        else:
            continue
        pieces.append(np.ascontiguousarray(wedge))

    return Corridor(pts, arcs, hw, boundary, tuple(pieces))


def build_cone(state, half_angle: float, horizon: float, v_stationary: float = 0.1) -> RiskCone:
    """Reachable sector of a VRU: radius grows linearly with speed.

    Below the stationary threshold the radius collapses to zero and the
    caller falls back to the VRU footprint.
    """
    if horizon <= 0.0:
        raise GeometryError("horizon must be positive")
    speed = float(state.speed)
    radius = speed * horizon if speed >= v_stationary else 0.0
    x, y = state.position
    return RiskCone((float(x), float(y)), float(state.heading), float(half_angle), radius)


def cone_polygons(cone: RiskCone, max_chord_deg: float = MAX_CHORD_DEG) -> list[np.ndarray]:
    """Discretize a cone into convex sector polygons.

    The arc is sampled every ``max_chord_deg`` degrees at most; sectors wider
    than a half circle are split so every returned piece stays convex. A
    zero-radius cone yields no polygons.
    """
    if cone.radius <= 0.0:
        return []
    ax, ay = cone.apex
    span = 2.0 * cone.half_angle
    n_split = max(1, int(math.ceil(span / (0.5 * math.pi) - 1e-12)))
    bounds = np.linspace(cone.axis_heading - cone.half_angle, cone.axis_heading + cone.half_angle, n_split + 1)
    step = math.radians(max_chord_deg)
    out = []
    for k in range(n_split):
        a0 = float(bounds[k])
        a1 = float(bounds[k + 1])
        n_arc = max(1, int(math.ceil((a1 - a0) / step - 1e-12)))
        angles = np.linspace(a0, a1, n_arc + 1)
        verts = [(ax, ay)]
        verts.extend((ax + cone.radius * math.cos(t), ay + cone.radius * math.sin(t)) for t in angles)
        out.append(np.ascontiguousarray(np.asarray(verts, dtype=np.float64)))
    return out


def triangulate(verts: np.ndarray) -> list[np.ndarray]:
    """Ear-clipping triangulation of a simple CCW polygon."""
    n = verts.shape[0]
    if n == 3:
        return [np.ascontiguousarray(verts)]
    idx = list(range(n))
    tris: list[np.ndarray] = []

    def _strictly_inside(p, a, b, c) -> bool:
        d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        d2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0])
        d3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0])
        return d1 > GEOM_EPS and d2 > GEOM_EPS and d3 > GEOM_EPS

    while len(idx) > 3:
        m = len(idx)
        clipped = False
        best_flat = None
        best_cross = math.inf
        for k in range(m):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % m]
            a, b, c = verts[i0], verts[i1], verts[i2]
            cr = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if abs(cr) < best_cross:
                best_cross = abs(cr)
                best_flat = k
            if cr <= GEOM_EPS:
                continue
            if any(
                _strictly_inside(verts[j], a, b, c)
                for j in idx
                if j not in (i0, i1, i2)
            ):
                continue
            tris.append(np.ascontiguousarray(np.array([a, b, c])))
            del idx[k]
            clipped = True
            break
        if not clipped:
            # Numerical stalemate: drop the flattest vertex and continue.
            del idx[best_flat]
    last = verts[idx]
    if abs(kernels.polygon_area(np.ascontiguousarray(last))) > GEOM_EPS:
        tris.append(np.ascontiguousarray(last))
    return tris


def _convex_cover(verts: np.ndarray) -> list[np.ndarray]:
    from .types import is_convex

    if is_convex(verts):
        return [np.ascontiguousarray(verts)]
    return triangulate(verts)


def _bounds_disjoint(a: np.ndarray, b: np.ndarray) -> bool:
    return (
        a[:, 0].max() < b[:, 0].min()
        or b[:, 0].max() < a[:, 0].min()
        or a[:, 1].max() < b[:, 1].min()
        or b[:, 1].max() < a[:, 1].min()
    )


def intersect_regions(a: Polygon, b: Polygon) -> tuple[Polygon, ...]:
    """Intersection of two simple polygons as a collection of convex parts.

    The parts partition the true intersection (they may share edges and may
    be finer than its connected components); zero-area slivers are dropped.
    """
    from .types import is_convex

    va, vb = a.vertices, b.vertices
    if _bounds_disjoint(va, vb):
        return ()
    if is_convex(vb):
        raw = [kernels.clip_convex(t, vb) for t in _convex_cover(va)]
    elif is_convex(va):
        raw = [kernels.clip_convex(t, va) for t in _convex_cover(vb)]
    else:
        raw = [
            kernels.clip_convex(ta, tb)
            for ta in triangulate(va)
            for tb in triangulate(vb)
        ]
    out = []
    for piece in raw:
        if piece.shape[0] >= 3 and kernels.polygon_area(np.ascontiguousarray(piece)) > GEOM_EPS:
            out.append(Polygon(piece))
    return tuple(out)


def corridor_overlap(corridor: Corridor, clip_regions: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Clip every corridor cover piece against convex regions.

    Returns raw vertex arrays; the pieces jointly cover corridor-region
    overlap (they may overlap each other near bends, which is harmless for
    window envelopes and containment.)
    """
    out = []
    for region in clip_regions:
        if isinstance(region, Polygon):
            region = region.vertices
        region = np.ascontiguousarray(region, dtype=np.float64)
        for piece in corridor.pieces:
            if _bounds_disjoint(piece, region):
                continue
            clipped = kernels.clip_convex(piece, region)
            if clipped.shape[0] >= 3 and kernels.polygon_area(np.ascontiguousarray(clipped)) > GEOM_EPS:
                out.append(clipped)
    return out


def _as_parts(region) -> list[np.ndarray]:
    if region is None:
        return []
    if isinstance(region, Polygon):
        return [region.vertices]
    if isinstance(region, np.ndarray):
        return [region] if region.shape[0] >= 3 else []
    parts = []
    for item in region:
        parts.extend(_as_parts(item))
    return parts


def _sample_points(parts: Iterable[np.ndarray], include_edges: bool) -> np.ndarray:
    chunks = []
    for verts in parts:
        chunks.append(verts)
        if not include_edges:
            continue
        n = verts.shape[0]
        for i in range(n):
            a = verts[i]
            b = verts[(i + 1) % n]
            length = math.hypot(b[0] - a[0], b[1] - a[1])
            count = min(EDGE_SAMPLE_CAP, int(length / EDGE_SAMPLE_SPACING))
            if count < 1:
                continue
            ts = (np.arange(1, count + 1) / (count + 1))[:, None]
            chunks.append(a[None, :] + ts * (b - a)[None, :])
    return np.ascontiguousarray(np.concatenate(chunks, axis=0))


def corridor_distance_window(corridor: Corridor, region) -> DistanceWindow | None:
    """Arc-length extent of a region projected onto the corridor centerline.

    Projection maps each point to the arc length of its nearest centerline
    point; the window is clamped to [0, corridor length]. Returns None when
    the region is empty.
    """
    parts = _as_parts(region)
    if not parts:
        return None
    total = corridor.length
    if corridor.centerline.shape[0] < 2 or total <= GEOM_EPS:
        return DistanceWindow(0.0, 0.0)
    # Extrema sit on part vertices for straight corridors; curved centerlines
    # additionally need edge samples because the projection bends with them.
    pts = _sample_points(parts, include_edges=corridor.centerline.shape[0] > 2)
    arcs = kernels.project_polyline_arcs(pts, corridor.centerline, corridor.arcs)
    lo = min(max(float(arcs.min()), 0.0), total)
    hi = min(max(float(arcs.max()), 0.0), total)
    return DistanceWindow(lo, hi)


def radial_distance_window(apex: tuple[float, float], region) -> DistanceWindow:
    """Radial extent of a region as seen from an apex point."""
    parts = _as_parts(region)
    if not parts:
        raise GeometryError("radial window of an empty region")
    ax, ay = float(apex[0]), float(apex[1])
    d_min = math.inf
    d_max = 0.0
    for verts in parts:
        verts = np.ascontiguousarray(verts, dtype=np.float64)
        d_min = min(d_min, kernels.min_distance_to_polygon(ax, ay, verts))
        dx = verts[:, 0] - ax
        dy = verts[:, 1] - ay
        d_max = max(d_max, float(np.sqrt(dx * dx + dy * dy).max()))
    if d_min <= GEOM_EPS:
        d_min = 0.0
    return DistanceWindow(d_min, max(d_min, d_max))


def cast_ray(
    origin: tuple[float, float],
    target: tuple[float, float],
    obstacles: Iterable[Polygon],
    max_range: float,
) -> bool:
    """Line-of-sight test: True when the target is in range and the open
    segment to it crosses no obstacle."""
    ox, oy = float(origin[0]), float(origin[1])
    tx, ty = float(target[0]), float(target[1])
    dx = tx - ox
    dy = ty - oy
    dist2 = dx * dx + dy * dy
    if dist2 <= GEOM_EPS * GEOM_EPS:
        raise GeometryError("ray origin and target coincide")
    if dist2 > max_range * max_range:
        return False
    for obstacle in obstacles:
        verts = obstacle.vertices if isinstance(obstacle, Polygon) else np.ascontiguousarray(obstacle)
        if kernels.segment_blocked(ox, oy, tx, ty, verts):
            return False
    return True
