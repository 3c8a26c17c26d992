"""Planar geometric types used throughout the simulator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels

GEOM_EPS = 1e-9


class GeometryError(ValueError):
    """Raised for degenerate or malformed geometric inputs."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Polygon:
    """Simple polygon with counterclockwise vertices, in meters.

    Clockwise input is reversed on construction; polygons with fewer than
    three vertices or near-zero area are rejected.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64))
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise GeometryError("polygon requires at least 3 (x, y) vertices")
        area = kernels.polygon_area(v)
        if area < 0.0:
            v = np.ascontiguousarray(v[::-1])
            area = -area
        if area <= GEOM_EPS:
            raise GeometryError("degenerate polygon: area is ~0")
        object.__setattr__(self, "vertices", _freeze(v))

    @property
    def area(self) -> float:
        return kernels.polygon_area(self.vertices)

    def contains(self, x: float, y: float) -> bool:
        return bool(kernels.point_in_polygon(float(x), float(y), self.vertices))

    def bounds(self) -> tuple[float, float, float, float]:
        v = self.vertices
        return (
            float(v[:, 0].min()),
            float(v[:, 1].min()),
            float(v[:, 0].max()),
            float(v[:, 1].max()),
        )


def is_convex(verts: np.ndarray) -> bool:
    """True when every turn of the CCW ring is left or collinear."""
    n = verts.shape[0]
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        cx, cy = verts[(i + 2) % n]
        if (bx - ax) * (cy - ay) - (by - ay) * (cx - ax) < -GEOM_EPS:
            return False
    return True


def is_simple(verts: np.ndarray) -> bool:
    """Brute-force self-intersection check (test/validation use only)."""
    n = verts.shape[0]
    segs = [(verts[i], verts[(i + 1) % n]) for i in range(n)]

    def _cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            a, b = segs[i]
            c, d = segs[j]
            d1 = _cross(a, b, c)
            d2 = _cross(a, b, d)
            d3 = _cross(c, d, a)
            d4 = _cross(c, d, b)
            if ((d1 > GEOM_EPS and d2 < -GEOM_EPS) or (d1 < -GEOM_EPS and d2 > GEOM_EPS)) and (
                (d3 > GEOM_EPS and d4 < -GEOM_EPS) or (d3 < -GEOM_EPS and d4 > GEOM_EPS)
            ):
                return False
    return True


@dataclass(frozen=True)
class Corridor:
    """Swept path of a vehicle: a buffered centerline polyline.

    ``pieces`` is a convex cover of the corridor (one rectangle per
    centerline segment plus wedges filling the outer side of each bend);
    clipping against it avoids triangulating the boundary ring.
    """

    centerline: np.ndarray  # (n, 2) positions
    arcs: np.ndarray  # (n,) cumulative arc length
    half_width: float
    boundary: Polygon
    pieces: tuple

    def __post_init__(self):
        if self.half_width <= 0.0:
            raise GeometryError("corridor half_width must be positive")
        object.__setattr__(self, "centerline", _freeze(self.centerline))
        object.__setattr__(self, "arcs", _freeze(self.arcs))

    @property
    def length(self) -> float:
        return float(self.arcs[-1])


@dataclass(frozen=True)
class RiskCone:
    """Reachable sector of a VRU over the evaluation horizon."""

    apex: tuple[float, float]
    axis_heading: float
    half_angle: float
    radius: float

    def __post_init__(self):
        if not (0.0 < self.half_angle <= np.pi):
            raise GeometryError("cone half_angle must be in (0, pi]")
        if self.radius < 0.0:
            raise GeometryError("cone radius must be non-negative")


@dataclass(frozen=True)
class DistanceWindow:
    """Closed distance interval along a corridor or radial axis."""

    d_min: float
    d_max: float

    def __post_init__(self):
        if not (0.0 <= self.d_min <= self.d_max):
            raise GeometryError(
                f"invalid distance window [{self.d_min}, {self.d_max}]"
            )
