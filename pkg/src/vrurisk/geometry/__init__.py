"""Planar geometry for corridors, reachability cones, and visibility."""

from .kernels import backend_name
from .ops import (
    build_cone,
    build_corridor,
    cast_ray,
    cone_polygons,
    corridor_distance_window,
    corridor_overlap,
    intersect_regions,
    oriented_box,
    oriented_box_xy,
    radial_distance_window,
    triangulate,
)
from .types import (
    GEOM_EPS,
    Corridor,
    DistanceWindow,
    GeometryError,
    Polygon,
    RiskCone,
    is_convex,
    is_simple,
)

__all__ = [
    "GEOM_EPS",
    "Corridor",
    "DistanceWindow",
    "GeometryError",
    "Polygon",
    "RiskCone",
    "backend_name",
    "build_cone",
    "build_corridor",
    "cast_ray",
    "cone_polygons",
    "corridor_distance_window",
    "corridor_overlap",
    "intersect_regions",
    "is_convex",
    "is_simple",
    "oriented_box",
    "oriented_box_xy",
    "radial_distance_window",
    "triangulate",
]
