"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the numpy
reference implementation is the fallback. Set ``VRURISK_PURE_PYTHON=1`` to
force the fallback (useful for benchmarking and debugging).
"""

from __future__ import annotations

import os

from . import _kernels_py

_IMPL = _kernels_py

if os.environ.get("VRURISK_PURE_PYTHON", "").lower() not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]

        _IMPL = _compiled
    except ImportError:
        pass

EPS = _kernels_py.EPS

polygon_area = _IMPL.polygon_area
point_in_polygon = _IMPL.point_in_polygon
points_in_polygon = _IMPL.points_in_polygon
segment_blocked = _IMPL.segment_blocked
count_visible = _IMPL.count_visible
clip_convex = _IMPL.clip_convex
project_polyline_arcs = _IMPL.project_polyline_arcs
min_distance_to_polygon = _IMPL.min_distance_to_polygon


def backend_name() -> str:
    """Name of the active kernel backend ('compiled' or 'python')."""
    return _IMPL.BACKEND_NAME
