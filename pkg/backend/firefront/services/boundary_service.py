"""Boundary service layer: Delaunay triangulation and alpha-shape boundaries."""

import logging

import numpy as np
from scipy.ndimage import distance_transform_edt
from scipy.spatial import Delaunay, QhullError

from firefront.errors import DegenerateGeometryError
from firefront.models import AlphaBoundary, PointSet, Triangulation

__all__ = [
    "DEFAULT_ALPHA",
    "orientation",
    "delaunay",
    "circumradii",
    "alpha_shape",
    "outside_distance",
    "region_boundary",
]

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 1.0 / 3.0

# Qbb scales the last coordinate, Qz adds a point at infinity for cocircular
# input (pixel lattices are full of it), Qt triangulates merged facets.
QHULL_OPTIONS = "Qbb Qc Qz Q12 Qt"
QHULL_JOGGLE_OPTIONS = "QJ Qbb"

# Rasterizing sparse point sets costs more than it saves
MAX_RASTER_AREA_PER_POINT = 8


def orientation(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Exact integer cross product (b - a) x (c - a); > 0 is counterclockwise."""
    a, b, c = (np.asarray(p, dtype=np.int64) for p in (a, b, c))
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (
        b[..., 1] - a[..., 1]
    ) * (c[..., 0] - a[..., 0])


def _all_collinear(pts: PointSet) -> bool:
    base = pts[0]
    others = pts[1:]
    far = others[np.argmax(np.abs(others - base).sum(axis=1))]
    return bool(np.all(orientation(base, far, pts) == 0))


def delaunay(points) -> Triangulation:
    """
    Delaunay triangulation of integer points with counterclockwise triangles.

    Triangle vertex indices refer to the given point order.
    """
    pts = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    if len(pts) < 3:
        raise DegenerateGeometryError(f"Delaunay needs >= 3 points, got {len(pts)}")
    if _all_collinear(pts):
        raise DegenerateGeometryError(f"All {len(pts)} points are collinear")

    coords = pts.astype(np.float64)
    try:
        tri = Delaunay(coords, qhull_options=QHULL_OPTIONS)
        if len(tri.coplanar):
            # Points dropped for precision; joggling keeps every input as a vertex
            logger.debug(f"{len(tri.coplanar)} coplanar points dropped, re-triangulating with QJ")
            tri = Delaunay(coords, qhull_options=QHULL_JOGGLE_OPTIONS)
    except QhullError as exc:
        raise DegenerateGeometryError(f"Qhull failed: {exc}") from exc

    simplices = tri.simplices.astype(np.int64)
    turn = orientation(pts[simplices[:, 0]], pts[simplices[:, 1]], pts[simplices[:, 2]])
    # Qt can emit zero-area facets when roundoff merges near-cocircular points
    simplices = simplices[turn != 0]
    turn = turn[turn != 0]
    clockwise = turn < 0
    simplices[clockwise] = simplices[clockwise][:, [0, 2, 1]]
    return Triangulation(vertices=pts, triangles=simplices)


def circumradii(points: PointSet, triangles: np.ndarray) -> np.ndarray:
    """Circumradius abc / (4 * area) of every triangle."""
    p = np.asarray(points, dtype=np.float64)[triangles]
    a = np.linalg.norm(p[:, 1] - p[:, 2], axis=1)
    b = np.linalg.norm(p[:, 0] - p[:, 2], axis=1)
    c = np.linalg.norm(p[:, 0] - p[:, 1], axis=1)
    twice_area = np.abs(
        orientation(points[triangles[:, 0]], points[triangles[:, 1]], points[triangles[:, 2]])
    ).astype(np.float64)
    with np.errstate(divide="ignore"):
        return np.where(twice_area > 0, a * b * c / (2.0 * twice_area), np.inf)


def alpha_shape(tri: Triangulation, alpha: float) -> AlphaBoundary:
    """
    Keep triangles with circumradius <= 1/alpha (all of them at alpha=0).

    Boundary edges are edges with exactly one retained incident triangle.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    triangles = tri.triangles
    if alpha == 0:
        retained = np.ones(len(triangles), dtype=bool)
    else:
        retained = circumradii(tri.vertices, triangles) * alpha <= 1.0

    kept = triangles[retained]
    if not len(kept):
        edges = np.empty((0, 2), dtype=np.int64)
    else:
        all_edges = np.concatenate([kept[:, [0, 1]], kept[:, [1, 2]], kept[:, [2, 0]]])
        all_edges.sort(axis=1)
        uniq, counts = np.unique(all_edges, axis=0, return_counts=True)
        edges = uniq[counts == 1]
    return AlphaBoundary(
        alpha=alpha, vertices=tri.vertices, boundary_edges=edges, retained=retained
    )


def outside_distance(pts: PointSet) -> np.ndarray:
    """Euclidean distance from each (x, y) point to the nearest lattice cell not in the set."""
    origin = pts.min(axis=0) - 1
    local = pts - origin
    w, h = local.max(axis=0) + 2
    grid = np.zeros((h, w), dtype=bool)
    grid[local[:, 1], local[:, 0]] = True
    return distance_transform_edt(grid)[local[:, 1], local[:, 0]]


def _banded_alpha_shape(pts: PointSet, alpha: float) -> AlphaBoundary:
    """
    Alpha shape of a dense pixel region from its outer band only.

    A boundary vertex touches an empty disk of radius 1/alpha, so it lies
    within 2/alpha of a cell outside the region. Every Delaunay neighbour of a
    point is within 2 px of it or of the outside, so edges whose endpoints are
    within reach of the outside see the same incident triangles in the band as
    in the full region. Edges on the band's inner rim are dropped.
    """
    dist = outside_distance(pts)
    reach = 2.0 / alpha + 2.0
    in_band = dist <= reach + 3.0
    if in_band.all():
        return alpha_shape(delaunay(pts), alpha)

    band = pts[in_band]
    shape = alpha_shape(delaunay(band), alpha)
    near = dist[in_band] <= reach
    edges = shape.boundary_edges
    edges = edges[near[edges].all(axis=1)] if edges.size else edges
    logger.debug(f"Alpha shape from {len(band)} of {len(pts)} region points")
    return AlphaBoundary(
        alpha=alpha, vertices=band, boundary_edges=edges, retained=shape.retained
    )


def region_boundary(points, alpha: float = DEFAULT_ALPHA) -> AlphaBoundary | None:
    """
    Alpha-shape boundary of one region; None (with a warning) for degenerate regions.

    Dense regions are triangulated from their outer band of pixels only.
    """
    pts = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    try:
        if alpha > 0 and len(pts) >= 3:
            w, h = pts.max(axis=0) - pts.min(axis=0) + 1
            if w * h <= MAX_RASTER_AREA_PER_POINT * len(pts):
                return _banded_alpha_shape(pts, alpha)
        return alpha_shape(delaunay(pts), alpha)
    except DegenerateGeometryError as exc:
        logger.warning(f"Skipping region of {len(pts)} points: {exc}")
        return None
