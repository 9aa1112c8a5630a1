"""Point sets, clusterings, triangulations and alpha-shape boundaries."""

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

# int64 (N, 2) array of (x, y) pixel coordinates, no duplicates
PointSet = np.ndarray

NOISE = -1


@dataclass(frozen=True, eq=False)
class Clustering:
    labels: np.ndarray  # int (N,), >= 0 cluster id, -1 noise
    eps: float
    min_pts: int

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @property
    def n_noise(self) -> int:
        return int((self.labels == NOISE).sum())


@dataclass(frozen=True, eq=False)
class Triangulation:
    vertices: PointSet
    triangles: np.ndarray  # int (T, 3), counterclockwise in (x, y)


@dataclass(frozen=True, eq=False)
class AlphaBoundary:
    alpha: float
    vertices: PointSet
    boundary_edges: np.ndarray  # int (E, 2), i < j, lexicographically sorted
    retained: np.ndarray  # bool (T,) retained-triangle flags

    @property
    def boundary_points(self) -> PointSet:
        """Deduplicated edge endpoints in row-major (y, x) order."""
        if not self.boundary_edges.size:
            return np.empty((0, 2), dtype=np.int64)
        pts = self.vertices[np.unique(self.boundary_edges)]
        order = np.lexsort((pts[:, 0], pts[:, 1]))
        return pts[order]

    def loops(self) -> int:
        """Number of connected components of the boundary edge graph."""
        if not self.boundary_edges.size:
            return 0
        used, inverse = np.unique(self.boundary_edges, return_inverse=True)
        inverse = inverse.reshape(-1, 2)
        n = used.size
        graph = coo_matrix(
            (np.ones(len(inverse)), (inverse[:, 0], inverse[:, 1])), shape=(n, n)
        )
        count, _ = connected_components(graph, directed=False)
        return int(count)


@dataclass(frozen=True, eq=False)
class RegionBoundary:
    """Boundary of one clustered region in one frame."""

    region_id: int
    points: PointSet
    boundary: AlphaBoundary
