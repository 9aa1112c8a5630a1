"""Clustering service layer: deterministic DBSCAN over integer pixel coordinates."""

import logging

import numpy as np
from scipy import ndimage
from scipy.signal import fftconvolve
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from firefront.errors import ConfigError
from firefront.models import NOISE, BinaryMask, Clustering, PointSet

__all__ = ["as_points", "mask_points", "dbscan", "split_regions"]

logger = logging.getLogger(__name__)

# Bounding boxes above this many cells use the KD-tree path instead of the raster
MAX_RASTER_CELLS = 1 << 22

_SQRT2 = float(np.sqrt(2.0))


def as_points(points) -> PointSet:
    pts = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    if len(np.unique(pts, axis=0)) != len(pts):
        raise ValueError("point set contains duplicate coordinates")
    return pts


def mask_points(mask: BinaryMask) -> PointSet:
    """(x, y) coordinates of set pixels in row-major (y, x) order."""
    ys, xs = np.nonzero(mask)
    return np.column_stack([xs, ys]).astype(np.int64)


def _merge_components(n_nodes: int, edges: np.ndarray) -> np.ndarray:
    """Connected-component index of each node given an (E, 2) edge list."""
    if n_nodes == 0:
        return np.empty(0, dtype=np.int64)
    graph = coo_matrix(
        (np.ones(len(edges), dtype=np.int8), (edges[:, 0], edges[:, 1])),
        shape=(n_nodes, n_nodes),
    )
    _, labels = connected_components(graph, directed=False)
    return labels.astype(np.int64)


def _adjacency_structure(eps: float) -> np.ndarray:
    if eps >= _SQRT2:
        return np.ones((3, 3), dtype=bool)
    if eps >= 1.0:
        return ndimage.generate_binary_structure(2, 1)
    structure = np.zeros((3, 3), dtype=bool)
    structure[1, 1] = True
    return structure


def _raster_core(pts: PointSet, eps: float, min_pts: int):
    """
    Core flags, core components and query anchors via a raster of the points.

    Core counts come from a disk convolution. Core pixels are first joined
    through pixel adjacency (every adjacent pair is within eps), then the
    remaining eps-links are found among component-boundary core pixels only:
    the closest pair between two components always lies on their boundaries,
    as does the closest core pixel of a component to any outside point.
    """
    origin = pts.min(axis=0)
    xs, ys = (pts - origin).T
    height, width = int(ys.max()) + 1, int(xs.max()) + 1
    grid = np.zeros((height, width), dtype=bool)
    grid[ys, xs] = True

    reach = int(np.floor(eps))
    oy, ox = np.mgrid[-reach : reach + 1, -reach : reach + 1]
    disk = (ox * ox + oy * oy <= eps * eps).astype(np.float64)
    counts = np.rint(fftconvolve(grid.astype(np.float64), disk, mode="same")).astype(np.int64)
    core_grid = grid & (counts >= min_pts)

    structure = _adjacency_structure(eps)
    comp_grid, n_comp = ndimage.label(core_grid, structure=structure)
    if eps >= 1.0:
        interior = ndimage.binary_erosion(core_grid, structure=structure, border_value=0)
        anchor_grid = core_grid & ~interior
    else:
        anchor_grid = core_grid

    anchor_yx = np.argwhere(anchor_grid)
    if len(anchor_yx) > 1 and eps >= 1.0:
        pairs = cKDTree(anchor_yx).query_pairs(r=eps, output_type="ndarray")
        a_comp = comp_grid[anchor_yx[:, 0], anchor_yx[:, 1]] - 1
        edges = a_comp[pairs] if len(pairs) else np.empty((0, 2), dtype=np.int64)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    merged = _merge_components(n_comp, edges)

    is_core = core_grid[ys, xs]
    comp = np.full(len(pts), -1, dtype=np.int64)
    comp[is_core] = merged[comp_grid[ys[is_core], xs[is_core]] - 1]
    return is_core, comp, anchor_grid[ys, xs]


def _tree_core(pts: PointSet, eps: float, min_pts: int):
    """Same contract as _raster_core for sparse, widely spread points."""
    tree = cKDTree(pts)
    counts = tree.query_ball_point(pts, r=eps, return_length=True)
    is_core = counts >= min_pts
    core_idx = np.flatnonzero(is_core)
    comp = np.full(len(pts), -1, dtype=np.int64)
    if len(core_idx):
        pairs = cKDTree(pts[core_idx]).query_pairs(r=eps, output_type="ndarray")
        comp[core_idx] = _merge_components(len(core_idx), pairs.reshape(-1, 2))
    return is_core, comp, is_core.copy()


def dbscan(points, eps: float, min_pts: int) -> Clustering:
    """
    DBSCAN with Euclidean distance; core = at least min_pts points within eps,
    counting the point itself.

    Cluster ids follow the first core point of each cluster in a row-major
    (y, x) scan. A border point reachable from several clusters joins the
    lowest id. Both rules make the result independent of input order.
    """
    if eps <= 0:
        raise ConfigError(f"eps must be > 0, got {eps}")
    if min_pts < 1:
        raise ConfigError(f"min_pts must be >= 1, got {min_pts}")
    pts = as_points(points)
    if len(pts) == 0:
        return Clustering(labels=np.empty(0, dtype=np.int64), eps=eps, min_pts=min_pts)

    span = pts.max(axis=0) - pts.min(axis=0) + 1
    if int(span[0]) * int(span[1]) <= MAX_RASTER_CELLS:
        is_core, comp, anchors = _raster_core(pts, eps, min_pts)
    else:
        is_core, comp, anchors = _tree_core(pts, eps, min_pts)

    labels = np.full(len(pts), NOISE, dtype=np.int64)
    if not is_core.any():
        return Clustering(labels=labels, eps=eps, min_pts=min_pts)

    # Row-major rank of each component's first core point -> cluster id
    scan = np.lexsort((pts[:, 0], pts[:, 1]))
    scan_core = scan[is_core[scan]]
    uniq, first = np.unique(comp[scan_core], return_index=True)
    cluster_of_comp = np.empty(int(comp.max()) + 1, dtype=np.int64)
    cluster_of_comp[uniq[np.argsort(first)]] = np.arange(len(uniq))
    labels[is_core] = cluster_of_comp[comp[is_core]]

    border_idx = np.flatnonzero(~is_core)
    if len(border_idx):
        anchor_idx = np.flatnonzero(anchors)
        anchor_labels = labels[anchor_idx]
        hits = cKDTree(pts[anchor_idx]).query_ball_point(pts[border_idx], r=eps)
        for i, near in zip(border_idx, hits, strict=True):
            if near:
                labels[i] = anchor_labels[near].min()

    clustering = Clustering(labels=labels, eps=eps, min_pts=min_pts)
    logger.debug(
        f"dbscan eps={eps} min_pts={min_pts}: {len(pts)} points, "
        f"{clustering.n_clusters} clusters, {clustering.n_noise} noise"
    )
    return clustering


def split_regions(mask: BinaryMask, eps: float, min_pts: int) -> list[PointSet]:
    """
    One point set per cluster, noise dropped.

    Ordered by descending size, ties by the smallest (y, x) member.
    """
    pts = mask_points(mask)
    clustering = dbscan(pts, eps, min_pts)
    regions = [pts[clustering.labels == cid] for cid in range(clustering.n_clusters)]
    # Members are already row-major, so row 0 is each region's smallest (y, x)
    regions.sort(key=lambda r: (-len(r), int(r[0, 1]), int(r[0, 0])))
    return regions
