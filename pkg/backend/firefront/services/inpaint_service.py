"""Inpaint service layer: fills occluded pixels from the surrounding image."""

import logging
from typing import Literal

import cv2
import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from firefront.errors import InsufficientBoundaryError, KindMismatchError
from firefront.models import BinaryMask, Frame
from firefront.schemas.config import ColorThresholds, ThermalBand
from firefront.services.segmentation_service import segment_visual

__all__ = [
    "boundary_ring",
    "harmonic_fill",
    "transport_fill",
    "inpaint",
    "auto_occlusion",
]

logger = logging.getLogger(__name__)

InpaintMode = Literal["harmonic", "transport"]

_NEIGHBORS = ((-1, 0), (1, 0), (0, -1), (0, 1))
# Bounding-box margin kept around the hole for the transport stencils
_MARGIN = 3
# Conductance scale of the diffusion step, as a fraction of the ring value range
_EDGE_SCALE = 0.1


def _check_mask(mask: BinaryMask, shape: tuple[int, int]) -> None:
    if mask.shape != shape:
        raise ValueError(f"occlusion mask shape {mask.shape} does not match frame {shape}")
    if mask.all():
        raise InsufficientBoundaryError("Occlusion mask covers the whole frame")
    touches = (mask[0].any(), mask[-1].any(), mask[:, 0].any(), mask[:, -1].any())
    if all(touches):
        raise InsufficientBoundaryError("Occlusion mask touches all four image borders")


def boundary_ring(mask: BinaryMask) -> BinaryMask:
    """Unmasked pixels 4-adjacent to the mask."""
    cross = cv2.getStructuringElement(cv2.MORPH_CROSS, (3, 3))
    dilated = cv2.dilate(mask.astype(np.uint8), cross).astype(bool)
    return dilated & ~mask


def harmonic_fill(channels: np.ndarray, mask: BinaryMask) -> np.ndarray:
    """
    Solve the discrete Laplace equation on the masked pixels.

    channels is (H, W, C) float. Unmasked neighbors act as Dirichlet data;
    the image edge is a zero-flux boundary (only in-image neighbors count).
    Returns (N, C) values in row-major mask order.
    """
    height, width = mask.shape
    ys, xs = np.nonzero(mask)
    n = len(ys)
    index = -np.ones((height, width), dtype=np.int64)
    index[ys, xs] = np.arange(n)

    degree = np.zeros(n)
    rhs = np.zeros((n, channels.shape[2]))
    rows, cols = [], []
    for dy, dx in _NEIGHBORS:
        ny, nx = ys + dy, xs + dx
        inside = (ny >= 0) & (ny < height) & (nx >= 0) & (nx < width)
        degree += inside
        src = np.flatnonzero(inside)
        nbr = index[ny[inside], nx[inside]]
        unknown = nbr >= 0
        rows.append(src[unknown])
        cols.append(nbr[unknown])
        rhs[src[~unknown]] += channels[ny[inside][~unknown], nx[inside][~unknown]]
    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals = [-np.ones(len(r)) for r in rows[:-1]] + [degree]

    system = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsc()
    return splu(system).solve(rhs)


def _laplacian(u: np.ndarray) -> np.ndarray:
    p = np.pad(u, 1, mode="edge")
    return p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:] - 4.0 * u


def _transport_step(u: np.ndarray, edge_scale: float) -> np.ndarray:
    """
    Isophote transport du = (grad(lap u) . grad_perp u / |grad u|) * |grad u|,
    with a slope-limited gradient norm, plus one edge-stopping diffusion flux.
    """
    p = np.pad(u, 1, mode="edge")
    lap = _laplacian(u)
    lp = np.pad(lap, 1, mode="edge")
    lap_x = 0.5 * (lp[1:-1, 2:] - lp[1:-1, :-2])
    lap_y = 0.5 * (lp[2:, 1:-1] - lp[:-2, 1:-1])

    fx = p[1:-1, 2:] - u
    bx = u - p[1:-1, :-2]
    fy = p[2:, 1:-1] - u
    by = u - p[:-2, 1:-1]
    ux, uy = 0.5 * (fx + bx), 0.5 * (fy + by)
    norm = np.sqrt(ux * ux + uy * uy) + 1e-12
    beta = (-lap_x * uy + lap_y * ux) / norm

    forward = np.sqrt(
        np.minimum(bx, 0) ** 2
        + np.maximum(fx, 0) ** 2
        + np.minimum(by, 0) ** 2
        + np.maximum(fy, 0) ** 2
    )
    backward = np.sqrt(
        np.maximum(bx, 0) ** 2
        + np.minimum(fx, 0) ** 2
        + np.maximum(by, 0) ** 2
        + np.minimum(fy, 0) ** 2
    )
    transport = beta * np.where(beta > 0, forward, backward)

    def flux(diff: np.ndarray) -> np.ndarray:
        return np.exp(-((diff / edge_scale) ** 2)) * diff

    diffusion = flux(fx) - flux(bx) + flux(fy) - flux(by)
    return transport + diffusion


def transport_fill(
    channels: np.ndarray,
    mask: BinaryMask,
    max_iters: int = 5000,
    tol: float = 1e-4,
    dt: float = 0.1,
) -> tuple[np.ndarray, bool, int]:
    """
    Iterative isophote-transport fill of the masked pixels.

    Starts from the ring mean, clips every update to the ring's value range
    per channel, and stops once the largest per-pixel change drops below tol.
    Returns (filled (H, W, C), converged, iterations).
    """
    ring = boundary_ring(mask)
    ys, xs = np.nonzero(mask)
    y0, y1 = max(ys.min() - _MARGIN, 0), min(ys.max() + _MARGIN + 1, mask.shape[0])
    x0, x1 = max(xs.min() - _MARGIN, 0), min(xs.max() + _MARGIN + 1, mask.shape[1])
    box_mask = mask[y0:y1, x0:x1]

    out = channels.copy()
    converged_all, iters_max = True, 0
    for c in range(channels.shape[2]):
        ring_vals = channels[..., c][ring]
        lo, hi = float(ring_vals.min()), float(ring_vals.max())
        edge_scale = max(_EDGE_SCALE * (hi - lo), 1e-6)
        u = channels[y0:y1, x0:x1, c].copy()
        u[box_mask] = ring_vals.mean()
        np.clip(u, lo, hi, out=u, where=box_mask)

        best, best_change, converged = u.copy(), np.inf, False
        for it in range(1, max_iters + 1):
            step = _transport_step(u, edge_scale)
            nxt = u.copy()
            nxt[box_mask] = np.clip(u[box_mask] + dt * step[box_mask], lo, hi)
            change = float(np.abs(nxt[box_mask] - u[box_mask]).max())
            u = nxt
            if change < best_change:
                best, best_change = u.copy(), change
            if change < tol:
                converged = True
                break
        iters_max = max(iters_max, it)
        converged_all &= converged
        out[y0:y1, x0:x1, c] = best if not converged else u
    return out, converged_all, iters_max


def inpaint(
    frame: Frame,
    occ: BinaryMask,
    max_iters: int = 5000,
    tol: float = 1e-4,
    mode: InpaintMode = "harmonic",
    dt: float = 0.1,
) -> Frame:
    """
    Replace occluded pixels; every unmasked pixel is passed through bit-identical.

    Filled values stay within the [min, max] of the occlusion's boundary ring
    per channel. Visual output is rounded back to uint8.
    """
    occ = np.asarray(occ, dtype=bool)
    if not occ.any():
        return frame.with_pixels(frame.pixels.copy())
    _check_mask(occ, frame.shape)

    channels = frame.pixels.astype(np.float64)
    if channels.ndim == 2:
        channels = channels[..., None]

    if mode == "harmonic":
        filled = channels.copy()
        filled[occ] = harmonic_fill(channels, occ)
    else:
        filled, converged, iterations = transport_fill(channels, occ, max_iters, tol, dt)
        if not converged:
            logger.warning(
                f"Frame {frame.index}: transport inpainting did not reach tol {tol} "
                f"in {iterations} iterations; using the best iterate"
            )

    ring = boundary_ring(occ)
    lo = channels[ring].min(axis=0)
    hi = channels[ring].max(axis=0)
    values = np.clip(filled[occ], lo, hi)

    out = np.array(frame.pixels, copy=True)
    if frame.kind == "visual":
        out[occ] = np.clip(np.rint(values), 0, 255).astype(np.uint8)
    else:
        out[occ] = values[:, 0]
    logger.debug(f"Frame {frame.index}: inpainted {int(occ.sum())} pixels ({mode})")
    return frame.with_pixels(out)


def auto_occlusion(
    frame: Frame, thresholds: ColorThresholds | ThermalBand | tuple[float, float]
) -> BinaryMask:
    """Occluder mask from segmentation thresholds (color box or temperature band)."""
    if isinstance(thresholds, ColorThresholds):
        return segment_visual(frame, thresholds)
    if frame.kind != "infrared":
        raise KindMismatchError(
            f"Temperature occlusion band needs an infrared frame, got {frame.kind}"
        )
    lo, hi = (
        (thresholds.t_lo, thresholds.t_hi)
        if isinstance(thresholds, ThermalBand)
        else thresholds
    )
    return (frame.pixels >= lo) & (frame.pixels < hi)
