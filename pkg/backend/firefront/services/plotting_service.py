"""Plotting service layer: histogram fits, boundary overlays and displacement quivers."""

import logging
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from firefront.errors import ExportError
from firefront.models import DisplacementField, Frame, SampleSet
from firefront.schemas.results import FitResult
from firefront.services._registry import get_family
from firefront.services.segmentation_service import render_frame_rgb
from firefront.services.stats_service import Bins, histogram_density

__all__ = [
    "figure_to_rgb",
    "save_figure",
    "histogram_with_fit",
    "boundary_overlay",
    "displacement_quiver",
]

logger = logging.getLogger(__name__)

# Figure defaults - hardcoded for easy tweaking
FIGURE_DPI = 100
FIGURE_SIZE = (6.4, 4.0)
METHOD_STYLES = {"moment_matching": "--", "mcmc": "-"}
REGION_COLORS = ("#00e5ff", "#ff00d4", "#ffe600", "#7cff00", "#ff5400", "#ffffff")


def _new_figure(figsize: tuple[float, float] = FIGURE_SIZE) -> Figure:
    fig = Figure(figsize=figsize, dpi=FIGURE_DPI)
    FigureCanvasAgg(fig)
    return fig


def figure_to_rgb(fig: Figure) -> np.ndarray:
    """Rasterize a figure to a uint8 (H, W, 3) RGB array."""
    canvas = fig.canvas if isinstance(fig.canvas, FigureCanvasAgg) else FigureCanvasAgg(fig)
    canvas.draw()
    return np.asarray(canvas.buffer_rgba())[..., :3].copy()


def save_figure(fig: Figure, path: str | Path) -> Path:
    path = Path(path)
    try:
        fig.savefig(path, dpi=FIGURE_DPI, bbox_inches="tight")
    except (OSError, ValueError) as exc:
        raise ExportError(path, str(exc)) from exc
    logger.info(f"Wrote figure {path}")
    return path


def histogram_with_fit(
    s: SampleSet, fits: list[FitResult], semilog: bool = False, bins: Bins = None
) -> Figure:
    """
    Density histogram of a sample set with each fitted pdf drawn on top.

    MCMC fits also shade the pdf band spanned by their 95% credible interval
    on lambda. semilog puts the density axis on a log scale.
    """
    density, edges = histogram_density(s.values, bins)
    fig = _new_figure()
    ax = fig.add_subplot(1, 1, 1)
    ax.stairs(density, edges, fill=True, alpha=0.35, color="0.5", label="data")

    x = np.linspace(max(edges[0], 1e-9), edges[-1], 400)
    for fit in fits:
        fam = get_family(fit.family)
        label = f"{fit.family} {fit.method} (λ={fit.lam:.3g}"
        label += f", k={fit.k})" if fam.has_shape else ")"
        line = ax.plot(x, fam.pdf(x, fit.lam, fit.k), METHOD_STYLES[fit.method], label=label)
        if fit.credible and "lambda" in fit.credible:
            lo, hi = fit.credible["lambda"]
            a, b = fam.pdf(x, lo, fit.k), fam.pdf(x, hi, fit.k)
            ax.fill_between(
                x, np.minimum(a, b), np.maximum(a, b), color=line[0].get_color(), alpha=0.25
            )

    if semilog:
        ax.set_yscale("log")
    ax.set_xlabel(f"{s.name} ({s.unit})" if s.unit else s.name)
    ax.set_ylabel("density")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    return fig


def boundary_overlay(frame: Frame, boundary: np.ndarray) -> np.ndarray:
    """Paint (region_id, x, y) boundary rows onto the frame, one color per region."""
    image = render_frame_rgb(frame)
    rows = np.asarray(boundary, dtype=np.int64).reshape(-1, 3)
    for region in np.unique(rows[:, 0]):
        pts = rows[rows[:, 0] == region]
        hex_color = REGION_COLORS[int(region) % len(REGION_COLORS)]
        rgb = tuple(int(hex_color[i : i + 2], 16) for i in (1, 3, 5))
        image[pts[:, 2], pts[:, 1]] = rgb
    return image


def displacement_quiver(frame: Frame, field: DisplacementField, stride: int = 1) -> Figure:
    """Arrows from each matched source point to its destination, over the frame."""
    height, width = frame.shape
    fig = _new_figure((width / FIGURE_DPI * 2.0, height / FIGURE_DPI * 2.0))
    ax = fig.add_axes((0.0, 0.0, 1.0, 1.0))
    ax.imshow(render_frame_rgb(frame), interpolation="nearest")
    if len(field):
        src = field.src[::stride]
        d = field.d[::stride]
        ax.quiver(
            src[:, 0],
            src[:, 1],
            d[:, 0],
            d[:, 1],
            angles="xy",
            scale_units="xy",
            scale=1.0,
            color="#00e5ff",
            width=0.002,
        )
    ax.set_xlim(-0.5, width - 0.5)
    ax.set_ylim(height - 0.5, -0.5)
    ax.set_axis_off()
    return fig
