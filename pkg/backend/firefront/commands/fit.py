"""firefront fit: fit distributions to a column of samples."""

import argparse
import logging
from pathlib import Path

import pandas as pd

from firefront.commands._common import add_config_argument, load_config, write_json
from firefront.errors import ConfigError, LoadError
from firefront.models import SampleSet
from firefront.services.fitting_service import fit_samples
from firefront.services.plotting_service import histogram_with_fit, save_figure

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("fit", help="Fit exponential/Erlang models to samples")
    parser.add_argument("--samples", type=Path, required=True, help="CSV file of samples")
    parser.add_argument("--column", default=None, help="Column name (default: the only column)")
    parser.add_argument("--unit", default="", help="Unit recorded with the fit")
    parser.add_argument(
        "--family", nargs="+", choices=["exponential", "erlang"], default=["exponential"]
    )
    parser.add_argument(
        "--method",
        nargs="+",
        choices=["moment_matching", "mcmc"],
        default=["moment_matching", "mcmc"],
    )
    add_config_argument(parser, required=False)
    parser.add_argument("--seed", type=int, default=None, help="Override the config seed")
    parser.add_argument("--out", type=Path, required=True, help="Fit results JSON")
    parser.add_argument("--plot", type=Path, default=None, help="Histogram-with-fit PNG")
    parser.add_argument("--semilog", action="store_true", help="Log-scale density axis")
    parser.set_defaults(handler=handle)


def read_samples(path: Path, column: str | None, unit: str = "") -> SampleSet:
    """One column of a CSV: the named one, or the only one present."""
    try:
        table = pd.read_csv(path)
    except (OSError, ValueError) as exc:
        raise LoadError(path, str(exc)) from exc
    if column is None:
        if table.shape[1] != 1:
            raise ConfigError(f"{path} has {table.shape[1]} columns; pass --column")
        column = table.columns[0]
    elif column not in table.columns:
        raise ConfigError(f"{path} has no column '{column}' (columns: {list(table.columns)})")
    values = pd.to_numeric(table[column], errors="coerce").dropna().to_numpy()
    return SampleSet(values, unit=unit, name=str(column))


def handle(args: argparse.Namespace) -> int:
    config = load_config(args.config, seed=args.seed)
    samples = read_samples(args.samples, args.column, args.unit)
    fits = [
        fit_samples(
            samples, family, method, config.fitting.mcmc, seed=config.seed, bins=config.fitting.bins
        )
        for family in args.family
        for method in args.method
    ]
    write_json(args.out, [fit.model_dump(mode="json", by_alias=True) for fit in fits])
    if args.plot is not None:
        save_figure(
            histogram_with_fit(samples, fits, semilog=args.semilog, bins=config.fitting.bins),
            args.plot,
        )

    for fit in fits:
        line = f"{fit.family} [{fit.method}] n={fit.n}: lambda={fit.lam:.4g} k={fit.k}"
        if fit.credible:
            lo, hi = fit.credible["lambda"]
            line += f" 95% CI [{lo:.4g}, {hi:.4g}]"
        print(f"{line} nrmse={fit.nrmse:.4g}")
    return 0
