"""firefront export: copy a dataset bundle, keeping only the selected members."""

import argparse
from pathlib import Path

from firefront.services.export_service import DatasetBundle, read_bundle, write_bundle

MEMBERS = ("labels", "boundaries", "velocity", "displacements", "fits")


def register(subparsers) -> None:
    parser = subparsers.add_parser("export", help="Re-export a bundle with a member subset")
    parser.add_argument("--bundle", type=Path, required=True, help="Existing bundle directory")
    parser.add_argument("--out", type=Path, required=True, help="Output bundle directory")
    parser.add_argument(
        "--members", nargs="+", choices=MEMBERS, default=list(MEMBERS), help="Members to keep"
    )
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    source = read_bundle(args.bundle)
    keep = set(args.members)
    bundle = DatasetBundle(
        labels=source.labels if "labels" in keep else [],
        boundaries=source.boundaries if "boundaries" in keep else [],
        velocity=source.velocity if "velocity" in keep else None,
        displacements=source.displacements if "displacements" in keep else None,
        fits=source.fits if "fits" in keep else None,
        manifest=source.manifest,
    )
    manifest_path = write_bundle(bundle, args.out)
    print(f"Wrote {len(bundle.manifest.files)} files to {manifest_path.parent}")
    return 0
