"""Service layer modules."""

from firefront.services.export_service import read_bundle, write_bundle
from firefront.services.fitting_service import fit_samples
from firefront.services.imagery_service import load_sequence
from firefront.services.inpaint_service import inpaint
from firefront.services.pipeline_service import advise, run_pipeline
from firefront.services.synth_service import render, write_scenario

__all__ = [
    "load_sequence",
    "inpaint",
    "fit_samples",
    "run_pipeline",
    "advise",
    "write_bundle",
    "read_bundle",
    "render",
    "write_scenario",
]
