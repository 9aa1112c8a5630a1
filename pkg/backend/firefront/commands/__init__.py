"""CLI subcommands; each module exposes register(subparsers)."""

from firefront.commands import advise, calibrate, config_init, export, fit, inpaint, run, synth

COMMANDS = (synth, calibrate, run, export, advise, fit, inpaint, config_init)

__all__ = ["COMMANDS"]
