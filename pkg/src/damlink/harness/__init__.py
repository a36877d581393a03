"""Experiment orchestration: configuration profiles, sweeps and the CLI."""

from .config import DerivedConstants, ExperimentConfig, dbm_to_watts, draw_seed, load_profile
from .experiments import cmd_ber, cmd_gen_channel, cmd_papr, cmd_spectral_efficiency

__all__ = [
    "DerivedConstants",
    "ExperimentConfig",
    "dbm_to_watts",
    "draw_seed",
    "load_profile",
    "cmd_ber",
    "cmd_gen_channel",
    "cmd_papr",
    "cmd_spectral_efficiency",
]
