"""Temporal quantum correlations of qubits and qutrits.

States over time (PDO and phase-point constructions), robustness measures
(TER, ER, TSR, TNR), an in-repo conic interior-point solver, measurement
optimization and an experiment runner.
"""
from .config import ExperimentConfig, load_config, parse_config
from .dynamics import Channel, choi
from .errors import CapacityError, ConfigError, ConvergenceError, DimensionError, SolverError, TempcorrError
from .measurements import Pvm, mub_pvms
from .optmeas import SearchOptions, maximize
from .robustness import (
    er_ppt,
    evaluate,
    make_assemblage,
    make_behavior,
    separability_g,
    ter_closed_form,
    ter_sdp,
    tnr,
    tnr_lhv,
    tsr,
)
from .sot import StateOverTime, build, build_pdo, build_wigner, causality_f, nsit_check
from .sweep import run_experiment, run_sweep

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "Channel",
    "ConfigError",
    "ConvergenceError",
    "DimensionError",
    "ExperimentConfig",
    "Pvm",
    "SearchOptions",
    "SolverError",
    "StateOverTime",
    "TempcorrError",
    "build",
    "build_pdo",
    "build_wigner",
    "causality_f",
    "choi",
    "er_ppt",
    "evaluate",
    "load_config",
    "make_assemblage",
    "make_behavior",
    "maximize",
    "mub_pvms",
    "nsit_check",
    "parse_config",
    "run_experiment",
    "run_sweep",
    "separability_g",
    "ter_closed_form",
    "ter_sdp",
    "tnr",
    "tnr_lhv",
    "tsr",
]
