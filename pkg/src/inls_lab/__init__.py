"""Pseudospectral toolkit for i u_t + Laplace u + mu |x|^-b |u|^alpha u = 0."""

__version__ = "0.1.0"

from .grid import GridSpec, SpectralField, dilate, dump_field, hs_norm, load_field, lp_norm, make_grid
from .modspace import ModulationParams, WindowFamily, block, block_norms, mod_norm, stft_norm
from .exponents import Constants, ExponentReport, HypothesisError, ProblemParams, derive_all
from .evolution import SingularWeight, energy, g_difference, nonlinearity, propagate
from .solver import (NonContractionError, PicardOptions, SolverConfig, Trajectory,
                     lipschitz_probe, picard_solve, splitstep_solve, ytnorm)
from .highlow import SplitResult, WindowConditionError, global_run, perturbed_solve, split
from .corpus import corpus

__all__ = [
    "GridSpec", "SpectralField", "make_grid", "lp_norm", "hs_norm", "dilate", "dump_field",
    "load_field", "ModulationParams", "WindowFamily", "block", "block_norms", "mod_norm",
    "stft_norm", "Constants", "ExponentReport", "HypothesisError", "ProblemParams", "derive_all",
    "SingularWeight", "energy", "g_difference", "nonlinearity", "propagate",
    "NonContractionError", "PicardOptions", "SolverConfig", "Trajectory", "lipschitz_probe",
    "picard_solve", "splitstep_solve", "ytnorm", "SplitResult", "WindowConditionError",
    "global_run", "perturbed_solve", "split", "corpus",
]
