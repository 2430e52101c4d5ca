"""Entanglement of one-particle states in the 1-D Anderson model.

Core objects: :class:`DisorderConfig` describes a reproducible disorder
realization, :func:`build_hamiltonian` turns it into an O(N) operator,
:func:`ground_state` diagonalizes it, and the entanglement, localization,
dynamics and ensemble modules compute pairwise/average concurrence,
decay lengths, Crank-Nicolson time evolution, and disorder-averaged
sweeps on top.  The ``anderson-ent`` CLI wraps the standard experiments.
"""

__version__ = "0.1.0"

from .dynamics import (EvolutionRecord, InitialState, PropagatorConfig,
                       evolve_record, step)
from .eigensolver import EigenPair, ground_state, lowest_k
from .ensemble import (CriticalLambdaResult, Observable, SweepConfig,
                       SweepResult, child_seed, run_critical_lambda, run_sweep)
from .entanglement import (average_concurrence, center_profile,
                           concurrence_pair, nn_profile)
from .errors import (AndersonEntError, ConfigError, ConvergenceError,
                     DataError, DimensionError, ExtendedStateError,
                     InsufficientDataError, NumericalError)
from .fitting import (FitResult, find_interior_max, fit_exp_double,
                      fit_exp_single, linear_fit)
from .lattice import (BoundaryCondition, DisorderConfig, Hamiltonian,
                      build_hamiltonian, sample_disorder)
from .localization import (LocalizationReport, localization_center,
                           localization_length, participation_ratio)
from .state import State

__all__ = [
    "__version__",
    "AndersonEntError", "BoundaryCondition", "ConfigError",
    "ConvergenceError", "CriticalLambdaResult", "DataError",
    "DimensionError", "DisorderConfig", "EigenPair", "EvolutionRecord",
    "ExtendedStateError", "FitResult", "Hamiltonian", "InitialState",
    "InsufficientDataError", "LocalizationReport", "NumericalError",
    "Observable", "PropagatorConfig", "State", "SweepConfig", "SweepResult",
    "average_concurrence", "build_hamiltonian", "center_profile",
    "child_seed", "concurrence_pair", "evolve_record", "find_interior_max",
    "fit_exp_double", "fit_exp_single", "ground_state", "linear_fit",
    "localization_center", "localization_length", "lowest_k", "nn_profile",
    "participation_ratio", "run_critical_lambda", "run_sweep",
    "sample_disorder", "step",
]
