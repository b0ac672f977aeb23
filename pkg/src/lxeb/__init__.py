"""Random circuit sampling workbench: brickwork ensembles, the LXEB test,
exact Haar moment oracles and concentration-bound calculators."""

from .core import (
    CircuitInstance,
    OutputDistribution,
    Statevector,
    apply_two_qubit_gate,
    full_distribution,
    new_zero_state,
    run_circuit,
    sample_outcomes,
)
from .ensembles import EnsembleSpec, build_brickwork, build_coarse_grained
from .errors import CapacityError, ConfigError
from .estimators import lxeb_statistic, lxeb_test
from .seeding import SeedPlan, derive_trial_seed

__version__ = "0.1.0"
