"""Named, reproducible Monte Carlo experiments with machine-readable output."""

from .base import BinnedDensity, EstimateWithError, ExperimentResult, run_experiment
from .suite import EXPERIMENTS

__all__ = ["EXPERIMENTS", "run_experiment", "EstimateWithError",
           "BinnedDensity", "ExperimentResult"]
