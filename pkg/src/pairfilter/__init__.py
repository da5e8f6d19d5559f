"""Filtered photon-pair source models.

Submodules: :mod:`spectral` (joint spectra and numerical filtering),
:mod:`gaussian` (closed forms), :mod:`detection` (count statistics and CAR),
:mod:`entanglement` (two-photon visibilities), :mod:`scenario` (sweeps) and
:mod:`reference` (a measured time-bin operating point).
"""

from .detection import ChannelSpec, RateReport, coincidences, mu_opt_and_car_max
from .errors import (
    CoverageError,
    DegenerateInputError,
    DomainError,
    InvalidGaussianError,
    PairFilterError,
    ResolutionError,
    ScenarioError,
)
from .gaussian import closed_form_report, coeffs, coeffs_from_fwhm
from .scenario import VERSION as __version__
from .scenario import run_scenario
from .spectral import FilterSpec, GridConfig, MuTriple, SourceSpec, build_jsa, filtered_means, schmidt_purity

__all__ = [
    "ChannelSpec",
    "CoverageError",
    "DegenerateInputError",
    "DomainError",
    "FilterSpec",
    "GridConfig",
    "InvalidGaussianError",
    "MuTriple",
    "PairFilterError",
    "RateReport",
    "ResolutionError",
    "ScenarioError",
    "SourceSpec",
    "__version__",
    "build_jsa",
    "closed_form_report",
    "coeffs",
    "coeffs_from_fwhm",
    "coincidences",
    "filtered_means",
    "mu_opt_and_car_max",
    "run_scenario",
    "schmidt_purity",
]
