"""Quasi-normal modes of the emergent cavity in an atom-terminated waveguide."""

from .dynamics import (DdeConfig, DdeResult, FitResult, FitWindowError,
                       dde_pole_identity_gap, evolve_atom, fit_decay,
                       pole_check)
from .emission import (EmissionReport, modified_emission_formula,
                       modified_emission_numeric)
from .model import (ComplexFrequency, DimensionlessParams, PhysicalParams,
                    to_dimensionless, to_physical)
from .platforms import (CouplingReport, RamanSpec, RangeFlag, SquidLevels,
                        SquidSpec, raman_coupling, squid_coupling,
                        squid_level_spacing, to_model)
from .qnm import (ApproximationRangeError, ContourBox, ContourError, QnmMode,
                  SweepPoint, characteristic, characteristic_derivative,
                  count_roots_in_box, find_modes, lifetime, refine_root,
                  seed_mode, slowest_mode, sweep_decay)
from .scattering import (PotentialDescriptor, ScatterPoint, WaveSample,
                         enhancement_scan, phase_shift, potential_weight,
                         qnm_wavefunction)

__version__ = "0.1.0"

__all__ = [
    "ApproximationRangeError",
    "ComplexFrequency",
    "ContourBox",
    "ContourError",
    "CouplingReport",
    "DdeConfig",
    "DdeResult",
    "DimensionlessParams",
    "EmissionReport",
    "FitResult",
    "FitWindowError",
    "PhysicalParams",
    "PotentialDescriptor",
    "QnmMode",
    "RamanSpec",
    "RangeFlag",
    "ScatterPoint",
    "SquidLevels",
    "SquidSpec",
    "SweepPoint",
    "WaveSample",
    "characteristic",
    "characteristic_derivative",
    "count_roots_in_box",
    "dde_pole_identity_gap",
    "enhancement_scan",
    "evolve_atom",
    "find_modes",
    "fit_decay",
    "lifetime",
    "modified_emission_formula",
    "modified_emission_numeric",
    "phase_shift",
    "pole_check",
    "potential_weight",
    "qnm_wavefunction",
    "raman_coupling",
    "refine_root",
    "seed_mode",
    "slowest_mode",
    "squid_coupling",
    "squid_level_spacing",
    "sweep_decay",
    "to_dimensionless",
    "to_model",
    "to_physical",
    "__version__",
]
