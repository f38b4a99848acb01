"""Sensitivity optimization for resonant multi-diamond atom-interferometer detector pairs."""

from .analytic import (AnalyticOptimum, Regime, approx_np, bottom_constraint_thresholds,
                       min_resonant_frequency, optimal_height_lossy, optimal_np_exact, select_regime)
from .core import (SR87, AtomSpecies, DetectorGeometry, DomainError, NoiseBudget, PulseScheme,
                   get_species, pulse_count)
from .noise import phase_uncertainty, strain_uncertainty
from .numeric import (InfeasibleError, OptimumRecord, SearchConstraints, compare_with_analytic,
                      optimize_at_frequency, sweep)
from .response import broadband_amplitude, response_curve, signal_amplitude_resonant
from .trajectory import arm_paths, check_confinement, envelope, min_required_height

__version__ = "0.1.0"
