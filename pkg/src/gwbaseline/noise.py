"""Detected atoms under per-pulse loss and the shot-noise strain uncertainty."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, NoiseBudget
from .response import sinc


class NoAtomsError(ArithmeticError):
    """The surviving atom number underflows to zero."""


class SignalNullError(ZeroDivisionError):
    """The response vanishes, so the strain uncertainty is unbounded."""


def detected_atoms(N0: float, lam: float, NP) -> float:
    if N0 <= 0:
        raise DomainError("N0 must be positive")
    if not 0 <= lam < 1:
        raise DomainError("loss per pulse must lie in [0, 1)")
    if NP < 1:
        raise DomainError("pulse count must be >= 1")
    return N0 * math.exp(NP * math.log1p(-lam))


def log_phase_uncertainty(noise: NoiseBudget, NP):
    """Natural log of the phase uncertainty; accepts scalar or array NP.

    Working in logs keeps (1 - lambda)^NP representable for large pulse counts.
    """
    if noise.is_fixed:
        return np.log(noise.fixed_phase_uncertainty) + np.zeros_like(np.asarray(NP, dtype=float))
    log_atoms = math.log(noise.initial_atoms_N0) + np.asarray(NP, dtype=float) * math.log1p(-noise.loss_lambda)
    return 0.5 * (math.log(2.0) - math.log(noise.repetitions_nu) - log_atoms
                  - 2.0 * math.log(noise.contrast_C))


def phase_uncertainty(noise: NoiseBudget, NP) -> float:
    """sqrt(2/(nu N_at C^2)), or the fixed value when one is configured."""
    if noise.is_fixed:
        return noise.fixed_phase_uncertainty
    n_at = detected_atoms(noise.initial_atoms_N0, noise.loss_lambda, NP)
    if n_at == 0.0 or not math.isfinite(1.0 / n_at):
        raise NoAtomsError(f"no atoms survive {NP} pulses at loss {noise.loss_lambda}")
    return math.sqrt(2.0 / (noise.repetitions_nu * n_at * noise.contrast_C ** 2))


@dataclass(frozen=True)
class StrainUncertainty:
    delta_h: float
    phase_uncertainty: float
    detected_atoms: float


def strain_uncertainty(noise: NoiseBudget, k, L, N, Q, NP, sinc_arg=None) -> StrainUncertainty:
    """Delta h = Delta Phi / (2 k L N Q |sinc(sinc_arg)|); no sinc factor when omitted."""
    if k <= 0 or L <= 0:
        raise DomainError("k and L must be positive")
    if N < 1 or Q < 1:
        raise DomainError("N and Q must be >= 1")
    dphi = phase_uncertainty(noise, NP)
    factor = 1.0 if sinc_arg is None else abs(sinc(sinc_arg))
    if factor == 0.0 or (sinc_arg is not None and sinc_arg != 0
                         and abs(math.remainder(sinc_arg, math.pi)) < 1e-15 * abs(sinc_arg)):
        raise SignalNullError("signal null: division by zero response")
    if noise.is_fixed:
        atoms = noise.initial_atoms_N0
    else:
        atoms = detected_atoms(noise.initial_atoms_N0, noise.loss_lambda, NP)
    return StrainUncertainty(dphi / (2.0 * k * L * N * Q * factor), dphi, atoms)
