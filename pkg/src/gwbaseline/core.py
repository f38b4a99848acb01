"""Shared domain types, physical constants and unit conventions.

Everything is SI internally. Frequencies are in Hz and lengths in meters at
the interfaces.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise DomainError(message)


@dataclass(frozen=True)
class PhysicalConstants:
    g: float = 9.80665
    c: float = 2.99792458e8
    hbar: float = 1.054571817e-34

    def __post_init__(self):
        _require(self.g > 0 and self.c > 0 and self.hbar > 0,
                 "physical constants must be positive")


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class AtomSpecies:
    """Atom used for the interferometer and its optical transition."""

    name: str
    mass: float  # kg
    wave_number: float  # rad/m
    constants: PhysicalConstants = field(default=DEFAULT_CONSTANTS, repr=False)

    def __post_init__(self):
        _require(self.mass > 0, "species mass must be positive")
        _require(self.wave_number > 0, "wave number must be positive")

    @classmethod
    def from_wavelength(cls, name, mass, wavelength, constants=DEFAULT_CONSTANTS):
        _require(wavelength > 0, "optical wavelength must be positive")
        return cls(name, mass, 2.0 * math.pi / wavelength, constants)

    @property
    def recoil_velocity(self) -> float:
        return self.constants.hbar * self.wave_number / self.mass

    @property
    def eta(self) -> float:
        """g*m/(hbar*k) in 1/s."""
        return self.constants.g * self.mass / (self.constants.hbar * self.wave_number)


# small built-in table; anything else goes through AtomSpecies(...) directly
SPECIES_TABLE = {
    "sr87": (86.9088, 698.4e-9),
    "sr88": (87.9056, 698.4e-9),
    "yb171": (170.9363, 578.4e-9),
}


def get_species(name: str = "sr87", constants: PhysicalConstants = DEFAULT_CONSTANTS) -> AtomSpecies:
    try:
        mass_u, wavelength = SPECIES_TABLE[name.lower()]
    except KeyError:
        raise DomainError(f"unknown species {name!r}; known: {sorted(SPECIES_TABLE)}") from None
    return AtomSpecies.from_wavelength(name.lower(), mass_u * ATOMIC_MASS_UNIT, wavelength, constants)


SR87 = get_species("sr87")


@dataclass(frozen=True)
class DetectorGeometry:
    baseline_B: float
    fountain_H: float
    constants: PhysicalConstants = field(default=DEFAULT_CONSTANTS, repr=False)

    def __post_init__(self):
        _require(0 < self.fountain_H < self.baseline_B,
                 "fountain height must satisfy 0 < H < B")

    @classmethod
    def from_relative_height(cls, baseline_B, ell, constants=DEFAULT_CONSTANTS):
        _require(0 < ell < 1, "relative height must lie in (0, 1)")
        return cls(baseline_B, ell * baseline_B, constants)

    @property
    def separation_L(self) -> float:
        return self.baseline_B - self.fountain_H

    @property
    def rel_height_ell(self) -> float:
        return self.fountain_H / self.baseline_B

    @property
    def tau_B(self) -> float:
        return self.baseline_B / self.constants.c

    @property
    def tau_L(self) -> float:
        return self.separation_L / self.constants.c


def pulse_count(Q, N):
    """Total number of single-photon pulses for Q diamonds of LMT order N."""
    return 4 * Q * N - 2 * Q + 1


@dataclass(frozen=True)
class PulseScheme:
    diamonds_Q: int
    lmt_N: int
    interrogation_T: float
    require_even: bool = False

    def __post_init__(self):
        _require(isinstance(self.diamonds_Q, int) and self.diamonds_Q >= 1,
                 "Q must be a positive integer")
        _require(isinstance(self.lmt_N, int) and self.lmt_N >= 1,
                 "N must be a positive integer")
        if self.require_even:
            _require(self.lmt_N >= 2 and self.lmt_N % 2 == 0, "N must be even and >= 2")
        _require(self.interrogation_T > 0, "interrogation time must be positive")

    @property
    def total_pulses_NP(self) -> int:
        return pulse_count(self.diamonds_Q, self.lmt_N)

    @property
    def total_time_TAI(self) -> float:
        return 2 * self.diamonds_Q * self.interrogation_T


@dataclass(frozen=True)
class NoiseBudget:
    """Phase-noise model: shot noise with per-pulse loss, or a fixed phase uncertainty.

    When ``fixed_phase_uncertainty`` is set it replaces the shot-noise value and
    its normalization (rad or rad/sqrt(Hz)) is carried through unchanged.
    ``atom_flux`` and ``integration_time`` may be given instead of
    ``repetitions_nu``; the repetitions are then flux*time/N0, which keeps
    nu*N0 equal to the total number of atoms sent through the campaign.
    """

    loss_lambda: float = 0.0
    contrast_C: float = 1.0
    repetitions_nu: float = 1.0
    initial_atoms_N0: float = 1.0
    fixed_phase_uncertainty: float | None = None
    atom_flux: float | None = None
    integration_time: float | None = None

    def __post_init__(self):
        _require(0 <= self.loss_lambda < 1, "loss per pulse must lie in [0, 1)")
        _require(0 < self.contrast_C <= 1, "contrast must lie in (0, 1]")
        _require(self.initial_atoms_N0 > 0, "initial atom number must be positive")
        if self.fixed_phase_uncertainty is not None:
            _require(self.fixed_phase_uncertainty > 0, "fixed phase uncertainty must be positive")
        if (self.atom_flux is None) != (self.integration_time is None):
            raise DomainError("atom_flux and integration_time must be given together")
        if self.atom_flux is not None:
            _require(self.atom_flux > 0 and self.integration_time > 0,
                     "atom flux and integration time must be positive")
            object.__setattr__(self, "repetitions_nu",
                               self.atom_flux * self.integration_time / self.initial_atoms_N0)
        _require(self.repetitions_nu > 0, "repetitions must be positive")

    @property
    def is_fixed(self) -> bool:
        return self.fixed_phase_uncertainty is not None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GwSignal:
    strain_h: float
    frequency_f: float

    def __post_init__(self):
        _require(self.frequency_f > 0, "frequency must be positive")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.frequency_f


def resonant_interrogation_time(f: float) -> float:
    """Interrogation time T with omega*T = pi."""
    _require(f > 0, "frequency must be positive")
    return 1.0 / (2.0 * f)


def xi_factor(B: float, T: float, g: float = DEFAULT_CONSTANTS.g) -> float:
    _require(B > 0 and T > 0 and g > 0, "B, T and g must be positive")
    return math.sqrt(2.0 * B / (g * T * T))


def fountain_time(H: float, g: float = DEFAULT_CONSTANTS.g) -> float:
    """Duration of a vertical fountain of apex height H launched from z = 0."""
    _require(H >= 0, "fountain height must be non-negative")
    return math.sqrt(8.0 * H / g)
