"""Differential-phase signal amplitude of the two-interferometer detector.

Broadband amplitude (valid for omega*tau_B << 1):

    Phi = (4 h k c / omega) (L/B) |sin(omega tau_B N / 2) sin(omega T / 2)
          sin(omega [T - (N-1) tau_B] / 2) D_Q(omega T)|

with the multi-diamond kernel D_Q(x) = sin(Q x)/sin(x). At resonance
(omega T = pi) this reduces to 2 h k L N Q |sinc(omega tau_B N)|.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_CONSTANTS, DomainError

DIRICHLET_WINDOW = 1e-6
SINC_WINDOW = 1e-8
BROADBAND_GUARD = 0.1


class ValidityWarning(UserWarning):
    """omega*tau_B exceeds the low-frequency guard of the broadband formula."""


def dirichlet_ratio(Q: int, x: float) -> float:
    """sin(Q x)/sin(x), continuous through x = m*pi where it equals +-Q."""
    if Q < 1:
        raise DomainError("Q must be >= 1")
    if Q == 1:
        return 1.0
    m = round(x / math.pi)
    eps = x - m * math.pi
    if abs(eps) < DIRICHLET_WINDOW:
        # sin(Q(m pi + e))/sin(m pi + e) = (-1)^{m(Q-1)} sin(Q e)/sin(e)
        sign = -1.0 if (m * (Q - 1)) % 2 else 1.0
        e2 = eps * eps
        return sign * Q * (1.0 - (Q * Q - 1) * e2 / 6.0
                           + (Q * Q - 1) * (3 * Q * Q - 7) * e2 * e2 / 360.0)
    return math.sin(Q * x) / math.sin(x)


def sinc(x: float) -> float:
    """Unnormalized sinc, sin(x)/x."""
    if abs(x) < SINC_WINDOW:
        return 1.0 - x * x / 6.0
    return math.sin(x) / x


def sinc_array(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SINC_WINDOW
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe)


def signal_amplitude_resonant(h, k, L, N, Q, omega, tau_B):
    """Resonant-mode amplitude 2 h k L N Q |sinc(omega tau_B N)|."""
    if N < 1 or Q < 1:
        raise DomainError("N and Q must be >= 1")
    return 2.0 * h * k * L * N * Q * abs(sinc(omega * tau_B * N))


@dataclass(frozen=True)
class BroadbandAmplitude:
    value: float
    guard_exceeded: bool


def broadband_amplitude(h, k, L, B, Q, N, T, omega, c=DEFAULT_CONSTANTS.c,
                        guard=BROADBAND_GUARD) -> BroadbandAmplitude:
    """Broadband amplitude together with the validity flag for omega*tau_B."""
    if N < 1 or Q < 1:
        raise DomainError("N and Q must be >= 1")
    if omega <= 0:
        raise DomainError("omega must be positive")
    tau_B = B / c
    x = omega * tau_B
    # (4 h k c / omega)(L / B) = 4 h k L / x; the N x / 2 sine is written as
    # (N x / 2) sinc(N x / 2) so small x loses no digits
    half = 0.5 * N * x
    value = (2.0 * h * k * L * N * sinc(half)
             * math.sin(0.5 * omega * T)
             * math.sin(0.5 * omega * (T - (N - 1) * tau_B))
             * dirichlet_ratio(Q, omega * T))
    return BroadbandAmplitude(abs(value), x >= guard)


def signal_amplitude_broadband(h, k, L, B, Q, N, T, omega, c=DEFAULT_CONSTANTS.c,
                               guard=BROADBAND_GUARD) -> float:
    res = broadband_amplitude(h, k, L, B, Q, N, T, omega, c, guard)
    if res.guard_exceeded:
        warnings.warn(f"omega*tau_B = {omega * B / c:.3g} exceeds guard {guard}",
                      ValidityWarning, stacklevel=2)
    return res.value


@dataclass(frozen=True)
class ResponsePoint:
    frequency_f: float
    amplitude_Phi: float
    guard_exceeded: bool = False


def response_curve(h, k, L, B, Q, N, T, frequencies, c=DEFAULT_CONSTANTS.c,
                   guard=BROADBAND_GUARD):
    """Broadband amplitude of a fixed configuration over a frequency grid."""
    freqs = [float(f) for f in frequencies]
    if not freqs:
        raise DomainError("frequency grid is empty")
    if any(b <= a for a, b in zip(freqs, freqs[1:])):
        raise DomainError("frequency grid must be strictly increasing")
    if freqs[0] <= 0:
        raise DomainError("frequencies must be positive")
    out = []
    for f in freqs:
        res = broadband_amplitude(h, k, L, B, Q, N, T, 2.0 * math.pi * f, c, guard)
        out.append(ResponsePoint(f, res.value, res.guard_exceeded))
    return out
