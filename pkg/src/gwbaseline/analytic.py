"""Closed-form optimal configurations when arm separation is ignored.

The interferometer duration is tied to the fountain time (2QT = sqrt(8H/g)),
so Q = xi*sqrt(ell) with xi = sqrt(2B/(g T^2)) and ell = H/B. Up to a
constant, the strain uncertainty is then

    F(ell, NP) = [(1 - lam)^((NP-1)/2) (1 - ell) (xi sqrt(ell) + (NP-1)/2)]^-1

and log(1/F) is jointly concave in (sqrt(ell), NP). The constrained optimum
(Q >= 1, N >= 2) is therefore the best feasible point among the interior
stationary point, the Q = 1 edge, the N = 2 edge and their corner.

Q and N are continuous here; integer schemes are the numeric module's job.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from ._golden import golden_minimize
from .core import DEFAULT_CONSTANTS, SR87, AtomSpecies, DomainError, NoiseBudget, xi_factor
from .noise import log_phase_uncertainty


class Regime(str, Enum):
    INTERIOR = "interior"
    Q1_CLAMPED = "Q1_clamped"
    N2_CLAMPED = "N2_clamped"
    LOSSLESS = "lossless"


@dataclass(frozen=True)
class AnalyticOptimum:
    rel_height_ell: float
    total_pulses_NP: float
    diamonds_Q: float
    lmt_N: float
    regime: Regime
    xi: float
    loss: float = 0.0
    objective_delta_h: float | None = None

    @property
    def relative_objective(self) -> float:
        return relative_objective(self.loss, self.rel_height_ell, self.total_pulses_NP, self.xi)


def _check_loss(lam, allow_zero=False):
    lo_ok = lam >= 0 if allow_zero else lam > 0
    if not (lo_ok and lam < 1):
        raise DomainError(f"loss per pulse {lam!r} outside {'[0' if allow_zero else '(0'}, 1)")


def _inv_log(lam):
    """1/ln(1 - lam), negative for lam in (0, 1)."""
    return 1.0 / math.log1p(-lam)


def relative_objective(lam, ell, NP, xi):
    """Strain uncertainty up to a constant factor; vectorizes over numpy inputs."""
    ell = np.asarray(ell, dtype=float)
    n = (np.asarray(NP, dtype=float) - 1.0) / 2.0
    log_val = n * math.log1p(-lam) + np.log1p(-ell) + np.log(xi * np.sqrt(ell) + n)
    out = np.exp(-log_val)
    return float(out) if out.ndim == 0 else out


def log_relative_objective(lam, ell, NP, xi):
    ell = np.asarray(ell, dtype=float)
    n = (np.asarray(NP, dtype=float) - 1.0) / 2.0
    return -(n * math.log1p(-lam) + np.log1p(-ell) + np.log(xi * np.sqrt(ell) + n))


def optimal_height_lossy(xi, lam):
    """Optimal relative height ell for loss lam > 0."""
    if lam == 0:
        raise DomainError("lossless case requires fixed N_P")
    _check_loss(lam)
    if xi <= 0:
        raise DomainError("xi must be positive")
    a = _inv_log(lam) / xi
    # a + sqrt(a^2 + 1) cancels badly for a << 0; use 1/(sqrt(a^2+1) - a)
    root = 1.0 / (math.hypot(a, 1.0) - a)
    return root * root


def optimal_np_exact(lam, xi):
    """Continuous optimal total pulse count for loss lam > 0."""
    if lam == 0:
        raise DomainError("lossless case has no finite optimal pulse count")
    _check_loss(lam)
    il = _inv_log(lam)
    return -4.0 * il - 2.0 * math.hypot(il, xi) + 1.0


def approx_np(lam, xi):
    """Small-loss expansion 2/lam + (-1/6 - xi^2) lam."""
    _check_loss(lam)
    return 2.0 / lam + (-1.0 / 6.0 - xi * xi) * lam


def _q_from_xi(lam, xi):
    il = _inv_log(lam)
    # il + sqrt(il^2 + xi^2) = xi^2 / (sqrt(il^2 + xi^2) - il)
    return xi * xi / (math.hypot(il, xi) - il)


def optimal_q_lossy(lam, B, f, g=DEFAULT_CONSTANTS.g):
    """Continuous optimal diamond count; values below 1 mean the Q = 1 edge binds."""
    _check_loss(lam)
    if B <= 0 or f <= 0:
        raise DomainError("B and f must be positive")
    return _q_from_xi(lam, math.sqrt(8.0 * B * f * f / g))


def _lmt_from(NP, Q):
    return (NP - 1.0 + 2.0 * Q) / (4.0 * Q)


def interior_optimum(lam, xi) -> AnalyticOptimum:
    _check_loss(lam)
    ell = optimal_height_lossy(xi, lam)
    NP = optimal_np_exact(lam, xi)
    Q = xi * math.sqrt(ell)
    return AnalyticOptimum(ell, NP, Q, _lmt_from(NP, Q), Regime.INTERIOR, xi, loss=lam)


def optimum_q1_regime(lam, xi) -> AnalyticOptimum:
    """Optimum on the single-diamond edge Q = 1."""
    _check_loss(lam)
    if xi < 1:
        raise DomainError(f"xi = {xi:.6g} < 1: below resonant-mode cutoff")
    NP = -2.0 * _inv_log(lam) - 1.0
    return AnalyticOptimum(1.0 / (xi * xi), NP, 1.0, (NP + 1.0) / 4.0, Regime.Q1_CLAMPED, xi, loss=lam)


def _n2_log_objective(lam, xi):
    log1m = math.log1p(-lam)

    def neg_log(ell):
        u = math.sqrt(ell)
        return -(math.log(4.0 * xi * u) + 3.0 * xi * u * log1m + math.log1p(-ell))

    return neg_log


def optimum_n2_regime(lam, xi, tol=1e-10, max_iter=200) -> AnalyticOptimum:
    """Optimum on the N = 2 edge, where NP - 1 = 6 xi sqrt(ell)."""
    _check_loss(lam, allow_zero=True)
    if xi <= 0:
        raise DomainError("xi must be positive")
    ell, _ = golden_minimize(_n2_log_objective(lam, xi), 1e-12, 1.0 - 1e-12, tol, max_iter)
    Q = xi * math.sqrt(ell)
    return AnalyticOptimum(ell, 6.0 * Q + 1.0, Q, 2.0, Regime.N2_CLAMPED, xi, loss=lam)


def optimal_height_lossless(NP, xi):
    """Optimal ell at fixed pulse count without loss; lies in (0, 1/3]."""
    if NP < 1 or xi <= 0:
        raise DomainError("need NP >= 1 and xi > 0")
    b = (NP - 1.0) / (6.0 * xi)
    # sqrt(1/3 + b^2) - b, rewritten to avoid cancellation at large b
    root = (1.0 / 3.0) / (math.sqrt(1.0 / 3.0 + b * b) + b)
    return root * root


def optimum_lossless(NP, xi) -> AnalyticOptimum:
    """Fixed-budget optimum with sqrt(ell) clamped to the Q >= 1, N >= 2 interval."""
    if NP < 7:
        raise DomainError("a fixed budget needs NP >= 7 for Q >= 1 and N >= 2")
    if xi < 1:
        raise DomainError(f"xi = {xi:.6g} < 1: below resonant-mode cutoff")
    u = math.sqrt(optimal_height_lossless(NP, xi))
    u = min(max(u, 1.0 / xi), (NP - 1.0) / (6.0 * xi))
    u = min(u, 1.0)
    Q = xi * u
    return AnalyticOptimum(u * u, float(NP), Q, _lmt_from(NP, Q), Regime.LOSSLESS, xi, loss=0.0)


def _corner(lam, xi):
    return AnalyticOptimum(1.0 / (xi * xi), 7.0, 1.0, 2.0, Regime.Q1_CLAMPED, xi, loss=lam)


def _feasible(opt, rtol=1e-12):
    return (opt.diamonds_Q >= 1.0 - rtol and opt.lmt_N >= 2.0 - rtol
            and 0.0 < opt.rel_height_ell < 1.0)


def _with_delta_h(opt: AnalyticOptimum, B, k, noise: NoiseBudget | None) -> AnalyticOptimum:
    if noise is None:
        return opt
    L = B * (1.0 - opt.rel_height_ell)
    NQ = opt.lmt_N * opt.diamonds_Q
    dh = math.exp(float(log_phase_uncertainty(noise, opt.total_pulses_NP))) / (2.0 * k * L * NQ)
    return replace(opt, objective_delta_h=dh)


def select_regime(lam, B, f, g=DEFAULT_CONSTANTS.g, *, np_fixed=None, noise: NoiseBudget | None = None,
                  species: AtomSpecies = SR87) -> AnalyticOptimum:
    """Constrained continuous optimum (Q >= 1, N >= 2) at resonance for frequency f.

    With a positive loss the pulse count is optimized; with lam = 0, or with a
    fixed phase uncertainty, the budget np_fixed is used as is. When ``noise``
    is given the returned record carries the absolute strain uncertainty.
    """
    _check_loss(lam, allow_zero=True)
    if B <= 0 or f <= 0:
        raise DomainError("B and f must be positive")
    if noise is not None and not noise.is_fixed and noise.loss_lambda != lam:
        raise DomainError("lam disagrees with the noise budget's loss per pulse")
    xi = xi_factor(B, 1.0 / (2.0 * f), g)
    if xi < 1:
        raise DomainError(f"f = {f:.6g} Hz is below the resonant-mode cutoff "
                          f"{min_resonant_frequency(B, g):.6g} Hz")
    k = species.wave_number
    if lam == 0 or (noise is not None and noise.is_fixed):
        if np_fixed is None:
            raise DomainError("lossless case requires fixed N_P")
        return _with_delta_h(optimum_lossless(np_fixed, xi), B, k, noise)

    interior = interior_optimum(lam, xi)
    if _feasible(interior):
        return _with_delta_h(interior, B, k, noise)

    candidates = []
    q1 = optimum_q1_regime(lam, xi)
    if _feasible(q1):
        candidates.append(q1)
    n2 = optimum_n2_regime(lam, xi)
    if _feasible(n2):
        candidates.append(n2)
    candidates.append(_corner(lam, xi))
    # smaller objective wins; stable sort keeps the listed order on exact ties
    best = min(candidates, key=lambda o: o.relative_objective)
    return _with_delta_h(best, B, k, noise)


def min_resonant_frequency(B, g=DEFAULT_CONSTANTS.g):
    """Lowest frequency a single diamond can be resonant with inside baseline B."""
    if B <= 0:
        raise DomainError("B must be positive")
    return math.sqrt(g / (8.0 * B))


@dataclass(frozen=True)
class RegimeBoundaries:
    f_min_resonant: float
    lambda_bottom_Q1: float
    lambda_bottom_highf: float


def bottom_constraint_thresholds(f, B, species: AtomSpecies = SR87, g=None) -> RegimeBoundaries:
    """Losses above which the lower arm reaches the baseline bottom.

    lambda_bottom_Q1 applies on the single-diamond branch, lambda_bottom_highf
    for Q > 1 and N > 2.
    """
    if f <= 0 or B <= 0:
        raise DomainError("f and B must be positive")
    g = species.constants.g if g is None else g
    eta = g * species.mass / (species.constants.hbar * species.wave_number)
    highf = (8.0 / eta * (g / (8.0 * B)) ** 3 * f ** -5) ** 0.25
    return RegimeBoundaries(min_resonant_frequency(B, g), f / eta, highf)
