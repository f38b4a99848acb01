"""Integer-constrained optimization of resonant multi-diamond configurations.

For every integer Q and (even) N allowed by the pulse budget the fountain
window H is taken as the smallest height that confines both arms, L = B - H,
and the strain uncertainty

    delta_h = Delta Phi(NP) / (2 k L N Q |sinc(omega tau_B N)|)

is evaluated. The scan is exhaustive; ties go to the smallest Q, then N.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .analytic import AnalyticOptimum, min_resonant_frequency, select_regime
from .core import SR87, AtomSpecies, DomainError, NoiseBudget, pulse_count
from .noise import log_phase_uncertainty
from .response import sinc_array
from .trajectory import CONFINEMENT_TOL, fast_envelope, symmetric_required_height


class InfeasibleError(RuntimeError):
    """No scheme fits inside the baseline at this frequency."""


class BelowCutoffError(InfeasibleError):
    """The frequency is below the resonant-mode cutoff of the baseline."""


@dataclass(frozen=True)
class SearchConstraints:
    frequency_f: float
    baseline_B: float
    noise: NoiseBudget
    species: AtomSpecies = SR87
    np_max: int = 160_000
    q_max: int = 10_000
    enforce_arm_separation: bool = True
    enforce_even_N: bool = True

    def __post_init__(self):
        if self.frequency_f <= 0 or self.baseline_B <= 0:
            raise DomainError("frequency and baseline must be positive")
        if int(self.np_max) != self.np_max or self.np_max < 7:
            raise DomainError("np_max must be an integer >= 7")
        if int(self.q_max) != self.q_max or self.q_max < 1:
            raise DomainError("q_max must be a positive integer")

    @property
    def g(self) -> float:
        return self.species.constants.g

    def n_bound(self, Q: int) -> int:
        """Largest integer N with N < 0.5 + (np_max - 1)/(4Q)."""
        # N < 0.5 + (np_max-1)/(4Q)  <=>  4QN < 2Q + np_max - 1
        return (2 * Q + self.np_max - 2) // (4 * Q)

    def lmt_values(self, Q: int) -> np.ndarray:
        top = self.n_bound(Q)
        if self.enforce_even_N:
            return np.arange(2, top + 1, 2, dtype=np.int64)
        return np.arange(1, top + 1, dtype=np.int64)

    def q_max_effective(self) -> int:
        T = 1.0 / (2.0 * self.frequency_f)
        xi = math.sqrt(2.0 * self.baseline_B / (self.g * T * T))
        return min(self.q_max, (self.np_max - 1) // 6, math.floor(xi))

    def with_frequency(self, f: float) -> SearchConstraints:
        d = dict(self.__dict__)
        d["frequency_f"] = f
        return SearchConstraints(**d)


@dataclass(frozen=True)
class OptimumRecord:
    f_hz: float
    feasible: bool
    delta_h: float = math.nan
    Q: int = 0
    N: int = 0
    NP: int = 0
    ell: float = math.nan
    H: float = math.nan
    L: float = math.nan
    z0: float = math.nan
    v0: float = math.nan
    T: float = math.nan
    TAI: float = math.nan
    binding_constraints: tuple = field(default_factory=tuple)
    f_min_hz: float = math.nan
    message: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["binding_constraints"] = list(self.binding_constraints)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> OptimumRecord:
        d = dict(d)
        d["binding_constraints"] = tuple(d.get("binding_constraints", ()))
        for key in ("Q", "N", "NP"):
            d[key] = int(d[key])
        return cls(**d)


def _heights(c: SearchConstraints, Q: int, N: np.ndarray, T: float) -> np.ndarray:
    if c.enforce_arm_separation:
        return symmetric_required_height(Q, N, T, c.species.recoil_velocity, c.g)
    # fountain-time equality 2QT = sqrt(8H/g), arm separation ignored
    return np.full(N.shape, 0.5 * c.g * (Q * T) ** 2)


def _log_delta_h(c: SearchConstraints, Q, N, H, omega, tau_B):
    L = c.baseline_B - H
    NP = pulse_count(Q, N)
    response = 2.0 * c.species.wave_number * L * N * Q * np.abs(sinc_array(omega * tau_B * N))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = log_phase_uncertainty(c.noise, NP) - np.log(response)
    return np.where((L > 0) & (response > 0), out, np.inf)


def optimize_at_frequency(c: SearchConstraints) -> OptimumRecord:
    """Best (Q, N) scheme at one resonant frequency; raises InfeasibleError if none fits."""
    f = c.frequency_f
    B = c.baseline_B
    g = c.g
    f_min = min_resonant_frequency(B, g)
    T = 1.0 / (2.0 * f)
    q_eff = c.q_max_effective()
    if q_eff < 1:
        if f <= f_min or math.sqrt(2.0 * B / (g * T * T)) < 1:
            raise BelowCutoffError(f"f = {f:.6g} Hz is below the resonant-mode cutoff {f_min:.6g} Hz")
        raise InfeasibleError("baseline cannot confine any scheme")
    omega = 2.0 * math.pi * f
    tau_B = B / c.species.constants.c

    best = (math.inf, 0, 0, math.nan)
    for Q in range(1, q_eff + 1):
        N = c.lmt_values(Q)
        if N.size == 0:
            continue
        H = _heights(c, Q, N, T)
        val = _log_delta_h(c, Q, N, H, omega, tau_B)
        i = int(np.argmin(val))
        # strict < keeps the smallest Q on ties; argmin already picks the smallest N
        if val[i] < best[0]:
            best = (float(val[i]), Q, int(N[i]), float(H[i]))
    log_dh, Q, N, H = best
    if not math.isfinite(log_dh):
        raise InfeasibleError("baseline cannot confine any scheme")

    tags = []
    if Q == 1:
        tags.append("q_min")
    if Q == q_eff:
        tags.append("q_cap")
    if N == c.lmt_values(Q)[-1]:
        tags.append("np_budget")
    if N == (2 if c.enforce_even_N else 1):
        tags.append("n_min")
    vr = c.species.recoil_velocity
    v0 = g * Q * T - 0.5 * N * vr
    z0 = 0.0
    if c.enforce_arm_separation:
        lo, _ = fast_envelope(Q, N, T, v0, vr, g)
        z0 = 0.0 - float(lo)
        if H > 0.5 * g * (Q * T) ** 2 + CONFINEMENT_TOL:
            tags.append("arm_separation")
        if z0 > CONFINEMENT_TOL:
            # the lower arm dips below its starting height at the first mirror
            tags.append("bottom")
    return OptimumRecord(
        f_hz=f, feasible=True, delta_h=math.exp(log_dh), Q=Q, N=N, NP=int(pulse_count(Q, N)),
        ell=H / B, H=H, L=B - H, z0=z0, v0=v0, T=T, TAI=2 * Q * T,
        binding_constraints=tuple(tags), f_min_hz=f_min)


def _point(c: SearchConstraints) -> OptimumRecord:
    try:
        return optimize_at_frequency(c)
    except InfeasibleError as exc:
        return OptimumRecord(f_hz=c.frequency_f, feasible=False, T=1.0 / (2.0 * c.frequency_f),
                             f_min_hz=min_resonant_frequency(c.baseline_B, c.g), message=str(exc))


def _check_grid(frequencies):
    freqs = [float(f) for f in frequencies]
    if not freqs:
        raise DomainError("frequency grid is empty")
    if any(b <= a for a, b in zip(freqs, freqs[1:])) or freqs[0] <= 0:
        raise DomainError("frequency grid must be positive and strictly increasing")
    return freqs


def sweep(c: SearchConstraints, frequencies, workers: int = 1) -> list:
    """One record per grid frequency, in grid order; infeasible points become records."""
    tasks = [c.with_frequency(f) for f in _check_grid(frequencies)]
    if workers <= 1 or len(tasks) <= 1:
        return [_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_point, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


@dataclass(frozen=True)
class Comparison:
    numeric: OptimumRecord
    analytic: AnalyticOptimum | None
    gap: float


def analytic_for(c: SearchConstraints) -> AnalyticOptimum:
    """Continuous counterpart of a search: fixed budget np_max when the loss is zero or
    the phase uncertainty is fixed, optimized pulse count otherwise."""
    lam = 0.0 if c.noise.is_fixed else c.noise.loss_lambda
    return select_regime(lam, c.baseline_B, c.frequency_f, c.g, np_fixed=c.np_max,
                         noise=c.noise, species=c.species)


def compare_with_analytic(c: SearchConstraints, frequencies, workers: int = 1) -> list:
    """Pair every numeric record with the analytic optimum; gap = numeric/analytic - 1."""
    records = sweep(c, frequencies, workers)
    out = []
    for rec in records:
        try:
            an = analytic_for(c.with_frequency(rec.f_hz))
        except DomainError:
            an = None
        if rec.feasible and an is not None:
            gap = rec.delta_h / an.objective_delta_h - 1.0
        else:
            gap = math.nan
        out.append(Comparison(rec, an, gap))
    return out
