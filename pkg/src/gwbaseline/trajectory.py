"""Vertical two-arm trajectories of a multi-diamond fountain interferometer.

Pulses are instantaneous. The first beam splitter kicks one arm by N*v_r and
every mirror sequence swaps the two arm velocities, so the arm midpoint is a
ballistic parabola launched at v0 + N*v_r/2 and the arms sit at
midpoint -+ s(t)/2. The separation s(t) rises at N*v_r on [2jT, (2j+1)T],
falls back on [(2j+1)T, (2j+2)T] and peaks at N*v_r*T.

(z0, v0) are the cloud's position and velocity at the first beam splitter,
so the lower arm starts out as z0 + v0 t - g t^2/2.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._golden import golden_minimize
from .core import SR87, AtomSpecies, DomainError, PulseScheme, pulse_count

CONFINEMENT_TOL = 1e-9  # m


class PulseRole(str, Enum):
    BEAM_SPLITTER = "beam-splitter-sequence"
    MIRROR = "mirror-sequence"
    FINAL_BEAM_SPLITTER = "final-beam-splitter"


@dataclass(frozen=True)
class PulseTimeline:
    pulse_times: tuple
    pulse_roles: tuple
    scheme: PulseScheme

    def __len__(self):
        return len(self.pulse_times)


def build_timeline(Q: int, N: int, T: float) -> PulseTimeline:
    """Pulse times with every LMT sequence collapsed onto its center time."""
    scheme = PulseScheme(Q, N, T)
    times, roles = [], []

    def add(t, n, role):
        times.extend([t] * n)
        roles.extend([role] * n)

    add(0.0, N, PulseRole.BEAM_SPLITTER)
    for j in range(1, 2 * Q):
        # odd multiples of T close each half-diamond, even ones sit between diamonds
        add(j * T, 2 * N - 1, PulseRole.MIRROR)
    add(2 * Q * T, N, PulseRole.FINAL_BEAM_SPLITTER)
    assert len(times) == pulse_count(Q, N)
    return PulseTimeline(tuple(times), tuple(roles), scheme)


def arm_separation_peak(N, T, species: AtomSpecies = SR87) -> float:
    """Peak arm separation N*hbar*k*T/m."""
    if N < 0 or T <= 0:
        raise DomainError("need N >= 0 and T > 0")
    return N * species.recoil_velocity * T


def separation(t, N, T, recoil_velocity):
    """Triangular arm separation s(t); vectorizes over t and N."""
    tau = np.mod(np.asarray(t, dtype=float), 2.0 * T)
    return np.asarray(N, dtype=float) * recoil_velocity * np.minimum(tau, 2.0 * T - tau)


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_end: float
    lower: tuple  # (c0, c1, c2) with z = c0 + c1 t + c2 t^2
    upper: tuple


@dataclass(frozen=True)
class ArmTrajectory:
    Q: int
    N: int
    T: float
    z0: float
    v0: float
    recoil_velocity: float
    g: float
    segments: tuple

    @property
    def duration(self) -> float:
        return 2 * self.Q * self.T

    @property
    def separation_peak(self) -> float:
        return self.N * self.recoil_velocity * self.T

    @property
    def midpoint_velocity(self) -> float:
        return self.v0 + 0.5 * self.N * self.recoil_velocity

    def midpoint(self, t):
        t = np.asarray(t, dtype=float)
        return self.z0 + self.midpoint_velocity * t - 0.5 * self.g * t * t

    def separation(self, t):
        return separation(t, self.N, self.T, self.recoil_velocity)

    def lower(self, t):
        return self.midpoint(t) - 0.5 * self.separation(t)

    def upper(self, t):
        return self.midpoint(t) + 0.5 * self.separation(t)


def arm_paths(Q, N, T, z0, v0, species: AtomSpecies = SR87, g=None) -> ArmTrajectory:
    if Q < 1 or N < 0 or T <= 0:
        raise DomainError("need Q >= 1, N >= 0, T > 0")
    g = species.constants.g if g is None else g
    vr = species.recoil_velocity
    kick = N * vr
    segments = []
    for j in range(2 * Q):
        if j % 2 == 0:
            lower = (z0 + 0.5 * kick * j * T, v0, -0.5 * g)
            upper = (z0 - 0.5 * kick * j * T, v0 + kick, -0.5 * g)
        else:
            lower = (z0 - 0.5 * kick * (j + 1) * T, v0 + kick, -0.5 * g)
            upper = (z0 + 0.5 * kick * (j + 1) * T, v0, -0.5 * g)
        segments.append(Segment(j * T, (j + 1) * T, lower, upper))
    return ArmTrajectory(Q, N, T, z0, v0, vr, g, tuple(segments))


def _parabola_extrema(coef, t0, t1):
    c0, c1, c2 = coef
    ts = [t0, t1]
    if c2 != 0.0:
        ts_star = -c1 / (2.0 * c2)
        if t0 < ts_star < t1:
            ts.append(ts_star)
    vals = [c0 + c1 * t + c2 * t * t for t in ts]
    return min(vals), max(vals)


def envelope(traj: ArmTrajectory):
    """Exact (min of lower arm, max of upper arm) from per-segment extrema."""
    lo, hi = math.inf, -math.inf
    for seg in traj.segments:
        seg_lo, _ = _parabola_extrema(seg.lower, seg.t_start, seg.t_end)
        _, seg_hi = _parabola_extrema(seg.upper, seg.t_start, seg.t_end)
        lo = min(lo, seg_lo)
        hi = max(hi, seg_hi)
    return lo, hi


def _arm(t, z0, v_mid, N, T, vr, g, sign):
    return z0 + v_mid * t - 0.5 * g * t * t + sign * 0.5 * separation(t, N, T, vr)


def fast_envelope(Q, N, T, v0, recoil_velocity, g, z0=0.0):
    """(min lower, max upper) from O(1) candidate times; vectorizes over N and v0.

    Each arm is concave between kinks. The upper arm peaks at an endpoint, at a
    segment stationary point or at the separation peak nearest the midpoint
    apex; the lower arm bottoms out at an endpoint or at the first or last
    separation peak. Evaluating the true paths there is exact.
    """
    N = np.asarray(N, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    kick = N * recoil_velocity
    v_mid = v0 + 0.5 * kick
    t_end = 2.0 * Q * T
    apex = v_mid / g
    j = np.clip(np.floor((apex - T) / (2.0 * T)), 0, Q - 1)
    peak_lo = (2.0 * j + 1.0) * T
    peak_hi = np.minimum(peak_lo + 2.0 * T, (2.0 * Q - 1.0) * T)
    hi = None
    for t in ((v_mid + 0.5 * kick) / g, (v_mid - 0.5 * kick) / g, peak_lo, peak_hi, 0.0, t_end):
        t = np.clip(t, 0.0, t_end)
        z = _arm(t, z0, v_mid, N, T, recoil_velocity, g, +1.0)
        hi = z if hi is None else np.maximum(hi, z)
    lo = None
    for t in (0.0, t_end, T, (2.0 * Q - 1.0) * T):
        z = _arm(t, z0, v_mid, N, T, recoil_velocity, g, -1.0)
        lo = z if lo is None else np.minimum(lo, z)
    return lo, hi


def symmetric_required_height(Q, N, T, recoil_velocity, g):
    """Window height at the optimal launch, midpoint velocity g*Q*T; vectorizes over N.

    The window span is convex in v0 and symmetric about the launch whose
    midpoint apex sits at t = QT (time reversal about QT maps the scheme onto
    itself), so that launch minimizes it.
    """
    N = np.asarray(N, dtype=float)
    lo, hi = fast_envelope(Q, N, T, g * Q * T - 0.5 * N * recoil_velocity, recoil_velocity, g)
    return hi - lo


def _span(Q, N, T, v0, vr, g):
    lo, hi = fast_envelope(Q, N, T, v0, vr, g)
    return float(hi - lo)


@dataclass(frozen=True)
class RequiredHeight:
    H_req: float
    z0: float
    v0: float


def min_required_height(Q, N, T, species: AtomSpecies = SR87, g=None, tol=CONFINEMENT_TOL,
                        max_iter=200) -> RequiredHeight:
    """Smallest window admitting a confined trajectory, with its launch witness.

    Golden-section over v0; z0 is then chosen so the lower arm just touches 0.
    """
    if Q < 1 or N < 0 or T <= 0:
        raise DomainError("need Q >= 1, N >= 0, T > 0")
    g = species.constants.g if g is None else g
    vr = species.recoil_velocity
    qt = Q * T
    kick = N * vr
    lo_v, hi_v = -kick, 2.0 * g * qt * (1.0 + kick / (g * qt))
    # span has slope at most 4QT in v0, so this v0 tolerance bounds the height error
    v_tol = tol / (4.0 * qt)
    v0, span = golden_minimize(lambda v: _span(Q, N, T, v, vr, g), lo_v, hi_v, v_tol, max_iter)
    lo, _ = fast_envelope(Q, N, T, v0, vr, g)
    return RequiredHeight(span, -float(lo), v0)


class Binding(str, Enum):
    NONE = "none"
    BOTTOM = "bottom"
    TOP = "top"
    BOTH = "both"


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    min_lower_arm: float
    max_upper_arm: float
    binding_constraint: Binding


def check_confinement(traj: ArmTrajectory, H_window: float, tol=CONFINEMENT_TOL) -> FeasibilityReport:
    """Is the trajectory inside [0, H_window]?

    For a feasible trajectory the binding tag lists the bounds touched within
    tol. For an infeasible one it lists the violated bounds, and it is "both"
    whenever the span alone exceeds the window, since no shift of z0 helps.
    """
    if H_window <= 0:
        raise DomainError("window height must be positive")
    lo, hi = envelope(traj)
    bottom_bad = lo < -tol
    top_bad = hi > H_window + tol
    feasible = not (bottom_bad or top_bad)
    if feasible:
        bottom = abs(lo) <= tol
        top = abs(hi - H_window) <= tol
    elif hi - lo > H_window + tol:
        bottom = top = True
    else:
        bottom, top = bottom_bad, top_bad
    binding = {(False, False): Binding.NONE, (True, False): Binding.BOTTOM,
               (False, True): Binding.TOP, (True, True): Binding.BOTH}[(bottom, top)]
    return FeasibilityReport(feasible, lo, hi, binding)


def sample_trajectory(traj: ArmTrajectory, step: float):
    """Rows (t, z_lower, z_upper) on a uniform grid plus every segment boundary,
    so kinks and the end time are always sampled."""
    if step <= 0:
        raise DomainError("sampling step must be positive")
    n = int(math.floor(traj.duration / step + 1e-9))
    kinks = np.arange(2 * traj.Q + 1) * traj.T
    t = np.unique(np.concatenate([np.arange(n + 1) * step, kinks]))
    t = t[t <= traj.duration]
    # drop uniform points that collide with a kink up to rounding
    keep = np.ones(t.size, dtype=bool)
    keep[1:] = np.diff(t) > 1e-12 * max(traj.duration, 1.0)
    t = t[keep]
    return np.column_stack([t, traj.lower(t), traj.upper(t)])


def write_trajectory_csv(traj: ArmTrajectory, step: float, path):
    rows = sample_trajectory(traj, step)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_s", "z_lower_m", "z_upper_m"])
        for t, lo, up in rows:
            w.writerow([repr(float(t)), repr(float(lo)), repr(float(up))])
