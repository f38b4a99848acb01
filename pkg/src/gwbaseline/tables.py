"""Tables behind the command-line subcommands, and their CSV/JSON encoding.

Every table is a list of rows with a fixed column order. Floats are written
with repr, so a rerun with the same configuration is byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .analytic import bottom_constraint_thresholds, select_regime
from .core import DomainError
from .noise import log_phase_uncertainty
from .numeric import OptimumRecord, SearchConstraints, compare_with_analytic
from .response import response_curve

NUMERIC_COLUMNS = ("f_hz", "delta_h", "Q", "N", "NP", "ell", "H_m", "L_m", "z0_m", "v0_mps",
                   "T_s", "TAI_s", "binding", "analytic_delta_h", "gap_rel")
ANALYTIC_COLUMNS = ("f_hz", "NP", "Q", "N", "ell", "regime")
REGIME_COLUMNS = ("f_hz", "f_min_hz", "lambda_bottom_q1", "lambda_bottom_highf")
RESPONSE_COLUMNS = ("f_hz", "delta_h")
CHECK_COLUMNS = ("feasible", "binding", "min_lower_arm_m", "max_upper_arm_m", "window_m")
TRAJECTORY_COLUMNS = ("t_s", "z_lower_m", "z_upper_m")


class RecordMismatchError(DomainError):
    """A stored record does not fit the configuration or grid it is used with."""


def constraints_for(cfg, f=None) -> SearchConstraints:
    grid_f = cfg.grid.frequencies()[0] if f is None else f
    return SearchConstraints(
        frequency_f=float(grid_f), baseline_B=cfg.baseline_m, noise=cfg.noise.budget(),
        species=cfg.atom(), np_max=cfg.np_max, q_max=cfg.q_max,
        enforce_arm_separation=cfg.enforce_arm_separation, enforce_even_N=cfg.enforce_even_N)


def analytic_table(cfg) -> list:
    noise = cfg.noise.budget()
    sp = cfg.atom()
    lam = 0.0 if noise.is_fixed else noise.loss_lambda
    rows = []
    for f in cfg.grid.frequencies():
        try:
            opt = select_regime(lam, cfg.baseline_m, float(f), sp.constants.g, np_fixed=cfg.np_max,
                                noise=noise, species=sp)
        except DomainError:
            rows.append({"f_hz": float(f), "NP": math.nan, "Q": math.nan, "N": math.nan,
                         "ell": math.nan, "regime": "below_cutoff"})
            continue
        rows.append({"f_hz": float(f), "NP": opt.total_pulses_NP, "Q": opt.diamonds_Q,
                     "N": opt.lmt_N, "ell": opt.rel_height_ell, "regime": opt.regime.value})
    return rows


def regime_table(cfg) -> list:
    sp = cfg.atom()
    rows = []
    for f in cfg.grid.frequencies():
        b = bottom_constraint_thresholds(float(f), cfg.baseline_m, sp)
        rows.append({"f_hz": float(f), "f_min_hz": b.f_min_resonant,
                     "lambda_bottom_q1": b.lambda_bottom_Q1, "lambda_bottom_highf": b.lambda_bottom_highf})
    return rows


def numeric_row(rec: OptimumRecord, analytic_delta_h=math.nan, gap=math.nan) -> dict:
    return {
        "f_hz": rec.f_hz, "delta_h": rec.delta_h, "Q": rec.Q, "N": rec.N, "NP": rec.NP,
        "ell": rec.ell, "H_m": rec.H, "L_m": rec.L, "z0_m": rec.z0, "v0_mps": rec.v0,
        "T_s": rec.T, "TAI_s": rec.TAI,
        "binding": ";".join(rec.binding_constraints) if rec.feasible else "infeasible",
        "analytic_delta_h": analytic_delta_h, "gap_rel": gap,
    }


def numeric_table(cfg, workers=1) -> list:
    c = constraints_for(cfg)
    rows = []
    for cmp in compare_with_analytic(c, cfg.grid.frequencies(), workers):
        an = math.nan
        if cmp.analytic is not None and cmp.analytic.objective_delta_h is not None:
            an = cmp.analytic.objective_delta_h
        rows.append(numeric_row(cmp.numeric, an, cmp.gap))
    return rows


def _num(row, key):
    try:
        return float(row[key])
    except (KeyError, TypeError, ValueError):
        raise RecordMismatchError(f"record lacks a numeric {key!r}") from None


def record_from_row(row: dict) -> OptimumRecord:
    """Rebuild an OptimumRecord from a numeric-table row (CSV strings or JSON values)."""
    binding = str(row.get("binding", ""))
    if binding == "infeasible":
        raise RecordMismatchError(f"record at f = {row.get('f_hz')} Hz is infeasible")
    vals = {k: _num(row, k) for k in ("f_hz", "delta_h", "Q", "N", "NP", "ell", "H_m", "L_m",
                                      "z0_m", "v0_mps", "T_s", "TAI_s")}
    for k in ("Q", "N", "NP"):
        if vals[k] != int(vals[k]):
            raise RecordMismatchError(f"record field {k} must be an integer")
    return OptimumRecord(
        f_hz=vals["f_hz"], feasible=True, delta_h=vals["delta_h"], Q=int(vals["Q"]), N=int(vals["N"]),
        NP=int(vals["NP"]), ell=vals["ell"], H=vals["H_m"], L=vals["L_m"], z0=vals["z0_m"],
        v0=vals["v0_mps"], T=vals["T_s"], TAI=vals["TAI_s"],
        binding_constraints=tuple(b for b in binding.split(";") if b))


def load_records(path) -> list:
    """Rows of a numeric table written as CSV or JSON."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("["):
        return json.loads(text)
    return list(csv.DictReader(io.StringIO(text)))


def pick_record(rows, f_hz=None) -> OptimumRecord:
    """The feasible row closest to f_hz, or the only row when f_hz is None."""
    if not rows:
        raise RecordMismatchError("record file holds no rows")
    if f_hz is None:
        if len(rows) != 1:
            raise RecordMismatchError(f"record file holds {len(rows)} rows; pick one with --record-f")
        return record_from_row(rows[0])
    best = min(rows, key=lambda r: abs(math.log(_num(r, "f_hz") / f_hz)))
    return record_from_row(best)


def response_grid(rec: OptimumRecord, cfg, explicit: bool):
    """Explicit grids are used as given; the default spans a factor 3 around resonance
    and contains the resonant frequency itself."""
    if explicit:
        return [float(f) for f in cfg.grid.frequencies()]
    grid = np.geomspace(rec.f_hz / 3.0, rec.f_hz * 3.0, 401)
    grid[200] = rec.f_hz
    return [float(f) for f in grid]


def response_table(cfg, rec: OptimumRecord, frequencies) -> list:
    B = cfg.baseline_m
    if abs(rec.H + rec.L - B) > 1e-9 * B:
        raise RecordMismatchError(f"record H + L = {rec.H + rec.L!r} m does not match baseline {B!r} m")
    if abs(2.0 * rec.f_hz * rec.T - 1.0) > 1e-12:
        raise RecordMismatchError("record T is not resonant with its frequency")
    if not frequencies[0] <= rec.f_hz <= frequencies[-1]:
        raise RecordMismatchError(f"grid [{frequencies[0]!r}, {frequencies[-1]!r}] Hz does not "
                                  f"contain the resonant frequency {rec.f_hz!r} Hz")
    sp = cfg.atom()
    noise = cfg.noise.budget()
    dphi = math.exp(float(log_phase_uncertainty(noise, rec.NP)))
    pts = response_curve(1.0, sp.wave_number, rec.L, B, rec.Q, rec.N, rec.T, frequencies, sp.constants.c)
    return [{"f_hz": p.frequency_f, "delta_h": dphi / p.amplitude_Phi if p.amplitude_Phi > 0 else math.inf}
            for p in pts]


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _json_safe(v):
    # JSON has no NaN or infinity
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def to_json(rows, columns) -> str:
    out = [{c: _json_safe(row[c]) for c in columns} for row in rows]
    return json.dumps(out, indent=1) + "\n"


def render(rows, columns, fmt) -> str:
    return to_csv(rows, columns) if fmt == "csv" else to_json(rows, columns)
