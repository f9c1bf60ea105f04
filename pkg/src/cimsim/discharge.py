"""Bit-line-bar discharge dynamics.

Closed-form solutions of the KCL discharge equation ``C dV/dt = -I(V)`` with
and without channel-length modulation, the maximum-pulse-width saturation
bound, and a fixed-step RK4 integrator used to validate the closed forms
(the integrator continues into the triode region with the textbook square-law
triode current; the closed forms stay authoritative inside the saturation
window).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .device import (
    CUTOFF,
    SATURATION,
    TechParams,
    region_of,
    saturation_current,
)

MODEL_LINEAR = "closed_form_linear"
MODEL_CLM = "closed_form_clm"
MODEL_NUMERIC = "numeric"


@dataclass(frozen=True, eq=False)
class DischargeTrace:
    """Sampled V_BLB(t) waveform with model provenance.

    ``t_zero`` reports the instant a closed form clamps at 0 V when that
    happens inside the trace window, else None.
    """

    times: np.ndarray            # s, strictly increasing, starts at 0
    voltages: np.ndarray         # V, same length
    model: str
    params_snapshot: TechParams
    v_wl: float                  # applied word-line voltage, V
    t_zero: float | None = None

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.voltages, dtype=float)
        if t.shape != v.shape or t.ndim != 1 or t.size < 2:
            raise ValueError("times and voltages must be equal-length 1-D arrays")
        if not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        vdd = self.params_snapshot.v_dd
        if v[0] != vdd:
            raise ValueError(f"trace must start at the precharged v_dd={vdd}")
        if np.any(np.diff(v) > 0):
            raise ValueError("voltages must be monotone non-increasing")
        if np.any(v < 0) or np.any(v > vdd):
            raise ValueError("voltages must stay within [0, v_dd]")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "voltages", v)


def v_blb_linear(params: TechParams, v_wl: float, t: float) -> float:
    """Bit-line-bar voltage (V) after discharging for ``t`` seconds under the
    constant-current square-law model (no channel-length modulation).

    Linear in ``t``; clamped below at 0 V. Returns ``v_dd`` for any ``t`` when
    the word line sits at or below threshold.
    """
    if not math.isfinite(t) or t < 0:
        raise ValueError(f"t must be finite and non-negative, got {t}")
    i0 = saturation_current(params, v_wl)
    if i0 == 0.0:
        return params.v_dd
    return max(0.0, params.v_dd - i0 * t / params.c_blb)


def v_blb_clm(params: TechParams, v_wl: float, t: float) -> float:
    """Bit-line-bar voltage (V) after ``t`` seconds with channel-length
    modulation: the discharge current is boosted by ``(1 + lambda*V)``, which
    turns the ramp into an exponential decay toward ``-1/lambda``.

    Clamped below at 0 V. Falls back transparently to :func:`v_blb_linear`
    when ``lambda_`` is 0 (the exponential's limit).
    """
    if not math.isfinite(t) or t < 0:
        raise ValueError(f"t must be finite and non-negative, got {t}")
    lam = params.lambda_
    if lam == 0.0:
        return v_blb_linear(params, v_wl, t)
    i0 = saturation_current(params, v_wl)
    if i0 == 0.0:
        return params.v_dd
    # expm1 keeps the small-lambda regime accurate (avoids 1/lambda blow-up).
    v = params.v_dd + (params.v_dd + 1.0 / lam) * math.expm1(-lam * i0 * t / params.c_blb)
    return max(0.0, v)


def pw_max(params: TechParams, v_wl: float) -> float:
    """Longest word-line pulse (s) for which the access transistor provably
    stays in saturation while the bit-line-bar discharges.

    Returns ``math.inf`` when the word line sits at or below threshold (zero
    current never leaves saturation) and 0 when ``v_wl >= v_dd + v_th`` (the
    transistor starts out in triode).
    """
    i0 = saturation_current(params, v_wl)
    if i0 == 0.0:
        return math.inf
    return max(0.0, params.c_blb / i0 * (params.v_dd + params.v_th - v_wl))


def saturation_time(params: TechParams, v_wl: float, model: str = "linear") -> float:
    """Time (s) at which the chosen closed form reaches the saturation
    boundary ``V_BLB = v_wl - v_th``.

    For the linear model this equals :func:`pw_max` exactly. The CLM model
    discharges faster at high V_BLB, so its window is shorter. ``math.inf``
    below threshold; 0 when the boundary sits at or above ``v_dd``.
    """
    if model not in ("linear", "clm"):
        raise ValueError(f"model must be 'linear' or 'clm', got {model!r}")
    i0 = saturation_current(params, v_wl)
    if i0 == 0.0:
        return math.inf
    overdrive = v_wl - params.v_th
    if overdrive >= params.v_dd:
        return 0.0
    if model == "linear" or params.lambda_ == 0.0:
        return params.c_blb * (params.v_dd - overdrive) / i0
    lam = params.lambda_
    rate = lam * i0 / params.c_blb
    return math.log((params.v_dd + 1.0 / lam) / (overdrive + 1.0 / lam)) / rate


def _drain_current(params: TechParams, v_wl: float, v_blb: float) -> float:
    """Full square-law drain current (A): saturation current with the CLM
    factor while saturated, textbook triode current below the boundary."""
    region = region_of(params, v_wl, v_blb)
    if region == CUTOFF:
        return 0.0
    if region == SATURATION:
        return saturation_current(params, v_wl) * (1.0 + params.lambda_ * v_blb)
    overdrive = v_wl - params.v_th
    return params.beta * (overdrive * v_blb - 0.5 * v_blb * v_blb)


def simulate_discharge(params: TechParams, v_wl: float, duration: float,
                       dt: float) -> DischargeTrace:
    """Fixed-step RK4 integration of ``C dV/dt = -I(V)`` from the precharged
    ``v_dd``, using the full square-law model including the triode
    continuation. Returns a trace sampled every ``dt`` seconds.
    """
    if not (math.isfinite(duration) and duration > 0):
        raise ValueError(f"duration must be positive, got {duration}")
    if not (math.isfinite(dt) and 0 < dt <= duration):
        raise ValueError(f"dt must satisfy 0 < dt <= duration, got {dt}")
    if not math.isfinite(v_wl) or v_wl < 0:
        raise ValueError(f"v_wl must be finite and non-negative, got {v_wl}")

    n_steps = int(round(duration / dt))
    c = params.c_blb

    def f(v: float) -> float:
        return -_drain_current(params, v_wl, v) / c

    voltages = np.empty(n_steps + 1)
    v = params.v_dd
    voltages[0] = v
    for i in range(n_steps):
        k1 = f(v)
        k2 = f(max(0.0, v + 0.5 * dt * k1))
        k3 = f(max(0.0, v + 0.5 * dt * k2))
        k4 = f(max(0.0, v + dt * k3))
        v = v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        v = min(max(v, 0.0), voltages[i])  # physical rails; monotone by construction
        voltages[i + 1] = v

    times = np.arange(n_steps + 1) * dt
    return DischargeTrace(times=times, voltages=voltages, model=MODEL_NUMERIC,
                          params_snapshot=params, v_wl=v_wl)


def closed_form_trace(params: TechParams, v_wl: float, duration: float, dt: float,
                      model: str = "linear") -> DischargeTrace:
    """Sample one of the closed forms on a uniform grid, tagging the trace
    with the model used and the clamp-at-zero instant when reached."""
    if not (math.isfinite(duration) and duration > 0):
        raise ValueError(f"duration must be positive, got {duration}")
    if not (math.isfinite(dt) and 0 < dt <= duration):
        raise ValueError(f"dt must satisfy 0 < dt <= duration, got {dt}")
    if model == "linear":
        fn, tag = v_blb_linear, MODEL_LINEAR
    elif model == "clm":
        fn, tag = v_blb_clm, MODEL_CLM
    else:
        raise ValueError(f"model must be 'linear' or 'clm', got {model!r}")

    n_steps = int(round(duration / dt))
    times = np.arange(n_steps + 1) * dt
    voltages = np.array([fn(params, v_wl, float(t)) for t in times])
    t_zero = _zero_crossing_time(params, v_wl, model)
    if t_zero is not None and t_zero > times[-1]:
        t_zero = None
    return DischargeTrace(times=times, voltages=voltages, model=tag,
                          params_snapshot=params, v_wl=v_wl, t_zero=t_zero)


def _zero_crossing_time(params: TechParams, v_wl: float, model: str) -> float | None:
    """Analytic instant the closed form hits 0 V, or None if it never does."""
    i0 = saturation_current(params, v_wl)
    if i0 == 0.0:
        return None
    if model == "linear" or params.lambda_ == 0.0:
        return params.v_dd * params.c_blb / i0
    lam = params.lambda_
    rate = lam * i0 / params.c_blb
    return math.log(1.0 + lam * params.v_dd) / rate
