"""Technology constants and the access-transistor current model.

All quantities are SI: volts, amperes, farads, seconds, kelvin. The
transconductance factor folds mobility, oxide capacitance and geometry into a
single ``beta`` (A/V^2); individual device dimensions are never exposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

BOLTZMANN = 1.380649e-23  # J/K

CUTOFF = "cutoff"
SATURATION = "saturation"
TRIODE = "triode"


@dataclass(frozen=True)
class TechParams:
    """Device constants shared by every simulation in the package.

    The defaults are the calibrated desk-scale set: 1 V supply, 50 fF
    bit-line-bar capacitance, lambda 0.15 /V, 0.615 V threshold, and
    beta 150 uA/V^2. beta is a documented engineering choice (it keeps the
    worst-case MAC column inside its saturation window at the default base
    pulse width) and is fully overridable.
    """

    beta: float = 150e-6        # transconductance factor, A/V^2
    v_th: float = 0.615         # threshold voltage, V
    lambda_: float = 0.15       # channel-length modulation, 1/V
    v_dd: float = 1.0           # supply voltage, V
    c_blb: float = 50e-15       # bit-line-bar capacitance, F
    temperature: float = 300.0  # K

    def __post_init__(self) -> None:
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")
        if not (math.isfinite(self.c_blb) and self.c_blb > 0):
            raise ValueError(f"c_blb must be positive and finite, got {self.c_blb}")
        if not (math.isfinite(self.temperature) and self.temperature > 0):
            raise ValueError(
                f"temperature must be positive and finite, got {self.temperature}")
        if not (math.isfinite(self.lambda_) and self.lambda_ >= 0):
            raise ValueError(f"lambda_ must be >= 0 and finite, got {self.lambda_}")
        if not (math.isfinite(self.v_dd) and math.isfinite(self.v_th)):
            raise ValueError("v_dd and v_th must be finite")
        if not 0 < self.v_th < self.v_dd:
            raise ValueError(
                f"0 < v_th < v_dd violated (v_th={self.v_th}, v_dd={self.v_dd})")


def saturation_current(params: TechParams, v_gs: float) -> float:
    """Square-law saturation drain current (A) at gate-source voltage ``v_gs``.

    Returns 0 for zero or negative overdrive; channel-length modulation is
    deliberately excluded here (see :func:`clm_current`).
    """
    if not math.isfinite(v_gs) or v_gs < 0:
        raise ValueError(f"v_gs must be finite and non-negative, got {v_gs}")
    overdrive = v_gs - params.v_th
    if overdrive <= 0:
        return 0.0
    return 0.5 * params.beta * overdrive * overdrive


def clm_current(params: TechParams, v_gs: float, v_blb: float) -> float:
    """Saturation current (A) scaled by the channel-length-modulation factor
    ``(1 + lambda * v_blb)`` at drain voltage ``v_blb``.

    Identical to :func:`saturation_current` when ``lambda_`` is 0.
    """
    if not math.isfinite(v_blb) or not 0 <= v_blb <= params.v_dd:
        raise ValueError(
            f"v_blb must lie in [0, v_dd={params.v_dd}], got {v_blb}")
    return saturation_current(params, v_gs) * (1.0 + params.lambda_ * v_blb)


def region_of(params: TechParams, v_gs: float, v_ds: float) -> str:
    """Operating region of the access transistor: ``cutoff``, ``saturation``
    or ``triode``. The boundary ``v_ds == v_gs - v_th`` counts as saturation.
    """
    if not (math.isfinite(v_gs) and math.isfinite(v_ds)):
        raise ValueError("v_gs and v_ds must be finite")
    if v_gs <= params.v_th:
        return CUTOFF
    if v_ds >= v_gs - params.v_th:
        return SATURATION
    return TRIODE
