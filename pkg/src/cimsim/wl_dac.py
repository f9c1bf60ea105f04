"""Word-line DAC encoding laws and code-to-current transfer analysis.

Three encoding modes:

* ``linear`` — the baseline law ``v_th + code*step``.
* ``root_unbounded`` — the root law applied directly to ``code*step``; it
  linearizes the transistor current in the code but overshoots the supply at
  large codes (a boosted word line), which is exactly what the SNR analysis
  assumes.
* ``root_supply_bounded`` — endpoint-corrected root law that maps the full
  code to ``v_dd`` for supply-limited operation.

``step`` is ``(v_dd - v_th) / (2^n_bits - 1)`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .device import TechParams, saturation_current
from .discharge import pw_max, v_blb_linear
from .errors import ConfigError, SaturationError

LINEAR = "linear"
ROOT_UNBOUNDED = "root_unbounded"
ROOT_SUPPLY_BOUNDED = "root_supply_bounded"

MODES = (LINEAR, ROOT_UNBOUNDED, ROOT_SUPPLY_BOUNDED)
ROOT_MODES = (ROOT_UNBOUNDED, ROOT_SUPPLY_BOUNDED)


@dataclass(frozen=True)
class DacConfig:
    """Word-line encoding law. ``inverted`` swaps the code polarity (full code
    maps to threshold) before encoding; it exists because some conventions
    read a low word line as all-ones."""

    n_bits: int = 4
    v_dd: float = 1.0
    v_th: float = 0.615
    mode: str = ROOT_UNBOUNDED
    inverted: bool = False

    def __post_init__(self) -> None:
        if not (isinstance(self.n_bits, int) and self.n_bits >= 1):
            raise ValueError(f"n_bits must be an integer >= 1, got {self.n_bits}")
        if not self.v_th < self.v_dd:
            raise ValueError(
                f"v_th < v_dd violated (v_th={self.v_th}, v_dd={self.v_dd})")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def max_code(self) -> int:
        return (1 << self.n_bits) - 1

    @property
    def step(self) -> float:
        """Voltage step s = (v_dd - v_th) / (2^n_bits - 1), V."""
        return (self.v_dd - self.v_th) / self.max_code


def encode(config: DacConfig, code: int) -> float:
    """Word-line voltage (V) for a digital ``code`` in [0, 2^n_bits - 1].

    All modes map code 0 to ``v_th``; linear and root_supply_bounded map the
    full code to ``v_dd``, while root_unbounded overshoots it.
    """
    if not isinstance(code, int) or isinstance(code, bool):
        raise ValueError(f"code must be an integer, got {code!r}")
    if not 0 <= code <= config.max_code:
        raise ValueError(
            f"code must lie in [0, {config.max_code}], got {code}")
    if config.inverted:
        code = config.max_code - code
    if config.mode == LINEAR:
        return config.v_th + code * config.step
    if config.mode == ROOT_UNBOUNDED:
        return config.v_th + math.sqrt(code * config.step)
    return config.v_th + (config.v_dd - config.v_th) * math.sqrt(
        code / config.max_code)


def _check_params_match(params: TechParams, config: DacConfig) -> None:
    if params.v_dd != config.v_dd or params.v_th != config.v_th:
        raise ConfigError(
            "DacConfig and TechParams disagree: "
            f"v_dd {config.v_dd} vs {params.v_dd}, v_th {config.v_th} vs {params.v_th}")


def current_vs_code(params: TechParams,
                    config: DacConfig) -> list[tuple[int, float]]:
    """Per-code saturation current table [(code, I0 in A)].

    In root_unbounded mode the current is exactly linear through the origin,
    (beta/2)*step*code; the linear mode gives the quadratic (beta/2)*(step*code)^2.
    """
    _check_params_match(params, config)
    return [(code, saturation_current(params, encode(config, code)))
            for code in range(config.max_code + 1)]


def transfer_curve(params: TechParams, config: DacConfig,
                   t0: float) -> list[tuple[int, float]]:
    """Per-code bit-line-bar voltage [(code, V_BLB(t0))] sampled after the
    pulse width ``t0`` using the square-law discharge.

    Raises :class:`SaturationError` naming the first code whose saturation
    window is shorter than ``t0``.
    """
    _check_params_match(params, config)
    if not (math.isfinite(t0) and t0 > 0):
        raise ValueError(f"t0 must be positive, got {t0}")
    out = []
    for code in range(config.max_code + 1):
        v_wl = encode(config, code)
        limit = pw_max(params, v_wl)
        if t0 > limit:
            raise SaturationError(
                f"t0={t0} s exceeds the saturation window {limit} s at code {code} "
                f"(v_wl={v_wl} V)", code=code)
        out.append((code, v_blb_linear(params, v_wl, t0)))
    return out
