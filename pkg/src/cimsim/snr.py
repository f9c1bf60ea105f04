"""Accuracy quantification: per-code bit-line voltage steps for the DAC laws,
kT/C noise power, SNR in dB, and the root-vs-linear SNR improvement.

The per-code voltage steps carry the 1/2 from the square-law discharge even
though it cancels in the improvement ratio; fidelity to the discharge
equation wins over shorter algebra. The improvement itself is computed in its
algebraically cancelled form, which is what makes it exactly independent of
beta, t0, capacitance and temperature (those factors are common to both DAC
laws and drop out of the dB difference).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .device import BOLTZMANN, TechParams
from .discharge import pw_max
from .errors import ConfigError
from .wl_dac import LINEAR, ROOT_MODES, ROOT_UNBOUNDED, DacConfig, encode


@dataclass(frozen=True)
class NoiseModel:
    """kT/C sampling noise: variance k_B * temperature / c_eff."""

    c_eff: float                # effective sampling capacitance, F
    temperature: float = 300.0  # K

    def __post_init__(self) -> None:
        if not (math.isfinite(self.c_eff) and self.c_eff > 0):
            raise ValueError(f"c_eff must be positive, got {self.c_eff}")
        if not (math.isfinite(self.temperature) and self.temperature > 0):
            raise ValueError(
                f"temperature must be positive, got {self.temperature}")

    @property
    def variance(self) -> float:
        """Noise variance (V^2)."""
        return BOLTZMANN * self.temperature / self.c_eff

    @property
    def sigma(self) -> float:
        """Noise standard deviation (V)."""
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class SnrConfig:
    """Sampling-time + DAC + device bundle for the SNR analysis."""

    dac: DacConfig
    params: TechParams
    t0: float = 50e-12  # sampling time, s

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t0) and self.t0 > 0):
            raise ValueError(f"t0 must be positive, got {self.t0}")
        if (self.dac.v_dd != self.params.v_dd
                or self.dac.v_th != self.params.v_th):
            raise ConfigError(
                "SnrConfig dac and params disagree on v_dd/v_th")
        # The largest-current code must still be inside its saturation window.
        cfg = self.dac
        top = cfg.max_code if not cfg.inverted else 0
        limit = pw_max(self.params, encode(cfg, top))
        if self.t0 > limit:
            raise ValueError(
                f"t0={self.t0} s exceeds the saturation window {limit} s at the "
                "largest-current code")


def delta_v(config: SnrConfig, code_i: int) -> float:
    """Bit-line voltage difference (V) between consecutive codes (i, i+1)
    after the sampling time t0.

    linear mode: (beta*t0 / 2C) * step^2 * (2i+1) — grows with the code.
    root_unbounded: (beta*t0 / 2C) * step — one uniform value for every i.
    root_supply_bounded: uniform as well, scaled by (v_dd - v_th).
    """
    n_pairs = (1 << config.dac.n_bits) - 1
    if not isinstance(code_i, int) or isinstance(code_i, bool):
        raise ValueError(f"code_i must be an integer, got {code_i!r}")
    if not 0 <= code_i <= n_pairs - 1:
        raise ValueError(
            f"code_i must lie in [0, {n_pairs - 1}] (pairs (i, i+1)), got {code_i}")
    p = config.params
    k = p.beta * config.t0 / (2.0 * p.c_blb)
    s = config.dac.step
    mode = config.dac.mode
    if mode == LINEAR:
        return k * s * s * (2 * code_i + 1)
    if mode == ROOT_UNBOUNDED:
        return k * s
    return k * s * (p.v_dd - p.v_th)


def snr_db(config: SnrConfig, noise: NoiseModel, code_i: int) -> float:
    """SNR (dB) of the code pair (i, i+1): 10*log10(delta_v^2 / noise variance)."""
    dv = delta_v(config, code_i)
    return 10.0 * math.log10(dv * dv / noise.variance)


@dataclass(frozen=True)
class ImprovementRow:
    code: int
    snr_linear_db: float
    snr_root_db: float
    improvement_db: float


@dataclass(frozen=True)
class ImprovementTable:
    rows: tuple[ImprovementRow, ...]
    mean_improvement_db: float


def snr_improvement(config_root: SnrConfig, config_linear: SnrConfig,
                    noise: NoiseModel) -> ImprovementTable:
    """Per-code SNR of both DAC laws plus the root-over-linear improvement.

    The improvement column is evaluated in the cancelled form
    ``-20*log10(step*(2i+1))`` (root_unbounded) so it is bit-identical under
    any positive rescaling of beta, t0, capacitance or temperature; the SNR
    columns come from the full delta_v/kT-C chain and must agree with it to
    numerical precision (the test suite checks this).
    """
    if config_root.dac.mode not in ROOT_MODES:
        raise ConfigError(
            f"config_root must use a root mode, got {config_root.dac.mode!r}")
    if config_linear.dac.mode != LINEAR:
        raise ConfigError(
            f"config_linear must use the linear mode, got {config_linear.dac.mode!r}")
    if config_root.params != config_linear.params:
        raise ConfigError("configs must share TechParams")
    if config_root.t0 != config_linear.t0:
        raise ConfigError("configs must share t0")
    if config_root.dac.n_bits != config_linear.dac.n_bits:
        raise ConfigError("configs must share n_bits")

    dac = config_root.dac
    n_pairs = dac.max_code
    rows = []
    total = 0.0
    for i in range(n_pairs):
        if dac.mode == ROOT_UNBOUNDED:
            imp = -20.0 * math.log10(dac.step * (2 * i + 1))
        else:
            imp = -20.0 * math.log10((2 * i + 1) / dac.max_code)
        total += imp
        rows.append(ImprovementRow(
            code=i,
            snr_linear_db=snr_db(config_linear, noise, i),
            snr_root_db=snr_db(config_root, noise, i),
            improvement_db=imp,
        ))
    return ImprovementTable(rows=tuple(rows), mean_improvement_db=total / n_pairs)
