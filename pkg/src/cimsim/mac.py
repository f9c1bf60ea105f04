"""In-memory multiplier pipeline: a digital SRAM cell row, DAC-driven word
lines, bit-significance-weighted discharge through complementary switches,
charge sharing across the column capacitors, sample-and-hold, and an ideal
calibrated ADC.

Weighting modes
---------------
* ``time_weighted_msb_long`` (default): column ``j`` conducts for ``2^j * t0``.
  This is the unique time assignment that makes the shared-node swing exactly
  proportional to the product, so the calibrated ADC decodes ``d_in * j_s``
  with zero error.
* ``time_weighted_msb_short``: the reversed assignment ``2^(n-1-j) * t0``. It
  does NOT decode to the product in general; it is kept selectable because the
  reversed ordering is a documented alternative reading.
* ``amplitude_weighted``: every column conducts for ``t0`` and bit
  significance is carried by per-column word-line amplitude instead, with the
  MSB column at the nominal DAC amplitude and lower columns scaled down
  (overdrive^2 = d * step * 2^j / 2^(n-1)). Amplitudes then descend from the
  MSB column, and the shared swing is again proportional to the product.

Column dynamics use the lambda=0 square law for the ideal transfer;
``column_model="clm"`` switches in the channel-length-modulation exponential
to quantify the systematic nonlinearity. ADC calibration always derives from
the ideal noiseless full-scale run (never from hard-coded voltages), so the
clm deviation shows up as a code error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .device import BOLTZMANN, TechParams
from .discharge import pw_max
from .errors import SaturationError
from .snr import NoiseModel
from .wl_dac import DacConfig, encode

WEIGHT_MSB_LONG = "time_weighted_msb_long"
WEIGHT_MSB_SHORT = "time_weighted_msb_short"
WEIGHT_AMPLITUDE = "amplitude_weighted"
WEIGHTINGS = (WEIGHT_MSB_LONG, WEIGHT_MSB_SHORT, WEIGHT_AMPLITUDE)

COLUMN_IDEAL = "ideal"
COLUMN_CLM = "clm"
COLUMN_MODELS = (COLUMN_IDEAL, COLUMN_CLM)


@dataclass
class SramCell:
    """Single 6T cell: stored bit ``q`` and its complement ``qb``."""

    q: int = 0
    qb: int = 1

    def __post_init__(self) -> None:
        if self.q not in (0, 1) or self.qb != 1 - self.q:
            raise ValueError(f"inconsistent cell state q={self.q}, qb={self.qb}")


def write_word(cells: list[SramCell], bits: int) -> list[SramCell]:
    """Store ``bits`` across the row, cell ``j`` holding bit ``j``. Mutates
    the cells in place and returns the row. Idempotent."""
    if not isinstance(bits, int) or isinstance(bits, bool):
        raise ValueError(f"bits must be an integer, got {bits!r}")
    if not 0 <= bits < (1 << len(cells)):
        raise ValueError(
            f"bits must lie in [0, {(1 << len(cells)) - 1}], got {bits}")
    for j, cell in enumerate(cells):
        b = (bits >> j) & 1
        cell.q = b
        cell.qb = 1 - b
    return cells


def read_word(cells: list[SramCell]) -> int:
    """Digital readback of the row."""
    return sum(cell.q << j for j, cell in enumerate(cells))


@dataclass(frozen=True)
class MacConfig:
    """Array geometry, phase timing and weighting strategy for one multiply.

    ``share_caps`` is the per-column sharing capacitance (F); None means
    ``n_bits`` equal copies of the technology's ``c_blb``. ``c_sh`` is an
    optional sample-and-hold capacitance added to the noise capacitance only
    (0 = ignored).
    """

    n_bits: int = 4
    t0: float = 80e-12          # base pulse width, s
    weighting: str = WEIGHT_MSB_LONG
    t_wen: float = 2e-9         # write phase, s
    t_pre: float = 2e-9         # precharge phase, s
    t_sam: float = 0.36e-9      # sample phase, s
    dac: DacConfig = field(default_factory=DacConfig)
    share_caps: tuple[float, ...] | None = None
    adc_bits: int = 8
    c_sh: float = 0.0
    column_model: str = COLUMN_IDEAL

    def __post_init__(self) -> None:
        if not (isinstance(self.n_bits, int) and self.n_bits >= 1):
            raise ValueError(f"n_bits must be an integer >= 1, got {self.n_bits}")
        if self.dac.n_bits != self.n_bits:
            raise ValueError(
                f"dac.n_bits={self.dac.n_bits} must equal n_bits={self.n_bits}")
        for name in ("t0", "t_wen", "t_pre", "t_sam"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if self.t0 <= 0:
            raise ValueError(f"t0 must be positive, got {self.t0}")
        if self.weighting not in WEIGHTINGS:
            raise ValueError(
                f"weighting must be one of {WEIGHTINGS}, got {self.weighting!r}")
        if self.column_model not in COLUMN_MODELS:
            raise ValueError(
                f"column_model must be one of {COLUMN_MODELS}, got {self.column_model!r}")
        if self.share_caps is not None:
            if len(self.share_caps) != self.n_bits:
                raise ValueError(
                    f"share_caps must have length {self.n_bits}, got {len(self.share_caps)}")
            if any(not (math.isfinite(c) and c > 0) for c in self.share_caps):
                raise ValueError("share_caps must all be positive")
        if not (isinstance(self.adc_bits, int) and self.adc_bits >= 1):
            raise ValueError(f"adc_bits must be an integer >= 1, got {self.adc_bits}")
        if not (math.isfinite(self.c_sh) and self.c_sh >= 0):
            raise ValueError(f"c_sh must be >= 0, got {self.c_sh}")

    @property
    def max_operand(self) -> int:
        return (1 << self.n_bits) - 1


@dataclass(frozen=True)
class ColumnVariation:
    """Per-column device values (absolute, not deltas) for mismatch studies."""

    v_th: tuple[float, ...]   # V
    beta: tuple[float, ...]   # A/V^2
    cap: tuple[float, ...]    # F

    def __post_init__(self) -> None:
        if not len(self.v_th) == len(self.beta) == len(self.cap):
            raise ValueError("v_th, beta and cap must have equal lengths")
        if any(b <= 0 for b in self.beta) or any(c <= 0 for c in self.cap):
            raise ValueError("beta and cap must stay positive")


@dataclass(frozen=True)
class MacResult:
    """One multiply outcome. ``v_shared`` is the analog shared-node voltage
    before noise, ``v_sampled`` after noise injection (equal when no noise).
    ``saturation_ok`` records whether every conducting column stayed inside
    its saturation window for the actual (possibly perturbed) devices; the
    nominal design point is guarded by an exception instead."""

    d_in: int
    j_s: int
    v_shared: float
    v_sampled: float
    adc_code: int
    ideal_product: int
    saturation_ok: bool


def resolved_caps(config: MacConfig, params: TechParams) -> tuple[float, ...]:
    """Per-column sharing capacitances with the equal-cap default applied."""
    if config.share_caps is not None:
        return config.share_caps
    return (params.c_blb,) * config.n_bits


def _column_drive(config: MacConfig, d_in: int) -> list[tuple[float, float]]:
    """Per-column (word-line voltage, dwell time) for the input operand."""
    dac = config.dac
    n = config.n_bits
    if config.weighting == WEIGHT_MSB_LONG:
        v_wl = encode(dac, d_in)
        return [(v_wl, (1 << j) * config.t0) for j in range(n)]
    if config.weighting == WEIGHT_MSB_SHORT:
        v_wl = encode(dac, d_in)
        return [(v_wl, (1 << (n - 1 - j)) * config.t0) for j in range(n)]
    d_eff = dac.max_code - d_in if dac.inverted else d_in
    scale = dac.step / (1 << (n - 1))
    return [(dac.v_th + math.sqrt(d_eff * scale * (1 << j)), config.t0)
            for j in range(n)]


def _pw_max_scalar(beta: float, v_th: float, cap: float, v_dd: float,
                   v_wl: float) -> float:
    overdrive = v_wl - v_th
    if overdrive <= 0:
        return math.inf
    i0 = 0.5 * beta * overdrive * overdrive
    return max(0.0, cap / i0 * (v_dd + v_th - v_wl))


def _column_delta_v(beta: float, v_th: float, cap: float, lam: float,
                    v_dd: float, v_wl: float, dwell: float, model: str) -> float:
    """Voltage drop (V) of one conducting column after its dwell time."""
    overdrive = v_wl - v_th
    if overdrive <= 0:
        return 0.0
    i0 = 0.5 * beta * overdrive * overdrive
    if model == COLUMN_CLM and lam > 0.0:
        dv = -(v_dd + 1.0 / lam) * math.expm1(-lam * i0 * dwell / cap)
    else:
        dv = i0 * dwell / cap
    return min(dv, v_dd)  # cannot discharge below ground


def check_saturation(config: MacConfig, params: TechParams) -> tuple[float, float]:
    """Construction-time guard: the worst-case column dwell must not exceed
    its saturation window at the maximum-current code.

    Returns ``(worst_dwell, window)`` of the binding column so callers can
    inspect the margin; raises :class:`SaturationError` when violated.
    """
    d_top = 0 if config.dac.inverted else config.dac.max_code
    worst: tuple[float, float] | None = None
    worst_col = 0
    for j, (v_wl, dwell) in enumerate(_column_drive(config, d_top)):
        limit = pw_max(params, v_wl)
        if worst is None or dwell - limit > worst[0] - worst[1]:
            worst = (dwell, limit)
            worst_col = j
    assert worst is not None
    if worst[0] > worst[1]:
        raise SaturationError(
            f"column {worst_col} dwell {worst[0]} s exceeds its saturation "
            f"window {worst[1]} s at the maximum-current code", column=worst_col)
    return worst


def multiply(config: MacConfig, params: TechParams, d_in: int, j_s: int,
             noise: NoiseModel | None = None,
             rng_seed=None,
             variation: ColumnVariation | None = None) -> MacResult:
    """Run the full pipeline for one operand pair.

    ``d_in`` is DAC-coded onto the word lines; ``j_s`` is written into the
    cell row. When ``noise`` is given, a single Gaussian kT/C sample of
    variance ``k_B * noise.temperature / (sum(share_caps) + c_sh)`` is added
    at the sample-and-hold; ``rng_seed`` is anything
    ``numpy.random.default_rng`` accepts (int, SeedSequence, Generator).

    ``variation`` carries per-column device values for mismatch studies. The
    hard saturation guard always checks the nominal design point (mismatch is
    unknown to the designer); the perturbed devices' own windows are recorded
    in ``MacResult.saturation_ok`` instead of raising, so Monte Carlo sweeps
    keep running through marginal samples.
    """
    top = config.max_operand
    if not isinstance(d_in, int) or isinstance(d_in, bool) or not 0 <= d_in <= top:
        raise ValueError(f"d_in must be an integer in [0, {top}], got {d_in!r}")
    if not isinstance(j_s, int) or isinstance(j_s, bool) or not 0 <= j_s <= top:
        raise ValueError(f"j_s must be an integer in [0, {top}], got {j_s!r}")

    n = config.n_bits
    caps = resolved_caps(config, params)
    if variation is not None:
        if len(variation.v_th) != n:
            raise ValueError(f"variation must cover {n} columns")
        vths, betas, caps = variation.v_th, variation.beta, variation.cap
    else:
        vths = (params.v_th,) * n
        betas = (params.beta,) * n

    cells = write_word([SramCell() for _ in range(n)], j_s)          # T_WEN
    drives = _column_drive(config, d_in)

    v_dd = params.v_dd
    lam = params.lambda_
    sat_ok = True
    num = 0.0
    den = 0.0
    for j in range(n):                                               # T_pre + dwell
        v_wl, dwell = drives[j]
        v_col = v_dd
        if cells[j].q == 1:
            if dwell > pw_max(params, v_wl):
                raise SaturationError(
                    f"column {j} dwell {dwell} s exceeds its saturation window "
                    f"{pw_max(params, v_wl)} s (v_wl={v_wl} V)", column=j)
            if dwell > _pw_max_scalar(betas[j], vths[j], caps[j], v_dd, v_wl):
                sat_ok = False
            dv = _column_delta_v(betas[j], vths[j], caps[j], lam, v_dd, v_wl,
                                 dwell, config.column_model)
            v_col = v_dd - dv
        num += caps[j] * v_col
        den += caps[j]
    v_shared = num / den                                             # charge sharing

    v_sampled = v_shared                                             # T_sam
    if noise is not None:
        rng = np.random.default_rng(rng_seed)
        sigma = math.sqrt(BOLTZMANN * noise.temperature / (den + config.c_sh))
        v_sampled = min(max(v_shared + sigma * rng.standard_normal(), 0.0), v_dd)

    return MacResult(
        d_in=d_in,
        j_s=j_s,
        v_shared=v_shared,
        v_sampled=v_sampled,
        adc_code=adc_quantize(config, params, v_sampled),
        ideal_product=d_in * j_s,
        saturation_ok=sat_ok,
    )


@lru_cache(maxsize=64)
def full_scale_swing(config: MacConfig, params: TechParams) -> float:
    """Calibrated full-scale swing (V): the ideal noiseless shared-node drop
    at maximum operands, using the lambda=0 square law regardless of the
    configured column model."""
    caps = resolved_caps(config, params)
    d_top = 0 if config.dac.inverted else config.dac.max_code
    num = 0.0
    den = 0.0
    for j, (v_wl, dwell) in enumerate(_column_drive(config, d_top)):
        dv = _column_delta_v(params.beta, params.v_th, caps[j], 0.0,
                             params.v_dd, v_wl, dwell, COLUMN_IDEAL)
        num += caps[j] * (params.v_dd - dv)
        den += caps[j]
    return params.v_dd - num / den


def adc_lsb(config: MacConfig, params: TechParams) -> float:
    """One quantization step (V): full scale over (2^n_bits - 1)^2 product codes."""
    return full_scale_swing(config, params) / (config.max_operand ** 2)


def adc_quantize(config: MacConfig, params: TechParams, v: float) -> int:
    """Ideal-ramp quantizer: code = round((v_dd - v) / LSB), ties rounding
    half-up, clamped to the ADC's own range [0, 2^adc_bits - 1]."""
    if not math.isfinite(v) or not 0 <= v <= params.v_dd:
        raise ValueError(f"v must lie in [0, v_dd={params.v_dd}], got {v}")
    raw = math.floor((params.v_dd - v) / adc_lsb(config, params) + 0.5)
    return min(max(raw, 0), (1 << config.adc_bits) - 1)


def timing_total(config: MacConfig) -> float:
    """Total multiply-cycle duration (s): write + precharge + the longest
    column dwell + sample."""
    if config.weighting == WEIGHT_AMPLITUDE:
        discharge = config.t0
    else:
        discharge = (1 << (config.n_bits - 1)) * config.t0
    return config.t_wen + config.t_pre + discharge + config.t_sam


def energy_estimate(config: MacConfig, params: TechParams,
                    result: MacResult) -> float:
    """First-order CV estimate (J) of one multiply: the charge replenished at
    the next precharge (sum_j C_j * v_dd * dV_j, equal by charge conservation
    to C_total * v_dd * (v_dd - v_shared)) plus the worst-case bound
    C_total * v_dd^2 for precharging a fully discharged array.

    This is an estimate only; it is not a measured or transistor-level
    figure, and all CSV output labels it accordingly.
    """
    c_total = sum(resolved_caps(config, params))
    discharge = c_total * params.v_dd * (params.v_dd - result.v_shared)
    precharge_bound = c_total * params.v_dd ** 2
    return discharge + precharge_bound
