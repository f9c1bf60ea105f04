"""Seeded Monte Carlo process-variation engine over the MAC pipeline.

Each sample perturbs the per-column threshold voltage (absolute Gaussian),
transconductance and sharing capacitance (relative Gaussians truncated at
+/-4 sigma and floored above zero), runs the multiply with kT/C noise, and
records the ADC code. Per-sample random substreams are derived from
(seed, d_in, j_s, sample index) via SeedSequence spawning, never from
scheduling order, so results are bit-identical across runs and worker counts.

``error_rate`` counts samples whose code differs from the ideal integer
product ``d_in * j_s``. For the default root-DAC pipeline the noiseless
decode equals that product exactly, so zero-variance runs report zero error;
the linear-DAC comparison mode misdecodes parts of the grid even without
noise, which is precisely the systematic compression the comparison is meant
to expose.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError
from .device import TechParams
from .mac import ColumnVariation, MacConfig, multiply, resolved_caps
from .snr import NoiseModel
from .wl_dac import LINEAR, ROOT_MODES

UNITS_LSB = "lsb"
UNITS_FULLSCALE = "fullscale"

_FACTOR_FLOOR = 1e-9  # keeps perturbed beta/cap physical for extreme sigmas


@dataclass(frozen=True)
class VariationSpec:
    """Mismatch magnitudes and sampling plan. ``report_units`` switches the
    std column between ADC LSB units (default) and normalized full scale."""

    sigma_vth: float = 0.02       # absolute std of per-column V_TH, V
    sigma_beta_rel: float = 0.03  # relative std of per-column beta
    sigma_c_rel: float = 0.02     # relative std of per-column capacitance
    n_samples: int = 1000
    seed: int = 42
    report_units: str = UNITS_LSB

    def __post_init__(self) -> None:
        for name in ("sigma_vth", "sigma_beta_rel", "sigma_c_rel"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if not (isinstance(self.n_samples, int) and self.n_samples >= 1):
            raise ValueError(f"n_samples must be an integer >= 1, got {self.n_samples}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.report_units not in (UNITS_LSB, UNITS_FULLSCALE):
            raise ValueError(
                f"report_units must be '{UNITS_LSB}' or '{UNITS_FULLSCALE}', "
                f"got {self.report_units!r}")


@dataclass(frozen=True)
class McStats:
    """Per-operand-pair Monte Carlo statistics. ``std_code`` is the
    population standard deviation of the ADC codes, in the units selected by
    ``VariationSpec.report_units``; ``seed`` records provenance."""

    d_in: int
    j_s: int
    mean_code: float
    std_code: float
    error_rate: float
    seed: int


@dataclass(frozen=True)
class McGrid:
    """Row-major (d_in outer, j_s inner) grid of per-pair statistics."""

    stats: tuple[McStats, ...]
    worst_std: float
    worst_pair: tuple[int, int]


@dataclass(frozen=True)
class DacComparison:
    """Paired root/linear grids run with identical substreams, plus the
    fraction of nonzero-product pairs where the root law is not worse."""

    root: McGrid
    linear: McGrid
    fraction_root_not_worse: float


def _sample_variation(rng: np.random.Generator, params: TechParams,
                      caps: tuple[float, ...],
                      spec: VariationSpec) -> ColumnVariation:
    """Draw one per-column perturbation set; consumes exactly 3n normals."""
    n = len(caps)
    z = rng.standard_normal(3 * n)
    v_th = tuple(params.v_th + spec.sigma_vth * z[j] for j in range(n))
    beta = tuple(
        params.beta * max(1.0 + spec.sigma_beta_rel * min(max(z[n + j], -4.0), 4.0),
                          _FACTOR_FLOOR)
        for j in range(n))
    cap = tuple(
        caps[j] * max(1.0 + spec.sigma_c_rel * min(max(z[2 * n + j], -4.0), 4.0),
                      _FACTOR_FLOOR)
        for j in range(n))
    return ColumnVariation(v_th=v_th, beta=beta, cap=cap)


def run_mc(config: MacConfig, params: TechParams, spec: VariationSpec,
           d_in: int, j_s: int, with_noise: bool = True) -> McStats:
    """Monte Carlo statistics for one operand pair.

    Identical (spec, operands) give bit-identical results regardless of how
    many other pairs run, in which order, or in which process.
    """
    top = config.max_operand
    if not 0 <= d_in <= top or not 0 <= j_s <= top:
        raise ValueError(f"operands must lie in [0, {top}], got ({d_in}, {j_s})")
    caps = resolved_caps(config, params)
    noise = None
    if with_noise:
        noise = NoiseModel(c_eff=sum(caps) + config.c_sh,
                           temperature=params.temperature)
    children = np.random.SeedSequence([spec.seed, d_in, j_s]).spawn(spec.n_samples)
    ideal = d_in * j_s
    codes = np.empty(spec.n_samples, dtype=np.int64)
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        var = _sample_variation(rng, params, caps, spec)
        res = multiply(config, params, d_in, j_s, noise=noise, rng_seed=rng,
                       variation=var)
        codes[k] = res.adc_code
    std = float(np.std(codes))
    if spec.report_units == UNITS_FULLSCALE:
        std /= config.max_operand ** 2
    return McStats(d_in=d_in, j_s=j_s, mean_code=float(np.mean(codes)),
                   std_code=std,
                   error_rate=float(np.mean(codes != ideal)),
                   seed=spec.seed)


def _grid_task(args) -> McStats:
    config, params, spec, d_in, j_s, with_noise = args
    return run_mc(config, params, spec, d_in, j_s, with_noise=with_noise)


def sweep_grid(config: MacConfig, params: TechParams, spec: VariationSpec,
               with_noise: bool = True, n_workers: int = 1) -> McGrid:
    """Per-pair statistics over the full operand grid, optionally fanned out
    across worker processes (one pair per task, merged by operand index)."""
    if not (isinstance(n_workers, int) and n_workers >= 1):
        raise ValueError(f"n_workers must be an integer >= 1, got {n_workers}")
    pairs = [(d, j) for d in range(config.max_operand + 1)
             for j in range(config.max_operand + 1)]
    tasks = [(config, params, spec, d, j, with_noise) for d, j in pairs]
    if n_workers == 1:
        stats = [_grid_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            stats = list(pool.map(_grid_task, tasks, chunksize=8))
    worst = max(stats, key=lambda st: st.std_code)
    return McGrid(stats=tuple(stats), worst_std=worst.std_code,
                  worst_pair=(worst.d_in, worst.j_s))


def compare_dacs(config_root: MacConfig, config_linear: MacConfig,
                 params: TechParams, spec: VariationSpec,
                 with_noise: bool = True, n_workers: int = 1) -> DacComparison:
    """Run the grid under both DAC laws with the same seed (hence identical
    device perturbations per sample) and compare per-pair error rates."""
    if config_root.dac.mode not in ROOT_MODES:
        raise ConfigError(
            f"config_root must use a root mode, got {config_root.dac.mode!r}")
    if config_linear.dac.mode != LINEAR:
        raise ConfigError(
            f"config_linear must use the linear mode, got {config_linear.dac.mode!r}")
    if replace(config_root, dac=config_linear.dac) != config_linear:
        raise ConfigError("configs must differ only in the dac mode")
    root = sweep_grid(config_root, params, spec, with_noise=with_noise,
                      n_workers=n_workers)
    linear = sweep_grid(config_linear, params, spec, with_noise=with_noise,
                        n_workers=n_workers)
    wins = 0
    nonzero = 0
    for r, l in zip(root.stats, linear.stats):
        if r.d_in * r.j_s == 0:
            continue
        nonzero += 1
        if r.error_rate <= l.error_rate:
            wins += 1
    return DacComparison(root=root, linear=linear,
                         fraction_root_not_worse=wins / nonzero)


def gaussian_error_rate(level_spacing: float, sigma: float) -> float:
    """Probability that a Gaussian sample of std ``sigma`` lands beyond the
    midpoint to either neighboring level when levels sit ``level_spacing``
    apart: erfc(spacing / (2*sqrt(2)*sigma))."""
    if level_spacing < 0 or sigma < 0:
        raise ValueError("level_spacing and sigma must be >= 0")
    if sigma == 0.0:
        return 0.0 if level_spacing > 0 else 1.0
    return math.erfc(level_spacing / (2.0 * math.sqrt(2.0) * sigma))
