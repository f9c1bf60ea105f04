"""Behavioral simulator for discharge-based in-SRAM analog multiplication.

Subpackages by concern: ``device`` (square-law access transistor),
``discharge`` (bit-line-bar dynamics), ``wl_dac`` (word-line encoding laws),
``snr`` (kT/C noise analysis), ``mac`` (the charge-sharing multiplier
pipeline), ``varsim`` (seeded Monte Carlo mismatch engine) and ``cli``
(JSON-configured CSV-emitting command line).
"""

from .device import BOLTZMANN, CUTOFF, SATURATION, TRIODE, TechParams
from .device import clm_current, region_of, saturation_current
from .discharge import (
    DischargeTrace,
    closed_form_trace,
    pw_max,
    saturation_time,
    simulate_discharge,
    v_blb_clm,
    v_blb_linear,
)
from .errors import ConfigError, SaturationError
from .mac import (
    ColumnVariation,
    MacConfig,
    MacResult,
    SramCell,
    adc_lsb,
    adc_quantize,
    check_saturation,
    energy_estimate,
    full_scale_swing,
    multiply,
    read_word,
    timing_total,
    write_word,
)
from .snr import ImprovementTable, NoiseModel, SnrConfig, delta_v, snr_db, snr_improvement
from .varsim import (
    DacComparison,
    McGrid,
    McStats,
    VariationSpec,
    compare_dacs,
    gaussian_error_rate,
    run_mc,
    sweep_grid,
)
from .wl_dac import (
    LINEAR,
    ROOT_SUPPLY_BOUNDED,
    ROOT_UNBOUNDED,
    DacConfig,
    current_vs_code,
    encode,
    transfer_curve,
)

__version__ = "0.1.0"

__all__ = [
    "BOLTZMANN", "CUTOFF", "SATURATION", "TRIODE",
    "TechParams", "clm_current", "region_of", "saturation_current",
    "DischargeTrace", "closed_form_trace", "pw_max", "saturation_time",
    "simulate_discharge", "v_blb_clm", "v_blb_linear",
    "ConfigError", "SaturationError",
    "LINEAR", "ROOT_UNBOUNDED", "ROOT_SUPPLY_BOUNDED",
    "DacConfig", "current_vs_code", "encode", "transfer_curve",
    "ImprovementTable", "NoiseModel", "SnrConfig", "delta_v", "snr_db",
    "snr_improvement",
    "ColumnVariation", "MacConfig", "MacResult", "SramCell",
    "adc_lsb", "adc_quantize", "check_saturation", "energy_estimate",
    "full_scale_swing", "multiply", "read_word", "timing_total", "write_word",
    "DacComparison", "McGrid", "McStats", "VariationSpec",
    "compare_dacs", "gaussian_error_rate", "run_mc", "sweep_grid",
    "__version__",
]
