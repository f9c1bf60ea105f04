"""Command-line front end: JSON configuration loading, subcommand dispatch
and CSV emission.

All CSV output is in SI units (seconds, volts, amperes, farads, joules) with
plain ``str(float)`` formatting, so identical (config, flags, seed) produce
byte-identical output. The zero-config behavior is the calibrated default
parameter set; a JSON file (``--config`` or the CIMSIM_CONFIG environment
variable) overrides individual fields, and unknown keys are rejected to catch
typos.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from .device import TechParams, saturation_current
from .discharge import closed_form_trace, pw_max, simulate_discharge
from .errors import ConfigError, SaturationError
from .mac import (
    MacConfig,
    check_saturation,
    energy_estimate,
    multiply,
    timing_total,
)
from .snr import NoiseModel, SnrConfig, snr_improvement
from .varsim import (
    UNITS_FULLSCALE,
    UNITS_LSB,
    VariationSpec,
    compare_dacs,
    run_mc,
    sweep_grid,
)
from .wl_dac import (
    LINEAR,
    MODES,
    ROOT_MODES,
    ROOT_UNBOUNDED,
    DacConfig,
    current_vs_code,
    encode,
    transfer_curve,
)

CONFIG_ENV_VAR = "CIMSIM_CONFIG"

COMMANDS = ("discharge", "pwmax", "dac-sweep", "transfer", "snr", "mac",
            "mac-sweep", "montecarlo", "compare-dacs", "timing")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 64


@dataclass(frozen=True)
class RunConfig:
    """Fully validated run configuration tying every module together.

    The MAC saturation bound is a cross-module property of (mac, tech) that
    only matters when the multiplier pipeline actually runs, so it is
    enforced when a MAC-family subcommand dispatches (exit code 2), not at
    load time; a config that only reconfigures the device for, say, an SNR
    sweep stays loadable.
    """

    tech: TechParams
    dac: DacConfig
    mac: MacConfig
    variation: VariationSpec
    output_path: str | None = None


# ---------------------------------------------------------------------------
# JSON config loading

_TECH_FIELDS = {"beta": "beta", "v_th": "v_th", "lambda": "lambda_",
                "v_dd": "v_dd", "c_blb": "c_blb", "temperature": "temperature"}
_DAC_FIELDS = ("n_bits", "v_dd", "v_th", "mode", "inverted")
_MAC_FIELDS = ("n_bits", "t0", "weighting", "t_wen", "t_pre", "t_sam",
               "share_caps", "adc_bits", "c_sh", "column_model")
_VAR_FIELDS = ("sigma_vth", "sigma_beta_rel", "sigma_c_rel", "n_samples",
               "seed", "report_units")


def _require_mapping(doc, path: str) -> dict:
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a JSON object, got {type(doc).__name__}")
    return doc


def _check_known(doc: dict, known, path: str) -> None:
    unknown = sorted(set(doc) - set(known))
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {unknown}")


def _number(doc: dict, key: str, path: str):
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {v!r}")
    return float(v)


def _integer(doc: dict, key: str, path: str) -> int:
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{path}.{key}: expected an integer, got {v!r}")
    return v


def build_run_config(doc: dict) -> RunConfig:
    """Construct a validated RunConfig from a parsed JSON document; omitted
    fields take the documented defaults."""
    _require_mapping(doc, "config")
    _check_known(doc, ("tech", "dac", "mac", "variation", "output_path"), "config")

    tech_doc = _require_mapping(doc.get("tech", {}), "tech")
    _check_known(tech_doc, _TECH_FIELDS, "tech")
    tech_kwargs = {}
    for key, field_name in _TECH_FIELDS.items():
        if key in tech_doc:
            tech_kwargs[field_name] = _number(tech_doc, key, "tech")
    try:
        tech = TechParams(**tech_kwargs)
    except ValueError as e:
        raise ConfigError(f"tech: {e}") from e

    dac_doc = _require_mapping(doc.get("dac", {}), "dac")
    _check_known(dac_doc, _DAC_FIELDS, "dac")
    dac_kwargs = {"v_dd": tech.v_dd, "v_th": tech.v_th}
    if "n_bits" in dac_doc:
        dac_kwargs["n_bits"] = _integer(dac_doc, "n_bits", "dac")
    if "v_dd" in dac_doc:
        dac_kwargs["v_dd"] = _number(dac_doc, "v_dd", "dac")
    if "v_th" in dac_doc:
        dac_kwargs["v_th"] = _number(dac_doc, "v_th", "dac")
    if "mode" in dac_doc:
        if not isinstance(dac_doc["mode"], str):
            raise ConfigError(f"dac.mode: expected a string, got {dac_doc['mode']!r}")
        dac_kwargs["mode"] = dac_doc["mode"]
    if "inverted" in dac_doc:
        if not isinstance(dac_doc["inverted"], bool):
            raise ConfigError(
                f"dac.inverted: expected a boolean, got {dac_doc['inverted']!r}")
        dac_kwargs["inverted"] = dac_doc["inverted"]
    try:
        dac = DacConfig(**dac_kwargs)
    except ValueError as e:
        raise ConfigError(f"dac: {e}") from e
    if dac.v_dd != tech.v_dd or dac.v_th != tech.v_th:
        raise ConfigError(
            "dac: v_dd/v_th must match tech "
            f"(dac {dac.v_dd}/{dac.v_th} vs tech {tech.v_dd}/{tech.v_th})")

    mac_doc = _require_mapping(doc.get("mac", {}), "mac")
    _check_known(mac_doc, _MAC_FIELDS, "mac")
    mac_kwargs: dict = {"dac": dac}
    if "n_bits" in mac_doc:
        mac_kwargs["n_bits"] = _integer(mac_doc, "n_bits", "mac")
    for key in ("t0", "t_wen", "t_pre", "t_sam", "c_sh"):
        if key in mac_doc:
            mac_kwargs[key] = _number(mac_doc, key, "mac")
    if "adc_bits" in mac_doc:
        mac_kwargs["adc_bits"] = _integer(mac_doc, "adc_bits", "mac")
    for key in ("weighting", "column_model"):
        if key in mac_doc:
            if not isinstance(mac_doc[key], str):
                raise ConfigError(f"mac.{key}: expected a string, got {mac_doc[key]!r}")
            mac_kwargs[key] = mac_doc[key]
    if "share_caps" in mac_doc:
        caps = mac_doc["share_caps"]
        if (not isinstance(caps, list)
                or any(isinstance(c, bool) or not isinstance(c, (int, float))
                       for c in caps)):
            raise ConfigError("mac.share_caps: expected a list of numbers")
        mac_kwargs["share_caps"] = tuple(float(c) for c in caps)
    try:
        mac = MacConfig(**mac_kwargs)
    except ValueError as e:
        raise ConfigError(f"mac: {e}") from e

    var_doc = _require_mapping(doc.get("variation", {}), "variation")
    _check_known(var_doc, _VAR_FIELDS, "variation")
    var_kwargs = {}
    for key in ("sigma_vth", "sigma_beta_rel", "sigma_c_rel"):
        if key in var_doc:
            var_kwargs[key] = _number(var_doc, key, "variation")
    for key in ("n_samples", "seed"):
        if key in var_doc:
            var_kwargs[key] = _integer(var_doc, key, "variation")
    if "report_units" in var_doc:
        if not isinstance(var_doc["report_units"], str):
            raise ConfigError("variation.report_units: expected a string")
        var_kwargs["report_units"] = var_doc["report_units"]
    try:
        variation = VariationSpec(**var_kwargs)
    except ValueError as e:
        raise ConfigError(f"variation: {e}") from e

    output_path = doc.get("output_path")
    if output_path is not None and not isinstance(output_path, str):
        raise ConfigError(f"output_path: expected a string, got {output_path!r}")

    return RunConfig(tech=tech, dac=dac, mac=mac, variation=variation,
                     output_path=output_path)


def load_config(path: str) -> RunConfig:
    """Load and validate a JSON configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path!r}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path!r} is not valid JSON: {e}") from e
    return build_run_config(doc)


def default_run_config() -> RunConfig:
    """The zero-config (calibrated default) profile."""
    return build_run_config({})


# ---------------------------------------------------------------------------
# Subcommand implementations: each returns (header, rows)

def _cmd_discharge(args, run: RunConfig):
    v_wl = run.tech.v_dd if args.v_wl is None else args.v_wl
    if args.model == "numeric":
        trace = simulate_discharge(run.tech, v_wl, args.duration, args.dt)
    else:
        trace = closed_form_trace(run.tech, v_wl, args.duration, args.dt,
                                  model=args.model)
    rows = [[float(t), float(v), trace.model]
            for t, v in zip(trace.times, trace.voltages)]
    return ["t_s", "v_blb_v", "model"], rows


def _cmd_pwmax(args, run: RunConfig):
    tech = run.tech
    v_max = (tech.v_dd + tech.v_th) if args.v_max is None else args.v_max
    if args.points < 2:
        raise ValueError(f"--points must be >= 2, got {args.points}")
    if not args.v_min < v_max:
        raise ValueError("--v-min must be below --v-max")
    rows = []
    for v_wl in np.linspace(args.v_min, v_max, args.points):
        v_wl = float(v_wl)
        rows.append([v_wl, saturation_current(tech, v_wl), pw_max(tech, v_wl)])
    return ["v_wl_v", "i0_a", "pw_max_s"], rows


def _sweep_dac(args, run: RunConfig) -> DacConfig:
    if args.mode is None:
        return run.dac
    return replace(run.dac, mode=args.mode)


def _cmd_dac_sweep(args, run: RunConfig):
    dac = _sweep_dac(args, run)
    currents = dict(current_vs_code(run.tech, dac))
    voltages = dict(transfer_curve(run.tech, dac, args.t0))
    rows = [[code, encode(dac, code), currents[code], voltages[code]]
            for code in range(dac.max_code + 1)]
    return ["code", "v_wl_v", "i0_a", "v_blb_v"], rows


def _cmd_transfer(args, run: RunConfig):
    dac = _sweep_dac(args, run)
    curve = transfer_curve(run.tech, dac, args.t0)
    rows = []
    for idx, (code, v) in enumerate(curve):
        # positive step-down magnitude, matching the SNR module's delta_v
        delta = v - curve[idx + 1][1] if idx + 1 < len(curve) else ""
        rows.append([code, v, delta])
    return ["code", "v_blb_v", "delta_to_next_v"], rows


def _cmd_snr(args, run: RunConfig):
    root_mode = run.dac.mode if run.dac.mode in ROOT_MODES else ROOT_UNBOUNDED
    dac_root = replace(run.dac, mode=root_mode)
    dac_linear = replace(run.dac, mode=LINEAR)
    cfg_root = SnrConfig(dac=dac_root, params=run.tech, t0=args.t0)
    cfg_linear = SnrConfig(dac=dac_linear, params=run.tech, t0=args.t0)
    noise = NoiseModel(c_eff=run.tech.c_blb, temperature=run.tech.temperature)
    table = snr_improvement(cfg_root, cfg_linear, noise)
    rows = [[r.code, r.snr_linear_db, r.snr_root_db, r.improvement_db]
            for r in table.rows]
    n = len(table.rows)
    rows.append(["mean",
                 sum(r.snr_linear_db for r in table.rows) / n,
                 sum(r.snr_root_db for r in table.rows) / n,
                 table.mean_improvement_db])
    return ["code", "snr_linear_db", "snr_root_db", "improvement_db"], rows


_MAC_HEADER = ["d_in", "j_s", "ideal", "v_shared_v", "v_sampled_v", "adc_code",
               "t_mu_s", "energy_est_j"]


def _mac_row(run: RunConfig, d_in: int, j_s: int, with_noise: bool, seed: int):
    noise = None
    rng_seed = None
    if with_noise:
        noise = NoiseModel(c_eff=run.tech.c_blb, temperature=run.tech.temperature)
        rng_seed = np.random.SeedSequence([seed, d_in, j_s])
    res = multiply(run.mac, run.tech, d_in, j_s, noise=noise, rng_seed=rng_seed)
    return [res.d_in, res.j_s, res.ideal_product, res.v_shared, res.v_sampled,
            res.adc_code, timing_total(run.mac),
            energy_estimate(run.mac, run.tech, res)]


def _cmd_mac(args, run: RunConfig):
    check_saturation(run.mac, run.tech)
    seed = run.variation.seed if args.seed is None else args.seed
    return _MAC_HEADER, [_mac_row(run, args.din, args.js, args.noise, seed)]


def _cmd_mac_sweep(args, run: RunConfig):
    check_saturation(run.mac, run.tech)
    seed = run.variation.seed if args.seed is None else args.seed
    top = run.mac.max_operand
    rows = [_mac_row(run, d, j, args.noise, seed)
            for d in range(top + 1) for j in range(top + 1)]
    return _MAC_HEADER, rows


def _variation_from_args(args, run: RunConfig) -> VariationSpec:
    spec = run.variation
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.samples is not None:
        overrides["n_samples"] = args.samples
    if getattr(args, "sigma_vth", None) is not None:
        overrides["sigma_vth"] = args.sigma_vth
    if getattr(args, "sigma_beta_rel", None) is not None:
        overrides["sigma_beta_rel"] = args.sigma_beta_rel
    if getattr(args, "sigma_c_rel", None) is not None:
        overrides["sigma_c_rel"] = args.sigma_c_rel
    if getattr(args, "units", None) is not None:
        overrides["report_units"] = args.units
    return replace(spec, **overrides) if overrides else spec


def _std_header(spec: VariationSpec) -> str:
    return "std_code_lsb" if spec.report_units == UNITS_LSB else "std_code_fs"


def _cmd_montecarlo(args, run: RunConfig):
    check_saturation(run.mac, run.tech)
    spec = _variation_from_args(args, run)
    if (args.din is None) != (args.js is None):
        raise ValueError("--din and --js must be given together")
    header = ["d_in", "j_s", "mean_code", _std_header(spec), "error_rate"]
    if args.din is not None:
        st = run_mc(run.mac, run.tech, spec, args.din, args.js,
                    with_noise=args.noise)
        rows = [[st.d_in, st.j_s, st.mean_code, st.std_code, st.error_rate]]
        rows.append(["worst_std", st.std_code, "worst_pair",
                     f"{st.d_in}x{st.j_s}"])
        return header, rows
    grid = sweep_grid(run.mac, run.tech, spec, with_noise=args.noise,
                      n_workers=args.workers)
    rows = [[st.d_in, st.j_s, st.mean_code, st.std_code, st.error_rate]
            for st in grid.stats]
    rows.append(["worst_std", grid.worst_std, "worst_pair",
                 f"{grid.worst_pair[0]}x{grid.worst_pair[1]}"])
    return header, rows


def _cmd_compare_dacs(args, run: RunConfig):
    spec = _variation_from_args(args, run)
    root_mode = run.dac.mode if run.dac.mode in ROOT_MODES else ROOT_UNBOUNDED
    cfg_root = replace(run.mac, dac=replace(run.dac, mode=root_mode))
    cfg_linear = replace(run.mac, dac=replace(run.dac, mode=LINEAR))
    check_saturation(cfg_root, run.tech)
    check_saturation(cfg_linear, run.tech)
    cmp = compare_dacs(cfg_root, cfg_linear, run.tech, spec,
                       n_workers=args.workers)
    rows = [[r.d_in, r.j_s, r.error_rate, l.error_rate]
            for r, l in zip(cmp.root.stats, cmp.linear.stats)]
    rows.append(["fraction_root_not_worse", cmp.fraction_root_not_worse, "", ""])
    return ["d_in", "j_s", "error_rate_root", "error_rate_linear"], rows


def _cmd_timing(args, run: RunConfig):
    return None, [["t_mu_s", timing_total(run.mac)]]


_HANDLERS = {
    "discharge": _cmd_discharge,
    "pwmax": _cmd_pwmax,
    "dac-sweep": _cmd_dac_sweep,
    "transfer": _cmd_transfer,
    "snr": _cmd_snr,
    "mac": _cmd_mac,
    "mac-sweep": _cmd_mac_sweep,
    "montecarlo": _cmd_montecarlo,
    "compare-dacs": _cmd_compare_dacs,
    "timing": _cmd_timing,
}


def dispatch(subcommand: str, args: argparse.Namespace, run: RunConfig) -> int:
    """Execute one subcommand against a validated RunConfig, writing CSV to
    stdout or to the configured output path. Returns the process exit code."""
    header, rows = _HANDLERS[subcommand](args, run)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    writer.writerows(rows)
    out_path = getattr(args, "output", None) or run.output_path
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing

def _usage() -> str:
    return ("usage: cimsim {" + ",".join(COMMANDS) + "} [flags]\n"
            "Run 'cimsim <subcommand> --help' for the flags of one subcommand.\n")


def _build_parser(cmd: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=f"cimsim {cmd}")
    p.add_argument("--config", "-c", default=None,
                   help=f"JSON config path (default: ${CONFIG_ENV_VAR} or built-ins)")
    p.add_argument("--output", "-o", default=None,
                   help="write CSV here instead of stdout")
    if cmd == "discharge":
        p.add_argument("--v-wl", type=float, default=None,
                       help="word-line voltage, V (default: v_dd)")
        p.add_argument("--duration", type=float, default=2e-9,
                       help="trace duration, s")
        p.add_argument("--dt", type=float, default=1e-12, help="time step, s")
        p.add_argument("--model", choices=("linear", "clm", "numeric"),
                       default="linear")
    elif cmd == "pwmax":
        p.add_argument("--v-min", type=float, default=0.0)
        p.add_argument("--v-max", type=float, default=None,
                       help="default: v_dd + v_th")
        p.add_argument("--points", type=int, default=33)
    elif cmd in ("dac-sweep", "transfer"):
        p.add_argument("--mode", choices=MODES, default=None,
                       help="DAC mode (default: from config)")
        p.add_argument("--t0", type=float, default=50e-12,
                       help="sampling pulse width, s")
    elif cmd == "snr":
        p.add_argument("--t0", type=float, default=50e-12,
                       help="sampling time, s")
    elif cmd in ("mac", "mac-sweep"):
        if cmd == "mac":
            p.add_argument("--din", type=int, required=True)
            p.add_argument("--js", type=int, required=True)
        p.add_argument("--noise", action=argparse.BooleanOptionalAction,
                       default=(cmd == "mac"),
                       help="inject kT/C sampling noise")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    elif cmd == "montecarlo":
        p.add_argument("--din", type=int, default=None)
        p.add_argument("--js", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--sigma-vth", type=float, default=None)
        p.add_argument("--sigma-beta-rel", type=float, default=None)
        p.add_argument("--sigma-c-rel", type=float, default=None)
        p.add_argument("--units", choices=(UNITS_LSB, UNITS_FULLSCALE),
                       default=None)
        p.add_argument("--noise", action=argparse.BooleanOptionalAction,
                       default=True)
        p.add_argument("--workers", type=int, default=1)
    elif cmd == "compare-dacs":
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=1)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] in ("-h", "--help"):
        sys.stdout.write(_usage())
        return EXIT_OK if argv else EXIT_USAGE
    cmd = argv[0]
    if cmd not in COMMANDS:
        sys.stderr.write(f"unknown subcommand {cmd!r}\n{_usage()}")
        return EXIT_USAGE
    parser = _build_parser(cmd)
    try:
        args = parser.parse_args(argv[1:])
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_VALIDATION
    try:
        config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
        run = load_config(config_path) if config_path else default_run_config()
        return dispatch(cmd, args, run)
    except SaturationError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_RUNTIME
    except (ConfigError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
