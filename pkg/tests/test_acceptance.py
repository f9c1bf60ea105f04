"""Acceptance gate: one test per release criterion, each printing an explicit
pass/fail line (run with ``pytest -v -s tests/test_acceptance.py``).

Every tolerance is fixed here; independent oracles are inline formula
evaluations or plain integer arithmetic, never the code paths under test.
"""

import contextlib
import io
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from cimsim import (
    MacConfig,
    NoiseModel,
    SnrConfig,
    TechParams,
    VariationSpec,
    check_saturation,
    compare_dacs,
    energy_estimate,
    run_mc,
    saturation_time,
    simulate_discharge,
    snr_improvement,
    sweep_grid,
    v_blb_clm,
    v_blb_linear,
)
from cimsim.cli import EXIT_OK, main
from tests.test_varsim import (
    PINNED_ERR_15x15,
    PINNED_MEAN_15x15,
    PINNED_STD_15x15,
    linear_twin,
)

S = 0.385 / 15  # default DAC step (v_dd - v_th) / (2^4 - 1)


@contextlib.contextmanager
def criterion(number: int, title: str):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {number} FAIL - {title}")
        raise
    print(f"\nACCEPTANCE {number} PASS - {title}")


def run_cli(*argv: str) -> str:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        assert main(list(argv)) == EXIT_OK
    return buf.getvalue()


def test_criterion_1_snr_improvement_headline():
    with criterion(1, "mean SNR improvement 10.77 +/- 0.05 dB, oracle agreement 1e-9"):
        start = time.perf_counter()
        lines = run_cli("snr").splitlines()
        rows = [line.split(",") for line in lines[1:-1]]
        mean_row = lines[-1].split(",")
        assert mean_row[0] == "mean"
        reported_mean = float(mean_row[3])

        # headline band
        assert abs(reported_mean - 10.77) <= 0.05

        # independent closed-form oracle vs the simulated SNR-difference chain
        oracle = -20.0 * (math.log10(S)
                          + sum(math.log10(2 * i + 1) for i in range(15)) / 15)
        simulated = sum(float(r[2]) - float(r[1]) for r in rows) / len(rows)
        assert abs(simulated - oracle) <= 1e-9
        assert abs(reported_mean - oracle) <= 1e-9

        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"runtime {elapsed:.2f}s exceeds 1s"


def test_criterion_2_parameter_cancellation():
    with criterion(2, "improvement table bit-identical under 10x parameter scaling"):
        start = time.perf_counter()

        def table(params: TechParams, t0: float):
            dac = replace(MacConfig().dac, v_dd=params.v_dd, v_th=params.v_th)
            root = SnrConfig(dac=dac, params=params, t0=t0)
            linear = SnrConfig(dac=replace(dac, mode="linear"), params=params, t0=t0)
            noise = NoiseModel(c_eff=params.c_blb, temperature=params.temperature)
            return [r.improvement_db
                    for r in snr_improvement(root, linear, noise).rows]

        base = table(TechParams(), 50e-12)
        assert table(replace(TechParams(), beta=1.5e-3), 50e-12) == base
        assert table(replace(TechParams(), c_blb=500e-15), 50e-12) == base
        assert table(replace(TechParams(), temperature=3000.0), 50e-12) == base
        assert table(TechParams(), 5e-13) == base  # 10x down keeps t0 in-window

        elapsed = time.perf_counter() - start
        assert elapsed < 1.0, f"runtime {elapsed:.2f}s exceeds 1s"


def test_criterion_3_closed_form_consistency():
    with criterion(3, "lambda->0 limit within 1e-6 V; RK4 within 0.5 mV at 1 ps"):
        start = time.perf_counter()
        params = TechParams()

        p_eps = replace(params, lambda_=1e-9)
        worst = max(abs(v_blb_clm(p_eps, 1.0, float(t))
                        - v_blb_linear(p_eps, 1.0, float(t)))
                    for t in np.linspace(0.0, 2e-9, 2001))
        assert worst <= 1e-6

        p_lin = replace(params, lambda_=0.0)
        dur = saturation_time(p_lin, 1.0, "linear") * 0.999
        trace = simulate_discharge(p_lin, 1.0, dur, 1e-12)
        dev = max(abs(float(v) - v_blb_linear(p_lin, 1.0, float(t)))
                  for t, v in zip(trace.times, trace.voltages))
        assert dev <= 0.5e-3

        dur = saturation_time(params, 1.0, "clm") * 0.999
        trace = simulate_discharge(params, 1.0, dur, 1e-12)
        dev = max(abs(float(v) - v_blb_clm(params, 1.0, float(t)))
                  for t, v in zip(trace.times, trace.voltages))
        assert dev <= 0.5e-3

        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"runtime {elapsed:.2f}s exceeds 5s"


def test_criterion_4_exhaustive_product_correctness():
    with criterion(4, "noiseless mac-sweep decodes all 256 pairs exactly"):
        start = time.perf_counter()
        lines = run_cli("mac-sweep").splitlines()
        assert len(lines) == 257

        mismatches = 0
        swings = {}
        for line in lines[1:]:
            cells = line.split(",")
            d, j, code = int(cells[0]), int(cells[1]), int(cells[5])
            if code != d * j:  # integer-multiplication oracle
                mismatches += 1
            swings[(d, j)] = 1.0 - float(cells[3])
        assert mismatches == 0

        lsb_ref = swings[(15, 15)] / 225
        residual = max(abs(swings[(d, j)] / (lsb_ref * d * j) - 1.0)
                       for d in range(16) for j in range(16) if d * j > 0)
        assert residual <= 1e-12

        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"runtime {elapsed:.2f}s exceeds 5s"


def test_criterion_5_saturation_bound():
    with criterion(5, "every conducting column inside its window; "
                      "MSB margin 0.64 vs 0.657 ns"):
        params = TechParams()
        t0 = 80e-12
        for d in range(16):
            v_wl = 0.615 + math.sqrt(d * S)
            overdrive = v_wl - 0.615
            if overdrive <= 0:
                continue  # zero current never leaves saturation
            i0 = 0.5 * 150e-6 * overdrive ** 2
            window = 50e-15 / i0 * (1.0 + 0.615 - v_wl)
            for j in range(16):
                for bit in range(4):
                    if (j >> bit) & 1:
                        assert (1 << bit) * t0 <= window, (d, j, bit)

        # explicit top-code margin, asserted against the frozen oracle values
        dwell, window = check_saturation(MacConfig(), params)
        assert dwell == 0.64e-9
        assert window == pytest.approx(6.57171112901224e-10, rel=1e-12)
        assert dwell <= window
        print(f"\n  MSB code-15 margin: dwell {dwell*1e9:.3f} ns <= "
              f"window {window*1e9:.3f} ns")


def test_criterion_6_timing():
    with criterion(6, "default multiply cycle is 5.0 ns (200 MHz)"):
        out = run_cli("timing")
        label, value = out.strip().split(",")
        assert label == "t_mu_s"
        assert float(value) == pytest.approx(5.0e-9, rel=1e-12)


def test_criterion_7_monte_carlo_determinism_and_shape():
    with criterion(7, "seeded Monte Carlo bit-reproducible; zero-sigma exact; "
                      "worst std at/near (15,15); pinned regression"):
        params = TechParams()
        mac = MacConfig()
        spec = VariationSpec()  # 1000 samples, seed 42

        # bit-reproducible across runs and worker counts at full fidelity
        grid_serial = sweep_grid(mac, params, spec, n_workers=1)
        grid_parallel = sweep_grid(mac, params, spec, n_workers=2)
        assert grid_serial == grid_parallel
        pair = run_mc(mac, params, spec, 15, 15)
        assert pair == grid_serial.stats[15 * 16 + 15]

        # zero-sigma, no-noise reproduces the exhaustive noiseless sweep
        zero = VariationSpec(sigma_vth=0, sigma_beta_rel=0, sigma_c_rel=0,
                             n_samples=50)
        for st in sweep_grid(mac, params, zero, with_noise=False).stats:
            assert st.mean_code == st.d_in * st.j_s
            assert st.std_code == 0.0 and st.error_rate == 0.0

        # worst-case std lands on (15,15) or an adjacent pair
        assert grid_serial.worst_pair in {(15, 15), (14, 15), (15, 14), (14, 14)}

        # the pinned-seed regression stands in for any foundry-level figure,
        # which is out of reach at desk scale
        assert pair.std_code == PINNED_STD_15x15
        assert pair.mean_code == PINNED_MEAN_15x15
        assert pair.error_rate == PINNED_ERR_15x15

        # the CV^2 energy figure is labeled as an estimate everywhere
        header = run_cli("mac", "--din", "1", "--js", "1",
                         "--no-noise").splitlines()[0]
        assert "energy_est_j" in header
        assert "estimate" in energy_estimate.__doc__
        print(f"\n  pinned regression (15,15) seed 42: std {pair.std_code} LSB, "
              f"worst pair {grid_serial.worst_pair}")


def test_criterion_8_dac_comparison():
    with criterion(8, "root beats linear on worst-pair error; linear errors "
                      "concentrate at low products"):
        start = time.perf_counter()
        params = TechParams()
        mac = MacConfig()
        cmp = compare_dacs(mac, linear_twin(mac), params, VariationSpec())
        elapsed = time.perf_counter() - start
        assert elapsed < 60.0, f"runtime {elapsed:.1f}s exceeds 60s"

        worst_root = max(st.error_rate for st in cmp.root.stats)
        worst_linear = max(st.error_rate for st in cmp.linear.stats)
        assert worst_root < worst_linear

        mass_low = sum(st.error_rate for st in cmp.linear.stats
                       if 1 <= st.d_in * st.j_s <= 5)
        mass_high = sum(st.error_rate for st in cmp.linear.stats
                        if st.d_in * st.j_s >= 200)
        assert mass_low > mass_high
        print(f"\n  worst-pair error: root {worst_root:.3f} < linear "
              f"{worst_linear:.3f}; linear error mass {mass_low:.2f} (products<=5) "
              f"> {mass_high:.2f} (products>=200)")
