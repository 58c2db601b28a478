"""Chirp generation and spectral estimation against analytic oracles."""

import math

import numpy as np
import pytest

from hilsim.sysid import (
    DegenerateInput, MissingColumn, NyquistViolation,
    SweepSpec, estimate_frequency_response, generate_sweep, identify_axis,
)

FS = 100.0


def zero_crossing_freq(u, fs, where="head"):
    """Frequency from the spacing of the first/last few zero crossings."""
    signs = np.signbit(u)
    crossings = np.nonzero(signs[1:] != signs[:-1])[0]
    pick = crossings[:3] if where == "head" else crossings[-3:]
    # linear interpolation of the crossing instants
    t = []
    for i in pick:
        frac = u[i] / (u[i] - u[i + 1])
        t.append((i + frac) / fs)
    half_periods = np.diff(t)
    return 1.0 / (2.0 * float(np.mean(half_periods)))


def test_chirp_endpoint_frequencies():
    # a gentle sweep keeps the frequency near-constant across the first/last
    # cycle, so the zero-crossing measurement resolves the endpoints to 0.1%
    spec = SweepSpec(f_start=1.0, f_end=1.1, duration=200.0, amplitude=1.0,
                     taper_fraction=0.0)
    u = generate_sweep(spec, FS)
    assert len(u) == 20000
    f_head = zero_crossing_freq(u, FS, "head")
    f_tail = zero_crossing_freq(u, FS, "tail")
    assert f_head == pytest.approx(1.0, rel=0.001)
    assert f_tail == pytest.approx(1.1, rel=0.001)


def test_chirp_instantaneous_frequency_analytic():
    # tighter endpoint check straight from the phase derivative
    spec = SweepSpec(f_start=0.5, f_end=8.0, duration=40.0, amplitude=1.0,
                     taper_fraction=0.0)
    k = spec.f_end / spec.f_start
    t = np.arange(int(40 * FS)) / FS
    f_inst = spec.f_start * k ** (t / spec.duration)
    assert f_inst[0] == pytest.approx(0.5, rel=1e-3)
    assert f_inst[-1] == pytest.approx(8.0, rel=1e-2)
    # and the generated waveform's crossings track that schedule mid-record
    u = generate_sweep(spec, FS)
    mid = slice(len(u) // 2 - 200, len(u) // 2 + 200)
    f_mid = zero_crossing_freq(u[mid], FS, "head")
    assert f_mid == pytest.approx(float(f_inst[len(u) // 2 - 200]), rel=0.05)


def test_chirp_envelope_without_taper():
    spec = SweepSpec(f_start=0.5, f_end=10.0, duration=30.0, amplitude=2.5,
                     taper_fraction=0.0)
    u = generate_sweep(spec, FS)
    assert np.max(np.abs(u)) == pytest.approx(2.5, abs=1e-9)


def test_chirp_taper_suppresses_ends():
    spec = SweepSpec(f_start=0.5, f_end=10.0, duration=30.0, amplitude=1.0,
                     taper_fraction=0.1)
    u = generate_sweep(spec, FS)
    assert abs(u[0]) < 1e-9
    assert abs(u[-1]) < 0.05
    assert np.max(np.abs(u)) <= 1.0 + 1e-9


def test_nyquist_violation():
    spec = SweepSpec(f_start=1.0, f_end=50.0, duration=10.0, amplitude=1.0)
    with pytest.raises(NyquistViolation):
        generate_sweep(spec, 100.0)  # f_end == fs/2 exactly


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(f_start=5.0, f_end=1.0, duration=10.0, amplitude=1.0)
    with pytest.raises(ValueError):
        SweepSpec(f_start=1.0, f_end=5.0, duration=10.0, amplitude=1.0,
                  taper_fraction=0.6)


# --- estimator ------------------------------------------------------------------

def white_noise(n, rng):
    return rng.standard_normal(n)


def test_identity_system(rng):
    u = white_noise(8192, rng)
    fr = estimate_frequency_response(u, u.copy(), FS, window_len=1024)
    assert np.all(np.abs(fr.magnitude) < 0.01)
    assert np.all(np.abs(fr.phase) < 0.1)
    assert np.all(np.abs(fr.coherence - 1.0) < 1e-6)
    assert np.all(np.diff(fr.frequencies) > 0)


def test_pure_delay_phase_slope(rng):
    k = 7
    u = white_noise(16384, rng)
    y = np.zeros_like(u)
    y[k:] = u[:-k]
    fr = estimate_frequency_response(u, y, FS, window_len=1024)
    band = (fr.frequencies > 2.0) & (fr.frequencies < 40.0)
    slope = np.polyfit(fr.frequencies[band], fr.phase[band], 1)[0]
    expect = -360.0 * k / FS  # deg per Hz
    assert slope == pytest.approx(expect, rel=0.01)
    assert np.all(np.abs(fr.magnitude[band]) < 0.1)


def simulate_second_order(u, fs, wn, zeta):
    """RK4 discretization of xddot + 2 zeta wn xdot + wn^2 x = wn^2 u."""
    dt = 1.0 / fs
    x = v = 0.0
    out = np.empty_like(u)
    for i, ui in enumerate(u):
        def deriv(x_, v_):
            return v_, wn * wn * (ui - x_) - 2.0 * zeta * wn * v_
        k1x, k1v = deriv(x, v)
        k2x, k2v = deriv(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v)
        k3x, k3v = deriv(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v)
        k4x, k4v = deriv(x + dt * k3x, v + dt * k3v)
        x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        out[i] = x
    return out


def second_order_mag_db(f, wn, zeta):
    w = 2.0 * math.pi * np.asarray(f)
    h = wn ** 2 / np.sqrt((wn ** 2 - w ** 2) ** 2 + (2 * zeta * wn * w) ** 2)
    return 20.0 * np.log10(h)


def test_second_order_system_peak():
    wn = 2.0 * math.pi * 1.0   # 1 Hz
    zeta = 0.2
    spec = SweepSpec(f_start=0.1, f_end=8.0, duration=240.0, amplitude=1.0,
                     taper_fraction=0.05)
    u = generate_sweep(spec, FS)
    y = simulate_second_order(u, FS, wn, zeta)
    fr = estimate_frequency_response(u, y, FS, window_len=4096, overlap=0.75)

    band = (fr.frequencies >= 0.2) & (fr.frequencies <= 4.0)
    assert np.min(fr.coherence[band]) > 0.95

    i_peak = int(np.argmax(np.where(band, fr.magnitude, -np.inf)))
    f_peak = fr.frequencies[i_peak]
    analytic_peak_f = 1.0 * math.sqrt(1.0 - 2.0 * zeta ** 2)
    assert f_peak == pytest.approx(analytic_peak_f, rel=0.05)

    analytic_at_peak = float(second_order_mag_db([f_peak], wn, zeta)[0])
    assert fr.magnitude[i_peak] == pytest.approx(analytic_at_peak, abs=0.5)

    # whole excited band tracks the analytic curve
    analytic = second_order_mag_db(fr.frequencies[band], wn, zeta)
    assert np.max(np.abs(fr.magnitude[band] - analytic)) < 1.0


def test_linearity_scale_invariance(rng):
    u = white_noise(4096, rng)
    y = np.convolve(u, [0.3, 0.5, 0.2], mode="same")
    a = estimate_frequency_response(u, y, FS, window_len=512)
    # power-of-two scaling is float-exact end to end
    b = estimate_frequency_response(4.0 * u, 4.0 * y, FS, window_len=512)
    assert np.array_equal(a.magnitude, b.magnitude)
    assert np.array_equal(a.phase, b.phase)
    assert np.array_equal(a.coherence, b.coherence)
    # arbitrary scaling matches to rounding error
    c = estimate_frequency_response(3.7 * u, 3.7 * y, FS, window_len=512)
    assert np.allclose(a.magnitude, c.magnitude, atol=1e-9)
    assert np.allclose(a.coherence, c.coherence, atol=1e-12)


def test_coherence_bounded_for_arbitrary_inputs(rng):
    for _ in range(20):
        u = rng.standard_normal(2048) * float(rng.uniform(0.1, 100))
        y = rng.standard_normal(2048) * float(rng.uniform(0.1, 100))
        fr = estimate_frequency_response(u, y, FS, window_len=256)
        assert np.all(fr.coherence >= -1e-9)
        assert np.all(fr.coherence <= 1.0 + 1e-9)


def test_parseval_white_noise(rng):
    u = white_noise(65536, rng)
    fr_len = 1024
    fr = estimate_frequency_response(u, u.copy(), FS, window_len=fr_len)
    # rebuild S_uu from the estimator's own pieces: integrate over frequency
    # and compare to the signal variance
    window = 0.5 - 0.5 * np.cos(2 * math.pi * np.arange(fr_len) / fr_len)
    w_power = float(np.sum(window ** 2))
    step = fr_len // 2
    suu = None
    count = 0
    for start in range(0, len(u) - fr_len + 1, step):
        f = np.fft.rfft(u[start:start + fr_len] * window)
        a = (f.conj() * f).real
        suu = a if suu is None else suu + a
        count += 1
    suu /= count * FS * w_power
    suu[1:-1] *= 2.0
    integral = float(np.sum(suu) * (FS / fr_len))
    assert integral == pytest.approx(float(np.var(u)), rel=0.05)


def test_noisy_output_degrades_coherence_in_band(rng):
    # 20 dB SNR: coherence must drop visibly below 1 but stay above 0.6
    wn, zeta = 2.0 * math.pi, 0.2
    spec = SweepSpec(f_start=0.1, f_end=8.0, duration=120.0, amplitude=1.0,
                     taper_fraction=0.05)
    u = generate_sweep(spec, FS)
    y = simulate_second_order(u, FS, wn, zeta)
    noise_sd = float(np.std(y)) / 10.0  # 20 dB down in power
    y_noisy = y + noise_sd * rng.standard_normal(len(y))
    fr = estimate_frequency_response(u, y_noisy, FS, window_len=1024)
    band = (fr.frequencies >= 0.3) & (fr.frequencies <= 3.0)
    coh = fr.coherence[band]
    assert float(np.median(coh)) < 0.999
    assert float(np.min(coh)) > 0.6


def test_degenerate_input():
    u = np.zeros(4096)
    y = np.ones(4096)
    with pytest.raises(DegenerateInput):
        estimate_frequency_response(u, y, FS, window_len=512)


def test_no_duplicate_dc_or_nyquist(rng):
    u = white_noise(4096, rng)
    fr = estimate_frequency_response(u, u.copy(), FS, window_len=512)
    assert fr.frequencies[0] > 0.0                 # DC dropped
    assert fr.frequencies[-1] == pytest.approx(FS / 2)
    assert len(np.unique(fr.frequencies)) == len(fr.frequencies)


# --- identify_axis ------------------------------------------------------------------

def test_identify_axis_from_columns(rng):
    n = 8192
    t = np.arange(n) / FS
    u = white_noise(n, rng) + 5.0  # nonzero mean removed by detrend
    y = np.zeros(n)
    y[3:] = u[:-3]
    table = {"time_s": t, "input_us": u, "output_deg": y}
    fr = identify_axis(table, "input_us", "output_deg")
    band = (fr.frequencies > 2.0) & (fr.frequencies < 40.0)
    slope = np.polyfit(fr.frequencies[band], fr.phase[band], 1)[0]
    assert slope == pytest.approx(-360.0 * 3 / FS, rel=0.02)


def test_identify_axis_missing_column():
    table = {"time_s": np.arange(100) / FS, "a": np.zeros(100)}
    with pytest.raises(MissingColumn) as err:
        identify_axis(table, "nope", "a")
    assert "time_s" in str(err.value)  # lists what IS available


def test_identify_axis_constant_input():
    n = 4096
    table = {"time_s": np.arange(n) / FS, "u": np.full(n, 7.0),
             "y": np.random.default_rng(0).standard_normal(n)}
    with pytest.raises(DegenerateInput):
        identify_axis(table, "u", "y")


def test_identify_axis_writes_bode_csv(tmp_path, rng):
    n = 4096
    table = {"time_s": np.arange(n) / FS,
             "u": white_noise(n, rng), "y": white_noise(n, rng)}
    out = tmp_path / "bode.csv"
    fr = identify_axis(table, "u", "y", out_csv=str(out))
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "freq_hz,mag_db,phase_deg,coherence"
    assert len(lines) == len(fr.frequencies) + 1
