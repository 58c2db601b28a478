"""Frequency-domain system identification from logged input/output pairs.

Two halves: a logarithmic chirp generator for exciting one axis, and a
Welch-averaged cross-spectral estimator producing magnitude/phase/coherence
over the excited band:

    H(f) = S_uy(f) / S_uu(f)        gamma^2(f) = |S_uy|^2 / (S_uu * S_yy)

Hann windows, configurable overlap, one-sided spectra with density scaling
so the auto-spectrum integral matches signal variance. The transform is
numpy's FFT over power-of-two windows. Batch-pure: results are independent
of chunking or call order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class NyquistViolation(ValueError):
    """Sweep end frequency is not below half the sample rate."""


class DegenerateInput(ValueError):
    """Input carries no excitation (zero auto-spectrum everywhere)."""


class MissingColumn(KeyError):
    """Named log column does not exist."""


@dataclass(frozen=True)
class SweepSpec:
    f_start: float           # Hz
    f_end: float             # Hz
    duration: float          # s
    amplitude: float         # actuator units around trim
    taper_fraction: float = 0.05

    def __post_init__(self) -> None:
        if not 0.0 < self.f_start < self.f_end:
            raise ValueError("need 0 < f_start < f_end")
        if self.duration <= 0 or self.amplitude <= 0:
            raise ValueError("duration and amplitude must be positive")
        if not 0.0 <= self.taper_fraction <= 0.5:
            raise ValueError("taper_fraction must be in [0, 0.5]")


@dataclass(frozen=True)
class FrequencyResponse:
    frequencies: np.ndarray   # Hz, strictly increasing
    magnitude: np.ndarray     # dB
    phase: np.ndarray         # degrees, unwrapped
    coherence: np.ndarray     # [0, 1]

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write("freq_hz,mag_db,phase_deg,coherence\n")
            for fr, m, p, c in zip(self.frequencies, self.magnitude,
                                   self.phase, self.coherence):
                f.write(f"{fr:.9g},{m:.9g},{p:.9g},{c:.9g}\n")


def generate_sweep(spec: SweepSpec, sample_rate: float) -> np.ndarray:
    """Log-swept sine with cosine tapers at both ends.

    Instantaneous frequency runs f_start -> f_end logarithmically over the
    record; sample count = round(duration * sample_rate).
    """
    if sample_rate <= 2.0 * spec.f_end:
        raise NyquistViolation(
            f"sample_rate {sample_rate} must exceed 2*f_end = {2 * spec.f_end}")
    n = int(round(spec.duration * sample_rate))
    t = np.arange(n) / sample_rate
    k = spec.f_end / spec.f_start
    # phase integral of f(t) = f_start * k**(t/T)
    phase = spec.f_start * spec.duration / math.log(k) * (k ** (t / spec.duration) - 1.0)
    u = np.sin(2.0 * math.pi * phase)

    if spec.taper_fraction > 0.0:
        ramp = spec.taper_fraction * spec.duration
        w = np.ones(n)
        head = t < ramp
        tail = t > spec.duration - ramp
        w[head] = 0.5 * (1.0 - np.cos(math.pi * t[head] / ramp))
        w[tail] = 0.5 * (1.0 - np.cos(math.pi * (spec.duration - t[tail]) / ramp))
        u *= w
    # normalize so the sampled record attains the commanded amplitude exactly
    # (the sample grid rarely lands on a sine peak by itself)
    peak = float(np.max(np.abs(u)))
    if peak > 0.0:
        u *= 1.0 / peak
    return spec.amplitude * u


def estimate_frequency_response(u: np.ndarray, y: np.ndarray,
                                sample_rate: float, window_len: int = 1024,
                                overlap: float = 0.5) -> FrequencyResponse:
    """Welch-averaged H(f) and coherence between input u and output y.

    Hann-windowed segments with the given fractional overlap; one-sided
    spectra excluding the DC bin. Requires at least two windows of data.
    """
    u = np.asarray(u, dtype=float)
    y = np.asarray(y, dtype=float)
    if u.shape != y.shape or u.ndim != 1:
        raise ValueError("u and y must be equal-length 1-D arrays")
    if len(u) < 2 * window_len:
        raise ValueError(f"need at least {2 * window_len} samples, got {len(u)}")

    step = max(1, int(round(window_len * (1.0 - overlap))))
    window = 0.5 - 0.5 * np.cos(2.0 * math.pi * np.arange(window_len) / window_len)
    w_power = float(np.sum(window ** 2))

    suu = syy = None
    suy = None
    count = 0
    for start in range(0, len(u) - window_len + 1, step):
        du = u[start:start + window_len] * window
        dy = y[start:start + window_len] * window
        fu = np.fft.rfft(du)
        fy = np.fft.rfft(dy)
        auu = (fu.conj() * fu).real
        ayy = (fy.conj() * fy).real
        auy = fu.conj() * fy
        if suu is None:
            suu, syy, suy = auu, ayy, auy
        else:
            suu += auu
            syy += ayy
            suy += auy
        count += 1
    assert count >= 2

    # one-sided density scaling; interior bins doubled
    scale = 1.0 / (count * sample_rate * w_power)
    suu *= scale
    syy *= scale
    suy *= scale
    suu[1:-1] *= 2.0
    syy[1:-1] *= 2.0
    suy[1:-1] *= 2.0

    if not np.any(suu > 0.0):
        raise DegenerateInput("input auto-spectrum is zero at every frequency")

    freqs = np.fft.rfftfreq(window_len, d=1.0 / sample_rate)
    keep = slice(1, None)  # drop the DC bin: not identifiable after detrend
    suu_k, syy_k, suy_k = suu[keep], syy[keep], suy[keep]

    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(suu_k > 0.0, suy_k / np.where(suu_k > 0.0, suu_k, 1.0), 0.0)
        denom = suu_k * syy_k
        coherence = np.where(denom > 0.0,
                             np.abs(suy_k) ** 2 / np.where(denom > 0.0, denom, 1.0),
                             0.0)
    coherence = np.clip(coherence, 0.0, 1.0)

    mag = np.abs(h)
    mag_db = 20.0 * np.log10(np.where(mag > 0.0, mag, np.finfo(float).tiny))
    phase_deg = np.degrees(np.unwrap(np.angle(h)))

    return FrequencyResponse(frequencies=freqs[keep], magnitude=mag_db,
                             phase=phase_deg, coherence=coherence)


def identify_axis(records, input_column: str, output_column: str,
                  sample_rate: float | None = None, window_len: int = 1024,
                  overlap: float = 0.5,
                  out_csv: str | None = None) -> FrequencyResponse:
    """Extract two named columns from a telemetry log, detrend, estimate.

    records is anything with column access by name (the LogTable returned
    by load_log, or a plain dict of arrays with a "time_s" key when
    sample_rate is not given).
    """
    def column(name: str) -> np.ndarray:
        try:
            col = records[name]
        except (KeyError, IndexError):
            names = list(getattr(records, "columns", [])) or \
                list(getattr(records, "keys", lambda: [])())
            raise MissingColumn(
                f"column {name!r} not in log; available: {', '.join(names)}")
        return np.asarray(col, dtype=float)

    u = column(input_column)
    y = column(output_column)
    if sample_rate is None:
        t = column("time_s")
        dt = np.median(np.diff(t))
        if dt <= 0:
            raise ValueError("log time column is not increasing")
        sample_rate = 1.0 / float(dt)

    u = u - float(np.mean(u))
    y = y - float(np.mean(y))
    if not np.any(u != 0.0):
        raise DegenerateInput(f"column {input_column!r} is constant")

    window_len = min(window_len, 1 << int(math.floor(math.log2(max(2, len(u) // 2)))))
    response = estimate_frequency_response(u, y, sample_rate,
                                           window_len=window_len,
                                           overlap=overlap)
    if out_csv:
        response.write_csv(out_csv)
    return response
