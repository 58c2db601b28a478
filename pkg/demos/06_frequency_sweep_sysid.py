"""Identify the airplane you just built, from its own telemetry.

Flies a straight-and-level scenario while the harness injects a log chirp
on the elevator (the other loops stay closed), then estimates the
elevator-to-pitch frequency response with Welch cross-spectra and prints
an ASCII Bode magnitude plot with its coherence gauge.
"""

import math
import os
from dataclasses import replace

import numpy as np

from hilsim.harness import load_scenario, run_scenario
from hilsim.harness.runner import SweepInjection
from hilsim.harness.telemetry_log import load_log
from hilsim.sysid import SweepSpec, generate_sweep, identify_axis

HERE = os.path.dirname(os.path.abspath(__file__))
LOG = os.path.join(HERE, "sweep_demo.csv")

scenario = load_scenario(os.path.join(HERE, "..", "missions",
                                      "sweep_level.json"))
spec = SweepSpec(f_start=0.3, f_end=5.0, duration=60.0, amplitude=40.0,
                 taper_fraction=0.05)
chirp = generate_sweep(spec, 50.0)
print(f"chirp: {spec.f_start}-{spec.f_end} Hz log sweep, "
      f"{spec.duration:.0f} s, +-{spec.amplitude:.0f} us on the elevator")

scenario = replace(scenario, duration_limit=70.0)
report = run_scenario(scenario, log_path=LOG,
                      sweep=SweepInjection(axis="elevator", samples=chirp,
                                           start_time=5.0))
print(f"swept {report.sim_time:.0f} s of flight, crashed: {report.crashed}")

table = load_log(LOG)
t = table["time_s"]
window = (t >= 5.0) & (t < 65.0)
sweep_slice = {k: table[k][window]
               for k in ("time_s", "elevator_us", "pitch_deg")}
response = identify_axis(sweep_slice, "elevator_us", "pitch_deg",
                         out_csv=os.path.join(HERE, "bode_demo.csv"))

band = (response.frequencies >= 0.3) & (response.frequencies <= 5.0)
freqs = response.frequencies[band]
mags = response.magnitude[band]
cohs = response.coherence[band]

print("\nelevator -> pitch attitude, Bode magnitude:")
lo, hi = float(np.min(mags)), float(np.max(mags))
for i in range(0, len(freqs), max(1, len(freqs) // 24)):
    bar = "#" * int((mags[i] - lo) / (hi - lo + 1e-9) * 44)
    gauge = "high" if cohs[i] > 0.9 else ("ok" if cohs[i] > 0.6 else "LOW ")
    print(f"  {freqs[i]:5.2f} Hz {mags[i]:+7.1f} dB "
          f"coh={cohs[i]:4.2f} {gauge} |{bar}")

peak = int(np.argmax(mags))
print(f"\nshort-period resonance near {freqs[peak]:.2f} Hz "
      f"({mags[peak]:+.1f} dB), coherence {cohs[peak]:.3f}")
print(f"bode table written next to this script as bode_demo.csv")
