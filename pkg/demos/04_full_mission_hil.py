"""The whole loop: plant + sensors + wire protocol + autopilot process.

Runs the shipped six-waypoint mission (one timed loiter, crosstracking on)
as fast as the host allows, then prints the mission report and an ASCII
ground track. The autopilot runs as a separate OS process reachable only
through the framed byte link.
"""

import json
import os
import time

import numpy as np

from hilsim.harness import load_scenario, run_scenario
from hilsim.harness.telemetry_log import load_log
from hilsim.geodesy import geodetic_to_ned

HERE = os.path.dirname(os.path.abspath(__file__))
SCENARIO = os.path.join(HERE, "..", "missions", "six_wp.json")
LOG = os.path.join(HERE, "six_wp_demo.csv")

scenario = load_scenario(SCENARIO)
print(f"mission: {len(scenario.mission.waypoints)} waypoints, "
      f"cruise {scenario.mission.cruise_speed} m/s, "
      f"crosstrack {'on' if scenario.mission.crosstrack_enabled else 'off'}")
print("running at time_scale 0 (flat out), autopilot in a subprocess...\n")

t0 = time.perf_counter()
report = run_scenario(scenario, log_path=LOG)
wall = time.perf_counter() - t0

print(json.dumps(report.to_dict(), indent=2))
print(f"\n{report.sim_time:.0f} s of flight in {wall:.1f} s of wall time "
      f"({report.sim_time / wall:.0f}x real time)")

table = load_log(LOG)
north, east = table["north_m"], table["east_m"]
wp_ned = [geodetic_to_ned(w.latitude, w.longitude, w.altitude, scenario.origin)
          for w in scenario.mission.waypoints]

rows, cols = 24, 64
n_lo, n_hi = float(np.min(north)) - 200, float(np.max(north)) + 200
e_lo, e_hi = float(np.min(east)) - 200, float(np.max(east)) + 200
grid = [[" "] * cols for _ in range(rows)]
for n, e in zip(north[::10], east[::10]):
    r = int((n_hi - n) / (n_hi - n_lo) * (rows - 1))
    c = int((e - e_lo) / (e_hi - e_lo) * (cols - 1))
    grid[r][c] = "."
for i, (wn, we, _) in enumerate(wp_ned):
    r = int((n_hi - wn) / (n_hi - n_lo) * (rows - 1))
    c = int((we - e_lo) / (e_hi - e_lo) * (cols - 1))
    grid[r][c] = str(i + 1)

print("\nground track (north up, waypoints 1-6):")
print("+" + "-" * cols + "+")
for row in grid:
    print("|" + "".join(row) + "|")
print("+" + "-" * cols + "+")
print(f"\ntelemetry log with {len(table)} rows written to {LOG}")
