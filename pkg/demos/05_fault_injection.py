"""Break things mid-flight and read the report.

Injects a GPS dropout, a burst of link noise, a stuck elevator, and a full
autopilot power brownout into one mission, the way the HIL bench is meant
to be used before any real airframe flies.
"""

import json
import os
from dataclasses import replace

from hilsim.harness import FaultEvent, load_scenario, run_scenario

HERE = os.path.dirname(os.path.abspath(__file__))
scenario = load_scenario(os.path.join(HERE, "..", "missions", "six_wp.json"))
scenario = replace(scenario, duration_limit=1200.0, faults=(
    FaultEvent(at_time=40.0, kind="GPS_DROPOUT", duration=5.0),
    FaultEvent(at_time=90.0, kind="LINK_NOISE", duration=10.0,
               byte_error_rate=2e-3),
    FaultEvent(at_time=150.0, kind="SERVO_STUCK", duration=2.0,
               channel="elevator", value_us=1540),
    FaultEvent(at_time=220.0, kind="POWER_BROWNOUT", reset_delay=2.0),
))

print("fault schedule:")
for f in scenario.faults:
    print(f"  t={f.at_time:5.1f}s  {f.kind}")

print("\nflying...")
report = run_scenario(scenario)

print("\nwhat the bench observed:")
for entry in report.fault_log:
    print(f"  t={entry['time']:6.1f}s  {entry['kind']:15s} {entry['effect']}")

stats = report.link_stats
print(f"\nlink: {stats['to_autopilot']['frames_sent']} frames out, "
      f"{stats['from_autopilot']['frames_received']} in, "
      f"{stats['from_autopilot']['frames_corrupted']} corrupted")
print(f"mission completed: {report.completed}, crashed: {report.crashed}, "
      f"waypoints: {report.waypoints_captured}/6")
print("\nfull report:")
print(json.dumps(report.to_dict(), indent=2))
