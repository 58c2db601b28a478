"""hilsim: a UAV development bench rendered entirely in software.

Fixed-wing 6-DOF plant, physically motivated sensor emulation, a
waypoint/PID autopilot isolated behind a framed byte protocol, a fault
injection harness, and frequency-domain system identification.
"""

__version__ = "0.1.0"

from . import autopilot, flight_dynamics, geodesy, protocol, sensors, sysid
