"""Scenario definition and JSON loading (schema in docs/scenario.md)."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from ..autopilot import Mission, Waypoint, WaypointKind
from ..flight_dynamics import AirframeConfig, default_airframe
from ..geodesy import GeoOrigin
from ..sensors import SensorEnvironment

FAULT_KINDS = ("POWER_BROWNOUT", "GPS_DROPOUT", "SERVO_STUCK",
               "GYRO_BIAS_JUMP", "LINK_NOISE")


@dataclass(frozen=True)
class FaultEvent:
    at_time: float
    kind: str
    reset_delay: float = 0.0       # POWER_BROWNOUT
    duration: float = 0.0          # GPS_DROPOUT, SERVO_STUCK, LINK_NOISE
    channel: str = "elevator"      # SERVO_STUCK
    value_us: int = 1500           # SERVO_STUCK
    bias_jump: float = 0.0         # GYRO_BIAS_JUMP, rad/s
    byte_error_rate: float = 0.0   # LINK_NOISE

    def __post_init__(self) -> None:
        if self.at_time < 0 or self.duration < 0 or self.reset_delay < 0:
            raise ValueError("fault times and durations must be non-negative")
        if self.kind not in FAULT_KINDS:
            raise ValueError(f"unknown fault kind {self.kind!r}")


@dataclass(frozen=True)
class Scenario:
    airframe: AirframeConfig
    environment: SensorEnvironment
    mission: Mission
    origin: GeoOrigin
    initial_airspeed: float        # m/s, trimmed at start
    initial_altitude: float        # m above the origin plane
    time_scale: float = 0.0        # 1.0 real time, 0 = as fast as possible
    duration_limit: float = 600.0  # s
    faults: tuple[FaultEvent, ...] = ()
    seed: int = 0
    wind_mean_ned: tuple[float, float, float] = (0.0, 0.0, 0.0)
    wind_gust_sd: float = 0.0

    def __post_init__(self) -> None:
        if self.duration_limit <= 0:
            raise ValueError("duration_limit must be positive")
        if self.time_scale < 0:
            raise ValueError("time_scale must be non-negative")


def _parse_waypoint(d: dict) -> Waypoint:
    kind = WaypointKind(d.get("kind", "FLYOVER"))
    return Waypoint(
        latitude=float(d["lat_deg"]),
        longitude=float(d["lon_deg"]),
        altitude=float(d["alt_m"]),
        capture_radius=float(d.get("capture_radius_m", 75.0)),
        kind=kind,
        loiter_radius=float(d.get("loiter_radius_m", 100.0)),
        loiter_duration=float(d.get("loiter_duration_s", 0.0)),
    )


def _parse_fault(d: dict) -> FaultEvent:
    return FaultEvent(
        at_time=float(d["at_time_s"]),
        kind=str(d["kind"]),
        reset_delay=float(d.get("reset_delay_s", 0.0)),
        duration=float(d.get("duration_s", 0.0)),
        channel=str(d.get("channel", "elevator")),
        value_us=int(d.get("value_us", 1500)),
        bias_jump=float(d.get("bias_jump_rps", 0.0)),
        byte_error_rate=float(d.get("byte_error_rate", 0.0)),
    )


def scenario_from_dict(d: dict, base_dir: str = ".") -> Scenario:
    airframe_ref = d.get("airframe")
    if airframe_ref is None:
        airframe = default_airframe()
    elif isinstance(airframe_ref, str):
        airframe = AirframeConfig.from_json(os.path.join(base_dir, airframe_ref))
    else:
        airframe = AirframeConfig.from_dict(airframe_ref)

    env_dict = dict(d.get("environment", {}))
    # one seed rules the whole run
    env_dict["rng_seed"] = int(d.get("seed", env_dict.get("rng_seed", 0)))
    environment = SensorEnvironment.from_dict(env_dict)

    m = d["mission"]
    mission = Mission(
        waypoints=tuple(_parse_waypoint(w) for w in m["waypoints"]),
        cruise_speed=float(m.get("cruise_speed_mps", 18.0)),
        crosstrack_enabled=bool(m.get("crosstrack_enabled", True)),
    )

    o = d["origin"]
    origin = GeoOrigin(latitude=float(o["latitude_deg"]),
                       longitude=float(o["longitude_deg"]),
                       altitude_msl=float(o["altitude_msl_m"]))

    init = d.get("initial", {})
    wind = d.get("wind", {})
    return Scenario(
        airframe=airframe,
        environment=environment,
        mission=mission,
        origin=origin,
        initial_airspeed=float(init.get("airspeed_mps", 18.0)),
        initial_altitude=float(init.get("altitude_agl_m", 120.0)),
        time_scale=float(d.get("time_scale", 0.0)),
        duration_limit=float(d.get("duration_limit_s", 600.0)),
        faults=tuple(_parse_fault(f) for f in d.get("faults", [])),
        seed=int(d.get("seed", 0)),
        wind_mean_ned=tuple(float(x) for x in wind.get("mean_ned_mps", (0, 0, 0))),
        wind_gust_sd=float(wind.get("gust_sd_mps", 0.0)),
    )


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as f:
        return scenario_from_dict(json.load(f), base_dir=os.path.dirname(path) or ".")
