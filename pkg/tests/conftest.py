import numpy as np
import pytest

from hilsim.autopilot import Mission, Waypoint
from hilsim.flight_dynamics import default_airframe
from hilsim.geodesy import GeoOrigin, ned_to_geodetic
from hilsim.harness.scenario import Scenario
from hilsim.sensors import SensorEnvironment

ORIGIN = GeoOrigin(latitude=-6.891, longitude=107.610, altitude_msl=700.0)


def waypoint_at_ned(north, east, alt_agl, origin=ORIGIN, **kwargs):
    """Place a waypoint by NED offset from the scenario origin."""
    lat, lon, _ = ned_to_geodetic((north, east, 0.0), origin)
    return Waypoint(latitude=lat, longitude=lon,
                    altitude=origin.altitude_msl + alt_agl, **kwargs)


def quiet_environment(**overrides):
    """Noise-free sensor environment (estimates reproduce truth)."""
    defaults = dict(sky_temperature=260.0, ground_temperature=290.0,
                    thermopile_noise_sd=0.0, gps_noise=(0.0, 0.0, 0.0),
                    gps_rate=4.0, gyro_noise_sd=0.0, gyro_bias_walk_sd=0.0)
    defaults.update(overrides)
    return SensorEnvironment(**defaults)


def short_scenario(waypoints=None, duration=120.0, seed=5, env=None,
                   faults=(), time_scale=0.0):
    """Small two-leg mission for integration tests (completes in ~1 min sim)."""
    if waypoints is None:
        waypoints = (waypoint_at_ned(900, 0, 120),
                     waypoint_at_ned(1700, 500, 130))
    return Scenario(
        airframe=default_airframe(),
        environment=env or quiet_environment(),
        mission=Mission(waypoints=tuple(waypoints), cruise_speed=18.0,
                        crosstrack_enabled=True),
        origin=ORIGIN,
        initial_airspeed=18.0,
        initial_altitude=120.0,
        time_scale=time_scale,
        duration_limit=duration,
        faults=tuple(faults),
        seed=seed,
    )


@pytest.fixture
def trainer():
    return default_airframe()


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(1234))
