"""Sensor emulation and the estimators that invert it.

Converts plant truth into what the autopilot is actually allowed to see:
a 4 Hz GPS fix, four thermopile horizon temperatures, and a yaw-rate gyro
sample, plus the roll/pitch inversion and the gyro+GPS heading
complementary filter.

Thermopile model: opposed sky-facing sensors read the sky/ground infrared
contrast. With T_mid = (T_ground + T_sky)/2 and dT = (T_ground - T_sky)/2:

    T_fwd = T_mid - dT*sin(pitch)     T_aft   = T_mid + dT*sin(pitch)
    T_right = T_mid - dT*sin(roll)    T_left  = T_mid + dT*sin(roll)

which is exactly invertible, so noise-free estimates reproduce truth.
All functions take explicit time and rng arguments; nothing here owns a
clock or hidden state beyond the small per-sensor model objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geodesy import GeoOrigin, ned_to_geodetic, wrap_pi
from .flight_dynamics import RigidBodyState

GPS_COURSE_SPEED_FLOOR = 3.0   # m/s; course is meaningless when near-stationary
DEFAULT_HEADING_BLEND = 0.1
DEFAULT_CALIBRATION_FLOOR = 1.0  # K


class DegenerateCalibration(ValueError):
    """Sky/ground contrast too small for the horizon principle to work."""


@dataclass(frozen=True)
class SensorEnvironment:
    """Noise/rate configuration for the whole sensor suite."""
    sky_temperature: float = 260.0       # K
    ground_temperature: float = 290.0    # K
    thermopile_noise_sd: float = 0.0     # K
    gps_noise: tuple[float, float, float] = (0.0, 0.0, 0.0)  # horiz m, vert m, speed m/s
    gps_rate: float = 4.0                # Hz
    gyro_noise_sd: float = 0.0           # rad/s
    gyro_bias_walk_sd: float = 0.0       # rad/s/sqrt(s)
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.ground_temperature <= self.sky_temperature:
            raise ValueError("ground_temperature must exceed sky_temperature")
        if self.gps_rate <= 0:
            raise ValueError("gps_rate must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "SensorEnvironment":
        kwargs = dict(d)
        if "gps_noise" in kwargs:
            kwargs["gps_noise"] = tuple(float(x) for x in kwargs["gps_noise"])
        return cls(**kwargs)


@dataclass(frozen=True)
class ThermopileQuad:
    t_forward: float
    t_aft: float
    t_left: float
    t_right: float


@dataclass(frozen=True)
class GyroSample:
    yaw_rate: float      # rad/s, as measured
    bias: float          # rad/s, hidden truth (never crosses the wire)
    sample_time: float


@dataclass(frozen=True)
class GpsFix:
    latitude: float          # deg
    longitude: float         # deg
    altitude: float          # m
    ground_speed: float      # m/s
    course_over_ground: float  # deg [0, 360)
    fix_time: float
    valid: bool = True


@dataclass(frozen=True)
class AttitudeEstimate:
    roll: float
    pitch: float
    heading: float           # rad [-pi, pi)
    estimate_time: float


def thermopile_measure(attitude: tuple[float, float], env: SensorEnvironment,
                       rng) -> ThermopileQuad:
    """Four-sensor horizon temperatures for (roll, pitch), noise included.

    Readings are clamped to the physical sky..ground band after noise.
    """
    roll, pitch = attitude
    assert abs(roll) < math.pi / 2 and abs(pitch) < math.pi / 2, \
        "thermopile model is only valid short of +-90 deg"
    t_mid = 0.5 * (env.ground_temperature + env.sky_temperature)
    dt = 0.5 * (env.ground_temperature - env.sky_temperature)
    raw = (
        t_mid - dt * math.sin(pitch),   # forward: nose up sees more sky
        t_mid + dt * math.sin(pitch),
        t_mid + dt * math.sin(roll),
        t_mid - dt * math.sin(roll),
    )
    if env.thermopile_noise_sd > 0.0:
        raw = tuple(t + env.thermopile_noise_sd * rng.standard_normal() for t in raw)
    clamp = lambda t: min(max(t, env.sky_temperature), env.ground_temperature)
    return ThermopileQuad(*(clamp(t) for t in raw))


def estimate_roll_pitch(quad: ThermopileQuad,
                        calibration: tuple[float, float],
                        floor: float = DEFAULT_CALIBRATION_FLOOR
                        ) -> tuple[float, float]:
    """Invert the thermopile quad into (roll, pitch).

    calibration is (T_sky, T_ground). Differences beyond the calibrated
    span clamp to +-pi/2 rather than going non-finite. Raises
    DegenerateCalibration when the contrast is below the floor (fog /
    uniform-temperature conditions).
    """
    t_sky, t_ground = calibration
    span = t_ground - t_sky
    if span < floor:
        raise DegenerateCalibration(f"sky/ground contrast {span:.2f} K below {floor} K")
    clamp = lambda x: max(-1.0, min(1.0, x))
    pitch = math.asin(clamp((quad.t_aft - quad.t_forward) / span))
    roll = math.asin(clamp((quad.t_left - quad.t_right) / span))
    return roll, pitch


@dataclass
class GyroModel:
    """Yaw-rate gyro with bias random walk and full-scale clipping."""
    full_scale: float = 1.31   # rad/s (~75 deg/s class)
    bias: float = 0.0

    def sample(self, true_yaw_rate: float, env: SensorEnvironment, now: float,
               dt: float, rng) -> GyroSample:
        if env.gyro_bias_walk_sd > 0.0:
            self.bias += env.gyro_bias_walk_sd * math.sqrt(dt) * rng.standard_normal()
        measured = true_yaw_rate + self.bias
        if env.gyro_noise_sd > 0.0:
            measured += env.gyro_noise_sd * rng.standard_normal()
        measured = max(-self.full_scale, min(self.full_scale, measured))
        return GyroSample(yaw_rate=measured, bias=self.bias, sample_time=now)


@dataclass
class GpsModel:
    """Epoch-gated GPS receiver: one fix per 1/gps_rate boundary.

    First fix is due at t = 1/rate. Dropout windows suppress fixes without
    shifting the epoch grid, so the first fix after a dropout lands on the
    next boundary. Fixes are timestamped at their measurement epoch; a
    nonzero latency holds delivery back by that much wall-of-sim time.
    """
    env: SensorEnvironment
    latency: float = 0.0
    _epoch: int = 0
    _delayed: list = field(default_factory=list)
    dropout_until: float = -math.inf
    dropout_from: float = math.inf

    def set_dropout(self, start: float, end: float) -> None:
        self.dropout_from = start
        self.dropout_until = end

    def sample(self, truth: RigidBodyState, origin: GeoOrigin, now: float,
               rng) -> GpsFix | None:
        if self.latency > 0.0:
            fix = self._measure(truth, origin, now, rng)
            if fix is not None:
                self._delayed.append(fix)
            if self._delayed and \
                    now + 1e-12 >= self._delayed[0].fix_time + self.latency:
                return self._delayed.pop(0)
            return None
        return self._measure(truth, origin, now, rng)

    def _measure(self, truth: RigidBodyState, origin: GeoOrigin, now: float,
                 rng) -> GpsFix | None:
        latest = int((now + 1e-12) * self.env.gps_rate)
        if latest <= self._epoch:
            return None
        self._epoch = latest  # skip straight to the newest boundary
        due = latest / self.env.gps_rate
        if self.dropout_from <= due <= self.dropout_until:
            return None
        lat, lon, alt = ned_to_geodetic(truth.position, origin)
        u, v, w = truth.velocity_body
        roll, pitch, yaw = truth.attitude
        # horizontal NED velocity from body velocity
        sphi, cphi = math.sin(roll), math.cos(roll)
        sth, cth = math.sin(pitch), math.cos(pitch)
        spsi, cpsi = math.sin(yaw), math.cos(yaw)
        vn = cth * cpsi * u + (sphi * sth * cpsi - cphi * spsi) * v \
            + (cphi * sth * cpsi + sphi * spsi) * w
        ve = cth * spsi * u + (sphi * sth * spsi + cphi * cpsi) * v \
            + (cphi * sth * spsi - sphi * cpsi) * w
        h_sd, v_sd, s_sd = self.env.gps_noise
        if h_sd > 0.0:
            deg = 180.0 / math.pi
            lat += h_sd * rng.standard_normal() / 6_371_000.0 * deg
            lon += h_sd * rng.standard_normal() / (6_371_000.0 * math.cos(math.radians(lat))) * deg
        if v_sd > 0.0:
            alt += v_sd * rng.standard_normal()
        speed = math.hypot(vn, ve)
        if s_sd > 0.0:
            speed = max(0.0, speed + s_sd * rng.standard_normal())
        course = math.degrees(math.atan2(ve, vn)) % 360.0
        return GpsFix(latitude=lat, longitude=lon, altitude=alt,
                      ground_speed=speed, course_over_ground=course,
                      fix_time=due, valid=True)


def fuse_heading(previous: AttitudeEstimate, gyro: GyroSample,
                 gps: GpsFix | None, dt: float,
                 blend: float = DEFAULT_HEADING_BLEND) -> float:
    """Complementary heading filter: integrate the gyro, pull toward GPS
    course when a fix with usable ground speed is present.

    The GPS correction always takes the short way around the circle; the
    result is wrapped to [-pi, pi).
    """
    assert dt > 0 and 0.0 <= blend <= 1.0
    heading = wrap_pi(previous.heading + gyro.yaw_rate * dt)
    if gps is not None and gps.valid and gps.ground_speed > GPS_COURSE_SPEED_FLOOR:
        course = wrap_pi(math.radians(gps.course_over_ground))
        heading = wrap_pi(heading + blend * wrap_pi(course - heading))
    return heading
