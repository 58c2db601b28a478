"""Sensor emulation and estimator inversion."""

import math

import numpy as np
import pytest

from hilsim.flight_dynamics import RigidBodyState
from hilsim.sensors import (
    AttitudeEstimate, DegenerateCalibration, GpsModel, GyroModel, GyroSample,
    SensorEnvironment, ThermopileQuad, estimate_roll_pitch, fuse_heading,
    thermopile_measure,
)
from conftest import ORIGIN, quiet_environment

CAL = (260.0, 290.0)
T_MID = 275.0
DT_SPAN = 15.0


def state_at(ned=(0.0, 0.0, -100.0), vel=(0.0, 0.0, 0.0),
             att=(0.0, 0.0, 0.0), rates=(0.0, 0.0, 0.0), t=0.0):
    return RigidBodyState(position=ned, velocity_body=vel, attitude=att,
                          angular_rate_body=rates, time=t)


# --- thermopiles -------------------------------------------------------------

def test_level_flight_all_sensors_equal(rng):
    quad = thermopile_measure((0.0, 0.0), quiet_environment(), rng)
    assert quad.t_forward == quad.t_aft == quad.t_left == quad.t_right == T_MID


def test_nose_up_forward_sensor_cooler(rng):
    quad = thermopile_measure((0.0, math.radians(10.0)), quiet_environment(), rng)
    assert quad.t_forward < quad.t_aft


def test_roll_eighty_degrees_span(rng):
    quad = thermopile_measure((math.radians(80.0), 0.0), quiet_environment(), rng)
    expect = 2.0 * DT_SPAN * math.sin(math.radians(80.0))
    assert abs(quad.t_left - quad.t_right) == pytest.approx(expect, abs=1e-9)


def test_estimate_zero_difference_is_level():
    quad = ThermopileQuad(275.0, 275.0, 275.0, 275.0)
    roll, pitch = estimate_roll_pitch(quad, CAL)
    assert roll == 0.0 and pitch == 0.0


def test_noise_free_round_trip_1000_attitudes(rng):
    env = quiet_environment()
    for _ in range(1000):
        roll = float(rng.uniform(-math.radians(60), math.radians(60)))
        pitch = float(rng.uniform(-math.radians(60), math.radians(60)))
        quad = thermopile_measure((roll, pitch), env, rng)
        r_est, p_est = estimate_roll_pitch(quad, CAL)
        assert abs(r_est - roll) <= 1e-9
        assert abs(p_est - pitch) <= 1e-9


def test_outlier_clamps_to_quarter_turn():
    quad = ThermopileQuad(t_forward=200.0, t_aft=400.0, t_left=500.0, t_right=100.0)
    roll, pitch = estimate_roll_pitch(quad, CAL)
    assert pitch == math.pi / 2
    assert roll == math.pi / 2
    quad = ThermopileQuad(t_forward=400.0, t_aft=200.0, t_left=100.0, t_right=500.0)
    roll, pitch = estimate_roll_pitch(quad, CAL)
    assert pitch == -math.pi / 2 and roll == -math.pi / 2


def test_degenerate_calibration():
    quad = ThermopileQuad(275.0, 275.0, 275.0, 275.0)
    with pytest.raises(DegenerateCalibration):
        estimate_roll_pitch(quad, (275.0, 275.5))


def test_noisy_readings_clamped_to_physical_band(rng):
    env = quiet_environment(thermopile_noise_sd=50.0)
    for _ in range(200):
        quad = thermopile_measure((0.3, -0.2), env, rng)
        for t in (quad.t_forward, quad.t_aft, quad.t_left, quad.t_right):
            assert env.sky_temperature <= t <= env.ground_temperature


def test_environment_validation():
    with pytest.raises(ValueError):
        SensorEnvironment(sky_temperature=290.0, ground_temperature=260.0)
    with pytest.raises(ValueError):
        SensorEnvironment(gps_rate=0.0)


# --- GPS ----------------------------------------------------------------------

def test_gps_exactly_four_fixes_per_second(rng):
    gps = GpsModel(env=quiet_environment())
    truth = state_at(vel=(18.0, 0.0, 0.0))
    fixes = []
    steps = int(round(1.0 / 0.005))
    for k in range(1, steps + 1):
        fix = gps.sample(truth, ORIGIN, now=k * 0.005, rng=rng)
        if fix is not None:
            fixes.append(fix)
    assert len(fixes) == 4
    assert [f.fix_time for f in fixes] == [0.25, 0.5, 0.75, 1.0]


def test_gps_noiseless_identity_at_origin(rng):
    gps = GpsModel(env=quiet_environment())
    fix = gps.sample(state_at(ned=(0.0, 0.0, 0.0)), ORIGIN, now=0.25, rng=rng)
    assert fix is not None
    assert fix.latitude == ORIGIN.latitude
    assert fix.longitude == ORIGIN.longitude
    assert fix.altitude == ORIGIN.altitude_msl
    assert fix.ground_speed == 0.0


def test_gps_dropout_window(rng):
    gps = GpsModel(env=quiet_environment())
    gps.set_dropout(2.0, 5.0)
    truth = state_at(vel=(18.0, 0.0, 0.0))
    fixes = []
    for k in range(1, int(8.0 / 0.005) + 1):
        fix = gps.sample(truth, ORIGIN, now=k * 0.005, rng=rng)
        if fix is not None:
            fixes.append(fix.fix_time)
    assert not any(2.0 <= t <= 5.0 for t in fixes)
    first_after = min(t for t in fixes if t > 5.0)
    assert first_after <= 5.0 + 0.25 + 1e-9


def test_gps_cadence_other_rates(rng):
    for rate, horizon in ((5.0, 7.0), (1.0, 9.0), (10.0, 3.0)):
        gps = GpsModel(env=quiet_environment(gps_rate=rate))
        truth = state_at(vel=(10.0, 0.0, 0.0))
        count = 0
        steps = int(round(horizon / 0.005))
        for k in range(1, steps + 1):
            if gps.sample(truth, ORIGIN, now=k * 0.005, rng=rng) is not None:
                count += 1
        assert abs(count - math.floor(horizon * rate)) <= 1


def test_gps_course_and_speed_from_velocity(rng):
    gps = GpsModel(env=quiet_environment())
    # heading 90 deg: body x points east
    truth = state_at(vel=(12.0, 0.0, 0.0), att=(0.0, 0.0, math.pi / 2))
    fix = gps.sample(truth, ORIGIN, now=0.25, rng=rng)
    assert fix.ground_speed == pytest.approx(12.0, abs=1e-9)
    assert fix.course_over_ground == pytest.approx(90.0, abs=1e-6)


def test_gps_delivery_latency(rng):
    gps = GpsModel(env=quiet_environment(), latency=0.1)
    truth = state_at(vel=(18.0, 0.0, 0.0))
    deliveries = []
    for k in range(1, 201):
        now = k * 0.005
        fix = gps.sample(truth, ORIGIN, now=now, rng=rng)
        if fix is not None:
            deliveries.append((now, fix.fix_time))
    assert deliveries, "latency swallowed every fix"
    for delivered_at, measured_at in deliveries:
        assert delivered_at >= measured_at + 0.1 - 1e-9  # held back
        assert delivered_at <= measured_at + 0.1 + 0.01  # but not for long


def test_gps_fix_times_strictly_increase(rng):
    gps = GpsModel(env=quiet_environment(gps_noise=(2.0, 3.0, 0.5)))
    truth = state_at(vel=(18.0, 0.0, 0.0))
    times = []
    for k in range(1, 2001):
        fix = gps.sample(truth, ORIGIN, now=k * 0.005, rng=rng)
        if fix:
            times.append(fix.fix_time)
    assert times == sorted(times)
    assert len(set(times)) == len(times)


# --- gyro ---------------------------------------------------------------------

def test_gyro_full_scale_clamp(rng):
    gyro = GyroModel()
    sample = gyro.sample(5.0, quiet_environment(), now=0.0, dt=0.02, rng=rng)
    assert sample.yaw_rate == pytest.approx(1.31)
    sample = gyro.sample(-5.0, quiet_environment(), now=0.02, dt=0.02, rng=rng)
    assert sample.yaw_rate == pytest.approx(-1.31)


def test_gyro_bias_constant_without_walk(rng):
    gyro = GyroModel(bias=0.02)
    env = quiet_environment()
    for k in range(100):
        sample = gyro.sample(0.1, env, now=k * 0.02, dt=0.02, rng=rng)
        assert sample.bias == 0.02
        assert sample.yaw_rate == pytest.approx(0.12)


def test_gyro_bias_walks_when_enabled(rng):
    gyro = GyroModel()
    env = quiet_environment(gyro_bias_walk_sd=0.01)
    for k in range(500):
        gyro.sample(0.0, env, now=k * 0.02, dt=0.02, rng=rng)
    assert gyro.bias != 0.0


# --- heading fusion -----------------------------------------------------------

def test_pure_integration_without_gps():
    est = AttitudeEstimate(0.0, 0.0, 0.0, 0.0)
    heading = est.heading
    for k in range(1000):
        gyro = GyroSample(yaw_rate=0.1, bias=0.0, sample_time=k * 0.01)
        heading = fuse_heading(
            AttitudeEstimate(0.0, 0.0, heading, k * 0.01), gyro, None, 0.01)
    assert heading == pytest.approx(1.0, abs=1e-9)


def test_bias_rejection_steady_state_matches_closed_form():
    """Scalar simulation oracle: gyro bias 0.01 rad/s, GPS course 0 at 4 Hz,
    blend 0.05 -> steady-state error = bias * dt_gps / blend = 0.05 rad."""
    from hilsim.sensors import GpsFix
    bias, blend, dt = 0.01, 0.05, 0.02
    heading = 0.0
    t = 0.0
    next_gps = 0.25
    for _ in range(int(120.0 / dt)):
        t += dt
        fix = None
        if t >= next_gps - 1e-12:
            fix = GpsFix(latitude=0.0, longitude=0.0, altitude=0.0,
                         ground_speed=18.0, course_over_ground=0.0,
                         fix_time=t, valid=True)
            next_gps += 0.25
        gyro = GyroSample(yaw_rate=bias, bias=bias, sample_time=t)
        heading = fuse_heading(AttitudeEstimate(0.0, 0.0, heading, t), gyro,
                               fix, dt, blend=blend)
    expect = bias * 0.25 / blend
    assert heading == pytest.approx(expect, rel=0.20)


def test_gps_correction_takes_short_way_around():
    # estimate just left of the +-pi seam, course just right of it: the
    # short way is +0.3 rad across the seam, not -(2*pi - 0.3)
    est = AttitudeEstimate(0.0, 0.0, math.pi - 0.1, 0.0)
    from hilsim.sensors import GpsFix
    fix = GpsFix(latitude=0.0, longitude=0.0, altitude=0.0, ground_speed=10.0,
                 course_over_ground=math.degrees((math.pi + 0.2) % (2 * math.pi)),
                 fix_time=0.02, valid=True)
    gyro = GyroSample(yaw_rate=0.0, bias=0.0, sample_time=0.02)
    heading = fuse_heading(est, gyro, fix, 0.02, blend=0.5)
    applied = (heading - est.heading + math.pi) % (2 * math.pi) - math.pi
    assert abs(applied) <= math.pi
    assert applied == pytest.approx(0.15, abs=1e-9)
    assert heading == pytest.approx(-math.pi + 0.05, abs=1e-9)


def test_slow_gps_course_ignored():
    est = AttitudeEstimate(0.0, 0.0, 0.5, 0.0)
    from hilsim.sensors import GpsFix
    fix = GpsFix(latitude=0.0, longitude=0.0, altitude=0.0, ground_speed=1.0,
                 course_over_ground=180.0, fix_time=0.02, valid=True)
    gyro = GyroSample(yaw_rate=0.0, bias=0.0, sample_time=0.02)
    assert fuse_heading(est, gyro, fix, 0.02, blend=0.5) == pytest.approx(0.5)


def test_heading_never_nan_without_gps():
    heading = 0.0
    for k in range(100000):
        gyro = GyroSample(yaw_rate=1.31, bias=0.0, sample_time=k * 0.02)
        heading = fuse_heading(AttitudeEstimate(0.0, 0.0, heading, 0.0),
                               gyro, None, 0.02)
        assert math.isfinite(heading)
        assert -math.pi <= heading < math.pi


def test_seeded_determinism_full_sensor_stream():
    env = quiet_environment(thermopile_noise_sd=0.4, gps_noise=(1.5, 3.0, 0.2),
                            gyro_noise_sd=0.01, gyro_bias_walk_sd=0.001)

    def stream(seed):
        rng = np.random.Generator(np.random.PCG64(seed))
        gps = GpsModel(env=env)
        gyro = GyroModel()
        out = []
        truth = state_at(vel=(18.0, 0.0, 0.0), att=(0.1, 0.05, 0.3))
        for k in range(500):
            t = k * 0.02
            quad = thermopile_measure((0.1, 0.05), env, rng)
            sample = gyro.sample(0.02, env, t, 0.02, rng)
            fix = gps.sample(truth, ORIGIN, t, rng)
            out.append((quad, sample.yaw_rate,
                        None if fix is None else (fix.latitude, fix.longitude)))
        return out

    assert stream(99) == stream(99)
    assert stream(99) != stream(100)
