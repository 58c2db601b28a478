"""Flat-earth geodesy round trips and range guards."""

import math

import numpy as np
import pytest

from hilsim.geodesy import (
    GeoOrigin, OutOfFlatEarthRange, geodetic_to_ned, ned_to_geodetic, wrap_pi,
)

BANDUNG = GeoOrigin(latitude=-6.891, longitude=107.610, altitude_msl=700.0)


def test_origin_identity():
    lat, lon, alt = ned_to_geodetic((0.0, 0.0, 0.0), BANDUNG)
    assert (lat, lon, alt) == (-6.891, 107.610, 700.0)


def test_nautical_mile_north_at_equator():
    # 1852 m / 6371000 m * (180/pi) deg, hand-evaluated
    origin = GeoOrigin(0.0, 0.0, 0.0)
    lat, lon, _ = ned_to_geodetic((1852.0, 0.0, 0.0), origin)
    assert lat == pytest.approx(0.016657, abs=1e-5)
    assert lon == 0.0


def test_down_maps_to_altitude():
    _, _, alt = ned_to_geodetic((0.0, 0.0, -120.0), BANDUNG)
    assert alt == pytest.approx(820.0, abs=1e-12)


def test_round_trip_1000_random_points(rng):
    for _ in range(1000):
        ned = (float(rng.uniform(-10000, 10000)),
               float(rng.uniform(-10000, 10000)),
               float(rng.uniform(-2000, 500)))
        lat, lon, alt = ned_to_geodetic(ned, BANDUNG)
        back = geodetic_to_ned(lat, lon, alt, BANDUNG)
        err = math.dist(ned, back)
        assert err < 1e-6


def test_out_of_range_both_directions():
    with pytest.raises(OutOfFlatEarthRange):
        ned_to_geodetic((51000.0, 0.0, 0.0), BANDUNG)
    far_lat = BANDUNG.latitude + 1.0  # ~111 km
    with pytest.raises(OutOfFlatEarthRange):
        geodetic_to_ned(far_lat, BANDUNG.longitude, 700.0, BANDUNG)


def test_origin_validation():
    with pytest.raises(ValueError):
        GeoOrigin(latitude=91.0, longitude=0.0, altitude_msl=0.0)
    with pytest.raises(ValueError):
        GeoOrigin(latitude=0.0, longitude=-181.0, altitude_msl=0.0)


def test_wrap_pi_range_and_continuity():
    for a in np.linspace(-10.0, 10.0, 2001):
        w = wrap_pi(float(a))
        assert -math.pi <= w < math.pi
        assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-12)
        assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-12)
