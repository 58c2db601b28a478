"""Flat-earth equirectangular geodesy anchoring the local NED frame.

All missions are local-range, so a spherical-earth equirectangular mapping
(exactly invertible, constant cos(lat0)) is used instead of WGS-84:

    lat = lat0 + north / R_EARTH * (180/pi)
    lon = lon0 + east / (R_EARTH * cos(lat0)) * (180/pi)
    alt = alt0 - down
"""

from __future__ import annotations

import math
from dataclasses import dataclass

R_EARTH = 6_371_000.0
FLAT_EARTH_RANGE = 50_000.0


class OutOfFlatEarthRange(ValueError):
    """Position is farther from the origin than the flat-earth model allows."""


@dataclass(frozen=True)
class GeoOrigin:
    """Geodetic anchor of the scenario's NED frame."""
    latitude: float       # deg
    longitude: float      # deg
    altitude_msl: float   # m

    def __post_init__(self) -> None:
        if abs(self.latitude) > 90.0 or abs(self.longitude) > 180.0:
            raise ValueError("origin latitude/longitude out of range")


def ned_to_geodetic(position: tuple[float, float, float],
                    origin: GeoOrigin) -> tuple[float, float, float]:
    """NED meters relative to origin -> (lat deg, lon deg, alt m)."""
    north, east, down = position
    if math.hypot(north, east) > FLAT_EARTH_RANGE:
        raise OutOfFlatEarthRange(f"{math.hypot(north, east):.0f} m from origin")
    deg = 180.0 / math.pi
    lat = origin.latitude + north / R_EARTH * deg
    lon = origin.longitude + east / (R_EARTH * math.cos(math.radians(origin.latitude))) * deg
    alt = origin.altitude_msl - down
    return lat, lon, alt


def geodetic_to_ned(lat: float, lon: float, alt: float,
                    origin: GeoOrigin) -> tuple[float, float, float]:
    """(lat deg, lon deg, alt m) -> NED meters relative to origin."""
    rad = math.pi / 180.0
    north = (lat - origin.latitude) * rad * R_EARTH
    east = (lon - origin.longitude) * rad * R_EARTH * math.cos(math.radians(origin.latitude))
    if math.hypot(north, east) > FLAT_EARTH_RANGE:
        raise OutOfFlatEarthRange(f"{math.hypot(north, east):.0f} m from origin")
    return north, east, origin.altitude_msl - alt


def wrap_pi(angle: float) -> float:
    """Wrap an angle onto [-pi, pi)."""
    return (angle + math.pi) % (2.0 * math.pi) - math.pi
