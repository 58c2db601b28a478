"""Framed binary link protocol for the sim <-> autopilot boundary.

Frame layout (stands in for the RS-232 link; works over any ordered byte
stream):

    sync(2) = A5 5A | msg_type(1) | payload_len(1) | payload | crc(2)

CRC is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection, no
xorout) over msg_type + payload_len + payload, transmitted big-endian.
Multi-byte integers *inside* payloads are little-endian. Scaled integers
are used everywhere except gain floats, so frames are bit-exact and
testable against golden byte vectors.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

SYNC0 = 0xA5
SYNC1 = 0x5A
MAX_PAYLOAD = 64

MSG_ATTITUDE = 0x01
MSG_GPS = 0x02
MSG_SERVO = 0x10
MSG_SET_GAINS = 0x20
MSG_MISSION_ITEM = 0x21
MSG_STATUS = 0x30

MODE_INIT = 0
MODE_NAV = 1
MODE_LOITER = 2
MODE_COMPLETE = 3

LOOP_ROLL = 0
LOOP_PITCH = 1
LOOP_HEADING = 2
LOOP_SPEED = 3

WP_FLYOVER = 0
WP_LOITER = 1


class FieldOutOfRange(ValueError):
    """A physical value does not fit the wire field it is encoded into."""


def crc16_ccitt_false(data: bytes, crc: int = 0xFFFF) -> int:
    """Bitwise CRC-16/CCITT-FALSE. Check vector: b"123456789" -> 0x29B1."""
    for b in data:
        crc ^= b << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021) if crc & 0x8000 else (crc << 1)
            crc &= 0xFFFF
    return crc


# --- scaled-integer field specs -------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """Physical unit <-> wire integer mapping for one payload field."""
    name: str
    scale: float          # wire = round(physical * scale), half away from zero
    lo: int
    hi: int


_RAD_TO_CDEG = 18000.0 / math.pi

ANGLE_CDEG = FieldSpec("angle_cdeg", _RAD_TO_CDEG, -32768, 32767)          # rad -> i16 centideg
HEADING_CDEG = FieldSpec("heading_cdeg", _RAD_TO_CDEG, 0, 35999)           # rad [0,2pi) -> u16
RATE_CDEG_S = FieldSpec("rate_cdeg_s", _RAD_TO_CDEG, -32768, 32767)        # rad/s -> i16 centideg/s
LATLON_1E7 = FieldSpec("latlon_1e7", 1e7, -(2**31), 2**31 - 1)             # deg -> i32
ALT_CM = FieldSpec("alt_cm", 100.0, -(2**31), 2**31 - 1)                   # m -> i32 cm
SPEED_CM_S = FieldSpec("speed_cm_s", 100.0, 0, 65535)                      # m/s -> u16 cm/s
SERVO_US = FieldSpec("servo_us", 1.0, 1000, 2000)                          # us -> u16 us
XTE_DM = FieldSpec("xte_dm", 10.0, -32768, 32767)                          # m -> i16 decimeters


def scale_to_wire(value: float, spec: FieldSpec) -> int:
    """Quantize a physical value onto its wire integer, rounding half away
    from zero. Raises FieldOutOfRange outside the field's integer range."""
    if not math.isfinite(value):
        raise FieldOutOfRange(f"{spec.name}: non-finite value {value!r}")
    scaled = value * spec.scale
    wire = int(math.floor(abs(scaled) + 0.5))
    if scaled < 0:
        wire = -wire
    if wire < spec.lo or wire > spec.hi:
        raise FieldOutOfRange(f"{spec.name}: {value} -> {wire} outside [{spec.lo}, {spec.hi}]")
    return wire


def wire_to_physical(wire: int, spec: FieldSpec) -> float:
    """Inverse of scale_to_wire (up to the half-quantum rounding)."""
    return wire / spec.scale


def _f32(x: float) -> float:
    """Round to the nearest IEEE-754 single so messages equal their decode."""
    return struct.unpack("<f", struct.pack("<f", x))[0]


def _heading_cd(angle: float) -> int:
    """Radians (any wrap) -> centidegrees on [0, 36000). The modulo runs
    after quantization so angles just short of 2*pi cannot round to 36000."""
    wrapped = angle % (2.0 * math.pi)
    return int(math.floor(wrapped * _RAD_TO_CDEG + 0.5)) % 36000


def _check(name: str, value: int, lo: int, hi: int) -> int:
    if not lo <= value <= hi:
        raise FieldOutOfRange(f"{name}: {value} outside [{lo}, {hi}]")
    return value


# --- messages ---------------------------------------------------------------
# Messages carry wire-unit integers (gains carry f32-rounded floats) so that
# decode(encode(m)) == m exactly; from_physical/physical properties do the
# quantization at the edges.

@dataclass
class AttitudeMsg:
    """Estimated attitude, sim -> autopilot at the 50 Hz control rate."""
    roll_cd: int
    pitch_cd: int
    heading_cd: int      # [0, 36000) centideg
    yaw_rate_cds: int

    msg_type = MSG_ATTITUDE
    _fmt = "<hhHh"

    @classmethod
    def from_physical(cls, roll: float, pitch: float, heading: float,
                      yaw_rate: float) -> "AttitudeMsg":
        """Angles in radians; heading wrapped onto [0, 2pi) before scaling."""
        return cls(
            roll_cd=scale_to_wire(roll, ANGLE_CDEG),
            pitch_cd=scale_to_wire(pitch, ANGLE_CDEG),
            heading_cd=_heading_cd(heading),
            yaw_rate_cds=scale_to_wire(yaw_rate, RATE_CDEG_S),
        )

    @property
    def roll(self) -> float:
        return wire_to_physical(self.roll_cd, ANGLE_CDEG)

    @property
    def pitch(self) -> float:
        return wire_to_physical(self.pitch_cd, ANGLE_CDEG)

    @property
    def heading(self) -> float:
        """Heading in radians wrapped to [-pi, pi)."""
        h = wire_to_physical(self.heading_cd, HEADING_CDEG)
        return (h + math.pi) % (2.0 * math.pi) - math.pi

    @property
    def yaw_rate(self) -> float:
        return wire_to_physical(self.yaw_rate_cds, RATE_CDEG_S)

    def to_payload(self) -> bytes:
        _check("heading_cd", self.heading_cd, 0, 35999)
        return struct.pack(self._fmt, self.roll_cd, self.pitch_cd,
                           self.heading_cd, self.yaw_rate_cds)

    @classmethod
    def from_payload(cls, payload: bytes) -> "AttitudeMsg":
        return cls(*struct.unpack(cls._fmt, payload))


@dataclass
class GpsMsg:
    """GPS fix, sim -> autopilot at the receiver rate (default 4 Hz)."""
    lat_1e7: int
    lon_1e7: int
    alt_cm: int
    ground_speed_cms: int
    course_cd: int       # [0, 36000) centideg
    flags: int           # bit0 = valid

    msg_type = MSG_GPS
    _fmt = "<iiiHHH"

    @classmethod
    def from_physical(cls, lat: float, lon: float, alt: float,
                      ground_speed: float, course: float,
                      valid: bool = True) -> "GpsMsg":
        """lat/lon in degrees, alt m, speed m/s, course radians [0, 2pi)."""
        return cls(
            lat_1e7=scale_to_wire(lat, LATLON_1E7),
            lon_1e7=scale_to_wire(lon, LATLON_1E7),
            alt_cm=scale_to_wire(alt, ALT_CM),
            ground_speed_cms=scale_to_wire(ground_speed, SPEED_CM_S),
            course_cd=_heading_cd(course),
            flags=1 if valid else 0,
        )

    @property
    def lat(self) -> float:
        return wire_to_physical(self.lat_1e7, LATLON_1E7)

    @property
    def lon(self) -> float:
        return wire_to_physical(self.lon_1e7, LATLON_1E7)

    @property
    def alt(self) -> float:
        return wire_to_physical(self.alt_cm, ALT_CM)

    @property
    def ground_speed(self) -> float:
        return wire_to_physical(self.ground_speed_cms, SPEED_CM_S)

    @property
    def course(self) -> float:
        return wire_to_physical(self.course_cd, HEADING_CDEG)

    @property
    def valid(self) -> bool:
        return bool(self.flags & 1)

    def to_payload(self) -> bytes:
        _check("course_cd", self.course_cd, 0, 35999)
        return struct.pack(self._fmt, self.lat_1e7, self.lon_1e7, self.alt_cm,
                           self.ground_speed_cms, self.course_cd, self.flags)

    @classmethod
    def from_payload(cls, payload: bytes) -> "GpsMsg":
        return cls(*struct.unpack(cls._fmt, payload))


@dataclass
class ServoMsg:
    """Actuator pulse widths, autopilot -> sim at 50 Hz."""
    aileron_us: int
    elevator_us: int
    rudder_us: int
    throttle_us: int

    msg_type = MSG_SERVO
    _fmt = "<HHHH"

    def to_payload(self) -> bytes:
        for name in ("aileron_us", "elevator_us", "rudder_us", "throttle_us"):
            _check(name, getattr(self, name), 1000, 2000)
        return struct.pack(self._fmt, self.aileron_us, self.elevator_us,
                           self.rudder_us, self.throttle_us)

    @classmethod
    def from_payload(cls, payload: bytes) -> "ServoMsg":
        return cls(*struct.unpack(cls._fmt, payload))


@dataclass
class SetGainsMsg:
    """Live PID gain update, GCS -> autopilot (forwarded by the harness)."""
    loop_id: int         # LOOP_ROLL .. LOOP_SPEED
    kp: float
    ki: float
    kd: float
    integrator_limit: float
    reserved: int = 0    # pads declared length; must encode 0

    msg_type = MSG_SET_GAINS
    _fmt = "<BffffI"

    def __post_init__(self) -> None:
        self.kp = _f32(self.kp)
        self.ki = _f32(self.ki)
        self.kd = _f32(self.kd)
        self.integrator_limit = _f32(self.integrator_limit)

    def to_payload(self) -> bytes:
        _check("loop_id", self.loop_id, 0, 3)
        return struct.pack(self._fmt, self.loop_id, self.kp, self.ki, self.kd,
                           self.integrator_limit, self.reserved)

    @classmethod
    def from_payload(cls, payload: bytes) -> "SetGainsMsg":
        loop_id, kp, ki, kd, lim, reserved = struct.unpack(cls._fmt, payload)
        return cls(loop_id, kp, ki, kd, lim, reserved)


@dataclass
class MissionItemMsg:
    """One mission waypoint, GCS/harness -> autopilot.

    param is in centi-units: loiter radius in cm for LOITER kind, 0 for
    FLYOVER. aux is the loiter duration in whole seconds (0 = indefinite,
    and 0 for FLYOVER).
    """
    index: int
    kind: int            # WP_FLYOVER | WP_LOITER
    lat_1e7: int
    lon_1e7: int
    alt_cm: int
    param: int
    count: int
    aux: int = 0

    msg_type = MSG_MISSION_ITEM
    _fmt = "<BBiiiIBB"

    @classmethod
    def from_physical(cls, index: int, kind: int, lat: float, lon: float,
                      alt: float, loiter_radius: float = 0.0, count: int = 1,
                      loiter_duration_s: float = 0.0) -> "MissionItemMsg":
        return cls(
            index=index,
            kind=kind,
            lat_1e7=scale_to_wire(lat, LATLON_1E7),
            lon_1e7=scale_to_wire(lon, LATLON_1E7),
            alt_cm=scale_to_wire(alt, ALT_CM),
            param=scale_to_wire(loiter_radius, ALT_CM) if kind == WP_LOITER else 0,
            count=count,
            aux=_check("loiter_duration_s", int(round(loiter_duration_s)), 0, 255),
        )

    @property
    def lat(self) -> float:
        return wire_to_physical(self.lat_1e7, LATLON_1E7)

    @property
    def lon(self) -> float:
        return wire_to_physical(self.lon_1e7, LATLON_1E7)

    @property
    def alt(self) -> float:
        return wire_to_physical(self.alt_cm, ALT_CM)

    @property
    def loiter_radius(self) -> float:
        return wire_to_physical(self.param, ALT_CM)

    def to_payload(self) -> bytes:
        _check("index", self.index, 0, 255)
        _check("kind", self.kind, 0, 1)
        _check("count", self.count, 1, 255)
        _check("aux", self.aux, 0, 255)
        return struct.pack(self._fmt, self.index, self.kind, self.lat_1e7,
                           self.lon_1e7, self.alt_cm, self.param, self.count,
                           self.aux)

    @classmethod
    def from_payload(cls, payload: bytes) -> "MissionItemMsg":
        return cls(*struct.unpack(cls._fmt, payload))


@dataclass
class StatusMsg:
    """Autopilot status, autopilot -> sim/GCS at 5 Hz."""
    uptime_ms: int
    current_wp: int
    mode: int            # MODE_INIT .. MODE_COMPLETE
    crosstrack_dm: int
    loop_load_pct: int
    fault_flags: int
    reserved: int = 0

    msg_type = MSG_STATUS
    _fmt = "<IBBhBBH"

    @property
    def crosstrack_m(self) -> float:
        return wire_to_physical(self.crosstrack_dm, XTE_DM)

    def to_payload(self) -> bytes:
        _check("mode", self.mode, 0, 3)
        return struct.pack(self._fmt, self.uptime_ms, self.current_wp,
                           self.mode, self.crosstrack_dm, self.loop_load_pct,
                           self.fault_flags, self.reserved)

    @classmethod
    def from_payload(cls, payload: bytes) -> "StatusMsg":
        return cls(*struct.unpack(cls._fmt, payload))


Message = AttitudeMsg | GpsMsg | ServoMsg | SetGainsMsg | MissionItemMsg | StatusMsg

_DECODERS = {
    MSG_ATTITUDE: (AttitudeMsg, 8),
    MSG_GPS: (GpsMsg, 18),
    MSG_SERVO: (ServoMsg, 8),
    MSG_SET_GAINS: (SetGainsMsg, 21),
    MSG_MISSION_ITEM: (MissionItemMsg, 20),
    MSG_STATUS: (StatusMsg, 12),
}


def encode_frame(message: Message) -> bytes:
    """Serialize one message into a framed, checksummed byte string."""
    payload = message.to_payload()
    if len(payload) > MAX_PAYLOAD:
        raise FieldOutOfRange(f"payload length {len(payload)} exceeds {MAX_PAYLOAD}")
    body = bytes([message.msg_type, len(payload)]) + payload
    crc = crc16_ccitt_false(body)
    return bytes([SYNC0, SYNC1]) + body + crc.to_bytes(2, "big")


def decode_stream(buffer: bytes) -> tuple[list[Message], bytes, int]:
    """Resynchronizing parser over arbitrary bytes.

    Returns (messages, remainder, error_count). Corrupt frames (bad CRC or
    impossible length) bump the error count and scanning resumes one byte
    past the failed sync; a partial trailing frame comes back as remainder.
    Never raises: link noise must not kill the loop.
    """
    messages: list[Message] = []
    errors = 0
    i = 0
    n = len(buffer)
    while i < n:
        if buffer[i] != SYNC0:
            i += 1
            continue
        if i + 1 >= n:
            break  # lone sync byte at the tail: keep it
        if buffer[i + 1] != SYNC1:
            i += 1
            continue
        if i + 4 > n:
            break  # header incomplete
        payload_len = buffer[i + 3]
        if payload_len > MAX_PAYLOAD:
            errors += 1
            i += 1
            continue
        total = 6 + payload_len
        if i + total > n:
            break  # frame incomplete
        body = buffer[i + 2:i + 4 + payload_len]
        crc_rx = int.from_bytes(buffer[i + 4 + payload_len:i + total], "big")
        if crc16_ccitt_false(body) != crc_rx:
            errors += 1
            i += 1
            continue
        msg_type = buffer[i + 2]
        entry = _DECODERS.get(msg_type)
        if entry is not None:
            cls, expect_len = entry
            if payload_len == expect_len:
                messages.append(cls.from_payload(bytes(buffer[i + 4:i + 4 + payload_len])))
            else:
                errors += 1
        # unknown msg_type with valid CRC: skip silently, stay in sync
        i += total
    return messages, bytes(buffer[i:]), errors


@dataclass
class StreamDecoder:
    """Stateful wrapper around decode_stream for a live link direction."""
    _pending: bytes = b""
    errors: int = 0
    decoded: int = 0

    def feed(self, data: bytes) -> list[Message]:
        messages, self._pending, errs = decode_stream(self._pending + data)
        self.errors += errs
        self.decoded += len(messages)
        return messages
