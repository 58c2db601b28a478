"""Two-layer waypoint/PID autopilot.

Layer 1 (sequencer) turns the mission plus current navigation state into
attitude/heading/speed objectives; layer 2 is four PID loops mapping
objectives onto servo pulse widths:

    roll_cmd    vs roll     -> aileron
    pitch_cmd   vs pitch    -> elevator
    heading_cmd vs heading  -> rudder (wrapped error)
    speed_cmd   vs ground speed -> throttle

Heading error also drives the roll objective (banked turns dominate, the
rudder loop damps). The Autopilot class at the bottom is the embedded
firmware stand-in: a single-threaded state machine fed exclusively by wire
messages, with no file or network access of its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .geodesy import GeoOrigin, geodetic_to_ned, wrap_pi
from .protocol import (
    AttitudeMsg, GpsMsg, MissionItemMsg, ServoMsg, SetGainsMsg, StatusMsg,
    MODE_COMPLETE, MODE_INIT, MODE_LOITER, MODE_NAV,
    LOOP_HEADING, LOOP_PITCH, LOOP_ROLL, LOOP_SPEED,
    WP_LOITER,
)
from .sensors import AttitudeEstimate

ROLL_LIMIT = math.radians(30.0)
PITCH_LIMIT = math.radians(15.0)
K_COURSE = 1.0          # rad roll per rad heading error (pre-clamp)
K_ALT = 0.01            # rad pitch per m altitude error
K_CROSSTRACK = 0.025    # rad course correction per m crosstrack error
CROSSTRACK_MAX = math.radians(45.0)
K_LOITER_CONV = 0.05    # loiter circle convergence gain, rad per m radial error

SERVO_CENTER = 1500
SERVO_MIN = 1000
SERVO_MAX = 2000

# firmware defaults for what the wire format cannot carry
DEFAULT_CAPTURE_RADIUS = 75.0   # m
DEFAULT_CRUISE_SPEED = 18.0     # m/s
DEFAULT_LOITER_RADIUS = 100.0   # m, post-mission hold
CONTROL_DT = 0.02               # s, one control tick per ATTITUDE frame
STATUS_DECIMATION = 10          # one STATUS per 10 ticks = 5 Hz

FAULT_NO_MISSION = 0x01
FAULT_GPS_STALE = 0x02
FAULT_LINK_ERRORS = 0x04
GPS_STALE_AFTER = 1.5           # s without a valid fix


class DegenerateLeg(ValueError):
    """Crosstrack undefined: leg endpoints coincide horizontally."""


class InvalidGains(ValueError):
    """PID gain set violates its invariants."""


class WaypointKind(Enum):
    FLYOVER = "FLYOVER"
    LOITER = "LOITER"


@dataclass(frozen=True)
class Waypoint:
    latitude: float            # deg
    longitude: float           # deg
    altitude: float            # m MSL
    capture_radius: float = DEFAULT_CAPTURE_RADIUS
    kind: WaypointKind = WaypointKind.FLYOVER
    loiter_radius: float = DEFAULT_LOITER_RADIUS
    loiter_duration: float = 0.0   # s; 0 = loiter indefinitely

    def __post_init__(self) -> None:
        if self.capture_radius <= 0:
            raise ValueError("capture_radius must be positive")
        if self.kind is WaypointKind.LOITER and self.loiter_radius <= 0:
            raise ValueError("loiter radius must be positive")


@dataclass(frozen=True)
class Mission:
    waypoints: tuple[Waypoint, ...]
    cruise_speed: float = DEFAULT_CRUISE_SPEED
    crosstrack_enabled: bool = True

    def __post_init__(self) -> None:
        if self.cruise_speed <= 0:
            raise ValueError("cruise_speed must be positive")


@dataclass(frozen=True)
class Objectives:
    roll_cmd: float      # rad, |.| <= ROLL_LIMIT
    pitch_cmd: float     # rad, |.| <= PITCH_LIMIT
    heading_cmd: float   # rad [-pi, pi)
    speed_cmd: float     # m/s


@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float
    kd: float
    output_min: float
    output_max: float
    integrator_limit: float
    deriv_tau: float = 0.05   # s, first-order filter on the measurement

    def __post_init__(self) -> None:
        if self.output_min >= self.output_max:
            raise InvalidGains("output_min must be below output_max")
        if self.integrator_limit < 0:
            raise InvalidGains("integrator_limit must be non-negative")


@dataclass(frozen=True)
class PidState:
    integrator: float = 0.0
    filtered_meas: float | None = None


@dataclass(frozen=True)
class NavState:
    position: tuple[float, float, float]   # NED m in the autopilot's frame
    attitude: AttitudeEstimate
    ground_speed: float
    current_wp_index: int = 0
    loiter_elapsed: float | None = None    # None = not loitering


@dataclass(frozen=True)
class ServoCommand:
    aileron_us: int
    elevator_us: int
    rudder_us: int
    throttle_us: int


def crosstrack_error(prev_wp: tuple[float, float], next_wp: tuple[float, float],
                     position: tuple[float, float]) -> float:
    """Signed perpendicular distance (m) from position to the leg line.

    Positive right of track looking from prev to next. NED horizontal
    coordinates (north, east). Raises DegenerateLeg when the endpoints
    coincide within 1 m.
    """
    dn = next_wp[0] - prev_wp[0]
    de = next_wp[1] - prev_wp[1]
    leg = math.hypot(dn, de)
    if leg < 1.0:
        raise DegenerateLeg("leg endpoints coincide horizontally")
    pn = position[0] - prev_wp[0]
    pe = position[1] - prev_wp[1]
    # 2-D cross product leg x pos; right of track is positive in NED
    return (dn * pe - de * pn) / leg


def _bearing(from_pos: tuple[float, float], to_pos: tuple[float, float]) -> float:
    return math.atan2(to_pos[1] - from_pos[1], to_pos[0] - from_pos[0])


def _loiter_heading(center: tuple[float, float], radius: float,
                    position: tuple[float, float], clockwise: bool = True) -> float:
    """Tangent course around the circle plus a radial convergence term."""
    radial = _bearing(center, (position[0], position[1]))
    dist = math.hypot(position[0] - center[0], position[1] - center[1])
    conv = math.atan(K_LOITER_CONV * (dist - radius))
    if clockwise:
        return wrap_pi(radial + math.pi / 2.0 + conv)
    return wrap_pi(radial - math.pi / 2.0 - conv)


def sequencer_step(nav: NavState, mission: Mission, dt: float,
                   wp_ned: list[tuple[float, float, float]],
                   clockwise_loiter: bool = True
                   ) -> tuple[Objectives, NavState]:
    """Advance the waypoint sequencer one control tick.

    wp_ned holds the mission waypoints already converted into the
    autopilot's NED frame (one (n, e, d) per waypoint). Capture is
    radius-triggered only; after the final waypoint the sequencer holds a
    loiter at the last waypoint and the mission counts as complete.
    """
    assert mission.waypoints, "sequencer needs a nonempty mission"
    n_wp = len(mission.waypoints)
    idx = nav.current_wp_index
    loiter_elapsed = nav.loiter_elapsed
    pos_h = (nav.position[0], nav.position[1])

    # state transitions: capture / loiter progress
    if idx < n_wp:
        wp = mission.waypoints[idx]
        tgt = wp_ned[idx]
        if loiter_elapsed is None:
            dist_h = math.hypot(pos_h[0] - tgt[0], pos_h[1] - tgt[1])
            if dist_h < wp.capture_radius:
                if wp.kind is WaypointKind.FLYOVER:
                    idx += 1
                else:
                    loiter_elapsed = 0.0
        else:
            loiter_elapsed += dt
            if wp.loiter_duration > 0 and loiter_elapsed >= wp.loiter_duration:
                idx += 1
                loiter_elapsed = None

    # guidance for the (possibly updated) situation
    if idx >= n_wp:
        # mission complete: indefinite hold at the last waypoint
        wp = mission.waypoints[-1]
        tgt = wp_ned[-1]
        radius = wp.loiter_radius if wp.kind is WaypointKind.LOITER \
            else DEFAULT_LOITER_RADIUS
        heading_cmd = _loiter_heading((tgt[0], tgt[1]), radius, pos_h,
                                      clockwise_loiter)
    elif loiter_elapsed is not None:
        wp = mission.waypoints[idx]
        tgt = wp_ned[idx]
        heading_cmd = _loiter_heading((tgt[0], tgt[1]), wp.loiter_radius,
                                      pos_h, clockwise_loiter)
    else:
        wp = mission.waypoints[idx]
        tgt = wp_ned[idx]
        heading_cmd = _bearing(pos_h, (tgt[0], tgt[1]))
        if mission.crosstrack_enabled and idx > 0:
            prev = wp_ned[idx - 1]
            try:
                xte = crosstrack_error((prev[0], prev[1]), (tgt[0], tgt[1]), pos_h)
            except DegenerateLeg:
                xte = 0.0
            correction = max(-CROSSTRACK_MAX,
                             min(CROSSTRACK_MAX, K_CROSSTRACK * xte))
            heading_cmd = wrap_pi(heading_cmd - correction)

    # objectives from the (possibly advanced) target
    tgt_active = wp_ned[min(idx, n_wp - 1)]
    heading_err = wrap_pi(heading_cmd - nav.attitude.heading)
    roll_cmd = max(-ROLL_LIMIT, min(ROLL_LIMIT, K_COURSE * heading_err))
    alt_err = nav.position[2] - tgt_active[2]  # down - wp_down = alt deficit
    pitch_cmd = max(-PITCH_LIMIT, min(PITCH_LIMIT, K_ALT * alt_err))

    objectives = Objectives(roll_cmd=roll_cmd, pitch_cmd=pitch_cmd,
                            heading_cmd=wrap_pi(heading_cmd),
                            speed_cmd=mission.cruise_speed)
    new_nav = replace(nav, current_wp_index=idx, loiter_elapsed=loiter_elapsed)
    return objectives, new_nav


def pid_step(gains: PidGains, state: PidState, setpoint: float,
             measurement: float, dt: float,
             wrap_error: bool = False) -> tuple[float, PidState]:
    """One PID update.

    Derivative acts on the filtered measurement (no setpoint kick); the
    integrator is clamped to +-integrator_limit and frozen while the output
    is saturated in the error's direction (conditional anti-windup).
    """
    assert dt > 0
    error = setpoint - measurement
    if wrap_error:
        error = wrap_pi(error)

    if state.filtered_meas is None:
        filt = measurement
        d_meas = 0.0
    else:
        filt = state.filtered_meas + (measurement - state.filtered_meas) \
            * dt / (gains.deriv_tau + dt)
        d_meas = (filt - state.filtered_meas) / dt

    integ = state.integrator + gains.ki * error * dt
    integ = max(-gains.integrator_limit, min(gains.integrator_limit, integ))
    unsat = gains.kp * error + integ - gains.kd * d_meas
    if (unsat > gains.output_max and error > 0) or \
       (unsat < gains.output_min and error < 0):
        integ = state.integrator  # freeze: pushing further into saturation
        unsat = gains.kp * error + integ - gains.kd * d_meas
    output = max(gains.output_min, min(gains.output_max, unsat))
    return output, PidState(integrator=integ, filtered_meas=filt)


DEFAULT_GAINS: dict[int, PidGains] = {
    LOOP_ROLL: PidGains(kp=350.0, ki=40.0, kd=25.0,
                        output_min=-500.0, output_max=500.0,
                        integrator_limit=150.0),
    LOOP_PITCH: PidGains(kp=700.0, ki=150.0, kd=30.0,
                         output_min=-500.0, output_max=500.0,
                         integrator_limit=250.0),
    LOOP_HEADING: PidGains(kp=120.0, ki=0.0, kd=0.0,
                           output_min=-250.0, output_max=250.0,
                           integrator_limit=0.0),
    LOOP_SPEED: PidGains(kp=40.0, ki=18.0, kd=0.0,
                         output_min=-500.0, output_max=500.0,
                         integrator_limit=480.0),
}


def control_step(objectives: Objectives, estimate: AttitudeEstimate,
                 ground_speed: float, gains: dict[int, PidGains],
                 states: dict[int, PidState], dt: float
                 ) -> tuple[ServoCommand, dict[int, PidState]]:
    """Run the four PID loops and map outputs to servo pulse widths.

    Surfaces are centered at 1500 us; throttle spans [1000, 2000] us with
    its trim carried by the speed loop's bias around the same center.
    """
    out_a, st_a = pid_step(gains[LOOP_ROLL], states[LOOP_ROLL],
                           objectives.roll_cmd, estimate.roll, dt)
    out_e, st_e = pid_step(gains[LOOP_PITCH], states[LOOP_PITCH],
                           objectives.pitch_cmd, estimate.pitch, dt)
    out_r, st_r = pid_step(gains[LOOP_HEADING], states[LOOP_HEADING],
                           objectives.heading_cmd, estimate.heading, dt,
                           wrap_error=True)
    out_t, st_t = pid_step(gains[LOOP_SPEED], states[LOOP_SPEED],
                           objectives.speed_cmd, ground_speed, dt)

    to_us = lambda out: int(min(SERVO_MAX, max(SERVO_MIN,
                                round(SERVO_CENTER + out))))
    command = ServoCommand(
        aileron_us=to_us(out_a),
        elevator_us=to_us(out_e),
        rudder_us=to_us(out_r),
        throttle_us=to_us(out_t),
    )
    new_states = {LOOP_ROLL: st_a, LOOP_PITCH: st_e,
                  LOOP_HEADING: st_r, LOOP_SPEED: st_t}
    return command, new_states


class Autopilot:
    """Wire-driven firmware state machine.

    Feed it decoded messages via handle_message(); every ATTITUDE frame is
    one 50 Hz control tick and yields the frames to send back (SERVO, plus
    STATUS at 5 Hz). The only state it ever sees arrives on the wire.
    """

    def __init__(self, gains: dict[int, PidGains] | None = None,
                 capture_radius: float = DEFAULT_CAPTURE_RADIUS,
                 cruise_speed: float = DEFAULT_CRUISE_SPEED,
                 crosstrack_enabled: bool = True):
        self.gains = dict(gains or DEFAULT_GAINS)
        self.pid_states: dict[int, PidState] = {k: PidState() for k in self.gains}
        self.capture_radius = capture_radius
        self.cruise_speed = cruise_speed
        self.crosstrack_enabled = crosstrack_enabled

        self.mission: Mission | None = None
        self.wp_ned: list[tuple[float, float, float]] = []
        self._mission_buffer: dict[int, MissionItemMsg] = {}
        self.origin: GeoOrigin | None = None
        self.nav: NavState | None = None
        self.last_fix_time: float | None = None
        self.last_objectives: Objectives | None = None
        self.ticks = 0
        self.link_errors = 0
        self.loop_load_pct = 0
        self._last_xte = 0.0

    # -- mode & status ------------------------------------------------------

    @property
    def mode(self) -> int:
        if self.mission is None or self.nav is None:
            return MODE_INIT
        if self.nav.current_wp_index >= len(self.mission.waypoints):
            return MODE_COMPLETE
        if self.nav.loiter_elapsed is not None:
            return MODE_LOITER
        return MODE_NAV

    @property
    def uptime(self) -> float:
        return self.ticks * CONTROL_DT

    def _fault_flags(self) -> int:
        flags = 0
        if self.mission is None:
            flags |= FAULT_NO_MISSION
        if self.last_fix_time is None or \
                self.uptime - self.last_fix_time > GPS_STALE_AFTER:
            flags |= FAULT_GPS_STALE
        if self.link_errors:
            flags |= FAULT_LINK_ERRORS
        return flags

    def _status(self) -> StatusMsg:
        xte_dm = int(max(-32768, min(32767, round(self._last_xte * 10.0))))
        return StatusMsg(
            uptime_ms=int(round(self.uptime * 1000.0)),
            current_wp=min(255, self.nav.current_wp_index if self.nav else 0),
            mode=self.mode,
            crosstrack_dm=xte_dm,
            loop_load_pct=min(255, self.loop_load_pct),
            fault_flags=self._fault_flags(),
        )

    # -- message handling -----------------------------------------------------

    def set_gains(self, loop_id: int, gains: PidGains) -> PidGains:
        """Install new gains; the loop's integrator resets for bumpless-enough
        live tuning. Returns the applied gains (read-back acknowledgement)."""
        if loop_id not in self.gains:
            raise InvalidGains(f"unknown loop id {loop_id}")
        self.gains[loop_id] = gains  # PidGains validates itself
        self.pid_states[loop_id] = PidState()
        return self.gains[loop_id]

    def _arm_mission(self, count: int) -> None:
        items = [self._mission_buffer.get(i) for i in range(count)]
        if any(it is None for it in items):
            return  # incomplete upload; all-or-nothing
        waypoints = []
        for it in items:
            kind = WaypointKind.LOITER if it.kind == WP_LOITER else WaypointKind.FLYOVER
            waypoints.append(Waypoint(
                latitude=it.lat, longitude=it.lon, altitude=it.alt,
                capture_radius=self.capture_radius,
                kind=kind,
                loiter_radius=it.loiter_radius if kind is WaypointKind.LOITER
                else DEFAULT_LOITER_RADIUS,
                loiter_duration=float(it.aux),
            ))
        self.mission = Mission(waypoints=tuple(waypoints),
                               cruise_speed=self.cruise_speed,
                               crosstrack_enabled=self.crosstrack_enabled)
        self._mission_buffer.clear()
        self._recompute_wp_ned()
        if self.nav is not None:
            self.nav = replace(self.nav, current_wp_index=0, loiter_elapsed=None)

    def _recompute_wp_ned(self) -> None:
        if self.mission is None or self.origin is None:
            self.wp_ned = []
            return
        self.wp_ned = [geodetic_to_ned(w.latitude, w.longitude, w.altitude,
                                       self.origin)
                       for w in self.mission.waypoints]

    def _handle_gps(self, msg: GpsMsg) -> None:
        if not msg.valid:
            return
        if self.origin is None:
            # first fix anchors the autopilot's private NED frame
            self.origin = GeoOrigin(latitude=msg.lat, longitude=msg.lon,
                                    altitude_msl=msg.alt)
            self._recompute_wp_ned()
        position = geodetic_to_ned(msg.lat, msg.lon, msg.alt, self.origin)
        self.last_fix_time = self.uptime
        attitude = self.nav.attitude if self.nav else \
            AttitudeEstimate(0.0, 0.0, 0.0, 0.0)
        if self.nav is None:
            self.nav = NavState(position=position, attitude=attitude,
                                ground_speed=msg.ground_speed)
        else:
            self.nav = replace(self.nav, position=position,
                               ground_speed=msg.ground_speed)

    def handle_message(self, msg) -> list:
        """Process one decoded wire message; returns frames to transmit."""
        if isinstance(msg, GpsMsg):
            self._handle_gps(msg)
            return []
        if isinstance(msg, SetGainsMsg):
            current = self.gains.get(msg.loop_id, DEFAULT_GAINS[LOOP_ROLL])
            try:
                self.set_gains(msg.loop_id, PidGains(
                    kp=msg.kp, ki=msg.ki, kd=msg.kd,
                    output_min=current.output_min,
                    output_max=current.output_max,
                    integrator_limit=msg.integrator_limit))
            except InvalidGains:
                pass  # reject silently; wire has no nak
            return []
        if isinstance(msg, MissionItemMsg):
            self._mission_buffer[msg.index] = msg
            self._arm_mission(msg.count)
            return []
        if isinstance(msg, AttitudeMsg):
            return self._tick(msg)
        return []

    def _tick(self, att: AttitudeMsg) -> list:
        self.ticks += 1
        estimate = AttitudeEstimate(roll=att.roll, pitch=att.pitch,
                                    heading=att.heading,
                                    estimate_time=self.uptime)
        if self.nav is not None:
            self.nav = replace(self.nav, attitude=estimate)

        if self.mission is not None and self.nav is not None and self.wp_ned:
            objectives, self.nav = sequencer_step(self.nav, self.mission,
                                                  CONTROL_DT, self.wp_ned)
            self.last_objectives = objectives
            self._update_xte()
            command, self.pid_states = control_step(
                objectives, estimate, self.nav.ground_speed,
                self.gains, self.pid_states, CONTROL_DT)
            servo = ServoMsg(command.aileron_us, command.elevator_us,
                             command.rudder_us, command.throttle_us)
        else:
            servo = ServoMsg(SERVO_CENTER, SERVO_CENTER, SERVO_CENTER,
                             SERVO_CENTER)

        out = []
        if self.ticks % STATUS_DECIMATION == 0:
            out.append(self._status())
        out.append(servo)
        return out

    def _update_xte(self) -> None:
        if self.mission is None or self.nav is None:
            return
        idx = self.nav.current_wp_index
        if 1 <= idx < len(self.wp_ned):
            prev, nxt = self.wp_ned[idx - 1], self.wp_ned[idx]
            try:
                self._last_xte = crosstrack_error(
                    (prev[0], prev[1]), (nxt[0], nxt[1]),
                    (self.nav.position[0], self.nav.position[1]))
            except DegenerateLeg:
                self._last_xte = 0.0
        else:
            self._last_xte = 0.0
