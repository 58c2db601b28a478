"""The HIL conductor: owns the stepping loop, the autopilot process, fault
injection, telemetry, and mission metrics.

Timing model: plant at 100 Hz, control (sensor frames + servo reply) at
50 Hz, GPS at its own rate, STATUS consumed as it arrives. Every control
tick sends the sensor frames and then blocks for the matching SERVO frame
(positional lockstep), so a run with time_scale 0 and a fixed seed is
bit-reproducible; with time_scale > 0 the same exchange is paced against
the wall clock.

The harness also runs a shadow Autopilot instance fed the identical wire
messages. The shadow never steers anything; it reconstructs the
objectives for telemetry (they are not on the wire) and tracks the active
leg for crosstrack metrics, resynced from STATUS whenever frame loss makes
it drift.
"""

from __future__ import annotations

import math
import os
import subprocess
import sys
import time
from dataclasses import dataclass, asdict, replace

import numpy as np

from ..autopilot import (
    Autopilot, Mission, Waypoint, WaypointKind, DEFAULT_GAINS, PidGains,
    CONTROL_DT,
)
from ..flight_dynamics import (
    ControlSurfaces, WindModel, find_trim, step_dynamics,
)
from ..geodesy import geodetic_to_ned
from ..link import FrameLink, Listener, LinkClosed, LinkTimeout
from ..protocol import (
    AttitudeMsg, GpsMsg, MissionItemMsg, ServoMsg, SetGainsMsg, StatusMsg,
    MODE_COMPLETE, MODE_INIT, MODE_NAV,
    LOOP_HEADING, LOOP_PITCH, LOOP_ROLL, LOOP_SPEED,
    WP_FLYOVER, WP_LOITER,
)
from ..sensors import (
    AttitudeEstimate, GpsModel, GyroModel, SensorEnvironment,
    DEFAULT_HEADING_BLEND, estimate_roll_pitch, fuse_heading,
    thermopile_measure,
)
from ..autopilot import crosstrack_error, DegenerateLeg
from .scenario import FaultEvent, Scenario
from .telemetry_log import TelemetryRecord, TelemetryWriter

PLANT_DT = 0.01
PLANT_STEPS_PER_TICK = 2
LINK_REPLY_TIMEOUT = 2.0
CRASH_DESCENT_RATE = 3.0   # m/s
SERVO_CHANNELS = ("aileron", "elevator", "rudder", "throttle")

LOOP_IDS = {"ROLL": LOOP_ROLL, "PITCH": LOOP_PITCH,
            "HEADING": LOOP_HEADING, "SPEED": LOOP_SPEED}
LOOP_NAMES = {v: k for k, v in LOOP_IDS.items()}

FAULT_BIT = {"POWER_BROWNOUT": 0x01, "GPS_DROPOUT": 0x02, "SERVO_STUCK": 0x04,
             "GYRO_BIAS_JUMP": 0x08, "LINK_NOISE": 0x10}


class AutopilotSpawnFailure(RuntimeError):
    """The autopilot process could not be started or never connected."""


@dataclass
class SweepInjection:
    """Open-loop chirp override of one servo channel (other loops stay
    closed through the autopilot)."""
    axis: str                     # one of SERVO_CHANNELS
    samples: np.ndarray           # us offsets around the channel trim, 50 Hz
    start_time: float = 5.0

    def __post_init__(self) -> None:
        if self.axis not in SERVO_CHANNELS:
            raise ValueError(f"unknown sweep axis {self.axis!r}")


@dataclass
class RunReport:
    completed: bool
    waypoints_captured: int
    crosstrack_rms: float
    crosstrack_max: float
    altitude_rms_error: float
    crashed: bool
    landed: bool
    fault_log: list[dict]
    link_stats: dict
    wall_time: float
    sim_time: float

    def to_dict(self) -> dict:
        return asdict(self)


def _surfaces_from_servo(servo: ServoMsg) -> ControlSurfaces:
    return ControlSurfaces(
        aileron=(servo.aileron_us - 1500) / 500.0,
        elevator=(servo.elevator_us - 1500) / 500.0,
        rudder=(servo.rudder_us - 1500) / 500.0,
        throttle=(servo.throttle_us - 1000) / 1000.0,
    )


def trim_servo_us(controls: ControlSurfaces) -> dict[str, int]:
    return {
        "aileron": int(round(1500 + 500 * controls.aileron)),
        "elevator": int(round(1500 + 500 * controls.elevator)),
        "rudder": int(round(1500 + 500 * controls.rudder)),
        "throttle": int(round(1000 + 1000 * controls.throttle)),
    }


def mission_item_frames(mission: Mission) -> list[MissionItemMsg]:
    count = len(mission.waypoints)
    frames = []
    for i, wp in enumerate(mission.waypoints):
        frames.append(MissionItemMsg.from_physical(
            index=i,
            kind=WP_LOITER if wp.kind is WaypointKind.LOITER else WP_FLYOVER,
            lat=wp.latitude, lon=wp.longitude, alt=wp.altitude,
            loiter_radius=wp.loiter_radius if wp.kind is WaypointKind.LOITER else 0.0,
            count=count,
            loiter_duration_s=wp.loiter_duration,
        ))
    return frames


class _AutopilotProcess:
    """Spawn/kill/respawn of the isolated autopilot, plus its link.

    Frame/byte counters accumulate across restarts so a brownout does not
    erase the run's link statistics.
    """

    def __init__(self):
        self.listener = Listener()
        self.proc: subprocess.Popen | None = None
        self.link: FrameLink | None = None
        self.total_sent = 0
        self.total_received = 0
        self.total_corrupted = 0

    def _bank_stats(self) -> None:
        if self.link is not None:
            self.total_sent += self.link.stats.frames_sent
            self.total_received += self.link.stats.frames_received
            self.total_corrupted += self.link.stats.frames_corrupted

    def stats_dict(self) -> dict:
        sent = self.total_sent
        received = self.total_received
        corrupted = self.total_corrupted
        if self.link is not None:
            sent += self.link.stats.frames_sent
            received += self.link.stats.frames_received
            corrupted += self.link.stats.frames_corrupted
        return {
            "to_autopilot": {"frames_sent": sent},
            "from_autopilot": {"frames_received": received,
                               "frames_corrupted": corrupted},
        }

    def spawn(self) -> None:
        env = dict(os.environ)
        pkg_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
        env["PYTHONPATH"] = os.pathsep.join(
            [os.path.dirname(pkg_root)] +
            ([env["PYTHONPATH"]] if env.get("PYTHONPATH") else []))
        cmd = [sys.executable, "-m", "hilsim.autopilot_proc",
               self.listener.descriptor]
        try:
            self.proc = subprocess.Popen(cmd, env=env,
                                         stdout=subprocess.DEVNULL,
                                         stderr=subprocess.DEVNULL)
        except OSError as e:
            raise AutopilotSpawnFailure(str(e)) from e
        try:
            self.link = self.listener.accept(timeout=10.0)
        except OSError as e:
            raise AutopilotSpawnFailure(f"autopilot never connected: {e}") from e
        if self.proc.poll() is not None:
            raise AutopilotSpawnFailure(
                f"autopilot exited immediately (rc={self.proc.returncode})")

    def kill(self) -> None:
        self._bank_stats()
        if self.link is not None:
            self.link.close()
            self.link = None
        if self.proc is not None:
            self.proc.kill()
            self.proc.wait()
            self.proc = None

    def close(self) -> None:
        self.kill()
        self.listener.close()


class ScenarioRunner:
    """One scenario execution. Use run() or step through run_scenario()."""

    def __init__(self, scenario: Scenario, log_path: str | None = None,
                 server=None, sweep: SweepInjection | None = None):
        self.scenario = scenario
        self.log_path = log_path
        self.server = server
        self.sweep = sweep

        seq = np.random.SeedSequence(scenario.seed)
        s_sensor, s_link, s_wind = seq.spawn(3)
        self.sensor_rng = np.random.Generator(np.random.PCG64(s_sensor))
        self.link_rng = np.random.Generator(np.random.PCG64(s_link))
        self.wind_rng = np.random.Generator(np.random.PCG64(s_wind))

        self.env: SensorEnvironment = scenario.environment
        self.gps_model = GpsModel(env=self.env)
        self.gyro_model = GyroModel()
        self.wind = WindModel(mean_ned=scenario.wind_mean_ned,
                              gust_sd=scenario.wind_gust_sd)

        trim_state, trim_controls = find_trim(
            scenario.airframe, scenario.initial_airspeed,
            scenario.initial_altitude)
        self.state = trim_state
        self.trim_controls = trim_controls
        self.trim_us = trim_servo_us(trim_controls)
        self.controls = trim_controls
        self.estimate = AttitudeEstimate(0.0, trim_state.attitude[1], 0.0, 0.0)

        self.mission = scenario.mission
        self.wp_ned = [geodetic_to_ned(w.latitude, w.longitude, w.altitude,
                                       scenario.origin)
                       for w in self.mission.waypoints]

        self.proc = _AutopilotProcess()
        self.shadow = Autopilot()
        self.gains_echo = {LOOP_NAMES[k]: v for k, v in DEFAULT_GAINS.items()}

        self.tick = 0
        self.last_servo = ServoMsg(*(self.trim_us[c] for c in SERVO_CHANNELS))
        self.last_status: StatusMsg | None = None
        self.status_fault_flags_seen = 0
        self.max_wp_seen = 0
        self.paused = False
        self.time_scale = scenario.time_scale
        self._wall_anchor = None
        self._sim_anchor = 0.0

        self.pending_faults = sorted(scenario.faults, key=lambda f: f.at_time)
        self.active_faults: list[tuple[FaultEvent, float]] = []  # (event, end_time)
        self.fault_log: list[dict] = []
        self.fault_flags = 0
        self.brownout_until: float | None = None

        self._xte_sq_sum = 0.0
        self._xte_count = 0
        self.crosstrack_max = 0.0
        self._alt_sq_sum = 0.0
        self._alt_count = 0
        self.completed = False
        self.crashed = False
        self.landed = False

        self.writer = TelemetryWriter(log_path) if log_path else None

    # -- lifecycle ----------------------------------------------------------

    @property
    def sim_time(self) -> float:
        return self.tick * CONTROL_DT

    def start(self) -> None:
        self.proc.spawn()
        self._upload_mission()

    def _upload_mission(self) -> None:
        for frame in mission_item_frames(self.mission):
            self.proc.link.send(frame)
            self.shadow.handle_message(frame)

    def close(self) -> None:
        self.proc.close()
        if self.writer:
            self.writer.close()

    # -- faults ---------------------------------------------------------------

    def _activate_due_faults(self, t: float) -> None:
        while self.pending_faults and self.pending_faults[0].at_time <= t:
            event = self.pending_faults.pop(0)
            end = t + event.duration
            entry = {"time": event.at_time, "kind": event.kind, "effect": ""}
            if event.kind == "POWER_BROWNOUT":
                self.proc.kill()
                self.brownout_until = t + event.reset_delay
                end = self.brownout_until
                entry["effect"] = (f"autopilot killed; servos hold; cold restart "
                                   f"after {event.reset_delay:g} s")
            elif event.kind == "GPS_DROPOUT":
                self.gps_model.set_dropout(t, end)
                entry["effect"] = f"GPS fixes suppressed for {event.duration:g} s"
            elif event.kind == "SERVO_STUCK":
                entry["effect"] = (f"{event.channel} held at {event.value_us} us "
                                   f"for {event.duration:g} s")
            elif event.kind == "GYRO_BIAS_JUMP":
                self.gyro_model.bias += event.bias_jump
                entry["effect"] = f"gyro bias stepped by {event.bias_jump:g} rad/s"
                end = t  # instantaneous
            elif event.kind == "LINK_NOISE":
                entry["effect"] = (f"byte error rate {event.byte_error_rate:g} "
                                   f"for {event.duration:g} s")
            self.fault_log.append(entry)
            self.active_faults.append((event, end))
            self.fault_flags |= FAULT_BIT[event.kind]

    def _expire_faults(self, t: float) -> None:
        still = []
        for event, end in self.active_faults:
            if t <= end:
                still.append((event, end))
            elif event.kind == "POWER_BROWNOUT":
                self._restart_autopilot()
        self.active_faults = still
        self.fault_flags = 0
        for event, _ in still:
            self.fault_flags |= FAULT_BIT[event.kind]

    def _restart_autopilot(self) -> None:
        self.proc.spawn()
        self.shadow = Autopilot()
        self._upload_mission()
        self.brownout_until = None
        for entry in self.fault_log:
            if entry["kind"] == "POWER_BROWNOUT" and "restarted" not in entry["effect"]:
                entry["effect"] += "; restarted, mission re-uploaded, uptime reset"

    def _link_noise_rate(self) -> float:
        return max((e.byte_error_rate for e, _ in self.active_faults
                    if e.kind == "LINK_NOISE"), default=0.0)

    def _servo_stuck(self) -> dict[str, int]:
        return {e.channel: e.value_us for e, _ in self.active_faults
                if e.kind == "SERVO_STUCK"}

    # -- commands from the telemetry service ----------------------------------

    def apply_command(self, cmd: dict) -> dict:
        """Apply one GCS command; returns the acknowledgement object."""
        kind = cmd.get("type")
        if kind == "set_gains":
            loop_name = str(cmd["loop"]).upper()
            if loop_name not in LOOP_IDS:
                raise ValueError(f"unknown loop {loop_name!r}")
            loop_id = LOOP_IDS[loop_name]
            current = self.gains_echo[loop_name]
            gains = PidGains(kp=float(cmd["kp"]), ki=float(cmd["ki"]),
                             kd=float(cmd["kd"]),
                             output_min=current.output_min,
                             output_max=current.output_max,
                             integrator_limit=float(cmd["integrator_limit"]))
            msg = SetGainsMsg(loop_id=loop_id, kp=gains.kp, ki=gains.ki,
                              kd=gains.kd, integrator_limit=gains.integrator_limit)
            if self.proc.link is not None:
                self.proc.link.send(msg)
            self.shadow.handle_message(msg)
            self.gains_echo[loop_name] = gains
            return {"type": "ack", "command": "set_gains",
                    "applied": {"loop": loop_name, "kp": gains.kp,
                                "ki": gains.ki, "kd": gains.kd,
                                "integrator_limit": gains.integrator_limit}}
        if kind == "upload_mission":
            waypoints = []
            for w in cmd["waypoints"]:
                waypoints.append(Waypoint(
                    latitude=float(w["lat_deg"]), longitude=float(w["lon_deg"]),
                    altitude=float(w["alt_m"]),
                    capture_radius=float(w.get("capture_radius_m", 75.0)),
                    kind=WaypointKind(w.get("kind", "FLYOVER")),
                    loiter_radius=float(w.get("loiter_radius_m", 100.0)),
                    loiter_duration=float(w.get("loiter_duration_s", 0.0))))
            self.mission = Mission(
                waypoints=tuple(waypoints),
                cruise_speed=float(cmd.get("cruise_speed_mps",
                                           self.mission.cruise_speed)),
                crosstrack_enabled=bool(cmd.get("crosstrack",
                                                self.mission.crosstrack_enabled)))
            self.wp_ned = [geodetic_to_ned(w.latitude, w.longitude, w.altitude,
                                           self.scenario.origin)
                           for w in self.mission.waypoints]
            self._upload_mission()
            return {"type": "ack", "command": "upload_mission",
                    "applied": {"count": len(waypoints)}}
        if kind == "inject_fault":
            fault = FaultEvent(
                at_time=float(cmd.get("at_time_s", self.sim_time)),
                kind=str(cmd["kind"]),
                reset_delay=float(cmd.get("reset_delay_s", 2.0)),
                duration=float(cmd.get("duration_s", 0.0)),
                channel=str(cmd.get("channel", "elevator")),
                value_us=int(cmd.get("value_us", 1500)),
                bias_jump=float(cmd.get("bias_jump_rps", 0.0)),
                byte_error_rate=float(cmd.get("byte_error_rate", 0.0)))
            self.pending_faults.append(fault)
            self.pending_faults.sort(key=lambda f: f.at_time)
            return {"type": "ack", "command": "inject_fault",
                    "applied": {"kind": fault.kind, "at_time_s": fault.at_time}}
        if kind == "pause":
            self.paused = True
            return {"type": "ack", "command": "pause", "applied": {}}
        if kind == "resume":
            self.paused = False
            self._wall_anchor = None  # re-anchor pacing
            return {"type": "ack", "command": "resume", "applied": {}}
        if kind == "set_time_scale":
            value = float(cmd["value"])
            if value < 0:
                raise ValueError("time_scale must be non-negative")
            self.time_scale = value
            self._wall_anchor = None
            return {"type": "ack", "command": "set_time_scale",
                    "applied": {"value": value}}
        raise ValueError(f"unknown command type {kind!r}")

    def _poll_server(self) -> None:
        if self.server is None:
            return
        for cmd, reply in self.server.drain_commands():
            try:
                reply(self.apply_command(cmd))
            except (KeyError, TypeError, ValueError) as e:
                reply({"type": "error",
                       "command": str(cmd.get("type", "?")),
                       "reason": str(e)})

    # -- metrics ---------------------------------------------------------------

    def _update_metrics(self) -> None:
        status = self.last_status
        if status is None or status.mode == MODE_INIT:
            return
        idx = self.shadow.nav.current_wp_index if self.shadow.nav else \
            status.current_wp
        n = len(self.mission.waypoints)
        pos = self.state.position
        if status.mode == MODE_NAV and 1 <= idx < n:
            prev, nxt = self.wp_ned[idx - 1], self.wp_ned[idx]
            try:
                xte = crosstrack_error((prev[0], prev[1]), (nxt[0], nxt[1]),
                                       (pos[0], pos[1]))
            except DegenerateLeg:
                xte = 0.0
            self._xte_sq_sum += xte * xte
            self._xte_count += 1
            self.crosstrack_max = max(self.crosstrack_max, abs(xte))
        wp_down = self.wp_ned[min(idx, n - 1)][2]
        alt_err = pos[2] - wp_down
        self._alt_sq_sum += alt_err * alt_err
        self._alt_count += 1

    # -- one control tick --------------------------------------------------------

    def step_tick(self) -> bool:
        """Run one 50 Hz control tick. Returns False when the run is over."""
        t = self.sim_time
        if t >= self.scenario.duration_limit:
            return False

        self._activate_due_faults(t)
        self._expire_faults(t)

        # pacing against the wall clock
        if self.time_scale > 0:
            if self._wall_anchor is None:
                self._wall_anchor = time.perf_counter()
                self._sim_anchor = t
            target = self._wall_anchor + (t - self._sim_anchor) / self.time_scale
            delay = target - time.perf_counter()
            if delay > 0:
                time.sleep(delay)

        # sensor suite
        roll, pitch, yaw = self.state.attitude
        quad = thermopile_measure((roll, pitch), self.env, self.sensor_rng)
        roll_e, pitch_e = estimate_roll_pitch(
            quad, (self.env.sky_temperature, self.env.ground_temperature))
        gyro = self.gyro_model.sample(self.state.angular_rate_body[2],
                                      self.env, t, CONTROL_DT, self.sensor_rng)
        fix = self.gps_model.sample(self.state, self.scenario.origin, t,
                                    self.sensor_rng)
        heading_e = fuse_heading(self.estimate, gyro, fix, CONTROL_DT,
                                 DEFAULT_HEADING_BLEND)
        self.estimate = AttitudeEstimate(roll=roll_e, pitch=pitch_e,
                                         heading=heading_e, estimate_time=t)

        att_msg = AttitudeMsg.from_physical(roll_e, pitch_e, heading_e,
                                            gyro.yaw_rate)
        gps_msg = None
        if fix is not None:
            gps_msg = GpsMsg.from_physical(
                lat=fix.latitude, lon=fix.longitude, alt=fix.altitude,
                ground_speed=fix.ground_speed,
                course=math.radians(fix.course_over_ground),
                valid=fix.valid)

        # exchange with the autopilot (unless browned out)
        in_brownout = self.brownout_until is not None and t < self.brownout_until
        if not in_brownout and self.proc.link is not None:
            link = self.proc.link
            noisy = self._link_noise_rate()
            link.noise_rate = noisy
            link.noise_rng = self.link_rng if noisy > 0 else None
            try:
                if gps_msg is not None:
                    link.send(gps_msg)
                    self.shadow.handle_message(gps_msg)
                link.send(att_msg)
                # A corrupted frame means no reply this tick; under injected
                # noise that is expected degradation (hold last servo), not a
                # dead link.
                timeout = 0.25 if noisy > 0 else LINK_REPLY_TIMEOUT
                replies = link.read_until(
                    lambda m: isinstance(m, ServoMsg), timeout)
            except LinkTimeout:
                if noisy <= 0:
                    raise
                replies = []
            except LinkClosed as e:
                raise LinkTimeout(f"autopilot link lost at t={t:.2f}: {e}") from e
            self.shadow.handle_message(att_msg)
            for msg in replies:
                if isinstance(msg, ServoMsg):
                    self.last_servo = msg
                elif isinstance(msg, StatusMsg):
                    self._handle_status(msg)

        # servo overrides: stuck channels, then sweep injection
        servo_us = {c: getattr(self.last_servo, f"{c}_us")
                    for c in SERVO_CHANNELS}
        for channel, us in self._servo_stuck().items():
            servo_us[channel] = us
        if self.sweep is not None:
            k = int(round((t - self.sweep.start_time) / CONTROL_DT))
            if 0 <= k < len(self.sweep.samples):
                base = self.trim_us[self.sweep.axis]
                servo_us[self.sweep.axis] = int(
                    min(2000, max(1000, round(base + self.sweep.samples[k]))))
        applied = ServoMsg(*(servo_us[c] for c in SERVO_CHANNELS))
        self.controls = _surfaces_from_servo(applied)

        # telemetry row (state snapshot at t, estimates/commands/servo of t)
        objectives = self.shadow.last_objectives
        record = self._make_record(t, applied, fix, objectives)
        if self.writer:
            self.writer.write(record)
        if self.server is not None and self.tick % 3 == 0:
            # 50 Hz ticks decimated to ~16.7 Hz for the UI stream
            self.server.publish_telemetry(self._telemetry_json(record))

        self._update_metrics()

        # plant integration to t + 20 ms
        for _ in range(PLANT_STEPS_PER_TICK):
            wind = self.wind.step(self.wind_rng, PLANT_DT)
            self.state = step_dynamics(self.state, self.controls,
                                       self.scenario.airframe, PLANT_DT,
                                       wind_ned=wind)
        self.tick += 1

        # ground contact?
        if self.state.position[2] >= 0.0:
            u, v, w = self.state.velocity_body
            roll, pitch, _ = self.state.attitude
            descent = (-math.sin(pitch) * u
                       + math.sin(roll) * math.cos(pitch) * v
                       + math.cos(roll) * math.cos(pitch) * w)
            if descent > CRASH_DESCENT_RATE:
                self.crashed = True
            else:
                self.landed = True
            return False

        if self.completed:
            return False
        return True

    def _handle_status(self, status: StatusMsg) -> None:
        self.last_status = status
        self.status_fault_flags_seen |= status.fault_flags
        self.max_wp_seen = max(self.max_wp_seen, status.current_wp)
        if status.mode == MODE_COMPLETE:
            self.completed = True
        # resync the shadow if frame loss made it drift
        if self.shadow.nav is not None and \
                self.shadow.nav.current_wp_index != status.current_wp:
            self.shadow.nav = replace(self.shadow.nav,
                                      current_wp_index=status.current_wp,
                                      loiter_elapsed=None)

    def _make_record(self, t: float, servo: ServoMsg, fix, objectives
                     ) -> TelemetryRecord:
        s = self.state
        deg = math.degrees
        return TelemetryRecord(
            time_s=t,
            north_m=s.position[0], east_m=s.position[1], down_m=s.position[2],
            u_mps=s.velocity_body[0], v_mps=s.velocity_body[1],
            w_mps=s.velocity_body[2],
            roll_deg=deg(s.attitude[0]), pitch_deg=deg(s.attitude[1]),
            yaw_deg=deg(s.attitude[2]),
            p_dps=deg(s.angular_rate_body[0]),
            q_dps=deg(s.angular_rate_body[1]),
            r_dps=deg(s.angular_rate_body[2]),
            roll_est_deg=deg(self.estimate.roll),
            pitch_est_deg=deg(self.estimate.pitch),
            heading_est_deg=deg(self.estimate.heading),
            roll_cmd_deg=deg(objectives.roll_cmd) if objectives else 0.0,
            pitch_cmd_deg=deg(objectives.pitch_cmd) if objectives else 0.0,
            heading_cmd_deg=deg(objectives.heading_cmd) if objectives else 0.0,
            speed_cmd_mps=objectives.speed_cmd if objectives else 0.0,
            aileron_us=servo.aileron_us, elevator_us=servo.elevator_us,
            rudder_us=servo.rudder_us, throttle_us=servo.throttle_us,
            gps_lat_deg=fix.latitude if fix else None,
            gps_lon_deg=fix.longitude if fix else None,
            gps_alt_m=fix.altitude if fix else None,
            gps_speed_mps=fix.ground_speed if fix else None,
            gps_course_deg=fix.course_over_ground if fix else None,
            gps_valid=1 if fix else 0,
            fault_flags=self.fault_flags,
        )

    def _telemetry_json(self, r: TelemetryRecord) -> dict:
        status = self.last_status
        return {
            "type": "telemetry", "v": 1,
            "time_s": r.time_s,
            "truth": {"north_m": r.north_m, "east_m": r.east_m,
                      "down_m": r.down_m, "roll_deg": r.roll_deg,
                      "pitch_deg": r.pitch_deg, "yaw_deg": r.yaw_deg},
            "estimate": {"roll_deg": r.roll_est_deg,
                         "pitch_deg": r.pitch_est_deg,
                         "heading_deg": r.heading_est_deg},
            "objectives": {"roll_cmd_deg": r.roll_cmd_deg,
                           "pitch_cmd_deg": r.pitch_cmd_deg,
                           "heading_cmd_deg": r.heading_cmd_deg,
                           "speed_cmd_mps": r.speed_cmd_mps},
            "servo": {"aileron_us": r.aileron_us, "elevator_us": r.elevator_us,
                      "rudder_us": r.rudder_us, "throttle_us": r.throttle_us},
            "gps": None if not r.gps_valid else {
                "lat_deg": r.gps_lat_deg, "lon_deg": r.gps_lon_deg,
                "alt_m": r.gps_alt_m, "speed_mps": r.gps_speed_mps,
                "course_deg": r.gps_course_deg},
            "status": {
                "mode": status.mode if status else MODE_INIT,
                "current_wp": status.current_wp if status else 0,
                "crosstrack_m": status.crosstrack_m if status else 0.0,
                "fault_flags": self.fault_flags,
            },
            "gains": {name: {"kp": g.kp, "ki": g.ki, "kd": g.kd,
                             "integrator_limit": g.integrator_limit}
                      for name, g in self.gains_echo.items()},
        }

    # -- whole-run ------------------------------------------------------------

    def run(self) -> RunReport:
        wall_start = time.perf_counter()
        self.start()
        try:
            while True:
                self._poll_server()
                if self.paused:
                    time.sleep(0.02)
                    continue
                if not self.step_tick():
                    break
        finally:
            self.close()
        wall = time.perf_counter() - wall_start

        xte_rms = math.sqrt(self._xte_sq_sum / self._xte_count) \
            if self._xte_count else 0.0
        alt_rms = math.sqrt(self._alt_sq_sum / self._alt_count) \
            if self._alt_count else 0.0
        return RunReport(
            completed=self.completed,
            waypoints_captured=self.max_wp_seen,
            crosstrack_rms=xte_rms,
            crosstrack_max=self.crosstrack_max,
            altitude_rms_error=alt_rms,
            crashed=self.crashed,
            landed=self.landed,
            fault_log=self.fault_log,
            link_stats=self.proc.stats_dict(),
            wall_time=wall,
            sim_time=self.sim_time,
        )


def run_scenario(scenario: Scenario, log_path: str | None = None,
                 server=None, sweep: SweepInjection | None = None) -> RunReport:
    """Execute a scenario end to end and return its report."""
    return ScenarioRunner(scenario, log_path=log_path, server=server,
                          sweep=sweep).run()
