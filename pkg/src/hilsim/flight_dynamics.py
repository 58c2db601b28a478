"""Fixed-wing rigid-body plant: the "process" side of the HIL loop.

A linear stability-derivative 6-DOF model (Euler-angle attitude, body-frame
forces) integrated with fixed-step RK4. State is 12 scalars plus time:

    position NED (north, east, down)   m
    velocity body (u, v, w)            m/s
    attitude (roll, pitch, yaw)        rad
    angular rate body (p, q, r)        rad/s

Forces/moments follow the usual nondimensional form about trim:

    L = qbar*S*(CL0 + CL_alpha*alpha)          D = qbar*S*(CD0 + k*CL^2)
    m = qbar*S*c*(Cm0 + Cm_alpha*alpha + Cm_q*(c/2V)*q + Cm_delta_e*de)
    l = qbar*S*b*(Cl_beta*beta + Cl_p*(b/2V)*p + Cl_delta_a*da)
    n = qbar*S*b*(Cn_beta*beta + Cn_r*(b/2V)*r + Cn_delta_r*dr)

Control derivatives are per unit of normalized deflection and are signed so
a positive command produces a positive body moment. Everything here is
deterministic pure functions over value types; the harness owns the loop.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from importlib import resources

log = logging.getLogger(__name__)

MAX_DT = 0.1
PITCH_LIMIT = math.pi / 2.0 - 0.01
CL_MAX = 1.4  # linear-lift validity bound used by the trim stall guard


class NonFiniteState(ArithmeticError):
    """A dynamics derivative evaluated to NaN/Inf (plant or config blow-up)."""


class StepTooLarge(ValueError):
    """dt exceeds the integrator validity bound."""


class TrimNotFound(RuntimeError):
    """No steady flight condition within tolerance for the requested point."""


def _wrap_pi(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class RigidBodyState:
    """12-state truth of the airframe plus scenario time."""
    position: tuple[float, float, float]           # NED m
    velocity_body: tuple[float, float, float]      # u, v, w m/s
    attitude: tuple[float, float, float]           # roll, pitch, yaw rad
    angular_rate_body: tuple[float, float, float]  # p, q, r rad/s
    time: float = 0.0

    @property
    def airspeed(self) -> float:
        u, v, w = self.velocity_body
        return math.sqrt(u * u + v * v + w * w)

    @property
    def altitude_agl(self) -> float:
        """Height above the NED origin plane (positive up)."""
        return -self.position[2]


@dataclass(frozen=True)
class ControlSurfaces:
    """Normalized actuator deflections; surfaces [-1, 1], throttle [0, 1]."""
    aileron: float = 0.0
    elevator: float = 0.0
    rudder: float = 0.0
    throttle: float = 0.0

    def clamped(self) -> "ControlSurfaces":
        c = lambda x, lo, hi: min(max(x, lo), hi)
        return ControlSurfaces(
            aileron=c(self.aileron, -1.0, 1.0),
            elevator=c(self.elevator, -1.0, 1.0),
            rudder=c(self.rudder, -1.0, 1.0),
            throttle=c(self.throttle, 0.0, 1.0),
        )


@dataclass(frozen=True)
class StabilityDerivatives:
    """Nondimensional aerodynamic coefficient set (per rad / per unit input)."""
    CL0: float
    CL_alpha: float
    CD0: float
    k_induced: float
    Cm0: float
    Cm_alpha: float
    Cm_q: float
    Cm_delta_e: float
    Cl_beta: float
    Cl_p: float
    Cl_delta_a: float
    Cn_beta: float
    Cn_r: float
    Cn_delta_r: float
    CY_beta: float


@dataclass(frozen=True)
class AirframeConfig:
    mass: float                                  # kg
    wing_span: float                             # m
    wing_area: float                             # m^2
    inertia_diag: tuple[float, float, float]     # Ixx, Iyy, Izz kg m^2
    max_thrust: float                            # N
    stability_derivatives: StabilityDerivatives
    air_density: float = 1.225                   # kg/m^3
    gravity: float = 9.81                        # m/s^2

    def __post_init__(self) -> None:
        if self.mass <= 0 or self.wing_area <= 0 or self.air_density <= 0:
            raise ValueError("mass, wing_area, air_density must be positive")
        if any(i <= 0 for i in self.inertia_diag):
            raise ValueError("inertia_diag must be positive")

    @property
    def chord(self) -> float:
        return self.wing_area / self.wing_span

    @classmethod
    def from_dict(cls, d: dict) -> "AirframeConfig":
        return cls(
            mass=float(d["mass"]),
            wing_span=float(d["wing_span"]),
            wing_area=float(d["wing_area"]),
            inertia_diag=tuple(float(x) for x in d["inertia_diag"]),
            max_thrust=float(d["max_thrust"]),
            stability_derivatives=StabilityDerivatives(
                **{k: float(v) for k, v in d["stability_derivatives"].items()}),
            air_density=float(d.get("air_density", 1.225)),
            gravity=float(d.get("gravity", 9.81)),
        )

    @classmethod
    def from_json(cls, path: str) -> "AirframeConfig":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def default_airframe() -> AirframeConfig:
    """The shipped 1.8 m / 4.5 kg trainer (data/trainer_1m8.json)."""
    text = resources.files("hilsim").joinpath("data/trainer_1m8.json").read_text()
    return AirframeConfig.from_dict(json.loads(text))


# --- equations of motion -----------------------------------------------------

def _derivatives(s: tuple, controls: ControlSurfaces, cfg: AirframeConfig,
                 wind_ned: tuple[float, float, float]) -> tuple:
    """Time derivative of the flat 12-state tuple."""
    (north, east, down, u, v, w, roll, pitch, yaw, p, q, r) = s
    d = cfg.stability_derivatives
    m = cfg.mass
    ixx, iyy, izz = cfg.inertia_diag

    sphi, cphi = math.sin(roll), math.cos(roll)
    sth, cth = math.sin(pitch), math.cos(pitch)
    spsi, cpsi = math.sin(yaw), math.cos(yaw)

    # body <- NED rotation rows (Z-Y-X Euler)
    r11, r12, r13 = cth * cpsi, cth * spsi, -sth
    r21 = sphi * sth * cpsi - cphi * spsi
    r22 = sphi * sth * spsi + cphi * cpsi
    r23 = sphi * cth
    r31 = cphi * sth * cpsi + sphi * spsi
    r32 = cphi * sth * spsi - sphi * cpsi
    r33 = cphi * cth

    # air-relative velocity in body axes
    wn, we, wd = wind_ned
    ur = u - (r11 * wn + r12 * we + r13 * wd)
    vr = v - (r21 * wn + r22 * we + r23 * wd)
    wr = w - (r31 * wn + r32 * we + r33 * wd)
    va = math.sqrt(ur * ur + vr * vr + wr * wr)

    fx = fy = fz = 0.0
    ml = mm = mn = 0.0
    if va > 1e-9:
        alpha = math.atan2(wr, ur)
        beta = math.asin(max(-1.0, min(1.0, vr / va)))
        qbar_s = 0.5 * cfg.air_density * va * va * cfg.wing_area
        b, c = cfg.wing_span, cfg.chord
        b_2v = b / (2.0 * va)
        c_2v = c / (2.0 * va)

        cl = d.CL0 + d.CL_alpha * alpha
        cd = d.CD0 + d.k_induced * cl * cl
        lift = qbar_s * cl
        drag = qbar_s * cd
        ca, sa = math.cos(alpha), math.sin(alpha)
        fx = -drag * ca + lift * sa
        fz = -drag * sa - lift * ca
        fy = qbar_s * d.CY_beta * beta

        ml = qbar_s * b * (d.Cl_beta * beta + d.Cl_p * b_2v * p
                           + d.Cl_delta_a * controls.aileron)
        mm = qbar_s * c * (d.Cm0 + d.Cm_alpha * alpha + d.Cm_q * c_2v * q
                           + d.Cm_delta_e * controls.elevator)
        mn = qbar_s * b * (d.Cn_beta * beta + d.Cn_r * b_2v * r
                           + d.Cn_delta_r * controls.rudder)

    fx += controls.throttle * cfg.max_thrust
    g = cfg.gravity
    fx += -m * g * sth
    fy += m * g * sphi * cth
    fz += m * g * cphi * cth

    # translational kinematics: NED velocity = R^T * body velocity
    dn = r11 * u + r21 * v + r31 * w
    de = r12 * u + r22 * v + r32 * w
    dd = r13 * u + r23 * v + r33 * w

    du = r * v - q * w + fx / m
    dv = p * w - r * u + fy / m
    dw = q * u - p * v + fz / m

    droll = p + math.tan(pitch) * (q * sphi + r * cphi)
    dpitch = q * cphi - r * sphi
    dyaw = (q * sphi + r * cphi) / cth

    dp = (ml + (iyy - izz) * q * r) / ixx
    dq = (mm + (izz - ixx) * p * r) / iyy
    dr = (mn + (ixx - iyy) * p * q) / izz

    return (dn, de, dd, du, dv, dw, droll, dpitch, dyaw, dp, dq, dr)


def _flat(state: RigidBodyState) -> tuple:
    return (*state.position, *state.velocity_body, *state.attitude,
            *state.angular_rate_body)


def step_dynamics(state: RigidBodyState, controls: ControlSurfaces,
                  config: AirframeConfig, dt: float,
                  wind_ned: tuple[float, float, float] = (0.0, 0.0, 0.0)
                  ) -> RigidBodyState:
    """Advance the plant one RK4 step. Deterministic; never emits NaN/Inf.

    dt = 0 returns the input state unchanged (time included). dt above
    MAX_DT raises StepTooLarge; a non-finite derivative raises
    NonFiniteState.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt > MAX_DT:
        raise StepTooLarge(f"dt={dt} exceeds {MAX_DT}")
    if dt == 0.0:
        return state

    controls = controls.clamped()
    y0 = _flat(state)
    k1 = _derivatives(y0, controls, config, wind_ned)
    k2 = _derivatives(tuple(a + 0.5 * dt * b for a, b in zip(y0, k1)),
                      controls, config, wind_ned)
    k3 = _derivatives(tuple(a + 0.5 * dt * b for a, b in zip(y0, k2)),
                      controls, config, wind_ned)
    k4 = _derivatives(tuple(a + dt * b for a, b in zip(y0, k3)),
                      controls, config, wind_ned)
    y1 = tuple(a + dt / 6.0 * (b + 2.0 * c + 2.0 * d + e)
               for a, b, c, d, e in zip(y0, k1, k2, k3, k4))

    if not all(math.isfinite(x) for x in y1):
        raise NonFiniteState("dynamics produced non-finite state")

    roll = _wrap_pi(y1[6])
    pitch = y1[7]
    yaw = _wrap_pi(y1[8])
    p, q, r = y1[9], y1[10], y1[11]

    if abs(pitch) > PITCH_LIMIT:
        # Euler singularity guard: clamp pitch and project away the outward
        # pitch-rate component so the state stays integrable.
        pitch = math.copysign(PITCH_LIMIT, pitch)
        sphi, cphi = math.sin(roll), math.cos(roll)
        dpitch = q * cphi - r * sphi
        if dpitch * pitch > 0:
            q -= dpitch * cphi
            r += dpitch * sphi
        if abs(state.attitude[1]) < PITCH_LIMIT:  # warn once per episode
            log.warning("pitch gimbal guard engaged at t=%.3f s", state.time + dt)

    return RigidBodyState(
        position=(y1[0], y1[1], y1[2]),
        velocity_body=(y1[3], y1[4], y1[5]),
        attitude=(roll, pitch, yaw),
        angular_rate_body=(p, q, r),
        time=state.time + dt,
    )


def total_energy(state: RigidBodyState, config: AirframeConfig) -> float:
    """Kinetic + rotational + potential mechanical energy (J)."""
    u, v, w = state.velocity_body
    p, q, r = state.angular_rate_body
    ixx, iyy, izz = config.inertia_diag
    ke = 0.5 * config.mass * (u * u + v * v + w * w)
    re = 0.5 * (ixx * p * p + iyy * q * q + izz * r * r)
    pe = config.mass * config.gravity * state.altitude_agl
    return ke + re + pe


# --- trim solver -------------------------------------------------------------

def find_trim(config: AirframeConfig, airspeed: float, altitude: float,
              tol: float = 1e-6, max_iter: int = 60
              ) -> tuple[RigidBodyState, ControlSurfaces]:
    """Solve for steady wings-level flight at the given airspeed/altitude.

    Newton iteration on (alpha, elevator, throttle) driving the body
    acceleration residuals (udot, wdot, qdot) to zero; lateral states are
    zero by symmetry. Raises TrimNotFound below the stall boundary or if
    the residual tolerance is unreachable in the iteration budget.
    """
    if airspeed <= 0:
        raise TrimNotFound("airspeed must be positive")
    d = config.stability_derivatives
    qbar_s = 0.5 * config.air_density * airspeed * airspeed * config.wing_area
    cl_req = config.mass * config.gravity / qbar_s if qbar_s > 0 else math.inf
    if cl_req > CL_MAX:
        raise TrimNotFound(
            f"required CL {cl_req:.2f} exceeds {CL_MAX} at {airspeed} m/s (stall)")

    def build(x: tuple[float, float, float]
              ) -> tuple[RigidBodyState, ControlSurfaces]:
        alpha, elevator, throttle = x
        state = RigidBodyState(
            position=(0.0, 0.0, -altitude),
            velocity_body=(airspeed * math.cos(alpha), 0.0,
                           airspeed * math.sin(alpha)),
            attitude=(0.0, alpha, 0.0),  # level flight path: theta = alpha
            angular_rate_body=(0.0, 0.0, 0.0),
            time=0.0,
        )
        return state, ControlSurfaces(0.0, elevator, 0.0, throttle)

    def residual(x: tuple[float, float, float]) -> tuple[float, float, float]:
        state, controls = build(x)
        der = _derivatives(_flat(state), controls, config, (0.0, 0.0, 0.0))
        return der[3], der[5], der[10]  # udot, wdot, qdot

    alpha0 = (cl_req - d.CL0) / d.CL_alpha if d.CL_alpha > 0 else 0.0
    x = (max(-0.3, min(0.3, alpha0)), 0.0, 0.3)
    h = 1e-6
    for _ in range(max_iter):
        f = residual(x)
        if max(abs(v) for v in f) < tol:
            break
        # numeric Jacobian, forward differences
        jac = []
        for j in range(3):
            xp = list(x)
            xp[j] += h
            fp = residual(tuple(xp))
            jac.append([(fp[i] - f[i]) / h for i in range(3)])
        # solve J^T is column-major above; rebuild row-major and invert 3x3
        a = [[jac[j][i] for j in range(3)] for i in range(3)]
        det = (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
               - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
               + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
        if abs(det) < 1e-12:
            raise TrimNotFound("singular Jacobian in trim iteration")
        inv = [
            [(a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det,
             (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det,
             (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det],
            [(a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det,
             (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det,
             (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det],
            [(a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det,
             (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det,
             (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det],
        ]
        step = [sum(inv[i][k] * f[k] for k in range(3)) for i in range(3)]
        # damped update keeps throttle/elevator in their physical boxes
        x = (x[0] - step[0], x[1] - step[1], x[2] - step[2])
        x = (max(-0.5, min(0.5, x[0])),
             max(-1.0, min(1.0, x[1])),
             max(0.0, min(1.0, x[2])))
    else:
        raise TrimNotFound("trim iteration budget exhausted")

    state, controls = build(x)
    der = _derivatives(_flat(state), controls, config, (0.0, 0.0, 0.0))
    lin = math.sqrt(der[3] ** 2 + der[4] ** 2 + der[5] ** 2)
    ang = math.sqrt(der[9] ** 2 + der[10] ** 2 + der[11] ** 2)
    if lin >= 1e-3 or ang >= 1e-3:
        raise TrimNotFound(f"trim residual too large: lin={lin:.2e} ang={ang:.2e}")
    return state, controls


# --- wind --------------------------------------------------------------------

@dataclass
class WindModel:
    """Constant mean wind plus Ornstein-Uhlenbeck gusts per NED axis.

    Defaults to zero everywhere; step(rng, dt) advances the gust state with
    an explicit generator so runs stay reproducible.
    """
    mean_ned: tuple[float, float, float] = (0.0, 0.0, 0.0)
    gust_sd: float = 0.0
    gust_tau: float = 2.0
    _gusts: list[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])

    def step(self, rng, dt: float) -> tuple[float, float, float]:
        if self.gust_sd > 0.0:
            decay = math.exp(-dt / self.gust_tau)
            diff = self.gust_sd * math.sqrt(max(0.0, 1.0 - decay * decay))
            for i in range(3):
                self._gusts[i] = self._gusts[i] * decay + diff * rng.standard_normal()
        return (self.mean_ned[0] + self._gusts[0],
                self.mean_ned[1] + self._gusts[1],
                self.mean_ned[2] + self._gusts[2])
