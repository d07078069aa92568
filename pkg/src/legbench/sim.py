"""Fixed-step closed-loop simulation with zero-order-hold control."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import isfinite

import numpy as np

from .controllers import (
    AtjParams,
    AtjState,
    ControllerModel,
    SmcParams,
    TjParams,
    atj_step,
    smc_control,
    tj_control,
)
from .dynamics import ExternalWrench, _accel
from .kinematics import forward_kinematics, inverse_kinematics
from .params import JointState, LegParams
from .trajectory import PathSample, SwingPathSpec, joint_reference, swing_path_eval

BLOWUP_LIMIT = 1e6

#: Initial deviations from the desired start, metres (rows 0..5).
DEVIATIONS = (
    (0.0, 0.0, 0.0),
    (0.005, 0.001, -0.003),
    (0.010, 0.002, -0.006),
    (0.015, 0.003, -0.009),
    (0.020, 0.004, -0.012),
    (0.025, 0.005, -0.015),
)


class NumericalBlowup(ArithmeticError):
    pass


@dataclass(frozen=True)
class SimConfig:
    dt_control: float = 1e-3
    substeps: int = 4
    t_end: float = 3.0
    log_stride: int = 1

    def __post_init__(self):
        if not self.dt_control > 0:
            raise ValueError(f"dt_control must be > 0, got {self.dt_control}")
        if int(self.substeps) != self.substeps or self.substeps < 1:
            raise ValueError(f"substeps must be an integer >= 1, got {self.substeps}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if int(self.log_stride) != self.log_stride or self.log_stride < 1:
            raise ValueError(f"log_stride must be an integer >= 1, got {self.log_stride}")

    @property
    def n_ticks(self) -> int:
        return int(round(self.t_end / self.dt_control))


@dataclass(frozen=True)
class SmcSpec:
    params: SmcParams = field(default_factory=SmcParams)
    model: ControllerModel = field(default_factory=ControllerModel)
    name: str = field(default="SMC", init=False)


@dataclass(frozen=True)
class TjSpec:
    params: TjParams = field(default_factory=TjParams)
    name: str = field(default="TJ", init=False)


@dataclass(frozen=True)
class AtjSpec:
    params: AtjParams = field(default_factory=AtjParams)
    name: str = field(default="ATJ", init=False)


ControllerSpec = SmcSpec | TjSpec | AtjSpec


@dataclass(frozen=True)
class Scenario:
    controller: ControllerSpec
    path: SwingPathSpec = field(default_factory=SwingPathSpec)
    deviation: tuple[float, float, float] = DEVIATIONS[4]
    uncertainty_pct: float = 0.0
    plant: LegParams = field(default_factory=LegParams)
    branch: int = -1

    def __post_init__(self):
        if not self.uncertainty_pct >= 0:
            raise ValueError(f"uncertainty_pct must be >= 0, got {self.uncertainty_pct}")
        object.__setattr__(self, "deviation", tuple(float(d) for d in self.deviation))

    @property
    def start(self) -> np.ndarray:
        """Actual initial foot position: desired start plus deviation."""
        return self.path.start + np.asarray(self.deviation)


@dataclass
class RunLog:
    """Time series of one closed-loop run.

    Array columns share the leading time axis. ``s`` is present only for
    SMC runs, ``xdc``/``kp``/``kd`` only for ATJ runs. A diverged run keeps
    the rows logged before divergence.
    """

    controller: str
    t: np.ndarray
    q: np.ndarray
    qd: np.ndarray
    x: np.ndarray
    xd: np.ndarray
    tau: np.ndarray
    s: np.ndarray | None = None
    xdc: np.ndarray | None = None
    kp: np.ndarray | None = None
    kd: np.ndarray | None = None
    diverged: bool = False
    message: str = ""

    def __len__(self) -> int:
        return len(self.t)

    @property
    def error(self) -> np.ndarray:
        """Cartesian tracking error ``x_d - x`` per row."""
        return self.xd - self.x


def perturb_controller_model(model: ControllerModel, pct: float) -> ControllerModel:
    """Scale the model's masses and inertias by ``1 + pct/100``."""
    if not pct >= 0:
        raise ValueError(f"pct must be >= 0, got {pct}")
    if pct == 0:
        return model
    factor = 1.0 + pct / 100.0
    return replace(
        model,
        inertial=model.inertial.scaled(factor),
        uncertainty_factor=model.uncertainty_factor * factor,
    )


def _rk4(q, qd, tau, geom, inertial, h, f_t=None):
    a1 = _accel(q, qd, tau, geom, inertial, f_t)
    q2 = [q[i] + 0.5 * h * qd[i] for i in range(3)]
    v2 = [qd[i] + 0.5 * h * a1[i] for i in range(3)]
    a2 = _accel(q2, v2, tau, geom, inertial, f_t)
    q3 = [q[i] + 0.5 * h * v2[i] for i in range(3)]
    v3 = [qd[i] + 0.5 * h * a2[i] for i in range(3)]
    a3 = _accel(q3, v3, tau, geom, inertial, f_t)
    q4 = [q[i] + h * v3[i] for i in range(3)]
    v4 = [qd[i] + h * a3[i] for i in range(3)]
    a4 = _accel(q4, v4, tau, geom, inertial, f_t)
    h6 = h / 6.0
    q_new = [q[i] + h6 * (qd[i] + 2 * v2[i] + 2 * v3[i] + v4[i]) for i in range(3)]
    qd_new = [qd[i] + h6 * (a1[i] + 2 * a2[i] + 2 * a3[i] + a4[i]) for i in range(3)]
    for v in q_new + qd_new:
        if not (isfinite(v) and abs(v) <= BLOWUP_LIMIT):
            raise NumericalBlowup(f"state magnitude exceeded {BLOWUP_LIMIT:g}")
    return q_new, qd_new


def rk4_step(
    state: JointState, tau, wrench: ExternalWrench | None, params: LegParams, h: float
) -> JointState:
    """Classical RK4 step of the plant with ``tau`` held constant."""
    if not h > 0:
        raise ValueError(f"h must be > 0, got {h}")
    f_t = None
    if wrench is not None and np.any(wrench.f_t):
        f_t = np.asarray(wrench.f_t, dtype=float)
    q, qd = _rk4(
        state.q.tolist(), state.qd.tolist(), np.asarray(tau, dtype=float).tolist(),
        params.geom, params.inertial, h, f_t,
    )
    return JointState(np.array(q), np.array(qd))


def desired_sample(path: SwingPathSpec, t: float) -> PathSample:
    """Path sample, holding the end point at rest past the end of the swing."""
    t_f = path.profile.t_f
    if t <= t_f:
        return swing_path_eval(path, t)
    end = swing_path_eval(path, t_f)
    return PathSample(t=t, pos=end.pos, vel=np.zeros(3), acc=np.zeros(3))


def run_closed_loop(scenario: Scenario, cfg: SimConfig = SimConfig()) -> RunLog:
    """Simulate one scenario and log it.

    At each control tick the controller sees the sampled state and the
    desired path at that instant; its torque is held over ``substeps`` RK4
    steps. Divergence ends the run early with ``diverged=True``.

    Raises
    ------
    Unreachable
        If the deviated start cannot be reached.
    """
    geom, inertial = scenario.plant.geom, scenario.plant.inertial
    path = scenario.path
    ctrl = scenario.controller
    if isinstance(ctrl, SmcSpec):
        ctrl = replace(ctrl, model=perturb_controller_model(ctrl.model, scenario.uncertainty_pct))

    q = inverse_kinematics(scenario.start, geom, scenario.branch).tolist()
    qd = [0.0, 0.0, 0.0]

    atj_state = None
    if isinstance(ctrl, AtjSpec):
        if not np.isclose(ctrl.params.dt, cfg.dt_control, rtol=0, atol=1e-15):
            ctrl = replace(ctrl, params=replace(ctrl.params, dt=cfg.dt_control))
        atj_state = AtjState.initial(desired_sample(path, 0.0).pos, ctrl.params.per_axis)

    n = cfg.n_ticks
    h = cfg.dt_control / cfg.substeps
    rows: dict[str, list] = {k: [] for k in ("t", "q", "qd", "x", "xd", "tau", "s", "xdc", "kp", "kd")}
    diverged, message = False, ""

    for k in range(n + 1):
        t = k * cfg.dt_control
        state = JointState(np.array(q), np.array(qd))
        target = desired_sample(path, t)
        if isinstance(ctrl, SmcSpec):
            ref = joint_reference(path, ctrl.model.geom, scenario.branch, min(t, path.profile.t_f))
            if t > path.profile.t_f:
                ref = replace(ref, qd_d=np.zeros(3), qdd_d=np.zeros(3))
            tau = smc_control(state, ref, ctrl.model, ctrl.params).tau
            extra = {"s": (state.qd - ref.qd_d) + ctrl.params.lam * (state.q - ref.q_d)}
        elif isinstance(ctrl, TjSpec):
            tau = tj_control(state, target, geom, ctrl.params).tau
            extra = {}
        else:
            out = atj_step(state, target, geom, ctrl.params, atj_state)
            atj_state = out.state
            tau = out.command.tau
            extra = {"xdc": out.corrected_pos, "kp": out.K_p, "kd": out.K_d}

        if k % cfg.log_stride == 0:
            rows["t"].append(t)
            rows["q"].append(state.q)
            rows["qd"].append(state.qd)
            rows["x"].append(forward_kinematics(state.q, geom))
            rows["xd"].append(target.pos)
            rows["tau"].append(tau)
            for key, val in extra.items():
                rows[key].append(val)
        if k == n:
            break
        tau_l = tau.tolist()
        try:
            for _ in range(cfg.substeps):
                q, qd = _rk4(q, qd, tau_l, geom, inertial, h)
        except NumericalBlowup as exc:
            diverged, message = True, f"t={t:.6f}: {exc}"
            break

    def col(key):
        return np.array(rows[key]) if rows[key] else None

    return RunLog(
        controller=ctrl.name,
        t=np.array(rows["t"]),
        q=col("q"),
        qd=col("qd"),
        x=col("x"),
        xd=col("xd"),
        tau=col("tau"),
        s=col("s"),
        xdc=col("xdc"),
        kp=col("kp"),
        kd=col("kd"),
        diverged=diverged,
        message=message,
    )
