"""Sliding-mode, transpose-Jacobian and adaptive transpose-Jacobian control laws.

Every law is a pure step function. The adaptive controller threads its
gain accumulators and reference-model memory through an explicit
:class:`AtjState` value.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import dynamics_terms
from .kinematics import forward_kinematics, jacobian
from .params import JointState, LegGeometry, LegInertial
from .trajectory import JointReference, PathSample


def _diag3(x) -> np.ndarray:
    """Accept a scalar, a 3-vector or a 3x3 diagonal matrix; return the diagonal."""
    a = np.asarray(x, dtype=float)
    if a.ndim == 0:
        a = np.full(3, float(a))
    elif a.shape == (3, 3):
        if np.any(a - np.diag(np.diag(a))):
            raise ValueError("gain matrix must be diagonal")
        a = np.diag(a).copy()
    if a.shape != (3,):
        raise ValueError(f"expected scalar, 3-vector or 3x3 diagonal, got shape {a.shape}")
    return a


def _positive(name: str, a: np.ndarray, allow_zero: bool = False):
    bad = a < 0 if allow_zero else a <= 0
    if np.any(bad) or not np.all(np.isfinite(a)):
        raise ValueError(f"{name} entries must be {'>= 0' if allow_zero else '> 0'}, got {a}")


def sigmoid(s, phi: float):
    """Smooth odd saturation ``tanh(s / phi)`` standing in for ``sign(s)``."""
    if not phi > 0:
        raise ValueError(f"phi must be > 0, got {phi}")
    return np.tanh(np.asarray(s, dtype=float) / phi)


@dataclass(frozen=True)
class ControlCommand:
    tau: np.ndarray


# --------------------------------------------------------------------------
# Sliding mode control


@dataclass(frozen=True)
class SmcParams:
    """Sliding-mode gains.

    ``K`` is the switching gain in joint-acceleration units; ``None`` means
    ``K = eta`` (no model-uncertainty margin). ``phi`` is the boundary-layer
    width of the sigmoid.
    """

    lam: np.ndarray = field(default_factory=lambda: np.full(3, 10.0))
    eta: np.ndarray = field(default_factory=lambda: np.full(3, 10.0))
    K: np.ndarray | None = None
    phi: float = 0.01

    def __post_init__(self):
        lam, eta = _diag3(self.lam), _diag3(self.eta)
        K = eta.copy() if self.K is None else _diag3(self.K)
        _positive("lam", lam)
        _positive("eta", eta)
        _positive("K", K)
        if np.any(K < eta):
            raise ValueError(f"K must be >= eta componentwise, got K={K}, eta={eta}")
        if not self.phi > 0:
            raise ValueError(f"phi must be > 0, got {self.phi}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "K", K)


@dataclass(frozen=True)
class ControllerModel:
    """The controller's own copy of the leg model.

    ``uncertainty_factor`` is the mass/inertia scale relative to the plant
    (1.0 for an exact model).
    """

    geom: LegGeometry = field(default_factory=LegGeometry)
    inertial: LegInertial = field(default_factory=LegInertial)
    uncertainty_factor: float = 1.0

    def __post_init__(self):
        if not self.uncertainty_factor >= 0:
            raise ValueError(f"uncertainty_factor must be >= 0, got {self.uncertainty_factor}")


def sliding_surface(state: JointState, ref: JointReference, lam) -> np.ndarray:
    return (state.qd - ref.qd_d) + _diag3(lam) * (state.q - ref.q_d)


def smc_control(state: JointState, ref: JointReference, model: ControllerModel, p: SmcParams) -> ControlCommand:
    """Computed-torque sliding-mode law with a sigmoid boundary layer.

    ``tau = M_hat (qdd_d - lam * e_dot - K * tanh(s / phi)) + V_hat + G_hat``
    with ``e = q - q_d`` and ``s = e_dot + lam * e``. Setting ``ds/dt = 0``
    and solving the model for the torque gives the equivalent control; the
    switching term acts at the acceleration level, so with an exact model
    the surface obeys ``ds/dt = -K tanh(s / phi)``.
    """
    e = state.q - ref.q_d
    e_dot = state.qd - ref.qd_d
    s = e_dot + p.lam * e
    terms = dynamics_terms(state, model.geom, model.inertial)
    acc = ref.qdd_d - p.lam * e_dot - p.K * np.tanh(s / p.phi)
    return ControlCommand(tau=terms.M @ acc + terms.V + terms.G)


def smc_switching_gain(
    eta,
    plant_inertial: LegInertial,
    model: ControllerModel,
    refs: list[JointReference],
) -> np.ndarray:
    """``K = eta + F_un``, where ``F_un`` bounds the model's acceleration error.

    ``F_un`` is the componentwise maximum of ``|M_hat^-1 F_hat - M^-1 F|``
    with ``F = -(V + G)``, sampled over the supplied reference points.
    """
    eta = _diag3(eta)
    bound = np.zeros(3)
    for ref in refs:
        st = JointState(ref.q_d, ref.qd_d)
        true = dynamics_terms(st, model.geom, plant_inertial)
        est = dynamics_terms(st, model.geom, model.inertial)
        f_true = np.linalg.solve(true.M, -(true.V + true.G))
        f_est = np.linalg.solve(est.M, -(est.V + est.G))
        bound = np.maximum(bound, np.abs(f_est - f_true))
    return eta + bound


# --------------------------------------------------------------------------
# Transpose Jacobian


@dataclass(frozen=True)
class TjParams:
    Kp: np.ndarray = field(default_factory=lambda: np.full(3, 700.0))
    Kd: np.ndarray = field(default_factory=lambda: np.full(3, 7.0))

    def __post_init__(self):
        Kp, Kd = _diag3(self.Kp), _diag3(self.Kd)
        _positive("Kp", Kp)
        _positive("Kd", Kd)
        object.__setattr__(self, "Kp", Kp)
        object.__setattr__(self, "Kd", Kd)


def cartesian_errors(state: JointState, pos, vel, geom: LegGeometry):
    """Position and velocity errors ``(x_d - x, xdot_d - J qd)``."""
    J = jacobian(state.q, geom)
    e = np.asarray(pos) - forward_kinematics(state.q, geom)
    e_dot = np.asarray(vel) - J @ state.qd
    return e, e_dot, J


def tj_control(state: JointState, target: PathSample, geom: LegGeometry, p: TjParams) -> ControlCommand:
    e, e_dot, J = cartesian_errors(state, target.pos, target.vel, geom)
    return ControlCommand(tau=J.T @ (p.Kd * e_dot + p.Kp * e))


# --------------------------------------------------------------------------
# Adaptive transpose Jacobian


@dataclass(frozen=True)
class RefModelParams:
    """Second-order low-pass ``wn^2 / (s^2 + 2 zeta wn s + wn^2)``."""

    omega_n: float = 100.0
    zeta: float = 0.9

    def __post_init__(self):
        if not self.omega_n > 0:
            raise ValueError(f"omega_n must be > 0, got {self.omega_n}")
        if not (0 < self.zeta <= 1):
            raise ValueError(f"zeta must be in (0, 1], got {self.zeta}")


def ref_model_step(p: RefModelParams, u, state, dt: float):
    """Advance the reference model one RK4 step with the input held at ``u``.

    ``state`` is ``(pos, vel)``; each may be a scalar or a per-axis array.
    Returns the updated ``(pos, vel)``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    wn2 = p.omega_n * p.omega_n
    c = 2.0 * p.zeta * p.omega_n
    u = np.asarray(u, dtype=float)
    y, v = (np.asarray(x, dtype=float) for x in state)

    def f(y, v):
        return v, wn2 * (u - y) - c * v

    k1y, k1v = f(y, v)
    k2y, k2v = f(y + 0.5 * dt * k1y, v + 0.5 * dt * k1v)
    k3y, k3v = f(y + 0.5 * dt * k2y, v + 0.5 * dt * k2v)
    k4y, k4v = f(y + dt * k3y, v + dt * k3v)
    y_new = y + dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
    v_new = v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return y_new, v_new


@dataclass(frozen=True)
class AtjParams:
    """Adaptation weights, leakage rates and control period.

    With ``per_axis=True`` the gains become diagonal, ``K_ii`` driven by
    ``Gamma_ii * e_i**2``; the default uses the scalar quadratic forms.
    """

    Gamma_pp: np.ndarray = field(default_factory=lambda: np.array([20000.0, 20000.0, 40000.0]))
    Gamma_pI: np.ndarray = field(default_factory=lambda: np.array([20000.0, 20000.0, 40000.0]))
    Gamma_dp: np.ndarray = field(default_factory=lambda: np.array([300.0, 3000.0, 200.0]))
    Gamma_dI: np.ndarray = field(default_factory=lambda: np.array([300.0, 3000.0, 200.0]))
    delta_p: float = 0.04
    delta_d: float = 0.04
    dt: float = 1e-3
    ref_model: RefModelParams = field(default_factory=RefModelParams)
    per_axis: bool = False

    def __post_init__(self):
        for name in ("Gamma_pp", "Gamma_pI", "Gamma_dp", "Gamma_dI"):
            g = _diag3(getattr(self, name))
            _positive(name, g, allow_zero=True)
            object.__setattr__(self, name, g)
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        for name in ("delta_p", "delta_d"):
            d = getattr(self, name)
            if not (0 <= d < 1.0 / self.dt):
                raise ValueError(f"{name} must satisfy 0 <= {name} < 1/dt, got {d}")


@dataclass(frozen=True)
class AtjState:
    """Integral gain accumulators and reference-model memory."""

    K_pI: float | np.ndarray = 0.0
    K_dI: float | np.ndarray = 0.0
    ref_pos: np.ndarray = field(default_factory=lambda: np.zeros(3))
    ref_vel: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @classmethod
    def initial(cls, start_pos, per_axis: bool = False) -> "AtjState":
        """Zero accumulators, reference model resting at ``start_pos``."""
        zero = np.zeros(3) if per_axis else 0.0
        return cls(K_pI=zero, K_dI=zero, ref_pos=np.array(start_pos, dtype=float), ref_vel=np.zeros(3))


def _forcing(err: np.ndarray, gamma: np.ndarray, per_axis: bool):
    weighted = gamma * err * err
    return weighted if per_axis else float(weighted.sum())


def atj_update_gains(e, e_dot, p: AtjParams, st: AtjState):
    """One step of the adaptive PI gain law.

    The proportional parts are quadratic forms of the current errors; the
    integral parts follow the implicit-Euler recursion of the leaky
    integrator ``dK/dt = e^T Gamma e - delta K``:

        K_I(t) = F dt / (1 + delta dt) + K_I(t - dt) / (1 + delta dt)

    Returns ``(K_p, K_d, new_state)``.
    """
    e = np.asarray(e, dtype=float)
    e_dot = np.asarray(e_dot, dtype=float)
    dt = p.dt
    K_pp = _forcing(e, p.Gamma_pp, p.per_axis)
    K_dp = _forcing(e_dot, p.Gamma_dp, p.per_axis)
    den_p = 1.0 + p.delta_p * dt
    den_d = 1.0 + p.delta_d * dt
    K_pI = _forcing(e, p.Gamma_pI, p.per_axis) * (dt / den_p) + st.K_pI * (1.0 / den_p)
    K_dI = _forcing(e_dot, p.Gamma_dI, p.per_axis) * (dt / den_d) + st.K_dI * (1.0 / den_d)
    return K_pp + K_pI, K_dp + K_dI, replace(st, K_pI=K_pI, K_dI=K_dI)


@dataclass(frozen=True)
class AtjOutput:
    command: ControlCommand
    state: AtjState
    K_p: float | np.ndarray
    K_d: float | np.ndarray
    corrected_pos: np.ndarray
    corrected_vel: np.ndarray


def atj_step(state: JointState, raw_target: PathSample, geom: LegGeometry, p: AtjParams, st: AtjState) -> AtjOutput:
    """:func:`atj_control` plus the internals a simulation log records."""
    ref_pos, ref_vel = ref_model_step(p.ref_model, raw_target.pos, (st.ref_pos, st.ref_vel), p.dt)
    e, e_dot, J = cartesian_errors(state, ref_pos, ref_vel, geom)
    K_p, K_d, st = atj_update_gains(e, e_dot, p, st)
    st = replace(st, ref_pos=ref_pos, ref_vel=ref_vel)
    tau = J.T @ (K_d * e_dot + K_p * e)
    return AtjOutput(ControlCommand(tau), st, K_p, K_d, ref_pos, ref_vel)


def atj_control(
    state: JointState, raw_target: PathSample, geom: LegGeometry, p: AtjParams, st: AtjState
) -> tuple[ControlCommand, AtjState]:
    """Adaptive transpose-Jacobian law.

    The raw target position is first passed through the reference model to
    give the corrected desired path and its rate; the Cartesian errors
    against it drive both the adaptive gains and the torque
    ``J^T (K_d(t) e_dot + K_p(t) e)``.
    """
    out = atj_step(state, raw_target, geom, p, st)
    return out.command, out.state
