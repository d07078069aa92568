"""Trapezoidal arc-length profile and the semi-elliptical swing path."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import cos, pi, sin

import numpy as np

from .kinematics import inverse_kinematics, jacobian
from .params import LegGeometry

# slack for grid times that land a rounding error outside [0, t_f]
_DOMAIN_EPS = 1e-12
SINGULAR_DET_TOL = 1e-9
JDOT_STEP = 1e-5


class OutOfDomain(ValueError):
    pass


class SingularJacobian(ArithmeticError):
    pass


@dataclass(frozen=True)
class TrapezoidProfile:
    """Accelerate / cruise / decelerate profile of the path parameter.

    Cruise speed is ``a * t_a`` so that position and speed are continuous at
    both breakpoints.
    """

    a: float = 0.1
    t_a: float = 0.5
    t_f: float = 3.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"a must be > 0, got {self.a}")
        if not (0 < self.t_a <= self.t_f / 2):
            raise ValueError(f"need 0 < t_a <= t_f/2, got t_a={self.t_a}, t_f={self.t_f}")

    @property
    def v(self) -> float:
        return self.a * self.t_a

    @property
    def total_length(self) -> float:
        return self.v * (self.t_f - self.t_a)


def _check_time(t: float, t_f: float) -> float:
    if t < -_DOMAIN_EPS or t > t_f + _DOMAIN_EPS or t != t:
        raise OutOfDomain(f"t = {t} outside [0, {t_f}]")
    return min(max(t, 0.0), t_f)


def profile_branches(p: TrapezoidProfile, t: float) -> list[tuple[float, float]]:
    """``(s, s_dot)`` from each of the three pieces evaluated at ``t``.

    Used to measure continuity at the breakpoints.
    """
    a, v, t_f = p.a, p.v, p.t_f
    dt = t - t_f
    return [
        (0.5 * a * t * t, a * t),
        (v * (t - 0.5 * p.t_a), v),
        (p.total_length - 0.5 * a * dt * dt, -a * dt),
    ]


def profile_eval(p: TrapezoidProfile, t: float) -> tuple[float, float, float]:
    """Return ``(s, s_dot, s_ddot)`` at time ``t``."""
    t = _check_time(t, p.t_f)
    a, v, t_a, t_f = p.a, p.v, p.t_a, p.t_f
    if t <= t_a:
        return 0.5 * a * t * t, a * t, a
    if t <= t_f - t_a:
        return v * (t - 0.5 * t_a), v, 0.0
    dt = t - t_f
    return p.total_length - 0.5 * a * dt * dt, -a * dt, -a


@dataclass(frozen=True)
class PathSample:
    t: float
    pos: np.ndarray
    vel: np.ndarray
    acc: np.ndarray


@dataclass(frozen=True)
class JointReference:
    q_d: np.ndarray
    qd_d: np.ndarray
    qdd_d: np.ndarray


@dataclass(frozen=True)
class SwingPathSpec:
    """Semi-elliptical swing of length ``S`` and height ``H`` about a centre.

    The default centre puts the start of the swing at (-0.65, 0.12, -0.1).
    Construction verifies by IK that the whole path lies in the workspace of
    ``geom``.
    """

    S: float = 0.1
    H: float = 0.05
    center: tuple[float, float, float] = (-0.6, 0.12, -0.1)
    profile: TrapezoidProfile = field(default_factory=TrapezoidProfile)
    geom: LegGeometry = field(default_factory=LegGeometry, compare=False, repr=False)
    check_samples: int = field(default=301, compare=False, repr=False)

    def __post_init__(self):
        if not self.S > 0:
            raise ValueError(f"S must be > 0, got {self.S}")
        if not self.H > 0:
            raise ValueError(f"H must be > 0, got {self.H}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        for t in np.linspace(0.0, self.profile.t_f, self.check_samples):
            inverse_kinematics(swing_path_eval(self, float(t)).pos, self.geom)

    @classmethod
    def starting_at(cls, start, S: float = 0.1, H: float = 0.05, **kw) -> "SwingPathSpec":
        """Path whose t = 0 point is ``start``."""
        x0, y0, z0 = start
        return cls(S=S, H=H, center=(x0 + S / 2, y0, z0), **kw)

    @property
    def start(self) -> np.ndarray:
        xc, yc, zc = self.center
        return np.array([xc - self.S / 2, yc, zc])


def swing_path_eval(spec: SwingPathSpec, t: float) -> PathSample:
    s, sd, sdd = profile_eval(spec.profile, t)
    s_f = spec.profile.total_length
    phi = pi * (1.0 - s / s_f)
    phid = -pi * sd / s_f
    phidd = -pi * sdd / s_f
    xc, yc, zc = spec.center
    half = spec.S / 2
    H = spec.H
    c, sn = cos(phi), sin(phi)
    pos = np.array([xc + half * c, yc, zc + H * sn])
    vel = np.array([-half * sn * phid, 0.0, H * c * phid])
    acc = np.array(
        [
            -half * (c * phid * phid + sn * phidd),
            0.0,
            H * (-sn * phid * phid + c * phidd),
        ]
    )
    return PathSample(t=float(t), pos=pos, vel=vel, acc=acc)


def _checked_jacobian(q, geom: LegGeometry) -> np.ndarray:
    J = jacobian(q, geom)
    det = np.linalg.det(J)
    if abs(det) < SINGULAR_DET_TOL:
        raise SingularJacobian(f"|det J| = {abs(det):.3e} at q = {q}")
    return J


def joint_reference(spec: SwingPathSpec, geom: LegGeometry, branch: int, t: float) -> JointReference:
    """Joint-space position, rate and acceleration along the swing path.

    ``dJ/dt`` is a central difference of ``J(q_d(t))`` with step
    ``JDOT_STEP`` seconds, one-sided at the ends of the path.
    """
    t = _check_time(t, spec.profile.t_f)
    sample = swing_path_eval(spec, t)
    q_d = inverse_kinematics(sample.pos, geom, branch)
    J = _checked_jacobian(q_d, geom)
    qd_d = np.linalg.solve(J, sample.vel)

    t_lo = max(0.0, t - JDOT_STEP)
    t_hi = min(spec.profile.t_f, t + JDOT_STEP)
    q_lo = inverse_kinematics(swing_path_eval(spec, t_lo).pos, geom, branch)
    q_hi = inverse_kinematics(swing_path_eval(spec, t_hi).pos, geom, branch)
    Jdot = (jacobian(q_hi, geom) - jacobian(q_lo, geom)) / (t_hi - t_lo)
    qdd_d = np.linalg.solve(J, sample.acc - Jdot @ qd_d)
    return JointReference(q_d=q_d, qd_d=qd_d, qdd_d=qdd_d)
