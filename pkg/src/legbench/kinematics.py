"""Forward kinematics, the foot-tip Jacobian and closed-form inverse kinematics."""

from __future__ import annotations

import warnings
from math import atan2, cos, pi, sin, sqrt

import numpy as np

from .params import LegGeometry

#: Distance (m) from a workspace boundary below which IK flags near-singularity.
NEAR_SINGULAR_TOL = 1e-6


class Unreachable(ValueError):
    """Target foot position lies outside the leg's workspace."""

    def __init__(self, p):
        super().__init__(f"foot position {tuple(float(v) for v in p)} is unreachable")
        self.p = np.asarray(p, dtype=float)


class NearSingularWarning(RuntimeWarning):
    """IK target lies within ``NEAR_SINGULAR_TOL`` of a workspace boundary."""


def forward_kinematics(q, geom: LegGeometry) -> np.ndarray:
    """Foot-tip position ``(x, y, z)`` in the base frame."""
    t1, t2, t3 = q
    s1, c1 = sin(t1), cos(t1)
    c2, s2 = cos(t2), sin(t2)
    c23, s23 = cos(t2 + t3), sin(t2 + t3)
    reach = geom.l2 * c2 + geom.l3 * c23
    return np.array(
        [
            -geom.l1 * s1 + reach * c1,
            geom.l1 * c1 + reach * s1,
            geom.l2 * s2 + geom.l3 * s23,
        ]
    )


def jacobian(q, geom: LegGeometry) -> np.ndarray:
    """Analytic 3x3 Jacobian ``d(x, y, z) / d(theta1, theta2, theta3)``."""
    t1, t2, t3 = q
    l1, l2, l3 = geom.l1, geom.l2, geom.l3
    s1, c1 = sin(t1), cos(t1)
    c2, s2 = cos(t2), sin(t2)
    c23, s23 = cos(t2 + t3), sin(t2 + t3)
    return np.array(
        [
            [
                -l1 * c1 - l2 * s1 * c2 - l3 * s1 * c23,
                -l2 * c1 * s2 - l3 * c1 * s23,
                -l3 * c1 * s23,
            ],
            [
                -l1 * s1 + l2 * c1 * c2 + l3 * c1 * c23,
                -l2 * s1 * s2 - l3 * s1 * s23,
                -l3 * s1 * s23,
            ],
            [0.0, l2 * c2 + l3 * c23, l3 * c23],
        ]
    )


def wrap_angle(a: float) -> float:
    """Wrap to the half-open interval (-pi, pi]."""
    w = atan2(sin(a), cos(a))
    return pi if w == -pi else w


def inverse_kinematics(p, geom: LegGeometry, branch: int = -1) -> np.ndarray:
    """Joint angles placing the foot at ``p``.

    Parameters
    ----------
    p : array_like, shape (3,)
        Target foot position in the base frame [m].
    geom : LegGeometry
    branch : {-1, +1}
        Sign of the knee angle ``theta3``. The default ``-1`` selects
        ``theta3 <= 0``.

    Returns
    -------
    numpy.ndarray
        ``(theta1, theta2, theta3)`` wrapped to (-pi, pi]. The planar reach
        of the leg after the hip-yaw rotation is taken non-negative.

    Raises
    ------
    Unreachable
        If ``p`` is outside the workspace. A :class:`NearSingularWarning`
        is emitted (not raised) for targets on the workspace boundary.
    """
    if branch not in (-1, 1):
        raise ValueError(f"branch must be -1 or +1, got {branch}")
    x, y, z = (float(v) for v in p)
    l1, l2, l3 = geom.l1, geom.l2, geom.l3
    rho2 = x * x + y * y - l1 * l1
    if rho2 < 0.0:
        raise Unreachable(p)
    A = sqrt(rho2)
    r = sqrt(A * A + z * z)
    r_min, r_max = abs(l2 - l3), l2 + l3
    if r > r_max or r < r_min:
        raise Unreachable(p)
    if r - r_min < NEAR_SINGULAR_TOL or r_max - r < NEAR_SINGULAR_TOL:
        warnings.warn(
            f"IK target {(x, y, z)} is within {NEAR_SINGULAR_TOL} m of a workspace boundary",
            NearSingularWarning,
            stacklevel=2,
        )
    c3 = (A * A + z * z - l2 * l2 - l3 * l3) / (2.0 * l2 * l3)
    c3 = min(1.0, max(-1.0, c3))
    t3 = branch * atan2(sqrt(max(0.0, 1.0 - c3 * c3)), c3)
    t2 = atan2(z, A) - atan2(l3 * sin(t3), l2 + l3 * cos(t3))
    t1 = atan2(y, x) - atan2(l1, A)
    return np.array([wrap_angle(t1), wrap_angle(t2), wrap_angle(t3)])
