"""Euler-Lagrange dynamics of the 3-link leg.

The Lagrangian is ``T - U`` with

    T = sum_i 1/2 m_i |v_ci|^2 + 1/2 I1 w1^2 + 1/2 I2 w2^2 + 1/2 I3 (w2 + w3)^2
    U = sum_i m_i g z_ci

where the link centres of mass ``c_i`` lie on the same chain as the foot
kinematics, at distances ``lc_i`` along each link, and gravity acts along -z
of the base frame. Writing each COM as a yaw rotation of a local
``(reach, lateral, height)`` vector makes the mass matrix independent of the
hip-yaw angle and gives the closed forms below. ``V`` is built from the
Christoffel symbols of ``M`` so that ``dM/dt - 2 C`` is skew-symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .kinematics import jacobian
from .params import JointState, LegGeometry, LegInertial


@dataclass(frozen=True)
class DynamicsTerms:
    M: np.ndarray
    V: np.ndarray
    G: np.ndarray


@dataclass(frozen=True)
class ExternalWrench:
    """Force at the foot tip [N]; zero throughout the swing phase."""

    f_t: np.ndarray = np.zeros(3)


def com_positions(q, geom: LegGeometry) -> np.ndarray:
    """Base-frame COM positions of links 1..3, shape (3, 3), one row per link."""
    t1, t2, t3 = q
    s1, c1 = sin(t1), cos(t1)
    c2, s2 = cos(t2), sin(t2)
    c23, s23 = cos(t2 + t3), sin(t2 + t3)
    # (reach, lateral, height) before the yaw rotation
    local = (
        (0.0, geom.lc1, 0.0),
        (geom.lc2 * c2, geom.l1, geom.lc2 * s2),
        (geom.l2 * c2 + geom.lc3 * c23, geom.l1, geom.l2 * s2 + geom.lc3 * s23),
    )
    return np.array([[r * c1 - d * s1, r * s1 + d * c1, h] for r, d, h in local])


def mass_matrix(q, geom: LegGeometry, inertial: LegInertial) -> np.ndarray:
    return _mass_and_partials(q, geom, inertial)[0]


def _mass_entries(q, geom: LegGeometry, ip: LegInertial):
    """Distinct entries of ``M`` and of its partials w.r.t. theta2 and theta3.

    ``M`` does not depend on theta1. Returns ``(m11, m12, m13, m22, m23, m33)``
    and ``(a11, a12, a13, b11, b22, b23)`` where ``a = dM/dtheta2`` (nonzero
    only in the first row/column) and ``b = dM/dtheta3``, whose first-row
    off-diagonals equal ``a13``.
    """
    t2, t3 = q[1], q[2]
    l1, l2 = geom.l1, geom.l2
    lc2, lc3 = geom.lc2, geom.lc3
    m2, m3 = ip.m2, ip.m3
    c2, s2 = cos(t2), sin(t2)
    c3, s3 = cos(t3), sin(t3)
    c23, s23 = cos(t2 + t3), sin(t2 + t3)

    reach3 = l2 * c2 + lc3 * c23
    m11 = ip.I1 + ip.m1 * geom.lc1**2 + (m2 + m3) * l1**2 + m2 * lc2**2 * c2**2 + m3 * reach3**2
    m12 = l1 * (m2 * lc2 * s2 + m3 * (l2 * s2 + lc3 * s23))
    m13 = l1 * m3 * lc3 * s23
    m22 = m2 * lc2**2 + m3 * (l2**2 + lc3**2 + 2 * l2 * lc3 * c3) + ip.I2 + ip.I3
    m23 = m3 * (lc3**2 + l2 * lc3 * c3) + ip.I3
    m33 = m3 * lc3**2 + ip.I3

    a11 = -2 * m2 * lc2**2 * c2 * s2 - 2 * m3 * reach3 * (l2 * s2 + lc3 * s23)
    a12 = l1 * (m2 * lc2 * c2 + m3 * (l2 * c2 + lc3 * c23))
    a13 = l1 * m3 * lc3 * c23
    b11 = -2 * m3 * reach3 * lc3 * s23
    b22 = -2 * m3 * l2 * lc3 * s3
    b23 = -m3 * l2 * lc3 * s3
    return (m11, m12, m13, m22, m23, m33), (a11, a12, a13, b11, b22, b23)


def _mass_and_partials(q, geom: LegGeometry, ip: LegInertial):
    """``M(q)`` and ``dM/dq_k`` stacked as ``dM[k, i, j]``."""
    (m11, m12, m13, m22, m23, m33), (a11, a12, a13, b11, b22, b23) = _mass_entries(q, geom, ip)
    M = np.array([[m11, m12, m13], [m12, m22, m23], [m13, m23, m33]])
    dM = np.zeros((3, 3, 3))
    dM[1] = [[a11, a12, a13], [a12, 0.0, 0.0], [a13, 0.0, 0.0]]
    dM[2] = [[b11, a13, a13], [a13, b22, b23], [a13, b23, 0.0]]
    return M, dM


def christoffel_matrix(q, qd, geom: LegGeometry, inertial: LegInertial) -> np.ndarray:
    """Coriolis matrix ``C(q, qd)`` from Christoffel symbols, ``V = C @ qd``."""
    _, dM = _mass_and_partials(q, geom, inertial)
    return _christoffel(dM, np.asarray(qd, dtype=float))


def _christoffel(dM: np.ndarray, qd: np.ndarray) -> np.ndarray:
    # c_ijk = 1/2 (dM_ij/dq_k + dM_ik/dq_j - dM_jk/dq_i); C_ij = sum_k c_ijk qd_k
    term_k = np.einsum("kij,k->ij", dM, qd)
    term_j = np.einsum("jik,k->ij", dM, qd)
    term_i = np.einsum("ijk,k->ij", dM, qd)
    return 0.5 * (term_k + term_j - term_i)


def _gravity(q, geom: LegGeometry, inertial: LegInertial):
    t2, t3 = q[1], q[2]
    c2, c23 = cos(t2), cos(t2 + t3)
    g, m3 = inertial.g, inertial.m3
    g3 = g * m3 * geom.lc3 * c23
    return 0.0, g * (inertial.m2 * geom.lc2 + m3 * geom.l2) * c2 + g3, g3


def gravity_vector(q, geom: LegGeometry, inertial: LegInertial) -> np.ndarray:
    return np.array(_gravity(q, geom, inertial))


def potential_energy(q, geom: LegGeometry, inertial: LegInertial) -> float:
    z = com_positions(q, geom)[:, 2]
    return float(inertial.g * np.dot(inertial.masses, z))


def dynamics_terms(state: JointState, geom: LegGeometry, inertial: LegInertial) -> DynamicsTerms:
    M, dM = _mass_and_partials(state.q, geom, inertial)
    V = _christoffel(dM, state.qd) @ state.qd
    return DynamicsTerms(M=M, V=V, G=gravity_vector(state.q, geom, inertial))


def _accel(q, qd, tau, geom, inertial, f_t=None) -> tuple[float, float, float]:
    """Scalar fast path of :func:`forward_dynamics` used by the integrator."""
    (m11, m12, m13, m22, m23, m33), (a11, a12, a13, b11, b22, b23) = _mass_entries(q, geom, inertial)
    w1, w2, w3 = qd
    # V_i = sum_k qd_k (dM_k qd)_i - 1/2 qd^T dM_i qd, with dM_1 = 0
    dm2q = (a11 * w1 + a12 * w2 + a13 * w3, a12 * w1, a13 * w1)
    dm3q = (b11 * w1 + a13 * w2 + a13 * w3, a13 * w1 + b22 * w2 + b23 * w3, a13 * w1 + b23 * w2)
    v1 = w2 * dm2q[0] + w3 * dm3q[0]
    v2 = w2 * dm2q[1] + w3 * dm3q[1] - 0.5 * (w1 * dm2q[0] + w2 * dm2q[1] + w3 * dm2q[2])
    v3 = w2 * dm2q[2] + w3 * dm3q[2] - 0.5 * (w1 * dm3q[0] + w2 * dm3q[1] + w3 * dm3q[2])
    _, g2, g3 = _gravity(q, geom, inertial)
    r1 = tau[0] - v1
    r2 = tau[1] - v2 - g2
    r3 = tau[2] - v3 - g3
    if f_t is not None:
        r1, r2, r3 = np.array([r1, r2, r3]) + jacobian(q, geom).T @ f_t
    # symmetric 3x3 solve by cofactors
    c11 = m22 * m33 - m23 * m23
    c12 = m13 * m23 - m12 * m33
    c13 = m12 * m23 - m13 * m22
    c22 = m11 * m33 - m13 * m13
    c23 = m12 * m13 - m11 * m23
    c33 = m11 * m22 - m12 * m12
    det = m11 * c11 + m12 * c12 + m13 * c13
    return (
        (c11 * r1 + c12 * r2 + c13 * r3) / det,
        (c12 * r1 + c22 * r2 + c23 * r3) / det,
        (c13 * r1 + c23 * r2 + c33 * r3) / det,
    )


def forward_dynamics(
    state: JointState,
    tau,
    wrench: ExternalWrench | None,
    geom: LegGeometry,
    inertial: LegInertial,
) -> np.ndarray:
    """Joint accelerations ``M^-1 (tau + J^T f_t - V - G)``."""
    f_t = None
    if wrench is not None and np.any(wrench.f_t):
        f_t = np.asarray(wrench.f_t, dtype=float)
    return np.array(_accel(state.q, state.qd, np.asarray(tau, dtype=float), geom, inertial, f_t))


def total_energy(state: JointState, geom: LegGeometry, inertial: LegInertial) -> float:
    """Kinetic plus potential energy [J]; potential datum at base-frame z = 0."""
    M = mass_matrix(state.q, geom, inertial)
    return 0.5 * float(state.qd @ M @ state.qd) + potential_energy(state.q, geom, inertial)
