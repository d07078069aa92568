"""Model-consistency checks run by ``legbench validate``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import christoffel_matrix, gravity_vector, mass_matrix, potential_energy, total_energy
from .kinematics import forward_kinematics, inverse_kinematics, jacobian
from .params import JointState, LegParams, LegInertial
from .sim import _rk4
from .trajectory import TrapezoidProfile, profile_branches, profile_eval

N_RANDOM = 1000


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    observed: float

    @property
    def passed(self) -> bool:
        return bool(self.observed < self.tolerance)


def random_joint_states(n: int, rng: np.random.Generator, q_range=np.pi, qd_range=3.0):
    q = rng.uniform(-q_range, q_range, size=(n, 3))
    qd = rng.uniform(-qd_range, qd_range, size=(n, 3))
    return q, qd


def energy_drift(params: LegParams, q0, qd0, t_end: float = 3.0, h: float = 1e-4) -> float:
    """Max |E(t) - E(0)| of the unforced leg with gravity switched off."""
    inertial = LegInertial(**{**params.inertial.__dict__, "g": 0.0})
    geom = params.geom
    q, qd = list(map(float, q0)), list(map(float, qd0))
    e0 = total_energy(JointState(q, qd), geom, inertial)
    drift = 0.0
    tau = [0.0, 0.0, 0.0]
    for _ in range(int(round(t_end / h))):
        q, qd = _rk4(q, qd, tau, geom, inertial, h)
        drift = max(drift, abs(total_energy(JointState(q, qd), geom, inertial) - e0))
    return drift


def jacobian_fd_error(params: LegParams, qs, jacobian_fn=jacobian, step: float = 1e-6) -> float:
    geom = params.geom
    worst = 0.0
    for q in qs:
        fd = np.empty((3, 3))
        for j in range(3):
            dq = np.zeros(3)
            dq[j] = step
            fd[:, j] = (forward_kinematics(q + dq, geom) - forward_kinematics(q - dq, geom)) / (2 * step)
        worst = max(worst, float(np.abs(jacobian_fn(q, geom) - fd).max()))
    return worst


def mass_checks(params: LegParams, qs) -> tuple[float, float]:
    """Worst asymmetry and smallest eigenvalue of ``M`` over ``qs``."""
    asym, min_eig = 0.0, np.inf
    for q in qs:
        M = mass_matrix(q, params.geom, params.inertial)
        asym = max(asym, float(np.abs(M - M.T).max()))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(M).min()))
    return asym, min_eig


def skew_residual(params: LegParams, qs, qds, step: float = 1e-6) -> float:
    """Worst entry of ``N + N^T`` with ``N = dM/dt - 2 C``; ``dM/dt`` by central difference."""
    geom, inertial = params.geom, params.inertial
    worst = 0.0
    for q, qd in zip(qs, qds):
        Mdot = (mass_matrix(q + step * qd, geom, inertial) - mass_matrix(q - step * qd, geom, inertial)) / (2 * step)
        N = Mdot - 2.0 * christoffel_matrix(q, qd, geom, inertial)
        worst = max(worst, float(np.abs(N + N.T).max()))
    return worst


def gravity_gradient_error(params: LegParams, qs, step: float = 1e-6) -> float:
    """Worst error of ``G`` against the central-difference gradient of ``U``, relative to max |G|."""
    geom, inertial = params.geom, params.inertial
    worst = 0.0
    for q in qs:
        grad = np.empty(3)
        for j in range(3):
            dq = np.zeros(3)
            dq[j] = step
            grad[j] = (potential_energy(q + dq, geom, inertial) - potential_energy(q - dq, geom, inertial)) / (2 * step)
        G = gravity_vector(q, geom, inertial)
        worst = max(worst, float(np.abs(G - grad).max() / max(np.abs(G).max(), 1e-12)))
    return worst


def fk_ik_error(params: LegParams, qs, branch: int = -1) -> float:
    geom = params.geom
    worst = 0.0
    for q in qs:
        p = forward_kinematics(q, geom)
        worst = max(worst, float(np.abs(forward_kinematics(inverse_kinematics(p, geom, branch), geom) - p).max()))
    return worst


def trapezoid_continuity(profile: TrapezoidProfile) -> float:
    """Largest jump in ``s`` or ``s_dot`` across either breakpoint."""
    t1, t2 = profile.t_a, profile.t_f - profile.t_a
    b1 = profile_branches(profile, t1)
    b2 = profile_branches(profile, t2)
    return max(
        abs(b1[0][0] - b1[1][0]),
        abs(b1[0][1] - b1[1][1]),
        abs(b2[1][0] - b2[2][0]),
        abs(b2[1][1] - b2[2][1]),
    )


def run_validation(
    params: LegParams,
    profile: TrapezoidProfile,
    seed: int = 0,
    n: int = N_RANDOM,
    jacobian_fn=jacobian,
    energy_h: float = 1e-4,
    energy_t_end: float = 3.0,
) -> list[CheckResult]:
    """Run the full property suite.

    ``jacobian_fn`` replaces the analytic Jacobian in the finite-difference
    check, which lets tests inject a faulty one.
    """
    rng = np.random.default_rng(seed)
    qs, qds = random_joint_states(n, rng)
    # interior poses only: keep the knee away from full extension/folding
    ik_qs = qs.copy()
    ik_qs[:, 2] = -rng.uniform(0.2, np.pi - 0.2, size=n)

    asym, min_eig = mass_checks(params, qs)
    s_tf = profile_eval(profile, profile.t_f)[0]
    return [
        CheckResult(
            "energy_drift_J",
            1e-6,
            energy_drift(params, [0.3, -0.4, -1.2], [1.0, -1.5, 2.0], energy_t_end, energy_h),
        ),
        CheckResult("mass_matrix_asymmetry", 1e-12, asym),
        # observed value is -min eigenvalue so that "< 0" means positive definite
        CheckResult("mass_matrix_neg_min_eigenvalue", 0.0, -min_eig),
        CheckResult("skew_symmetry_residual", 1e-9, skew_residual(params, qs, qds)),
        CheckResult("gravity_gradient_rel_error", 1e-6, gravity_gradient_error(params, qs)),
        CheckResult("jacobian_fd_error", 1e-6, jacobian_fd_error(params, qs, jacobian_fn)),
        CheckResult("fk_ik_roundtrip_m", 1e-9, fk_ik_error(params, ik_qs)),
        CheckResult("trapezoid_continuity", 1e-12, trapezoid_continuity(profile)),
        CheckResult("trapezoid_final_length", 1e-12, abs(s_tf - profile.total_length)),
    ]
