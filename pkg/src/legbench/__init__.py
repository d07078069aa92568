"""Trajectory-tracking benchmark for a 3-DOF quadruped leg.

Kinematics and Lagrangian dynamics of the leg, a trapezoidal-profile
semi-elliptical swing path, sliding-mode, transpose-Jacobian and adaptive
transpose-Jacobian controllers, a fixed-step closed-loop simulator and the
RMSE / control-energy evaluation sweeps.
"""

from .analysis import (
    MetricsRecord,
    SweepResult,
    control_energy,
    deviation_sweep,
    evaluate,
    overshoot,
    rmse,
    uncertainty_sweep,
)
from .controllers import (
    AtjParams,
    AtjState,
    ControlCommand,
    ControllerModel,
    RefModelParams,
    SmcParams,
    TjParams,
    atj_control,
    atj_update_gains,
    ref_model_step,
    sigmoid,
    smc_control,
    tj_control,
)
from .dynamics import (
    DynamicsTerms,
    ExternalWrench,
    dynamics_terms,
    forward_dynamics,
    gravity_vector,
    mass_matrix,
    total_energy,
)
from .kinematics import NearSingularWarning, Unreachable, forward_kinematics, inverse_kinematics, jacobian
from .params import JointState, LegGeometry, LegInertial, LegParams
from .sim import (
    DEVIATIONS,
    AtjSpec,
    NumericalBlowup,
    RunLog,
    Scenario,
    SimConfig,
    SmcSpec,
    TjSpec,
    perturb_controller_model,
    rk4_step,
    run_closed_loop,
)
from .trajectory import (
    JointReference,
    OutOfDomain,
    PathSample,
    SingularJacobian,
    SwingPathSpec,
    TrapezoidProfile,
    joint_reference,
    profile_eval,
    swing_path_eval,
)

__version__ = "0.1.0"
