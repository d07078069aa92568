"""
The leg model: kinematics, dynamics and the swing path
=======================================================

A walk through the plant that every controller drives.
"""

import numpy as np

import legbench as lb

# Nominal geometry and mass properties of the three-joint leg.
plant = lb.LegParams()
geom, inertial = plant.geom, plant.inertial
print("links l1, l2, l3 =", geom.l1, geom.l2, geom.l3, "m")

# The swing path starts 0.65 m in front of the hip, at lateral offset 0.12 m.
path = lb.SwingPathSpec()
start = path.start
q0 = lb.inverse_kinematics(start, geom)
print("start", start, "-> joints", np.round(q0, 6))
print("round trip error", np.abs(lb.forward_kinematics(q0, geom) - start).max())

# Mass matrix at the start pose: symmetric, positive definite.
M = lb.mass_matrix(q0, geom, inertial)
print("M =\n", np.round(M, 6))
print("eigenvalues", np.linalg.eigvalsh(M))

# Holding the start pose costs exactly the gravity torque.
print("gravity torque", lb.gravity_vector(q0, geom, inertial))

# The trapezoidal speed profile walks 0.125 m of arc in 3 s.
for t in (0.0, 0.5, 1.5, 2.5, 3.0):
    s, sd, sdd = lb.profile_eval(path.profile, t)
    pos = lb.swing_path_eval(path, t).pos
    print(f"t={t:3.1f}  s={s:.4f}  s_dot={sd:.3f}  foot={np.round(pos, 4)}")
