"""
Inside the adaptive gain law
============================

The ATJ gains grow with the squared error and leak back towards zero.
"""

import numpy as np

import legbench as lb

p = lb.AtjParams()

# One step from rest with a 1 cm x error.
e = np.array([0.01, 0.0, 0.0])
K_p, K_d, st = lb.atj_update_gains(e, np.zeros(3), p, lb.AtjState())
print("first step: K_p =", K_p, " integral part =", st.K_pI)

# Under a constant error the integral part settles at forcing / delta.
for _ in range(500_000):
    _, _, st = lb.atj_update_gains(e, np.zeros(3), p, st)
print("after 500 s:", st.K_pI, " limit:", float(e @ (p.Gamma_pI * e)) / p.delta_p)

# In closed loop the error never drops below about 20 mm, so the gains keep climbing.
log = lb.run_closed_loop(lb.Scenario(controller=lb.AtjSpec()))
for t in (0.0, 0.05, 0.2, 1.0, 3.0):
    k = int(round(t / 1e-3))
    print(f"t={t:4.2f}  K_p={log.kp[k]:10.3f}  K_d={log.kd[k]:8.4f}  |e|={1e3 * np.linalg.norm(log.error[k]):7.3f} mm")

# The filtered reference trails the raw path by about 2 zeta v / omega_n.
print("max filter lag:", 1e3 * np.abs(log.xdc - log.xd).max(), "mm")
