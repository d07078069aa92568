"""
Three controllers on the same swing
===================================

Sliding mode (SMC), Jacobian transpose PD (TJ) and its adaptive-gain
variant (ATJ) each start 25 mm away from the path and try to follow it.
"""

import numpy as np

import legbench as lb

path = lb.SwingPathSpec()
results = {}
for spec in (lb.SmcSpec(), lb.TjSpec(), lb.AtjSpec()):
    log = lb.run_closed_loop(lb.Scenario(controller=spec))
    results[spec.name] = (log, lb.evaluate(log, path))

# RMSE per axis in millimetres, control energy in joules.
print(f"{'':4} {'rmse x':>8} {'rmse y':>8} {'rmse z':>8} {'energy':>8} {'overshoot':>10}")
for name, (log, m) in results.items():
    r = 1e3 * m.rmse
    print(f"{name:4} {r[0]:8.3f} {r[1]:8.3f} {r[2]:8.3f} {m.energy:8.3f} {1e3 * m.overshoot:10.3f}")

# How closely each one holds the path once the start transient is over.
for name, (log, _) in results.items():
    late = log.t >= 1.0
    print(f"{name} worst error after 1 s: {1e3 * np.abs(log.error[late]).max():.3f} mm")

# SMC drives its sliding variable into the boundary layer and keeps it there.
s = results["SMC"][0].s
print("SMC |s| at t = 0, 0.5, 1 s:", [float(np.abs(s[k]).max()) for k in (0, 500, 1000)])
