"""
Sensitivity to start offset and model error
===========================================

Both sweeps run every controller over six settings. Set LEGBENCH_THREADS
to use more than one process.
"""

import numpy as np

import legbench as lb

base = lb.Scenario(controller=lb.SmcSpec())

# Start offsets grow from zero to (25, 5, -15) mm.
dev = lb.deviation_sweep(base)
for name in ("SMC", "TJ", "ATJ"):
    tab = 1e3 * dev.rmse_table(name)
    print(name, "rmse x by offset row:", np.round(tab[:, 0], 3), " spread:", np.round(np.ptp(tab, axis=0), 3))

# Only SMC uses a model, so only SMC reacts to mass errors.
unc = lb.uncertainty_sweep(base)
for name in ("SMC", "TJ", "ATJ"):
    print(name, "rmse x by % error:", np.round(1e3 * unc.rmse_table(name)[:, 0], 3))
