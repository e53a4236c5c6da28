"""A perturbed graph in 1+1 dimensions, followed by every verification check.

The perturbation decays while the surface rises through the slab; the
printed reports are the same ones `imcf verify` writes to report.json.
"""
import numpy as np

from imcf.analysis import run_checks
from imcf.config import load_scenario
from imcf.flow import run_flow

config = load_scenario("cos_n1_perturbed")
traj = run_flow(config)
oscillation = [float(np.ptp(u)) for u in traj.snapshots]
print(f"oscillation of u: {oscillation[0]:.3e} at t = 0, {oscillation[-1]:.3e} at t = {traj.snapshot_times[-1]:.2f}")
for report in run_checks(traj, config).values():
    print(report.summary_line())
