"""Running into the future singularity of the cos slab.

The flow stops when the surface gets within the stop margin of x0 = pi/2.
Along the way the remaining proper time stays below n H0 / (H0^2 - n lambda),
and the stopping time matches the crossing time of the homogeneous slice.
"""
from imcf.analysis import check_lifespan, check_singularity_approach
from imcf.config import load_scenario
from imcf.flow import run_flow

config = load_scenario("cos_n1_singularity")
traj = run_flow(config)
print(f"termination {traj.termination} at t = {traj['t'][-1]:.4f}, u_max = {traj['u_max'][-1]:.6f}")
life = check_lifespan(traj, config.spacetime, config.checks.lam)
print(life.summary_line(), f"closest approach to the bound {life.details['min_bound_gap']:.3e}")
sing = check_singularity_approach(traj, config.spacetime, config.flow.stop_margin)
print(sing.summary_line(), f"predicted crossing time {sing.details['predicted_crossing_time']:.4f}")
