"""Homogeneous slices in the cos slab against the closed form.

Under the flow a constant slice u stays constant and cos u decays like
exp(-t / n). The integrator reproduces this to near round-off, and the
area shrinks exactly like exp(-t).
"""
import numpy as np

from imcf.config import load_scenario
from imcf.flow import run_flow
from imcf.oracles import homogeneous_u

config = load_scenario("cos_n1_homogeneous")
traj = run_flow(config)
t = traj["t"]
exact = homogeneous_u(1, 0.5, t)
print(f"records {len(t)}, termination {traj.termination}")
print(f"max |u - u_exact|          = {np.max(np.abs(traj['u_min'] - exact)):.3e}")
print(f"max |log(A/A0) + t|        = {np.max(np.abs(np.log(traj['area'] / traj['area'][0]) + t)):.3e}")
for k in range(0, len(t), len(t) // 5):
    print(f"  t = {t[k]:.2f}  u = {traj['u_min'][k]:.10f}  exact = {exact[k]:.10f}  H = {traj['H_min'][k]:.6f}")
