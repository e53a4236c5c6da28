"""Curvature of the cos and cos*exp warped slabs, and the energy sweep.

The cos slab satisfies R(nu, nu) >= 0 on every sampled timelike vector.
The cos*exp slab only satisfies R(nu, nu) >= -lambda once lambda is large
enough, which is the setting of the exponential H bound.
"""
from imcf.config import load_scenario
from imcf.spacetime import energy_condition_margin, slice_mean_curvature

for name in ("cos_n2", "cos_exp"):
    s = load_scenario(name).spacetime
    print(f"{name}: slab ({s.x0_min:+.3f}, {s.x0_max:+.3f}), n = {s.n}")
    for x0 in (-1.0, 0.0, 0.5, 1.0):
        print(f"  x0 = {x0:+.2f}  a = {float(s.a(x0)):.5f}  slice H = {float(slice_mean_curvature(s, x0)):+.5f}")
    for lam in (0.0, 0.25, 0.5):
        report = energy_condition_margin(s, lam)
        state = "holds" if report.holds else "fails"
        print(f"  lambda = {lam:.2f}: min margin {report.min_margin:+.4e} over {report.samples} samples ({state})")
