"""Deciding whether a closed curve in the 1+1 cos slab is a spacelike graph.

The two flags are independent: `is_graph` asks whether the projection to the
circle is monotone with winding one, `is_spacelike` asks about the causal
character. A gently wobbling loop is both. A steep bump in x0 still projects
monotonically but has a timelike stretch. A contractible loop has to turn
back, so its tangent becomes vertical somewhere and it fails both tests.
"""
import numpy as np

from imcf.hypersurface import validate_graph_parametric
from imcf.spacetime import ScaleFactor, WarpedSpacetime

s = WarpedSpacetime(-np.pi / 2, np.pi / 2, 1, ScaleFactor.cos(), (2 * np.pi,))
theta = np.linspace(0.0, 2 * np.pi, 257)
curves = {
    "wobbly graph": (0.3 + 0.05 * np.sin(3 * theta), theta + 0.2 * np.sin(2 * theta)),
    "timelike bump": (0.3 + 0.5 * np.exp(-((theta - np.pi) / 0.05) ** 2), theta),
    "contractible loop": (0.05 * np.sin(theta), np.sin(theta)),
}
for label, (x0, x) in curves.items():
    x0[-1] = x0[0]  # close the sampled curve exactly
    result = validate_graph_parametric(theta, x0, x, s)
    print(f"{label:<18} spacelike={result.is_spacelike!s:<5} graph={result.is_graph!s:<5} winding={result.winding}")
