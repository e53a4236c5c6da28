"""Closed-form homogeneous solutions in the a = cos(x0) spacetimes.

A coordinate slice stays a slice under the flow and moves by
du/dt = 1/H = cot(u)/n, so cos u(t) = cos(u0) exp(-t/n).
"""
from __future__ import annotations

import numpy as np

ORACLE_TABLES = {
    "cos_n1_u0.5": (1, 0.5),
    "cos_n2_u0.5": (2, 0.5),
    "cos_n1_u1.0": (1, 1.0),
}

TABLE_COLUMNS = ("t", "tau", "u", "cos_u", "H", "area_ratio", "sup_w", "L_max", "lifespan_bound")


def homogeneous_u(n: int, u0: float, t):
    return np.arccos(np.cos(u0) * np.exp(-np.asarray(t, dtype=float) / n))


def homogeneous_table(n: int, u0: float, t_end: float = 2.0, dt: float = 0.1) -> dict[str, np.ndarray]:
    t = np.arange(int(round(t_end / dt)) + 1) * dt
    u = homogeneous_u(n, u0, t)
    H = n * np.tan(u)
    return {
        "t": t,
        "tau": -np.expm1(-t / n),
        "u": u,
        "cos_u": np.cos(u0) * np.exp(-t / n),
        "H": H,
        "area_ratio": np.exp(-t),
        "sup_w": np.exp(t / n) / H,
        "L_max": np.pi / 2 - u,
        "lifespan_bound": n / H,
    }
