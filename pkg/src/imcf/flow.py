"""Time integration of the graph form of inverse mean curvature flow.

Points move with velocity -nu/H. Measured at fixed x the graph function obeys

    du/dt = v / H,

positive everywhere because nu is past directed.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import ConfigError, DomainError, GeometryError, NumericalFailure, StepRejected
from .hypersurface import CauchyGrid, GraphState, area, compute_geometry

if TYPE_CHECKING:
    from .config import ScenarioConfig

log = logging.getLogger(__name__)

METHODS = ("explicit_euler", "rk4", "semi_implicit")
EXPLICIT = ("explicit_euler", "rk4")
RECORD_FIELDS = ("t", "tau", "H_min", "H_max", "area", "u_min", "u_max", "sup_w", "dt_used")
MAX_HALVINGS = 20
ROS2_GAMMA = 1.0 + 1.0 / math.sqrt(2.0)


def scalar_flow_rhs(state: GraphState) -> np.ndarray:
    return state.v / state.H


def stability_bound(state: GraphState, cfl: float = 0.2) -> float:
    """Largest explicit step allowed for ``state``.

    The principal part of the linearized operator is (g^ij / H^2) d_ij whose
    largest eigenvalue is 1 / (a^2 v^2 H^2).
    """
    h_min = min(state.grid.spacing)
    return float(cfl * h_min**2 * np.min(state.a**2 * state.v2 * state.H**2))


@lru_cache(maxsize=16)
def _difference_operators(grid: CauchyGrid):
    def periodic(m, h, offsets, weights):
        mat = sp.lil_matrix((m, m))
        for off, w in zip(offsets, weights):
            for i in range(m):
                mat[i, (i + off) % m] += w / h
        return mat.tocsr()

    firsts = [periodic(m, 2.0 * h, (-1, 1), (-1.0, 1.0)) for m, h in zip(grid.points, grid.spacing)]
    seconds = [periodic(m, h * h, (-1, 0, 1), (1.0, -2.0, 1.0)) for m, h in zip(grid.points, grid.spacing)]
    if grid.n == 1:
        return {(0, 0): seconds[0]}
    i0, i1 = sp.identity(grid.points[0], format="csr"), sp.identity(grid.points[1], format="csr")
    return {
        (0, 0): sp.kron(seconds[0], i1, format="csr"),
        (1, 1): sp.kron(i0, seconds[1], format="csr"),
        (0, 1): sp.kron(firsts[0], firsts[1], format="csr"),
    }


def principal_operator(state: GraphState) -> sp.csr_matrix:
    """Sparse (g^ij / H^2) D_ij with coefficients frozen at ``state``."""
    ops = _difference_operators(state.grid)
    coef = state.ginv / state.H**2
    n = state.grid.n
    if n == 1:
        return sp.diags(coef[0, 0].ravel()) @ ops[(0, 0)]
    return (
        sp.diags(coef[0, 0].ravel()) @ ops[(0, 0)]
        + sp.diags(coef[1, 1].ravel()) @ ops[(1, 1)]
        + sp.diags(2.0 * coef[0, 1].ravel()) @ ops[(0, 1)]
    )


class LaggedFactorization:
    """Reusable LU of I - gamma dt L for the semi-implicit scheme.

    ROS2 keeps second order for any matrix in place of the Jacobian, so the
    factorization is reused until dt changes, ``refresh_every`` steps pass,
    or the frozen coefficients drift by more than ``drift`` (relative).
    """

    def __init__(self, refresh_every: int = 25, drift: float = 0.05):
        self.refresh_every = refresh_every
        self.drift = drift
        self._lu = None
        self._dt = None
        self._coef = None
        self._age = 0

    def solver(self, state: GraphState, dt: float):
        coef = state.ginv / state.H**2
        stale = (
            self._lu is None
            or dt != self._dt
            or self._age >= self.refresh_every
            or self._coef.shape != coef.shape
            or np.max(np.abs(coef - self._coef)) > self.drift * np.max(np.abs(self._coef))
        )
        if stale:
            m = state.u.size
            w = sp.identity(m, format="csc") - ROS2_GAMMA * dt * principal_operator(state)
            self._lu, self._dt, self._coef, self._age = splu(w.tocsc()), dt, coef, 0
        self._age += 1
        return self._lu


def _rhs_of(state: GraphState, u) -> np.ndarray:
    try:
        return scalar_flow_rhs(state.with_u(u, state.t))
    except (GeometryError, DomainError) as exc:
        raise StepRejected(f"intermediate stage invalid: {exc}") from exc


def step(
    state: GraphState,
    dt: float,
    method: str = "rk4",
    cfl: float = 0.2,
    t_new: float | None = None,
    factorization: LaggedFactorization | None = None,
) -> GraphState:
    """Advance ``state`` by ``dt``; raises :class:`StepRejected` on failure.

    ``factorization`` lets successive semi-implicit steps share one LU.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if dt == 0:
        return state
    t_new = state.t + dt if t_new is None else t_new

    if method in EXPLICIT and not state.is_homogeneous():
        bound = stability_bound(state, cfl)
        if dt > bound:
            raise StepRejected(f"dt = {dt!r} exceeds the explicit stability bound {bound!r}")

    u = state.u
    f0 = scalar_flow_rhs(state)
    if method == "explicit_euler":
        u_new = u + dt * f0
    elif method == "rk4":
        k2 = _rhs_of(state, u + 0.5 * dt * f0)
        k3 = _rhs_of(state, u + 0.5 * dt * k2)
        k4 = _rhs_of(state, u + dt * k3)
        u_new = u + dt / 6.0 * (f0 + 2.0 * k2 + 2.0 * k3 + k4)
    else:
        shape = u.shape
        if state.is_homogeneous():
            # constant fields are in the kernel of every D_ij
            k1 = f0
            k2 = _rhs_of(state, u + dt * k1) - 2.0 * k1
        else:
            lu = (factorization or LaggedFactorization(refresh_every=1)).solver(state, dt)
            k1 = lu.solve(f0.ravel()).reshape(shape)
            k2 = lu.solve((_rhs_of(state, u + dt * k1) - 2.0 * k1).ravel()).reshape(shape)
        u_new = u + dt * (1.5 * k1 + 0.5 * k2)

    try:
        return compute_geometry(state.grid, state.spacetime, u_new, t_new)
    except (GeometryError, DomainError) as exc:
        raise StepRejected(f"stepped state invalid: {exc}") from exc


@dataclass(frozen=True)
class FlowSettings:
    method: str = "rk4"
    dt: float = 1e-3
    t_end: float = 2.0
    cfl: float = 0.2
    snapshot_every: float = 0.1
    stop_margin: float = 1e-3
    snapshot_burst: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"flow.method must be one of {METHODS}, got {self.method!r}")
        if self.dt <= 0 or self.t_end < 0 or self.cfl <= 0 or self.snapshot_every < 0:
            raise ConfigError("flow.dt, flow.cfl must be positive; t_end, snapshot_every nonnegative")
        if int(self.snapshot_burst) != self.snapshot_burst or self.snapshot_burst < 1:
            raise ConfigError("flow.snapshot_burst must be a positive integer")
        if not 0 < self.stop_margin < 1:
            raise ConfigError("flow.stop_margin is a fraction of the slab width in (0, 1)")


@dataclass
class FlowTrajectory:
    """Per-step summaries plus full-state snapshots of one run.

    Snapshots taken at consecutive steps of one burst share a group id.
    """

    n: int
    records: dict[str, np.ndarray]
    snapshot_times: list[float] = field(default_factory=list)
    snapshots: list[np.ndarray] = field(default_factory=list)
    snapshot_groups: list[int] = field(default_factory=list)
    termination: str = "t_end"
    t_end: float = math.inf
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.records["t"])

    def __getitem__(self, name) -> np.ndarray:
        return self.records[name]

    def last_record(self) -> dict:
        return {k: float(v[-1]) for k, v in self.records.items()}


def summarize(state: GraphState, dt_used: float) -> dict:
    n = state.grid.n
    h_min = float(state.H.min())
    return {
        "t": state.t,
        "tau": -math.expm1(-state.t / n),
        "H_min": h_min,
        "H_max": float(state.H.max()),
        "area": area(state),
        "u_min": float(state.u.min()),
        "u_max": float(state.u.max()),
        "sup_w": math.exp(state.t / n) / h_min,
        "dt_used": dt_used,
    }


def check_admission(state: GraphState, lam: float) -> None:
    if lam > 0:
        gate = math.sqrt(state.grid.n * lam)
        h_min = float(state.H.min())
        if not h_min > gate:
            raise ConfigError(
                f"initial mean curvature must exceed sqrt(n * lambda) = {gate!r}; min H = {h_min!r}"
            )


def integrate(state: GraphState, settings: FlowSettings, lam: float = 0.0) -> FlowTrajectory:
    """Run the flow from an admissible ``state`` until t_end or the stop margin."""
    check_admission(state, lam)
    s = state.spacetime
    n = state.grid.n
    u_stop = s.x0_max - settings.stop_margin * (s.x0_max - s.x0_min)
    rows = [summarize(state, 0.0)]
    snap_t, snaps, groups = [state.t], [np.array(state.u)], [0]
    next_snap = state.t + settings.snapshot_every
    burst_left = settings.snapshot_burst - 1
    termination = "t_end"

    # t is computed as anchor + k * dt while the step size is unchanged so the
    # flow clock does not accumulate rounding.
    anchor_t, anchor_dt, k = state.t, None, 0
    factorization = LaggedFactorization()
    t_end = settings.t_end
    while t_end - state.t > 1e-12 * max(1.0, t_end):
        if state.u.max() >= u_stop:
            termination = "singularity"
            break
        dt = settings.dt
        if settings.method in EXPLICIT and not state.is_homogeneous():
            dt = min(dt, stability_bound(state, settings.cfl))
        for _ in range(MAX_HALVINGS + 1):
            if t_end - state.t <= dt * (1.0 + 1e-9):
                dt_try, t_new = t_end - state.t, t_end
            else:
                if dt != anchor_dt:
                    anchor_t, anchor_dt, k = state.t, dt, 0
                dt_try, t_new = dt, anchor_t + (k + 1) * dt
            try:
                new_state = step(
                    state, dt_try, settings.method, settings.cfl, t_new, factorization
                )
                break
            except StepRejected as exc:
                log.debug("step rejected at t=%r: %s", state.t, exc)
                dt = 0.5 * dt
        else:
            raise NumericalFailure(
                f"step rejected {MAX_HALVINGS} times at t = {state.t!r}", last_record=rows[-1]
            )
        k += 1
        state = new_state
        rows.append(summarize(state, dt_try))
        if settings.snapshot_every == 0 or burst_left > 0:
            snap_t.append(state.t)
            snaps.append(np.array(state.u))
            groups.append(groups[-1])
            burst_left -= 1
        elif state.t >= next_snap - 1e-12 * max(1.0, next_snap):
            snap_t.append(state.t)
            snaps.append(np.array(state.u))
            groups.append(groups[-1] + 1)
            burst_left = settings.snapshot_burst - 1
            next_snap += settings.snapshot_every
    else:
        if state.u.max() >= u_stop:
            termination = "singularity"

    if snap_t[-1] != state.t:
        snap_t.append(state.t)
        snaps.append(np.array(state.u))
        groups.append(groups[-1] + 1)

    records = {name: np.array([r[name] for r in rows]) for name in RECORD_FIELDS}
    return FlowTrajectory(
        n=n,
        records=records,
        snapshot_times=snap_t,
        snapshots=snaps,
        snapshot_groups=groups,
        termination=termination,
        t_end=t_end,
        meta={"method": settings.method, "stop_margin": settings.stop_margin, "lambda": lam},
    )


def run_flow(config: "ScenarioConfig") -> FlowTrajectory:
    """Build the initial state from ``config`` and integrate it."""
    state = config.initial_state()
    traj = integrate(state, config.flow, config.checks.lam)
    traj.meta["config_hash"] = config.hash()
    return traj
