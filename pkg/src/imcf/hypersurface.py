"""Spacelike graphs {x0 = u(x)} over a periodic grid and their induced geometry.

For a graph in -(dx0)^2 + a^2 delta, with a = a(u) and Du the coordinate
gradient,

    v^2    = 1 - |Du|^2 / a^2
    g_ij   = a^2 delta_ij - u_i u_j,        sqrt(g) = a^n v
    g^ij   = a^-2 (delta^ij + u_i u_j / (a^2 v^2))
    nu     = -(1/v) (1, a^-2 u_i)            (past directed, <nu, d0> = 1/v)
    h_ij   = -(1/v) (u_ij + a a' delta_ij - 2 (a'/a) u_i u_j)

The sign of h_ij makes coordinate slices of a collapsing universe (a' < 0)
have H = -n a'/a > 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import AdmissibilityError, CurveFormatError, GeometryError, SpacelikeViolation
from .spacetime import WarpedSpacetime

V2_FLOOR = 1e-8
H_FLOOR = 1e-10


@dataclass(frozen=True)
class CauchyGrid:
    n: int
    points: tuple[int, ...]
    period: tuple[float, ...]

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError("grid dimension must be 1 or 2")
        if len(self.points) != self.n or len(self.period) != self.n:
            raise ValueError("points and period need one entry per axis")
        if min(self.points) < 8:
            raise ValueError("at least 8 points per axis")
        if min(self.period) <= 0:
            raise ValueError("period must be positive")

    @classmethod
    def for_spacetime(cls, s: WarpedSpacetime, points) -> "CauchyGrid":
        if np.isscalar(points):
            points = (int(points),) * s.n
        return cls(s.n, tuple(int(p) for p in points), tuple(s.period))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(p / m for p, m in zip(self.period, self.points))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def coordinates(self) -> list[np.ndarray]:
        """Nodal coordinates, one array of ``shape`` per axis."""
        axes = [np.arange(m) * h for m, h in zip(self.points, self.spacing)]
        return list(np.meshgrid(*axes, indexing="ij"))

    def gradient(self, f: np.ndarray) -> np.ndarray:
        """Central first differences, shape (n, *shape)."""
        return np.stack(
            [
                (np.roll(f, -1, axis=k) - np.roll(f, 1, axis=k)) / (2.0 * h)
                for k, h in enumerate(self.spacing)
            ]
        )

    def hessian(self, f: np.ndarray) -> np.ndarray:
        """Central second differences, shape (n, n, *shape)."""
        n, hs = self.n, self.spacing
        out = np.empty((n, n) + f.shape)
        for i in range(n):
            out[i, i] = (np.roll(f, -1, axis=i) - 2.0 * f + np.roll(f, 1, axis=i)) / hs[i] ** 2
        if n == 2:
            fp = np.roll(f, -1, axis=0)
            fm = np.roll(f, 1, axis=0)
            mixed = (
                np.roll(fp, -1, axis=1)
                - np.roll(fp, 1, axis=1)
                - np.roll(fm, -1, axis=1)
                + np.roll(fm, 1, axis=1)
            ) / (4.0 * hs[0] * hs[1])
            out[0, 1] = out[1, 0] = mixed
        return out

    def divergence(self, q: np.ndarray) -> np.ndarray:
        return sum(
            (np.roll(q[k], -1, axis=k) - np.roll(q[k], 1, axis=k)) / (2.0 * h)
            for k, h in enumerate(self.spacing)
        )


@dataclass(frozen=True, eq=False)
class GraphState:
    """A graph hypersurface at flow time ``t`` with its cached geometry."""

    grid: CauchyGrid
    spacetime: WarpedSpacetime
    u: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        if u.shape != self.grid.shape:
            raise ValueError(f"u has shape {u.shape}, grid is {self.grid.shape}")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        if not np.all(np.isfinite(u)):
            raise GeometryError("non-finite graph values")
        bad = (u <= self.spacetime.x0_min) | (u >= self.spacetime.x0_max)
        if bad.any():
            node = np.unravel_index(np.argmax(bad), u.shape)
            raise GeometryError(f"graph leaves the slab at node {node}", node=node)
        if self.v2.min() < V2_FLOOR:
            node = np.unravel_index(np.argmin(self.v2), u.shape)
            raise SpacelikeViolation(
                f"graph is not spacelike at node {node}: v^2 = {self.v2[node]!r}", node=node
            )
        if self.H.min() < H_FLOOR:
            node = np.unravel_index(np.argmin(self.H), u.shape)
            raise AdmissibilityError(
                f"mean curvature not positive at node {node}: H = {self.H[node]!r}", node=node
            )

    # The cached properties below are filled on first access; the state stays
    # logically immutable.

    @cached_property
    def du(self):
        return self.grid.gradient(self.u)

    @cached_property
    def ddu(self):
        return self.grid.hessian(self.u)

    @cached_property
    def a(self):
        return self.spacetime.a(self.u)

    @cached_property
    def da(self):
        return self.spacetime.da(self.u)

    @cached_property
    def grad_sq(self):
        return np.sum(self.du**2, axis=0)

    @cached_property
    def v2(self):
        return 1.0 - self.grad_sq / self.a**2

    @cached_property
    def v(self):
        return np.sqrt(self.v2)

    @cached_property
    def g(self):
        n = self.grid.n
        eye = np.eye(n).reshape((n, n) + (1,) * n)
        return self.a**2 * eye - self.du[:, None] * self.du[None, :]

    @cached_property
    def ginv(self):
        n = self.grid.n
        eye = np.eye(n).reshape((n, n) + (1,) * n)
        a2 = self.a**2
        return (eye + self.du[:, None] * self.du[None, :] / (a2 * self.v2)) / a2

    @cached_property
    def sqrt_g(self):
        return self.a**self.grid.n * self.v

    @cached_property
    def h(self):
        n = self.grid.n
        eye = np.eye(n).reshape((n, n) + (1,) * n)
        a, da = self.a, self.da
        outer = self.du[:, None] * self.du[None, :]
        return -(self.ddu + a * da * eye - 2.0 * (da / a) * outer) / self.v

    @cached_property
    def H(self):
        return np.einsum("ij...,ij...->...", self.ginv, self.h)

    @cached_property
    def normA2(self):
        mixed = np.einsum("ik...,kj...->ij...", self.ginv, self.h)
        return np.einsum("ij...,ji...->...", mixed, mixed)

    @cached_property
    def nu(self):
        """Past-directed unit normal, shape (n + 1, *shape)."""
        inv_v = 1.0 / self.v
        return np.concatenate([-inv_v[None], -self.du * (inv_v / self.a**2)[None]])

    def tangents(self):
        """Coordinate tangents e_i = d_i + u_i d_0, shape (n, n + 1, *shape)."""
        n = self.grid.n
        out = np.zeros((n, n + 1) + self.u.shape)
        for i in range(n):
            out[i, 0] = self.du[i]
            out[i, 1 + i] = 1.0
        return out

    def lorentz_inner(self, x, y):
        """<x, y> of ambient vectors based at the graph nodes."""
        return -x[0] * y[0] + self.a**2 * np.sum(x[1:] * y[1:], axis=0)

    def laplace_beltrami(self, f):
        """(1/sqrt g) d_i (sqrt g g^ij d_j f), central differences."""
        df = self.grid.gradient(f)
        flux = self.sqrt_g * np.einsum("ij...,j...->i...", self.ginv, df)
        return self.grid.divergence(flux) / self.sqrt_g

    def drift(self):
        """Spatial velocity dx^i/dt of points moving with velocity -nu/H."""
        return self.du / (self.a**2 * self.H * self.v)

    def is_homogeneous(self) -> bool:
        return bool(np.all(self.u == self.u.flat[0]))

    def with_u(self, u, t) -> "GraphState":
        return GraphState(self.grid, self.spacetime, u, t)


def compute_geometry(grid: CauchyGrid, s: WarpedSpacetime, u, t: float = 0.0) -> GraphState:
    """Build a validated :class:`GraphState`; geometry is evaluated eagerly."""
    state = GraphState(grid, s, u, t)
    for name in ("normA2", "nu", "sqrt_g"):
        getattr(state, name)
    return state


def area(state: GraphState) -> float:
    """Sum of sqrt(g) times the cell volume (exact for periodic trigonometric data)."""
    return float(np.sum(state.sqrt_g) * state.grid.cell_volume)


def fourier_initial_data(grid: CauchyGrid, u0: float, terms=()) -> np.ndarray:
    """u0 + sum of amplitude * sin(2 pi k x_axis / period + phase)."""
    coords = grid.coordinates()
    u = np.full(grid.shape, float(u0))
    for axis, k, amp, phase in terms:
        axis = int(axis)
        if not 0 <= axis < grid.n:
            raise ValueError(f"axis {axis} out of range for n = {grid.n}")
        u = u + amp * np.sin(2.0 * np.pi * k * coords[axis] / grid.period[axis] + phase)
    return u


@dataclass(frozen=True)
class GraphValidation:
    is_spacelike: bool
    is_graph: bool
    u: np.ndarray | None
    winding: int


def validate_graph_parametric(
    theta, x0, x, s: WarpedSpacetime, grid: CauchyGrid | None = None
) -> GraphValidation:
    """Decide whether a closed curve in the (x0, x) cylinder is a spacelike graph.

    A polygon counts as discretely spacelike when every edge is spacelike and
    consecutive edges lie in the same half of the spacelike cone, i.e. their
    Lorentzian inner product is positive (the tangent never crosses the light
    cone at a vertex). The graph test checks that the projection to S^1 is
    strictly monotone and winds exactly once.
    """
    if s.n != 1:
        raise ValueError("the parametric validator works on 1+1 slabs only")
    theta, x0, x = (np.asarray(c, dtype=float) for c in (theta, x0, x))
    if not (theta.shape == x0.shape == x.shape) or theta.ndim != 1:
        raise CurveFormatError("theta, x0 and x must be 1-d arrays of equal length")
    if theta.size < 17:
        raise CurveFormatError("need at least 16 distinct samples")
    period = s.period[0]
    dx_close = (x[-1] - x[0]) / period
    if x0[-1] != x0[0] or abs(dx_close - round(dx_close)) > 1e-12:
        raise CurveFormatError("curve is not closed (first and last samples differ)")

    dt = np.diff(x0)
    dx = np.diff(x)
    dx = dx - period * np.round(dx / period)
    mid = 0.5 * (x0[1:] + x0[:-1])
    if not s.contains(x0):
        return GraphValidation(False, False, None, 0)
    a_mid = s.a(mid)
    edge_norm = -dt**2 + a_mid**2 * dx**2
    a_vertex = s.a(x0[:-1])
    dt_prev, dx_prev = np.roll(dt, 1), np.roll(dx, 1)
    turn = -dt * dt_prev + a_vertex**2 * dx * dx_prev
    is_spacelike = bool(np.all(edge_norm > 0) and np.all(turn > 0))

    winding = int(round(dx.sum() / period))
    monotone = bool(np.all(dx > 0) or np.all(dx < 0))
    is_graph = monotone and abs(winding) == 1

    u = None
    if is_spacelike and is_graph:
        grid = grid or CauchyGrid(1, (max(8, theta.size - 1),), (period,))
        xs = np.mod(x[:-1], period)
        order = np.argsort(xs)
        xs, ts = xs[order], x0[:-1][order]
        xs_ext = np.concatenate([xs - period, xs, xs + period])
        ts_ext = np.tile(ts, 3)
        u = PchipInterpolator(xs_ext, ts_ext)(grid.coordinates()[0])
    return GraphValidation(is_spacelike, is_graph, u, winding)
