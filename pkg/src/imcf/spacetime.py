"""Warped-product Lorentzian spacetimes -(dx0)^2 + a(x0)^2 (flat torus metric).

Everything here is a closed form in the scale factor ``a`` and its first two
derivatives. Coordinates are Gaussian (lapse 1, zero shift), so the only
non-vanishing Christoffel symbols are

    Gamma^0_ij = a a' delta_ij,     Gamma^i_0j = Gamma^i_j0 = (a'/a) delta^i_j

and the Ricci tensor is

    R_00 = -n a''/a,   R_ij = (a a'' + (n - 1) a'^2) delta_ij,   R_0i = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ContractViolation, DomainError

ScalarFn = Callable[[np.ndarray], np.ndarray]

NORMALIZATION_TOL = 1e-10


@dataclass(frozen=True)
class ScaleFactor:
    """A positive scale factor with analytic first and second derivatives."""

    kind: str
    a: ScalarFn
    da: ScalarFn
    dda: ScalarFn
    params: dict = field(default_factory=dict)

    @classmethod
    def constant(cls, value: float = 1.0) -> "ScaleFactor":
        if value <= 0:
            raise ValueError("constant scale factor must be positive")
        return cls(
            "constant",
            lambda x: np.full_like(np.asarray(x, dtype=float), value),
            lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            {"value": value},
        )

    @classmethod
    def cos(cls) -> "ScaleFactor":
        return cls("cos", np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x))

    @classmethod
    def cos_exp(cls, mu: float) -> "ScaleFactor":
        """a(x) = cos(x) exp(mu x)."""

        def a(x):
            return np.cos(x) * np.exp(mu * x)

        def da(x):
            return np.exp(mu * x) * (mu * np.cos(x) - np.sin(x))

        def dda(x):
            return np.exp(mu * x) * ((mu * mu - 1.0) * np.cos(x) - 2.0 * mu * np.sin(x))

        return cls("cos_exp", a, da, dda, {"mu": mu})

    @classmethod
    def spline(cls, knots: Sequence[Sequence[float]]) -> "ScaleFactor":
        """Cubic spline through ``(x0, a)`` knots, natural end conditions."""
        table = np.asarray(knots, dtype=float)
        if table.ndim != 2 or table.shape[1] != 2 or table.shape[0] < 4:
            raise ValueError("spline knots must be an (m, 2) table with m >= 4")
        if np.any(table[:, 1] <= 0):
            raise ValueError("spline knot values must be positive")
        cs = CubicSpline(table[:, 0], table[:, 1], bc_type="natural")
        d1, d2 = cs.derivative(1), cs.derivative(2)
        return cls("spline", cs, d1, d2, {"knots": table.tolist()})


@dataclass(frozen=True)
class WarpedSpacetime:
    """The slab (x0_min, x0_max) x T^n with metric -(dx0)^2 + a(x0)^2 delta."""

    x0_min: float
    x0_max: float
    n: int
    scale: ScaleFactor
    period: tuple[float, ...]

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"supported spatial dimensions are 1 and 2, got {self.n}")
        if not self.x0_min < self.x0_max:
            raise ValueError("x0_min must be smaller than x0_max")
        if len(self.period) != self.n or min(self.period) <= 0:
            raise ValueError("period needs n positive entries")

    def contains(self, x0) -> bool:
        x0 = np.asarray(x0)
        return bool(np.all((x0 > self.x0_min) & (x0 < self.x0_max)))

    def _require_inside(self, x0):
        if not self.contains(x0):
            raise DomainError(
                f"x0 outside the open interval ({self.x0_min}, {self.x0_max})"
            )

    def a(self, x0):
        return self.scale.a(x0)

    def da(self, x0):
        return self.scale.da(x0)

    def dda(self, x0):
        return self.scale.dda(x0)

    def slice_volume(self, x0) -> float:
        """Volume of the coordinate slice {x0 = const}."""
        return float(self.a(x0) ** self.n * np.prod(self.period))


@dataclass(frozen=True)
class TimelikeVector:
    components: np.ndarray
    x0: float


def metric_at(s: WarpedSpacetime, x0: float) -> tuple[float, np.ndarray]:
    """Return ``(g00, g_ij)`` at coordinate time ``x0``."""
    s._require_inside(x0)
    a = float(s.a(x0))
    return -1.0, a * a * np.eye(s.n)


def lorentz_norm(s: WarpedSpacetime, v: TimelikeVector) -> float:
    c = np.asarray(v.components, dtype=float)
    a = float(s.a(v.x0))
    return float(-c[0] ** 2 + a * a * np.sum(c[1:] ** 2))


def ricci_nu_nu(s: WarpedSpacetime, x0, nu0, nu_spatial_sq):
    """R(nu, nu) for nu = (nu0, nu^i) with sum (nu^i)^2 = nu_spatial_sq.

    Vectorized over nodes; no normalization check.
    """
    a = s.a(x0)
    ratio2 = s.dda(x0) / a
    hubble = s.da(x0) / a
    r00 = -s.n * ratio2
    rii = a * a * (ratio2 + (s.n - 1) * hubble * hubble)
    return r00 * nu0 * nu0 + rii * nu_spatial_sq


def ricci_quadratic_form(s: WarpedSpacetime, v: TimelikeVector) -> float:
    """R_ab v^a v^b for a unit timelike vector ``v``."""
    s._require_inside(v.x0)
    c = np.asarray(v.components, dtype=float)
    if c.shape != (s.n + 1,):
        raise ContractViolation(f"expected {s.n + 1} components, got {c.shape}")
    norm = lorentz_norm(s, v)
    if abs(norm + 1.0) > NORMALIZATION_TOL * max(1.0, c[0] ** 2):
        raise ContractViolation(f"vector is not unit timelike: <v,v> = {norm!r}")
    return float(ricci_nu_nu(s, v.x0, c[0], np.sum(c[1:] ** 2)))


def slice_mean_curvature(s: WarpedSpacetime, x0):
    """Mean curvature of {x0 = const} w.r.t. the past-directed normal: -n a'/a."""
    s._require_inside(x0)
    return -s.n * s.da(x0) / s.a(x0)


@dataclass(frozen=True)
class EnergySampleSpec:
    """Deterministic sample grid for the energy-condition sweep.

    The x0 samples cover the open interval with a relative inset ``inset``
    at both ends. Rapidities run from 0 to ``rapidity_cap``; for n = 2 the
    boost direction is sampled on ``directions`` equally spaced angles.
    """

    x0_count: int = 64
    rapidity_cap: float = 3.0
    rapidity_count: int = 31
    directions: int = 8
    inset: float = 1e-3

    def x0_samples(self, s: WarpedSpacetime) -> np.ndarray:
        width = s.x0_max - s.x0_min
        lo = s.x0_min + self.inset * width
        hi = s.x0_max - self.inset * width
        return np.linspace(lo, hi, self.x0_count)

    def unit_directions(self, n: int) -> np.ndarray:
        if n == 1:
            return np.array([[1.0], [-1.0]])
        angles = 2.0 * np.pi * np.arange(self.directions) / self.directions
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def sample_timelike(s: WarpedSpacetime, spec: EnergySampleSpec):
    """Yield every unit timelike vector of the sample grid, in a fixed order."""
    rapidities = np.linspace(0.0, spec.rapidity_cap, spec.rapidity_count)
    dirs = spec.unit_directions(s.n)
    for x0 in spec.x0_samples(s):
        a = float(s.a(x0))
        for phi in rapidities:
            for e in dirs:
                comps = np.concatenate([[np.cosh(phi)], np.sinh(phi) * e / a])
                yield TimelikeVector(comps, float(x0))


@dataclass(frozen=True)
class EnergyReport:
    min_margin: float
    witness: TimelikeVector
    lam: float
    samples: int
    rapidity_cap: float

    @property
    def holds(self) -> bool:
        return self.min_margin >= 0.0


def energy_condition_margin(
    s: WarpedSpacetime, lam: float, spec: EnergySampleSpec | None = None
) -> EnergyReport:
    """Minimum of R(nu, nu) + lam over the sample grid.

    A nonnegative margin certifies R(nu, nu) >= -lam on the samples only.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    spec = spec or EnergySampleSpec()
    best, witness, count = np.inf, None, 0
    for v in sample_timelike(s, spec):
        m = ricci_quadratic_form(s, v) + lam
        count += 1
        if m < best:
            best, witness = m, v
    return EnergyReport(float(best), witness, lam, count, spec.rapidity_cap)


@dataclass(frozen=True)
class VolumeDecayReport:
    """Slice volumes on heights approaching x0_max geometrically."""

    x0: np.ndarray
    volumes: np.ndarray
    decays: bool


def future_volume_decay(s: WarpedSpacetime, levels: int = 30, tol: float = 1e-6) -> VolumeDecayReport:
    """Operational volume test: slice volume falls monotonically toward zero.

    Samples x0 = x0_max - width 2^-k, k = 1..levels. The slab counts as
    decaying when the sampled volumes strictly decrease and the last one is
    below ``tol`` times the first. This is a numerical probe, not a proof.
    """
    width = s.x0_max - s.x0_min
    x0 = s.x0_max - width * 2.0 ** -np.arange(1, levels + 1)
    vol = np.array([s.slice_volume(x) for x in x0])
    decays = bool(np.all(np.diff(vol) < 0) and vol[-1] < tol * vol[0])
    return VolumeDecayReport(x0, vol, decays)


def make_scale_factor(kind: str, params: dict | None = None) -> ScaleFactor:
    params = params or {}
    if kind == "constant":
        return ScaleFactor.constant(params.get("value", 1.0))
    if kind == "cos":
        return ScaleFactor.cos()
    if kind == "cos_exp":
        return ScaleFactor.cos_exp(float(params["mu"]))
    if kind == "spline":
        return ScaleFactor.spline(params["knots"])
    raise ValueError(f"unknown scale factor kind {kind!r}")
