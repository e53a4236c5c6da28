"""Scenario configuration: one JSON document per run."""
from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import AdmissibilityError, ConfigError, GeometryError, SpacelikeViolation
from .flow import FlowSettings, check_admission
from .hypersurface import CauchyGrid, GraphState, compute_geometry, fourier_initial_data
from .spacetime import EnergySampleSpec, WarpedSpacetime, make_scale_factor

ALL_CHECKS = (
    "area_law",
    "H_exponential_bound",
    "w_bounded",
    "evolution_identities",
    "lifespan",
    "singularity_approach",
)

DEFAULT_TOLERANCES = {
    "area_law": 1e-5,
    "H_exponential_bound": 1e-3,
    "w_bounded": 1e-3,
    "evolution_identities": 1e-3,
    "lifespan_envelope": 1e-3,
    "crossing_time": 0.01,
}

ALIASES = {"cos_n1": "cos_n1_homogeneous"}


@dataclass(frozen=True)
class ChecksSettings:
    lam: float = 0.0
    enabled: tuple[str, ...] = ALL_CHECKS
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    energy: EnergySampleSpec = field(default_factory=EnergySampleSpec)

    def tol(self, name: str, scale: float = 1.0) -> float:
        return self.tolerances[name] * scale


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    raw: dict
    spacetime: WarpedSpacetime
    points: tuple[int, ...]
    initial: dict
    flow: FlowSettings
    checks: ChecksSettings
    output_dir: str | None = None
    seed: int = 0

    @property
    def grid(self) -> CauchyGrid:
        return CauchyGrid.for_spacetime(self.spacetime, self.points)

    def hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def initial_u(self):
        kind = self.initial.get("kind", "constant")
        u0 = float(self.initial["u0"])
        if kind == "constant":
            return fourier_initial_data(self.grid, u0)
        if kind == "fourier":
            return fourier_initial_data(self.grid, u0, self.initial.get("terms", []))
        raise ConfigError(f"initial.kind must be 'constant' or 'fourier', got {kind!r}")

    def initial_state(self) -> GraphState:
        """Initial graph after the admission gates."""
        try:
            state = compute_geometry(self.grid, self.spacetime, self.initial_u(), 0.0)
        except SpacelikeViolation as exc:
            raise ConfigError(f"initial hypersurface must be spacelike: {exc}") from exc
        except AdmissibilityError as exc:
            raise ConfigError(f"initial hypersurface must have positive mean curvature: {exc}") from exc
        except GeometryError as exc:
            raise ConfigError(f"initial hypersurface is invalid: {exc}") from exc
        check_admission(state, self.checks.lam)
        return state


def _number(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite")
    return float(value)


def from_dict(raw: dict, name: str | None = None) -> ScenarioConfig:
    raw = copy.deepcopy(raw)
    try:
        st = raw["spacetime"]
        n = int(st["n"])
        period = st.get("period", [2.0 * math.pi] * n)
        spacetime = WarpedSpacetime(
            _number(st["x0_min"], "spacetime.x0_min"),
            _number(st["x0_max"], "spacetime.x0_max"),
            n,
            make_scale_factor(st["kind"], st.get("params")),
            tuple(_number(p, "spacetime.period") for p in period),
        )
        points = raw.get("grid", {}).get("points", 64)
        points = (int(points),) * n if isinstance(points, int) else tuple(int(p) for p in points)
        CauchyGrid.for_spacetime(spacetime, points)

        flow_raw = dict(raw.get("flow", {}))
        flow_raw.setdefault("method", "semi_implicit" if n == 2 else "rk4")
        flow = FlowSettings(**flow_raw)

        cb = dict(raw.get("checks", {}))
        tolerances = dict(DEFAULT_TOLERANCES)
        unknown = set(cb.get("tolerances", {})) - set(tolerances)
        if unknown:
            raise ConfigError(f"unknown tolerance keys {sorted(unknown)}")
        tolerances.update(cb.get("tolerances", {}))
        enabled = tuple(cb.get("enabled", ALL_CHECKS))
        bad = set(enabled) - set(ALL_CHECKS)
        if bad:
            raise ConfigError(f"unknown checks {sorted(bad)}; available: {ALL_CHECKS}")
        lam = _number(cb.get("lambda", 0.0), "checks.lambda")
        if lam < 0:
            raise ConfigError("checks.lambda must be nonnegative")
        checks = ChecksSettings(lam, enabled, tolerances, EnergySampleSpec(**cb.get("energy", {})))

        initial = raw.get("initial", {"kind": "constant", "u0": 0.0})
        if "u0" not in initial:
            raise ConfigError("initial.u0 is required")
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario configuration: {exc!r}") from exc

    return ScenarioConfig(
        name=name or raw.get("name", "scenario"),
        raw=raw,
        spacetime=spacetime,
        points=points,
        initial=initial,
        flow=flow,
        checks=checks,
        output_dir=raw.get("output", {}).get("dir"),
        seed=int(raw.get("seed", 0)),
    )


def bundled_scenarios() -> list[str]:
    root = resources.files("imcf") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_scenario(name: str) -> ScenarioConfig:
    name = ALIASES.get(name, name)
    path = resources.files("imcf") / "scenarios" / f"{name}.json"
    if not path.is_file():
        raise ConfigError(f"no bundled scenario {name!r}; available: {bundled_scenarios()}")
    return from_dict(json.loads(path.read_text()), name)


def load_config(path_or_name: str | Path) -> ScenarioConfig:
    """Read a config file, or fall back to a bundled scenario of that name."""
    path = Path(path_or_name)
    if path.is_file():
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
        return from_dict(raw, raw.get("name", path.stem))
    name = str(path_or_name)
    if ALIASES.get(name, name) in bundled_scenarios():
        return load_scenario(name)
    raise ConfigError(f"config file not found: {path}")
