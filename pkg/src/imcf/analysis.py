"""Checks of the quantitative laws of the flow against a recorded trajectory.

Every check returns a :class:`CheckReport`; ``passed`` is False exactly when
the measured violation exceeds the tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, GeometryError
from .flow import FlowTrajectory
from .hypersurface import CauchyGrid, GraphState
from .spacetime import WarpedSpacetime, ricci_nu_nu


@dataclass
class CheckReport:
    name: str
    passed: bool
    violation: float
    tolerance: float
    law: str
    status: str = ""
    details: dict = field(default_factory=dict)
    table: dict[str, list] = field(default_factory=dict)

    def __post_init__(self):
        if not self.status:
            self.status = "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "status": self.status,
            "violation": self.violation,
            "tolerance": self.tolerance,
            "law": self.law,
            "details": self.details,
            "table": self.table,
        }

    def summary_line(self) -> str:
        return (
            f"{self.status.upper():>12}  {self.name:<22} violation={self.violation:.3e} "
            f"tol={self.tolerance:.1e}"
        )


def _outcome(name, violation, tol, law, **kw) -> CheckReport:
    violation = float(violation)
    return CheckReport(name, bool(violation <= tol), violation, float(tol), law, **kw)


def check_area_law(traj: FlowTrajectory, tol: float = 1e-5) -> CheckReport:
    """Area must equal area(0) exp(-t), equivalently area(0) (1 - tau)^n."""
    t, tau, A = traj["t"], traj["tau"], traj["area"]
    ratio = A / A[0]
    log_dev = np.abs(np.log(ratio) + t)
    tau_dev = np.abs(ratio - (1.0 - tau) ** traj.n)
    violation = max(log_dev.max(), tau_dev.max())
    return _outcome(
        "area_law",
        violation,
        tol,
        "area(t) = area(0) exp(-t) = area(0) (1 - tau)^n",
        details={
            "max_log_deviation": float(log_dev.max()),
            "max_tau_deviation": float(tau_dev.max()),
        },
        table={"t": t.tolist(), "log_deviation": log_dev.tolist()},
    )


def exponential_rate(n: int, lam: float, c: float) -> float:
    """epsilon = (1/n)(1 - lam/c)."""
    if lam == 0:
        return 1.0 / n
    return (1.0 - lam / c) / n


def midpoint_constant(n: int, lam: float, h_min0: float) -> float:
    """c halfway between lam and f(0) = H_min(0)^2 / n."""
    f0 = h_min0**2 / n
    if not f0 > lam:
        raise ContractViolation(
            f"H_min(0)^2 / n = {f0!r} must exceed lambda = {lam!r} (equivalently H > sqrt(n lambda))"
        )
    return 0.5 * (lam + f0)


def check_H_exponential_bound(traj: FlowTrajectory, lam: float = 0.0, slack: float = 1e-3) -> CheckReport:
    """H_min(t) >= exp(eps t) H_min(0) with eps from the midpoint choice of c."""
    n = traj.n
    t, h = traj["t"], traj["H_min"]
    c = midpoint_constant(n, lam, h[0])
    eps = exponential_rate(n, lam, c)
    floor = np.exp(eps * t) * h[0]
    shortfall = np.maximum(0.0, (floor - h) / floor)
    c0 = h * np.exp(-t / n)
    return _outcome(
        "H_exponential_bound",
        shortfall.max(),
        slack,
        "H >= exp(eps t) inf H(0), eps = (1/n)(1 - lambda/c)",
        details={"c": c, "epsilon": eps, "c0_estimate": float(c0.min())},
        table={"t": t.tolist(), "H_min": h.tolist(), "floor": floor.tolist()},
    )


def w_ceiling(n: int, lam: float, h_min0: float, w0: float) -> tuple[float, float]:
    """Ceiling for sup w without slack, and the epsilon it used."""
    if lam == 0:
        return w0, 1.0 / n
    eps = exponential_rate(n, lam, midpoint_constant(n, lam, h_min0))
    return w0 * math.exp(lam / (h_min0**2 * 2.0 * eps)), eps


def check_w_bounded(traj: FlowTrajectory, lam: float = 0.0, slack: float = 1e-3) -> CheckReport:
    """sup w = exp(t/n) / H_min stays below its integrated ceiling.

    With lam = 0 sup w must also be non-increasing: each value may exceed
    the running minimum of earlier values by at most ``slack`` (relative).
    """
    n = traj.n
    w = traj["sup_w"]
    ceiling, eps = w_ceiling(n, lam, traj["H_min"][0], w[0])
    violation = float(np.max(w / ceiling - 1.0))
    details = {"C_star": ceiling * (1.0 + slack), "epsilon": eps}
    if lam == 0:
        running = np.minimum.accumulate(w)
        rise = float(np.max(w[1:] / running[:-1] - 1.0)) if len(w) > 1 else 0.0
        details["max_rise"] = rise
        violation = max(violation, rise)
    return _outcome(
        "w_bounded",
        max(violation, 0.0),
        slack,
        "w = exp(t/n) / H stays bounded",
        details=details,
        table={"t": traj["t"].tolist(), "sup_w": w.tolist()},
    )


def _identity_terms(state: GraphState):
    s = state.spacetime
    nu = state.nu
    ric = ricci_nu_nu(s, state.u, nu[0], np.sum(nu[1:] ** 2, axis=0))
    f = 1.0 / state.H
    drift = state.drift()
    advect = np.sum(drift * state.grid.gradient(f), axis=0)
    # D/Dt f - H^-2 Lap f + H^-2 (|A|^2 + Ric) f = 0, solved for the Eulerian part
    h_term = advect - state.laplace_beltrami(f) / state.H**2 + (state.normA2 + ric) * f / state.H**2
    g_term = state.grid.divergence(state.sqrt_g * drift) / state.sqrt_g + 1.0
    return f, np.log(state.sqrt_g), h_term, g_term


def time_derivative_weights(times, center: int, width: int = 5) -> tuple[np.ndarray, slice]:
    """Weights of the derivative at ``times[center]`` from a polynomial fit

    through ``width`` consecutive samples (exact for degree width - 1).
    """
    lo = min(max(center - width // 2, 0), len(times) - width)
    window = slice(lo, lo + width)
    ts = np.asarray(times[window], dtype=float)
    scale = max(ts[-1] - ts[0], np.finfo(float).tiny)
    x = (ts - times[center]) / scale
    vander = np.vander(x, width, increasing=True).T
    rhs = np.zeros(width)
    rhs[1] = 1.0
    return np.linalg.solve(vander, rhs) / scale, window


def evolution_residuals(
    times,
    snapshots,
    grid: CauchyGrid,
    s: WarpedSpacetime,
    groups=None,
    width: int = 5,
    relative: bool = False,
):
    """Max residuals of the H^-1 and sqrt(g) evolution identities per snapshot.

    Time derivatives only combine snapshots of the same group (one burst of
    consecutive steps). A group of at least ``width`` snapshots gets a
    polynomial-fit derivative at each member (order width - 1 in the
    spacing); smaller groups fall back to consecutive pairs with the other
    terms averaged over both ends (order 2). Singleton groups are skipped.

    ``relative`` divides the H^-1 residual by the largest |d/dt H^-1| on the
    snapshot (the sqrt(g) residual is already relative, d/dt log sqrt g = -1).
    """
    times = np.asarray(times, dtype=float)
    groups = np.zeros(len(times), dtype=int) if groups is None else np.asarray(groups)
    states = [GraphState(grid, s, u, t) for t, u in zip(times, snapshots)]
    terms = [_identity_terms(st) for st in states]
    res_h, res_g, at = [], [], []

    def emit(f_dot, lg_dot, h_term, g_term, when):
        scale = float(np.max(np.abs(f_dot))) if relative else 1.0
        res_h.append(float(np.max(np.abs(f_dot + h_term))) / scale)
        res_g.append(float(np.max(np.abs(lg_dot + g_term))))
        at.append(when)

    for gid in np.unique(groups):
        idx = np.flatnonzero(groups == gid)
        if len(idx) >= width:
            gt = times[idx]
            for pos, k in enumerate(idx):
                w, window = time_derivative_weights(gt, pos, width)
                members = idx[window]
                f_dot = sum(wi * terms[j][0] for wi, j in zip(w, members))
                lg_dot = sum(wi * terms[j][1] for wi, j in zip(w, members))
                emit(f_dot, lg_dot, terms[k][2], terms[k][3], times[k])
        else:
            for k1, k2 in zip(idx[:-1], idx[1:]):
                dt = times[k2] - times[k1]
                a, b = terms[k1], terms[k2]
                emit(
                    (b[0] - a[0]) / dt,
                    (b[1] - a[1]) / dt,
                    0.5 * (a[2] + b[2]),
                    0.5 * (a[3] + b[3]),
                    0.5 * (times[k1] + times[k2]),
                )
    return np.array(at), np.array(res_h), np.array(res_g)


def check_evolution_identities(
    times, snapshots, grid: CauchyGrid, s: WarpedSpacetime, tol: float = 1e-3, groups=None
) -> CheckReport:
    law = "d/dt H^-1 - H^-2 Lap H^-1 = -H^-2 (|A|^2 + Ric(nu,nu)) H^-1 and d/dt sqrt g = -sqrt g"
    if len(snapshots) < 2 or (groups is not None and len(set(groups)) == len(groups)):
        return CheckReport("evolution_identities", True, 0.0, tol, law, status="skipped",
                           details={"reason": "no group holds two or more snapshots"})
    try:
        mids, rh, rg = evolution_residuals(times, snapshots, grid, s, groups, relative=True)
    except GeometryError as exc:
        return CheckReport("evolution_identities", True, 0.0, tol, law, status="skipped",
                           details={"reason": f"inadmissible snapshot: {exc}"})
    violation = max(rh.max(), rg.max()) if len(mids) else 0.0
    return _outcome(
        "evolution_identities",
        violation,
        tol,
        law,
        details={
            "max_relative_residual_Hinv": float(rh.max()),
            "max_residual_log_sqrt_g": float(rg.max()),
        },
        table={"t": mids.tolist(), "residual_Hinv": rh.tolist(), "residual_sqrt_g": rg.tolist()},
    )


def lifespan_bound_value(n: int, lam: float, h0: float) -> float:
    """n H0 / (H0^2 - n lam); requires H0 > sqrt(n lam)."""
    if not h0 > math.sqrt(n * lam):
        raise ContractViolation(
            f"lifespan bound needs H0 > sqrt(n lambda) = {math.sqrt(n * lam)!r}, got {h0!r}"
        )
    return n * h0 / (h0 * h0 - n * lam)


def lifespan_bound(state: GraphState, s: WarpedSpacetime, lam: float = 0.0) -> CheckReport:
    """Remaining proper time x0_max - min u against the curvature bound.

    In lapse-one Gaussian coordinates no future timelike curve from a point
    at height u gains more proper time than x0_max - u, and the vertical line
    attains it, so the maximal length is exact.
    """
    h0 = float(state.H.min())
    bound = lifespan_bound_value(s.n, lam, h0)
    lmax = s.x0_max - float(state.u.min())
    return _outcome(
        "lifespan_bound",
        max(0.0, lmax - bound),
        0.0,
        "L(gamma) <= n H0 / (H0^2 - n lambda)",
        details={"L_max": lmax, "bound": bound, "H0": h0},
    )


def _envelope_tail_start(r: np.ndarray, tol: float) -> int:
    """Smallest k with r[j] <= (1 + tol) min(r[k:j]) for every j > k."""
    k = len(r) - 1
    suffix_max = -np.inf
    for i in range(len(r) - 2, -1, -1):
        suffix_max = max(suffix_max, r[i + 1])
        if suffix_max > (1.0 + tol) * r[i]:
            break
        k = i
    return k


def check_lifespan(
    traj: FlowTrajectory,
    s: WarpedSpacetime,
    lam: float = 0.0,
    envelope_tol: float = 1e-3,
    min_tail_fraction: float = 0.5,
) -> CheckReport:
    """Lifespan bound at every record, plus the (1 - tau) envelope of the tail."""
    n = traj.n
    h0 = traj["H_min"]
    gate = math.sqrt(n * lam)
    if np.any(h0 <= gate):
        raise ContractViolation(f"H_min must exceed sqrt(n lambda) = {gate!r} at every record")
    bound = n * h0 / (h0**2 - n * lam)
    lmax = s.x0_max - traj["u_min"]
    excess = float(np.max(lmax - bound))

    ratio = lmax / (1.0 - traj["tau"])
    k = _envelope_tail_start(ratio, envelope_tol)
    tail_fraction = (len(ratio) - k) / len(ratio)
    envelope_ok = len(ratio) - k >= 2 and tail_fraction >= min_tail_fraction
    passed = excess <= 0.0 and envelope_ok
    return CheckReport(
        "lifespan",
        passed,
        max(excess, 0.0),
        0.0,
        "L <= n H0/(H0^2 - n lambda); L <= c (1 - tau) for tau >= tau0",
        details={
            "tau0": float(traj["tau"][k]),
            "c": float(ratio[k:].max()),
            "tail_fraction": tail_fraction,
            "envelope_ok": envelope_ok,
            "min_bound_gap": float(np.min(bound - lmax)),
        },
        table={"tau": traj["tau"].tolist(), "L_max": lmax.tolist(), "bound": bound.tolist()},
    )


def predicted_crossing_time(s: WarpedSpacetime, u_low: float, stop_margin: float) -> float:
    """Flow time for the coordinate slice at ``u_low`` to reach the stop height.

    Slices stay slices and move by du/dt = 1/H = -a/(n a'), so the time is
    n log(a(u_low) / a(u_stop)). Leaves starting above the slice ``u_low``
    reach the stop height no later than this.
    """
    u_stop = s.x0_max - stop_margin * (s.x0_max - s.x0_min)
    return s.n * math.log(float(s.a(u_low)) / float(s.a(u_stop)))


def check_singularity_approach(
    traj: FlowTrajectory, s: WarpedSpacetime, stop_margin: float = 1e-3, time_tol: float = 0.01
) -> CheckReport:
    """u_min strictly increasing; runs long enough must hit the stop margin."""
    u_min = traj["u_min"]
    drops = int(np.sum(np.diff(u_min) <= 0))
    t_star = predicted_crossing_time(s, float(u_min[0]), stop_margin)
    t_final = float(traj["t"][-1])
    details = {
        "termination": traj.termination,
        "predicted_crossing_time": t_star,
        "final_time": t_final,
        "final_gap": float(s.x0_max - u_min[-1]),
        "non_increasing_steps": drops,
    }
    law = "inf u(t) -> x0_max"
    if traj.t_end < t_star:
        status = "inconclusive" if drops == 0 else "fail"
        details["reason"] = "t_end is below the predicted crossing time"
        return CheckReport("singularity_approach", drops == 0, float(drops), 0.0, law,
                           status=status, details=details)
    late = max(0.0, t_final / t_star - 1.0 - time_tol)
    stopped = traj.termination == "singularity"
    violation = drops + late + (0.0 if stopped else 1.0)
    return _outcome("singularity_approach", violation, 0.0, law, details=details)


def _precondition_failure(name: str, law: str, exc: Exception) -> CheckReport:
    return CheckReport(name, False, math.inf, 0.0, law, status="fail",
                       details={"reason": f"precondition violated: {exc}"})


def run_checks(traj: FlowTrajectory, config, tol_scale: float = 1.0) -> dict[str, CheckReport]:
    """Every enabled check of ``config.checks`` on ``traj``, keyed by name."""
    checks = config.checks
    lam = checks.lam
    s = config.spacetime
    runners = {
        "area_law": lambda: check_area_law(traj, checks.tol("area_law", tol_scale)),
        "H_exponential_bound": lambda: check_H_exponential_bound(
            traj, lam, checks.tol("H_exponential_bound", tol_scale)
        ),
        "w_bounded": lambda: check_w_bounded(traj, lam, checks.tol("w_bounded", tol_scale)),
        "evolution_identities": lambda: check_evolution_identities(
            traj.snapshot_times, traj.snapshots, config.grid, s,
            checks.tol("evolution_identities", tol_scale), traj.snapshot_groups or None,
        ),
        "lifespan": lambda: check_lifespan(
            traj, s, lam, checks.tol("lifespan_envelope", tol_scale)
        ),
        "singularity_approach": lambda: check_singularity_approach(
            traj, s, config.flow.stop_margin, checks.tol("crossing_time", tol_scale)
        ),
    }
    reports = {}
    for name in sorted(checks.enabled):
        try:
            reports[name] = runners[name]()
        except ContractViolation as exc:
            reports[name] = _precondition_failure(name, "hypothesis of the law", exc)
    return reports
