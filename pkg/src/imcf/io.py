"""CSV and JSON emission for trajectories, snapshots and check reports.

Floats are written with ``repr`` (shortest round-trip form) so outputs are
byte-reproducible and re-read exactly.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .flow import RECORD_FIELDS, FlowTrajectory


def _fmt(x) -> str:
    return repr(float(x))


def _header(config_hash: str, **meta) -> str:
    items = " ".join(f"{k}={v}" for k, v in meta.items())
    return f"# config_sha256={config_hash} {items}".rstrip() + "\n"


def _parse_header(line: str) -> dict:
    if not line.startswith("#"):
        raise ValueError("missing '# config_sha256=...' header line")
    fields = {}
    for item in line[1:].split():
        key, _, value = item.partition("=")
        fields[key] = value
    return fields


def write_trajectory(traj: FlowTrajectory, out_dir: Path, config_hash: str) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "trajectory.csv"
    t_end = traj.t_end if math.isfinite(traj.t_end) else "inf"
    lines = [
        _header(config_hash, n=traj.n, termination=traj.termination, t_end=_fmt(t_end)),
        ",".join(RECORD_FIELDS) + "\n",
    ]
    cols = [traj.records[name] for name in RECORD_FIELDS]
    for row in zip(*cols):
        lines.append(",".join(_fmt(x) for x in row) + "\n")
    path.write_text("".join(lines))

    snap_dir = out_dir / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    for old in snap_dir.glob("snapshot_*.csv"):
        old.unlink()
    groups = traj.snapshot_groups or [0] * len(traj.snapshots)
    for k, (t, u, grp) in enumerate(zip(traj.snapshot_times, traj.snapshots, groups)):
        write_snapshot(snap_dir / f"snapshot_{k:05d}.csv", t, u, config_hash, grp)
    return path


def write_snapshot(path: Path, t: float, u: np.ndarray, config_hash: str, group: int = 0) -> None:
    """Nodal u; one row per index of the first axis (n = 2 rows hold the second axis)."""
    shape = "x".join(str(m) for m in u.shape)
    rows = u.reshape(u.shape[0], -1)
    lines = [_header(config_hash, t=_fmt(t), shape=shape, group=group)]
    lines.extend(",".join(_fmt(x) for x in row) + "\n" for row in rows)
    Path(path).write_text("".join(lines))


def read_snapshot(path: Path) -> tuple[float, np.ndarray, int]:
    text = Path(path).read_text().splitlines()
    meta = _parse_header(text[0])
    shape = tuple(int(m) for m in meta["shape"].split("x"))
    u = np.loadtxt(text[1:], delimiter=",", ndmin=2).reshape(shape)
    return float(meta["t"]), u, int(meta.get("group", 0))


def read_trajectory(path: Path, with_snapshots: bool = True) -> FlowTrajectory:
    path = Path(path)
    text = path.read_text().splitlines()
    meta = _parse_header(text[0])
    names = text[1].split(",")
    if tuple(names) != RECORD_FIELDS:
        raise ValueError(f"{path}: unexpected columns {names}")
    data = np.loadtxt(text[2:], delimiter=",", ndmin=2)
    records = {name: data[:, k].copy() for k, name in enumerate(names)}
    traj = FlowTrajectory(
        n=int(meta["n"]),
        records=records,
        termination=meta.get("termination", "t_end"),
        t_end=float(meta.get("t_end", "inf")),
        meta={"config_hash": meta.get("config_sha256")},
    )
    snap_dir = path.parent / "snapshots"
    if with_snapshots and snap_dir.is_dir():
        for snap in sorted(snap_dir.glob("snapshot_*.csv")):
            t, u, grp = read_snapshot(snap)
            traj.snapshot_times.append(t)
            traj.snapshots.append(u)
            traj.snapshot_groups.append(grp)
    return traj


def write_report(reports: dict, path: Path, config_hash: str) -> None:
    doc = {
        "config_sha256": config_hash,
        "checks": {name: reports[name].to_json() for name in sorted(reports)},
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True, allow_nan=True) + "\n")
