"""Loading and validation of region CSV/JSON artifacts.

This package is a pure view: it never recomputes rates or distortions,
it only reads what the region tool wrote. Inputs are cross-checked
through the config hash each CSV carries in its comment header, so
frontiers from different runs cannot be overlaid by accident.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass


class InputError(Exception):
    """Malformed or inconsistent plot inputs."""


EXPECTED_COLUMNS = [
    "set_id", "theta", "w1", "w2", "R1", "R2", "Ed1", "Ed2", "vertex", "on_frontier",
]

_SHA_RE = re.compile(r"config_sha=(\S+)")


@dataclass(frozen=True)
class FrontierCurve:
    """One set's frontier: unique (R1, R2) points sorted by R1."""

    set_id: str
    config_sha: str | None
    points: tuple[tuple[float, float], ...]

    def xs(self):
        return [p[0] for p in self.points]

    def ys(self):
        return [p[1] for p in self.points]


def load_curve(path: str) -> FrontierCurve:
    """Read one region CSV and extract its frontier polyline."""
    sha = None
    rows = []
    try:
        with open(path, newline="") as fh:
            header = None
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#"):
                    m = _SHA_RE.search(line)
                    if m:
                        sha = m.group(1)
                    continue
                if header is None:
                    header = line.split(",")
                    if header != EXPECTED_COLUMNS:
                        raise InputError(
                            f"{path}: unexpected columns {header}; "
                            f"expected {EXPECTED_COLUMNS}"
                        )
                    continue
                rows.append(next(csv.reader([line])))
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}")
    if not rows:
        raise InputError(f"{path}: no data rows")

    set_ids = {r[0] for r in rows}
    if len(set_ids) != 1:
        raise InputError(f"{path}: mixed set ids {sorted(set_ids)}")
    (set_id,) = set_ids

    pts = sorted(
        {(float(r[4]), float(r[5])) for r in rows if r[9] == "1"}
    )
    if not pts:
        raise InputError(f"{path}: no frontier points (on_frontier=1)")
    # collapse duplicate R1 values to the lower R2 (the upper is dominated)
    collapsed: list[tuple[float, float]] = []
    for x, y in pts:
        if collapsed and collapsed[-1][0] == x:
            continue  # pts sorted, first occurrence has the smaller R2
        collapsed.append((x, y))
    return FrontierCurve(set_id=set_id, config_sha=sha, points=tuple(collapsed))


def load_metadata(path: str) -> dict:
    try:
        with open(path) as fh:
            meta = json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read metadata {path}: {e}")
    except json.JSONDecodeError as e:
        raise InputError(f"metadata {path} is not valid JSON: {e}")
    for key in ("config", "config_sha"):
        if key not in meta:
            raise InputError(f"metadata {path} lacks {key!r}")
    return meta


def check_consistency(curves: list[FrontierCurve], meta: dict) -> None:
    """All curves must come from the run the metadata describes."""
    sha = meta["config_sha"]
    for c in curves:
        if c.config_sha is None:
            raise InputError(f"curve {c.set_id!r}: CSV carries no config hash")
        if c.config_sha != sha:
            raise InputError(
                f"curve {c.set_id!r}: config hash {c.config_sha} does not match "
                f"metadata {sha} (different source/D/sizes run?)"
            )
    ids = [c.set_id for c in curves]
    if len(set(ids)) != len(ids):
        raise InputError(f"duplicate set ids among inputs: {ids}")
