"""Brute-force and constructive validators, independent of the optimizer.

These exist to check the theory numerically at desk scale: channels built
through length-n source blocks must pass the single-letter screens, the
common-information construction must fail them, and exhaustive
enumeration must agree with the optimizer and the decoders on tiny
instances.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from ._parallel import pmap
from ._seeding import child_rng
from .feasibility import (
    MEMBERSHIP_TOL,
    AuxChannel,
    in_s_out1,
    in_s_out3,
)
from .probability import ProbTensor, SourceModel, iid_extend, join
from .regions import evaluate_channel, optimal_decoders


def sample_nletter_channel(
    src: SourceModel,
    n: int,
    sizes: tuple[int, int],
    rng: np.random.Generator,
    *,
    max_cells: int = 1 << 22,
) -> tuple[AuxChannel, ProbTensor]:
    """Random encoders on length-n source blocks, reduced to one letter.

    Draws Dirichlet kernels p(x1|u^n) and p(x2|v^n), forms the full block
    joint, and marginalizes onto the first letter to get the induced
    channel p(x1,x2|u1,v1). Returns (induced channel, block joint).
    """
    if n not in (1, 2, 3):
        raise ValueError(f"n must be in {{1,2,3}}, got {n}")
    nx1, nx2 = sizes
    nu, nv = src.nu, src.nv
    block = iid_extend(src.p_uv, n, max_cells=max_cells)
    na, nb = block.values.shape
    if na * nb * nx1 * nx2 > max_cells:
        raise ValueError("n-letter joint exceeds the configured memory cap")
    k1 = rng.dirichlet(np.ones(nx1), size=na)  # p(x1 | u^n)
    k2 = rng.dirichlet(np.ones(nx2), size=nb)  # p(x2 | v^n)
    full = block.values[:, :, None, None] * k1[:, None, :, None] * k2[None, :, None, :]
    joint_n = ProbTensor(("U^n", "V^n", "X1", "X2"), full, tol=1e-10)
    # first letter is the most significant digit of the block index
    per_letter = full.reshape(nu, na // nu, nv, nb // nv, nx1, nx2)
    first = per_letter.sum(axis=(1, 3))  # (U1, V1, X1, X2)
    p_uv = src.p_uv.values
    induced = first / p_uv[:, :, None, None]
    # unrealized (u1, v1) cells carry no information; give them a uniform slice
    dead = p_uv <= 0
    if dead.any():
        induced = np.where(dead[:, :, None, None], 1.0 / (nx1 * nx2), induced)
    return AuxChannel(induced), joint_n


@dataclass
class ValidationReport:
    """Aggregate of repeated induced-channel membership screening."""

    source_label: str
    n: int
    trials: int
    failures: int
    worst_out3_defect: float
    worst_out1_defect: float
    failure_artifacts: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {
            "source": self.source_label,
            "n": self.n,
            "trials": self.trials,
            "failures": self.failures,
            "worst_out3_defect": self.worst_out3_defect,
            "worst_out1_defect": self.worst_out1_defect,
            "ok": self.ok,
            "failure_artifacts": self.failure_artifacts,
        }


def validate_single_letter_conditions(
    src: SourceModel,
    n: int,
    trials: int,
    seed,
    *,
    sizes: tuple[int, int] | None = None,
    tol: float = MEMBERSHIP_TOL,
    source_label: str = "source",
    failure_dir: str | None = None,
    inject_adversarial=None,
) -> ValidationReport:
    """Screen many induced n-letter channels against both outer tests.

    Every induced channel must pass the singular-value conditions and the
    two chain conditions; any failure is recorded with enough context
    (trial seed, serialized channel) to reproduce it. ``inject_adversarial``
    lets a harness self-test confirm that a non-member is actually caught.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    sizes = sizes or (src.nu, src.nv)
    failures = 0
    worst3 = 0.0
    worst1 = 0.0
    artifacts: list[str] = []

    def screen_trial(t: int):
        rng = child_rng(seed, source_label, n, t)
        ch, _ = sample_nletter_channel(src, n, sizes, rng)
        return ch, f"{source_label}_n{n}_trial{t}"

    def check(ch: AuxChannel, label: str):
        nonlocal failures, worst3, worst1
        r3 = in_s_out3(ch, src, tol)
        r1 = in_s_out1(ch, tol)
        worst3 = max(worst3, r3.defect)
        worst1 = max(worst1, r1.defect)
        if not (r3.accepted and r1.accepted):
            failures += 1
            if failure_dir:
                os.makedirs(failure_dir, exist_ok=True)
                path = os.path.join(failure_dir, f"failure_{label}.json")
                with open(path, "w") as fh:
                    json.dump(
                        {
                            "label": label,
                            "seed": str(seed),
                            "out3": r3.to_dict(),
                            "out1": r1.to_dict(),
                            "channel": ch.values.tolist(),
                        },
                        fh,
                        indent=2,
                    )
                artifacts.append(path)

    for ch, label in pmap(screen_trial, range(trials)):
        check(ch, label)
    if inject_adversarial is not None:
        check(inject_adversarial, f"{source_label}_adversarial")

    return ValidationReport(
        source_label=source_label, n=n,
        trials=trials + (1 if inject_adversarial is not None else 0),
        failures=failures, worst_out3_defect=worst3, worst_out1_defect=worst1,
        failure_artifacts=artifacts,
    )


def common_info_channel(
    src: SourceModel, f1, f2, s_size: int
) -> AuxChannel:
    """Channel X1 = (f1(U), S), X2 = (f2(V), S) with S uniform and private.

    The shared component S forces the maximal correlation of (X1, X2) to
    one, so the result always satisfies the two chain conditions yet fails
    the singular-value screen whenever the source's maximal correlation is
    below one. ``s_size`` = 1 degenerates to independent deterministic
    encoders.
    """
    if s_size < 1:
        raise ValueError(f"s_size must be >= 1, got {s_size}")
    nu, nv = src.nu, src.nv
    f1v = np.array([int(f1(u)) if callable(f1) else int(f1[u]) for u in range(nu)])
    f2v = np.array([int(f2(v)) if callable(f2) else int(f2[v]) for v in range(nv)])
    n1 = int(f1v.max()) + 1
    n2 = int(f2v.max()) + 1
    vals = np.zeros((nu, nv, n1 * s_size, n2 * s_size))
    for u in range(nu):
        for v in range(nv):
            for s in range(s_size):
                vals[u, v, f1v[u] * s_size + s, f2v[v] * s_size + s] = 1.0 / s_size
    return AuxChannel(vals)


def grid_search_weighted_rate(
    src: SourceModel,
    d_pair: tuple[float, float],
    sizes: tuple[int, int],
    w: tuple[float, float],
    grid_step: float,
    *,
    feas_tol: float = 1e-9,
    return_channels: bool = False,
):
    """Exhaustive factorized-channel search on a probability grid.

    Enumerates every kernel pair whose rows lie on the simplex grid with
    spacing ``grid_step`` and returns the exact minimum weighted rate
    among distortion-feasible candidates (math.inf when the whole grid is
    infeasible). Only practical for tiny alphabets.
    """
    nx1, nx2 = sizes
    nu, nv = src.nu, src.nv
    levels = round(1.0 / grid_step)
    if abs(levels * grid_step - 1.0) > 1e-12:
        raise ValueError(f"grid step {grid_step} must divide 1 exactly")

    def simplex_rows(k: int) -> list[tuple[float, ...]]:
        rows = []
        for combo in itertools.product(range(levels + 1), repeat=k - 1):
            if sum(combo) <= levels:
                rest = levels - sum(combo)
                rows.append(tuple(c * grid_step for c in combo) + (rest * grid_step,))
        return rows

    rows1 = simplex_rows(nx1)
    rows2 = simplex_rows(nx2)
    kernels1 = [np.array(k) for k in itertools.product(rows1, repeat=nu)]
    kernels2 = [np.array(k) for k in itertools.product(rows2, repeat=nv)]

    best = math.inf
    channels = []
    for k1 in kernels1:
        for k2 in kernels2:
            ch_vals = np.einsum("ux,vy->uvxy", k1, k2)
            ch = AuxChannel(ch_vals)
            if return_channels:
                channels.append(ch)
            pa, pb = evaluate_channel(src, ch)
            if pa.ed1 > d_pair[0] + feas_tol or pa.ed2 > d_pair[1] + feas_tol:
                continue
            best = min(best, pa.weighted(*w), pb.weighted(*w))
    if return_channels:
        return best, channels
    return best


def exhaustive_decoder_check(joint: ProbTensor, src: SourceModel) -> dict:
    """Compare the per-cell decoders against full decoder-map enumeration.

    Enumerates every total map from the (x1, x2) grid into each
    reconstruction alphabet and verifies the closed-form decoders attain
    the minimum of both expected distortions. Exact equality is expected:
    both paths sum the same per-cell costs.
    """
    order = tuple(joint.axis_index(a) for a in ("U", "V", "X1", "X2"))
    j = np.transpose(joint.values, order)
    nu, nv, nx1, nx2 = j.shape
    n_uhat = src.d1.shape[1]
    n_vhat = src.d2.shape[1]
    cells = nx1 * nx2
    if cells > 4 or n_uhat > 3 or n_vhat > 3:
        raise ValueError("exhaustive decoder check is capped at 4 cells / 3 symbols")

    cost1 = np.einsum("uxy,uk->xyk", j.sum(axis=1), src.d1).reshape(cells, n_uhat)
    cost2 = np.einsum("vxy,vk->xyk", j.sum(axis=0), src.d2).reshape(cells, n_vhat)

    cell_idx = np.arange(cells)

    def enum_min(cost: np.ndarray, n_sym: int) -> float:
        # summed with the same numpy reduction the decoders use, so the
        # optimum matches to the last bit
        best = math.inf
        for assign in itertools.product(range(n_sym), repeat=cells):
            best = min(best, float(cost[cell_idx, assign].sum()))
        return best

    _, ed1, ed2 = optimal_decoders(joint, src)
    best1 = enum_min(cost1, n_uhat)
    best2 = enum_min(cost2, n_vhat)
    return {
        "ed1": ed1,
        "ed2": ed2,
        "enum_ed1": best1,
        "enum_ed2": best2,
        "matches": ed1 == best1 and ed2 == best2,
    }
