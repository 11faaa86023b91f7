"""Rate-region boundaries by weighted-rate search over channel sets.

For a channel p(x1,x2|u,v) the attainable rate pairs form the polytope

    R1 >= I(U,V; X1|X2),  R2 >= I(U,V; X2|X1),  R1+R2 >= I(U,V; X1,X2)

whose two corner points are (I(U,V;X1), I(U,V;X2|X1)) and
(I(U,V;X1|X2), I(U,V;X2)). A region bound for a feasible set is traced by
sweeping weight vectors over the first quadrant, minimizing the weighted
rate over sampled members of the set whose optimal-decoder distortions
meet the target, and convexifying the collected operating points (time
sharing is exact under convex mixing of the (R1,R2,Ed1,Ed2) quadruples).

Auxiliary alphabet sizes are user parameters; no cardinality bound is
known for the outer sets, so computed outer regions are heuristic
under-approximations of the true bound at those sizes. Every exported
artifact carries the sizes and this caveat.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ._core import evaluate_candidate
from ._seeding import child_rng
from .feasibility import (
    MEMBERSHIP_TOL,
    SET_IDS,
    AuxChannel,
    in_s_out3,
    product_channel,
)
from .probability import ProbTensor, SourceModel, mutual_information

log = logging.getLogger(__name__)

# Slack added to the distortion target when testing feasibility.
FEAS_TOL = 1e-9

# Deterministic encoder maps are enumerated (and injected into every
# search) while the number of map pairs stays below this cap.
ENUM_CAP = 4096

CARDINALITY_CAVEAT = (
    "Outer-bound regions are computed at fixed auxiliary alphabet sizes; "
    "no cardinality bound is known for the outer feasible sets, so these "
    "boundaries are heuristic under-approximations of the corresponding "
    "bound. Sizes are recorded alongside every region."
)

SUBSET_PAIRS = (
    ("in", "cap13"),
    ("in", "out1"),
    ("in", "out3"),
    ("cap13", "out1"),
    ("cap13", "out3"),
)


@dataclass(frozen=True)
class OperatingPoint:
    """One (rates, distortions) quadruple produced by a channel corner."""

    r1: float
    r2: float
    ed1: float
    ed2: float
    vertex: int  # 0 = (I(UV;X1), I(UV;X2|X1)), 1 = (I(UV;X1|X2), I(UV;X2))
    channel_id: str

    def weighted(self, w1: float, w2: float) -> float:
        return w1 * self.r1 + w2 * self.r2


@dataclass(frozen=True)
class DecoderPair:
    """Total reconstruction maps on the X1 x X2 grid."""

    u_hat: np.ndarray
    v_hat: np.ndarray


def optimal_decoders(
    joint: ProbTensor, src: SourceModel
) -> tuple[DecoderPair, float, float]:
    """Per-cell posterior-cost minimizing decoders and their distortions.

    Exactly optimal because the two distortion objectives separate; ties
    break to the lowest symbol index, zero-mass cells get symbol 0.
    """
    order = tuple(joint.axis_index(a) for a in ("U", "V", "X1", "X2"))
    j = np.transpose(joint.values, order)
    p_ux = j.sum(axis=1)  # (U, X1, X2)
    p_vx = j.sum(axis=0)  # (V, X1, X2)
    cost1 = np.einsum("uxy,uk->xyk", p_ux, src.d1)
    cost2 = np.einsum("vxy,vk->xyk", p_vx, src.d2)
    u_hat = cost1.argmin(axis=2)
    v_hat = cost2.argmin(axis=2)
    ed1 = float(cost1.min(axis=2).sum())
    ed2 = float(cost2.min(axis=2).sum())
    return DecoderPair(u_hat=u_hat, v_hat=v_hat), ed1, ed2


def rate_vertices(
    joint: ProbTensor, q_axis: str | None = None
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Two corner points of the rate polytope of a four-variable joint.

    With ``q_axis`` given, all mutual informations are conditioned on it.
    The two corners share their coordinate sum I(U,V; X1,X2 [|Q]).
    """
    given = (q_axis,) if q_axis else ()
    uv = ("U", "V")
    i_x1 = mutual_information(joint, uv, ("X1",), given)
    i_x2_given_x1 = mutual_information(joint, uv, ("X2",), given + ("X1",))
    i_x1_given_x2 = mutual_information(joint, uv, ("X1",), given + ("X2",))
    i_x2 = mutual_information(joint, uv, ("X2",), given)
    return (i_x1, i_x2_given_x1), (i_x1_given_x2, i_x2)


def evaluate_channel(src: SourceModel, ch: AuxChannel) -> tuple[OperatingPoint, OperatingPoint]:
    """Both rate corners of a channel, with optimal-decoder distortions."""
    ed1, ed2, r1a, r2a, r1b, r2b = evaluate_candidate(
        src.p_uv.values, ch.values, src.d1, src.d2
    )
    fid = ch.fingerprint()
    mk = lambda r1, r2, v: OperatingPoint(
        r1=max(r1, 0.0), r2=max(r2, 0.0), ed1=max(ed1, 0.0), ed2=max(ed2, 0.0),
        vertex=v, channel_id=fid,
    )
    return mk(r1a, r2a, 0), mk(r1b, r2b, 1)


def deterministic_channels(
    nu: int, nv: int, nx1: int, nx2: int, cap: int = ENUM_CAP
) -> list[AuxChannel]:
    """All channels with deterministic per-letter encoders X1=f(U), X2=g(V).

    These lie in every feasible set, so they are safe to inject into any
    search pool; the list is empty when the enumeration exceeds ``cap``.
    """
    count = nx1**nu * nx2**nv
    if count > cap:
        return []
    maps1 = list(np.ndindex(*(nx1,) * nu))
    maps2 = list(np.ndindex(*(nx2,) * nv))
    eye1 = np.eye(nx1)
    eye2 = np.eye(nx2)
    out = []
    for f in maps1:
        k1 = eye1[list(f)]
        for g in maps2:
            out.append(product_channel(k1, eye2[list(g)]))
    return out


def _ipf_couple(
    seed: np.ndarray, k1: np.ndarray, k2: np.ndarray,
    iters: int = 500, tol: float = 1e-10,
) -> np.ndarray | None:
    """Scale a positive 4-tensor until p(x1|u,v)=k1[u], p(x2|u,v)=k2[v].

    Classic iterative proportional fitting run on all (u,v) slices at
    once; returns None when it fails to converge within ``iters``.
    """
    vals = seed.copy()
    r_target = k1[:, None, :]  # (U,1,X1) broadcast over v
    c_target = k2[None, :, :]  # (1,V,X2)
    for _ in range(iters):
        rows = vals.sum(axis=3)
        vals *= (r_target / np.where(rows > 0, rows, 1.0))[:, :, :, None]
        cols = vals.sum(axis=2)
        vals *= (c_target / np.where(cols > 0, cols, 1.0))[:, :, None, :]
        rows = vals.sum(axis=3)
        if (
            np.abs(rows - r_target).max() < tol
            and np.abs(vals.sum(axis=2) - c_target).max() < tol
        ):
            return vals
    return None


def _dirichlet_kernel(rng: np.random.Generator, n_rows: int, n_cols: int) -> np.ndarray:
    return rng.dirichlet(np.ones(n_cols), size=n_rows)


def _dirichlet_channel(rng, nu, nv, nx1, nx2) -> np.ndarray:
    flat = rng.dirichlet(np.ones(nx1 * nx2), size=nu * nv)
    return flat.reshape(nu, nv, nx1, nx2)


def sample_channel(
    set_id: str,
    sizes: tuple[int, int, int, int],
    rng: np.random.Generator,
    src: SourceModel | None = None,
    *,
    membership_tol: float = MEMBERSHIP_TOL,
    max_attempts: int = 200,
) -> AuxChannel:
    """Draw one member of the named feasible set.

    ``sizes`` is (|U|, |V|, |X1|, |X2|). Samplers: "in" takes two
    symmetric-Dirichlet kernels; "out1" couples Dirichlet marginal kernels
    through per-(u,v) proportional fitting; "out3"/"cap13" rejection-sample
    against the singular-value test (falling back to an "in" draw, which
    belongs to every set, if acceptance stalls). The returned channel
    always passes its set's membership test at ``membership_tol``.
    """
    nu, nv, nx1, nx2 = sizes
    if set_id == "in":
        return product_channel(
            _dirichlet_kernel(rng, nu, nx1), _dirichlet_kernel(rng, nv, nx2)
        )
    if set_id == "out1":
        k1 = _dirichlet_kernel(rng, nu, nx1)
        k2 = _dirichlet_kernel(rng, nv, nx2)
        for attempt in range(50):
            coupled = _ipf_couple(_dirichlet_channel(rng, nu, nv, nx1, nx2), k1, k2)
            if coupled is not None:
                return AuxChannel(coupled)
            log.warning("coupling projection did not converge; resampling seed")
        raise RuntimeError("proportional fitting failed repeatedly")
    if set_id in ("out3", "cap13"):
        if src is None:
            raise ValueError(f"sampling {set_id!r} requires the source model")
        for attempt in range(max_attempts):
            if set_id == "out3":
                cand = AuxChannel(_dirichlet_channel(rng, nu, nv, nx1, nx2))
            else:
                cand = sample_channel("out1", sizes, rng)
            if in_s_out3(cand, src, membership_tol).accepted:
                return cand
        log.warning(
            "no %s acceptance in %d draws; falling back to a factorized sample",
            set_id, max_attempts,
        )
        return sample_channel("in", sizes, rng)
    raise ValueError(f"unknown set id {set_id!r}; expected one of {SET_IDS}")


def _project(
    set_id: str,
    raw: np.ndarray,
    src: SourceModel | None,
    membership_tol: float,
) -> AuxChannel | None:
    """Map a perturbed value tensor back into the named set (None = reject)."""
    raw = np.clip(raw, 0.0, None)
    slice_sums = raw.sum(axis=(2, 3), keepdims=True)
    if slice_sums.min() < 1e-9:
        return None
    raw = raw / slice_sums
    px1 = raw.sum(axis=3).mean(axis=1)
    px2 = raw.sum(axis=2).mean(axis=0)
    px1 = px1 / px1.sum(axis=1, keepdims=True)
    px2 = px2 / px2.sum(axis=1, keepdims=True)
    if set_id == "in":
        return product_channel(px1, px2)
    if set_id in ("out1", "cap13"):
        coupled = _ipf_couple(raw, px1, px2)
        if coupled is None:
            return None
        ch = AuxChannel(coupled)
        if set_id == "out1":
            return ch
        return ch if in_s_out3(ch, src, membership_tol).accepted else None
    if set_id == "out3":
        ch = AuxChannel(raw)
        return ch if in_s_out3(ch, src, membership_tol).accepted else None
    raise ValueError(f"unknown set id {set_id!r}")


@dataclass
class MinimizeResult:
    """Outcome of one weighted-rate search.

    ``status`` is "ok" or "infeasible_at_budget" (no sampled channel met
    the distortion target; this does not prove the problem infeasible).
    """

    value: float
    point: OperatingPoint | None
    channel: AuxChannel | None
    status: str
    evaluated: list[OperatingPoint] = field(default_factory=list)
    channels: dict[str, AuxChannel] = field(default_factory=dict)


def minimize_weighted_rate(
    set_id: str,
    src: SourceModel,
    d_pair: tuple[float, float],
    sizes: tuple[int, int],
    w: tuple[float, float],
    budget: int,
    seed,
    *,
    extra_channels=(),
    refine_steps: int = 24,
    membership_tol: float = MEMBERSHIP_TOL,
    enum_cap: int = ENUM_CAP,
) -> MinimizeResult:
    """Best weighted rate over sampled feasible channels, then refined.

    Evaluates (a) the deterministic-encoder enumeration when small enough,
    (b) any injected channels, (c) ``budget`` fresh samples from the set,
    keeping the better rate corner of each distortion-feasible candidate;
    the winner is then locally refined by perturb-project-accept steps.
    Fully deterministic given ``seed``.
    """
    w1, w2 = float(w[0]), float(w[1])
    if w1 < 0 or w2 < 0 or (w1 == 0 and w2 == 0):
        raise ValueError(f"weights must be nonnegative and not both zero: {w}")
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    seed_parts = seed if isinstance(seed, tuple) else (seed,)
    nx1, nx2 = sizes
    sizes4 = (src.nu, src.nv, nx1, nx2)
    d1_max, d2_max = d_pair[0] + FEAS_TOL, d_pair[1] + FEAS_TOL

    best_value = math.inf
    best_point = None
    best_channel = None
    evaluated: list[OperatingPoint] = []
    channels: dict[str, AuxChannel] = {}

    def consider(ch: AuxChannel):
        nonlocal best_value, best_point, best_channel
        pa, pb = evaluate_channel(src, ch)
        evaluated.append(pa)
        evaluated.append(pb)
        channels.setdefault(pa.channel_id, ch)
        if pa.ed1 > d1_max or pa.ed2 > d2_max:
            return
        for p in (pa, pb):
            val = p.weighted(w1, w2)
            if val < best_value:
                best_value, best_point, best_channel = val, p, ch

    for ch in deterministic_channels(*sizes4, cap=enum_cap):
        consider(ch)
    for ch in extra_channels:
        consider(ch)
    for i in range(budget):
        rng = child_rng(*seed_parts, "sample", i)
        consider(sample_channel(set_id, sizes4, rng, src, membership_tol=membership_tol))

    if best_channel is not None:
        current = best_channel.values
        for t in range(refine_steps):
            rng = child_rng(*seed_parts, "refine", t)
            sigma = 0.5 * (0.9**t) + 0.01
            proposal = current + rng.normal(0.0, sigma, size=current.shape)
            cand = _project(set_id, proposal, src, membership_tol)
            if cand is None:
                continue
            prev = best_value
            consider(cand)
            if best_value < prev:
                current = best_channel.values

    if best_point is None:
        return MinimizeResult(
            value=math.inf, point=None, channel=None,
            status="infeasible_at_budget", evaluated=evaluated, channels=channels,
        )
    return MinimizeResult(
        value=best_value, point=best_point, channel=best_channel,
        status="ok", evaluated=evaluated, channels=channels,
    )


@dataclass(frozen=True)
class BoundaryRow:
    theta: float
    w1: float
    w2: float
    point: OperatingPoint


@dataclass(frozen=True)
class SweepEntry:
    theta: float
    w1: float
    w2: float
    value: float  # inf when infeasible at budget
    status: str
    channel_id: str | None
    point: OperatingPoint | None = None


@dataclass
class RegionBoundary:
    """Operating points, sweep results and frontier of one set's trace."""

    set_id: str
    thetas: np.ndarray
    rows: list[BoundaryRow]
    on_frontier: list[bool]
    sweep: list[SweepEntry]
    hull_vertices: list[int]
    metadata: dict
    channels: dict[str, AuxChannel] = field(repr=False, default_factory=dict)
    winner_ids: list[str | None] = field(default_factory=list)

    @property
    def points(self) -> list[OperatingPoint]:
        return [r.point for r in self.rows]

    def frontier_points(self) -> list[OperatingPoint]:
        return [r.point for r, f in zip(self.rows, self.on_frontier) if f]

    def winner_channels(self) -> list[AuxChannel]:
        seen = {}
        for cid in self.winner_ids:
            if cid is not None and cid in self.channels:
                seen[cid] = self.channels[cid]
        return list(seen.values())

    def frontier_channels(self) -> list[AuxChannel]:
        seen = {}
        for r, f in zip(self.rows, self.on_frontier):
            if f and r.point.channel_id in self.channels:
                seen[r.point.channel_id] = self.channels[r.point.channel_id]
        return list(seen.values())


def _frontier_flags(
    pts: np.ndarray, feasible: np.ndarray, directions: int = 721
) -> np.ndarray:
    """Flag rows whose (R1,R2) is a lower-left extreme among feasible rows.

    A point is flagged when it wins the directional minimum for some
    weight direction in the closed first quadrant (ties broken toward
    smaller R1 then R2, so dominated ties are never flagged).
    """
    flags = np.zeros(len(pts), dtype=bool)
    idx = np.flatnonzero(feasible)
    if idx.size == 0:
        return flags
    r = pts[idx]
    winners = set()
    for th in np.linspace(0.0, math.pi / 2, directions):
        w = np.array([math.cos(th), math.sin(th)])
        vals = r @ w
        m = vals.min()
        tied = np.flatnonzero(vals <= m + 1e-12)
        # lexicographic tie-break: smallest R1, then smallest R2
        t = tied[np.lexsort((r[tied, 1], r[tied, 0]))[0]]
        winners.add((round(r[t, 0], 12), round(r[t, 1], 12)))
    for i in idx:
        if (round(pts[i, 0], 12), round(pts[i, 1], 12)) in winners:
            flags[i] = True
    return flags


def _hull_vertices(coords: np.ndarray) -> list[int]:
    """Vertex row indices of the 4-D convex hull (QJ fallback when flat)."""
    if len(coords) < 5:
        return sorted(range(len(coords)))
    try:
        from scipy.spatial import ConvexHull, QhullError
    except ImportError:  # pragma: no cover
        return []
    try:
        hull = ConvexHull(coords)
    except QhullError:
        try:
            hull = ConvexHull(coords, qhull_options="QJ")
        except QhullError:
            return []
    return sorted(int(i) for i in hull.vertices)


def trace_region(
    set_id: str,
    src: SourceModel,
    d_pair: tuple[float, float],
    sizes: tuple[int, int],
    weight_count: int,
    budget: int,
    seed,
    *,
    extra_channels=(),
    refine_steps: int = 24,
    membership_tol: float = MEMBERSHIP_TOL,
    enum_cap: int = ENUM_CAP,
) -> RegionBoundary:
    """Sweep weights over the quarter circle and convexify the results.

    ``extra_channels`` are evaluated at every weight in addition to the
    set's own samples (used to share known-good members between nested
    sets). The frontier is the lower-left extreme set of the collected
    distortion-feasible points; the 4-D hull over all collected
    (R1,R2,Ed1,Ed2) quadruples realizes time sharing.
    """
    if weight_count < 2:
        raise ValueError(f"weight count must be >= 2, got {weight_count}")
    thetas = np.linspace(0.0, math.pi / 2, weight_count)
    rows: list[BoundaryRow] = []
    sweep: list[SweepEntry] = []
    winner_ids: list[str | None] = []
    channels: dict[str, AuxChannel] = {}

    for j, th in enumerate(thetas):
        w = (math.cos(th), math.sin(th))
        res = minimize_weighted_rate(
            set_id, src, d_pair, sizes, w, budget, child_seed_parts(seed, set_id, j),
            extra_channels=extra_channels, refine_steps=refine_steps,
            membership_tol=membership_tol, enum_cap=enum_cap,
        )
        rows.extend(BoundaryRow(theta=float(th), w1=w[0], w2=w[1], point=p) for p in res.evaluated)
        channels.update(res.channels)
        if res.status == "ok":
            sweep.append(
                SweepEntry(float(th), w[0], w[1], res.value, "ok",
                           res.point.channel_id, res.point)
            )
            winner_ids.append(res.point.channel_id)
        else:
            sweep.append(SweepEntry(float(th), w[0], w[1], math.inf, res.status, None, None))
            winner_ids.append(None)
            log.warning("set %s: infeasible at budget for theta=%.4f", set_id, th)

    pts = np.array([[r.point.r1, r.point.r2] for r in rows]) if rows else np.zeros((0, 2))
    feas = np.array(
        [r.point.ed1 <= d_pair[0] + FEAS_TOL and r.point.ed2 <= d_pair[1] + FEAS_TOL for r in rows],
        dtype=bool,
    )
    flags = _frontier_flags(pts, feas) if rows else np.zeros(0, dtype=bool)
    coords = np.array(
        [[r.point.r1, r.point.r2, r.point.ed1, r.point.ed2] for r in rows]
    ) if rows else np.zeros((0, 4))
    metadata = {
        "set": set_id,
        "D": list(d_pair),
        "sizes": {"x1": sizes[0], "x2": sizes[1]},
        "weights": weight_count,
        "budget": budget,
        "seed": str(seed),
        "source_sha": source_fingerprint(src),
        "caveat": CARDINALITY_CAVEAT,
    }
    return RegionBoundary(
        set_id=set_id, thetas=thetas, rows=rows, on_frontier=list(map(bool, flags)),
        sweep=sweep, hull_vertices=_hull_vertices(coords), metadata=metadata,
        channels=channels, winner_ids=winner_ids,
    )


def child_seed_parts(seed, set_id: str, weight_index: int):
    """Stable per-(set, weight) seed tuple for the optimizer."""
    return (seed, set_id, weight_index) if isinstance(seed, (int, str)) else tuple(seed) + (set_id, weight_index)


def source_fingerprint(src: SourceModel) -> str:
    import hashlib

    h = hashlib.sha256()
    for arr in (src.p_uv.values, src.d1, src.d2):
        h.update(np.ascontiguousarray(np.round(arr, 12)).tobytes())
        h.update(repr(arr.shape).encode())
    return h.hexdigest()[:16]


@dataclass
class NestingReport:
    """Scalarized-value comparison across nested feasible sets."""

    eps: float
    thetas: list[float]
    values: dict[str, list[float]]
    violations: list[dict]
    ok: bool

    def to_dict(self) -> dict:
        vals = {
            s: [None if math.isinf(v) else v for v in col]
            for s, col in self.values.items()
        }
        return {
            "eps": self.eps,
            "thetas": self.thetas,
            "values": vals,
            "violations": self.violations,
            "ok": self.ok,
        }


def compare_regions(boundaries, eps: float = 1e-4) -> NestingReport:
    """Check the expected value ordering between nested sets per weight.

    For every subset pair (small in large) present, the small set's
    scalarized value must be >= the large set's minus ``eps`` at each
    shared weight. Boundaries must share source, distortion target, sizes
    and weight grid.
    """
    bl = list(boundaries)
    if not bl:
        raise ValueError("no boundaries to compare")
    ref = bl[0]
    for b in bl[1:]:
        for key in ("D", "sizes", "source_sha"):
            if b.metadata.get(key) != ref.metadata.get(key):
                raise ValueError(
                    f"metadata mismatch on {key!r}: {b.metadata.get(key)} vs {ref.metadata.get(key)}"
                )
        if len(b.thetas) != len(ref.thetas) or not np.allclose(b.thetas, ref.thetas):
            raise ValueError("weight grids differ between boundaries")
    by_set = {b.set_id: b for b in bl}
    thetas = [float(t) for t in ref.thetas]
    values = {s: [e.value for e in b.sweep] for s, b in by_set.items()}
    violations = []
    for small, large in SUBSET_PAIRS:
        if small not in by_set or large not in by_set:
            continue
        for j, th in enumerate(thetas):
            v_small, v_large = values[small][j], values[large][j]
            if math.isinf(v_small) and math.isinf(v_large):
                continue
            if math.isinf(v_large) and not math.isinf(v_small):
                violations.append(
                    {"theta": th, "small": small, "large": large, "gap": None,
                     "reason": f"{large} infeasible where {small} is feasible"}
                )
                continue
            if v_small < v_large - eps:
                violations.append(
                    {"theta": th, "small": small, "large": large,
                     "gap": v_large - v_small,
                     "reason": f"value({small}) < value({large}) - eps"}
                )
    return NestingReport(
        eps=eps, thetas=thetas, values=values, violations=violations,
        ok=not violations,
    )


def format_csv(boundary: RegionBoundary, header: str = "") -> str:
    """Fixed-column CSV ('.' decimals, 12 significant digits)."""
    lines = []
    if header:
        lines.append(f"# {header}")
    lines.append("set_id,theta,w1,w2,R1,R2,Ed1,Ed2,vertex,on_frontier")
    g = lambda x: f"{x:.12g}"
    for row, flag in zip(boundary.rows, boundary.on_frontier):
        p = row.point
        lines.append(
            ",".join(
                [
                    boundary.set_id, g(row.theta), g(row.w1), g(row.w2),
                    g(p.r1), g(p.r2), g(p.ed1), g(p.ed2),
                    str(p.vertex), "1" if flag else "0",
                ]
            )
        )
    return "\n".join(lines) + "\n"
