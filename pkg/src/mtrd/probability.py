"""Exact finite-alphabet probability calculus.

Named-axis dense tensors, marginalization, Bayes-rule conditionals,
i.i.d. extensions and information measures in bits. Everything here is a
pure function on immutable values; all downstream bound computations are
built on top of these primitives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Tolerance for tensors built from user input vs. tensors produced by
# arithmetic (sums of ~1e4 doubles accumulate roughly 1e-12 of error).
CONSTRUCT_TOL = 1e-12
ARITH_TOL = 1e-10

# Conditioning assignments with less mass than this are treated as
# unrealized symbols (flagged undefined, skipped by membership checks).
MASS_FLOOR = 1e-12

LOG2 = np.log(2.0)


class ProbTensor:
    """Nonnegative tensor with unique axis labels summing to one.

    The universal carrier for joints over subsets of {U, V, X1, X2, Q}
    and their n-fold extensions.
    """

    __slots__ = ("axes", "values")

    def __init__(self, axes: Sequence[str], values, *, tol: float = CONSTRUCT_TOL):
        axes = tuple(str(a) for a in axes)
        if len(set(axes)) != len(axes):
            raise ValueError(f"axis labels must be unique, got {axes}")
        vals = np.array(values, dtype=float)
        if vals.ndim != len(axes):
            raise ValueError(
                f"{len(axes)} axes given but values have {vals.ndim} dimensions"
            )
        if vals.size == 0:
            raise ValueError("empty probability tensor")
        low = vals.min()
        if low < -tol:
            raise ValueError(f"negative probability {low}")
        if low < 0.0:
            vals = np.where(vals < 0.0, 0.0, vals)
        total = vals.sum()
        if abs(total - 1.0) > tol:
            raise ValueError(f"probabilities sum to {total}, expected 1 (tol {tol})")
        vals.flags.writeable = False
        self.axes = axes
        self.values = vals

    @property
    def sizes(self) -> dict[str, int]:
        return dict(zip(self.axes, self.values.shape))

    def axis_index(self, axis: str) -> int:
        try:
            return self.axes.index(axis)
        except ValueError:
            raise KeyError(f"unknown axis {axis!r}; tensor has {self.axes}") from None

    def __repr__(self):
        shape = "x".join(str(s) for s in self.values.shape)
        return f"ProbTensor(axes={self.axes}, shape={shape})"


@dataclass(frozen=True)
class Kernel:
    """Conditional distribution p(target | given).

    ``values`` is indexed by the given axes first, then the target axes.
    Slices for conditioning assignments with (near-)zero mass are flagged
    in ``defined`` and zero-filled, never fabricated.
    """

    target: tuple[str, ...]
    given: tuple[str, ...]
    values: np.ndarray
    defined: np.ndarray  # bool, one flag per given-assignment

    def __post_init__(self):
        ng = len(self.given)
        slice_sums = self.values.reshape(self.values.shape[:ng] + (-1,)).sum(axis=-1)
        bad = self.defined & (np.abs(slice_sums - 1.0) > ARITH_TOL)
        if bad.any():
            raise ValueError("defined kernel slice does not sum to 1")


@dataclass(frozen=True)
class SourceModel:
    """Source joint p(u, v) with the two distortion matrices d1, d2."""

    p_uv: ProbTensor
    d1: np.ndarray = field(repr=False)  # |U| x |Uhat|, entrywise >= 0
    d2: np.ndarray = field(repr=False)  # |V| x |Vhat|

    def __post_init__(self):
        if len(self.p_uv.axes) != 2:
            raise ValueError("source joint must have exactly two axes")
        nu, nv = self.p_uv.values.shape
        d1 = np.asarray(self.d1, dtype=float)
        d2 = np.asarray(self.d2, dtype=float)
        if d1.ndim != 2 or d1.shape[0] != nu:
            raise ValueError(f"d1 must have {nu} rows, got shape {d1.shape}")
        if d2.ndim != 2 or d2.shape[0] != nv:
            raise ValueError(f"d2 must have {nv} rows, got shape {d2.shape}")
        if d1.min() < 0 or d2.min() < 0:
            raise ValueError("distortion matrices must be entrywise nonnegative")
        object.__setattr__(self, "d1", d1)
        object.__setattr__(self, "d2", d2)

    @property
    def nu(self) -> int:
        return self.p_uv.values.shape[0]

    @property
    def nv(self) -> int:
        return self.p_uv.values.shape[1]


def dsbs(p: float) -> ProbTensor:
    """Doubly symmetric binary source: uniform U, V = U flipped w.p. p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability must be in [0,1], got {p}")
    q = 0.5 * np.array([[1.0 - p, p], [p, 1.0 - p]])
    return ProbTensor(("U", "V"), q)


def hamming(n: int, m: int | None = None) -> np.ndarray:
    """Hamming distortion matrix: 0 on the diagonal, 1 elsewhere."""
    m = n if m is None else m
    return 1.0 - np.eye(n, m)


def tensor_to_config(t: ProbTensor) -> dict:
    """JSON-ready dict: axis labels, sizes, row-major values."""
    return {
        "axes": list(t.axes),
        "sizes": [int(s) for s in t.values.shape],
        "values": t.values.tolist(),
    }


def tensor_from_config(cfg: dict) -> ProbTensor:
    t = ProbTensor(cfg["axes"], cfg["values"])
    sizes = cfg.get("sizes")
    if sizes is not None and tuple(sizes) != t.values.shape:
        raise ValueError(f"declared sizes {sizes} do not match values {t.values.shape}")
    return t


def source_to_config(src: SourceModel) -> dict:
    return {
        "joint": tensor_to_config(src.p_uv),
        "d1": src.d1.tolist(),
        "d2": src.d2.tolist(),
    }


def source_from_config(cfg: dict) -> SourceModel:
    return SourceModel(
        p_uv=tensor_from_config(cfg["joint"]),
        d1=np.asarray(cfg["d1"], dtype=float),
        d2=np.asarray(cfg["d2"], dtype=float),
    )


def _resolve(t: ProbTensor, axes: Iterable[str]) -> tuple[int, ...]:
    return tuple(t.axis_index(a) for a in axes)


def marginal(t: ProbTensor, keep: Iterable[str]) -> ProbTensor:
    """Sum out every axis not in ``keep`` (result keeps t's axis order)."""
    keep = tuple(keep)
    _resolve(t, keep)  # validates labels
    kept = tuple(a for a in t.axes if a in keep)
    drop = tuple(i for i, a in enumerate(t.axes) if a not in keep)
    vals = t.values.sum(axis=drop) if drop else t.values
    return ProbTensor(kept, vals, tol=ARITH_TOL)


def conditional(t: ProbTensor, target: Iterable[str], given: Iterable[str]) -> Kernel:
    """Bayes-rule kernel p(target | given) with undefined slices flagged."""
    target = tuple(target)
    given = tuple(given)
    if set(target) & set(given):
        raise ValueError(f"target {target} and given {given} overlap")
    joint = marginal(t, target + given)
    # reorder to (given..., target...)
    order = _resolve(joint, given + target)
    vals = np.transpose(joint.values, order)
    ng = len(given)
    mass = vals.reshape(vals.shape[:ng] + (-1,)).sum(axis=-1)
    defined = mass > MASS_FLOOR
    safe = np.where(defined, mass, 1.0)
    cond = vals / safe.reshape(safe.shape + (1,) * len(target))
    cond = np.where(
        defined.reshape(defined.shape + (1,) * len(target)), cond, 0.0
    )
    return Kernel(target=target, given=given, values=cond, defined=defined)


def iid_extend(p: ProbTensor, n: int, *, max_cells: int = 1 << 24) -> ProbTensor:
    """n-fold i.i.d. extension of a two-axis joint.

    Letter blocks are flattened C-style with letter 1 most significant, so
    the extension of the joint matrix is exactly its n-fold Kronecker
    power.
    """
    if len(p.axes) != 2:
        raise ValueError("iid_extend expects a two-axis joint")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n == 1:
        return p
    na, nb = p.values.shape
    if (na * nb) ** n > max_cells:
        raise ValueError(
            f"extension would hold {(na * nb) ** n} cells (cap {max_cells})"
        )
    out = p.values
    for _ in range(n - 1):
        out = np.einsum("ab,cd->acbd", out, p.values).reshape(
            out.shape[0] * na, out.shape[1] * nb
        )
    a, b = p.axes
    return ProbTensor((f"{a}^{n}", f"{b}^{n}"), out, tol=ARITH_TOL)


def join(source: ProbTensor, channel) -> ProbTensor:
    """Compose p(u,v) with p(x1,x2|u,v) into the four-variable joint."""
    if len(source.axes) != 2:
        raise ValueError("source must be a two-axis joint")
    ch = np.asarray(getattr(channel, "values", channel), dtype=float)
    if ch.ndim != 4 or ch.shape[:2] != source.values.shape:
        raise ValueError(
            f"channel shape {ch.shape} does not match source {source.values.shape}"
        )
    vals = source.values[:, :, None, None] * ch
    return ProbTensor(source.axes + ("X1", "X2"), vals, tol=ARITH_TOL)


def _entropy_of(values: np.ndarray) -> float:
    """Shannon entropy in bits with the 0 log 0 := 0 convention."""
    nz = values[values > 0]
    return float(-(nz * (np.log(nz) / LOG2)).sum())


def entropy(t: ProbTensor, axes: Iterable[str] | None = None) -> float:
    """H(axes) in bits (all axes when omitted)."""
    if axes is None:
        return _entropy_of(t.values)
    return _entropy_of(marginal(t, tuple(axes)).values)


def conditional_entropy(t: ProbTensor, target, given) -> float:
    """H(target | given) = H(target, given) - H(given), in bits."""
    target, given = tuple(target), tuple(given)
    return entropy(t, target + given) - entropy(t, given)


def mutual_information(t: ProbTensor, left, right, given=()) -> float:
    """I(left; right | given) in bits.

    Computed from joint entropies; exact up to the ~1e-10 floating floor,
    so values may dip that far below zero.
    """
    left, right, given = tuple(left), tuple(right), tuple(given)
    if set(left) & set(right) or set(left) & set(given) or set(right) & set(given):
        raise ValueError("left/right/given axis groups must be disjoint")
    h_lg = entropy(t, left + given)
    h_rg = entropy(t, right + given)
    h_all = entropy(t, left + right + given)
    h_g = entropy(t, given) if given else 0.0
    return h_lg + h_rg - h_all - h_g
