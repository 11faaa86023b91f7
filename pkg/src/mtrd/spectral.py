"""Normalized joint-distribution matrices and their singular spectra.

For a joint matrix P over (X, Y) with diagonal marginal matrices P_X, P_Y,
the normalized matrix

    T = P_X^{-1/2} @ P @ P_Y^{-1/2}

has largest singular value 1; its second singular value is the
Hirschfeld-Gebelein-Renyi maximal correlation of (X, Y), and it equals 1
exactly when X and Y share a common component. Ordered singular values of
T obey a data-processing inequality along Markov chains, which is what the
feasibility checks downstream consume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .probability import ProbTensor, iid_extend, marginal

# Absolute comparison tolerance for singular values (double-precision SVD
# on matrices of size <= 64).
SV_TOL = 1e-9

# Singular values below this are clamped to exact zero.
SV_CLAMP = 1e-12


@dataclass(frozen=True)
class TildeMatrix:
    """Marginal-normalized joint matrix restricted to its support.

    ``row_support``/``col_support`` record which original symbols were
    kept; dropping zero-mass symbols changes no singular value.
    """

    matrix: np.ndarray
    row_support: np.ndarray
    col_support: np.ndarray


@dataclass(frozen=True)
class Spectrum:
    """Descending singular values, tiny values clamped to zero."""

    values: np.ndarray

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def second(self) -> float:
        """Second-largest singular value (0 for rank-degenerate spectra)."""
        return float(self.values[1]) if len(self.values) > 1 else 0.0

    def padded(self, n: int) -> np.ndarray:
        """Spectrum extended with zeros to length n."""
        if len(self.values) >= n:
            return self.values[:n]
        return np.concatenate([self.values, np.zeros(n - len(self.values))])


def _joint_matrix(p) -> np.ndarray:
    if isinstance(p, ProbTensor):
        if len(p.axes) != 2:
            raise ValueError("tilde expects a joint over exactly two axes")
        return p.values
    m = np.asarray(p, dtype=float)
    if m.ndim != 2:
        raise ValueError("tilde expects a matrix")
    return m


def tilde(p) -> TildeMatrix:
    """Normalize a two-axis joint by the inverse square roots of its marginals.

    Zero-mass rows/columns are removed first. Accepts a ProbTensor or a
    bare nonnegative matrix; a positive rescaling of the input leaves the
    result unchanged, so unnormalized conditional slices are fine.
    """
    m = _joint_matrix(p)
    row = m.sum(axis=1)
    col = m.sum(axis=0)
    rs = np.flatnonzero(row > 0)
    cs = np.flatnonzero(col > 0)
    if rs.size == 0 or cs.size == 0:
        raise ValueError("joint has empty support")
    core = m[np.ix_(rs, cs)]
    norm = core / np.sqrt(row[rs])[:, None] / np.sqrt(col[cs])[None, :]
    norm.flags.writeable = False
    return TildeMatrix(matrix=norm, row_support=rs, col_support=cs)


def singular_spectrum(t) -> Spectrum:
    """Full descending singular spectrum of a TildeMatrix (or matrix)."""
    m = t.matrix if isinstance(t, TildeMatrix) else np.asarray(t, dtype=float)
    try:
        s = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as e:
        raise ValueError(f"singular value decomposition failed: {e}") from e
    s = np.where(s < SV_CLAMP, 0.0, s)
    s.flags.writeable = False
    return Spectrum(values=s)


def joint_spectrum(p) -> Spectrum:
    """Spectrum of the normalized matrix of a two-axis joint."""
    return singular_spectrum(tilde(p))


def maximal_correlation(p) -> float:
    """Second singular value of the normalized joint, in [0, 1].

    Equals 0 iff X, Y are independent and 1 iff they share common
    information. Degenerate single-symbol supports give 0.
    """
    s = joint_spectrum(p)
    return min(max(s.second(), 0.0), 1.0)


@dataclass(frozen=True)
class DpiIndexCheck:
    """One index of the singular-value chain inequality.

    For a chain A -> B -> C the i-th singular value of the (A,C) matrix
    must not exceed lam_i(A,B) * lam_2(B,C), which itself cannot exceed
    lam_i(A,B).
    """

    i: int  # 1-based singular value index, i >= 2
    lam_ac: float
    lam_ab: float
    lam2_bc: float

    @property
    def bound(self) -> float:
        return self.lam_ab * self.lam2_bc

    @property
    def slack_chain(self) -> float:
        """lam_i(AB) * lam_2(BC) - lam_i(AC); negative certifies non-Markov."""
        return self.bound - self.lam_ac

    @property
    def slack_upper(self) -> float:
        return self.lam_ab - self.bound

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "lam_i_AC": self.lam_ac,
            "lam_i_AB": self.lam_ab,
            "lam2_BC": self.lam2_bc,
            "bound": self.bound,
            "slack_chain": self.slack_chain,
            "slack_upper": self.slack_upper,
        }


@dataclass(frozen=True)
class DpiReport:
    """Per-index results of the chain necessary condition.

    ``holds`` means every slack is >= -tol; a violated index certifies the
    triple cannot be Markov in the tested order. The condition is
    necessary only, so holding proves nothing.
    """

    chain: tuple[str, str, str]
    checks: tuple[DpiIndexCheck, ...]
    rank_ac: int
    tol: float

    @property
    def min_slack(self) -> float:
        if not self.checks:
            return float("inf")
        return min(c.slack_chain for c in self.checks)

    @property
    def holds(self) -> bool:
        return self.min_slack >= -self.tol

    def to_dict(self) -> dict:
        return {
            "chain": list(self.chain),
            "rank_AC": self.rank_ac,
            "tol": self.tol,
            "holds": self.holds,
            "min_slack": None if not self.checks else self.min_slack,
            "checks": [c.to_dict() for c in self.checks],
        }


def dpi_check(t: ProbTensor, tol: float = SV_TOL) -> DpiReport:
    """Test the singular-value necessary condition for A -> B -> C.

    The three axes of ``t``, in order, name the chain. Ranks are counted
    with the SV_TOL threshold; spectra shorter than the tested range are
    padded with zeros (a matrix has no singular values beyond its minimum
    dimension).
    """
    if len(t.axes) != 3:
        raise ValueError("dpi_check expects a joint over exactly three axes")
    a, b, c = t.axes
    s_ac = joint_spectrum(marginal(t, (a, c)))
    s_ab = joint_spectrum(marginal(t, (a, b)))
    s_bc = joint_spectrum(marginal(t, (b, c)))
    rank_ac = int((s_ac.values > SV_TOL).sum())
    lam2_bc = s_bc.second()
    ac = s_ac.padded(rank_ac)
    ab = s_ab.padded(rank_ac)
    checks = tuple(
        DpiIndexCheck(i=i + 1, lam_ac=float(ac[i]), lam_ab=float(ab[i]), lam2_bc=lam2_bc)
        for i in range(1, rank_ac)
    )
    return DpiReport(chain=(a, b, c), checks=checks, rank_ac=rank_ac, tol=tol)


def kronecker_tilde(p: ProbTensor, k: int, *, max_cells: int = 1 << 24) -> TildeMatrix:
    """Normalized matrix of the k-fold i.i.d. extension of a joint.

    Computed definitionally from the extension; equals the k-fold
    Kronecker power of tilde(p) entrywise, which is what gives the
    extension spectrum its structure: every pairwise product of base
    singular values appears, so the second through (k+1)-st values all
    equal the base second singular value.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k == 1:
        return tilde(p)
    return tilde(iid_extend(p, k, max_cells=max_cells))
