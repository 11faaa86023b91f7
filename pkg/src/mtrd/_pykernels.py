"""Pure-numpy implementation of the optimizer's inner-loop kernel.

Mirrors ``_ckernels``; selected at import time by ``_core`` when the
compiled extension is unavailable (or MTRD_PURE_PYTHON is set).
"""

import numpy as np

_LOG2 = np.log(2.0)


def _h(a):
    nz = a[a > 0]
    if nz.size == 0:
        return 0.0
    return float(-(nz * (np.log(nz) / _LOG2)).sum())


def evaluate_candidate(p_uv, ch, d1, d2):
    """Distortions and rate-corner coordinates for one candidate channel.

    Returns (ed1, ed2, r1_a, r2_a, r1_b, r2_b) where corner A is
    (I(UV;X1), I(UV;X2|X1)) and corner B is (I(UV;X1|X2), I(UV;X2)),
    with expected distortions under the per-cell optimal decoders.
    """
    j = p_uv[:, :, None, None] * ch  # (U, V, X1, X2)
    p_ux = j.sum(axis=1)             # (U, X1, X2)
    p_vx = j.sum(axis=0)             # (V, X1, X2)

    ed1 = float(np.einsum("uxy,uk->xyk", p_ux, d1).min(axis=2).sum())
    ed2 = float(np.einsum("vxy,vk->xyk", p_vx, d2).min(axis=2).sum())

    p_x1x2 = p_ux.sum(axis=0)
    h_uv = _h(p_uv)
    h_x1 = _h(p_x1x2.sum(axis=1))
    h_x2 = _h(p_x1x2.sum(axis=0))
    h_x1x2 = _h(p_x1x2)
    h_uvx1 = _h(j.sum(axis=3))
    h_uvx2 = _h(j.sum(axis=2))
    h_all = _h(j)

    r1_a = h_uv + h_x1 - h_uvx1                    # I(UV; X1)
    r2_a = h_uvx1 + h_x1x2 - h_all - h_x1          # I(UV; X2 | X1)
    r1_b = h_uvx2 + h_x1x2 - h_all - h_x2          # I(UV; X1 | X2)
    r2_b = h_uv + h_x2 - h_uvx2                    # I(UV; X2)
    return ed1, ed2, r1_a, r2_a, r1_b, r2_b
