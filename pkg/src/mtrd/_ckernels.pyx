# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner-loop kernel for candidate-channel evaluation.

Semantics match ``_pykernels.evaluate_candidate`` (same formulas, same
zero-skipping entropy convention); this version just runs the small-tensor
reductions as C loops, which is where the multistart optimizer spends its
time.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log

cnp.import_array()

cdef double LOG2 = log(2.0)


cdef inline double _plogp(double p) nogil:
    if p > 0.0:
        return -p * log(p) / LOG2
    return 0.0


def evaluate_candidate(object p_uv_in, object ch_in, object d1_in, object d2_in):
    """Distortions and rate-corner coordinates for one candidate channel."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p_uv = np.ascontiguousarray(p_uv_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=4] ch = np.ascontiguousarray(ch_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] d1 = np.ascontiguousarray(d1_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] d2 = np.ascontiguousarray(d2_in, dtype=np.float64)

    cdef Py_ssize_t nu = ch.shape[0], nv = ch.shape[1]
    cdef Py_ssize_t nx1 = ch.shape[2], nx2 = ch.shape[3]
    cdef Py_ssize_t nk1 = d1.shape[1], nk2 = d2.shape[1]

    cdef cnp.ndarray[cnp.float64_t, ndim=3] p_ux = np.zeros((nu, nx1, nx2))
    cdef cnp.ndarray[cnp.float64_t, ndim=3] p_vx = np.zeros((nv, nx1, nx2))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p_x1x2 = np.zeros((nx1, nx2))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p_x1 = np.zeros(nx1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p_x2 = np.zeros(nx2)

    cdef double h_uv = 0.0, h_all = 0.0, h_uvx1 = 0.0, h_uvx2 = 0.0
    cdef double h_x1 = 0.0, h_x2 = 0.0, h_x1x2 = 0.0
    cdef double jv, s, cost, best
    cdef Py_ssize_t u, v, x1, x2, k

    with nogil:
        for u in range(nu):
            for v in range(nv):
                h_uv += _plogp(p_uv[u, v])
                for x1 in range(nx1):
                    s = 0.0
                    for x2 in range(nx2):
                        jv = p_uv[u, v] * ch[u, v, x1, x2]
                        s += jv
                        h_all += _plogp(jv)
                        p_ux[u, x1, x2] += jv
                        p_vx[v, x1, x2] += jv
                    h_uvx1 += _plogp(s)
                for x2 in range(nx2):
                    s = 0.0
                    for x1 in range(nx1):
                        s += p_uv[u, v] * ch[u, v, x1, x2]
                    h_uvx2 += _plogp(s)

        for x1 in range(nx1):
            for x2 in range(nx2):
                s = 0.0
                for u in range(nu):
                    s += p_ux[u, x1, x2]
                p_x1x2[x1, x2] = s
                p_x1[x1] += s
                p_x2[x2] += s
                h_x1x2 += _plogp(s)
        for x1 in range(nx1):
            h_x1 += _plogp(p_x1[x1])
        for x2 in range(nx2):
            h_x2 += _plogp(p_x2[x2])

    cdef double ed1 = 0.0, ed2 = 0.0
    with nogil:
        for x1 in range(nx1):
            for x2 in range(nx2):
                best = -1.0
                for k in range(nk1):
                    cost = 0.0
                    for u in range(nu):
                        cost += p_ux[u, x1, x2] * d1[u, k]
                    if best < 0.0 or cost < best:
                        best = cost
                ed1 += best
                best = -1.0
                for k in range(nk2):
                    cost = 0.0
                    for v in range(nv):
                        cost += p_vx[v, x1, x2] * d2[v, k]
                    if best < 0.0 or cost < best:
                        best = cost
                ed2 += best

    cdef double r1_a = h_uv + h_x1 - h_uvx1
    cdef double r2_a = h_uvx1 + h_x1x2 - h_all - h_x1
    cdef double r1_b = h_uvx2 + h_x1x2 - h_all - h_x2
    cdef double r2_b = h_uv + h_x2 - h_uvx2
    return ed1, ed2, r1_a, r2_a, r1_b, r2_b
