# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Contracts mirror minv._kernels_py."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, expm1, fabs, log

BACKEND = "compiled"


def sinkhorn_log_potentials(cost, loga, logb, double eps, int max_iter,
                            double tol, f0=None, g0=None):
    """Log-domain alternating updates for entropic transport potentials.

    Returns (f, g, iterations, row_marginal_error); see the python twin for
    the precise convergence semantics.
    """
    cdef double[:, ::1] C = np.ascontiguousarray(cost, dtype=np.float64)
    cdef double[::1] la = np.ascontiguousarray(loga, dtype=np.float64)
    cdef double[::1] lb = np.ascontiguousarray(logb, dtype=np.float64)
    cdef Py_ssize_t n = C.shape[0], m = C.shape[1]
    f_arr = np.zeros(n) if f0 is None else np.array(f0, dtype=np.float64)
    g_arr = np.zeros(m) if g0 is None else np.array(g0, dtype=np.float64)
    cdef double[::1] f = f_arr
    cdef double[::1] g = g_arr
    cdef double[::1] fn = np.empty(n)
    cdef double err = np.inf
    cdef double mx, s, term, d
    cdef Py_ssize_t i, j
    cdef int it = 0
    cdef bint done = 0

    while it < max_iter:
        for i in range(n):
            mx = -1e308
            for j in range(m):
                term = (g[j] - C[i, j]) / eps + lb[j]
                if term > mx:
                    mx = term
            s = 0.0
            for j in range(m):
                s += exp((g[j] - C[i, j]) / eps + lb[j] - mx)
            fn[i] = -eps * (mx + log(s))
        if it > 0:
            err = 0.0
            for i in range(n):
                d = fabs(exp(la[i]) * expm1((f[i] - fn[i]) / eps))
                if d > err:
                    err = d
            done = err < tol
        for i in range(n):
            f[i] = fn[i]
        for j in range(m):
            mx = -1e308
            for i in range(n):
                term = (f[i] - C[i, j]) / eps + la[i]
                if term > mx:
                    mx = term
            s = 0.0
            for i in range(n):
                s += exp((f[i] - C[i, j]) / eps + la[i] - mx)
            g[j] = -eps * (mx + log(s))
        it += 1
        if done:
            break
    return f_arr, g_arr, it, err
