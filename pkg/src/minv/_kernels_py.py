"""Pure-numpy implementations of the hot kernels.

Same contracts as the compiled module minv._kernels; selected by
minv.kernels when the extension is unavailable or explicitly disabled.
"""

import numpy as np

BACKEND = "python"


def _lse(m, axis):
    mx = np.max(m, axis=axis, keepdims=True)
    out = mx.squeeze(axis) + np.log(np.sum(np.exp(m - mx), axis=axis))
    return out


def sinkhorn_log_potentials(cost, loga, logb, eps, max_iter, tol, f0=None, g0=None):
    """Log-domain alternating updates for entropic transport potentials.

    Returns (f, g, iterations, row_marginal_error). On return the column
    marginals of the implied plan are exact; the reported error is the
    maximum absolute row-marginal defect at the last check.
    """
    n, m = cost.shape
    f = np.zeros(n) if f0 is None else np.array(f0, dtype=float)
    g = np.zeros(m) if g0 is None else np.array(g0, dtype=float)
    a = np.exp(loga)
    err = np.inf
    it = 0
    while it < max_iter:
        f_new = -eps * _lse((g[None, :] - cost) / eps + logb[None, :], axis=1)
        if it > 0:
            err = float(np.max(np.abs(a * np.expm1((f - f_new) / eps))))
            if err < tol:
                f = f_new
                g = -eps * _lse((f[:, None] - cost) / eps + loga[:, None], axis=0)
                it += 1
                break
        f = f_new
        g = -eps * _lse((f[:, None] - cost) / eps + loga[:, None], axis=0)
        it += 1
    return f, g, it, err
