"""Pure numpy cyclic Jacobi, used when the compiled kernel is unavailable.

Works in ``float64`` or, for ``longdouble`` input, in extended precision.
"""
import numpy as np


def jacobi_eigh(m, max_sweeps=50, rtol=None):
    """Return ``(values, vectors, sweeps)``; ``sweeps == -1`` on non-convergence."""
    m = np.asarray(m)
    dtype = np.longdouble if m.dtype == np.longdouble else np.float64
    a = np.array(m, dtype=dtype, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=dtype)
    one = dtype(1.0)
    if rtol is None:
        rtol = 1e-18 if dtype is np.longdouble else 1e-15
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = np.sum(a[iu] ** 2)
        total = np.sum(np.diag(a) ** 2) + 2 * off
        if off <= rtol * rtol * total:
            return np.diag(a).copy(), v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.copysign(one / (abs(theta) + np.sqrt(theta * theta + one)), theta)
                c = one / np.sqrt(t * t + one)
                s = t * c
                app, aqq = a[p, p], a[q, q]
                cp = a[:, p].copy()
                cq = a[:, q]
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v, -1
