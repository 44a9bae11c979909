"""Symmetric eigenproblems, tolerance filtering and Haar-random orthogonal matrices.

The eigensolver is a cyclic Jacobi iteration. A compiled kernel is used when
the ``symtd._jacobi`` extension was built; otherwise a numpy implementation
of the same sweeps is used. Set ``SYMTD_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _jacobi_py
from .errors import NonConvergence, ShapeMismatch

if os.environ.get("SYMTD_PURE_PYTHON"):
    _compiled = None
else:
    try:
        from . import _jacobi as _compiled
    except ImportError:
        _compiled = None

KERNELS = {"python": _jacobi_py.jacobi_eigh}
if _compiled is not None:
    KERNELS["compiled"] = _compiled.jacobi_eigh
BACKEND = "compiled" if _compiled is not None else "python"

DEFAULT_TOL = 1e-10
MAX_SWEEPS = 50


@dataclass(frozen=True)
class EigenSystem:
    """Eigenpairs of a symmetric matrix; ``vectors[:, k]`` belongs to ``values[k]``."""

    values: np.ndarray
    vectors: np.ndarray

    def __len__(self):
        return self.values.size

    def take(self, mask):
        return EigenSystem(self.values[mask], self.vectors[:, mask])


def canonical_signs(vectors):
    """Flip columns so each one's largest-magnitude entry (first on ties) is positive."""
    vectors = np.array(vectors, copy=True)
    if vectors.size == 0:
        return vectors
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sym_eig(m, backend=None):
    """Full spectral decomposition of a symmetric matrix.

    The input is averaged with its transpose first. Values come back in
    descending order (stable, so ties keep the solver's column order) and each
    eigenvector has its largest-magnitude component positive.

    Raises
    ------
    NonConvergence
        If the Jacobi iteration has not converged after 50 sweeps.
    """
    m = np.asarray(m)
    if m.dtype != np.longdouble:
        m = m.astype(float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"square matrix expected, got shape {m.shape}")
    kernel = KERNELS[backend or BACKEND]
    values, vectors, sweeps = kernel(0.5 * (m + m.T), MAX_SWEEPS)
    if sweeps < 0:
        raise NonConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    order = np.argsort(-values, kind="stable")
    return EigenSystem(values[order], canonical_signs(vectors[:, order]))


def nonzero_eigenpairs(es, tol=DEFAULT_TOL):
    """Keep the pairs with ``|value| > tol``; their count is the predicted rank."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return es.take(np.abs(es.values) > tol)


def psd_filtered_eigenpairs(es, tol=DEFAULT_TOL):
    """Skinny eigendecomposition ``(U, d)`` of a p.s.d. matrix, or ``None``.

    ``None`` means the smallest eigenvalue is ``<= -tol`` (not p.s.d.); this
    is an expected outcome, callers draw a new combination and retry.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if len(es) and es.values.min() <= -tol:
        return None
    keep = es.values > tol
    return es.vectors[:, keep], es.values[keep]


def random_orthogonal(n, rng):
    """Haar-distributed ``n x n`` orthogonal matrix.

    QR of a standard Gaussian matrix, with the columns of Q rescaled by the
    signs of diag(R) so the distribution does not depend on the QR convention.
    """
    if n < 1:
        raise ValueError("n must be positive")
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d
