"""Orthogonal symmetric decomposition and its whitened extension.

:func:`ostd` recovers ``A = sum_k lambda_k x_k^m`` when the ``x_k`` are
orthonormal: a random combination of the matrix slices of ``A`` equals
``X diag(sigma) X^T``, so its eigenvectors with nonzero eigenvalue are the
factors. :func:`whitened_ostd` handles factor matrices that only have full
column rank by first mapping the problem to an orthogonal one with a
whitening matrix built from a positive semi-definite slice combination.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .errors import ShapeMismatch, WhiteningFailure
from .linalg import (
    DEFAULT_TOL,
    nonzero_eigenpairs,
    psd_filtered_eigenpairs,
    random_orthogonal,
    sym_eig,
)
from .tensor import (
    FactorDecomposition,
    combine_slices,
    contract_modes,
    contract_vector,
    multilinear_transform,
    slice_combination,
    tvp_reduce_to_scalar,
)


@dataclass
class OstdOptions:
    randomize: bool = False
    nonzero_tol: float = DEFAULT_TOL
    rng: np.random.Generator = field(default_factory=np.random.default_rng)

    def __post_init__(self):
        if not self.nonzero_tol > 0:
            raise ValueError("nonzero_tol must be positive")


@dataclass
class WhitenOptions:
    """Options for :func:`whitened_ostd`.

    ``extended_precision`` runs everything after the random rotation in
    ``numpy.longdouble``. Whitening by ``D^{-1/2}`` stretches the weights of
    the whitened tensor over many orders of magnitude when ``C`` has a small
    eigenvalue, and the smallest factors then lose accuracy in double.
    """

    base: OstdOptions = field(default_factory=OstdOptions)
    max_psd_attempts: int = 100
    psd_tol: float = DEFAULT_TOL
    extended_precision: bool = True

    def __post_init__(self):
        if self.max_psd_attempts < 1:
            raise ValueError("max_psd_attempts must be at least 1")
        if not self.psd_tol > 0:
            raise ValueError("psd_tol must be positive")


@dataclass(frozen=True)
class WhitenReport:
    """Result of :func:`whitened_ostd`.

    ``whitening`` is the ``p x n`` matrix ``W`` and ``psd_matrix`` the slice
    combination ``C`` it was built from, both in the (possibly rotated)
    coordinates the whitening was applied in.
    """

    decomposition: FactorDecomposition
    psd_attempts: int
    whitened_dim: int
    whitening: np.ndarray
    psd_matrix: np.ndarray


def random_coefficients(order, dim, rng):
    """Uniform [0, 1] entries of an ``order``-way, ``dim``-dimensional array, scaled to sum to one."""
    if order < 1 or dim < 1:
        raise ValueError("order and dim must be positive")
    c = rng.random((dim,) * order)
    total = c.sum()
    if total == 0.0:  # every draw exactly 0.0; astronomically unlikely
        c = np.ones_like(c)
        total = c.size
    return c / total


def _projection(a, opts):
    n = a.dim
    if opts.randomize:
        v = random_orthogonal(n, opts.rng)
        return v, multilinear_transform(a, v)
    return np.eye(n), a


def _check_input(a):
    if a.order < 3:
        raise ShapeMismatch("decomposition needs a tensor of order at least 3")


def _sorted_nonzero(es, tol):
    """Eigenvectors with nonzero eigenvalue, ordered by descending |sigma|."""
    es = nonzero_eigenpairs(es, tol)
    order = np.argsort(-np.abs(es.values), kind="stable")
    return es.vectors[:, order]


def ostd(a, opts=None, *, coefficients=None):
    """Decompose a tensor assumed to have orthonormal factors.

    Parameters
    ----------
    a : SymmetricTensor
        Order ``m >= 3``.
    opts : OstdOptions, optional
    coefficients : array_like, optional
        Fix the slice weights (shape ``(n,) * (m - 2)``) instead of drawing
        them at random. Only useful to demonstrate degenerate choices.

    Returns
    -------
    FactorDecomposition
        The predicted rank is the number of eigenvalues above
        ``opts.nonzero_tol``. No residual check is made: a tensor without an
        orthogonal decomposition still yields an answer, with a large
        relative error.
    """
    _check_input(a)
    opts = opts or OstdOptions()
    v, a_hat = _projection(a, opts)
    if coefficients is None:
        coefficients = random_coefficients(a.order - 2, a.dim, opts.rng)
    x_hat = _sorted_nonzero(sym_eig(slice_combination(a_hat, coefficients)), opts.nonzero_tol)
    x = v.T @ x_hat
    weights = np.array([tvp_reduce_to_scalar(a, col) for col in x.T])
    return FactorDecomposition(weights, x.reshape(a.dim, -1))


def whitened_ostd(a, opts=None):
    """Decompose a tensor whose factor matrix has full column rank.

    Slice combinations ``C`` are drawn until one is positive semi-definite;
    its skinny eigendecomposition ``U D U^T`` gives ``W = D^{-1/2} U^T``, the
    whitened tensor ``A(W, ..., W)`` has orthonormal factors and is solved as
    in :func:`ostd`, and the factors are mapped back by ``U D^{1/2}`` and
    normalized to unit length.

    If ``rank(C)`` falls below the true rank the result silently loses
    factors; only the relative error reveals that.

    Raises
    ------
    WhiteningFailure
        No p.s.d. ``C`` within ``opts.max_psd_attempts`` draws.
    """
    _check_input(a)
    opts = opts or WhitenOptions()
    base = opts.base
    rng = base.rng
    m, n = a.order, a.dim
    dtype = np.longdouble if opts.extended_precision else np.float64
    v, a_hat = _projection(a, base)
    t_hat = a_hat.data.astype(dtype)

    for attempt in range(1, opts.max_psd_attempts + 1):
        c = combine_slices(t_hat, random_coefficients(m - 2, n, rng).astype(dtype))
        skinny = psd_filtered_eigenpairs(sym_eig(c), opts.psd_tol)
        if skinny is not None:
            break
    else:
        raise WhiteningFailure(opts.max_psd_attempts)

    u, d = skinny
    p = d.size
    w = u.T / np.sqrt(d)[:, None]
    report = partial(
        WhitenReport,
        psd_attempts=attempt,
        whitened_dim=p,
        whitening=w.astype(float),
        psd_matrix=c.astype(float),
    )
    if p == 0:
        return report(FactorDecomposition.empty(n))

    t_bar = contract_modes(t_hat, w)
    b = combine_slices(t_bar, random_coefficients(m - 2, p, rng).astype(dtype))
    x_bar = _sorted_nonzero(sym_eig(b), base.nonzero_tol)
    weights = np.array([contract_vector(t_bar, x, m) for x in x_bar.T], dtype=dtype)
    x = v.T @ ((u * np.sqrt(d)) @ x_bar)

    norms = np.sqrt(np.sum(x * x, axis=0))
    return report(FactorDecomposition((weights * norms**m).astype(float), (x / norms).astype(float)))
