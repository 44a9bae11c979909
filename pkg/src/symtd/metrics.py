"""Relative error and the permutation-maximized solution score."""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ShapeMismatch, ZeroTensor
from .tensor import FactorDecomposition, from_factors, frobenius_norm


@dataclass(frozen=True)
class ScoreOptions:
    m: int
    max_exhaustive_p: int = 8

    def __post_init__(self):
        if self.max_exhaustive_p < 1:
            raise ValueError("max_exhaustive_p must be at least 1")


def normalize_columns(d, m):
    """Scale every factor to unit norm, moving ``||x_k||**m`` into its weight."""
    norms = np.linalg.norm(d.factors, axis=0)
    if np.any(norms == 0):
        raise ValueError("cannot normalize a zero factor column")
    return FactorDecomposition(d.weights * norms**m, d.factors / norms)


def relative_error(a, d):
    """``||A - sum_k lambda_k x_k^m|| / ||A||``."""
    if d.dim != a.dim:
        raise ShapeMismatch(f"decomposition dim {d.dim} != tensor dim {a.dim}")
    norm = frobenius_norm(a)
    if norm == 0:
        raise ZeroTensor("relative error is undefined for the zero tensor")
    model = from_factors(d, a.order).data
    return float(np.linalg.norm((a.data - model).ravel()) / norm)


def _weight_agreement(lam, lam_true):
    denom = np.maximum(np.abs(lam), np.abs(lam_true))
    with np.errstate(invalid="ignore", divide="ignore"):
        term = 1.0 - np.abs(lam - lam_true) / denom
    # both weights zero: 0/0 in the formula, scored as no agreement
    return np.where(denom == 0, 0.0, term)


def score_matrix(computed, truth, m):
    """Pairwise terms: ``S[i, j]`` scores truth column ``i`` against computed column ``j``.

    For odd ``m`` the pair ``(-lambda, -x)`` represents the same rank-one term,
    so the better of the two weight comparisons is used.
    """
    lam = computed.weights[None, :]
    lam_true = truth.weights[:, None]
    overlap = np.abs(truth.factors.T @ computed.factors)
    agree = _weight_agreement(lam, lam_true)
    if m % 2 == 1:
        agree = np.maximum(agree, _weight_agreement(-lam, lam_true))
    return agree * overlap


def _best_assignment_exhaustive(s):
    rows, cols = s.shape
    best = -math.inf
    if rows <= cols:
        for perm in itertools.permutations(range(cols), rows):
            best = max(best, sum(s[i, j] for i, j in enumerate(perm)))
    else:
        for perm in itertools.permutations(range(rows), cols):
            best = max(best, sum(s[i, j] for j, i in enumerate(perm)))
    return best


def _best_assignment_hungarian(s):
    rows, cols = linear_sum_assignment(s, maximize=True)
    return s[rows, cols].sum()


def solution_score(computed, truth, opts):
    """Score a computed decomposition against the truth, 1 meaning a perfect match.

    Both inputs should already have unit-norm columns (see
    :func:`normalize_columns`). The truth columns are matched one-to-one with
    computed columns to maximize the score; surplus computed columns are
    ignored and unmatched truth columns contribute zero. The total is divided
    by the number of truth columns.

    Small problems are matched by enumerating every injective assignment.
    Larger ones use the Hungarian method, which reaches the same optimum.
    """
    if computed.dim != truth.dim:
        raise ShapeMismatch(f"computed dim {computed.dim} != truth dim {truth.dim}")
    p_true, p = truth.rank, computed.rank
    if p_true == 0:
        raise ValueError("truth must have at least one factor")
    if p == 0:
        return 0.0
    s = score_matrix(computed, truth, opts.m)
    small = min(p, p_true)
    big = max(p, p_true)
    if p_true <= opts.max_exhaustive_p and math.perm(big, small) <= 200_000:
        total = _best_assignment_exhaustive(s)
    else:
        if p_true > opts.max_exhaustive_p:
            warnings.warn(
                f"{p_true} truth factors exceed max_exhaustive_p={opts.max_exhaustive_p}; "
                "matching with linear_sum_assignment",
                stacklevel=2,
            )
        total = _best_assignment_hungarian(s)
    return float(total / p_true)
