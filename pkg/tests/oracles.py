"""Naive full-index-loop references, independent of the library's contractions."""
import itertools

import numpy as np


def tvp_vector(a, x):
    a = np.asarray(a)
    n, m = a.shape[0], a.ndim
    out = np.zeros(n)
    for idx in itertools.product(range(n), repeat=m):
        term = a[idx]
        for i in idx[1:]:
            term *= x[i]
        out[idx[0]] += term
    return out


def tvp_scalar(a, x):
    a = np.asarray(a)
    n, m = a.shape[0], a.ndim
    total = 0.0
    for idx in itertools.product(range(n), repeat=m):
        term = a[idx]
        for i in idx:
            term *= x[i]
        total += term
    return total


def multilinear(a, v):
    a = np.asarray(a)
    n, m = a.shape[0], a.ndim
    p = v.shape[0]
    out = np.zeros((p,) * m)
    for out_idx in itertools.product(range(p), repeat=m):
        total = 0.0
        for in_idx in itertools.product(range(n), repeat=m):
            term = a[in_idx]
            for i, j in zip(out_idx, in_idx):
                term *= v[i, j]
            total += term
        out[out_idx] = total
    return out


def slice_comb(a, c):
    a = np.asarray(a)
    n, m = a.shape[0], a.ndim
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            for rest in itertools.product(range(n), repeat=m - 2):
                out[i, j] += c[rest] * a[(i, j) + rest]
    return out


def symmetrize(a):
    a = np.asarray(a)
    n, m = a.shape[0], a.ndim
    out = np.zeros_like(a)
    perms = list(itertools.permutations(range(m)))
    for idx in itertools.product(range(n), repeat=m):
        out[idx] = sum(a[tuple(idx[p] for p in perm)] for perm in perms) / len(perms)
    return out


def is_symmetric(a, tol=0.0):
    a = np.asarray(a)
    n, m = a.shape[0], a.ndim
    for idx in itertools.product(range(n), repeat=m):
        for perm in itertools.permutations(idx):
            if abs(a[perm] - a[idx]) > tol:
                return False
    return True


def from_factors(weights, x, m):
    n = x.shape[0]
    out = np.zeros((n,) * m)
    for idx in itertools.product(range(n), repeat=m):
        for lam, col in zip(weights, x.T):
            term = lam
            for i in idx:
                term *= col[i]
            out[idx] += term
    return out


def random_symmetric(rng, m, n):
    return symmetrize(rng.standard_normal((n,) * m))
