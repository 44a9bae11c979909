"""Dense symmetric tensors and the multilinear products used by the solvers.

A tensor of order ``m`` and dimension ``n`` is stored as a read-only numpy
array of shape ``(n,) * m``. Every product here contracts one mode at a time
so the cost stays at ``O(m * p * n**m)`` rather than the naive ``O((p*n)**m)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import FormatError, ShapeMismatch, SymmetryViolation

SYMMETRY_RTOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _reshape(order, dim, values):
    if order < 1 or dim < 1:
        raise ShapeMismatch(f"order and dim must be positive (got order={order}, dim={dim})")
    values = np.asarray(values, dtype=float)
    if values.size != dim**order:
        raise ShapeMismatch(f"expected {dim**order} values for order {order}, dim {dim}; got {values.size}")
    return values.reshape((dim,) * order)


def _max_asymmetry(a):
    order = a.ndim
    worst = 0.0
    for perm in itertools.permutations(range(order)):
        if perm == tuple(range(order)):
            continue
        worst = max(worst, float(np.max(np.abs(a - a.transpose(perm)))))
    return worst


class SymmetricTensor:
    """An ``order``-way, ``dim``-dimensional real symmetric tensor.

    Instances are immutable. Build them with :func:`from_dense`,
    :func:`symmetrize`, :func:`outer_power` or :func:`from_factors` rather
    than calling the constructor directly; the constructor trusts its input.
    """

    __slots__ = ("_data",)

    def __init__(self, data):
        data = _frozen(data)
        if data.ndim < 2:
            raise ShapeMismatch("a symmetric tensor needs at least two modes")
        if len(set(data.shape)) != 1:
            raise ShapeMismatch(f"all modes must have equal size, got shape {data.shape}")
        self._data = data

    @property
    def data(self):
        return self._data

    @property
    def order(self):
        return self._data.ndim

    @property
    def dim(self):
        return self._data.shape[0]

    def __repr__(self):
        return f"SymmetricTensor(order={self.order}, dim={self.dim})"

    def __eq__(self, other):
        if not isinstance(other, SymmetricTensor):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(np.array_equal(self._data, other._data))

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, SymmetricTensor):
            return NotImplemented
        if self._data.shape != other._data.shape:
            raise ShapeMismatch(f"cannot add shapes {self._data.shape} and {other._data.shape}")
        return SymmetricTensor(self._data + other._data)

    def __sub__(self, other):
        if not isinstance(other, SymmetricTensor):
            return NotImplemented
        if self._data.shape != other._data.shape:
            raise ShapeMismatch(f"cannot subtract shapes {self._data.shape} and {other._data.shape}")
        return SymmetricTensor(self._data - other._data)

    def __mul__(self, scalar):
        return SymmetricTensor(float(scalar) * self._data)

    __rmul__ = __mul__


@dataclass(frozen=True)
class FactorDecomposition:
    """Weights ``lambda`` (length p) and factor matrix ``X`` (n x p).

    The represented tensor is ``sum_k weights[k] * outer_power(factors[:, k], m)``.
    """

    weights: np.ndarray
    factors: np.ndarray

    def __post_init__(self):
        weights = _frozen(np.ravel(self.weights))
        factors = np.asarray(self.factors, dtype=float)
        if factors.ndim == 1 and weights.size == 0:
            factors = factors.reshape(factors.size, 0)
        if factors.ndim != 2 or factors.shape[1] != weights.size:
            raise ShapeMismatch(
                f"factors shape {factors.shape} does not match {weights.size} weights"
            )
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "factors", _frozen(factors))

    @property
    def rank(self):
        return self.weights.size

    @property
    def dim(self):
        return self.factors.shape[0]

    @classmethod
    def empty(cls, dim):
        return cls(np.zeros(0), np.zeros((dim, 0)))


def from_dense(order, dim, values, rtol=SYMMETRY_RTOL):
    """Wrap ``values`` (row-major, last index fastest) as a symmetric tensor.

    Raises
    ------
    SymmetryViolation
        If some permuted entry differs by more than ``rtol * ||values||``.
    ShapeMismatch
        If ``len(values) != dim ** order``.
    """
    a = _reshape(order, dim, values)
    if order < 2:
        raise ShapeMismatch("a symmetric tensor needs at least two modes")
    tol = rtol * float(np.linalg.norm(a))
    asym = _max_asymmetry(a)
    if asym > tol:
        raise SymmetryViolation(asym, tol)
    return SymmetricTensor(a)


def symmetrize(order, dim, values):
    """Average ``values`` over all ``order!`` index permutations."""
    a = _reshape(order, dim, values)
    if order < 2:
        raise ShapeMismatch("a symmetric tensor needs at least two modes")
    perms = list(itertools.permutations(range(order)))
    total = np.zeros_like(a)
    for perm in perms:
        total += a.transpose(perm)
    total /= len(perms)
    # summation order differs between permuted entries; copy from the sorted index
    return SymmetricTensor(total[tuple(_sorted_indices(dim, order))].reshape(a.shape))


@lru_cache(maxsize=32)
def _sorted_indices(n, m):
    # every multi-index sorted ascending, so permuted entries multiply in the same order
    idx = np.indices((n,) * m).reshape(m, -1)
    idx.sort(axis=0)
    idx.setflags(write=False)
    return idx


def _power_entries(x, m):
    vals = x[_sorted_indices(x.size, m)]
    out = vals[0].copy()
    for row in vals[1:]:
        out *= row
    return out.reshape((x.size,) * m)


def outer_power(x, m):
    """The rank-one tensor ``x^m``; permuted entries are bitwise equal."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ShapeMismatch("x must be a non-empty vector")
    if m < 2:
        raise ShapeMismatch("order m must be at least 2")
    return SymmetricTensor(_power_entries(x, m))


def from_factors(decomp, m):
    """Return ``sum_k lambda_k x_k^m`` as a dense tensor."""
    if m < 2:
        raise ShapeMismatch("order m must be at least 2")
    n = decomp.dim
    out = np.zeros((n,) * m)
    for lam, x in zip(decomp.weights, decomp.factors.T):
        out += lam * _power_entries(x, m)
    return SymmetricTensor(out)


def _check_vector(a, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (a.dim,):
        raise ShapeMismatch(f"vector of length {a.dim} expected, got shape {x.shape}")
    return x


def contract_vector(t, x, times):
    """Contract the trailing ``times`` modes of array ``t`` with ``x`` (dtype-preserving)."""
    for _ in range(times):
        t = t @ x
    return t


def contract_modes(t, v):
    """Multiply every mode of array ``t`` by the rows of ``v`` (dtype-preserving)."""
    # each tensordot consumes the leading mode and appends the new one at the end
    for _ in range(t.ndim):
        t = np.tensordot(t, v, axes=([0], [1]))
    return t


def combine_slices(t, coeffs):
    """``sum coeffs[i3..im] * t[:, :, i3..im]`` for an array ``t`` (dtype-preserving)."""
    k = t.ndim - 2
    return np.tensordot(t, coeffs, axes=(list(range(2, t.ndim)), list(range(k))))


def tvp_reduce_to_vector(a, x):
    """``A x^(m-1)``: contract every mode but the first with ``x``."""
    x = _check_vector(a, x)
    return contract_vector(a.data, x, a.order - 1)


def tvp_reduce_to_scalar(a, x):
    """``A x^m``."""
    x = _check_vector(a, x)
    return float(x @ tvp_reduce_to_vector(a, x))


def multilinear_transform(a, v):
    """``A(V, ..., V)`` for a ``p x n`` matrix ``V``; the result is p-dimensional."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[1] != a.dim:
        raise ShapeMismatch(f"V must have {a.dim} columns, got shape {v.shape}")
    return SymmetricTensor(contract_modes(a.data, v))


def slice_combination(a, coeffs):
    """Weighted sum of the matrix slices ``A[:, :, i3, ..., im]``.

    ``coeffs`` is an ``(m-2)``-way array of dimension ``n``.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    m = a.order
    if m < 3:
        raise ShapeMismatch("slice combinations need a tensor of order at least 3")
    if coeffs.shape != (a.dim,) * (m - 2):
        raise ShapeMismatch(
            f"coefficients must have shape {(a.dim,) * (m - 2)}, got {coeffs.shape}"
        )
    return combine_slices(a.data, coeffs)


def frobenius_norm(a):
    return float(np.linalg.norm(a.data.ravel()))


# -- text file format --------------------------------------------------------

TENSOR_MAGIC = "symtensor v1"
FACTORS_MAGIC = "factors v1"


def _fmt(x):
    return format(float(x), ".17g")


def write_tensor(path, a):
    """Write ``a`` in the ``symtensor v1`` text format."""
    rows = a.data.reshape(-1, a.dim)
    with open(path, "w") as fh:
        fh.write(f"{TENSOR_MAGIC}\norder {a.order}\ndim {a.dim}\n")
        for row in rows:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def _header_int(line, key, path):
    parts = line.split()
    if len(parts) != 2 or parts[0] != key:
        raise FormatError(f"{path}: expected '{key} <int>', got {line!r}")
    return int(parts[1])


def read_tensor(path, symmetrize_input=False):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if len(lines) < 3 or lines[0].strip() != TENSOR_MAGIC:
        raise FormatError(f"{path}: missing '{TENSOR_MAGIC}' header")
    order = _header_int(lines[1], "order", path)
    dim = _header_int(lines[2], "dim", path)
    try:
        values = np.array(" ".join(lines[3:]).split(), dtype=float)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if symmetrize_input:
        return symmetrize(order, dim, values)
    return from_dense(order, dim, values)


def write_factors(path, decomp):
    """Write a decomposition: header, weights line, then one line per column of X."""
    with open(path, "w") as fh:
        fh.write(f"{FACTORS_MAGIC}\np {decomp.rank}\nn {decomp.dim}\n")
        fh.write(" ".join(_fmt(v) for v in decomp.weights) + "\n")
        for col in decomp.factors.T:
            fh.write(" ".join(_fmt(v) for v in col) + "\n")


def read_factors(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if len(lines) < 3 or lines[0].strip() != FACTORS_MAGIC:
        raise FormatError(f"{path}: missing '{FACTORS_MAGIC}' header")
    p = _header_int(lines[1], "p", path)
    n = _header_int(lines[2], "n", path)
    body = lines[3:]
    if len(body) < p + 1:
        raise FormatError(f"{path}: expected a weights line and {p} factor columns")
    weights = np.array(body[0].split(), dtype=float)
    cols = [np.array(line.split(), dtype=float) for line in body[1 : p + 1]]
    if weights.size != p or any(c.size != n for c in cols):
        raise FormatError(f"{path}: inconsistent sizes for p={p}, n={n}")
    factors = np.column_stack(cols) if cols else np.zeros((n, 0))
    return FactorDecomposition(weights, factors)
