"""Synthetic test problems with known factors, optionally with additive noise."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec
from .linalg import random_orthogonal
from .tensor import FactorDecomposition, SymmetricTensor, from_factors, frobenius_norm, symmetrize

FAMILIES = ("orthogonal", "nonorthogonal", "identity", "nie")

NIE_WEIGHTS = np.array([676.0, 196.0])
NIE_FACTORS = np.array(
    [
        [0.0, 3 / math.sqrt(14)],
        [1 / math.sqrt(26), 2 / math.sqrt(14)],
        [-5 / math.sqrt(26), -1 / math.sqrt(14)],
    ]
)
_NIE_SHAPE = (4, 3, 2)

# regenerate a Gaussian factor matrix whose smallest singular value is below this
_MIN_SINGULAR = 1e-8


@dataclass(frozen=True)
class InstanceSpec:
    """Parameters of one synthetic instance.

    ``m``, ``n`` and ``p`` may be left as ``None`` for the ``nie`` family
    (fixed at 4, 3, 2) and ``p`` for ``identity`` (equal to ``n``).
    ``weights`` overrides the all-ones weights of the ``identity`` family.
    """

    m: int | None = None
    n: int | None = None
    p: int | None = None
    eta: float = 0.0
    family: str = "orthogonal"
    seed: int | np.random.SeedSequence = 0
    weights: tuple | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "nie":
            given = (self.m, self.n, self.p)
            for name, val, fixed in zip("mnp", given, _NIE_SHAPE):
                if val is not None and val != fixed:
                    raise InvalidSpec(f"nie family requires {name}={fixed}, got {val}")
            object.__setattr__(self, "m", 4)
            object.__setattr__(self, "n", 3)
            object.__setattr__(self, "p", 2)
        if self.family == "identity" and self.p is None:
            object.__setattr__(self, "p", self.n)
        if self.m is None or self.n is None or self.p is None:
            raise InvalidSpec("m, n and p are required for this family")
        if self.m < 3 or self.n < 1 or self.p < 1:
            raise InvalidSpec(f"need m >= 3, n >= 1, p >= 1 (got m={self.m}, n={self.n}, p={self.p})")
        if self.p > self.n:
            raise InvalidSpec(f"p={self.p} exceeds n={self.n}")
        if self.family == "identity" and self.p != self.n:
            raise InvalidSpec("identity family requires p == n")
        if not self.eta >= 0:
            raise InvalidSpec(f"eta must be non-negative, got {self.eta}")
        if self.weights is not None and len(self.weights) != self.p:
            raise InvalidSpec(f"{len(self.weights)} weights given for p={self.p}")


@dataclass(frozen=True)
class GroundTruth:
    truth: FactorDecomposition
    clean: SymmetricTensor
    observed: SymmetricTensor


def _gaussian_factors(n, p, rng):
    while True:
        x = rng.standard_normal((n, p))
        x /= np.linalg.norm(x, axis=0)
        if np.linalg.svd(x, compute_uv=False)[-1] > _MIN_SINGULAR:
            return x


def true_factors(spec, rng):
    if spec.family == "nie":
        return FactorDecomposition(NIE_WEIGHTS, NIE_FACTORS)
    if spec.family == "orthogonal":
        x = random_orthogonal(spec.n, rng)[:, : spec.p]
    elif spec.family == "nonorthogonal":
        x = _gaussian_factors(spec.n, spec.p, rng)
    else:
        x = np.eye(spec.n)
    weights = np.ones(spec.p) if spec.weights is None else np.asarray(spec.weights, dtype=float)
    return FactorDecomposition(weights, x)


def add_noise(clean, eta, rng, symmetric=True):
    """``A* + eta * ||A*|| / ||N|| * N`` with ``N`` i.i.d. standard normal.

    With ``symmetric=True`` (what the generators use) the noisy tensor is
    averaged over index permutations afterwards, which can only shrink the
    perturbation. With ``symmetric=False`` the raw ndarray is returned.
    """
    noise = rng.standard_normal(clean.data.shape)
    raw = clean.data + eta * frobenius_norm(clean) / np.linalg.norm(noise.ravel()) * noise
    if not symmetric:
        return raw
    return symmetrize(clean.order, clean.dim, raw)


def gen_instance(spec):
    """Build the ground truth, clean tensor and observed tensor for ``spec``.

    The same seed always gives bit-identical output.
    """
    rng = np.random.default_rng(spec.seed)
    truth = true_factors(spec, rng)
    clean = from_factors(truth, spec.m)
    observed = clean if spec.eta == 0 else add_noise(clean, spec.eta, rng)
    return GroundTruth(truth, clean, observed)
