"""Problem data for capacitated assortment optimization with pricing.

An instance holds n products with quality constants alpha_i, display weights
w_i, a capacity limit C, a single price-sensitivity beta, and one
dissimilarity parameter gamma_ij in (0, 1] per unordered product pair.
Pairs are stored once, in row-major upper-triangular order:

    (0,1), (0,2), ..., (0,n-1), (1,2), ..., (n-2,n-1)

so pair (i, j) with i < j lives at index i*n - i*(i+1)/2 + (j - i - 1).

Assortments are plain 0/1 integer vectors; prices are nonnegative float
vectors.  Both are validated by helpers here rather than wrapped in classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


class ValidationError(ValueError):
    """Input data violates the documented schema.

    ``path`` points at the offending field (e.g. ``"gamma_upper[3]"``) so
    command-line callers can emit machine-readable errors.
    """

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.path = path


def pair_count(n: int) -> int:
    """Number of unordered product pairs."""
    return n * (n - 1) // 2


def pair_index(n: int, i: int, j: int) -> int:
    """Position of unordered pair {i, j} in the upper-triangular layout."""
    if i == j:
        raise ValueError("pair requires two distinct products")
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def pair_members(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (I, J) with the endpoints of every pair, in storage order."""
    return np.triu_indices(n, k=1)


def _as_float_array(value, name: str, length: int | None = None) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be an array of reals", name) from exc
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional", name)
    if length is not None and arr.shape[0] != length:
        raise ValidationError(
            f"{name} must have length {length}, got {arr.shape[0]}", name
        )
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValidationError(f"{name}[{bad}] is not finite", f"{name}[{bad}]")
    return arr


@dataclass
class Instance:
    """One problem instance: products, weights, capacity, beta, pair gammas."""

    n: int
    alpha: np.ndarray
    weights: np.ndarray
    capacity: float
    beta: float
    gamma_upper: np.ndarray
    pair_i: np.ndarray = field(init=False, repr=False, compare=False)
    pair_j: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ValidationError("n must be an integer", "n")
        self.n = int(self.n)
        if self.n < 2:
            raise ValidationError("n must be at least 2 (pairs required)", "n")
        self.alpha = _as_float_array(self.alpha, "alpha", self.n)
        self.weights = _as_float_array(self.weights, "weights", self.n)
        if np.any(self.weights <= 0):
            bad = int(np.flatnonzero(self.weights <= 0)[0])
            raise ValidationError("weights must be positive", f"weights[{bad}]")
        self.capacity = float(self.capacity)
        if not np.isfinite(self.capacity) or self.capacity <= 0:
            raise ValidationError("capacity must be positive", "capacity")
        self.beta = float(self.beta)
        if not np.isfinite(self.beta) or self.beta <= 0:
            raise ValidationError("beta must be positive", "beta")
        self.gamma_upper = _as_float_array(
            self.gamma_upper, "gamma_upper", pair_count(self.n)
        )
        if np.any((self.gamma_upper <= 0) | (self.gamma_upper > 1)):
            bad = int(
                np.flatnonzero((self.gamma_upper <= 0) | (self.gamma_upper > 1))[0]
            )
            raise ValidationError(
                "gamma values must lie in (0, 1]", f"gamma_upper[{bad}]"
            )
        self.pair_i, self.pair_j = pair_members(self.n)

    def gamma(self, i: int, j: int) -> float:
        """Dissimilarity parameter of the pair {i, j}."""
        return float(self.gamma_upper[pair_index(self.n, i, j)])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha.tolist(),
            "weights": self.weights.tolist(),
            "capacity": self.capacity,
            "beta": self.beta,
            "gamma_upper": self.gamma_upper.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        if not isinstance(data, dict):
            raise ValidationError("instance document must be a JSON object", "")
        required = ["n", "alpha", "weights", "capacity", "beta", "gamma_upper"]
        for key in required:
            if key not in data:
                raise ValidationError(f"missing field {key!r}", key)
        unknown = set(data) - set(required)
        if unknown:
            key = sorted(unknown)[0]
            raise ValidationError(f"unknown field {key!r}", key)
        try:
            capacity = float(data["capacity"])
            beta = float(data["beta"])
        except (TypeError, ValueError) as exc:
            field_name = "capacity" if not _is_real(data["capacity"]) else "beta"
            raise ValidationError(f"{field_name} must be a real number", field_name) from exc
        return cls(
            n=data["n"],
            alpha=data["alpha"],
            weights=data["weights"],
            capacity=capacity,
            beta=beta,
            gamma_upper=data["gamma_upper"],
        )


def _is_real(value) -> bool:
    return isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(
        value, bool
    )


def validate_assortment(instance: Instance, x: Iterable) -> np.ndarray:
    """Coerce x to a 0/1 integer vector of length n."""
    arr = np.asarray(x)
    if arr.shape != (instance.n,):
        raise ValidationError(
            f"assortment must have length {instance.n}", "assortment"
        )
    if not np.all((arr == 0) | (arr == 1)):
        bad = int(np.flatnonzero((arr != 0) & (arr != 1))[0])
        raise ValidationError("assortment entries must be 0 or 1", f"assortment[{bad}]")
    return arr.astype(np.int8)


def validate_prices(instance: Instance, p: Iterable) -> np.ndarray:
    """Coerce p to a nonnegative float vector of length n."""
    arr = _as_float_array(p, "prices", instance.n)
    if np.any(arr < 0):
        bad = int(np.flatnonzero(arr < 0)[0])
        raise ValidationError("prices must be nonnegative", f"prices[{bad}]")
    return arr


def total_weight(instance: Instance, x) -> float:
    x = validate_assortment(instance, x)
    return float(np.dot(instance.weights, x.astype(float)))


def is_feasible(instance: Instance, x) -> bool:
    """Capacity check: sum of offered weights does not exceed C."""
    return total_weight(instance, x) <= instance.capacity


def tie_break_prefer(x_new: np.ndarray, x_old: np.ndarray) -> bool:
    """Canonical preference among equally good assortments.

    Prefers the assortment that offers the lowest-indexed product on which
    the two differ, i.e. (1,0) beats (0,1).  Used by every solver so that
    ties resolve identically across methods.
    """
    diff = np.flatnonzero(np.asarray(x_new) != np.asarray(x_old))
    if diff.size == 0:
        return False
    return bool(np.asarray(x_new)[diff[0]] == 1)
