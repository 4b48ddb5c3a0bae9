"""Greedy construction and GRASP for maximizing A(x) under the capacity limit.

The greedy pass sorts products by theta_i / w_i (bang per unit of display
space) and adds everything that still fits.  GRASP repeats a randomized
version of that construction for restricted-candidate-list sizes
1..rcl_max, follows each construction with a swap local search, and keeps
the best assortment found.  The rcl = 1 round is exactly the greedy
construction, so GRASP can never do worse than greedy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import Instance, tie_break_prefer, validate_assortment
from .objective import LinearizedCoefficients, a_value, incremental_a_delta
from .pricing import optimal_uniform_price

# accept a swap only if it improves A beyond float noise, to avoid cycling
_IMPROVE_TOL = 1e-12


@dataclass
class GraspConfig:
    rcl_max: int = 5
    max_iter: int = 80
    seed: int = 0

    def __post_init__(self):
        if self.rcl_max < 1:
            raise ValueError("rcl_max must be at least 1")
        if self.max_iter < 0:
            raise ValueError("max_iter must be nonnegative")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass
class HeuristicResult:
    assortment: np.ndarray
    a_value: float
    price: float
    revenue: float
    construction_rcl: int | None
    improvement_count: int

    def to_dict(self) -> dict:
        return {
            "assortment": self.assortment.tolist(),
            "a_value": self.a_value,
            "price": self.price,
            "revenue": self.revenue,
            "construction_rcl": self.construction_rcl,
            "improvement_count": self.improvement_count,
        }


def _ratio_order(instance: Instance, coeffs: LinearizedCoefficients) -> np.ndarray:
    """Product indices by theta_i / w_i descending, ties to the smaller index."""
    ratio = coeffs.theta / instance.weights
    return np.lexsort((np.arange(instance.n), -ratio))


def greedy(instance: Instance, coeffs: LinearizedCoefficients | None = None) -> HeuristicResult:
    """One pass over the ratio-sorted products, adding whatever still fits.

    Products that do not fit are skipped, not terminal: a lighter product
    later in the ratio order may still fit the remaining capacity.
    """
    if coeffs is None:
        coeffs = LinearizedCoefficients.from_instance(instance)
    x = np.zeros(instance.n, dtype=np.int8)
    remaining = instance.capacity
    for k in _ratio_order(instance, coeffs):
        if instance.weights[k] <= remaining:
            x[k] = 1
            remaining -= instance.weights[k]
    a = a_value(instance, x, coeffs)
    price, revenue = optimal_uniform_price(instance, x, coeffs)
    return HeuristicResult(
        assortment=x,
        a_value=a,
        price=price,
        revenue=revenue,
        construction_rcl=None,
        improvement_count=0,
    )


def _construct(instance, coeffs, order, rcl, rng):
    """Randomized greedy: repeatedly pick uniformly among the rcl best-ratio
    unselected products that still fit, until nothing fits."""
    x = np.zeros(instance.n, dtype=np.int8)
    remaining = instance.capacity
    while True:
        candidates = [
            k for k in order if not x[k] and instance.weights[k] <= remaining
        ]
        if not candidates:
            return x
        pool = candidates[:rcl]
        k = pool[int(rng.integers(len(pool)))] if len(pool) > 1 else pool[0]
        x[k] = 1
        remaining -= instance.weights[k]


def _local_search(instance, coeffs, x, max_iter, rng):
    """Swap local search: draw one offered and one unoffered product, flip
    both, keep the move iff it is feasible and strictly increases A."""
    n = instance.n
    weights = instance.weights
    x = x.copy()
    current_weight = float(weights @ x.astype(float))
    current_a = a_value(instance, x, coeffs)
    accepted = 0
    for _ in range(max_iter):
        ones = np.flatnonzero(x == 1)
        zeros = np.flatnonzero(x == 0)
        if ones.size == 0 or zeros.size == 0:
            break
        out = int(ones[rng.integers(ones.size)])
        inc = int(zeros[rng.integers(zeros.size)])
        if current_weight - weights[out] + weights[inc] > instance.capacity:
            continue
        delta = incremental_a_delta(instance, coeffs, x, inc, "add")
        x[inc] = 1
        delta += incremental_a_delta(instance, coeffs, x, out, "remove")
        if delta > _IMPROVE_TOL * max(1.0, current_a):
            x[out] = 0
            current_weight += weights[inc] - weights[out]
            current_a += delta
            accepted += 1
        else:
            x[inc] = 0
    return x, accepted


def grasp(instance: Instance, config: GraspConfig | None = None) -> HeuristicResult:
    """Best assortment over rcl = 1..rcl_max randomized rounds.

    Each round gets its own RNG stream derived from (seed, round), so rounds
    are independently reproducible.  Rounds tie-break by A, then by the
    canonical assortment preference, so the output is deterministic.
    """
    if config is None:
        config = GraspConfig()
    coeffs = LinearizedCoefficients.from_instance(instance)
    order = _ratio_order(instance, coeffs)

    best_x = None
    best_a = -np.inf
    best_rcl = 1
    improvements = 0
    for rcl in range(1, config.rcl_max + 1):
        rng = np.random.default_rng((config.seed, rcl))
        x = _construct(instance, coeffs, order, rcl, rng)
        x, accepted = _local_search(instance, coeffs, x, config.max_iter, rng)
        improvements += accepted
        a = a_value(instance, x, coeffs)
        if a > best_a or (a == best_a and tie_break_prefer(x, best_x)):
            best_x, best_a, best_rcl = x, a, rcl
    price, revenue = optimal_uniform_price(instance, best_x, coeffs)
    return HeuristicResult(
        assortment=best_x,
        a_value=best_a,
        price=price,
        revenue=revenue,
        construction_rcl=best_rcl,
        improvement_count=improvements,
    )
