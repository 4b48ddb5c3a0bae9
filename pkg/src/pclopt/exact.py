"""Exact maximization of A(x) under the capacity constraint.

Three routes to the optimum / bounds on it:

* ``brute_force_oracle`` enumerates all assortments (small n only).
* ``lp_relaxation`` solves the linear relaxation of the linearized program

      max  sum mu_ij y_ij + (n-1) sum theta_i x_i
      s.t. sum w_i x_i <= C,   1 + y_ij >= x_i + x_j,   y_ij >= 0,  x in [0,1]

  Because every mu_ij <= 0, a pair row only matters when x_i + x_j > 1 at
  the optimum, so the LP is solved by generating violated pair rows lazily;
  the restricted LPs stay tiny even for large n.
* ``branch_and_bound`` proves optimality over binary x, pruning nodes with
  a cheap fractional-knapsack majorant first and the node LP second, with
  the incumbent seeded by greedy and GRASP.

``knapsack_majorant_bound`` is the root version of the cheap bound:
dropping the nonpositive mu terms leaves (n-1) sum theta_i x_i, whose
fractional-knapsack optimum dominates the LP bound and hence A(x*).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .heuristics import GraspConfig, grasp, greedy
from .instance import Instance, tie_break_prefer
from .objective import LinearizedCoefficients, a_value
from .pricing import lambert_w0, optimal_uniform_price

_BRUTE_FORCE_MAX_N = 22
_CHUNK_BITS = 16
# inflate relaxation bounds so float noise can never prune the true optimum
_LP_SAFETY = 1e-7
_MAJORANT_SAFETY = 1e-9


@dataclass
class MipFormulation:
    """Arrays of the linearized program: objective, knapsack row, pair rows."""

    n: int
    pair_i: np.ndarray
    pair_j: np.ndarray
    x_costs: np.ndarray  # (n-1) * theta_i, the regrouped linear part
    y_costs: np.ndarray  # mu_ij <= 0
    weights: np.ndarray
    capacity: float

    @classmethod
    def from_instance(
        cls, instance: Instance, coeffs: LinearizedCoefficients | None = None
    ) -> "MipFormulation":
        if coeffs is None:
            coeffs = LinearizedCoefficients.from_instance(instance)
        return cls(
            n=instance.n,
            pair_i=instance.pair_i,
            pair_j=instance.pair_j,
            x_costs=(instance.n - 1) * coeffs.theta,
            y_costs=coeffs.mu,
            weights=instance.weights,
            capacity=instance.capacity,
        )

    @property
    def num_pairs(self) -> int:
        return self.y_costs.size


@dataclass
class LpSolution:
    x_frac: np.ndarray
    y_frac: np.ndarray
    objective_value: float


@dataclass
class SolveStats:
    nodes: int = 0
    lp_solves: int = 0
    wall_time_s: float = 0.0
    bound_history: list | None = None

    def to_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "lp_solves": self.lp_solves,
            "wall_time_s": self.wall_time_s,
        }


@dataclass
class SolveResult:
    assortment: np.ndarray | None
    a_value: float | None
    price: float
    revenue: float
    upper_bound: float | None
    status: str  # optimal | feasible | bound-only
    stats: SolveStats

    def to_dict(self) -> dict:
        return {
            "assortment": None if self.assortment is None else self.assortment.tolist(),
            "a_value": self.a_value,
            "price": self.price,
            "revenue": self.revenue,
            "upper_bound": self.upper_bound,
            "status": self.status,
            "stats": self.stats.to_dict(),
        }


@dataclass
class BranchBoundConfig:
    bound_mode: str = "lp"  # "lp" or "majorant"
    node_budget: int | None = None
    time_budget_s: float | None = None
    grasp: GraspConfig = field(default_factory=GraspConfig)
    integrality_tol: float = 1e-6
    prune_rel_tol: float = 1e-9
    record_bound_history: bool = False

    def __post_init__(self):
        if self.bound_mode not in ("lp", "majorant"):
            raise ValueError("bound_mode must be 'lp' or 'majorant'")


def _fractional_knapsack(values, weights, capacity):
    """Relaxed knapsack over [0,1] items: fill by value/weight ratio.

    Items with nonpositive value are left at zero.  Returns (optimum, fill)
    with fill the fractional solution over the given items.
    """
    m = values.size
    fill = np.zeros(m)
    if m == 0 or capacity <= 0:
        return 0.0, fill
    order = np.lexsort((np.arange(m), -values / weights))
    total = 0.0
    remaining = capacity
    for k in order:
        if values[k] <= 0.0 or remaining <= 0.0:
            break
        if weights[k] <= remaining:
            fill[k] = 1.0
            total += values[k]
            remaining -= weights[k]
        else:
            frac = remaining / weights[k]
            fill[k] = frac
            total += values[k] * frac
            break
    return total, fill


def knapsack_majorant_bound(instance: Instance) -> float:
    """(n-1) times the fractional-knapsack optimum of theta under the capacity.

    Valid because dropping the mu terms (all <= 0) and relaxing x to [0,1]
    both only increase the optimum, so this dominates the LP bound and A(x*).
    """
    coeffs = LinearizedCoefficients.from_instance(instance)
    best, _ = _fractional_knapsack(coeffs.theta, instance.weights, instance.capacity)
    return (instance.n - 1) * best


def _lp_bound(mip: MipFormulation, lb: np.ndarray, ub: np.ndarray):
    """LP relaxation with per-product bounds, by lazy pair-row generation.

    Pairs (mu < 0) enter the restricted LP only once the current solution
    violates x_i + x_j <= 1; when no uncovered pair is violated, the
    restricted optimum equals the full LP optimum.  Returns the canonical
    full objective, the x part of the solution, and the solver-call count.
    """
    n = mip.n
    I, J = mip.pair_i, mip.pair_j
    mu = mip.y_costs
    included = np.zeros(mip.num_pairs, dtype=bool)
    # pairs fixed on at both ends are always violated; seed them
    fixed_on = lb == 1
    included |= (mu < 0) & fixed_on[I] & fixed_on[J]

    solves = 0
    for _ in range(mip.num_pairs + 2):
        sel = np.flatnonzero(included)
        k = sel.size
        cost = np.concatenate([-mip.x_costs, -mu[sel]])
        row = np.concatenate(
            [np.zeros(n, dtype=int),
             np.repeat(np.arange(1, k + 1), 3)]
        )
        col = np.concatenate(
            [np.arange(n),
             np.stack([I[sel], J[sel], n + np.arange(k)], axis=1).ravel()]
        ) if k else np.arange(n)
        val = np.concatenate(
            [mip.weights,
             np.tile([1.0, 1.0, -1.0], k)]
        )
        a_ub = sp.csr_matrix((val, (row, col)), shape=(1 + k, n + k))
        b_ub = np.concatenate([[mip.capacity], np.ones(k)])
        bounds = [(float(lb[i]), float(ub[i])) for i in range(n)] + [(0.0, 1.0)] * k
        res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
        solves += 1
        if res.status != 0:
            raise RuntimeError(f"LP solve failed with status {res.status}: {res.message}")
        x = res.x[:n]
        violated = (mu < -1e-15) & ~included & (x[I] + x[J] - 1.0 > 1e-12)
        if not violated.any():
            y_full = np.maximum(0.0, x[I] + x[J] - 1.0)
            objective = float(mip.x_costs @ x + mu @ y_full)
            return objective, x, solves
        included |= violated
    raise RuntimeError("pair-row generation failed to converge")


def lp_relaxation(instance: Instance) -> LpSolution:
    """Optimal LP relaxation; its objective bounds A(x) for all feasible x."""
    mip = MipFormulation.from_instance(instance)
    lb = np.zeros(instance.n, dtype=np.int8)
    ub = np.ones(instance.n, dtype=np.int8)
    objective, x, _ = _lp_bound(mip, lb, ub)
    y = np.maximum(0.0, x[mip.pair_i] + x[mip.pair_j] - 1.0)
    return LpSolution(x_frac=x, y_frac=y, objective_value=objective)


def revenue_upper_bound(instance: Instance) -> float:
    """Revenue bound from the LP relaxation pushed through the price formula."""
    a_bar = lp_relaxation(instance).objective_value
    return lambert_w0(a_bar / math.e) / instance.beta


def brute_force_oracle(instance: Instance) -> SolveResult:
    """Exhaustive optimum over all 2^n assortments (guarded at n <= 22).

    Feasible assortments are screened with the linearized objective in bulk;
    near-maximal candidates are then re-evaluated with the canonical pair-sum
    A so the reported value uses the same arithmetic as every other solver.
    Ties prefer the assortment offering the lowest-indexed products.
    """
    n = instance.n
    if n > _BRUTE_FORCE_MAX_N:
        raise ValueError(
            f"brute force enumerates 2^n assortments; n={n} exceeds the "
            f"limit of {_BRUTE_FORCE_MAX_N}"
        )
    t0 = time.perf_counter()
    coeffs = LinearizedCoefficients.from_instance(instance)
    I, J = instance.pair_i, instance.pair_j
    lin_costs = (n - 1) * coeffs.theta
    bit_values = 1 << np.arange(n, dtype=np.int64)

    best_lin = -np.inf
    candidates: list[int] = []
    total = 1 << n
    chunk = 1 << min(_CHUNK_BITS, n)
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = (masks[:, None] & bit_values[None, :]) != 0
        feasible = bits @ instance.weights <= instance.capacity
        if not feasible.any():
            continue
        bits = bits[feasible]
        masks = masks[feasible]
        a_lin = bits @ lin_costs + (bits[:, I] & bits[:, J]) @ coeffs.mu
        best_lin = max(best_lin, float(a_lin.max()))
        window = best_lin - 1e-7 * max(1.0, abs(best_lin))
        keep = a_lin >= window
        candidates = [m for m in candidates if m[1] >= window]
        candidates.extend(zip(masks[keep].tolist(), a_lin[keep].tolist()))

    best_x = None
    best_a = -np.inf
    for mask, _ in candidates:
        x = ((mask & bit_values) != 0).astype(np.int8)
        if float(instance.weights @ x.astype(float)) > instance.capacity:
            continue
        a = a_value(instance, x, coeffs)
        if a > best_a or (a == best_a and tie_break_prefer(x, best_x)):
            best_x, best_a = x, a

    price, revenue = optimal_uniform_price(instance, best_x, coeffs)
    return SolveResult(
        assortment=best_x,
        a_value=best_a,
        price=price,
        revenue=revenue,
        upper_bound=best_a,
        status="optimal",
        stats=SolveStats(nodes=total, lp_solves=0, wall_time_s=time.perf_counter() - t0),
    )


def branch_and_bound(
    instance: Instance, config: BranchBoundConfig | None = None
) -> SolveResult:
    """Exact maximizer of A(x) over feasible assortments.

    Depth-first search branching on the most fractional product of the node
    relaxation (include-branch explored first).  Every node is bounded by the
    fractional-knapsack majorant with the mu interactions of the fixed-on
    products folded in; in "lp" mode the node LP tightens bounds that the
    majorant cannot prune.  The incumbent starts from greedy and GRASP.

    Exhausting the node or time budget returns status "feasible" with the
    best incumbent and the tightest global bound still open.
    """
    if config is None:
        config = BranchBoundConfig()
    t0 = time.perf_counter()
    n = instance.n
    weights = instance.weights
    coeffs = LinearizedCoefficients.from_instance(instance)
    mip = MipFormulation.from_instance(instance, coeffs)
    mu_mat = coeffs.mu_matrix(n)
    lin_costs = (n - 1) * coeffs.theta

    inc_x = np.zeros(n, dtype=np.int8)
    inc_a = a_value(instance, inc_x, coeffs)
    for seed_result in (greedy(instance, coeffs), grasp(instance, config.grasp)):
        if seed_result.a_value > inc_a or (
            seed_result.a_value == inc_a
            and tie_break_prefer(seed_result.assortment, inc_x)
        ):
            inc_x, inc_a = seed_result.assortment, seed_result.a_value

    stats = SolveStats(bound_history=[] if config.record_bound_history else None)

    root_majorant, _ = _fractional_knapsack(lin_costs, weights, instance.capacity)
    root_bound = root_majorant * (1 + _MAJORANT_SAFETY) + 1e-12
    lb0 = np.zeros(n, dtype=np.int8)
    ub0 = np.ones(n, dtype=np.int8)
    stack: list[tuple[np.ndarray, np.ndarray, float]] = [(lb0, ub0, root_bound)]
    stopped = False

    def maybe_update(x_cand: np.ndarray) -> None:
        nonlocal inc_x, inc_a
        a = a_value(instance, x_cand, coeffs)
        if a > inc_a or (a == inc_a and tie_break_prefer(x_cand, inc_x)):
            inc_x, inc_a = x_cand, a

    while stack:
        if config.node_budget is not None and stats.nodes >= config.node_budget:
            stopped = True
            break
        if (
            config.time_budget_s is not None
            and time.perf_counter() - t0 > config.time_budget_s
        ):
            stopped = True
            break
        lb, ub, bound = stack.pop()
        stats.nodes += 1
        prune_tol = config.prune_rel_tol * max(1.0, abs(inc_a))

        fixed_on = lb == 1
        weight_fixed = float(weights @ fixed_on)
        if weight_fixed > instance.capacity:
            continue
        residual = instance.capacity - weight_fixed
        free = (lb == 0) & (ub == 1)
        overweight = free & (weights > residual)
        if overweight.any():
            ub = ub.copy()
            ub[overweight] = 0
            free = free & ~overweight

        if not free.any():
            maybe_update(lb.copy())
            if stats.bound_history is not None:
                stats.bound_history.append(_global_bound(inc_a, stack))
            continue

        # linearized objective with the fixed-on set folded in:
        # value(x) = fixed_part + sum over free offered of c_tilde + free-free mu
        mu_fold = mu_mat @ fixed_on.astype(float)
        fixed_part = float(lin_costs @ fixed_on) + 0.5 * float(fixed_on @ mu_fold)
        c_tilde = lin_costs + mu_fold
        free_idx = np.flatnonzero(free)
        majorant_free, fill = _fractional_knapsack(
            np.clip(c_tilde[free_idx], 0.0, None), weights[free_idx], residual
        )
        majorant = fixed_part + majorant_free
        bound = min(bound, majorant * (1 + _MAJORANT_SAFETY) + 1e-12)

        if bound <= inc_a + prune_tol:
            if stats.bound_history is not None:
                stats.bound_history.append(_global_bound(inc_a, stack))
            continue

        if config.bound_mode == "lp":
            lp_obj, x_rel, solves = _lp_bound(mip, lb, ub)
            stats.lp_solves += solves
            bound = min(bound, lp_obj + _LP_SAFETY * max(1.0, abs(lp_obj)))
            if bound <= inc_a + prune_tol:
                if stats.bound_history is not None:
                    stats.bound_history.append(_global_bound(inc_a, stack))
                continue
        else:
            x_rel = lb.astype(float)
            x_rel[free_idx] = fill

        fractionality = np.where(free, np.minimum(x_rel, 1.0 - x_rel), -1.0)
        branch_var = int(np.argmax(fractionality))

        if fractionality[branch_var] <= config.integrality_tol:
            x_int = np.where(x_rel > 0.5, 1, 0).astype(np.int8)
            if float(weights @ x_int.astype(float)) <= instance.capacity:
                maybe_update(x_int)
                if config.bound_mode == "lp" or bound <= inc_a + config.prune_rel_tol * max(
                    1.0, abs(inc_a)
                ):
                    # integral LP optimum closes the subtree
                    if stats.bound_history is not None:
                        stats.bound_history.append(_global_bound(inc_a, stack))
                    continue
            if fractionality[branch_var] <= 0.0:
                branch_var = int(free_idx[0])

        child_up = (lb.copy(), ub.copy(), bound)
        child_up[0][branch_var] = 1
        child_down = (lb.copy(), ub.copy(), bound)
        child_down[1][branch_var] = 0
        stack.append(child_down)
        stack.append(child_up)
        if stats.bound_history is not None:
            stats.bound_history.append(_global_bound(inc_a, stack))

    upper = _global_bound(inc_a, stack) if stopped else inc_a
    status = "feasible" if stopped else "optimal"
    price, revenue = optimal_uniform_price(instance, inc_x, coeffs)
    stats.wall_time_s = time.perf_counter() - t0
    return SolveResult(
        assortment=inc_x,
        a_value=inc_a,
        price=price,
        revenue=revenue,
        upper_bound=upper,
        status=status,
        stats=stats,
    )


def _global_bound(incumbent_a: float, stack) -> float:
    open_bounds = max((node[2] for node in stack), default=incumbent_a)
    return max(incumbent_a, open_bounds)
