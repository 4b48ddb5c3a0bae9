"""Paired combinatorial logit choice probabilities, revenue, and simulation.

Every unordered pair of products forms a two-product nest with dissimilarity
gamma_ij.  Given prices p and offer vector x, with preference weights
v_i = exp(alpha_i - beta p_i):

    V_ij   = v_i^(1/gamma_ij) x_i + v_j^(1/gamma_ij) x_j
    q^ij   = V_ij^gamma_ij / (1 + sum over pairs of V^gamma)
    q_i^ij = v_i^(1/gamma_ij) x_i / V_ij          (0 when the nest is empty)
    q_i    = sum over pairs containing i of q^ij q_i^ij
    q_0    = 1 - sum over pairs of q^ij

Nest terms are evaluated in log space, exp(gamma * logaddexp(a_i/gamma,
a_j/gamma)), so small gammas or large utilities do not overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import Instance, validate_assortment, validate_prices

# exp() saturates instead of overflowing to inf
_MAX_EXPONENT = 709.0


def preference_weight(alpha_i: float, beta: float, price: float) -> float:
    """Preference weight v_i = exp(alpha_i - beta * price), overflow-guarded."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if price < 0:
        raise ValueError("price must be nonnegative")
    return float(np.exp(min(alpha_i - beta * price, _MAX_EXPONENT)))


@dataclass
class ChoiceDistribution:
    """Per-product purchase probabilities plus the no-purchase probability."""

    product_probs: np.ndarray
    no_purchase: float


def _pair_quantities(instance: Instance, prices: np.ndarray, x: np.ndarray):
    """Per-pair nest probabilities and within-nest shares.

    Returns (nest_probs, within_i, within_j, no_purchase) where nest_probs[p]
    is q^ij for pair p and within_i/within_j are the conditional shares of
    the two members (both zero when the nest offers nothing).
    """
    I, J = instance.pair_i, instance.pair_j
    gam = instance.gamma_upper
    a = instance.alpha - instance.beta * prices
    on = x.astype(bool)
    on_i, on_j = on[I], on[J]
    both = on_i & on_j

    with np.errstate(over="ignore"):
        nest_vals = np.where(
            both,
            np.exp(np.minimum(gam * np.logaddexp(a[I] / gam, a[J] / gam), _MAX_EXPONENT)),
            np.where(on_i, np.exp(np.minimum(a[I], _MAX_EXPONENT)),
                     np.where(on_j, np.exp(np.minimum(a[J], _MAX_EXPONENT)), 0.0)),
        )
        # share of member i in its nest: 1 / (1 + exp((a_j - a_i)/gamma))
        within_i = np.where(
            both,
            1.0 / (1.0 + np.exp((a[J] - a[I]) / gam)),
            np.where(on_i, 1.0, 0.0),
        )
    within_j = np.where(on_i | on_j, 1.0 - within_i, 0.0)

    denom = 1.0 + nest_vals.sum()
    nest_probs = nest_vals / denom
    no_purchase = 1.0 - nest_probs.sum()
    return nest_probs, within_i, within_j, no_purchase


def choice_probabilities(instance: Instance, prices, x) -> ChoiceDistribution:
    """Purchase probabilities q_i and no-purchase probability q_0.

    x does not have to be feasible; an empty assortment yields q_0 = 1.
    """
    prices = validate_prices(instance, prices)
    x = validate_assortment(instance, x)
    nest_probs, within_i, within_j, no_purchase = _pair_quantities(instance, prices, x)
    I, J = instance.pair_i, instance.pair_j
    probs = np.bincount(I, weights=nest_probs * within_i, minlength=instance.n)
    probs += np.bincount(J, weights=nest_probs * within_j, minlength=instance.n)
    return ChoiceDistribution(product_probs=probs, no_purchase=float(no_purchase))


def expected_revenue(instance: Instance, prices, x) -> float:
    """Expected revenue sum_i p_i q_i(p, x)."""
    prices = validate_prices(instance, prices)
    dist = choice_probabilities(instance, prices, x)
    return float(np.dot(prices, dist.product_probs))


def simulate_choice(
    instance: Instance, prices, x, rng_seed: int, trials: int
) -> ChoiceDistribution:
    """Empirical choice frequencies from two-stage sampling.

    Each trial first draws the no-purchase outcome or a nest according to
    (q_0, q^ij), then a product within the drawn nest according to q_i^ij.
    Deterministic for a fixed seed.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    prices = validate_prices(instance, prices)
    x = validate_assortment(instance, x)
    nest_probs, within_i, _, no_purchase = _pair_quantities(instance, prices, x)

    outcome_probs = np.concatenate(([no_purchase], nest_probs))
    outcome_probs = np.clip(outcome_probs, 0.0, None)
    outcome_probs /= outcome_probs.sum()

    rng = np.random.default_rng(rng_seed)
    outcomes = rng.choice(outcome_probs.size, size=trials, p=outcome_probs)
    uniforms = rng.random(trials)

    bought = outcomes > 0
    pair_ids = outcomes[bought] - 1
    take_i = uniforms[bought] < within_i[pair_ids]
    products = np.where(
        take_i, instance.pair_i[pair_ids], instance.pair_j[pair_ids]
    )
    counts = np.bincount(products, minlength=instance.n).astype(float)
    return ChoiceDistribution(
        product_probs=counts / trials,
        no_purchase=float(np.count_nonzero(~bought)) / trials,
    )
