"""The assortment surrogate objective A(x) and its exact linearization.

A(x) sums one term per unordered pair:

    A(x) = sum over i<j of (exp(alpha_i/gamma_ij) x_i + exp(alpha_j/gamma_ij) x_j)^gamma_ij

Each pair term takes one of four values depending on which members are
offered: rho_ij (both), theta_i or theta_j (one), or 0 (none), where

    theta_i = exp(alpha_i)
    rho_ij  = (exp(alpha_i/gamma_ij) + exp(alpha_j/gamma_ij))^gamma_ij

With mu_ij = rho_ij - theta_i - theta_j <= 0 this is identically

    A(x) = sum over i<j of (mu_ij x_i x_j + theta_i x_i + theta_j x_j)

which is the quadratic form the exact solver linearizes.  rho is evaluated
in log space so small gammas do not overflow; pairs with gamma_ij == 1 get
rho = theta_i + theta_j exactly, making mu exactly zero there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .instance import Instance, validate_assortment


@dataclass
class LinearizedCoefficients:
    """theta per product, rho and mu = rho - theta_i - theta_j per pair."""

    theta: np.ndarray
    rho: np.ndarray
    mu: np.ndarray
    _mu_matrix: np.ndarray | None = field(
        default=None, init=False, repr=False, compare=False
    )

    @classmethod
    def from_instance(cls, instance: Instance) -> "LinearizedCoefficients":
        theta = np.exp(instance.alpha)
        I, J = instance.pair_i, instance.pair_j
        gam = instance.gamma_upper
        rho = np.exp(gam * np.logaddexp(instance.alpha[I] / gam, instance.alpha[J] / gam))
        unit = gam == 1.0
        rho[unit] = theta[I[unit]] + theta[J[unit]]
        # subadditivity of t -> t^gamma guarantees mu <= 0; clamp log/exp noise
        mu = np.minimum(rho - theta[I] - theta[J], 0.0)
        return cls(theta=theta, rho=rho, mu=mu)

    def mu_matrix(self, n: int) -> np.ndarray:
        """Dense symmetric mu with zero diagonal, built on first use."""
        if self._mu_matrix is None:
            I, J = np.triu_indices(n, k=1)
            mat = np.zeros((n, n))
            mat[I, J] = self.mu
            mat[J, I] = self.mu
            self._mu_matrix = mat
        return self._mu_matrix


def _pair_terms(instance: Instance, coeffs: LinearizedCoefficients, x: np.ndarray):
    on = x.astype(bool)
    on_i, on_j = on[instance.pair_i], on[instance.pair_j]
    theta_i = coeffs.theta[instance.pair_i]
    theta_j = coeffs.theta[instance.pair_j]
    return np.where(on_i & on_j, coeffs.rho, on_i * theta_i + on_j * theta_j)


def a_value(instance: Instance, x, coeffs: LinearizedCoefficients | None = None) -> float:
    """A(x), the pair-sum objective.  Empty pairs contribute 0."""
    x = validate_assortment(instance, x)
    if coeffs is None:
        coeffs = LinearizedCoefficients.from_instance(instance)
    return float(np.sum(_pair_terms(instance, coeffs, x)))


def a_value_linearized(
    instance: Instance, coeffs: LinearizedCoefficients, x
) -> float:
    """A(x) through the quadratic identity mu x_i x_j + theta_i x_i + theta_j x_j."""
    x = validate_assortment(instance, x).astype(float)
    xi, xj = x[instance.pair_i], x[instance.pair_j]
    terms = (
        coeffs.mu * xi * xj
        + coeffs.theta[instance.pair_i] * xi
        + coeffs.theta[instance.pair_j] * xj
    )
    return float(np.sum(terms))


def incremental_a_delta(
    instance: Instance,
    coeffs: LinearizedCoefficients,
    current_x,
    product_k: int,
    direction: str,
) -> float:
    """A(x') - A(x) for adding or removing one product, in O(n).

    Adding k contributes its mu row against the current assortment plus
    (n-1) theta_k; removal is the exact negation evaluated on the state
    that still contains k.
    """
    x = validate_assortment(instance, current_x).astype(float)
    mu_row = coeffs.mu_matrix(instance.n)[product_k]
    if direction == "add":
        if x[product_k] != 0:
            raise ValueError(f"product {product_k} is already offered")
        return float(mu_row @ x + (instance.n - 1) * coeffs.theta[product_k])
    if direction == "remove":
        if x[product_k] != 1:
            raise ValueError(f"product {product_k} is not offered")
        # diagonal of mu is zero, so k's own entry drops out of the dot product
        return float(-(mu_row @ x + (instance.n - 1) * coeffs.theta[product_k]))
    raise ValueError("direction must be 'add' or 'remove'")
