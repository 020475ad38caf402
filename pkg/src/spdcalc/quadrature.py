"""Gauss-Legendre quadrature rules on the unit interval.

A rule of order n integrates polynomials of degree <= 2n - 1 exactly.  The
integrands this package feeds into these rules (matrix powers, resolvents of
SPD matrices) are analytic on [0, 1], so convergence in the order is
geometric; order 64 is the default working rule and ``adaptive_matrix_mean``
doubles the order up to 256 when more accuracy is requested.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

DEFAULT_ORDER = 64
MAX_ORDER = 256
ADAPTIVE_RTOL = 1e-11


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes in (0, 1) and positive weights summing to 1."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum of per-node scalar values."""
        return float(np.dot(self.weights, values))


_RULE_CACHE: dict[int, QuadratureRule] = {}


def gauss_legendre(order: int) -> QuadratureRule:
    """Order-point Gauss-Legendre rule mapped affinely from [-1, 1] to [0, 1]."""
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"quadrature order must be in [1, {MAX_ORDER}], got {order}")
    rule = _RULE_CACHE.get(order)
    if rule is None:
        x, w = leggauss(order)
        nodes = 0.5 * (x + 1.0)
        weights = 0.5 * w
        nodes.flags.writeable = False
        weights.flags.writeable = False
        rule = QuadratureRule(nodes, weights)
        _RULE_CACHE[order] = rule
    return rule


def resolve_rule(quad: QuadratureRule | int | None) -> QuadratureRule:
    """Accept a rule, an order, or None (the default order-64 rule)."""
    if quad is None:
        return gauss_legendre(DEFAULT_ORDER)
    if isinstance(quad, int):
        return gauss_legendre(quad)
    return quad


def adaptive_matrix_mean(evaluate, start_order: int = DEFAULT_ORDER,
                         rtol: float = ADAPTIVE_RTOL):
    """Evaluate a rule -> matrix map at doubling orders until stable.

    Doubles the order starting from ``start_order`` until two successive
    results differ by less than ``rtol`` in relative Frobenius norm, capping
    at ``MAX_ORDER``.  Returns the last result.
    """
    order = min(start_order, MAX_ORDER)
    prev = evaluate(gauss_legendre(order))
    while order < MAX_ORDER:
        order = min(2 * order, MAX_ORDER)
        cur = evaluate(gauss_legendre(order))
        scale = max(float(np.linalg.norm(cur)), 1e-300)
        if float(np.linalg.norm(cur - prev)) < rtol * scale:
            return cur
        prev = cur
    return prev
