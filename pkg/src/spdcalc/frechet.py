"""Derivative machinery for SPD-valued curves.

The central object is the normalized power-derivative operator: for a curve
t -> A(t) and exponent lam it evaluates

    lam != 0:  (1/lam) * d/dt A(t)^lam
    lam == 0:  d/dt log A(t)

through three independent routes (quadrature of the two-sided power mean,
divided differences on the spectrum, finite differences on the curve), which
the test suite plays against each other.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .core import (
    LOG,
    ScalarFunction,
    SpdMatrix,
    SymMatrix,
    frob_inner,
    power,
    spectral_apply,
    sym_eigen,
)
from .errors import CurveDomainError, InvalidMethodError, SpectrumDomainError
from .quadrature import QuadratureRule, gauss_legendre, resolve_rule

CBRT_EPS = float(np.cbrt(np.finfo(float).eps))
CLOSE_EIG_REL = 1e-8

METHOD_QUADRATURE = "quadrature"
METHOD_DIVIDED_DIFFERENCE = "divided_difference"
METHOD_FINITE_DIFFERENCE = "finite_difference"
METHODS = (METHOD_QUADRATURE, METHOD_DIVIDED_DIFFERENCE, METHOD_FINITE_DIFFERENCE)


def fd_step(t: float) -> float:
    """Central-difference step balancing truncation against roundoff."""
    return CBRT_EPS * max(1.0, abs(t))


@dataclass(frozen=True)
class MatrixCurve:
    """One-parameter SPD-valued map on [t_lo, t_hi].

    ``value`` must return a validated SpdMatrix; ``derivative``, when given,
    returns the analytic derivative entries and is preferred over finite
    differences everywhere.
    """

    dim: int
    value: Callable[[float], SpdMatrix]
    derivative: Optional[Callable[[float], np.ndarray]]
    t_lo: float
    t_hi: float
    label: str = ""

    def contains(self, t: float) -> bool:
        return self.t_lo <= t <= self.t_hi

    def value_at(self, t: float) -> SpdMatrix:
        if not self.contains(t):
            raise CurveDomainError(
                f"t={t} outside [{self.t_lo}, {self.t_hi}] of curve {self.label!r}"
            )
        return self.value(t)


def curve_derivative(c: MatrixCurve, t: float, h: float | None = None) -> SymMatrix:
    """Derivative of the curve at t: analytic when available, else central FD."""
    if not c.contains(t):
        raise CurveDomainError(f"t={t} outside [{c.t_lo}, {c.t_hi}] of curve {c.label!r}")
    if c.derivative is not None:
        return SymMatrix.from_array(c.derivative(t))
    step = fd_step(t) if h is None else h
    if not (c.contains(t - step) and c.contains(t + step)):
        raise CurveDomainError(f"stencil [t-h, t+h] leaves the domain at t={t}, h={step}")
    diff = (c.value(t + step).entries - c.value(t - step).entries) / (2.0 * step)
    return SymMatrix.from_array(diff)


def dlog_integral(a: SpdMatrix, h, quad: QuadratureRule | int | None = None) -> SymMatrix:
    """Derivative of log A in direction h via the double-resolvent integral.

    Quadrature mean over s of R(s) h R(s) with R(s) = ((1-s)I + sA)^{-1}.
    Independent of the spectral route.
    """
    if not isinstance(a, SpdMatrix):
        a = SpdMatrix.from_array(a)
    rule = resolve_rule(quad)
    hmat = np.asarray(h, dtype=float)
    out = _kernels.dlog_resolvent_sum(a.entries, hmat, rule.nodes, rule.weights)
    return SymMatrix.from_array(0.5 * (out + out.T))


def _loewner_matrix(f: ScalarFunction, lam: np.ndarray) -> np.ndarray:
    """Divided-difference table of f on the spectrum, f' on the diagonal.

    Near-degenerate pairs (gap below CLOSE_EIG_REL relative) take the
    midpoint derivative to avoid catastrophic cancellation.
    """
    gaps = lam[:, None] - lam[None, :]
    mags = np.maximum(np.abs(lam)[:, None], np.abs(lam)[None, :])
    close = np.abs(gaps) <= CLOSE_EIG_REL * np.maximum(mags, 1e-300)
    mid = 0.5 * (lam[:, None] + lam[None, :])
    fvals = f.value(lam)
    safe_gaps = np.where(close, 1.0, gaps)
    table = (fvals[:, None] - fvals[None, :]) / safe_gaps
    return np.where(close, f.deriv(mid), table)


def frechet_divided_difference(a, h, f: ScalarFunction) -> np.ndarray:
    """Directional derivative of f(A) along h by spectral divided differences."""
    eig = sym_eigen(a)
    if f.needs_positive_spectrum() and float(eig.lam[0]) <= 0.0:
        raise SpectrumDomainError(f"{f.label()} needs a positive spectrum")
    table = _loewner_matrix(f, eig.lam)
    m = eig.q.T @ np.asarray(h, dtype=float) @ eig.q
    return eig.q @ (table * m) @ eig.q.T


@dataclass(frozen=True)
class DerivOutput:
    """Result of one power-derivative evaluation."""

    matrix: np.ndarray
    lam: float
    method: str


def _power_derivative_from_eig(eig, dlog_entries: np.ndarray, lam: float,
                               rule: QuadratureRule) -> np.ndarray:
    """Quadrature of the two-sided power mean of d(log A) at exponent lam."""
    if lam == 0.0:
        return dlog_entries
    e = np.log(eig.lam)
    u = lam * (1.0 - rule.nodes)
    v = lam * rule.nodes
    weights = _kernels.pair_power_weights(e, u, v, rule.weights)
    m = eig.q.T @ dlog_entries @ eig.q
    return eig.q @ (weights * m) @ eig.q.T


def power_derivative(c: MatrixCurve, t: float, lam: float,
                     quad: QuadratureRule | int | None = None,
                     method: str = METHOD_DIVIDED_DIFFERENCE) -> DerivOutput:
    """Normalized derivative of A^lam along the curve at t.

    quadrature          two-sided power mean of d(log A), with d(log A)
                        itself from the resolvent integral
    divided_difference  (1/lam) times the spectral Frechet derivative of
                        x^lam (log x when lam == 0)
    finite_difference   (1/lam) times a central difference of A(t)^lam;
                        rejected for lam == 0
    """
    if method not in METHODS:
        raise InvalidMethodError(f"unknown method {method!r}")
    a = c.value_at(t)
    if method == METHOD_FINITE_DIFFERENCE:
        if lam == 0.0:
            raise InvalidMethodError(
                "finite differences of A^lam are undefined at lam == 0; "
                "use quadrature or divided differences"
            )
        step = fd_step(t)
        if not (c.contains(t - step) and c.contains(t + step)):
            raise CurveDomainError(f"stencil [t-h, t+h] leaves the domain at t={t}")
        ap = spectral_apply(c.value(t + step), power(lam)).entries
        am = spectral_apply(c.value(t - step), power(lam)).entries
        return DerivOutput((ap - am) / (2.0 * step * lam), lam, method)

    da = curve_derivative(c, t).entries
    if method == METHOD_DIVIDED_DIFFERENCE:
        if lam == 0.0:
            out = frechet_divided_difference(a, da, LOG)
        else:
            out = frechet_divided_difference(a, da, power(lam)) / lam
        return DerivOutput(out, lam, method)

    rule = resolve_rule(quad)
    dlog = dlog_integral(a, da, rule).entries
    out = _power_derivative_from_eig(a.eig, dlog, lam, rule)
    return DerivOutput(out, lam, method)


def param_power_derivative(a: SpdMatrix, base_exp: float, slope: float,
                           x: float) -> SymMatrix:
    """d/dx of A^(base_exp + slope*x): slope * A^(base_exp + slope*x) log A."""
    if not isinstance(a, SpdMatrix):
        a = SpdMatrix.from_array(a)
    lam = a.eig.lam
    vals = slope * np.power(lam, base_exp + slope * x) * np.log(lam)
    out = a.eig.assemble(vals)
    return SymMatrix.from_array(0.5 * (out + out.T))


def conjugation_mean(b: SpdMatrix, x_dir, x: float,
                     quad: QuadratureRule | int | None = None) -> np.ndarray:
    """Quadrature mean over s of B^((1+x)s) X B^(-(1+x)s).

    Constant in x (and equal to X) whenever X commutes with B.
    """
    if not isinstance(b, SpdMatrix):
        b = SpdMatrix.from_array(b)
    rule = resolve_rule(quad)
    e = np.log(b.eig.lam)
    u = (1.0 + x) * rule.nodes
    v = -(1.0 + x) * rule.nodes
    weights = _kernels.pair_power_weights(e, u, v, rule.weights)
    m = b.eig.q.T @ np.asarray(x_dir, dtype=float) @ b.eig.q
    return b.eig.q @ (weights * m) @ b.eig.q.T


def conjugation_mean_pairing(b: SpdMatrix, x_dir, x: float,
                             quad: QuadratureRule | int | None = None) -> tuple[float, float]:
    """Pairing value and curvature of the conjugation mean.

    Returns (value, curvature) where value pairs the means at shifts x and
    -x, and curvature is the tensor-product quadrature of the squared
    commutator term; the curvature is a sum of non-negative contributions,
    so it is non-negative up to roundoff for every x.
    """
    if not isinstance(b, SpdMatrix):
        b = SpdMatrix.from_array(b)
    rule = resolve_rule(quad)
    p_plus = conjugation_mean(b, x_dir, x, rule)
    p_minus = conjugation_mean(b, x_dir, -x, rule)
    value = frob_inner(p_plus, p_minus)

    e = np.log(b.eig.lam)
    m = b.eig.q.T @ np.asarray(x_dir, dtype=float) @ b.eig.q
    commutator = (e[:, None] - e[None, :]) * m
    curvature = _kernels.curvature_double_sum(
        e, commutator * commutator, rule.nodes, rule.weights, x
    )
    return float(value), float(curvature)
