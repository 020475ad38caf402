"""Symmetric and SPD matrix types, spectral matrix functions, norm bounds.

All matrices are dense float64 and small (dimension up to ~16).  The
eigensolver is a cyclic Jacobi iteration with a fixed sweep order, which
keeps results deterministic for a fixed input; eigenvalues are returned in
ascending order and each eigenvector is normalized so that its first
nonzero component is positive.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    AsymmetricInputError,
    DimensionMismatchError,
    EigenConvergenceError,
    NotPositiveDefiniteError,
    SpectrumDomainError,
)
from .quadrature import QuadratureRule, resolve_rule
from .reports import BoundCheck, make_report

SYM_REL_TOL = 1e-12
SPD_REL_TOL = 1e-12
JACOBI_OFF_REL_TOL = 1e-14
JACOBI_MAX_SWEEPS = 50
EXP_SERIES_RTOL = 1e-16


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise DimensionMismatchError("matrix dimension must be >= 1")
    if not np.all(np.isfinite(a)):
        raise SpectrumDomainError("matrix entries must be finite")
    return a


def frob_inner(x, y) -> float:
    """Frobenius inner product: entrywise sum of products."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sum(a * b))


def frob_norm(x) -> float:
    """Frobenius norm, sqrt(frob_inner(x, x))."""
    a = np.asarray(x, dtype=float)
    return float(np.sqrt(np.sum(a * a)))


@dataclass(frozen=True)
class SymMatrix:
    """Dense real symmetric matrix.

    Construction accepts inputs whose asymmetry is at most ``SYM_REL_TOL``
    relative to the Frobenius norm, replaces them by (M + M^T)/2 and freezes
    the result; anything less symmetric is rejected because the calculus
    implemented here is simply false for non-symmetric input.
    """

    entries: np.ndarray

    @classmethod
    def from_array(cls, m) -> "SymMatrix":
        a = _as_square(m)
        scale = frob_norm(a)
        asym = frob_norm(a - a.T)
        if asym > SYM_REL_TOL * max(scale, 1e-300) and asym > 0.0:
            raise AsymmetricInputError(
                f"input is not symmetric (relative asymmetry {asym / max(scale, 1e-300):.3e})"
            )
        sym = 0.5 * (a + a.T)
        sym.flags.writeable = False
        return cls(sym)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)


@dataclass(frozen=True)
class EigenDecomposition:
    """Orthogonal eigenvectors (columns of q) and ascending eigenvalues."""

    q: np.ndarray
    lam: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.lam)

    def assemble(self, fvals: np.ndarray) -> np.ndarray:
        """Q diag(fvals) Q^T."""
        return (self.q * fvals) @ self.q.T


@dataclass(frozen=True)
class SpdMatrix:
    """Symmetric positive definite matrix with a cached positivity certificate.

    ``min_eigenvalue`` is the smallest eigenvalue of ``base``; construction
    fails unless it exceeds ``SPD_REL_TOL`` times the Frobenius norm.  The
    full eigendecomposition is kept because every spectral operation needs it.
    """

    base: SymMatrix
    min_eigenvalue: float
    eig: EigenDecomposition

    @classmethod
    def from_sym(cls, s: SymMatrix) -> "SpdMatrix":
        eig = sym_eigen(s)
        lo = float(eig.lam[0])
        if lo <= SPD_REL_TOL * max(frob_norm(s.entries), 1e-300):
            raise NotPositiveDefiniteError(
                f"smallest eigenvalue {lo:.3e} is not positive enough for dimension-{s.dim} input"
            )
        return cls(s, lo, eig)

    @classmethod
    def from_array(cls, m) -> "SpdMatrix":
        return cls.from_sym(SymMatrix.from_array(m))

    @property
    def entries(self) -> np.ndarray:
        return self.base.entries

    @property
    def dim(self) -> int:
        return self.base.dim

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)


# ---------------------------------------------------------------------------
# Scalar functions lifted to the spectrum.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarFunction:
    """One of x^alpha, log x, exp x, applied to matrices via the spectrum."""

    kind: str  # "power" | "log" | "exp"
    alpha: float = 1.0

    def value(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "power":
            return np.power(x, self.alpha)
        if self.kind == "log":
            return np.log(x)
        return np.exp(x)

    def deriv(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "power":
            return self.alpha * np.power(x, self.alpha - 1.0)
        if self.kind == "log":
            return 1.0 / x
        return np.exp(x)

    def needs_positive_spectrum(self) -> bool:
        if self.kind == "log":
            return True
        if self.kind == "exp":
            return False
        return self.alpha < 0.0 or self.alpha != round(self.alpha)

    def label(self) -> str:
        if self.kind == "power":
            return f"power({self.alpha:g})"
        return self.kind


def power(alpha: float) -> ScalarFunction:
    return ScalarFunction("power", float(alpha))


LOG = ScalarFunction("log")
EXP = ScalarFunction("exp")


# ---------------------------------------------------------------------------
# Eigendecomposition.
# ---------------------------------------------------------------------------


def _fix_eigen_conventions(diag: np.ndarray, v: np.ndarray) -> EigenDecomposition:
    order = np.argsort(diag, kind="stable")
    lam = diag[order].copy()
    q = v[:, order].copy()
    for col in range(q.shape[1]):
        nz = np.flatnonzero(np.abs(q[:, col]) > 1e-12)
        if len(nz) and q[nz[0], col] < 0.0:
            q[:, col] = -q[:, col]
    lam.flags.writeable = False
    q.flags.writeable = False
    return EigenDecomposition(q, lam)


def sym_eigen(s) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations."""
    if isinstance(s, SpdMatrix):
        return s.eig
    a = s.entries.copy() if isinstance(s, SymMatrix) else SymMatrix.from_array(s).entries.copy()
    d = a.shape[0]
    if d == 1:
        return EigenDecomposition(np.array([[1.0]]), a[0].copy())
    tol_off = JACOBI_OFF_REL_TOL * max(frob_norm(a), 1e-300)
    v, off, sweeps = _kernels.jacobi_cycle(a, tol_off, JACOBI_MAX_SWEEPS)
    if off > tol_off:
        raise EigenConvergenceError(off, sweeps)
    return _fix_eigen_conventions(np.diag(a), v)


def min_eigenvalue(s) -> float:
    """Smallest eigenvalue of a symmetric matrix."""
    if isinstance(s, SpdMatrix):
        return s.min_eigenvalue
    return float(sym_eigen(s).lam[0])


# ---------------------------------------------------------------------------
# Spectral matrix functions and their independent oracles.
# ---------------------------------------------------------------------------


def _check_domain(f: ScalarFunction, lam: np.ndarray) -> None:
    if f.kind == "log" or (f.kind == "power" and f.needs_positive_spectrum()):
        if float(lam[0]) <= 0.0:
            raise SpectrumDomainError(
                f"{f.label()} needs a strictly positive spectrum, got min {lam[0]:.3e}"
            )


def spectral_apply(a, f: ScalarFunction) -> SymMatrix:
    """Apply a scalar function to a symmetric matrix through its spectrum."""
    eig = sym_eigen(a)
    _check_domain(f, eig.lam)
    out = eig.assemble(f.value(eig.lam))
    return SymMatrix.from_array(0.5 * (out + out.T))


def mat_pow(a, alpha: float) -> SymMatrix:
    return spectral_apply(a, power(alpha))


def mat_log(a) -> SymMatrix:
    return spectral_apply(a, LOG)


def mat_exp(s) -> SymMatrix:
    return spectral_apply(s, EXP)


def mat_exp_series(s) -> SymMatrix:
    """Matrix exponential by direct power series.

    Terms are accumulated until the next term is below ``EXP_SERIES_RTOL``
    relative to the partial sum and the series has entered its geometric
    decay regime.  This is an oracle for ``spectral_apply(s, EXP)``, not a
    production exponential; no scaling-and-squaring is done.
    """
    x = np.asarray(s, dtype=float)
    x = _as_square(x)
    d = x.shape[0]
    term = np.eye(d)
    total = np.eye(d)
    xnorm = frob_norm(x)
    k = 0
    while True:
        k += 1
        term = term @ x / k
        total = total + term
        if k > xnorm and frob_norm(term) <= EXP_SERIES_RTOL * max(frob_norm(total), 1e-300):
            break
        if k > 600:  # xnorm bounded in practice; guard against misuse
            break
    return SymMatrix.from_array(0.5 * (total + total.T))


def mat_log_integral(a: SpdMatrix, quad: QuadratureRule | int | None = None) -> SymMatrix:
    """Matrix logarithm via the resolvent integral of (1-s)I + sA on [0, 1].

    Independent of the spectral path: per node it solves one linear system
    against A - I and accumulates the quadrature mean.
    """
    if not isinstance(a, SpdMatrix):
        a = SpdMatrix.from_array(a)
    rule = resolve_rule(quad)
    out = _kernels.log_resolvent_sum(a.entries, rule.nodes, rule.weights)
    return SymMatrix.from_array(0.5 * (out + out.T))


# ---------------------------------------------------------------------------
# Norm-power bound chains.
# ---------------------------------------------------------------------------


def norm_power_bounds(a: SpdMatrix, alpha: float) -> BoundCheck:
    """Evaluate the trace and power bound chains for an SPD matrix.

    Always checks |A| <= <A, I> <= sqrt(d) |A|.  For alpha >= 0 also checks
    min(1, d^((1-alpha)/2)) |A|^alpha <= |A^alpha| <= max(1, d^((1-alpha)/2)) |A|^alpha,
    and for alpha <= 0 the lower bound
    min(d^(1/2), d^(-alpha/2)) |A|^alpha <= |A^alpha|.
    There is no upper analogue for alpha < 0.
    """
    if not isinstance(a, SpdMatrix):
        a = SpdMatrix.from_array(a)
    d = a.dim
    na = frob_norm(a.entries)
    trace = float(np.trace(a.entries))
    napow = frob_norm(spectral_apply(a, power(alpha)).entries)
    ctx = {"d": d, "alpha": alpha}

    reports = [
        make_report("trace_lower", lhs=trace, rhs=na, margin=trace - na, context=ctx),
        make_report("trace_upper", lhs=np.sqrt(d) * na, rhs=trace,
                     margin=np.sqrt(d) * na - trace, context=ctx),
    ]
    if alpha >= 0.0:
        lo = min(1.0, d ** ((1.0 - alpha) / 2.0)) * na ** alpha
        hi = max(1.0, d ** ((1.0 - alpha) / 2.0)) * na ** alpha
        reports.append(make_report("power_lower", lhs=napow, rhs=lo,
                                   margin=napow - lo, context=ctx))
        reports.append(make_report("power_upper", lhs=hi, rhs=napow,
                                   margin=hi - napow, context=ctx))
    if alpha <= 0.0:
        lo = min(d ** 0.5, d ** (-alpha / 2.0)) * na ** alpha
        reports.append(make_report("power_lower_nonpos", lhs=napow, rhs=lo,
                                   margin=napow - lo, context=ctx))
    return BoundCheck(tuple(reports))
