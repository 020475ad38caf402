"""Exception types shared across the package."""


class SpdCalcError(Exception):
    """Base class for all spdcalc errors."""


class DimensionMismatchError(SpdCalcError):
    """Operands have incompatible shapes."""


class AsymmetricInputError(SpdCalcError):
    """Matrix is too far from symmetric to be silently symmetrized."""


class NotPositiveDefiniteError(SpdCalcError):
    """Matrix failed the positive definiteness test."""


class SpectrumDomainError(SpdCalcError):
    """Spectrum violates the domain of the requested scalar function."""


class EigenConvergenceError(SpdCalcError):
    """Jacobi sweeps did not reach the off-diagonal tolerance."""

    def __init__(self, off_residual: float, sweeps: int):
        super().__init__(
            f"eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {off_residual:.3e})"
        )
        self.off_residual = off_residual
        self.sweeps = sweeps


class CurveDomainError(SpdCalcError):
    """Parameter lies outside the curve's domain."""


class UndefinedRatioError(SpdCalcError):
    """Ratio denominator vanishes and no limiting direction is available."""


class InvalidMethodError(SpdCalcError):
    """Requested evaluation method is not valid for the given arguments."""
