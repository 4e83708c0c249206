class QCRError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(QCRError, ValueError):
    pass


class NotHermitianError(QCRError, ValueError):
    def __init__(self, j: int, k: int, form: int | None = None):
        self.j, self.k, self.form = j, k, form
        where = f"form {form}, " if form is not None else ""
        super().__init__(f"matrix is not Hermitian: {where}entry ({j}, {k}) "
                         f"is not the conjugate of entry ({k}, {j})")


class SignatureError(QCRError, ValueError):
    """Raised when eigenvalue signs do not support a weight construction."""


class EigensolverError(QCRError, RuntimeError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        self.diagnostics = diagnostics or {}
        super().__init__(f"{message} ({self.diagnostics})" if diagnostics else message)


class ReductionError(QCRError, ValueError):
    """An operator is outside the class a symbolic transformation accepts."""


class TruncationError(QCRError, ValueError):
    pass


class RangeError(QCRError, ValueError):
    """Right-hand side is not in the range of the truncated operator."""

    def __init__(self, residual: float, threshold: float):
        self.residual, self.threshold = residual, threshold
        super().__init__(f"f not in truncated range: residual {residual:.3e} "
                         f"exceeds {threshold:.3e}")
