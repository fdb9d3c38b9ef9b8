"""Exception hierarchy shared by every module."""


class ModineqError(Exception):
    """Base class for all errors raised by :mod:`modineq`."""


class DimensionError(ModineqError, ValueError):
    """A matrix does not match the tensor factorization it is paired with."""


class NotHermitianError(ModineqError, ValueError):
    """Anti-Hermitian part exceeds the tolerance of the spectral routines."""


class NotPositiveDefiniteError(ModineqError, ValueError):
    """A spectrum contains a non-positive eigenvalue where ``> 0`` is required."""


class SpectralDomainError(ModineqError, ValueError):
    """A scalar function produced non-finite values on a spectrum."""


class ParameterError(ModineqError, ValueError):
    """A function or builder parameter lies outside its admissible range."""


class UnknownIdError(ModineqError, KeyError):
    """An id string does not name a cataloged function or builder."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""
