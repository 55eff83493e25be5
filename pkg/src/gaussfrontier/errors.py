"""Exception hierarchy shared across the package."""


class GaussFrontierError(Exception):
    """Base class for all package errors."""


class ModelError(GaussFrontierError, ValueError):
    """The Gaussian model (or a matrix derived from it) is invalid."""


class NotPSDError(ModelError):
    """A covariance matrix has an eigenvalue below ``-rank_tol * lambda_max``."""


class DegenerateModelError(ModelError):
    """Ranks of a joint covariance and its marginals are mutually inconsistent."""


class NumericalError(GaussFrontierError, ArithmeticError):
    """An iterative routine failed to converge."""
