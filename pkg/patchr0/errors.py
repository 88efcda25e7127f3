"""Exceptions raised by patchr0.

Every error derives from :class:`PatchR0Error`. The two families below decide
how the command line front end exits: a :class:`ValidationError` means the
input was rejected (exit code 1), a :class:`NumericalError` means a
computation on accepted input failed (exit code 2).
"""


class PatchR0Error(Exception):
    """Root of all patchr0 exceptions"""
    code = 'error'


class ValidationError(PatchR0Error):
    """Input rejected before or while computing"""
    pass


class NumericalError(PatchR0Error):
    """A computation on validated input failed"""
    pass


class PreconditionError(ValidationError):
    code = 'precondition'


class H1Error(ValidationError):
    """Connectivity matrix is not cooperative with zero column sums"""
    code = 'H1'


class H2Error(ValidationError):
    """F(t) is not nonnegative or -V(t) is not cooperative"""
    code = 'H2'


class ModelError(ValidationError):
    """Model parameters out of range"""
    code = 'model'


class ConfigError(ValidationError):
    """Malformed model file

    Parameters
    ----------
    message : str
    path : str or None
        File the error was found in
    line : int or None
        1-based line number the offending key was declared on

    """
    code = 'schema'

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        location = ''
        if path is not None:
            location = '{}:'.format(path)
            if line is not None:
                location = '{}{}:'.format(location, line)
            location += ' '
        super().__init__('{}{}'.format(location, message))


class ConvergenceError(NumericalError):
    """An iterative solver failed

    Parameters
    ----------
    message : str
    dimension : int or None
        Dimension of the matrix being solved
    iterations : int or None
        Number of iterations performed

    """
    code = 'convergence'

    def __init__(self, message, dimension=None, iterations=None):
        self.dimension = dimension
        self.iterations = iterations
        super().__init__(message)


class IntegrationError(NumericalError):
    """Non-finite values appeared while integrating

    Parameters
    ----------
    message : str
    step : int or None
        Index of the first step that produced a non-finite value

    """
    code = 'integration'

    def __init__(self, message, step=None):
        self.step = step
        super().__init__(message)


class InconsistencyError(NumericalError):
    """A mathematically guaranteed property failed to hold"""
    code = 'inconsistency'


class AssemblyError(InconsistencyError):
    """An assembled basis failed its invariant checks

    Parameters
    ----------
    message : str
    residual : float or None
        Max-norm of the offending residual

    """
    code = 'assembly'

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class UnboundedR0Error(NumericalError):
    """The growth bound stayed positive at the top of the ratio bracket"""
    code = 'unbounded-r0'
