"""Autonomous SIS patch model, linearized at the disease-free state."""
import numpy as np

from ..errors import ModelError
from ..periodic import PeriodicMatrixFn
from ..reproduction import PeriodicVFProblem


def build_sis_autonomous(beta, gamma, L, d=0.0, period=1.0):
    """Constant problem with V = diag(gamma), F = diag(beta)

    Parameters
    ----------
    beta : array_like
        Transmission rates, >= 0
    gamma : array_like
        Recovery rates, > 0
    L : ConnectivityMatrix or array_like
        Movement of infected individuals
    d : float
    period : float
        Any positive value; nothing depends on time

    Returns
    -------
    PeriodicVFProblem

    """
    beta = np.asarray(beta, dtype=float).reshape(-1)
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    if beta.shape != gamma.shape:
        raise ModelError('beta and gamma must have the same length')
    if np.any(gamma <= 0.0):
        raise ModelError('recovery rates must be positive')
    if np.any(beta < 0.0):
        raise ModelError('transmission rates must be nonnegative')
    return PeriodicVFProblem(
        L,
        PeriodicMatrixFn.constant(np.diag(gamma), period),
        PeriodicMatrixFn.constant(np.diag(beta), period),
        d)
