"""Periodic Ross-Macdonald malaria model on m patches.

Humans (H_i, infected h_i) migrate between patches with the matrix L^H;
mosquitoes (V_i, infected v_i) stay put and have seasonal recruitment,
mortality and biting rates. Linearizing at the disease-free periodic state
(H*, V*(t)) gives a 2m dimensional problem with infected humans first.
"""
from collections import namedtuple
import logging

import numpy as np
import scipy.integrate

from ..errors import ModelError, PreconditionError, InconsistencyError
from ..linalg import is_irreducible, perron_pair
from ..periodic import PeriodicMatrixFn, PeriodIntegrator
from ..reproduction import PeriodicVFProblem, r0_periodic
from ..zero_structure import ConnectivityMatrix
from ..utils import STEPS_PER_PERIOD, BISECTION_TOL

logger = logging.getLogger(__name__)

ODE_RESIDUAL_TOL = 1e-6

RossMacdonaldParams_ = namedtuple(
    'RossMacdonaldParams',
    ['m', 'period', 'total_humans', 'migration', 'sigma1', 'sigma2', 'gamma',
     'mortality', 'recruitment', 'biting'])


class RossMacdonaldParams(RossMacdonaldParams_):

    """Parameters of the periodic Ross-Macdonald patch model

    Build instances with :func:`ross_macdonald_params`, which broadcasts and
    validates.

    Attributes
    ----------
    m : int
        Number of patches
    period : float
        T, in days
    total_humans : float
        N^H, the conserved human population
    migration : ConnectivityMatrix
        L^H, m x m human migration rates per day
    sigma1 : numpy.ndarray
        Probability that a bite of an infected human infects a mosquito
    sigma2 : numpy.ndarray
        Probability that a bite of an infected mosquito infects a human
    gamma : numpy.ndarray
        Human recovery rates per day
    mortality : tuple of PeriodicMatrixFn
        mu_i(t), mosquito death rate per day (1 x 1 functions)
    recruitment : tuple of PeriodicMatrixFn
        epsilon_i(t), mosquitoes recruited per day
    biting : tuple of PeriodicMatrixFn
        beta_i(t), bites per mosquito per day

    """
    pass


def _per_patch(values, m, name):
    values = np.array(values, dtype=float).reshape(-1)
    if values.size == 1:
        values = np.repeat(values, m)
    if values.size != m:
        raise ModelError('{} needs 1 or {} values, got {}'.format(
            name, m, values.size))
    if not np.all(np.isfinite(values)):
        raise ModelError('{} is not finite'.format(name))
    return values


def _series(values, m, period, name):
    if isinstance(values, (PeriodicMatrixFn, int, float)):
        values = [values]
    values = list(values)
    if len(values) == 1:
        values = values * m
    if len(values) != m:
        raise ModelError('{} needs 1 or {} series, got {}'.format(
            name, m, len(values)))
    out = []
    for i, v in enumerate(values):
        if not isinstance(v, PeriodicMatrixFn):
            v = PeriodicMatrixFn.scalar(float(v), period=period)
        if v.n != 1 or v.period != period:
            raise ModelError('{}[{}] must be a scalar series of period '
                             '{!r}'.format(name, i + 1, period))
        if not v.is_positive():
            raise ModelError('{}[{}] is not positive over the period'.format(
                name, i + 1))
        out.append(v)
    return tuple(out)


def ross_macdonald_params(migration, period, total_humans, sigma1, sigma2,
                          gamma, mortality, recruitment, biting):
    """Validated RossMacdonaldParams

    Scalars (and single series) are broadcast to every patch.

    Raises
    ------
    H1Error
        if migration is not cooperative with zero column sums
    ModelError
        if a rate is not positive or a probability is outside [0, 1]

    """
    migration = (migration if isinstance(migration, ConnectivityMatrix)
                 else ConnectivityMatrix(migration))
    m = migration.n
    period = float(period)
    if not period > 0.0:
        raise ModelError('period must be positive')
    total_humans = float(total_humans)
    if not total_humans > 0.0:
        raise ModelError('total human population must be positive')
    sigma1 = _per_patch(sigma1, m, 'sigma1')
    sigma2 = _per_patch(sigma2, m, 'sigma2')
    for name, sigma in (('sigma1', sigma1), ('sigma2', sigma2)):
        if np.any(sigma < 0.0) or np.any(sigma > 1.0):
            raise ModelError('{} must lie in [0, 1]'.format(name))
    gamma = _per_patch(gamma, m, 'gamma')
    if np.any(gamma <= 0.0):
        raise ModelError('gamma must be positive')
    return RossMacdonaldParams(
        m, period, total_humans, migration, sigma1, sigma2, gamma,
        _series(mortality, m, period, 'mortality'),
        _series(recruitment, m, period, 'recruitment'),
        _series(biting, m, period, 'biting'))


def averaged_params(params):
    """The autonomous model with every periodic rate replaced by its mean"""
    def mean(series):
        return tuple(PeriodicMatrixFn.scalar(float(s.c0[0, 0]),
                                             period=params.period)
                     for s in series)
    return params._replace(mortality=mean(params.mortality),
                           recruitment=mean(params.recruitment),
                           biting=mean(params.biting))


DiseaseFreeSolution_ = namedtuple('DiseaseFreeSolution',
                                  ['Hstar', 'Vstar', 'times', 'samples'])


class DiseaseFreeSolution(DiseaseFreeSolution_):

    """The disease-free periodic state

    Attributes
    ----------
    Hstar : numpy.ndarray
        Humans per patch, summing to N^H
    Vstar : tuple of PeriodicMatrixFn
        Fourier fit of each patch's periodic mosquito population
    times : numpy.ndarray
        The N grid times in [0, T)
    samples : numpy.ndarray
        N x m mosquito populations on the grid

    """
    pass


def _periodic_start(mortality, recruitment, grid):
    """V(0) of the periodic solution of V' = epsilon - mu V"""
    cumulative = mortality.integral(grid)[:, 0, 0]
    total = cumulative[-1]
    weight = np.exp(-(total - cumulative))
    integrand = weight * recruitment.sample(grid)[:, 0, 0]
    return scipy.integrate.simpson(integrand, x=grid) / (1.0 - np.exp(-total))


def disease_free_solution(params, steps=STEPS_PER_PERIOD):
    """H* and V*(t) of the model without infection

    H* = N^H q where q is the positive null vector of L^H summing to 1.
    Each V*_i is started from its periodic initial value (a Simpson
    quadrature) and carried over one period with the Runge-Kutta
    integrator, then fitted with a Fourier series.

    Raises
    ------
    PreconditionError
        if L^H is reducible
    ModelError
        if some patch's mean mosquito mortality is not positive
    InconsistencyError
        if the fitted V* misses its differential equation by more than
        1e-6 times the largest recruitment

    """
    m, period = params.m, params.period
    LH = params.migration.L
    if not is_irreducible(LH):
        raise PreconditionError('human migration matrix must be irreducible')
    if m == 1:
        q = np.ones(1)
    else:
        q = perron_pair(LH).right
    Hstar = params.total_humans * q
    for i, mu in enumerate(params.mortality):
        if not mu.c0[0, 0] > 0.0:
            raise ModelError('patch {} has mean mosquito mortality <= 0, no '
                             'periodic solution'.format(i + 1))
    quadrature_grid = period * np.arange(steps + 1) / steps
    V0 = np.array([_periodic_start(mu, eps, quadrature_grid)
                   for mu, eps in zip(params.mortality, params.recruitment)])
    # state (V_1 .. V_m, 1): the last row carries the forcing
    entries = {}
    for i in range(m):
        entries[(i, i)] = -params.mortality[i]
        entries[(i, m)] = params.recruitment[i]
    generator = PeriodicMatrixFn.from_entries(m + 1, entries, period)
    integrator = PeriodIntegrator(period, steps)
    Phi = integrator.evolution(integrator.sample(generator))
    start = np.append(V0, 1.0)
    samples = np.einsum('kij,j->ki', Phi[:-1], start)[:, :m]
    Vstar = tuple(PeriodicMatrixFn.fit(samples[:, i], period)
                  for i in range(m))
    times = integrator.grid
    for i, v in enumerate(Vstar):
        mu, eps = params.mortality[i], params.recruitment[i]
        residual = (v.derivative().sample(times) - eps.sample(times) +
                    mu.sample(times) * v.sample(times))
        scale = np.max(np.abs(eps.sample(times)))
        if np.max(np.abs(residual)) > ODE_RESIDUAL_TOL * scale:
            raise InconsistencyError(
                'periodic mosquito population of patch {} misses its '
                'equation by {:.3g}'.format(i + 1,
                                            np.max(np.abs(residual))))
    logger.debug('disease-free state: H*=%s, mean V*=%s', Hstar,
                 [v.c0[0, 0] for v in Vstar])
    return DiseaseFreeSolution(Hstar, Vstar, times, samples)


def _matrices(params, Hstar, Vstar):
    m = params.m
    V_entries = {}
    F_entries = {}
    for i in range(m):
        V_entries[(i, i)] = params.gamma[i]
        V_entries[(m + i, m + i)] = params.mortality[i]
        F_entries[(i, m + i)] = params.biting[i] * float(params.sigma1[i])
        F_entries[(m + i, i)] = (params.biting[i].product(Vstar[i]) *
                                 float(params.sigma2[i] / Hstar[i]))
    return (PeriodicMatrixFn.from_entries(2 * m, V_entries, params.period),
            PeriodicMatrixFn.from_entries(2 * m, F_entries, params.period))


def _connectivity(params):
    m = params.m
    L = np.zeros((2 * m, 2 * m))
    L[:m, :m] = params.migration.L
    return ConnectivityMatrix(L)


def _averaged_matrices(params, Hstar):
    flat = averaged_params(params)
    Vstar = tuple(PeriodicMatrixFn.scalar(
        eps.c0[0, 0] / mu.c0[0, 0], period=params.period)
        for eps, mu in zip(flat.recruitment, flat.mortality))
    V, F = _matrices(flat, Hstar, Vstar)
    return V.mean(), F.mean()


def build_ross_macdonald(params, d=0.0, dfs=None, steps=STEPS_PER_PERIOD):
    """The linearized 2m dimensional problem at the disease-free state

    Infected humans are coordinates 0 .. m-1 and infected mosquitoes
    m .. 2m-1. Only humans disperse. The time averaged counterpart attached
    to the problem is the model with every seasonal rate replaced by its
    mean.

    Parameters
    ----------
    params : RossMacdonaldParams
    d : float
    dfs : DiseaseFreeSolution or None
        Computed when None

    Returns
    -------
    PeriodicVFProblem

    """
    if dfs is None:
        dfs = disease_free_solution(params, steps)
    V, F = _matrices(params, dfs.Hstar, dfs.Vstar)
    return PeriodicVFProblem(_connectivity(params), V, F, d,
                             _averaged_matrices(params, dfs.Hstar))


def patch_ratios(params, dfs=None, tol=BISECTION_TOL,
                 steps=STEPS_PER_PERIOD):
    """R0 of each patch in isolation, keeping its share H*_i of humans

    Returns
    -------
    numpy.ndarray
        m ratios; R0(d) tends to their maximum as d goes to 0

    """
    if dfs is None:
        dfs = disease_free_solution(params, steps)
    problem = build_ross_macdonald(params, 0.0, dfs)
    m = params.m
    ratios = []
    for i in range(m):
        idx = [i, m + i]
        isolated = PeriodicVFProblem(ConnectivityMatrix(np.zeros((2, 2))),
                                     problem.V.restrict(idx),
                                     problem.F.restrict(idx))
        ratios.append(r0_periodic(isolated, tol, steps).value)
    return np.array(ratios)
