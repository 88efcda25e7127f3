"""Dispersal sweeps and the limits of lambda*(d) and R0(d) as d goes to 0
and to infinity."""
from collections import namedtuple
import logging
import os

import numpy as np
import pandas as pd

from .errors import PatchR0Error, PreconditionError, InconsistencyError
from .periodic import (principal_eigenvalue,
                       principal_eigenfunction, aggregation_residual)
from .reproduction import (check_H3, threshold_eigenvalue, r0_periodic,
                           r0_reduced)
from .zero_structure import as_connectivity, build_basis, reduced_block_order
from .utils import (STEPS_PER_PERIOD, BISECTION_TOL, RUN_MODE_ENV_VAR,
                    get_workers)

logger = logging.getLogger(__name__)

BLOCK_TOL = 1e-8
SMALL_D = 1e-3
LARGE_D = 1e4


class RunMode:
    DBG, LUIGI = range(2)
    from_str = {'dbg': DBG, 'luigi': LUIGI}


def get_run_mode(default=RunMode.DBG):
    """Run mode from PATCHR0_RUN_MODE, ``default`` when unset"""
    try:
        return RunMode.from_str[os.environ[RUN_MODE_ENV_VAR].lower()]
    except KeyError:
        return default


ReducedEigenvalue_ = namedtuple('ReducedEigenvalue',
                                ['value', 'block_values', 'blocks'])


class ReducedEigenvalue(ReducedEigenvalue_):

    """Principal eigenvalue of the aggregated system

    Attributes
    ----------
    value : float
        lambda~*
    block_values : tuple of float
        Principal eigenvalue of each irreducible diagonal block of P M Q
    blocks : tuple of tuple of int
        The blocks, as positions among the closed blocks of L

    """
    pass


def reduced_eigenvalue(L, M, steps=STEPS_PER_PERIOD, basis=None):
    """lambda~* for P M(t) Q, checked against its block decomposition

    Raises
    ------
    InconsistencyError
        if lambda~* differs from the largest block eigenvalue by more than
        1e-8

    """
    L = as_connectivity(L)
    if basis is None:
        basis = build_basis(L)
    Mt = M.transform(basis.P, basis.Q)
    value = principal_eigenvalue(None, Mt, 0.0, steps)
    structure = reduced_block_order(
        np.concatenate((Mt.c0[np.newaxis], Mt.cos, Mt.sin)))
    blocks = tuple(tuple(int(i) for i in idx) for idx in structure.blocks)
    block_values = tuple(
        principal_eigenvalue(None, Mt.restrict(idx), 0.0, steps)
        for idx in blocks)
    top = max(block_values)
    if abs(value - top) > BLOCK_TOL * max(1.0, abs(value)):
        raise InconsistencyError(
            'reduced eigenvalue {!r} differs from its largest block '
            'eigenvalue {!r}'.format(value, top))
    return ReducedEigenvalue(value, block_values, blocks)


def lambda_tilde(L, M, steps=STEPS_PER_PERIOD):
    """The limit of lambda*(d) as d goes to infinity"""
    return reduced_eigenvalue(L, M, steps).value


SweepPoint_ = namedtuple('SweepPoint', ['d', 'lam', 'r0', 'h3_ok',
                                        'agg_residual', 'error'])


class SweepPoint(SweepPoint_):

    """Results at one dispersal rate

    Attributes
    ----------
    d : float
    lam : float
        Principal eigenvalue of dL - V + F (NaN on failure)
    r0 : float
        R0(d) (NaN on failure)
    h3_ok : bool
        Whether dL - V(t) decays and both computations succeeded
    agg_residual : float
        Aggregation residual of the principal eigenfunction of dL - V + F
    error : str or None
        Failure message

    """
    pass


def evaluate_point(problem, d, basis, steps=STEPS_PER_PERIOD,
                   tol=BISECTION_TOL):
    """Computes one SweepPoint; failures are logged and recorded"""
    try:
        at_d = problem.with_dispersal(d)
        h3 = check_H3(at_d, steps)
        if not h3.ok:
            logger.warning('d=%g: infection-free growth bound %g >= 0', d,
                           h3.omega)
            return SweepPoint(d, np.nan, np.nan, False, np.nan,
                              'growth bound {!r} >= 0'.format(h3.omega))
        lam = threshold_eigenvalue(at_d, steps)
        r0 = r0_periodic(at_d, tol, steps).value
        u = principal_eigenfunction(at_d.L, at_d.F - at_d.V, d, steps)
        residual = aggregation_residual(basis, u)
    except PatchR0Error as e:
        logger.warning('d=%g failed: %s', d, e)
        return SweepPoint(d, np.nan, np.nan, False, np.nan, str(e))
    logger.debug('d=%g: lambda=%.12g r0=%.12g', d, lam, r0)
    return SweepPoint(d, lam, r0, True, residual, None)


SweepLimits_ = namedtuple('SweepLimits', ['lambda_at0', 'lambda_tilde',
                                          'r0_at0', 'r0_tilde'])


class SweepLimits(SweepLimits_):

    """lambda* and R0 at d = 0 and for the aggregated system"""
    pass


SweepResult_ = namedtuple('SweepResult', ['d_grid', 'lambda_values',
                                          'r0_values', 'limits',
                                          'diagnostics', 'points'])


class SweepResult(SweepResult_):

    """A sweep over dispersal rates

    Attributes
    ----------
    d_grid : numpy.ndarray
        Strictly increasing positive rates
    lambda_values : numpy.ndarray
    r0_values : numpy.ndarray
    limits : SweepLimits
    diagnostics : numpy.ndarray
        Aggregation residual of the principal eigenfunction at each d
    points : tuple of SweepPoint

    """

    def to_dataframe(self):
        """One row per rate with columns d, lambda, r0, h3_ok, agg_residual"""
        return pd.DataFrame({
            'd': self.d_grid,
            'lambda': self.lambda_values,
            'r0': self.r0_values,
            'h3_ok': [p.h3_ok for p in self.points],
            'agg_residual': self.diagnostics},
            columns=['d', 'lambda', 'r0', 'h3_ok', 'agg_residual'])


SweepOptions_ = namedtuple('SweepOptions', ['steps_per_period', 'tol',
                                            'workers', 'run_mode'])


class SweepOptions(SweepOptions_):

    """Numerical and execution settings of a sweep

    Attributes
    ----------
    steps_per_period : int
    tol : float
        Bisection tolerance of each R0
    workers : int
        Parallel workers for the luigi back-end
    run_mode : int
        A RunMode constant

    """

    @classmethod
    def default(cls, steps_per_period=STEPS_PER_PERIOD, tol=BISECTION_TOL):
        """Defaults, with workers and run mode read from the environment"""
        return cls(steps_per_period, tol, get_workers(), get_run_mode())


def _check_grid(d_grid):
    grid = np.asarray(d_grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise PreconditionError('dispersal grid is empty')
    if not np.all(np.isfinite(grid)) or np.any(grid <= 0.0):
        raise PreconditionError('dispersal rates must be positive')
    if np.any(np.diff(grid) <= 0.0):
        raise PreconditionError('dispersal grid must be strictly increasing')
    return grid


def sweep_limits(problem, steps=STEPS_PER_PERIOD, tol=BISECTION_TOL,
                 basis=None):
    """The d = 0 and aggregated quantities a sweep converges to"""
    if basis is None:
        basis = build_basis(problem.L)
    M = problem.F - problem.V
    lambda_at0 = principal_eigenvalue(None, M, 0.0, steps)
    lam_tilde = reduced_eigenvalue(problem.L, M, steps, basis).value
    r0_at0 = r0_periodic(problem.with_dispersal(0.0), tol, steps).value
    r0_tilde = r0_reduced(problem, basis, tol, steps).value
    return SweepLimits(lambda_at0, lam_tilde, r0_at0, r0_tilde)


def sweep(problem, d_grid, options=None):
    """lambda*(d) and R0(d) over a grid of dispersal rates

    Points are independent; they are evaluated serially or through luigi
    depending on ``options.run_mode`` and assembled in grid order. A
    failing point is recorded with h3_ok False and NaN values.

    Parameters
    ----------
    problem : PeriodicVFProblem
        Its own d is ignored
    d_grid : array_like
        Strictly increasing positive rates
    options : SweepOptions or None

    Returns
    -------
    SweepResult

    Raises
    ------
    PreconditionError
        if the grid is empty, not positive or not increasing

    """
    grid = _check_grid(d_grid)
    if options is None:
        options = SweepOptions.default()
    basis = build_basis(problem.L)
    steps, tol = options.steps_per_period, options.tol
    jobs = [(evaluate_point, (problem, d, basis, steps, tol))
            for d in grid]
    if options.run_mode == RunMode.LUIGI:
        from . import run_luigi
        points = run_luigi.run(jobs, options.workers)
    else:
        from . import run_debug
        points = run_debug.run(jobs)
    limits = sweep_limits(problem, steps, tol, basis)
    failed = sum(1 for p in points if not p.h3_ok)
    if failed:
        logger.warning('%d of %d sweep points failed', failed, len(points))
    return SweepResult(grid,
                       np.array([p.lam for p in points]),
                       np.array([p.r0 for p in points]),
                       limits,
                       np.array([p.agg_residual for p in points]),
                       tuple(points))


LimitReport_ = namedtuple('LimitReport', ['lambda_small_gap',
                                          'lambda_large_gap', 'r0_small_gap',
                                          'r0_large_gap', 'passed_small',
                                          'passed_large'])


class LimitReport(LimitReport_):

    """Gaps between the sweep end points and the computed limits"""

    @property
    def passed(self):
        return self.passed_small and self.passed_large


def verify_limits(result, tol_small=1e-3, tol_large=1e-3):
    """Compares the smallest and largest grid points with the limits

    Raises
    ------
    PreconditionError
        unless the grid reaches d <= 1e-3 and d >= 1e4

    """
    grid = result.d_grid
    if grid[0] > SMALL_D or grid[-1] < LARGE_D:
        raise PreconditionError(
            'grid [{!r}, {!r}] must reach below {} and above {}'.format(
                grid[0], grid[-1], SMALL_D, LARGE_D))
    limits = result.limits
    lambda_small = abs(result.lambda_values[0] - limits.lambda_at0)
    lambda_large = abs(result.lambda_values[-1] - limits.lambda_tilde)
    r0_small = abs(result.r0_values[0] - limits.r0_at0)
    r0_large = abs(result.r0_values[-1] - limits.r0_tilde)
    # NaN gaps fail
    passed_small = bool(lambda_small < tol_small and r0_small < tol_small)
    passed_large = bool(lambda_large < tol_large and r0_large < tol_large)
    report = LimitReport(lambda_small, lambda_large, r0_small, r0_large,
                         passed_small, passed_large)
    logger.info('limit check: small d %s (%.3g, %.3g), large d %s '
                '(%.3g, %.3g)', 'passed' if passed_small else 'FAILED',
                lambda_small, r0_small, 'passed' if passed_large else 'FAILED',
                lambda_large, r0_large)
    return report


FigureShape_ = namedtuple('FigureShape', ['minima', 'maxima'])


class FigureShape(FigureShape_):

    """Interior local extrema of a sampled curve"""

    def decreases_increases_decreases(self):
        """True if some local minimum is followed by a local maximum"""
        return any(mx > mn for mn in self.minima for mx in self.maxima)


def figure_shape(values):
    """Indices of strict interior local minima and maxima, ignoring NaN

    Returns
    -------
    FigureShape

    """
    values = np.asarray(values, dtype=float)
    keep = np.nonzero(np.isfinite(values))[0]
    v = values[keep]
    minima = []
    maxima = []
    for k in range(1, v.size - 1):
        if v[k] < v[k - 1] and v[k] < v[k + 1]:
            minima.append(int(keep[k]))
        elif v[k] > v[k - 1] and v[k] > v[k + 1]:
            maxima.append(int(keep[k]))
    return FigureShape(tuple(minima), tuple(maxima))
