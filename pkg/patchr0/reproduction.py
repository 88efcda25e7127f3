"""Basic reproduction ratios of periodic patch models.

The periodic ratio R0(d) of du/dt = dL u - V(t) u + F(t) u is the unique
mu > 0 at which the growth bound of dL - V(t) + F(t) / mu crosses zero. The
growth bound decreases in mu, so the root is bracketed and bisected.
"""
from collections import namedtuple
import logging

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import (H2Error, PreconditionError, UnboundedR0Error,
                     InconsistencyError, ConvergenceError)
from .linalg import as_square_matrix, spectral_bound, spectral_radius
from .periodic import PeriodicMatrixFn, PeriodIntegrator
from .zero_structure import (ConnectivityMatrix, as_connectivity,
                             build_basis)
from .utils import (STEPS_PER_PERIOD, MU_FLOOR, MU_CEIL, BISECTION_TOL,
                    VALIDATION_GRID)

logger = logging.getLogger(__name__)

BRACKET = (0.5, 2.0)
BRACKET_FACTOR = 4.0
MAX_BISECTIONS = 200
# bound on |omega| T at a returned root
RESIDUAL_TOL = 1e-8
MIN_RTOL = 4.0 * np.finfo(float).eps


class R0Case:
    ROOT = 'P1-root'
    DEGENERATE = 'P2-degenerate'


class PeriodicVFProblem(object):

    """The linear system du/dt = dL u - V(t) u + F(t) u

    Parameters
    ----------
    L : ConnectivityMatrix or array_like
    V : PeriodicMatrixFn
        Removal and transition rates; -V(t) must be cooperative
    F : PeriodicMatrixFn
        New infection rates; must be nonnegative
    d : float
        Dispersal rate, >= 0
    averaged : tuple (V_bar, F_bar) or None
        The matrices of the time averaged autonomous model. When None they
        are the period means of V and F. Models whose averaged counterpart
        averages the parameters rather than V and F supply them here.

    Raises
    ------
    H2Error
        if F(t) has a negative entry or -V(t) a negative off-diagonal entry
        (beyond 1e-12) on a 1024 point grid

    """

    def __init__(self, L, V, F, d=0.0, averaged=None):
        L = as_connectivity(L)
        for name, fn in (('V', V), ('F', F)):
            if not isinstance(fn, PeriodicMatrixFn):
                raise PreconditionError(
                    '{} must be a PeriodicMatrixFn'.format(name))
            if fn.n != L.n:
                raise PreconditionError('{} is {}x{} but L is {}x{}'.format(
                    name, fn.n, fn.n, L.n, L.n))
        if V.period != F.period:
            raise PreconditionError('V and F have different periods')
        d = float(d)
        if not np.isfinite(d) or d < 0.0:
            raise PreconditionError('dispersal rate must be >= 0, got '
                                    '{!r}'.format(d))
        if not F.is_nonnegative(VALIDATION_GRID):
            raise H2Error('F(t) has negative entries')
        if not (-V).is_cooperative(VALIDATION_GRID):
            raise H2Error('-V(t) is not cooperative')
        if averaged is not None:
            averaged = (as_square_matrix(averaged[0], 'V_bar'),
                        as_square_matrix(averaged[1], 'F_bar'))
        self.__L = L
        self.__V = V
        self.__F = F
        self.__d = d
        self.__averaged = averaged

    def __repr__(self):
        return 'PeriodicVFProblem(n={}, d={!r}, period={!r})'.format(
            self.n, self.__d, self.period)

    @property
    def L(self):
        return self.__L

    @property
    def V(self):
        return self.__V

    @property
    def F(self):
        return self.__F

    @property
    def d(self):
        return self.__d

    @property
    def period(self):
        return self.__V.period

    @property
    def n(self):
        return self.__L.n

    @property
    def averaged(self):
        """(V_bar, F_bar) of the time averaged model"""
        if self.__averaged is not None:
            return self.__averaged
        return self.__V.mean(), self.__F.mean()

    def with_dispersal(self, d):
        """The same problem at another dispersal rate"""
        return PeriodicVFProblem(self.__L, self.__V, self.__F, d,
                                 self.__averaged)


R0Result_ = namedtuple('R0Result', ['value', 'case', 'bracket', 'iterations',
                                    'residual'])


class R0Result(R0Result_):

    """Outcome of the sign relation root find

    Attributes
    ----------
    value : float
        R0, or 0 in the degenerate case
    case : str
        R0Case.ROOT or R0Case.DEGENERATE
    bracket : tuple of float
        Final (mu_lo, mu_hi)
    iterations : int
        Growth bound evaluations spent expanding and bisecting
    residual : float
        |omega| T at the returned ratio (0 in the degenerate case)

    """
    pass


H3Check_ = namedtuple('H3Check', ['omega', 'ok'])


class H3Check(H3Check_):

    """Growth bound of dL - V(t) and whether it is negative"""
    pass


class _SignRelation(object):

    """omega(mu), the growth bound of dL - V(t) + F(t) / mu

    V and F are sampled once; each evaluation costs one monodromy.
    """

    def __init__(self, problem, steps):
        dispersal = None
        if problem.d > 0.0 and np.any(problem.L.L):
            dispersal = problem.d * problem.L.L
        self.__integrator = PeriodIntegrator(problem.period, steps, dispersal)
        self.__V = self.__integrator.sample(problem.V)
        self.__F = self.__integrator.sample(problem.F)
        self.evaluations = 0

    @property
    def integrator(self):
        return self.__integrator

    def removal_bound(self):
        return self.__integrator.monodromy(-self.__V,
                                           cooperative=True).growth_bound

    def __call__(self, mu):
        self.evaluations += 1
        samples = self.__F / mu - self.__V
        return self.__integrator.monodromy(samples,
                                           cooperative=True).growth_bound


def check_H3(problem, steps=STEPS_PER_PERIOD):
    """Growth bound of the infection-free system dL - V(t)

    Returns
    -------
    H3Check

    """
    omega = _SignRelation(problem, steps).removal_bound()
    return H3Check(omega, bool(omega < 0.0))


def growth_bound_at(problem, mu, steps=STEPS_PER_PERIOD):
    """omega of dL - V(t) + F(t) / mu"""
    mu = float(mu)
    if not mu > 0.0:
        raise PreconditionError('mu must be positive, got {!r}'.format(mu))
    return _SignRelation(problem, steps)(mu)


def threshold_eigenvalue(problem, steps=STEPS_PER_PERIOD):
    """Principal eigenvalue of dL - V(t) + F(t); its sign is that of
    R0 - 1"""
    return growth_bound_at(problem, 1.0, steps)


def _bisect(omega, lo, hi, rtol, mu_floor):
    root, info = scipy.optimize.bisect(
        omega, lo, hi, xtol=rtol * mu_floor, rtol=rtol,
        maxiter=MAX_BISECTIONS, full_output=True, disp=False)
    if not info.converged:
        logger.warning('bisection stopped after %d iterations',
                       info.iterations)
    return float(root), info.iterations


def _narrow(omega, root, width, lo, hi):
    """A sign changing bracket of the given half width around root, or the
    old bracket when the signs do not straddle it"""
    a, b = max(lo, root - width), min(hi, root + width)
    if a < b and omega(a) > 0.0 and omega(b) < 0.0:
        return a, b
    return lo, hi


def _find_ratio(omega, period, tol, mu_floor=MU_FLOOR, mu_ceil=MU_CEIL):
    lo, hi = BRACKET
    w_lo, w_hi = omega(lo), omega(hi)
    while w_hi > 0.0:
        if hi >= mu_ceil:
            raise UnboundedR0Error(
                'growth bound is still {!r} at mu = {!r}'.format(w_hi, hi))
        lo, w_lo = hi, w_hi
        hi = min(hi * BRACKET_FACTOR, mu_ceil)
        w_hi = omega(hi)
        logger.debug('bracket expanded up to [%g, %g]', lo, hi)
    while w_lo < 0.0:
        if lo <= mu_floor:
            logger.debug('growth bound %g < 0 at the floor mu = %g', w_lo, lo)
            return R0Result(0.0, R0Case.DEGENERATE, (0.0, lo),
                            omega.evaluations, 0.0)
        hi, w_hi = lo, w_lo
        lo = max(lo / BRACKET_FACTOR, mu_floor)
        w_lo = omega(lo)
        logger.debug('bracket expanded down to [%g, %g]', lo, hi)
    bracket = (lo, hi)
    rtol = tol
    root, iterations = _bisect(omega, lo, hi, rtol, mu_floor)
    residual = abs(omega(root)) * period
    # the width tolerance alone does not bound |omega| T for long periods
    while residual >= RESIDUAL_TOL:
        if rtol <= MIN_RTOL:
            raise ConvergenceError(
                'growth bound residual {:.3g} at mu = {!r} stays above {:g} '
                'at the finest bisection width'.format(residual, root,
                                                       RESIDUAL_TOL),
                iterations=omega.evaluations)
        width = 2.0 * rtol * (mu_floor + root)
        refined = max(rtol * RESIDUAL_TOL / (4.0 * residual), MIN_RTOL)
        logger.debug('residual %.3g at relative width %g, refining to %g',
                     residual, rtol, refined)
        rtol = refined
        lo, hi = _narrow(omega, root, width, lo, hi)
        root, steps = _bisect(omega, lo, hi, rtol, mu_floor)
        iterations += steps
        residual = abs(omega(root)) * period
    logger.debug('R0 = %.12g after %d bisection steps, residual %.3g', root,
                 iterations, residual)
    return R0Result(root, R0Case.ROOT, bracket, omega.evaluations, residual)


def r0_periodic(problem, tol=BISECTION_TOL, steps=STEPS_PER_PERIOD):
    """R0(d) from the sign relation

    Parameters
    ----------
    problem : PeriodicVFProblem
    tol : float
        Relative width at which bisection stops
    steps : int
        Steps per period for every growth bound evaluation

    Returns
    -------
    R0Result

    Raises
    ------
    PreconditionError
        if the infection-free system does not decay
    UnboundedR0Error
        if the growth bound is still positive at mu = 1e8
    ConvergenceError
        if |omega| T stays above 1e-8 at the finest bisection width

    """
    omega = _SignRelation(problem, steps)
    removal = omega.removal_bound()
    if not removal < 0.0:
        raise PreconditionError(
            'infection-free system does not decay (growth bound {!r} at '
            'd = {!r})'.format(removal, problem.d))
    return _find_ratio(omega, problem.period, tol)


def reduced_problem(problem, basis=None):
    """The aggregated system -P V(t) Q + P F(t) Q without dispersal"""
    if basis is None:
        basis = build_basis(problem.L)
    if basis.n != problem.n:
        raise PreconditionError('basis does not match the problem')
    V_bar, F_bar = problem.averaged
    averaged = (basis.P.dot(V_bar).dot(basis.Q),
                basis.P.dot(F_bar).dot(basis.Q))
    return PeriodicVFProblem(
        ConnectivityMatrix(np.zeros((basis.alpha0, basis.alpha0))),
        problem.V.transform(basis.P, basis.Q),
        problem.F.transform(basis.P, basis.Q), 0.0, averaged)


def r0_reduced(problem, basis=None, tol=BISECTION_TOL,
               steps=STEPS_PER_PERIOD):
    """The large dispersal limit ratio of the aggregated system

    Returns
    -------
    R0Result

    """
    return r0_periodic(reduced_problem(problem, basis), tol, steps)


def r0_autonomous(L, V, F, d=0.0):
    """r((V - dL)^-1 F) for constant V and F

    Raises
    ------
    PreconditionError
        if s(dL - V) >= 0 or V - dL is singular

    """
    V = as_square_matrix(V, 'V')
    F = as_square_matrix(F, 'F')
    if L is None:
        L = np.zeros_like(V)
    else:
        L = as_connectivity(L).L
    if L.shape != V.shape or F.shape != V.shape:
        raise PreconditionError('L, V and F must have the same shape')
    A = V - float(d) * L
    s = spectral_bound(-A)
    if not s < 0.0:
        raise PreconditionError('s(dL - V) = {!r} is not negative'.format(s))
    try:
        next_generation = scipy.linalg.solve(A, F)
    except np.linalg.LinAlgError as e:
        raise PreconditionError('V - dL is singular: {}'.format(e))
    if not np.all(np.isfinite(next_generation)):
        raise InconsistencyError('next generation matrix is not finite')
    return spectral_radius(next_generation)


def r0_time_averaged(problem):
    """R0 of the time averaged autonomous model at the problem's d"""
    V_bar, F_bar = problem.averaged
    return r0_autonomous(problem.L, V_bar, F_bar, problem.d)
