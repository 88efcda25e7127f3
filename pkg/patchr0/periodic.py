"""Periodic matrix functions and their evolution over one period.

A :class:`PeriodicMatrixFn` is a T-periodic n x n matrix whose entries are
truncated Fourier series. The monodromy matrix Phi(tau + T, tau) of
du/dt = A(t) u is computed with fixed step fourth order Runge-Kutta; when a
dispersal term dL is too stiff for an explicit step of reasonable size the
integrator switches to the integrating factor form of the same scheme, with
exp(h dL) computed exactly.
"""
from collections import namedtuple
import logging

import numpy as np
import scipy.linalg

from .errors import (PreconditionError, IntegrationError, InconsistencyError,
                     ConvergenceError)
from .linalg import as_square_matrix, spectral_radius, power_iteration
from .utils import (STEPS_PER_PERIOD, MIN_STEPS_PER_PERIOD, VALIDATION_GRID,
                    SIGN_TOL, max_norm)

logger = logging.getLogger(__name__)

MAX_HARMONICS = 32
FIT_TOL = 1e-8
MAX_RK4_STEPS = 2 ** 16
STIFF_STEPS = 2 ** 14
STABILITY_FACTOR = 16
NONNEGATIVE_REPAIR_TOL = 1e-10


def _coefficient_stack(coefficients, n, name):
    if coefficients is None:
        return np.zeros((0, n, n))
    stack = np.array(coefficients, dtype=float)
    if stack.size == 0:
        return np.zeros((0, n, n))
    if stack.ndim == 1 and n == 1:
        stack = stack.reshape(-1, 1, 1)
    if stack.ndim != 3 or stack.shape[1:] != (n, n):
        raise PreconditionError(
            '{} coefficients must have shape (K, {n}, {n}), got {}'.format(
                name, stack.shape, n=n))
    if not np.all(np.isfinite(stack)):
        raise PreconditionError('{} coefficients are not finite'.format(name))
    return stack


def _pad(stack, harmonics):
    if stack.shape[0] >= harmonics:
        return stack
    extra = np.zeros((harmonics - stack.shape[0],) + stack.shape[1:])
    return np.concatenate((stack, extra), axis=0)


class PeriodicMatrixFn(object):

    """A T-periodic matrix valued function

    A(t) = c0 + sum_k cos[k-1] cos(2 pi k t / T) + sin[k-1] sin(2 pi k t / T)

    Instances are immutable.

    Parameters
    ----------
    c0 : array_like
        n x n constant term (a scalar gives a 1 x 1 function)
    cos : array_like or None
        K x n x n cosine coefficients; for n == 1 a flat list is accepted
    sin : array_like or None
        K x n x n sine coefficients
    period : float
        T > 0

    """

    def __init__(self, c0, cos=None, sin=None, period=1.0):
        c0 = as_square_matrix(c0, 'c0')
        n = c0.shape[0]
        cos = _coefficient_stack(cos, n, 'cos')
        sin = _coefficient_stack(sin, n, 'sin')
        period = float(period)
        if not np.isfinite(period) or period <= 0.0:
            raise PreconditionError('period must be positive, got {!r}'.format(
                period))
        harmonics = max(cos.shape[0], sin.shape[0])
        cos = _pad(cos, harmonics)
        sin = _pad(sin, harmonics)
        for a in (c0, cos, sin):
            a.setflags(write=False)
        self.__c0 = c0
        self.__cos = cos
        self.__sin = sin
        self.__period = period

    @classmethod
    def constant(cls, A, period=1.0):
        return cls(A, period=period)

    @classmethod
    def scalar(cls, c0, cos=(), sin=(), period=1.0):
        """A 1 x 1 function from plain lists of coefficients"""
        return cls([[c0]], np.reshape(np.array(cos, dtype=float), (-1, 1, 1)),
                   np.reshape(np.array(sin, dtype=float), (-1, 1, 1)),
                   period)

    @classmethod
    def from_entries(cls, n, entries, period=1.0):
        """Assembles an n x n function from scalar entries

        Parameters
        ----------
        n : int
        entries : dict of (int, int) : PeriodicMatrixFn or float
            Entry (i, j); numbers are constants, functions must be 1 x 1
            with the given period. Missing entries are 0.
        period : float

        """
        parts = {}
        for (i, j), value in entries.items():
            if not isinstance(value, PeriodicMatrixFn):
                value = cls.scalar(float(value), period=period)
            if value.n != 1:
                raise PreconditionError('entry ({}, {}) is not scalar'.format(
                    i, j))
            _check_same_period(value.period, period)
            parts[(i, j)] = value
        harmonics = max([p.harmonics for p in parts.values()] + [0])
        c0 = np.zeros((n, n))
        cos = np.zeros((harmonics, n, n))
        sin = np.zeros((harmonics, n, n))
        for (i, j), p in parts.items():
            c0[i, j] = p.c0[0, 0]
            cos[:p.harmonics, i, j] = p.cos[:, 0, 0]
            sin[:p.harmonics, i, j] = p.sin[:, 0, 0]
        return cls(c0, cos, sin, period)

    @classmethod
    def from_samples(cls, samples, period, harmonics):
        """Trigonometric interpolation of samples on the uniform grid
        t_k = k T / N, keeping ``harmonics`` harmonics"""
        samples = np.asarray(samples, dtype=float)
        if samples.ndim == 1:
            samples = samples.reshape(-1, 1, 1)
        N = samples.shape[0]
        harmonics = min(int(harmonics), (N - 1) // 2)
        spectrum = np.fft.rfft(samples, axis=0) / N
        c0 = spectrum[0].real
        cos = 2.0 * spectrum[1:harmonics + 1].real
        sin = -2.0 * spectrum[1:harmonics + 1].imag
        return cls(c0, cos, sin, period)

    @classmethod
    def fit(cls, samples, period, tol=FIT_TOL, max_harmonics=MAX_HARMONICS):
        """Smallest Fourier fit of periodic samples within tol

        Harmonics are added one at a time until the max residual at the
        samples, relative to the largest sample, drops below tol or
        max_harmonics is reached.

        Parameters
        ----------
        samples : array_like
            N x n x n (or N for a scalar) values on t_k = k T / N
        period : float
        tol : float
        max_harmonics : int

        """
        samples = np.asarray(samples, dtype=float)
        if samples.ndim == 1:
            samples = samples.reshape(-1, 1, 1)
        N = samples.shape[0]
        times = period * np.arange(N) / N
        scale = max(max_norm(samples), np.finfo(float).tiny)
        limit = min(max_harmonics, (N - 1) // 2)
        for harmonics in range(limit + 1):
            fn = cls.from_samples(samples, period, harmonics)
            residual = max_norm(fn.sample(times) - samples) / scale
            if residual < tol:
                return fn
        logger.warning('Fourier fit residual %.3g exceeds %.3g with %d '
                       'harmonics', residual, tol, limit)
        return fn

    def __repr__(self):
        return 'PeriodicMatrixFn(n={}, harmonics={}, period={!r})'.format(
            self.n, self.harmonics, self.__period)

    @property
    def n(self):
        return self.__c0.shape[0]

    @property
    def period(self):
        return self.__period

    @property
    def harmonics(self):
        return self.__cos.shape[0]

    @property
    def c0(self):
        return self.__c0

    @property
    def cos(self):
        return self.__cos

    @property
    def sin(self):
        return self.__sin

    def __trig(self, times):
        phase = np.mod(np.asarray(times, dtype=float), self.__period)
        k = np.arange(1, self.harmonics + 1)
        angles = 2.0 * np.pi * np.multiply.outer(phase, k) / self.__period
        return np.cos(angles), np.sin(angles)

    def sample(self, times):
        """Values at each time, as a len(times) x n x n array"""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        values = np.broadcast_to(self.__c0, (times.size, self.n, self.n))
        values = np.array(values)
        if self.harmonics:
            c, s = self.__trig(times)
            values += np.einsum('tk,kij->tij', c, self.__cos)
            values += np.einsum('tk,kij->tij', s, self.__sin)
        return values

    def __call__(self, t):
        return self.sample([t])[0]

    def grid(self, points=VALIDATION_GRID):
        """``points`` equally spaced times covering one period"""
        return self.__period * np.arange(points) / points

    def mean(self):
        """Average over one period (the constant term)"""
        return np.array(self.__c0)

    def integral(self, times):
        """The integral of A over [0, t] for each t

        Returns an n x n array for a scalar time, a len(times) x n x n
        array otherwise.
        """
        scalar = np.ndim(times) == 0
        times = np.atleast_1d(np.asarray(times, dtype=float))
        total = np.multiply.outer(times, self.__c0)
        if self.harmonics:
            k = np.arange(1, self.harmonics + 1)
            omega = 2.0 * np.pi * k / self.__period
            c, s = self.__trig(times)
            total += np.einsum('tk,kij->tij', s / omega, self.__cos)
            total += np.einsum('tk,kij->tij', (1.0 - c) / omega, self.__sin)
        return total[0] if scalar else total

    def derivative(self):
        k = np.arange(1, self.harmonics + 1)
        omega = (2.0 * np.pi * k / self.__period)[:, np.newaxis, np.newaxis]
        return PeriodicMatrixFn(np.zeros((self.n, self.n)),
                                omega * self.__sin, -omega * self.__cos,
                                self.__period)

    def is_constant(self):
        return not (np.any(self.__cos) or np.any(self.__sin))

    def is_cooperative(self, points=VALIDATION_GRID, tol=SIGN_TOL):
        """Off-diagonal entries >= -tol on a uniform period grid"""
        values = self.sample(self.grid(points))
        off_diagonal = values[:, ~np.eye(self.n, dtype=bool)]
        return bool(np.all(off_diagonal >= -tol))

    def is_nonnegative(self, points=VALIDATION_GRID, tol=SIGN_TOL):
        """All entries >= -tol on a uniform period grid"""
        return bool(np.all(self.sample(self.grid(points)) >= -tol))

    def is_positive(self, points=VALIDATION_GRID):
        return bool(np.all(self.sample(self.grid(points)) > 0.0))

    def transform(self, P, Q):
        """P A(t) Q, computed exactly on the coefficients"""
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        if P.shape[1] != self.n or Q.shape[0] != self.n:
            raise PreconditionError(
                'cannot transform a {0}x{0} function by {1} and {2}'.format(
                    self.n, P.shape, Q.shape))
        if P.shape[0] != Q.shape[1]:
            raise PreconditionError('P A Q would not be square')
        return PeriodicMatrixFn(P.dot(self.__c0).dot(Q),
                                np.matmul(np.matmul(P, self.__cos), Q),
                                np.matmul(np.matmul(P, self.__sin), Q),
                                self.__period)

    def restrict(self, indices):
        """Principal submatrix function on the given indices"""
        E = np.eye(self.n)[:, list(indices)]
        return self.transform(E.T, E)

    def __binary(self, other, op):
        if not isinstance(other, PeriodicMatrixFn):
            other = PeriodicMatrixFn.constant(
                np.broadcast_to(np.asarray(other, dtype=float),
                                (self.n, self.n)), self.__period)
        _check_same_period(self.__period, other.period)
        if other.n != self.n:
            raise PreconditionError('dimension mismatch: {} and {}'.format(
                self.n, other.n))
        harmonics = max(self.harmonics, other.harmonics)
        return PeriodicMatrixFn(
            op(self.__c0, other.c0),
            op(_pad(self.__cos, harmonics), _pad(other.cos, harmonics)),
            op(_pad(self.__sin, harmonics), _pad(other.sin, harmonics)),
            self.__period)

    def __add__(self, other):
        return self.__binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self.__binary(other, np.subtract)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return PeriodicMatrixFn(-self.__c0, -self.__cos, -self.__sin,
                                self.__period)

    def __mul__(self, factor):
        if isinstance(factor, PeriodicMatrixFn):
            return self.product(factor)
        factor = float(factor)
        return PeriodicMatrixFn(factor * self.__c0, factor * self.__cos,
                                factor * self.__sin, self.__period)

    __rmul__ = __mul__

    def __truediv__(self, factor):
        return self * (1.0 / float(factor))

    def product(self, other):
        """The matrix product A(t) B(t)

        The product of trigonometric polynomials of degrees K1 and K2 has
        degree K1 + K2, so sampling on 2 (K1 + K2) + 1 points and
        interpolating is exact up to rounding.
        """
        _check_same_period(self.__period, other.period)
        if other.n != self.n:
            raise PreconditionError('dimension mismatch: {} and {}'.format(
                self.n, other.n))
        harmonics = self.harmonics + other.harmonics
        N = 2 * harmonics + 1
        times = self.__period * np.arange(N) / N
        samples = np.matmul(self.sample(times), other.sample(times))
        return PeriodicMatrixFn.from_samples(samples, self.__period, harmonics)

    __matmul__ = product


def _check_same_period(a, b):
    if a != b:
        raise PreconditionError('period mismatch: {!r} and {!r}'.format(a, b))


def evaluate(fn, t):
    """A(t) as an n x n array"""
    return fn(t)


MonodromyResult_ = namedtuple('MonodromyResult',
                              ['map', 'steps_per_period', 'growth_bound',
                               'method'])


class MonodromyResult(MonodromyResult_):

    """Monodromy matrix of a periodic linear system

    Attributes
    ----------
    map : numpy.ndarray
        Phi(tau + T, tau)
    steps_per_period : int
        Number of Runge-Kutta steps actually taken
    growth_bound : float
        ln r(map) / T, or -inf if r(map) == 0
    method : str
        One of the StepMethod constants

    """
    pass


class StepMethod:
    RK4 = 'rk4'
    LAWSON_RK4 = 'lawson-rk4'


def growth_bound(monodromy_map, period):
    """ln r(map) / T, -inf for a nilpotent map"""
    r = spectral_radius(monodromy_map)
    if r <= 0.0:
        return -np.inf
    return float(np.log(r) / period)


def _rk4_propagators(A0, Ah, A1, h):
    """One step maps of classical RK4 applied to Phi' = A(t) Phi, Phi_n = I"""
    eye = np.eye(A0.shape[-1])
    K1 = A0
    K2 = np.matmul(Ah, eye + 0.5 * h * K1)
    K3 = np.matmul(Ah, eye + 0.5 * h * K2)
    K4 = np.matmul(A1, eye + h * K3)
    return eye + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)


def _lawson_propagators(N0, Nh, N1, h, E, E2):
    """One step maps of integrating factor RK4 for Phi' = (D + N(t)) Phi,
    with E = exp(hD) and E2 = exp(hD / 2)"""
    eye = np.eye(N0.shape[-1])
    k1 = N0
    k2 = np.matmul(Nh, np.matmul(E2, eye + 0.5 * h * k1))
    k3 = np.matmul(Nh, E2 + 0.5 * h * k2)
    k4 = np.matmul(N1, E + h * np.matmul(E2, k3))
    return E + (h / 6.0) * (np.matmul(E, k1) + 2.0 * np.matmul(E2, k2 + k3) +
                            k4)


def _first_nonfinite(stack):
    flat = stack.reshape(stack.shape[0], -1)
    bad = np.nonzero(~np.all(np.isfinite(flat), axis=1))[0]
    return int(bad[0]) if bad.size else None


def _chain_product(S):
    """S[N-1] ... S[1] S[0] by pairwise reduction"""
    eye = np.eye(S.shape[-1])
    while S.shape[0] > 1:
        if S.shape[0] % 2:
            S = np.concatenate((S, eye[np.newaxis]), axis=0)
        S = np.matmul(S[1::2], S[0::2])
    return S[0]


def _prefix_products(S):
    """Phi_0 = I, Phi_{k+1} = S[k] Phi_k for every k"""
    n = S.shape[-1]
    out = np.empty((S.shape[0] + 1, n, n))
    out[0] = np.eye(n)
    for k in range(S.shape[0]):
        out[k + 1] = S[k].dot(out[k])
        if not np.all(np.isfinite(out[k + 1])):
            raise IntegrationError(
                'non-finite state after step {}'.format(k), step=k)
    return out


class PeriodIntegrator(object):

    """Fixed step propagation of du/dt = (D + M(t)) u over one period

    D is an optional constant dispersal matrix dL. Classical RK4 is used
    while ceil(16 ||D||_inf T) steps fit under the cap of 65536 steps (at
    least ``steps`` are always taken); beyond that the integrator takes
    ``max(steps, 16384)`` integrating factor steps with exp(hD) exact.

    The integrator samples nothing itself: callers sample M on
    :attr:`times` and pass the samples in, so one integrator serves many
    generators that share D (the R0 bisection does this).

    Parameters
    ----------
    period : float
    steps : int
        Requested steps per period, at least 16
    dispersal : array_like or None
        The matrix D
    start : float
        Initial time tau

    """

    def __init__(self, period, steps=STEPS_PER_PERIOD, dispersal=None,
                 start=0.0):
        steps = int(steps)
        if steps < MIN_STEPS_PER_PERIOD:
            raise PreconditionError(
                'need at least {} steps per period, got {}'.format(
                    MIN_STEPS_PER_PERIOD, steps))
        self.__period = float(period)
        self.__start = float(start)
        self.__dispersal = (None if dispersal is None else
                            as_square_matrix(dispersal, 'dispersal'))
        self.__method = StepMethod.RK4
        if self.__dispersal is not None:
            norm = float(np.max(np.sum(np.abs(self.__dispersal), axis=1)))
            required = int(np.ceil(STABILITY_FACTOR * norm * self.__period))
            if required > MAX_RK4_STEPS:
                self.__method = StepMethod.LAWSON_RK4
                steps = max(steps, STIFF_STEPS)
                logger.debug('stiff dispersal (||dL|| T = %.3g): %d '
                             'integrating factor steps', norm * period, steps)
            elif required > steps:
                logger.debug('dispersal needs %d RK4 steps instead of %d',
                             required, steps)
                steps = required
        self.__steps = steps
        self.__h = self.__period / steps
        if self.__method == StepMethod.LAWSON_RK4:
            self.__E = scipy.linalg.expm(self.__h * self.__dispersal)
            self.__E2 = scipy.linalg.expm(0.5 * self.__h * self.__dispersal)

    @property
    def period(self):
        return self.__period

    @property
    def steps(self):
        return self.__steps

    @property
    def method(self):
        return self.__method

    @property
    def h(self):
        return self.__h

    @property
    def times(self):
        """The 2 N + 1 half-step times tau + j h / 2 the samples must use"""
        return self.__start + 0.5 * self.__h * np.arange(2 * self.__steps + 1)

    @property
    def grid(self):
        """The N step times tau + k h covering one period"""
        return self.__start + self.__h * np.arange(self.__steps)

    def sample(self, fn):
        if fn.period != self.__period:
            raise PreconditionError('period mismatch: {!r} and {!r}'.format(
                fn.period, self.__period))
        return fn.sample(self.times)

    def propagators(self, samples):
        """The N one step maps, from M sampled on :attr:`times`"""
        samples = np.asarray(samples, dtype=float)
        if samples.shape[0] != 2 * self.__steps + 1:
            raise PreconditionError('expected {} samples, got {}'.format(
                2 * self.__steps + 1, samples.shape[0]))
        M0 = samples[0:-1:2]
        Mh = samples[1::2]
        M1 = samples[2::2]
        h = self.__h
        if self.__method == StepMethod.LAWSON_RK4:
            S = _lawson_propagators(M0, Mh, M1, h, self.__E, self.__E2)
        else:
            if self.__dispersal is not None:
                M0 = M0 + self.__dispersal
                Mh = Mh + self.__dispersal
                M1 = M1 + self.__dispersal
            S = _rk4_propagators(M0, Mh, M1, h)
        step = _first_nonfinite(S)
        if step is not None:
            raise IntegrationError(
                'non-finite propagator at step {}'.format(step), step=step)
        return S

    def monodromy(self, samples, cooperative=None):
        """Phi(tau + T, tau)

        Parameters
        ----------
        samples : array_like
            M on :attr:`times`
        cooperative : bool or None
            Whether D + M(t) is cooperative; inferred from the samples when
            None. Tiny negative entries of a cooperative map are set to 0.

        Returns
        -------
        MonodromyResult

        """
        samples = np.asarray(samples, dtype=float)
        S = self.propagators(samples)
        Phi = _chain_product(S)
        if not np.all(np.isfinite(Phi)):
            # locate the overflow
            _prefix_products(S)
            raise IntegrationError('monodromy matrix overflowed')
        if cooperative is None:
            cooperative = self.__is_cooperative(samples)
        if cooperative:
            Phi = _repair_nonnegative(Phi)
        return MonodromyResult(Phi, self.__steps,
                               growth_bound(Phi, self.__period),
                               self.__method)

    def evolution(self, samples):
        """Phi(t_k, tau) for t_k on :attr:`grid` plus the end point

        Returns
        -------
        numpy.ndarray
            (N + 1) x n x n
        """
        return _prefix_products(self.propagators(samples))

    def __is_cooperative(self, samples):
        n = samples.shape[-1]
        off = ~np.eye(n, dtype=bool)
        values = samples[:, off]
        if self.__dispersal is not None:
            values = values + self.__dispersal[off]
        return bool(np.all(values >= -SIGN_TOL))


def _repair_nonnegative(Phi):
    scale = max_norm(Phi)
    negative = Phi < 0.0
    if not np.any(negative):
        return Phi
    small = negative & (Phi >= -NONNEGATIVE_REPAIR_TOL * scale)
    if np.any(negative & ~small):
        logger.warning('monodromy of a cooperative system has entries down '
                       'to %.3g', float(Phi.min()))
    Phi = Phi.copy()
    Phi[small] = 0.0
    return Phi


def _dispersal_matrix(L, d, n):
    """d L as an array, or None when there is no dispersal"""
    if L is None or d == 0.0:
        return None
    # local import, zero_structure imports nothing from here
    from .zero_structure import as_connectivity
    L = as_connectivity(L).L
    if L.shape != (n, n):
        raise PreconditionError('L is {} but M is {}x{}'.format(
            L.shape, n, n))
    if not np.any(L):
        return None
    return float(d) * L


def _check_rate(d):
    d = float(d)
    if not np.isfinite(d) or d < 0.0:
        raise PreconditionError('dispersal rate must be >= 0, got {!r}'.format(
            d))
    return d


def monodromy(generator, steps=STEPS_PER_PERIOD, start=0.0):
    """Monodromy matrix of du/dt = A(t) u over [start, start + T]

    Parameters
    ----------
    generator : PeriodicMatrixFn
    steps : int
    start : float

    Returns
    -------
    MonodromyResult

    """
    integrator = PeriodIntegrator(generator.period, steps, start=start)
    return integrator.monodromy(integrator.sample(generator))


def dispersal_monodromy(L, M, d, steps=STEPS_PER_PERIOD, start=0.0):
    """Monodromy matrix of du/dt = (dL + M(t)) u"""
    d = _check_rate(d)
    integrator = PeriodIntegrator(M.period, steps,
                                  _dispersal_matrix(L, d, M.n), start)
    return integrator.monodromy(integrator.sample(M))


def evolution(L, M, d, steps=STEPS_PER_PERIOD):
    """Evolution family of dL + M(t) from time 0

    Returns
    -------
    tuple (times, Phi)
        times holds the N + 1 grid times 0, h, ..., T and Phi[k] is
        Phi(times[k], 0)

    """
    d = _check_rate(d)
    integrator = PeriodIntegrator(M.period, steps,
                                  _dispersal_matrix(L, d, M.n))
    Phi = integrator.evolution(integrator.sample(M))
    times = integrator.h * np.arange(integrator.steps + 1)
    return times, Phi


def principal_eigenvalue(L, M, d, steps=STEPS_PER_PERIOD):
    """lambda* = ln r(O(T, 0)) / T for the monodromy O of dL + M(t)

    Parameters
    ----------
    L : ConnectivityMatrix, array_like or None
        None means no dispersal
    M : PeriodicMatrixFn
        Cooperative
    d : float
    steps : int

    Raises
    ------
    InconsistencyError
        if the monodromy matrix has spectral radius 0

    """
    result = dispersal_monodromy(L, M, d, steps)
    if not np.isfinite(result.growth_bound):
        raise InconsistencyError('monodromy matrix has spectral radius 0')
    return result.growth_bound


def monodromy_eigenvector(Phi):
    """Nonnegative eigenvector of Phi for r(Phi), entries summing to 1

    Power iteration for entrywise positive maps; otherwise (or when power
    iteration stalls on a small spectral gap) the dense eigenvectors for
    eigenvalues of modulus r(Phi) are searched for a nonnegative one after
    clamping entries in [-1e-10, 0) to 0.

    Raises
    ------
    ConvergenceError
        if no nonnegative eigenvector is found
    InconsistencyError
        if Phi is not finite or the dense eigen-solve fails

    """
    Phi = np.asarray(Phi, dtype=float)
    if np.all(Phi > 0.0):
        try:
            return power_iteration(Phi)
        except ConvergenceError:
            logger.debug('power iteration stalled; using dense eigenvectors')
    try:
        values, vectors = scipy.linalg.eig(Phi)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise InconsistencyError(
            'eigen-solve of the monodromy matrix failed: {}'.format(e))
    moduli = np.abs(values)
    r = float(np.max(moduli))
    candidates = np.nonzero(moduli >= r * (1.0 - 1e-10))[0]
    for k in candidates:
        v = vectors[:, k]
        if max_norm(v.imag) > 1e-10 * max_norm(v):
            continue
        v = v.real
        if v.sum() < 0.0:
            v = -v
        scale = max_norm(v)
        if scale == 0.0:
            continue
        v = v / scale
        v[(v < 0.0) & (v >= -NONNEGATIVE_REPAIR_TOL)] = 0.0
        if np.all(v >= 0.0):
            return v / v.sum()
    raise ConvergenceError('no nonnegative eigenvector for the spectral '
                           'radius of the monodromy matrix',
                           dimension=Phi.shape[0])


PeriodicTrajectory_ = namedtuple('PeriodicTrajectory',
                                 ['times', 'values', 'eigenvalue'])


class PeriodicTrajectory(PeriodicTrajectory_):

    """A periodic solution sampled over one period

    Attributes
    ----------
    times : numpy.ndarray
        N equally spaced times in [0, T)
    values : numpy.ndarray
        N x n samples
    eigenvalue : float
        The principal eigenvalue the trajectory belongs to

    """
    pass


def principal_eigenfunction(L, M, d, steps=STEPS_PER_PERIOD):
    """Principal eigenfunction u(t) = exp(-lambda* t) Phi(t, 0) phi

    phi is a nonnegative eigenvector of the monodromy matrix for its
    spectral radius. The result is scaled so that its largest value over
    the grid and the components is 1.

    Returns
    -------
    PeriodicTrajectory

    """
    d = _check_rate(d)
    integrator = PeriodIntegrator(M.period, steps,
                                  _dispersal_matrix(L, d, M.n))
    Phi = integrator.evolution(integrator.sample(M))
    monodromy_map = _repair_nonnegative(Phi[-1])
    eigenvalue = growth_bound(monodromy_map, M.period)
    if not np.isfinite(eigenvalue):
        raise InconsistencyError('monodromy matrix has spectral radius 0')
    phi = monodromy_eigenvector(monodromy_map)
    times = integrator.h * np.arange(integrator.steps)
    values = np.exp(-eigenvalue * times)[:, np.newaxis] * np.einsum(
        'kij,j->ki', Phi[:-1], phi)
    values[(values < 0.0) & (values >= -NONNEGATIVE_REPAIR_TOL)] = 0.0
    values = values / max_norm(values)
    return PeriodicTrajectory(times, values, eigenvalue)


def aggregation_residual(basis, u):
    """max over the grid of ||u(t) - Q P u(t)||_inf

    Parameters
    ----------
    basis : ZeroEigenBasis
    u : PeriodicTrajectory or array_like
        A trajectory, an N x n array or a single n vector

    """
    values = u.values if isinstance(u, PeriodicTrajectory) else u
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[1] != basis.n:
        raise PreconditionError(
            'trajectory has {} components, basis has {}'.format(
                values.shape[1], basis.n))
    residual = values - values.dot(basis.projector.T)
    return max_norm(residual)
