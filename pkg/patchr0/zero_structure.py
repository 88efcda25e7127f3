"""The zero eigenspace of a connectivity matrix.

For a cooperative matrix L with zero column sums, this module finds the
diagonal blocks of L's Frobenius normal form that are closed (nothing leaves
them), builds nonnegative matrices P and Q whose rows and columns are left and
right null vectors of L with PQ = I, and aggregates any matrix M into
P M Q, the generator of the large dispersal limit system.
"""
from collections import namedtuple
import logging

import numpy as np
import scipy.linalg

from .errors import (H1Error, PreconditionError, InconsistencyError,
                     AssemblyError)
from .linalg import (as_square_matrix, is_cooperative, spectral_bound,
                     spectral_radius, block_structure, perron_pair,
                     BlockStructure)
from .utils import COLUMN_SUM_TOL, max_norm, clamp_small

logger = logging.getLogger(__name__)

BASIS_TOL = 1e-10
NONNEGATIVE_REPAIR_TOL = 1e-12
COOPERATIVE_CLAMP = 1e-13
LEAKY_COND_LIMIT = 1e12


class ConnectivityMatrix(object):

    """A dispersal matrix: cooperative with zero column sums.

    Parameters
    ----------
    L : array_like
        n x n matrix, entry (i, j) is the rate of movement from patch j to
        patch i for i != j
    zero_column_sums : bool
        If False, column sums are only required to be <= 0. This is used for
        the restricted matrices of :func:`extract_subproblem`, which lose the
        rows of the blocks that were not selected.

    Raises
    ------
    H1Error
        If L is not cooperative, a column sum is off by more than 1e-12
        relative to the largest entry, or s(L) is not 0.

    """

    def __init__(self, L, zero_column_sums=True):
        L = as_square_matrix(L, 'L')
        if not is_cooperative(L):
            raise H1Error('connectivity matrix has a negative off-diagonal '
                          'entry')
        sums = L.sum(axis=0)
        tol = COLUMN_SUM_TOL * max_norm(L)
        if zero_column_sums:
            bad = np.nonzero(np.abs(sums) > tol)[0]
        else:
            bad = np.nonzero(sums > tol)[0]
        if bad.size:
            j = bad[0]
            raise H1Error(
                'column {} of the connectivity matrix sums to {!r}'.format(
                    j + 1, float(sums[j])))
        s = spectral_bound(L)
        if abs(s) > 1e-9 * max(1.0, max_norm(L)):
            raise H1Error('connectivity matrix has s(L) = {!r}, expected '
                          '0'.format(s))
        L.setflags(write=False)
        self.__L = L
        self.__structure = block_structure(L)

    def __repr__(self):
        return 'ConnectivityMatrix({})'.format(self.__L.tolist())

    @property
    def L(self):
        return self.__L

    @property
    def n(self):
        return self.__L.shape[0]

    @property
    def structure(self):
        return self.__structure


def as_connectivity(L):
    """Wraps L in a ConnectivityMatrix unless it already is one"""
    if isinstance(L, ConnectivityMatrix):
        return L
    return ConnectivityMatrix(L)


ZeroEigenBasis_ = namedtuple('ZeroEigenBasis',
                             ['alpha0', 'lambda0', 'lambda0c', 'P', 'Q',
                              'permutation', 'supports'])


class ZeroEigenBasis(ZeroEigenBasis_):

    """Nonnegative bases of the left and right null spaces of L

    Attributes
    ----------
    alpha0 : int
        Number of closed blocks, equal to the algebraic multiplicity of the
        eigenvalue 0 of L
    lambda0 : tuple of int
        Closed blocks, as indices into ``L.structure.blocks``
    lambda0c : tuple of int
        Leaky blocks, as indices into ``L.structure.blocks``
    P : numpy.ndarray
        alpha0 x n, row l is the left null vector p_l
    Q : numpy.ndarray
        n x alpha0, column l is the right null vector q_l, summing to 1
    permutation : tuple of int
        Original patch indices with the leaky blocks first and the closed
        blocks last
    supports : tuple of tuple of int
        supports[l] holds the original patch indices of the closed block
        that q_l lives on

    """

    @property
    def n(self):
        return self.Q.shape[0]

    @property
    def projector(self):
        """QP, the projection onto the null space of L along its range"""
        return self.Q.dot(self.P)


def classify_blocks(L):
    """Splits the diagonal blocks of L into closed and leaky ones.

    A block is closed when every entry of its columns outside the block is
    exactly zero; then its spectral bound is 0. Otherwise mass leaks out of
    it and its spectral bound is negative.

    Returns
    -------
    tuple (lambda0, lambda0c)
        Block indices (into ``L.structure.blocks``) of the closed and the
        leaky blocks, in block order

    Raises
    ------
    InconsistencyError
        if no block is closed, which (H1) rules out

    """
    L = as_connectivity(L)
    blocks = L.structure.blocks
    lambda0 = []
    lambda0c = []
    for b, idx in enumerate(blocks):
        outside = np.ones(L.n, dtype=bool)
        outside[idx] = False
        if np.any(L.L[np.ix_(outside, idx)] != 0.0):
            lambda0c.append(b)
        else:
            lambda0.append(b)
    if not lambda0:
        raise InconsistencyError('connectivity matrix has no closed block')
    return tuple(lambda0), tuple(lambda0c)


def _left_leaky_components(L, blocks, lambda0c, p_closed):
    """Solves sum_i p^i L_ih = 0 for the leaky components of p.

    The leaky part of L is block lower triangular, so its transpose is block
    upper triangular and the system is solved block by block starting from
    the last leaky block.
    """
    leaky = [blocks[b] for b in lambda0c]
    rhs = [-(p_closed.dot(L[:, idx])) for idx in leaky]
    solution = [None] * len(leaky)
    for k in reversed(range(len(leaky))):
        idx_k = leaky[k]
        b = rhs[k].copy()
        for h in range(k + 1, len(leaky)):
            b -= solution[h].dot(L[np.ix_(leaky[h], idx_k)])
        block = L[np.ix_(idx_k, idx_k)].T
        try:
            cond = np.linalg.cond(block, 1)
        except np.linalg.LinAlgError:
            cond = np.inf
        if not cond < LEAKY_COND_LIMIT:
            raise InconsistencyError(
                'leaky block {} of the connectivity matrix is singular '
                '(condition number {:.3g})'.format(lambda0c[k], cond))
        solution[k] = scipy.linalg.solve(block, b)
    return solution


def _check_basis(L, P, Q, tol=BASIS_TOL):
    scale = max(1.0, max_norm(L))
    alpha0 = P.shape[0]
    checks = (('PQ - I', P.dot(Q) - np.eye(alpha0), tol),
              ('PL', P.dot(L), tol * scale),
              ('LQ', L.dot(Q), tol * scale))
    for label, residual, bound in checks:
        r = max_norm(residual)
        if r > bound:
            raise AssemblyError('{} has max-norm residual {!r}'.format(
                label, r), residual=r)
    if np.any(P < 0.0) or np.any(Q < 0.0):
        raise AssemblyError('basis has negative entries')


def build_basis(L):
    """Builds the nonnegative zero eigenspace basis (P, Q) of L.

    For each closed block, q_l is the block's positive right null vector
    (summing to 1) placed on the block, and p_l is the block's positive left
    null vector on the block, zero on the other closed blocks, with the
    leaky components fixed by p_l^T L = 0.

    Parameters
    ----------
    L : ConnectivityMatrix or array_like

    Returns
    -------
    ZeroEigenBasis

    Raises
    ------
    InconsistencyError
        if a leaky block is singular
    AssemblyError
        if the assembled basis fails PQ = I, PL = 0, LQ = 0 within 1e-10

    """
    L = as_connectivity(L)
    lambda0, lambda0c = classify_blocks(L)
    blocks = L.structure.blocks
    A = L.L
    n = L.n
    alpha0 = len(lambda0)
    P = np.zeros((alpha0, n))
    Q = np.zeros((n, alpha0))
    for l, b in enumerate(lambda0):
        idx = blocks[b]
        pair = perron_pair(A[np.ix_(idx, idx)])
        Q[idx, l] = pair.right
        P[l, idx] = pair.left
    for l in range(alpha0):
        leaky = _left_leaky_components(A, blocks, lambda0c, P[l])
        for b, x in zip(lambda0c, leaky):
            P[l, blocks[b]] = x
    # rounding can leave -1e-17 where the exact value is 0
    P[(P < 0.0) & (P >= -NONNEGATIVE_REPAIR_TOL)] = 0.0
    _check_basis(A, P, Q)
    P.setflags(write=False)
    Q.setflags(write=False)
    permutation = tuple(int(i) for b in lambda0c + lambda0
                        for i in blocks[b])
    supports = tuple(tuple(int(i) for i in blocks[b]) for b in lambda0)
    logger.debug('zero eigenspace basis: alpha0=%d, %d leaky blocks',
                 alpha0, len(lambda0c))
    return ZeroEigenBasis(alpha0, lambda0, lambda0c, P, Q, permutation,
                          supports)


def rescaled_basis(basis, c):
    """The alternate basis with q_l scaled by c_l and p_l by 1 / c_l.

    Parameters
    ----------
    basis : ZeroEigenBasis
    c : array_like
        alpha0 positive factors

    Returns
    -------
    ZeroEigenBasis
        Still satisfies PQ = I, PL = 0, LQ = 0, but columns of Q no longer
        sum to 1

    """
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.shape != (basis.alpha0,) or np.any(c <= 0.0):
        raise PreconditionError('need {} positive rescaling factors'.format(
            basis.alpha0))
    P = basis.P / c[:, np.newaxis]
    Q = basis.Q * c[np.newaxis, :]
    P.setflags(write=False)
    Q.setflags(write=False)
    return basis._replace(P=P, Q=Q)


def aggregate(basis, M):
    """Returns P M Q.

    If M is cooperative the result is checked to be cooperative as well
    (after clamping magnitudes below 1e-13 to zero). Non-cooperative inputs,
    such as a removal matrix V, are aggregated without the check.

    Raises
    ------
    PreconditionError
        if M is not n x n
    InconsistencyError
        if a cooperative M gives a non-cooperative result

    """
    M = np.asarray(M, dtype=float)
    if M.shape != (basis.n, basis.n):
        raise PreconditionError(
            'cannot aggregate a {} matrix with a basis of dimension '
            '{}'.format(M.shape, basis.n))
    Mt = basis.P.dot(M).dot(basis.Q)
    if is_cooperative(M) and not is_cooperative(
            clamp_small(Mt, COOPERATIVE_CLAMP)):
        raise InconsistencyError('aggregated matrix is not cooperative; '
                                 'the basis is broken')
    return Mt


def reduced_block_order(Mt):
    """Block structure of an aggregated matrix, used to reorder the closed
    blocks so that P M Q is block lower triangular.

    Parameters
    ----------
    Mt : array_like or sequence of array_like
        alpha0 x alpha0 aggregated matrix; a stack of matrices (for example
        the Fourier coefficients of a periodic matrix) is read as the union
        of their nonzero patterns

    Returns
    -------
    BlockStructure

    """
    stack = np.asarray(Mt, dtype=float)
    if stack.ndim == 2:
        stack = stack[np.newaxis]
    pattern = np.any(stack != 0.0, axis=0).astype(float)
    return block_structure(pattern)


Subproblem_ = namedtuple('Subproblem', ['L', 'M', 'basis', 'indices'])


class Subproblem(Subproblem_):

    """Restriction of (L, M) to the leaky blocks and some closed blocks

    Attributes
    ----------
    L : ConnectivityMatrix
        Restricted connectivity; column sums may be negative where the
        dropped blocks received mass
    M : numpy.ndarray
        Restricted matrix
    basis : ZeroEigenBasis
        Restriction of the parent basis, valid for L
    indices : tuple of int
        Original patch indices kept, leaky ones first

    """
    pass


def extract_subproblem(basis, L, M, selector):
    """Restricts (L, M) to all leaky indices plus the selected closed blocks.

    Parameters
    ----------
    basis : ZeroEigenBasis
        Basis of L
    L : ConnectivityMatrix or array_like
    M : array_like
        n x n cooperative matrix
    selector : iterable of int
        Positions l (0 <= l < alpha0) of the closed blocks to keep

    Returns
    -------
    Subproblem
        Its aggregated matrix equals the matching principal sub-block of
        ``aggregate(basis, M)``

    Raises
    ------
    PreconditionError
        if selector is empty or not a subset of the closed blocks

    """
    L = as_connectivity(L)
    selected = sorted(set(int(l) for l in selector))
    if not selected or selected[0] < 0 or selected[-1] >= basis.alpha0:
        raise PreconditionError(
            'selector must be a nonempty subset of range({})'.format(
                basis.alpha0))
    M = as_square_matrix(M, 'M')
    if M.shape != (basis.n, basis.n):
        raise PreconditionError('M must be {0}x{0}'.format(basis.n))
    blocks = L.structure.blocks
    leaky = [int(i) for b in basis.lambda0c for i in blocks[b]]
    indices = leaky + [i for l in selected for i in basis.supports[l]]
    ix = np.ix_(indices, indices)
    L_sub = ConnectivityMatrix(L.L[ix], zero_column_sums=False)
    P = basis.P[np.ix_(selected, indices)].copy()
    Q = basis.Q[np.ix_(indices, selected)].copy()
    _check_basis(L_sub.L, P, Q)
    P.setflags(write=False)
    Q.setflags(write=False)
    sub_blocks = L_sub.structure.blocks
    position = {orig: k for k, orig in enumerate(indices)}

    def block_of(orig_indices):
        local = position[orig_indices[0]]
        return next(b for b, idx in enumerate(sub_blocks) if local in idx)

    lambda0 = tuple(block_of(basis.supports[l]) for l in selected)
    lambda0c = tuple(b for b in range(len(sub_blocks)) if b not in lambda0)
    supports = tuple(tuple(position[i] for i in basis.supports[l])
                     for l in selected)
    permutation = tuple(range(len(indices)))
    sub_basis = ZeroEigenBasis(len(selected), lambda0, lambda0c, P, Q,
                               permutation, supports)
    return Subproblem(L_sub, M[ix], sub_basis, tuple(indices))


AutonomousLimits_ = namedtuple('AutonomousLimits',
                               ['bound_small', 'bound_large', 'r0_small',
                                'r0_large'])


class AutonomousLimits(AutonomousLimits_):

    """Small and large dispersal limits of an autonomous patch model

    Attributes
    ----------
    bound_small : float
        s(-V + F), the limit of s(dL - V + F) as d -> 0
    bound_large : float
        s(-PVQ + PFQ), the limit as d -> infinity
    r0_small : float
        r(V^-1 F), the limit of r((V - dL)^-1 F) as d -> 0
    r0_large : float
        r((PVQ)^-1 PFQ), the limit as d -> infinity

    """
    pass


def autonomous_limits(L, V, F):
    """Limits of the spectral bound and of r((V - dL)^-1 F) for constant V,
    F as the dispersal rate goes to 0 and to infinity.

    Raises
    ------
    PreconditionError
        if V or its aggregation is singular

    """
    basis = build_basis(L)
    V = as_square_matrix(V, 'V')
    F = as_square_matrix(F, 'F')
    Vt = aggregate(basis, V)
    Ft = aggregate(basis, F)
    try:
        small = spectral_radius(scipy.linalg.solve(V, F))
        large = spectral_radius(scipy.linalg.solve(Vt, Ft))
    except np.linalg.LinAlgError as e:
        raise PreconditionError('removal matrix is singular: {}'.format(e))
    return AutonomousLimits(spectral_bound(F - V), spectral_bound(Ft - Vt),
                            small, large)
