"""Dense matrix utilities for cooperative matrices.

Matrices are plain 2-dimensional numpy arrays. Structural questions (is an
entry zero, is a matrix irreducible) are answered on the exact nonzero
pattern of the input; no tolerance is involved.
"""
from collections import namedtuple
import logging

import numpy as np
import scipy.linalg
import networkx as nx

from .errors import PreconditionError, ConvergenceError
from .utils import POWER_ITERATION_CAP, POWER_ITERATION_TOL

logger = logging.getLogger(__name__)


def as_square_matrix(A, name='A'):
    """Validates A and returns it as a float64 square array

    Parameters
    ----------
    A : array_like
        A scalar is read as a 1x1 matrix
    name : str
        Used in error messages

    Returns
    -------
    numpy.ndarray

    """
    A = np.array(A, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise PreconditionError(
            '{} must be a nonempty square matrix, got shape {}'.format(
                name, A.shape))
    if not np.all(np.isfinite(A)):
        raise PreconditionError('{} has non-finite entries'.format(name))
    return A


def is_cooperative(A):
    """True iff every off-diagonal entry of A is >= 0 (exact comparison)"""
    A = as_square_matrix(A)
    off_diagonal = A[~np.eye(A.shape[0], dtype=bool)]
    return bool(np.all(off_diagonal >= 0.0))


def is_nonnegative(A):
    """True iff every entry of A is >= 0"""
    return bool(np.all(np.asarray(A) >= 0.0))


def eigenvalues(A):
    """All eigenvalues of A from a dense Hessenberg-QR solve.

    The eigenvalues are ordered by descending real part, ties broken by
    descending imaginary part, so the output is deterministic for a given
    input.

    Raises
    ------
    ConvergenceError
        if LAPACK fails to converge

    """
    A = as_square_matrix(A)
    try:
        values = scipy.linalg.eigvals(A, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise ConvergenceError(
            'eigenvalue iteration failed for a {0}x{0} matrix: {1}'.format(
                A.shape[0], e),
            dimension=A.shape[0])
    order = np.lexsort((-values.imag, -values.real))
    return values[order]


def spectral_bound(A):
    """s(A), the largest real part over the eigenvalues of A"""
    return float(np.max(eigenvalues(A).real))


def spectral_radius(A):
    """r(A), the largest modulus over the eigenvalues of A"""
    return float(np.max(np.abs(eigenvalues(A))))


BlockStructure_ = namedtuple('BlockStructure',
                             ['permutation', 'block_sizes', 'block_index'])


class BlockStructure(BlockStructure_):

    """Frobenius normal form of a square matrix

    Applying ``permutation`` to rows and columns gives a block lower
    triangular matrix with irreducible diagonal blocks, listed in a
    topological order of the condensation graph.

    Attributes
    ----------
    permutation : tuple of int
        permutation[k] is the original (0-based) index placed at position k
    block_sizes : tuple of int
        Sizes of the diagonal blocks, in order
    block_index : tuple of int
        block_index[i] is the block containing original index i

    """

    @property
    def n_blocks(self):
        return len(self.block_sizes)

    @property
    def blocks(self):
        """Original indices of each block, as a list of int arrays"""
        perm = np.asarray(self.permutation, dtype=int)
        offsets = np.concatenate(([0], np.cumsum(self.block_sizes)))
        return [perm[offsets[b]:offsets[b + 1]]
                for b in range(self.n_blocks)]

    def permute(self, A):
        """Returns A with rows and columns reordered by the permutation"""
        perm = np.asarray(self.permutation, dtype=int)
        return np.asarray(A)[np.ix_(perm, perm)]


def pattern_graph(A):
    """Directed graph with an edge j -> i iff A[i, j] != 0 and i != j"""
    A = np.asarray(A)
    n = A.shape[0]
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    rows, cols = np.nonzero(A)
    graph.add_edges_from((int(j), int(i)) for i, j in zip(rows, cols)
                         if i != j)
    return graph


def block_structure(A):
    """Frobenius normal form from the strongly connected components of A's
    nonzero pattern.

    Blocks are put in topological order of the condensation graph; among
    the admissible orders the one that prefers blocks with the smallest
    member index is taken, and indices inside a block are ascending. An
    irreducible matrix gives one block and the identity permutation.

    Returns
    -------
    BlockStructure

    """
    A = as_square_matrix(A)
    condensed = nx.condensation(pattern_graph(A))
    members = {c: sorted(condensed.nodes[c]['members']) for c in condensed}
    order = list(nx.lexicographical_topological_sort(
        condensed, key=lambda c: members[c][0]))
    permutation = tuple(i for c in order for i in members[c])
    block_sizes = tuple(len(members[c]) for c in order)
    block_index = [0] * A.shape[0]
    for b, c in enumerate(order):
        for i in members[c]:
            block_index[i] = b
    return BlockStructure(permutation, block_sizes, tuple(block_index))


def is_irreducible(A):
    return block_structure(A).n_blocks == 1


def power_iteration(B, tol=POWER_ITERATION_TOL, max_iter=POWER_ITERATION_CAP):
    """Dominant eigenvector of a nonnegative primitive matrix

    Iterates x <- Bx / sum(Bx) from the uniform vector until successive
    iterates differ by less than tol in max norm.

    Returns
    -------
    numpy.ndarray
        Nonnegative vector with entries summing to 1

    Raises
    ------
    ConvergenceError
        after max_iter iterations without convergence

    """
    n = B.shape[0]
    x = np.full(n, 1.0 / n)
    for iteration in range(1, max_iter + 1):
        y = B.dot(x)
        total = y.sum()
        if not np.isfinite(total) or total <= 0.0:
            raise ConvergenceError(
                'power iteration degenerated at iteration {}'.format(
                    iteration),
                dimension=n, iterations=iteration)
        y /= total
        if np.max(np.abs(y - x)) < tol:
            logger.debug('power iteration converged in %d iterations',
                         iteration)
            return y
        x = y
    raise ConvergenceError(
        'power iteration did not converge in {} iterations'.format(max_iter),
        dimension=n, iterations=max_iter)


PerronPair_ = namedtuple('PerronPair', ['value', 'right', 'left'])


class PerronPair(PerronPair_):

    """Principal eigenpair of a cooperative irreducible matrix

    Attributes
    ----------
    value : float
        The spectral bound s(A)
    right : numpy.ndarray
        Positive right eigenvector, entries summing to 1
    left : numpy.ndarray
        Positive left eigenvector scaled so that left . right == 1

    """
    pass


def perron_pair(A, tol=POWER_ITERATION_TOL, max_iter=POWER_ITERATION_CAP):
    """Perron eigenvalue and eigenvectors of a cooperative irreducible A

    Runs power iteration on A + cI with c = 1 + max |A_ii|, which is
    nonnegative, irreducible and has a positive diagonal, hence primitive.

    Raises
    ------
    PreconditionError
        if A is not cooperative or not irreducible
    ConvergenceError
        if power iteration hits max_iter

    """
    A = as_square_matrix(A)
    if not is_cooperative(A):
        raise PreconditionError('perron_pair needs a cooperative matrix')
    if not is_irreducible(A):
        raise PreconditionError('perron_pair needs an irreducible matrix')
    n = A.shape[0]
    if n == 1:
        return PerronPair(float(A[0, 0]), np.ones(1), np.ones(1))
    shift = 1.0 + np.max(np.abs(np.diag(A)))
    B = A + shift * np.eye(n)
    right = power_iteration(B, tol, max_iter)
    left = power_iteration(B.T, tol, max_iter)
    left = left / left.dot(right)
    value = float(left.dot(A).dot(right))
    return PerronPair(value, right, left)
