"""Plain text reports printed by the command line front end."""
from collections import namedtuple

import numpy as np

from ..utils import fmt


def _matrix_lines(name, A):
    A = np.atleast_2d(A)
    lines = ['{} ({}x{}):'.format(name, A.shape[0], A.shape[1])]
    for row in A:
        lines.append('  ' + ' '.join(fmt(x) for x in row))
    return lines


def _blocks(blocks, members):
    return ' '.join('{' + ','.join(str(i + 1) for i in members[b]) + '}'
                    for b in blocks) or '-'


def reduce_report(L, basis):
    """Closed and leaky blocks (1-based patches), alpha0, P and Q"""
    members = L.structure.blocks
    lines = ['alpha0 = {}'.format(basis.alpha0),
             'closed blocks: {}'.format(_blocks(basis.lambda0, members)),
             'leaky blocks: {}'.format(_blocks(basis.lambda0c, members))]
    lines += _matrix_lines('P', basis.P)
    lines += _matrix_lines('Q', basis.Q)
    return '\n'.join(lines)


def eig_report(d, value):
    return 'd = {}\nlambda* = {}'.format(fmt(d), fmt(value))


def r0_report(d, result):
    return '\n'.join([
        'd = {}'.format(fmt(d)),
        'R0 = {}'.format(fmt(result.value)),
        'case = {}'.format(result.case),
        'bracket = [{}, {}]'.format(fmt(result.bracket[0]),
                                    fmt(result.bracket[1])),
        'iterations = {}'.format(result.iterations),
        'residual = {}'.format(fmt(result.residual))])


Check_ = namedtuple('Check', ['label', 'value', 'expected', 'tol'])


class Check(Check_):

    """A computed number compared with its expected value"""

    @property
    def passed(self):
        return bool(abs(self.value - self.expected) <= self.tol)


def check_report(title, checks, notes=()):
    """One line per check with its verdict, then free-form notes"""
    lines = [title]
    for c in checks:
        lines.append('{:<32} {:>14}  expected {:<10} {}'.format(
            c.label, '{:.4f}'.format(c.value), '{:.4f}'.format(c.expected),
            'PASS' if c.passed else 'FAIL'))
    lines.extend(notes)
    return '\n'.join(lines)
