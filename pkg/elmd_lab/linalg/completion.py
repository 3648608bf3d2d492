# Copyright 2023 The elmd-lab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# noqa: D205, D400
r"""
PSD Completion and Split Systems
=================================

The bordered matrix

.. math:: \left(\begin{array}{cc}A&b\\b^T&c\end{array}\right)

is positive semidefinite iff :math:`A` is, :math:`b` lies in the range of
:math:`A` and :math:`c\geq\left<A^{\dagger}b,b\right>`.

>>> from elmd_lab.linalg.utils import smallest_eigenvalue
>>> rng = np.random.default_rng(5)
>>> def random_psd(size):
...     basis, _ = np.linalg.qr(rng.normal(size=(size, size)))
...     values = rng.uniform(0.1, 10.0, size=size)
...     values[rng.uniform(size=size) < 0.3] = 0.0
...     return basis @ np.diag(values) @ basis.T
>>> above, below = [], []
>>> for _ in range(200):
...     matrix = random_psd(rng.integers(1, 7))
...     target = matrix @ rng.normal(size=matrix.shape[0])
...     lowest = psd_completion(matrix, target)
...     if np.linalg.norm(target) > 1e-3:
...         above.append(smallest_eigenvalue(bordered_matrix(
...             matrix, target, lowest + rng.exponential()
...         )))
...         below.append(smallest_eigenvalue(bordered_matrix(
...             matrix, target, lowest - 0.1
...         )))
>>> min(above) >= -DEFAULT_TOLERANCES.psd_tol
True
>>> max(below) < 0
True

Gram matrices are PSD, and a split system is solvable together with its
sum system.

>>> gram_eigenvalues, agreements, split_gaps = [], [], []
>>> for _ in range(500):
...     size = rng.integers(1, 6)
...     left = gram(list(rng.normal(size=(size, rng.integers(0, 4)))))
...     right = gram(list(rng.normal(size=(size, rng.integers(0, 4)))))
...     gram_eigenvalues.append(smallest_eigenvalue(left))
...     total = left + right
...     in_range = rng.uniform() < 0.5
...     target = (
...         total @ rng.normal(size=size) if in_range
...         else rng.normal(size=size)
...     )
...     full_rank = np.linalg.matrix_rank(
...         total, tol=1e-10 * max(1.0, np.abs(total).max())
...     ) == size
...     solution = split_solve(left, right, target)
...     agreements.append((solution is not None) == (in_range or full_rank))
...     if solution is not None:
...         split_gaps.append(np.linalg.norm(
...             left @ solution[0] + right @ solution[1] - target
...         ) / (1 + np.linalg.norm(target)))
>>> min(gram_eigenvalues) >= -DEFAULT_TOLERANCES.psd_tol
True
>>> all(agreements)
True
>>> bool(max(split_gaps) <= DEFAULT_TOLERANCES.feasibility_rel_tol)
True
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from elmd_lab.linalg.pseudoinverse import least_norm, pinv, solvable
from elmd_lab.linalg.utils import DEFAULT_TOLERANCES, Tolerances, check_psd
from elmd_lab.utils import ArrayLike, InvalidInputError, as_vector


def bordered_matrix(
    value: ArrayLike, target: ArrayLike, corner: float
) -> np.ndarray:
    """
    Border a square matrix with a column, its transpose and a corner.

    >>> bordered_matrix(np.eye(1), [2.0], 3.0).tolist()
    [[1.0, 2.0], [2.0, 3.0]]

    :param value: a square matrix :math:`A`
    :param target: a vector :math:`b`
    :param corner: a number :math:`c`
    :returns: the matrix :math:`((A, b), (b^T, c))`
    """
    matrix = np.asarray(value, dtype=np.float64)
    column = as_vector(target, matrix.shape[0], "b")[:, np.newaxis]
    return np.block([[matrix, column], [column.T, np.array([[corner]])]])


def schur_complement(
    value: ArrayLike,
    target: ArrayLike,
    corner: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    r"""
    Compute the generalised Schur complement of the bordered matrix.

    .. math:: c-\left<A^{\dagger}b,b\right>

    >>> round(schur_complement(np.eye(2), [1.0, 0.0], 3.0), 12)
    2.0

    :param value: a PSD matrix :math:`A`
    :param target: a vector :math:`b`
    :param corner: a number :math:`c`
    :param tol: ``rank_rel_cutoff`` is used
    :returns: the Schur complement
    """
    matrix = check_psd(value, tol, "A")
    vector = as_vector(target, matrix.shape[0], "b")
    return float(corner - (pinv(matrix, tol) @ vector) @ vector)


def psd_completion(
    value: ArrayLike,
    target: ArrayLike,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Optional[float]:
    """
    Find the least corner making the bordered matrix PSD.

    >>> round(psd_completion(np.eye(2), [1.0, 0.0]), 12)
    1.0
    >>> psd_completion(np.zeros((2, 2)), [1.0, 0.0]) is None
    True
    >>> round(psd_completion([[1.0, 1.0], [1.0, 1.0]], [1.0, 1.0]), 12)
    1.0

    :param value: a PSD matrix :math:`A`
    :param target: a vector :math:`b`
    :param tol: all tolerances are used
    :returns: :math:`c_{min}=\\left<A^{\\dagger}b,b\\right>` or ``None``
        if ``b`` is not in the range of ``A``
    """
    matrix = check_psd(value, tol, "A")
    vector = as_vector(target, matrix.shape[0], "b")
    if not solvable(matrix, vector, tol)[0]:
        return None
    return float((pinv(matrix, tol) @ vector) @ vector)


def gram(vectors: Sequence[ArrayLike]) -> np.ndarray:
    r"""
    Compute the matrix of pairwise inner products.

    It's :math:`TT^*` for the operator
    :math:`T=\left(\left<x_1,\cdot\right>,\dots,\left<x_k,\cdot\right>\right)`.

    >>> gram([[1.0, 0.0], [0.0, 1.0]]).tolist()
    [[1.0, 0.0], [0.0, 1.0]]
    >>> gram([[1.0, 0.0], [1.0, 0.0]]).tolist()
    [[1.0, 1.0], [1.0, 1.0]]
    >>> gram([[0.0, 0.0]]).tolist()
    [[0.0]]
    >>> gram([[1.0, 0.0], [1.0]])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: all vectors must have the same length

    :param vectors: a list of vectors :math:`x_1,\dots,x_k`
    :returns: the :math:`k\times k` matrix :math:`\left<x_i,x_j\right>`
    :raises InvalidInputError: for vectors of different lengths
    """
    rows: List[np.ndarray] = [np.ravel(vector) for vector in vectors]
    if len({row.shape[0] for row in rows}) > 1:
        raise InvalidInputError("all vectors must have the same length")
    if not rows:
        return np.zeros((0, 0))
    stacked = np.vstack(rows).astype(np.float64)
    return stacked @ stacked.T


def _check_pair(
    first: ArrayLike, second: ArrayLike, tol: Tolerances
) -> Tuple[np.ndarray, np.ndarray]:
    left = check_psd(first, tol, "A")
    right = check_psd(second, tol, "B")
    if left.shape != right.shape:
        raise InvalidInputError(
            f"A and B must have the same shape, got {left.shape} "
            f"and {right.shape}"
        )
    return left, right


def split_solve(
    first: ArrayLike,
    second: ArrayLike,
    target: ArrayLike,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """
    Solve :math:`Ax + By = b` for PSD matrices of the same size.

    The split system is solvable iff :math:`(A+B)x = b` is.

    >>> x, y = split_solve(np.eye(2), np.eye(2), [2.0, 2.0])
    >>> np.round(x, 12).tolist(), np.round(y, 12).tolist()
    ([1.0, 1.0], [1.0, 1.0])
    >>> x, y = split_solve(np.eye(2), np.eye(2), [0.0, 0.0])
    >>> not x.any(), not y.any()
    (True, True)
    >>> x, y = split_solve(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]),
    ...     [1.0, 1.0])
    >>> np.round(x, 12).tolist()
    [1.0, 1.0]
    >>> split_solve(np.diag([1.0, 0.0]), np.diag([1.0, 0.0]), [1.0, 1.0])
    >>> split_solve(np.eye(2), np.eye(3), [1.0, 1.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: A and B must have the same shape, ...

    :param first: a PSD matrix :math:`A`
    :param second: a PSD matrix :math:`B`
    :param target: a vector :math:`b`
    :param tol: all tolerances are used
    :returns: :math:`x=y` or ``None`` if no split exists (the residual is
        reported by :func:`solvable` on :math:`(A+B, b)`)
    """
    left, right = _check_pair(first, second, tol)
    total = left + right
    if not solvable(total, target, tol)[0]:
        return None
    solution = least_norm(total, target, tol)
    return solution, solution.copy()


def split_residual_vector(
    first: ArrayLike,
    second: ArrayLike,
    target: ArrayLike,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Optional[np.ndarray]:
    """
    Find :math:`c` such that :math:`Ax = c` and :math:`By = b - c`.

    >>> np.round(split_residual_vector(
    ...     np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), [1.0, 2.0]
    ... ), 12).tolist()
    [1.0, 0.0]

    :param first: a PSD matrix :math:`A`
    :param second: a PSD matrix :math:`B`
    :param target: a vector :math:`b`
    :param tol: all tolerances are used
    :returns: :math:`c` or ``None`` if no split exists
    """
    solution = split_solve(first, second, target, tol)
    if solution is None:
        return None
    return np.asarray(first, dtype=np.float64) @ solution[0]
