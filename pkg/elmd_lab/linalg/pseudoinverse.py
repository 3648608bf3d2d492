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
Pseudoinverse and Consistent Systems
=====================================

A linear system :math:`Ax = b` is solvable iff :math:`AA^{\dagger}b = b`,
and then :math:`x = A^{\dagger}b` is its solution of the least norm.

>>> rng = np.random.default_rng(20)
>>> def random_matrix(rows, cols, rank):
...     left, _ = np.linalg.qr(rng.normal(size=(rows, rows)))
...     right, _ = np.linalg.qr(rng.normal(size=(cols, cols)))
...     values = np.zeros(min(rows, cols))
...     values[:rank] = rng.uniform(0.1, 10.0, size=rank)
...     middle = np.zeros((rows, cols))
...     np.fill_diagonal(middle, values)
...     return left @ middle @ right.T
>>> def penrose_gap(matrix):
...     inverse = pinv(matrix)
...     return max(
...         np.linalg.norm(matrix @ inverse @ matrix - matrix),
...         np.linalg.norm(inverse @ matrix @ inverse - inverse),
...         np.linalg.norm(matrix @ inverse - (matrix @ inverse).T),
...         np.linalg.norm(inverse @ matrix - (inverse @ matrix).T),
...     ) / (1 + np.linalg.norm(matrix))
>>> def soundness_gap(matrix):
...     target = rng.normal(size=matrix.shape[0])
...     if rng.uniform() < 0.5:
...         target = matrix @ rng.normal(size=matrix.shape[1])
...     flag, _ = solvable(matrix, target)
...     if not flag:
...         return 0.0
...     solution = least_norm(matrix, target)
...     return np.linalg.norm(matrix @ solution - target) / (
...         1 + np.linalg.norm(target)
...     )
>>> penrose_gaps, soundness_gaps = [], []
>>> for _ in range(500):
...     rows, cols = rng.integers(1, 21, size=2)
...     matrix = random_matrix(
...         rows, cols, rng.integers(0, min(rows, cols) + 1)
...     )
...     penrose_gaps.append(penrose_gap(matrix))
...     soundness_gaps.append(soundness_gap(matrix))
>>> bool(max(penrose_gaps) <= 1e-10)
True
>>> bool(max(soundness_gaps) <= DEFAULT_TOLERANCES.feasibility_rel_tol)
True
"""
from typing import Tuple

import numpy as np
from scipy.linalg import solve, svd

from elmd_lab.linalg.utils import DEFAULT_TOLERANCES, Tolerances, as_matrix
from elmd_lab.utils import (
    ArrayLike,
    InfeasibleSystemError,
    InvalidInputError,
    as_finite_array,
)


def pinv(
    value: ArrayLike, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """
    Compute the Moore-Penrose inverse from a singular value decomposition.

    >>> bool(np.allclose(pinv(np.eye(2)), np.eye(2)))
    True
    >>> np.round(pinv([[1.0, 1.0], [1.0, 1.0]]), 12).tolist()
    [[0.25, 0.25], [0.25, 0.25]]
    >>> np.round(pinv([[3.0], [4.0]]), 12).tolist()
    [[0.12, 0.16]]
    >>> pinv(np.zeros((2, 3))).shape
    (3, 2)
    >>> pinv([[1.0, float("inf")]])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: matrix has non-finite entries

    :param value: a matrix :math:`A`
    :param tol: singular values below ``rank_rel_cutoff`` times the largest
        one are treated as zero
    :returns: :math:`A^{\\dagger}`
    """
    matrix = as_matrix(value)
    if matrix.size == 0:
        return np.zeros(matrix.shape[::-1])
    left, values, right = svd(matrix, full_matrices=False)
    nonzero = values > tol.rank_rel_cutoff * values[0]
    return (right[nonzero].T / values[nonzero]) @ left[:, nonzero].T


def pinv_limit(value: ArrayLike, epsilon: float) -> np.ndarray:
    r"""
    Approximate the pseudoinverse by its Tikhonov limit representation.

    .. math:: A^{\dagger}=\lim\limits_{\varepsilon\to0}
        \left(A^TA+\varepsilon I\right)^{-1}A^T

    >>> matrix = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 2.0]])
    >>> bool(np.allclose(pinv_limit(matrix, 1e-10), pinv(matrix)))
    True

    :param value: a matrix :math:`A`
    :param epsilon: a positive regularisation :math:`\varepsilon`
    :returns: an approximation of :math:`A^{\dagger}`
    :raises InvalidInputError: if ``epsilon`` is not positive
    """
    if not epsilon > 0:
        raise InvalidInputError(f"epsilon must be positive, got {epsilon}")
    matrix = as_matrix(value)
    regularised = matrix.T @ matrix + epsilon * np.eye(matrix.shape[1])
    return solve(regularised, matrix.T, assume_a="pos")


def _check_system(
    value: ArrayLike, target: ArrayLike
) -> Tuple[np.ndarray, np.ndarray]:
    matrix = as_matrix(value)
    vector = as_finite_array(target, 1, "b")
    if vector.shape[0] != matrix.shape[0]:
        raise InvalidInputError(
            f"b has length {vector.shape[0]} "
            f"but the matrix has {matrix.shape[0]} rows"
        )
    return matrix, vector


def _range_basis(matrix: np.ndarray, tol: Tolerances) -> np.ndarray:
    if matrix.size == 0:
        return np.zeros((matrix.shape[0], 0))
    left, values, _ = svd(matrix, full_matrices=False)
    return left[:, values > tol.rank_rel_cutoff * values[0]]


def solvable(
    value: ArrayLike,
    target: ArrayLike,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Tuple[bool, float]:
    """
    Decide whether :math:`Ax = b` has a solution.

    >>> flag, residual = solvable(np.eye(2), [3.0, -1.0])
    >>> flag, residual < 1e-15
    (True, True)
    >>> solvable([[1.0, 1.0], [1.0, 1.0]], [1.0, 1.0])[0]
    True
    >>> flag, residual = solvable([[1.0, 1.0], [1.0, 1.0]], [1.0, -1.0])
    >>> flag, round(residual, 6)
    (False, 1.414214)
    >>> solvable(np.eye(2), [1.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: b has length 1 but the matrix has 2 rows

    The residual doesn't grow with the condition number.

    >>> rotation = np.array([[0.6, -0.8], [0.8, 0.6]])
    >>> matrix = rotation @ np.diag([3.0, 1e-4]) @ rotation.T
    >>> flag, residual = solvable(matrix, matrix @ [1.0, -2.0])
    >>> flag, residual < 1e-12
    (True, True)

    :param value: a matrix :math:`A`
    :param target: a vector :math:`b`
    :param tol: ``rank_rel_cutoff`` and ``feasibility_rel_tol`` are used
    :returns: a feasibility flag and the residual
        :math:`\\|(I-AA^{\\dagger})b\\|`
    """
    matrix, vector = _check_system(value, target)
    basis = _range_basis(matrix, tol)
    residual = float(np.linalg.norm(vector - basis @ (basis.T @ vector)))
    threshold = tol.feasibility_rel_tol * (1 + np.linalg.norm(vector))
    return bool(residual <= threshold), residual


def least_norm(
    value: ArrayLike,
    target: ArrayLike,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """
    Find the solution of :math:`Ax = b` with the smallest Euclidean norm.

    >>> least_norm(np.eye(2), [3.0, -1.0]).tolist()
    [3.0, -1.0]
    >>> np.round(least_norm([[1.0, 1.0], [1.0, 1.0]], [2.0, 2.0]), 12).tolist()
    [1.0, 1.0]
    >>> least_norm(np.zeros((2, 2)), np.zeros(2)).tolist()
    [0.0, 0.0]
    >>> least_norm([[1.0, 1.0], [1.0, 1.0]], [1.0, -1.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InfeasibleSystemError: (1.414..., 'no solution exists')

    :param value: a matrix :math:`A`
    :param target: a vector :math:`b`
    :param tol: ``rank_rel_cutoff`` and ``feasibility_rel_tol`` are used
    :returns: :math:`A^{\\dagger}b`
    :raises InfeasibleSystemError: if the system has no solution
    """
    flag, residual = solvable(value, target, tol)
    if not flag:
        raise InfeasibleSystemError(residual, "no solution exists")
    matrix, vector = _check_system(value, target)
    return pinv(matrix, tol) @ vector


def adjoint_solution(
    value: ArrayLike,
    target: ArrayLike,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    r"""
    Solve :math:`Tx = y` in the form :math:`x = T^*\eta`.

    The vector :math:`\eta` is the least norm solution of
    :math:`TT^*\eta = y`, and the ranges of :math:`T` and :math:`TT^*`
    coincide.

    >>> np.round(adjoint_solution([[1.0, 2.0]], [5.0]), 12).tolist()
    [1.0, 2.0]

    :param value: a matrix :math:`T`
    :param target: a vector :math:`y`
    :param tol: ``rank_rel_cutoff`` and ``feasibility_rel_tol`` are used
    :returns: a solution :math:`x` lying in the range of :math:`T^*`
    """
    matrix = as_matrix(value)
    return matrix.T @ least_norm(matrix @ matrix.T, target, tol)


def rank(value: ArrayLike, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """
    Count singular values above the relative cutoff.

    >>> rank([[1.0, 1.0], [1.0, 1.0]]), rank(np.zeros((2, 3))), rank(np.eye(3))
    (1, 0, 3)

    :param value: a matrix
    :param tol: ``rank_rel_cutoff`` is used
    :returns: the numerical rank
    """
    matrix = as_matrix(value)
    if matrix.size == 0:
        return 0
    values = svd(matrix, compute_uv=False)
    return int(np.sum(values > tol.rank_rel_cutoff * values[0]))
