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
"""
Linear Algebra Utils
=====================

Tolerances shared by the linear algebra kernels and certification of
symmetric positive semidefinite matrices.
"""
from dataclasses import dataclass, fields

import numpy as np
from scipy.linalg import eigvalsh

from elmd_lab.utils import ArrayLike, InvalidInputError, as_finite_array


@dataclass(frozen=True)
class Tolerances:
    """
    Numerical thresholds of rank and feasibility decisions.

    >>> Tolerances(psd_tol=0.0)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: psd_tol must be positive, got 0.0

    :param rank_rel_cutoff: singular values below this share of the largest
        one are treated as zero
    :param feasibility_rel_tol: a system is solvable when its residual is
        below ``feasibility_rel_tol * (1 + ‖b‖)``
    :param sym_tol: largest allowed asymmetry of a PSD matrix
    :param psd_tol: smallest allowed eigenvalue of a PSD matrix, negated
    """

    rank_rel_cutoff: float = 1e-12
    feasibility_rel_tol: float = 1e-9
    sym_tol: float = 1e-10
    psd_tol: float = 1e-10

    def __post_init__(self):
        """Check that all tolerances are positive."""
        for field in fields(self):
            value = getattr(self, field.name)
            if not value > 0:
                raise InvalidInputError(
                    f"{field.name} must be positive, got {value}"
                )


DEFAULT_TOLERANCES = Tolerances()


def as_matrix(value: ArrayLike, name: str = "matrix") -> np.ndarray:
    """
    Convert to a finite two-dimensional array.

    :param value: something convertible to a ``numpy`` array
    :param name: a name to use in error messages
    :returns: a float64 matrix
    """
    return as_finite_array(value, 2, name)


def smallest_eigenvalue(matrix: np.ndarray) -> float:
    """
    Find the smallest eigenvalue of the symmetric part of a square matrix.

    >>> smallest_eigenvalue(np.array([[2.0, 0.0], [0.0, -1.0]]))
    -1.0
    >>> smallest_eigenvalue(np.zeros((0, 0)))
    0.0

    :param matrix: a square matrix
    :returns: the smallest eigenvalue (zero for an empty matrix)
    """
    if matrix.size == 0:
        return 0.0
    return float(eigvalsh((matrix + matrix.T) / 2)[0])


def is_psd(value: ArrayLike, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """
    Check whether a matrix is symmetric and positive semidefinite.

    >>> is_psd([[1.0, 1.0], [1.0, 1.0]])
    True
    >>> is_psd([[1.0, 2.0], [2.0, 1.0]])
    False
    >>> is_psd([[1.0, 1.0], [0.0, 1.0]])
    False
    >>> is_psd([[1.0, 0.0]])
    False

    :param value: a matrix
    :param tol: ``sym_tol`` and ``psd_tol`` are used
    :returns: whether the matrix belongs to the closed PSD cone
    """
    matrix = as_matrix(value)
    if matrix.shape[0] != matrix.shape[1]:
        return False
    if matrix.size and np.max(np.abs(matrix - matrix.T)) > tol.sym_tol:
        return False
    return smallest_eigenvalue(matrix) >= -tol.psd_tol


def check_psd(
    value: ArrayLike,
    tol: Tolerances = DEFAULT_TOLERANCES,
    name: str = "matrix",
) -> np.ndarray:
    """
    Certify a PSD matrix and return its symmetrised copy.

    >>> check_psd([[0.0, 1.0], [1.0, 0.0]], name="A")
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: A is not symmetric positive semidefinite

    :param value: a matrix
    :param tol: ``sym_tol`` and ``psd_tol`` are used
    :param name: a name to use in error messages
    :returns: ``(A + Aᵀ) / 2``
    :raises InvalidInputError: if the matrix is not PSD
    """
    matrix = as_matrix(value, name)
    if not is_psd(matrix, tol):
        raise InvalidInputError(
            f"{name} is not symmetric positive semidefinite"
        )
    return (matrix + matrix.T) / 2
