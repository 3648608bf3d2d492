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
Finite Kernels
===============

A finite kernel is a weighted sum of point masses
:math:`K=\sum\limits_kw_k\delta_{x_k}` with no mass at the origin. It plays
the role of a jump measure pushed forward by the jump coefficients.

>>> rng = np.random.default_rng(11)
>>> gaps = []
>>> for _ in range(500):
...     dim = rng.integers(1, 4)
...     points = rng.integers(-3, 4, size=(rng.integers(0, 7), dim))
...     points = points[np.abs(points).sum(axis=1) > 0].astype(float)
...     kernel = FiniteKernel(
...         points, rng.integers(1, 4, size=points.shape[0]).astype(float)
...     )
...     moments = kernel.second_moments()
...     target = moments @ rng.integers(-3, 4, size=dim)
...     extended = extend_kernel(kernel, moments, target)
...     cross = extended.points[:, :-1].T @ (
...         extended.weights * extended.points[:, -1]
...     )
...     gaps.append(
...         np.linalg.norm(cross - target) / (1 + np.linalg.norm(target))
...     )
>>> bool(max(gaps) <= 1e-10)
True
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from elmd_lab.linalg.pseudoinverse import least_norm, solvable
from elmd_lab.linalg.utils import DEFAULT_TOLERANCES, Tolerances, check_psd
from elmd_lab.utils import (
    ArrayLike,
    InvalidInputError,
    as_finite_array,
    as_vector,
)


@dataclass(frozen=True, eq=False)
class FiniteKernel:
    """
    Point masses in :math:`\\mathbb{R}^d` with positive weights.

    >>> FiniteKernel(np.zeros((0, 2)), np.zeros(0)).dim
    2
    >>> FiniteKernel([[1.0, 0.0], [0.0, 0.0]], [1.0, 1.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: kernel points must be non-zero
    >>> FiniteKernel([[1.0]], [0.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: kernel weights must be positive

    :param points: a :math:`k\\times d` array, one point per row
    :param weights: :math:`k` positive weights
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        """Validate and freeze arrays."""
        points = as_finite_array(self.points, 2, "kernel points").copy()
        weights = as_vector(
            self.weights, points.shape[0], "kernel weights"
        ).copy()
        if np.any(weights <= 0):
            raise InvalidInputError("kernel weights must be positive")
        if np.any(np.all(points == 0, axis=1)):
            raise InvalidInputError("kernel points must be non-zero")
        points.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        """Dimension of the space where the points live."""
        return self.points.shape[1]

    def second_moments(self) -> np.ndarray:
        """
        Compute :math:`\\sum\\limits_kw_kx_kx_k^T`.

        >>> FiniteKernel([[1.0], [-1.0]], [1.0, 1.0]).second_moments().tolist()
        [[2.0]]

        :returns: a :math:`d\\times d` PSD matrix
        """
        return self.points.T @ (self.weights[:, np.newaxis] * self.points)


def extend_kernel(
    kernel: FiniteKernel,
    moments: ArrayLike,
    target: ArrayLike,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Optional[FiniteKernel]:
    r"""
    Lift a kernel to :math:`\mathbb{R}^{d+1}` with prescribed cross moments.

    The new kernel is :math:`\hat{K}=K\circ\ell` with
    :math:`\ell(x)=\left(x,\left<A^{\dagger}b,x\right>\right)` so that
    :math:`\sum\limits_kw_k\ell(x_k)^i\ell(x_k)^{d+1}=b^i`.

    >>> extended = extend_kernel(FiniteKernel([[1.0]], [2.0]), [[2.0]], [2.0])
    >>> np.round(extended.points, 12).tolist(), extended.weights.tolist()
    ([[1.0, 1.0]], [2.0])
    >>> extend_kernel(
    ...     FiniteKernel(np.zeros((0, 1)), np.zeros(0)), [[0.0]], [0.0]
    ... ).points.shape
    (0, 2)
    >>> extended = extend_kernel(
    ...     FiniteKernel([[1.0], [-1.0]], [1.0, 1.0]), [[2.0]], [1.0]
    ... )
    >>> np.round(extended.points, 12).tolist()
    [[1.0, 0.5], [-1.0, -0.5]]
    >>> extend_kernel(
    ...     FiniteKernel([[1.0, 0.0]], [1.0]), np.diag([1.0, 0.0]), [0.0, 1.0]
    ... ) is None
    True
    >>> extend_kernel(FiniteKernel([[1.0]], [1.0]), [[2.0]], [1.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: A doesn't match second moments of K

    :param kernel: a kernel :math:`K` in :math:`\mathbb{R}^d`
    :param moments: a PSD matrix :math:`A^{ij}=\sum\limits_kw_kx_k^ix_k^j`
    :param target: a vector :math:`b`
    :param tol: all tolerances are used
    :returns: :math:`\hat{K}` or ``None`` if :math:`b` is not in the range
        of :math:`A`
    :raises InvalidInputError: if ``moments`` are not the second moments of
        ``kernel``
    """
    matrix = check_psd(moments, tol, "A")
    if matrix.shape[0] != kernel.dim or np.any(
        np.abs(matrix - kernel.second_moments())
        > tol.feasibility_rel_tol * (1 + np.abs(matrix).max(initial=0.0))
    ):
        raise InvalidInputError("A doesn't match second moments of K")
    vector = as_vector(target, kernel.dim, "b")
    if not solvable(matrix, vector, tol)[0]:
        return None
    direction = least_norm(matrix, vector, tol)
    return FiniteKernel(
        np.hstack([kernel.points, (kernel.points @ direction)[:, np.newaxis]]),
        kernel.weights.copy(),
    )
