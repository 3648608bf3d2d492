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
Pure-Jump Paths
================

Finite variation paths which start at zero and change only by jumps, and
paths of their stochastic exponentials.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from elmd_lab.utils import ArrayLike, InvalidInputError, as_finite_array


def _frozen_pair(
    times: ArrayLike, values: ArrayLike, name: str
) -> Tuple[np.ndarray, np.ndarray]:
    time_array = as_finite_array(times, 1, f"{name} times").copy()
    value_array = as_finite_array(values, 1, name).copy()
    if time_array.shape != value_array.shape:
        raise InvalidInputError(
            f"{name} and times must have the same length, got "
            f"{value_array.shape[0]} and {time_array.shape[0]}"
        )
    if np.any(time_array <= 0) or np.any(np.diff(time_array) <= 0):
        raise InvalidInputError(
            f"{name} times must be positive and strictly increasing"
        )
    time_array.flags.writeable = False
    value_array.flags.writeable = False
    return time_array, value_array


@dataclass(frozen=True, eq=False)
class PureJumpPath:
    """
    A path changing only by finitely many jumps.

    Its value is :math:`X_t=\\sum\\limits_{s\\leq t}\\Delta X_s`.

    >>> path = PureJumpPath([1.0, 2.0], [1.0, -0.5])
    >>> path.value_at(0.5), path.value_at(1.0), path.value_at(3.0)
    (0.0, 1.0, 0.5)
    >>> PureJumpPath([2.0, 1.0], [1.0, 1.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: jumps times must be positive and ...

    :param times: strictly increasing positive jump times
    :param jumps: jump sizes :math:`\\Delta X`
    """

    times: np.ndarray
    jumps: np.ndarray

    def __post_init__(self):
        """Validate and freeze arrays."""
        times, jumps = _frozen_pair(self.times, self.jumps, "jumps")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "jumps", jumps)

    @classmethod
    def empty(cls) -> "PureJumpPath":
        """
        Create a path without jumps.

        :returns: the zero path
        """
        return cls(np.zeros(0), np.zeros(0))

    def value_at(self, time: float) -> float:
        """
        Sum jumps up to a time.

        :param time: a time :math:`t`
        :returns: :math:`X_t`
        """
        return float(self.jumps[self.times <= time].sum())

    def aligned(
        self, other: "PureJumpPath"
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Put jumps of two paths on the union of their jump times.

        >>> times, one, two = PureJumpPath([1.0], [2.0]).aligned(
        ...     PureJumpPath([1.0, 2.0], [3.0, 4.0]))
        >>> times.tolist(), one.tolist(), two.tolist()
        ([1.0, 2.0], [2.0, 0.0], [3.0, 4.0])

        :param other: another path
        :returns: common times and jumps of both paths on them (zero where a
            path doesn't jump)
        """
        times = np.union1d(self.times, other.times)
        return times, self.jumps_on(times), other.jumps_on(times)

    def jumps_on(self, times: np.ndarray) -> np.ndarray:
        """
        Put jumps on a set of times.

        Jumps at times outside the set are dropped.

        >>> path = PureJumpPath([1.0, 2.0], [2.0, 5.0])
        >>> path.jumps_on(np.array([0.5, 2.0, 3.0])).tolist()
        [0.0, 5.0, 0.0]
        >>> path.jumps_on(np.array([0.5])).tolist()
        [0.0]

        :param times: sorted times
        :returns: jumps on these times (zero where the path doesn't jump)
        """
        jumps = np.zeros(times.shape[0])
        mask = np.isin(self.times, times)
        jumps[np.searchsorted(times, self.times[mask])] = self.jumps[mask]
        return jumps

    def add(self, other: "PureJumpPath") -> "PureJumpPath":
        """
        Add two paths.

        >>> PureJumpPath([1.0], [2.0]).add(PureJumpPath([1.0, 2.0],
        ...     [3.0, 4.0])).jumps.tolist()
        [5.0, 4.0]

        :param other: another path
        :returns: :math:`X+Y`
        """
        times, one, two = self.aligned(other)
        return PureJumpPath(times, one + two)

    def scale(self, factor: float) -> "PureJumpPath":
        """
        Multiply a path by a number.

        :param factor: a number
        :returns: a scaled path
        """
        return PureJumpPath(self.times, factor * self.jumps)

    def negate(self) -> "PureJumpPath":
        """
        Change sign of all jumps.

        :returns: :math:`-X`
        """
        return self.scale(-1.0)

    @classmethod
    def merge(cls, *paths: "PureJumpPath") -> "PureJumpPath":
        """
        Sum several paths.

        >>> PureJumpPath.merge().jumps.tolist()
        []

        :param paths: any number of paths
        :returns: their sum
        """
        total = cls.empty()
        for path in paths:
            total = total.add(path)
        return total


@dataclass(frozen=True, eq=False)
class ExpPath:
    """
    A positive path :math:`\\prod\\limits_{s\\leq t}f_s` starting at one.

    >>> path = ExpPath([1.0, 2.0], [2.0, 0.5])
    >>> path.value_at(0.0), path.value_at(1.5), path.value_at(2.0)
    (1.0, 2.0, 1.0)
    >>> ExpPath([1.0], [0.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: factors must be positive

    :param times: strictly increasing positive times
    :param factors: positive multiplicative factors
    """

    times: np.ndarray
    factors: np.ndarray

    def __post_init__(self):
        """Validate and freeze arrays."""
        times, factors = _frozen_pair(self.times, self.factors, "factors")
        if np.any(factors <= 0):
            raise InvalidInputError("factors must be positive")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "factors", factors)

    @classmethod
    def one(cls) -> "ExpPath":
        """
        Create a constant path.

        :returns: the path identically equal to one
        """
        return cls(np.zeros(0), np.zeros(0))

    def value_at(self, time: float) -> float:
        """
        Multiply factors up to a time.

        :param time: a time :math:`t`
        :returns: the value at :math:`t`
        """
        return float(np.prod(self.factors[self.times <= time]))

    def values_at(self, times: ArrayLike) -> np.ndarray:
        """
        Evaluate a path at several times.

        >>> ExpPath([1.0, 2.0], [2.0, 3.0]).values_at([0.0, 1.0, 5.0]
        ...     ).tolist()
        [1.0, 2.0, 6.0]

        :param times: times to evaluate at
        :returns: path values
        """
        running = np.concatenate([[1.0], np.cumprod(self.factors)])
        positions = np.searchsorted(self.times, times, side="right")
        return running[positions]

    def product(self, other: "ExpPath") -> "ExpPath":
        """
        Multiply two paths pointwise.

        >>> ExpPath([1.0], [2.0]).product(ExpPath([1.0, 2.0], [3.0, 4.0])
        ...     ).factors.tolist()
        [6.0, 4.0]

        :param other: another path
        :returns: a path which value is a product of two values
        """
        times = np.union1d(self.times, other.times)
        return ExpPath(
            times, self.factors_on(times) * other.factors_on(times)
        )

    def reciprocal(self) -> "ExpPath":
        """
        Invert a path pointwise.

        :returns: a path of :math:`1/E`
        """
        return ExpPath(self.times, 1 / self.factors)

    def factors_on(self, times: np.ndarray) -> np.ndarray:
        """
        Put factors on a set of times.

        >>> ExpPath([1.0, 2.0], [2.0, 0.5]).factors_on(np.array([2.0, 3.0])
        ...     ).tolist()
        [0.5, 1.0]

        :param times: sorted times
        :returns: factors on these times (one elsewhere)
        """
        factors = np.ones(times.shape[0])
        mask = np.isin(self.times, times)
        factors[np.searchsorted(times, self.times[mask])] = self.factors[mask]
        return factors
