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
Market Model
=============

A market of :math:`d` assets :math:`S^i=S_0^i\mathscr{E}(X^i)` driven by an
:math:`m`-dimensional Wiener process and a Poisson random measure with
finitely many marks:

.. math:: X^i=a^i\cdot\lambda+\sigma^i\cdot W+\gamma^i*(p-q)

Coefficients are piecewise constant on a time grid: the values with index
:math:`k` hold on :math:`[t_k,t_{k+1})`.

>>> from elmd_lab.linalg import DEFAULT_TOLERANCES
>>> from elmd_lab.linalg.utils import smallest_eigenvalue
>>> rng = np.random.default_rng(3)
>>> lowest, moment_gaps, modified_exact, pointwise = [], [], [], []
>>> for _ in range(100):
...     assets, factors, marks = rng.integers(1, 4, size=3)
...     spec = MarketSpec(
...         TimeGrid.uniform(1.0, 2),
...         np.ones(assets),
...         rng.normal(size=(2, assets)),
...         rng.normal(size=(2, assets, factors)),
...         rng.uniform(-0.9, 2.0, size=(2, assets, marks)),
...         JumpMeasure(np.arange(marks) + 1.0, rng.uniform(0.1, 3.0, marks)),
...     )
...     first = build_mod_char(spec, 0)
...     lowest.append(min(
...         smallest_eigenvalue(first.continuous),
...         smallest_eigenvalue(first.discontinuous),
...     ))
...     moment_gaps.append(np.abs(
...         first.discontinuous - first.kernel.second_moments()
...     ).max() / (1 + np.abs(first.discontinuous).max()))
...     modified_exact.append(np.array_equal(
...         first.modified, first.continuous + first.discontinuous
...     ))
...     changed = spec.with_volatility(1, np.zeros((assets, factors)))
...     pointwise.append(np.array_equal(
...         build_mod_char(changed, 0).modified, first.modified
...     ))
>>> min(lowest) >= -DEFAULT_TOLERANCES.psd_tol
True
>>> bool(max(moment_gaps) <= 1e-12)
True
>>> all(modified_exact), all(pointwise)
(True, True)
"""
import dataclasses
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from elmd_lab.linalg import FiniteKernel, gram
from elmd_lab.utils import (
    ArrayLike,
    InvalidInputError,
    as_finite_array,
    as_vector,
)


def _frozen(array: np.ndarray) -> np.ndarray:
    copy = np.array(array, dtype=np.float64)
    copy.flags.writeable = False
    return copy


@dataclass(frozen=True, eq=False)
class JumpMeasure:
    r"""
    A finitely supported jump measure :math:`F=\sum\limits_jc_j\delta_{x_j}`.

    >>> JumpMeasure([1.0, 1.0], [1.0, 2.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: marks must be pairwise distinct
    >>> JumpMeasure([1.0], [0.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: intensities must be positive
    >>> JumpMeasure.empty().size
    0

    :param marks: distinct marks :math:`x_j`
    :param intensities: positive intensities :math:`c_j` per unit of time
    """

    marks: np.ndarray
    intensities: np.ndarray

    def __post_init__(self):
        """Validate marks and intensities."""
        marks = as_finite_array(self.marks, 1, "marks")
        intensities = as_vector(
            self.intensities, marks.shape[0], "intensities"
        )
        if np.unique(marks).shape[0] != marks.shape[0]:
            raise InvalidInputError("marks must be pairwise distinct")
        if np.any(intensities <= 0):
            raise InvalidInputError("intensities must be positive")
        object.__setattr__(self, "marks", _frozen(marks))
        object.__setattr__(self, "intensities", _frozen(intensities))

    @property
    def size(self) -> int:
        """Number of marks."""
        return self.marks.shape[0]

    @classmethod
    def empty(cls) -> "JumpMeasure":
        """
        Create a measure without marks.

        :returns: a zero jump measure
        """
        return cls(np.zeros(0), np.zeros(0))


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """
    Strictly increasing times starting at zero.

    >>> TimeGrid.uniform(1.0, 4).times.tolist()
    [0.0, 0.25, 0.5, 0.75, 1.0]
    >>> TimeGrid.uniform(1.0, 4).index_of(0.5)
    2
    >>> TimeGrid.uniform(1.0, 4).index_of(0.6)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: time 0.6 is not on the grid
    >>> TimeGrid([0.0, 1.0, 1.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: grid times must strictly increase
    >>> TimeGrid([0.5, 1.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: grid must start at zero, got 0.5

    :param times: :math:`0=t_0<t_1<\\dots<t_N` with :math:`N\\geq1`
    """

    times: np.ndarray

    def __post_init__(self):
        """Validate times."""
        times = as_finite_array(self.times, 1, "grid times")
        if times.shape[0] < 2:
            raise InvalidInputError("grid must have at least one step")
        if times[0] != 0:
            raise InvalidInputError(f"grid must start at zero, got {times[0]}")
        if np.any(np.diff(times) <= 0):
            raise InvalidInputError("grid times must strictly increase")
        object.__setattr__(self, "times", _frozen(times))

    @classmethod
    def uniform(cls, horizon: float, steps: int) -> "TimeGrid":
        """
        Create an equidistant grid.

        :param horizon: the last time :math:`t_N`
        :param steps: :math:`N`
        :returns: a grid
        """
        return cls(np.linspace(0.0, horizon, steps + 1))

    @property
    def steps(self) -> int:
        """Number of steps :math:`N`."""
        return self.times.shape[0] - 1

    @property
    def increments(self) -> np.ndarray:
        """Step lengths :math:`\\Delta t_k=t_{k+1}-t_k`."""
        return np.diff(self.times)

    def index_of(self, time: float, atol: float = 1e-12) -> int:
        """
        Find the grid index of a time.

        :param time: a time which must be on the grid
        :param atol: absolute matching tolerance
        :returns: :math:`k` such that :math:`t_k=t`
        :raises InvalidInputError: for an off-grid time
        """
        index = int(np.argmin(np.abs(self.times - time)))
        if abs(self.times[index] - time) > atol:
            raise InvalidInputError(f"time {time} is not on the grid")
        return index


@dataclass(frozen=True, eq=False)
class MarketSpec:
    """
    A jump-diffusion market with piecewise constant coefficients.

    >>> grid = TimeGrid.uniform(1.0, 2)
    >>> MarketSpec.constant(grid, [1.0], [0.1], [[0.2]], [[-1.0]],
    ...     JumpMeasure([1.0], [1.0]))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: jump coefficient must exceed -1
    >>> MarketSpec.constant(grid, [0.0], [0.1], [[0.2]])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: initial prices must be positive
    >>> MarketSpec.constant(grid, [1.0], [0.1, 0.2], [[0.2]])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: drift must have shape (2, 1), ...

    :param grid: a time grid with :math:`N` steps
    :param initial_prices: :math:`S_0\\in\\mathbb{R}^d`, all positive
    :param drift: :math:`a(t_k)`, an :math:`N\\times d` array
    :param volatility: :math:`\\sigma(t_k)`, an :math:`N\\times d\\times m`
        array
    :param jump_coefficients: :math:`\\gamma^i(t_k,x_j)`, an
        :math:`N\\times d\\times n` array with entries above :math:`-1`
    :param jumps: a jump measure with :math:`n` marks
    """

    grid: TimeGrid
    initial_prices: np.ndarray
    drift: np.ndarray
    volatility: np.ndarray
    jump_coefficients: np.ndarray
    jumps: JumpMeasure

    def __post_init__(self):
        """Validate shapes and domains."""
        prices = as_finite_array(self.initial_prices, 1, "initial prices")
        if prices.shape[0] == 0:
            raise InvalidInputError("a market must have at least one asset")
        if np.any(prices <= 0):
            raise InvalidInputError("initial prices must be positive")
        steps, assets = self.grid.steps, prices.shape[0]
        drift = _checked(self.drift, (steps, assets), "drift")
        volatility = as_finite_array(self.volatility, 3, "volatility")
        volatility = _checked(
            volatility, (steps, assets, volatility.shape[2]), "volatility"
        )
        jump_coefficients = _checked(
            self.jump_coefficients,
            (steps, assets, self.jumps.size),
            "jump coefficients",
        )
        if np.any(jump_coefficients <= -1):
            raise InvalidInputError("jump coefficient must exceed -1")
        for name, value in (
            ("initial_prices", prices),
            ("drift", drift),
            ("volatility", volatility),
            ("jump_coefficients", jump_coefficients),
        ):
            object.__setattr__(self, name, _frozen(value))

    @classmethod
    def constant(
        cls,
        grid: TimeGrid,
        initial_prices: ArrayLike,
        drift: ArrayLike,
        volatility: ArrayLike,
        jump_coefficients: Optional[ArrayLike] = None,
        jumps: Optional[JumpMeasure] = None,
    ) -> "MarketSpec":
        """
        Create a market with time-homogeneous coefficients.

        :param grid: a time grid
        :param initial_prices: :math:`S_0`
        :param drift: :math:`a\\in\\mathbb{R}^d`
        :param volatility: :math:`\\sigma\\in\\mathbb{R}^{d\\times m}`
        :param jump_coefficients: :math:`\\gamma\\in\\mathbb{R}^{d\\times n}`
            (no jumps if omitted)
        :param jumps: a jump measure (no jumps if omitted)
        :returns: a market specification
        """
        jumps = JumpMeasure.empty() if jumps is None else jumps
        volatility_array = as_finite_array(volatility, 2, "volatility")
        assets = volatility_array.shape[0]
        if jump_coefficients is None:
            jump_coefficients = np.zeros((assets, jumps.size))
        return cls(
            grid,
            np.asarray(initial_prices, dtype=np.float64),
            _repeated(grid, drift, 1, "drift"),
            _repeated(grid, volatility_array, 2, "volatility"),
            _repeated(grid, jump_coefficients, 2, "jump coefficients"),
            jumps,
        )

    @property
    def assets(self) -> int:
        """Number of assets :math:`d`."""
        return self.initial_prices.shape[0]

    @property
    def factors(self) -> int:
        """Number of Wiener factors :math:`m`."""
        return self.volatility.shape[2]

    def check_index(self, index: int) -> int:
        """
        Check that a grid index points to a step.

        :param index: a grid index :math:`k`
        :returns: the same index
        :raises InvalidInputError: if :math:`k\\notin[0,N)`
        """
        if not 0 <= index < self.grid.steps:
            raise InvalidInputError(
                f"grid index {index} is out of range [0, {self.grid.steps})"
            )
        return index

    def with_volatility(
        self, index: int, volatility: ArrayLike
    ) -> "MarketSpec":
        """
        Replace volatility on one step.

        :param index: a grid index :math:`k`
        :param volatility: new :math:`\\sigma(t_k)`
        :returns: a new market specification
        """
        path = np.array(self.volatility)
        path[self.check_index(index)] = volatility
        return self.with_volatility_path(path)

    def with_volatility_path(self, volatility: ArrayLike) -> "MarketSpec":
        """
        Replace volatility on all steps.

        >>> spec = MarketSpec.constant(TimeGrid.uniform(1.0, 2), [1.0], [0.1],
        ...     [[0.2]])
        >>> spec.with_volatility_path([[[0.3]], [[0.4]]]).volatility.ravel(
        ...     ).tolist()
        [0.3, 0.4]

        :param volatility: an :math:`N\\times d\\times m` array
        :returns: a new market specification
        """
        return dataclasses.replace(self, volatility=volatility)


def _checked(
    value: ArrayLike, shape: Tuple[int, ...], name: str
) -> np.ndarray:
    array = as_finite_array(value, len(shape), name)
    if array.shape != shape:
        raise InvalidInputError(
            f"{name} must have shape {shape}, got {array.shape}"
        )
    return array


def _repeated(
    grid: TimeGrid, value: ArrayLike, ndim: int, name: str
) -> np.ndarray:
    array = as_finite_array(value, ndim, name)
    return np.repeat(array[np.newaxis], grid.steps, axis=0)


@dataclass(frozen=True, eq=False)
class ModifiedCharacteristics:
    r"""
    Pointwise characteristics of a market at one grid point.

    :param drift: :math:`a`
    :param continuous: :math:`c=\sigma\sigma^T`
    :param discontinuous: :math:`v^{ij}=\sum\limits_jc_j\gamma^i(x_j)
        \gamma^j(x_j)`
    :param modified: :math:`c_{mod}=c+v`
    :param kernel: the image of the jump measure under :math:`\gamma`
    """

    drift: np.ndarray
    continuous: np.ndarray
    discontinuous: np.ndarray
    modified: np.ndarray
    kernel: FiniteKernel


def build_mod_char(spec: MarketSpec, index: int) -> ModifiedCharacteristics:
    """
    Compute modified characteristics at a grid point.

    >>> grid = TimeGrid.uniform(1.0, 1)
    >>> chars = build_mod_char(MarketSpec.constant(grid, [1.0], [0.1],
    ...     [[0.2]]), 0)
    >>> np.round(chars.continuous, 12).tolist(), chars.discontinuous.tolist()
    ([[0.04]], [[0.0]])
    >>> np.round(chars.modified, 12).tolist()
    [[0.04]]
    >>> chars = build_mod_char(MarketSpec.constant(grid, [1.0], [0.1],
    ...     [[0.2]], [[1.0]], JumpMeasure([1.0], [1.0])), 0)
    >>> np.round(chars.modified, 12).tolist()
    [[1.04]]
    >>> chars = build_mod_char(MarketSpec.constant(grid, [1.0, 1.0],
    ...     [0.1, 0.2], np.zeros((2, 1)), np.zeros((2, 1)),
    ...     JumpMeasure([1.0], [1.0])), 0)
    >>> chars.modified.tolist(), chars.kernel.points.shape
    ([[0.0, 0.0], [0.0, 0.0]], (0, 2))

    :param spec: a market specification
    :param index: a grid index :math:`k`
    :returns: :math:`(a, c, v, c_{mod}, K)` at :math:`t_k`
    """
    spec.check_index(index)
    volatility = spec.volatility[index]
    coefficients = spec.jump_coefficients[index]
    nonzero = np.any(coefficients != 0, axis=0)
    kernel = FiniteKernel(
        coefficients[:, nonzero].T, spec.jumps.intensities[nonzero]
    )
    continuous = gram(list(volatility))
    discontinuous = kernel.second_moments()
    return ModifiedCharacteristics(
        np.array(spec.drift[index]),
        continuous,
        discontinuous,
        continuous + discontinuous,
        kernel,
    )


def gamma_matrix(spec: MarketSpec, index: int) -> np.ndarray:
    r"""
    Compute :math:`\Gamma^{ij}=c_j\gamma^i(x_j)` at a grid point.

    >>> grid = TimeGrid.uniform(1.0, 1)
    >>> jumps = JumpMeasure([-0.5, 1.0], [2.0, 3.0])
    >>> spec = MarketSpec.constant(grid, [1.0], [0.1], [[0.2]],
    ...     [jumps.marks], jumps)
    >>> gamma_matrix(spec, 0).tolist()
    [[-1.0, 3.0]]
    >>> spec = MarketSpec.constant(grid, [1.0], [0.1], [[0.2]],
    ...     [[0.5]], JumpMeasure([1.0], [1.0]))
    >>> gamma_matrix(spec, 0).tolist()
    [[0.5]]

    :param spec: a market specification
    :param index: a grid index :math:`k`
    :returns: a :math:`d\times n` matrix
    """
    spec.check_index(index)
    return spec.jump_coefficients[index] * spec.jumps.intensities
