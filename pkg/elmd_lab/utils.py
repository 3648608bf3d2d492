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
Common Utilities
=================

Exceptions shared by all the modules and validators for array inputs.
"""
from typing import Sequence, Tuple, Union

import numpy as np

ArrayLike = Union[np.ndarray, Sequence[float], Sequence[Sequence[float]]]


class InvalidInputError(ValueError):
    """Exception raised when an input has a wrong shape or value."""


class InfeasibleSystemError(Exception):
    """
    Exception raised when a linear system has no solution.

    >>> error = InfeasibleSystemError(0.5)
    >>> error.residual
    0.5
    """

    def __init__(self, residual: float, message: str = ""):
        """
        Remember the residual norm.

        :param residual: ``‖(I - AA†)b‖`` of the infeasible system
        :param message: an optional explanation
        """
        super().__init__(residual, message)
        self.residual = residual


class DomainError(ValueError):
    """Exception raised when a jump or a premium leaves its domain."""


class MarginViolatedError(DomainError):
    """
    Exception raised when a jump risk premium is too close to one.

    >>> MarginViolatedError((0, 2)).marks
    (0, 2)
    """

    def __init__(self, marks: Tuple[int, ...], message: str = ""):
        """
        Remember offending marks.

        :param marks: indices of marks where ``ρ > 1 - ε``
        :param message: an optional explanation
        """
        super().__init__(marks, message)
        self.marks = marks


class ConfigError(InvalidInputError):
    """Exception raised when a run configuration can't be used."""


class ConfigParseError(ConfigError):
    """
    Exception raised on a syntax error in a configuration document.

    >>> error = ConfigParseError("unexpected character", 3, 7)
    >>> str(error)
    'unexpected character at line 3, column 7'
    """

    def __init__(self, message: str, line: int, column: int):
        """
        Remember where the error is.

        :param message: what went wrong
        :param line: one-based line number
        :param column: one-based column number
        """
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class ConfigValidationError(ConfigError):
    """
    Exception raised when a configuration field has a wrong value.

    >>> error = ConfigValidationError("model.black_scholes.sigma", "missing")
    >>> error.field
    'model.black_scholes.sigma'
    >>> str(error)
    'model.black_scholes.sigma: missing'
    """

    def __init__(self, field: str, message: str):
        """
        Remember the field.

        :param field: a dotted path to the field
        :param message: what went wrong
        """
        super().__init__(f"{field}: {message}")
        self.field = field


def as_finite_array(
    value: ArrayLike, ndim: int, name: str = "array"
) -> np.ndarray:
    """
    Convert to a float array and check its dimension and entries.

    >>> as_finite_array([1, 2], 1).tolist()
    [1.0, 2.0]
    >>> as_finite_array([[1, float("nan")]], 2, "sigma")
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: sigma has non-finite entries
    >>> as_finite_array([1, 2], 2, "sigma")
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: sigma must have 2 dimensions, got 1

    :param value: something convertible to a ``numpy`` array
    :param ndim: expected number of dimensions
    :param name: a name to use in error messages
    :returns: a float64 array
    :raises InvalidInputError: on wrong dimension or non-finite entries
    """
    try:
        array = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as error:
        raise InvalidInputError(f"{name} is not numeric: {error}") from error
    if array.ndim != ndim:
        raise InvalidInputError(
            f"{name} must have {ndim} dimensions, got {array.ndim}"
        )
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return array


def as_vector(
    value: ArrayLike, size: int, name: str = "vector"
) -> np.ndarray:
    """
    Convert to a finite vector of a given length.

    >>> as_vector([1.0], 2, "b")
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: b must have length 2, got 1

    :param value: something convertible to a ``numpy`` array
    :param size: expected length
    :param name: a name to use in error messages
    :returns: a float64 vector
    :raises InvalidInputError: on wrong length
    """
    vector = as_finite_array(value, 1, name)
    if vector.shape[0] != size:
        raise InvalidInputError(
            f"{name} must have length {size}, got {vector.shape[0]}"
        )
    return vector
