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
Term Structure Utilities
=========================
"""
import numpy as np
from scipy.integrate import cumulative_trapezoid

from elmd_lab.utils import ArrayLike, InvalidInputError, as_finite_array


def savings_account(times: ArrayLike, short_rates: ArrayLike) -> np.ndarray:
    """
    Accumulate a short rate into :math:`B_t=\\exp\\int_0^tr_sds`.

    >>> bool(np.allclose(savings_account([0.0, 1.0, 2.0], [0.03] * 3),
    ...     np.exp([0.0, 0.03, 0.06])))
    True
    >>> savings_account([0.0, 1.0], [0.03])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: one short rate per time is needed

    :param times: increasing times starting from the first one
    :param short_rates: :math:`r` at these times
    :returns: :math:`B` by trapezoidal quadrature
    :raises InvalidInputError: if lengths differ
    """
    grid = as_finite_array(times, 1, "times")
    rates = as_finite_array(short_rates, 1, "short rates")
    if grid.shape != rates.shape:
        raise InvalidInputError("one short rate per time is needed")
    return np.exp(cumulative_trapezoid(rates, grid, initial=0.0))
