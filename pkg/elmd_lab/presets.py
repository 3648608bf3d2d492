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
Market Presets
===============

Ready-made markets: Black-Scholes, a pure diffusion of several assets
driven by one factor, Black-Scholes with Poisson jumps, a discretised
Merton model and the Heston model with its variance parameters.
"""
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from elmd_lab.model import JumpMeasure, MarketSpec, TimeGrid
from elmd_lab.utils import ArrayLike, InvalidInputError


def black_scholes(
    grid: TimeGrid,
    drift: float = 0.1,
    volatility: float = 0.2,
    initial_price: float = 1.0,
) -> MarketSpec:
    """
    Create a one-asset Black-Scholes market.

    >>> spec = black_scholes(TimeGrid.uniform(1.0, 4))
    >>> spec.drift.shape, spec.volatility.shape, spec.jump_coefficients.shape
    ((4, 1), (4, 1, 1), (4, 1, 0))

    :param grid: a time grid
    :param drift: :math:`a`
    :param volatility: :math:`\\sigma`
    :param initial_price: :math:`S_0`
    :returns: a market specification
    """
    return MarketSpec.constant(
        grid, [initial_price], [drift], [[volatility]]
    )


def pure_diffusion(
    grid: TimeGrid,
    drift: ArrayLike,
    volatility: float,
    initial_prices: ArrayLike,
) -> MarketSpec:
    """
    Create a market of several assets driven by the same Wiener process.

    An ELMD exists iff all drifts are equal.

    >>> spec = pure_diffusion(TimeGrid.uniform(1.0, 1), [1.0, 2.0], 1.0,
    ...     [1.0, 1.0])
    >>> spec.volatility[0].tolist()
    [[1.0], [1.0]]

    :param grid: a time grid
    :param drift: :math:`a\\in\\mathbb{R}^d`
    :param volatility: the common volatility :math:`\\sigma`
    :param initial_prices: :math:`S_0\\in\\mathbb{R}^d`
    :returns: a market specification
    """
    prices = np.asarray(initial_prices, dtype=np.float64)
    return MarketSpec.constant(
        grid, prices, drift, np.full((prices.shape[0], 1), volatility)
    )


def bs_poisson(
    grid: TimeGrid,
    drift: float = 0.1,
    volatility: float = 0.2,
    intensity: float = 1.0,
    jump_size: float = 1.0,
    initial_price: float = 1.0,
) -> MarketSpec:
    """
    Create a Black-Scholes market with one Poisson jump of a fixed size.

    >>> spec = bs_poisson(TimeGrid.uniform(1.0, 1))
    >>> spec.jump_coefficients.tolist(), spec.jumps.intensities.tolist()
    ([[[1.0]]], [1.0])

    :param grid: a time grid
    :param drift: :math:`a`
    :param volatility: :math:`\\sigma`
    :param intensity: :math:`c`, jumps per unit of time
    :param jump_size: relative price jump :math:`\\gamma>-1`
    :param initial_price: :math:`S_0`
    :returns: a market specification
    """
    return MarketSpec.constant(
        grid,
        [initial_price],
        [drift],
        [[volatility]],
        [[jump_size]],
        JumpMeasure([jump_size], [intensity]),
    )


def lognormal_marks(
    intensity: float, log_mean: float, log_std: float, nodes: int
) -> JumpMeasure:
    r"""
    Discretise lognormal relative jumps into equally probable nodes.

    Jumps :math:`e^Y-1` with :math:`Y\sim N(\mu,\delta^2)` arriving at rate
    :math:`\lambda` are replaced by ``nodes`` marks with intensities
    :math:`\lambda/n`. Each mark is the conditional mean of :math:`e^Y-1`
    on one of :math:`n` equally probable quantile bins of :math:`Y`, so the
    mean jump size is preserved.

    >>> jumps = lognormal_marks(1.0, 0.0, 0.1, 1)
    >>> np.round(jumps.marks, 10).tolist(), jumps.intensities.tolist()
    ([0.0050125209], [1.0])
    >>> jumps = lognormal_marks(2.0, -0.1, 0.3, 10)
    >>> bool(np.all(np.diff(jumps.marks) > 0))
    True
    >>> bool(np.isclose(jumps.intensities @ jumps.marks,
    ...     2.0 * (np.exp(-0.1 + 0.045) - 1)))
    True
    >>> lognormal_marks(1.0, 0.0, 0.0, 3)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: log_std must be positive, got 0.0

    :param intensity: :math:`\lambda`
    :param log_mean: :math:`\mu`
    :param log_std: :math:`\delta`
    :param nodes: :math:`n`
    :returns: a jump measure which marks are relative jump sizes
    :raises InvalidInputError: for non-positive parameters
    """
    if not log_std > 0:
        raise InvalidInputError(f"log_std must be positive, got {log_std}")
    if not intensity > 0 or nodes < 1:
        raise InvalidInputError(
            f"intensity and nodes must be positive, got {intensity}, {nodes}"
        )
    quantiles = norm.ppf(np.linspace(0.0, 1.0, nodes + 1))
    masses = np.diff(norm.cdf(quantiles - log_std))
    marks = np.exp(log_mean + log_std**2 / 2) * masses * nodes - 1
    return JumpMeasure(marks, np.full(nodes, intensity / nodes))


def merton_discretized(
    grid: TimeGrid,
    drift: float,
    volatility: float,
    jumps: JumpMeasure,
    initial_price: float = 1.0,
) -> MarketSpec:
    """
    Create a Merton market with jump sizes equal to the marks.

    >>> spec = merton_discretized(TimeGrid.uniform(1.0, 1), 0.1, 0.2,
    ...     lognormal_marks(1.0, 0.0, 0.1, 3))
    >>> bool(np.array_equal(spec.jump_coefficients[0, 0], spec.jumps.marks))
    True

    :param grid: a time grid
    :param drift: :math:`a`
    :param volatility: :math:`\\sigma`
    :param jumps: marks are relative jump sizes, e.g. from
        :func:`lognormal_marks`
    :param initial_price: :math:`S_0`
    :returns: a market specification with :math:`\\gamma(x)=x`
    """
    return MarketSpec.constant(
        grid,
        [initial_price],
        [drift],
        [[volatility]],
        [jumps.marks],
        jumps,
    )


@dataclass(frozen=True)
class HestonParams:
    """
    Parameters of the variance process of the Heston model.

    .. math:: dv_t=\\kappa\\left(\\vartheta-v_t\\right)dt+\\xi\\sqrt{v_t}
        d\\tilde{W}_t

    >>> HestonParams(1.0, 0.04, 0.5, initial_variance=0.04)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: Feller condition 2κϑ > ξ² fails: ...

    :param mean_reversion: :math:`\\kappa`
    :param long_run_variance: :math:`\\vartheta`
    :param vol_of_variance: :math:`\\xi`
    :param initial_variance: :math:`v_0`
    :param correlation: correlation of :math:`W` and :math:`\\tilde{W}`
    :param variance_floor: variance is clamped from below by this value
        where it enters volatility
    """

    mean_reversion: float
    long_run_variance: float
    vol_of_variance: float
    initial_variance: float
    correlation: float = 0.0
    variance_floor: float = 1e-8

    def __post_init__(self):
        """Check the Feller condition and the parameter domains."""
        feller = 2 * self.mean_reversion * self.long_run_variance
        if not feller > self.vol_of_variance**2:
            raise InvalidInputError(
                f"Feller condition 2κϑ > ξ² fails: {feller} <= "
                f"{self.vol_of_variance ** 2}"
            )
        if not self.initial_variance > 0 or not self.variance_floor > 0:
            raise InvalidInputError(
                "initial variance and variance floor must be positive"
            )
        if not -1 <= self.correlation <= 1:
            raise InvalidInputError(
                f"correlation must be in [-1, 1], got {self.correlation}"
            )


def heston(
    grid: TimeGrid,
    drift: float,
    params: HestonParams,
    initial_price: float = 1.0,
) -> MarketSpec:
    """
    Create a Heston market frozen at the initial variance.

    Pathwise volatility comes from simulated variance paths, see
    :func:`elmd_lab.sim.simulate_variance`.

    >>> spec = heston(TimeGrid.uniform(1.0, 2), 0.1,
    ...     HestonParams(2.0, 0.04, 0.3, initial_variance=0.16))
    >>> np.round(spec.volatility.ravel(), 12).tolist()
    [0.4, 0.4]

    :param grid: a time grid
    :param drift: :math:`a`
    :param params: variance parameters
    :param initial_price: :math:`S_0`
    :returns: a market specification with :math:`\\sigma=\\sqrt{v_0}`
    """
    return MarketSpec.constant(
        grid,
        [initial_price],
        [drift],
        [[np.sqrt(params.initial_variance)]],
    )
