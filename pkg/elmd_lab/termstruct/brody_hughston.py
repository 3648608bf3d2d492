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
Brody-Hughston Term Structure
==============================

Bond prices are tail probabilities of a density :math:`\rho_t(x)` of time
to maturity, :math:`P_t(T)=\int_{T-t}^\infty\rho_t(u)du`, with

.. math:: \rho(x)=\rho_0(x)\mathscr{E}\left(\left(\partial_x\ln\rho(x)+
    \bar{\alpha}(x)\right)\cdot\lambda+\bar{\sigma}(x)\cdot W+
    \bar{\gamma}(x)*(p-q)\right)

A deflator works for all bonds iff :math:`r=\rho(0)` and

.. math:: \bar{\alpha}(x)=r+\left<\bar{\sigma}(x),\theta\right>+
    \sum\limits_jc_j\bar{\gamma}_j(x)\rho_j

Integrals in :math:`x` use trapezoidal quadrature. The density is taken
continuous, so :math:`\rho_-=\rho`.

>>> rng = np.random.default_rng(14)
>>> points = np.linspace(0.0, 1200.0, 24001)
>>> worst = []
>>> for _ in range(10):
...     rate = rng.uniform(0.02, 0.03)
...     family = bh_synthesize(
...         points, rate * np.exp(-rate * points),
...         rng.normal(size=2), rng.uniform(-0.5, 0.5, size=1),
...         JumpMeasure([1.0], [rng.uniform(0.5, 2.0)]),
...         np.sin(points[:, np.newaxis] / rng.uniform(50, 200, size=2)),
...         np.cos(points[:, np.newaxis] / rng.uniform(50, 200)),
...     )
...     report = bh_check(family, family.market_price_of_risk,
...         family.jump_premium, family.density[0])
...     worst.append(max(report.max_drift_residual,
...         report.density_drift_residual, report.diffusion_constraint,
...         report.jump_constraint, report.rho_zero_residual))
>>> bool(max(worst) <= 1e-8)
True
"""
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid

from elmd_lab.model import JumpMeasure
from elmd_lab.termstruct.utils import savings_account
from elmd_lab.utils import (
    ArrayLike,
    InvalidInputError,
    as_finite_array,
    as_vector,
)


@dataclass(frozen=True, eq=False)
class BhFamily:
    """
    A density of time to maturity with its coefficients.

    >>> BhFamily(np.arange(5.0), np.full(5, 0.5), np.zeros(5),
    ...     np.zeros((5, 1)), np.zeros((5, 0)))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: density must integrate to one, got 2.0

    :param points: :math:`0=x_0<\\dots<x_L`
    :param density: :math:`\\rho(x)>0`
    :param alpha: :math:`\\bar{\\alpha}(x)`
    :param volatility: :math:`\\bar{\\sigma}(x)\\in\\mathbb{R}^m`
    :param jump_volatility: :math:`\\bar{\\gamma}(x,x_j)`
    :param jumps: marks and intensities :math:`c_j`
    :param quad_tol: tolerance of the normalisation
    """

    points: np.ndarray
    density: np.ndarray
    alpha: np.ndarray
    volatility: np.ndarray
    jump_volatility: np.ndarray
    jumps: JumpMeasure = field(default_factory=JumpMeasure.empty)
    quad_tol: float = 1e-6

    def __post_init__(self):
        """Validate the density."""
        points = as_finite_array(self.points, 1, "points")
        if (
            points.shape[0] < 2
            or points[0] != 0
            or np.any(np.diff(points) <= 0)
        ):
            raise InvalidInputError("points must start at zero and increase")
        size = points.shape[0]
        density = as_vector(self.density, size, "density")
        if np.any(density <= 0):
            raise InvalidInputError("density must be positive")
        mass = float(trapezoid(density, points))
        if abs(mass - 1) > self.quad_tol:
            raise InvalidInputError(
                f"density must integrate to one, got {mass}"
            )
        volatility = as_finite_array(self.volatility, 2, "volatility")
        jump_volatility = as_finite_array(
            self.jump_volatility, 2, "jump volatility"
        )
        if (
            volatility.shape[0] != size
            or jump_volatility.shape != (size, self.jumps.size)
        ):
            raise InvalidInputError(
                f"coefficients must have {size} rows and "
                f"{self.jumps.size} marks"
            )
        for name, value in (
            ("points", points),
            ("density", density),
            ("alpha", as_vector(self.alpha, size, "alpha")),
            ("volatility", volatility),
            ("jump_volatility", jump_volatility),
        ):
            value.flags.writeable = False
            object.__setattr__(self, name, value)

    @property
    def required_rate(self) -> float:
        """The only possible short rate :math:`\\rho(0)`."""
        return float(self.density[0])


@dataclass(frozen=True, eq=False)
class BhSynthesis(BhFamily):
    """
    A family built together with its deflator.

    :param market_price_of_risk: :math:`\\theta`
    :param jump_premium: :math:`\\rho_j`
    """

    market_price_of_risk: np.ndarray = field(
        default_factory=lambda: np.zeros(0)
    )
    jump_premium: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass(frozen=True, eq=False)
class BhReport:
    """
    Residuals of the drift and consistency conditions.

    :param required_rate: :math:`\\rho(0)`
    :param short_rate_residual: :math:`|r-\\rho(0)|`
    :param max_drift_residual: the largest absolute value of
        ``drift_residuals``
    :param drift_residuals: :math:`\\bar{\\alpha}(x)-r-
        \\left<\\bar{\\sigma}(x),\\theta\\right>-
        \\sum_jc_j\\bar{\\gamma}_j(x)\\rho_j`
    :param mass_residual: :math:`\\left|\\int\\rho(x)dx-1\\right|`
    :param density_drift_residual:
        :math:`\\left|\\int\\left(\\partial_x\\rho(x)+\\rho(x)
        \\bar{\\alpha}(x)\\right)dx\\right|`
    :param diffusion_constraint: the largest component of
        :math:`\\left|\\int\\bar{\\sigma}(x)\\rho(x)dx\\right|`
    :param jump_constraint: the largest component of
        :math:`\\left|\\int\\bar{\\gamma}(x)\\rho(x)dx\\right|`
    :param rho_zero_residual:
        :math:`\\left|\\rho(0)-\\int\\rho(x)\\bar{\\alpha}(x)dx\\right|`
    """

    required_rate: float
    short_rate_residual: float
    max_drift_residual: float
    drift_residuals: np.ndarray
    mass_residual: float
    density_drift_residual: float
    diffusion_constraint: float
    jump_constraint: float
    rho_zero_residual: float


def _largest(values: np.ndarray) -> float:
    return float(np.abs(values).max()) if values.size else 0.0


def bh_check(
    family: BhFamily, theta: ArrayLike, premium: ArrayLike, rate: float
) -> BhReport:
    """
    Check a deflator against a Brody-Hughston family.

    >>> points = np.linspace(0.0, 1200.0, 24001)
    >>> density = 0.03 * np.exp(-0.03 * points)
    >>> family = BhFamily(points, density, np.full(24001, 0.03),
    ...     np.zeros((24001, 1)), np.zeros((24001, 0)))
    >>> report = bh_check(family, [0.0], [], 0.03)
    >>> report.required_rate, report.short_rate_residual
    (0.03, 0.0)
    >>> report.max_drift_residual, report.rho_zero_residual <= 1e-8
    (0.0, True)
    >>> round(bh_check(family, [0.0], [], 0.05).short_rate_residual, 12)
    0.02

    :param family: a density with coefficients
    :param theta: :math:`\\theta\\in\\mathbb{R}^m`
    :param premium: :math:`\\rho_j<1`
    :param rate: :math:`r`
    :returns: a report
    """
    risk = as_vector(theta, family.volatility.shape[1], "theta")
    jump_premium = as_vector(premium, family.jumps.size, "jump premium")
    drift_residuals = (
        family.alpha
        - rate
        - family.volatility @ risk
        - family.jump_volatility @ (family.jumps.intensities * jump_premium)
    )
    weighted_alpha = float(
        trapezoid(family.density * family.alpha, family.points)
    )
    return BhReport(
        family.required_rate,
        abs(rate - family.required_rate),
        _largest(drift_residuals),
        drift_residuals,
        abs(float(trapezoid(family.density, family.points)) - 1),
        float(
            abs(family.density[-1] - family.density[0] + weighted_alpha)
        ),
        _largest(
            trapezoid(
                family.volatility * family.density[:, np.newaxis],
                family.points,
                axis=0,
            )
        ),
        _largest(
            trapezoid(
                family.jump_volatility * family.density[:, np.newaxis],
                family.points,
                axis=0,
            )
        ),
        abs(family.required_rate - weighted_alpha),
    )


def _centred(
    shape: np.ndarray, density: np.ndarray, points: np.ndarray
) -> np.ndarray:
    weighted = trapezoid(shape * density[:, np.newaxis], points, axis=0)
    return shape - weighted / trapezoid(density, points)


def bh_synthesize(
    points: ArrayLike,
    density: ArrayLike,
    theta: ArrayLike,
    premium: ArrayLike,
    jumps: JumpMeasure,
    volatility_shape: ArrayLike,
    jump_volatility_shape: ArrayLike,
) -> BhSynthesis:
    """
    Build a consistent family for a given deflator.

    Shapes are shifted to satisfy :math:`\\int\\bar{\\sigma}\\rho dx=0` and
    :math:`\\int\\bar{\\gamma}\\rho dx=0`, :math:`r=\\rho(0)` and
    :math:`\\bar{\\alpha}` comes from the drift condition.

    >>> points = np.linspace(0.0, 1200.0, 24001)
    >>> family = bh_synthesize(points, 0.03 * np.exp(-0.03 * points), [0.5],
    ...     [], JumpMeasure.empty(), np.ones((24001, 1)), np.zeros((24001, 0)))
    >>> family.required_rate, float(np.abs(family.volatility).max()) < 1e-12
    (0.03, True)

    :param points: :math:`0=x_0<\\dots<x_L`
    :param density: :math:`\\rho(x)>0`
    :param theta: :math:`\\theta\\in\\mathbb{R}^m`
    :param premium: :math:`\\rho_j<1`
    :param jumps: marks and intensities :math:`c_j`
    :param volatility_shape: uncentred :math:`\\bar{\\sigma}`
    :param jump_volatility_shape: uncentred :math:`\\bar{\\gamma}`
    :returns: a family with its deflator
    """
    grid = as_finite_array(points, 1, "points")
    values = as_finite_array(density, 1, "density")
    volatility = _centred(
        as_finite_array(volatility_shape, 2, "volatility"), values, grid
    )
    jump_volatility = _centred(
        as_finite_array(jump_volatility_shape, 2, "jump volatility"),
        values,
        grid,
    )
    risk = as_vector(theta, volatility.shape[1], "theta")
    jump_premium = as_vector(premium, jumps.size, "jump premium")
    alpha = (
        values[0]
        + volatility @ risk
        + jump_volatility @ (jumps.intensities * jump_premium)
    )
    return BhSynthesis(
        grid,
        values,
        alpha,
        volatility,
        jump_volatility,
        jumps,
        market_price_of_risk=risk,
        jump_premium=jump_premium,
    )


def bh_savings_account(
    times: ArrayLike, families: Sequence[BhFamily]
) -> np.ndarray:
    """
    Accumulate the short rates :math:`\\rho_{t_k}(0)` of a family path.

    >>> points = np.linspace(0.0, 1200.0, 24001)
    >>> family = BhFamily(points, 0.03 * np.exp(-0.03 * points),
    ...     np.full(24001, 0.03), np.zeros((24001, 1)), np.zeros((24001, 0)))
    >>> bool(np.allclose(bh_savings_account([0.0, 1.0], [family] * 2),
    ...     [1.0, np.exp(0.03)]))
    True

    :param times: observation times
    :param families: one family per time
    :returns: the savings account at these times
    """
    return savings_account(
        times, [family.required_rate for family in families]
    )
