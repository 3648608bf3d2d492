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
Heath-Jarrow-Morton Drift Condition
====================================

Forward rates follow

.. math:: f(T)=f_0(T)+\alpha(T)\cdot\lambda+\sigma(T)\cdot W+
    \gamma(T)*(p-q)

With :math:`A(T)=-\int_t^T\alpha(s)ds` and the same integrals
:math:`\Sigma(T)`, :math:`\Gamma(T)` of :math:`\sigma` and :math:`\gamma`, a
deflator with :math:`\theta`, :math:`\rho` makes all bonds local
martingales iff for all :math:`T\geq t`

.. math:: A(T)+\frac{1}{2}\|\Sigma(T)\|^2-\left<\Sigma(T),\theta\right>+
    \sum\limits_jc_j\left((1-\rho_j)\left(e^{\Gamma_j(T)}-1\right)-
    \Gamma_j(T)\right)=0

Integrals in maturity use trapezoidal quadrature on the maturity grid.

>>> rng = np.random.default_rng(13)
>>> maturities = np.linspace(0.0, 5.0, 501)
>>> times = maturities[[0, 100, 200]]
>>> spread = np.maximum(maturities - times[:, np.newaxis], 0.0)
>>> worst, same_savings = [], []
>>> for _ in range(10):
...     level = rng.uniform(0.005, 0.02, size=2)
...     decay = rng.uniform(0.1, 1.0, size=2)
...     surface = HjmSurface(
...         maturities, times, np.zeros((3, 501)),
...         level * np.exp(-decay * spread[..., np.newaxis]),
...         0.01 * np.exp(-spread[..., np.newaxis]),
...         [0.02 + 0.01 * (1 - np.exp(-maturities))],
...         JumpMeasure([1.0], [rng.uniform(0.5, 2.0)]),
...     )
...     theta = rng.normal(0.0, 0.5, size=(3, 2))
...     premium = rng.uniform(-0.5, 0.5, size=(3, 1))
...     synthesis = hjm_synthesize_alpha(surface, theta, premium)
...     worst.append(np.abs(hjm_drift_residuals(synthesis.surface, theta,
...         premium)).max())
...     same_savings.append(np.array_equal(synthesis.savings,
...         hjm_synthesize_alpha(surface, np.zeros((3, 2)),
...             np.zeros((3, 1))).savings))
>>> bool(max(worst) <= 1e-6), all(same_savings)
(True, True)
"""
import dataclasses
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from elmd_lab.model import JumpMeasure
from elmd_lab.termstruct.utils import savings_account
from elmd_lab.utils import (
    ArrayLike,
    DomainError,
    InvalidInputError,
    as_finite_array,
)


def _increasing(value: ArrayLike, name: str) -> np.ndarray:
    array = as_finite_array(value, 1, name)
    if array.shape[0] == 0 or np.any(np.diff(array) <= 0):
        raise InvalidInputError(f"{name} must be non-empty and increase")
    return array


@dataclass(frozen=True, eq=False)
class HjmSurface:
    """
    Forward rate coefficients on a maturity grid.

    Evaluation times must be maturities too. Entries with :math:`T<t` are
    ignored.

    >>> HjmSurface([0.0, 1.0], [0.5], np.zeros((1, 2)), np.zeros((1, 2, 1)),
    ...     np.zeros((1, 2, 0)), [[0.03, 0.03]])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: time 0.5 is not a maturity

    :param maturities: :math:`T_0<\\dots<T_M`
    :param times: :math:`t_0<\\dots<t_{K-1}`
    :param alpha: :math:`\\alpha(t_k,T_l)`, a :math:`K\\times(M+1)` array
    :param volatility: :math:`\\sigma(t_k,T_l)\\in\\mathbb{R}^m`
    :param jump_volatility: :math:`\\gamma(t_k,T_l,x_j)`
    :param forwards: forward curves :math:`f_{t_k}(T_l)`, one row per time
        or a single row held frozen
    :param jumps: marks and intensities :math:`c_j`
    """

    maturities: np.ndarray
    times: np.ndarray
    alpha: np.ndarray
    volatility: np.ndarray
    jump_volatility: np.ndarray
    forwards: np.ndarray
    jumps: JumpMeasure = field(default_factory=JumpMeasure.empty)

    def __post_init__(self):
        """Validate grids and shapes."""
        maturities = _increasing(self.maturities, "maturities")
        times = _increasing(self.times, "times")
        for time in times:
            if not np.any(np.isclose(maturities, time, rtol=0, atol=1e-12)):
                raise InvalidInputError(f"time {time} is not a maturity")
        size, count = times.shape[0], maturities.shape[0]
        alpha = as_finite_array(self.alpha, 2, "alpha")
        volatility = as_finite_array(self.volatility, 3, "volatility")
        jump_volatility = as_finite_array(
            self.jump_volatility, 3, "jump volatility"
        )
        forwards = as_finite_array(self.forwards, 2, "forwards")
        if (
            alpha.shape != (size, count)
            or volatility.shape[:2] != (size, count)
            or jump_volatility.shape != (size, count, self.jumps.size)
            or forwards.shape not in {(1, count), (size, count)}
        ):
            raise InvalidInputError(
                f"surface arrays don't match {size} times, {count} "
                f"maturities and {self.jumps.size} marks"
            )
        for name, value in (
            ("maturities", maturities),
            ("times", times),
            ("alpha", alpha),
            ("volatility", volatility),
            ("jump_volatility", jump_volatility),
            ("forwards", forwards),
        ):
            value.flags.writeable = False
            object.__setattr__(self, name, value)

    @property
    def factors(self) -> int:
        """Dimension :math:`m` of the Wiener process."""
        return self.volatility.shape[2]

    def start(self, index: int) -> int:
        """
        Find the maturity index of an evaluation time.

        :param index: evaluation time index :math:`k`
        :returns: :math:`l` with :math:`T_l=t_k`
        """
        return int(
            np.flatnonzero(
                np.isclose(
                    self.maturities, self.times[index], rtol=0, atol=1e-12
                )
            )[0]
        )

    def integrated(
        self, index: int
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Integrate coefficients in maturity from :math:`t_k`.

        :param index: evaluation time index :math:`k`
        :returns: :math:`A`, :math:`\\Sigma` and :math:`\\Gamma` for all
            maturities, zero before :math:`t_k`
        """
        start = self.start(index)
        grid = self.maturities[start:]
        return tuple(  # type: ignore
            _minus_integral(values, grid, start)
            for values in (
                self.alpha[index],
                self.volatility[index],
                self.jump_volatility[index],
            )
        )

    def short_rates(self) -> np.ndarray:
        """
        Read :math:`r(t_k)=f_{t_k}(t_k)` from forward curves.

        >>> surface = HjmSurface([0.0, 1.0, 2.0], [0.0, 1.0],
        ...     np.zeros((2, 3)), np.zeros((2, 3, 1)), np.zeros((2, 3, 0)),
        ...     [[0.01, 0.02, 0.04]])
        >>> surface.short_rates().tolist()
        [0.01, 0.02]

        :returns: one short rate per evaluation time
        """
        rows = np.arange(self.times.shape[0]) % self.forwards.shape[0]
        return np.array(
            [
                np.interp(time, self.maturities, self.forwards[row])
                for time, row in zip(self.times, rows)
            ]
        )


def _minus_integral(
    values: np.ndarray, grid: np.ndarray, start: int
) -> np.ndarray:
    result = np.zeros_like(values)
    result[start:] = -cumulative_trapezoid(
        values[start:], grid, axis=0, initial=0.0
    )
    return result


@dataclass(frozen=True, eq=False)
class HjmSynthesis:
    """
    A drift which makes a deflator work for all bonds.

    :param surface: the surface with the synthesized :math:`\\alpha`
    :param short_rate: :math:`r(t_k)=f_{t_k}(t_k)`
    :param savings: :math:`B_{t_k}=\\exp\\int_{t_0}^{t_k}r_sds`
    """

    surface: HjmSurface
    short_rate: np.ndarray
    savings: np.ndarray


def _deflator_rows(
    surface: HjmSurface, theta: ArrayLike, premium: ArrayLike
) -> Tuple[np.ndarray, np.ndarray]:
    size = surface.times.shape[0]
    risk = np.asarray(theta, dtype=np.float64)
    if risk.ndim == 3:
        if not np.all(risk == risk[:, :1]):
            raise InvalidInputError(
                "market price of risk must not depend on maturity, "
                "it is shared by all bonds"
            )
        risk = risk[:, 0]
    risk = as_finite_array(risk, 2, "theta")
    jump_premium = as_finite_array(premium, 2, "jump premium")
    if risk.shape != (size, surface.factors) or jump_premium.shape != (
        size,
        surface.jumps.size,
    ):
        raise InvalidInputError(
            f"deflator arrays must have shapes {(size, surface.factors)} "
            f"and {(size, surface.jumps.size)}"
        )
    if np.any(jump_premium >= 1):
        raise DomainError(
            f"jump risk premium must be below one, got {jump_premium.max()}"
        )
    return risk, jump_premium


def hjm_drift_residuals(
    surface: HjmSurface, theta: ArrayLike, premium: ArrayLike
) -> np.ndarray:
    """
    Evaluate the drift condition for all times and maturities.

    :param surface: forward rate coefficients
    :param theta: :math:`\\theta(t_k)`, a :math:`K\\times m` array
    :param premium: :math:`\\rho(t_k)`, a :math:`K\\times n` array
    :returns: a :math:`K\\times(M+1)` array, zero where :math:`T<t`
    """
    risk, jump_premium = _deflator_rows(surface, theta, premium)
    rows = []
    for index in range(surface.times.shape[0]):
        drift, diffusion, jumps = surface.integrated(index)
        rows.append(
            drift
            + np.sum(diffusion**2, axis=1) / 2
            - diffusion @ risk[index]
            + (
                (1 - jump_premium[index]) * np.expm1(jumps) - jumps
            ) @ surface.jumps.intensities
        )
    return np.array(rows)


def hjm_drift_residual(
    surface: HjmSurface,
    theta: ArrayLike,
    premium: ArrayLike,
    index: int,
    maturity_index: int,
) -> float:
    """
    Evaluate the drift condition at :math:`(t_k,T_l)`.

    >>> maturities = np.linspace(0.0, 5.0, 501)
    >>> times = maturities[[0, 100, 200]]
    >>> spread = np.maximum(maturities - times[:, np.newaxis], 0.0)
    >>> ho_lee = HjmSurface(maturities, times, 1e-4 * spread,
    ...     np.full((3, 501, 1), 0.01), np.zeros((3, 501, 0)),
    ...     np.full((1, 501), 0.03))
    >>> no_risk = np.zeros((3, 1)), np.zeros((3, 0))
    >>> abs(hjm_drift_residual(ho_lee, *no_risk, 0, 200)) < 1e-15
    True
    >>> flat = dataclasses.replace(ho_lee, alpha=np.zeros((3, 501)))
    >>> bool(np.isclose(hjm_drift_residual(flat, *no_risk, 0, 200), 2e-4))
    True
    >>> hjm_drift_residual(flat, *no_risk, 1, 50)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: maturity 0.5 is before time 1.0

    :param surface: forward rate coefficients
    :param theta: :math:`\\theta(t_k)`, a :math:`K\\times m` array, or
        :math:`K\\times(M+1)\\times m` if it is the same for all maturities
    :param premium: :math:`\\rho(t_k)`, a :math:`K\\times n` array
    :param index: evaluation time index :math:`k`
    :param maturity_index: maturity index :math:`l`
    :returns: the left-hand side of the drift condition
    :raises InvalidInputError: if :math:`T_l<t_k`
    """
    if maturity_index < surface.start(index):
        raise InvalidInputError(
            f"maturity {surface.maturities[maturity_index]} is before "
            f"time {surface.times[index]}"
        )
    return float(
        hjm_drift_residuals(surface, theta, premium)[index, maturity_index]
    )


def hjm_synthesize_alpha(
    surface: HjmSurface, theta: ArrayLike, premium: ArrayLike
) -> HjmSynthesis:
    r"""
    Find the drift which satisfies the drift condition.

    .. math:: \alpha(T)=-\left<\sigma(T),\Sigma(T)-\theta\right>-
        \sum\limits_jc_j\gamma_j(T)\left((1-\rho_j)e^{\Gamma_j(T)}-1\right)

    >>> maturities = np.linspace(0.0, 5.0, 501)
    >>> times = maturities[[0, 100, 200]]
    >>> spread = np.maximum(maturities - times[:, np.newaxis], 0.0)
    >>> surface = HjmSurface(maturities, times, np.zeros((3, 501)),
    ...     np.full((3, 501, 1), 0.01), np.zeros((3, 501, 0)),
    ...     np.full((1, 501), 0.03))
    >>> synthesis = hjm_synthesize_alpha(surface, np.zeros((3, 1)),
    ...     np.zeros((3, 0)))
    >>> bool(np.allclose(synthesis.surface.alpha, 1e-4 * spread))
    True
    >>> np.round(synthesis.short_rate, 12).tolist()
    [0.03, 0.03, 0.03]
    >>> theta = np.zeros((3, 501, 1))
    >>> theta[0, 10] = 0.1
    >>> hjm_synthesize_alpha(surface, theta, np.zeros((3, 0)))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: market price of risk must not ...

    :param surface: forward rate coefficients, :math:`\alpha` is ignored
    :param theta: :math:`\theta(t_k)`
    :param premium: :math:`\rho(t_k)`
    :returns: the surface with the new drift, the short rate and the
        savings account
    """
    risk, jump_premium = _deflator_rows(surface, theta, premium)
    alpha = np.zeros_like(surface.alpha)
    for index in range(surface.times.shape[0]):
        start = surface.start(index)
        _, diffusion, jumps = surface.integrated(index)
        alpha[index, start:] = (
            -np.sum(
                surface.volatility[index] * (diffusion - risk[index]), axis=1
            )
            - (
                surface.jump_volatility[index]
                * ((1 - jump_premium[index]) * np.exp(jumps) - 1)
            )
            @ surface.jumps.intensities
        )[start:]
    short_rate = surface.short_rates()
    return HjmSynthesis(
        dataclasses.replace(surface, alpha=alpha),
        short_rate,
        savings_account(surface.times, short_rate),
    )
