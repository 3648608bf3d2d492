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
Two-Period Tree Oracle
=======================

On a finite probability space predictable compensators are conditional
expectations, so the drift condition for a deflator
:math:`Z=\mathscr{E}(-\Theta)/\mathscr{E}(R)` can be checked exactly. For a
semimartingale :math:`X=A+M` (:math:`A` predictable) the price
:math:`S=S_0\mathscr{E}(X)` is deflated to a martingale iff

.. math:: A=R+[M,\Theta]^p

which is the same as

.. math:: A=\widetilde{R}+[A,\widetilde{R}]+[M,\widetilde{\Theta}]^p

Using :math:`\Theta` instead of :math:`\widetilde{\Theta}` in the last
bracket is exact only when :math:`\Delta R\Delta[M,\Theta]^p=0`, e.g. for a
zero rate.

>>> rng = np.random.default_rng(12)
>>> agree, stated_agree = [], []
>>> for _ in range(300):
...     tree = TwoPeriodTree(rng.dirichlet(np.ones(rng.integers(2, 9))))
...     size = tree.branches
...     market = TreeProcess(rng.uniform(-0.1, 0.1, size),
...         rng.uniform(-0.1, 0.1, (size, size)))
...     rate = TreeProcess(np.full(size, rng.uniform(0, 0.02)),
...         np.repeat(rng.uniform(0, 0.02, (size, 1)), size, axis=1))
...     if rng.uniform() < 0.3:
...         rate = rate.scale(0.0)
...     theta = fit_market_price_of_risk(tree, market, rate)
...     if rng.uniform() < 0.5:
...         theta = theta.scale(0.5)
...     try:
...         report = check_deflator(tree, 1.0, market, theta, rate)
...     except DomainError:
...         continue
...     agree.append(
...         report.deflates == (report.plain_gap <= 1e-12)
...         == (report.tilde_gap <= 1e-12)
...     )
...     if not rate.first.any() and not rate.second.any():
...         stated_agree.append(
...             report.deflates == (report.stated_gap <= 1e-12))
>>> len(agree) > 200, all(agree), all(stated_agree)
(True, True, True)
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from elmd_lab.utils import (
    DomainError,
    InfeasibleSystemError,
    InvalidInputError,
    as_finite_array,
)

MAX_ATOMS = 64


@dataclass(frozen=True, eq=False)
class TwoPeriodTree:
    """
    Two independent draws from the same finite distribution.

    Outcomes are pairs :math:`(i,j)`; the filtration reveals :math:`i` at
    time one and :math:`j` at time two.

    >>> TwoPeriodTree([0.5, 0.5]).branches
    2
    >>> TwoPeriodTree([0.5, 0.6])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: probabilities must be positive and ...
    >>> TwoPeriodTree(np.full(9, 1 / 9))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: a tree can have at most 64 atoms, got 81

    :param probabilities: probabilities of one draw
    """

    probabilities: np.ndarray

    def __post_init__(self):
        """Validate probabilities."""
        probabilities = as_finite_array(self.probabilities, 1, "probabilities")
        if np.any(probabilities <= 0) or abs(probabilities.sum() - 1) > 1e-12:
            raise InvalidInputError(
                "probabilities must be positive and sum to one"
            )
        if probabilities.shape[0] ** 2 > MAX_ATOMS:
            raise InvalidInputError(
                f"a tree can have at most {MAX_ATOMS} atoms, "
                f"got {probabilities.shape[0] ** 2}"
            )
        object.__setattr__(self, "probabilities", probabilities.copy())

    @property
    def branches(self) -> int:
        """Number of outcomes of one draw."""
        return self.probabilities.shape[0]


@dataclass(frozen=True, eq=False)
class TreeProcess:
    """
    An adapted process on a tree given by its two increments.

    :param first: :math:`\\Delta X_1(i)`
    :param second: :math:`\\Delta X_2(i,j)`
    """

    first: np.ndarray
    second: np.ndarray

    def __post_init__(self):
        """Validate shapes."""
        first = as_finite_array(self.first, 1, "first increments")
        second = as_finite_array(self.second, 2, "second increments")
        if second.shape != (first.shape[0], first.shape[0]):
            raise InvalidInputError(
                f"second increments must have shape "
                f"{(first.shape[0], first.shape[0])}, got {second.shape}"
            )
        object.__setattr__(self, "first", first.copy())
        object.__setattr__(self, "second", second.copy())

    def add(self, other: "TreeProcess") -> "TreeProcess":
        """
        Add two processes.

        :param other: another process
        :returns: a sum
        """
        return TreeProcess(
            self.first + other.first, self.second + other.second
        )

    def scale(self, factor: float) -> "TreeProcess":
        """
        Multiply by a number.

        :param factor: a number
        :returns: a scaled process
        """
        return TreeProcess(factor * self.first, factor * self.second)

    def is_predictable(self, atol: float = 1e-12) -> bool:
        """
        Check whether increments are known one step ahead.

        >>> TreeProcess([1.0, 1.0], [[2.0, 2.0], [3.0, 3.0]]).is_predictable()
        True
        >>> TreeProcess([1.0, 1.0], [[2.0, 3.0], [3.0, 3.0]]).is_predictable()
        False

        :param atol: absolute tolerance
        :returns: whether the process is predictable
        """
        return bool(
            np.ptp(self.first) <= atol and np.ptp(self.second, axis=1).max()
            <= atol
        )


def compensator(tree: TwoPeriodTree, process: TreeProcess) -> TreeProcess:
    """
    Find the predictable compensator by conditional expectation.

    >>> tree = TwoPeriodTree([0.25, 0.75])
    >>> result = compensator(tree, TreeProcess([1.0, 0.0], [[4.0, 0.0],
    ...     [0.0, 2.0]]))
    >>> result.first.tolist(), result.second.tolist()
    ([0.25, 0.25], [[1.0, 1.0], [1.5, 1.5]])

    :param tree: a tree
    :param process: an adapted process
    :returns: its compensator
    """
    size = tree.branches
    expected = process.second @ tree.probabilities
    return TreeProcess(
        np.full(size, tree.probabilities @ process.first),
        np.repeat(expected[:, np.newaxis], size, axis=1),
    )


def bracket(one: TreeProcess, two: TreeProcess) -> TreeProcess:
    """
    Compute the quadratic covariation of two processes.

    :param one: a process
    :param two: another process
    :returns: :math:`[X,Y]` with increments :math:`\\Delta X\\Delta Y`
    """
    return TreeProcess(one.first * two.first, one.second * two.second)


def stoch_exp_values(
    process: TreeProcess,
) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Compute the stochastic exponential at times zero, one and two.

    >>> start, at_one, at_two = stoch_exp_values(
    ...     TreeProcess([1.0, -0.5], [[0.0, 1.0], [1.0, 0.0]]))
    >>> start, at_one.tolist(), at_two.tolist()
    (1.0, [2.0, 0.5], [[2.0, 4.0], [1.0, 0.5]])
    >>> stoch_exp_values(TreeProcess([-1.0], [[0.0]]))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.DomainError: increments must exceed -1

    :param process: increments above :math:`-1`
    :returns: values of :math:`\\mathscr{E}(X)`
    :raises DomainError: if an increment is not above :math:`-1`
    """
    if np.any(process.first <= -1) or np.any(process.second <= -1):
        raise DomainError("increments must exceed -1")
    at_one = 1 + process.first
    return 1.0, at_one, at_one[:, np.newaxis] * (1 + process.second)


def martingale_gap(
    tree: TwoPeriodTree, values: Tuple[float, np.ndarray, np.ndarray]
) -> float:
    """
    Measure how far a process is from being a martingale.

    :param tree: a tree
    :param values: process values at times zero, one and two
    :returns: the largest absolute difference between a value and the
        conditional expectation of the next one
    """
    start, at_one, at_two = values
    return float(
        max(
            abs(tree.probabilities @ at_one - start),
            np.abs(at_two @ tree.probabilities - at_one).max(),
        )
    )


def fit_market_price_of_risk(
    tree: TwoPeriodTree, market: TreeProcess, rate: TreeProcess
) -> TreeProcess:
    """
    Find :math:`\\Theta=\\kappa\\cdot M` with :math:`A=R+[M,\\Theta]^p`.

    >>> tree = TwoPeriodTree([0.5, 0.5])
    >>> fit_market_price_of_risk(tree, TreeProcess([0.1, 0.1],
    ...     [[0.0, 0.0], [0.0, 0.0]]), TreeProcess([0.0, 0.0], [[0.0, 0.0],
    ...     [0.0, 0.0]]))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InfeasibleSystemError: (0.0, 'no martingale part to ...')

    :param tree: a tree
    :param market: :math:`X` of one asset
    :param rate: a predictable :math:`R`
    :returns: a martingale :math:`\\Theta`
    :raises InfeasibleSystemError: if :math:`M` has no variance where the
        drift condition needs it
    """
    drift = compensator(tree, market)
    noise = market.add(drift.scale(-1.0))
    needed = drift.add(rate.scale(-1.0))
    variance = compensator(tree, bracket(noise, noise))
    if np.any((variance.first == 0) & (needed.first != 0)) or np.any(
        (variance.second == 0) & (needed.second != 0)
    ):
        raise InfeasibleSystemError(0.0, "no martingale part to carry drift")
    ratio = TreeProcess(
        np.divide(
            needed.first,
            variance.first,
            where=variance.first != 0,
            out=np.zeros_like(needed.first),
        ),
        np.divide(
            needed.second,
            variance.second,
            where=variance.second != 0,
            out=np.zeros_like(needed.second),
        ),
    )
    return TreeProcess(ratio.first * noise.first, ratio.second * noise.second)


@dataclass(frozen=True)
class DriftConditionReport:
    """
    Exact checks of a deflator on a tree.

    :param deflates: whether :math:`S\\cdot Z` is a martingale
    :param martingale_gap: distance of :math:`S\\cdot Z` from a martingale
    :param plain_gap: largest increment of :math:`A-R-[M,\\Theta]^p`
    :param stated_gap: largest increment of
        :math:`A-\\widetilde{R}-[A,\\widetilde{R}]-[M,\\Theta]^p`
    :param tilde_gap: largest increment of
        :math:`A-\\widetilde{R}-[A,\\widetilde{R}]-[M,\\widetilde{\\Theta}]^p`
    """

    deflates: bool
    martingale_gap: float
    plain_gap: float
    stated_gap: float
    tilde_gap: float


def _largest(process: TreeProcess) -> float:
    return float(
        max(np.abs(process.first).max(), np.abs(process.second).max())
    )


def _check_inputs(
    tree: TwoPeriodTree, theta: TreeProcess, rate: TreeProcess
) -> None:
    if not rate.is_predictable():
        raise InvalidInputError("rate must be predictable")
    if _largest(compensator(tree, theta)) > 1e-12 * (1 + _largest(theta)):
        raise InvalidInputError("market price of risk must be a martingale")
    if np.any(rate.first <= -1) or np.any(rate.second <= -1):
        raise DomainError("rate increments must exceed -1")


def check_deflator(
    tree: TwoPeriodTree,
    initial_price: float,
    market: TreeProcess,
    theta: TreeProcess,
    rate: TreeProcess,
    atol: float = 1e-12,
) -> DriftConditionReport:
    """
    Check :math:`Z=\\mathscr{E}(-\\Theta)/\\mathscr{E}(R)` and drift
    conditions.

    >>> tree = TwoPeriodTree([0.5, 0.5])
    >>> market = TreeProcess([0.1, -0.05], [[0.2, -0.1], [0.05, 0.0]])
    >>> rate = TreeProcess([0.01, 0.01], [[0.02, 0.02], [0.015, 0.015]])
    >>> theta = fit_market_price_of_risk(tree, market, rate)
    >>> np.round(theta.second, 12).tolist()
    [[0.2, -0.2], [0.4, -0.4]]
    >>> report = check_deflator(tree, 1.0, market, theta, rate)
    >>> report.deflates, report.plain_gap < 1e-12, report.tilde_gap < 1e-12
    (True, True, True)
    >>> report.stated_gap > 1e-4
    True
    >>> report = check_deflator(tree, 1.0, market, theta.scale(0.5), rate)
    >>> report.deflates, report.plain_gap > 1e-4
    (False, True)
    >>> check_deflator(tree, 1.0, market, market, rate)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: market price of risk must be a ...

    The martingale check is relative to the size of :math:`\\Theta`.

    >>> tree = TwoPeriodTree([127 / 128, 1 / 128])
    >>> theta = TreeProcess([0.9, -114.3 + 2.56e-10], np.zeros((2, 2)))
    >>> zero = TreeProcess(np.zeros(2), np.zeros((2, 2)))
    >>> check_deflator(tree, 1.0, zero, theta, zero).martingale_gap < 1e-10
    True

    :param tree: a tree
    :param initial_price: :math:`S_0`
    :param market: :math:`X` of one asset
    :param theta: a martingale :math:`\\Theta` with increments below one
    :param rate: a predictable :math:`R` with increments above :math:`-1`
    :param atol: absolute tolerance of the martingale check
    :returns: a report
    """
    _check_inputs(tree, theta, rate)
    drift = compensator(tree, market)
    noise = market.add(drift.scale(-1.0))
    rate_tilde = TreeProcess(
        rate.first / (1 + rate.first), rate.second / (1 + rate.second)
    )
    theta_tilde = TreeProcess(
        (1 - rate_tilde.first) * theta.first,
        (1 - rate_tilde.second) * theta.second,
    )
    _, price_one, price_two = stoch_exp_values(market)
    _, deflator_one, deflator_two = stoch_exp_values(theta.scale(-1.0))
    _, bank_one, bank_two = stoch_exp_values(rate)
    gap = martingale_gap(
        tree,
        (
            initial_price,
            initial_price * price_one * deflator_one / bank_one,
            initial_price * price_two * deflator_two / bank_two,
        ),
    )
    tilde_rate_part = rate_tilde.add(bracket(drift, rate_tilde)).scale(-1.0)
    return DriftConditionReport(
        gap <= atol,
        gap,
        _largest(
            drift.add(rate.scale(-1.0)).add(
                compensator(tree, bracket(noise, theta)).scale(-1.0)
            )
        ),
        _largest(
            drift.add(tilde_rate_part).add(
                compensator(tree, bracket(noise, theta)).scale(-1.0)
            )
        ),
        _largest(
            drift.add(tilde_rate_part).add(
                compensator(tree, bracket(noise, theta_tilde)).scale(-1.0)
            )
        ),
    )
