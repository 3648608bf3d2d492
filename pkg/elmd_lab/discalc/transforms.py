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
Stochastic Exponentials of Pure-Jump Paths
===========================================

For a pure-jump path :math:`\mathscr{E}(X)=\prod\left(1+\Delta X\right)`,
so all the identities below hold up to floating point rounding.

>>> rng = np.random.default_rng(8)
>>> def random_path(low, high):
...     size = rng.integers(0, 51)
...     times = rng.choice(np.arange(1, 101), size, replace=False)
...     return PureJumpPath(np.sort(times) / 10, rng.uniform(low, high, size))
>>> def gap(one, two):
...     times = np.union1d(one.times, two.times)
...     return float(np.abs(
...         one.values_at(times) / two.values_at(times) - 1
...     ).max(initial=0.0))
>>> def jump_gap(one, two):
...     _, first, second = one.aligned(two)
...     return float(np.abs(first - second).max(initial=0.0) / (
...         1 + np.abs(second).max(initial=0.0)))
>>> gaps = {"yor": [], "inverse": [], "rate": [], "factorisation": [],
...     "tilde rate": [], "tilde mpr": []}
>>> for _ in range(1000):
...     one, two = random_path(-0.9, 5), random_path(-0.9, 5)
...     gaps["yor"].append(gap(
...         stoch_exp(one).product(stoch_exp(two)),
...         stoch_exp(yor_sum(one, two))))
...     gaps["inverse"].append(gap(
...         stoch_exp(one).product(stoch_exp(inv_stoch_exp(one))),
...         ExpPath.one()))
...     rate_tilde = rate_to_tilde(one)
...     gaps["rate"].append(max(
...         jump_gap(rate_from_tilde(rate_tilde), one),
...         gap(stoch_exp(one).product(stoch_exp(rate_tilde.negate())),
...             ExpPath.one())))
...     theta = random_path(-5, 0.9)
...     theta_tilde = mpr_to_tilde(theta, rate_tilde)
...     gaps["factorisation"].append(gap(
...         stoch_exp(theta.negate()).product(stoch_exp(one).reciprocal()),
...         stoch_exp(theta_tilde.add(rate_tilde).negate())))
...     gaps["tilde mpr"].append(jump_gap(
...         mpr_from_tilde(theta_tilde, rate_tilde), theta))
...     other_tilde = random_path(-5, 0.9)
...     gaps["tilde rate"].append(jump_gap(
...         rate_to_tilde(rate_from_tilde(other_tilde)), other_tilde))
>>> {name: max(values) <= 1e-12 for name, values in gaps.items()}
{'yor': True, 'inverse': True, 'rate': True, 'factorisation': True,
 'tilde rate': True, 'tilde mpr': True}

The tilde transformation keeps jumps of a deflator in its domain.

>>> in_domain = []
>>> for _ in range(1000):
...     rate_tilde, theta = random_path(-5, 0.9), random_path(-5, 0.9)
...     _, tilde_jumps, rate_jumps = mpr_to_tilde(theta, rate_tilde).aligned(
...         rate_tilde)
...     in_domain.append(bool(np.all(tilde_jumps + rate_jumps < 1)))
>>> all(in_domain)
True
"""
import numpy as np

from elmd_lab.discalc.paths import ExpPath, PureJumpPath
from elmd_lab.utils import DomainError


def _check_above(path: PureJumpPath, bound: float, name: str) -> None:
    if np.any(path.jumps <= bound):
        raise DomainError(
            f"jumps of {name} must exceed {bound}, got {path.jumps.min()}"
        )


def _check_below(jumps: np.ndarray, bound: float, name: str) -> None:
    if np.any(jumps >= bound):
        raise DomainError(
            f"jumps of {name} must be below {bound}, got {jumps.max()}"
        )


def stoch_exp(path: PureJumpPath) -> ExpPath:
    """
    Compute the stochastic exponential of a pure-jump path.

    >>> stoch_exp(PureJumpPath([1.0], [1.0])).value_at(1.0)
    2.0
    >>> stoch_exp(PureJumpPath([1.0, 2.0], [1.0, -0.5])).value_at(2.0)
    1.0
    >>> stoch_exp(PureJumpPath.empty()).value_at(10.0)
    1.0
    >>> stoch_exp(PureJumpPath([1.0], [-1.0]))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.DomainError: jumps of X must exceed -1, got -1.0

    :param path: :math:`X` with :math:`\\Delta X>-1`
    :returns: :math:`\\mathscr{E}(X)`
    """
    _check_above(path, -1, "X")
    return ExpPath(path.times, 1 + path.jumps)


def quad_cov(one: PureJumpPath, two: PureJumpPath) -> PureJumpPath:
    """
    Compute the quadratic covariation of two pure-jump paths.

    >>> quad_cov(PureJumpPath([1.0], [2.0]), PureJumpPath([2.0], [3.0])
    ...     ).jumps.tolist()
    []
    >>> quad_cov(PureJumpPath([1.0], [2.0]), PureJumpPath([1.0], [3.0])
    ...     ).jumps.tolist()
    [6.0]
    >>> path = PureJumpPath([1.0], [2.0])
    >>> quad_cov(path, path).jumps.tolist()
    [4.0]
    >>> quad_cov(PureJumpPath([1.0, 2.0], [2.0, 5.0]),
    ...     PureJumpPath([1.0], [3.0])).jumps.tolist()
    [6.0]

    :param one: :math:`X`
    :param two: :math:`Y`
    :returns: :math:`[X,Y]=\\sum\\Delta X\\Delta Y`
    """
    times = np.intersect1d(one.times, two.times)
    return PureJumpPath(times, one.jumps_on(times) * two.jumps_on(times))


def yor_sum(one: PureJumpPath, two: PureJumpPath) -> PureJumpPath:
    """
    Find the path which exponential is the product of two exponentials.

    :math:`\\mathscr{E}(X)\\mathscr{E}(Y)=\\mathscr{E}(X+Y+[X,Y])`

    >>> path = PureJumpPath([1.0], [1.0])
    >>> yor_sum(path, PureJumpPath.empty()).jumps.tolist()
    [1.0]
    >>> yor_sum(path, path).jumps.tolist()
    [3.0]
    >>> half = PureJumpPath([1.0], [0.5])
    >>> yor_sum(half, half.negate()).jumps.tolist()
    [-0.25]
    >>> yor_sum(PureJumpPath([1.0, 2.0], [2.0, 5.0]),
    ...     PureJumpPath([1.0], [3.0])).jumps.tolist()
    [11.0, 5.0]

    :param one: :math:`X`
    :param two: :math:`Y`
    :returns: :math:`X+Y+[X,Y]`
    """
    return PureJumpPath.merge(one, two, quad_cov(one, two))


def rate_to_tilde(rate: PureJumpPath) -> PureJumpPath:
    r"""
    Map a rate to the one which exponential inverts the savings account.

    It makes :math:`\mathscr{E}(-\widetilde{R})=\mathscr{E}(R)^{-1}` with

    .. math:: \Delta\widetilde{R}=\frac{\Delta R}{1+\Delta R}

    >>> rate_to_tilde(PureJumpPath([1.0], [1.0])).jumps.tolist()
    [0.5]
    >>> rate_to_tilde(PureJumpPath.empty()).jumps.tolist()
    []
    >>> rate_to_tilde(PureJumpPath([1.0], [-0.5])).jumps.tolist()
    [-1.0]

    :param rate: :math:`R` with :math:`\Delta R>-1`
    :returns: :math:`\widetilde{R}`
    """
    _check_above(rate, -1, "R")
    return PureJumpPath(rate.times, rate.jumps / (1 + rate.jumps))


def rate_from_tilde(rate_tilde: PureJumpPath) -> PureJumpPath:
    r"""
    Invert :func:`rate_to_tilde`.

    .. math:: \Delta R=\frac{\Delta\widetilde{R}}{1-\Delta\widetilde{R}}

    >>> rate_from_tilde(PureJumpPath([1.0], [0.5])).jumps.tolist()
    [1.0]
    >>> rate_from_tilde(PureJumpPath([1.0], [-1.0])).jumps.tolist()
    [-0.5]
    >>> rate_from_tilde(PureJumpPath([1.0], [1.0]))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.DomainError: jumps of R tilde must be below 1, got 1.0

    :param rate_tilde: :math:`\widetilde{R}` with
        :math:`\Delta\widetilde{R}<1`
    :returns: :math:`R`
    """
    _check_below(rate_tilde.jumps, 1, "R tilde")
    return PureJumpPath(
        rate_tilde.times, rate_tilde.jumps / (1 - rate_tilde.jumps)
    )


def mpr_to_tilde(
    theta: PureJumpPath, rate_tilde: PureJumpPath
) -> PureJumpPath:
    r"""
    Find :math:`\widetilde{\Theta}=\Theta-[\Theta,\widetilde{R}]`.

    Then
    :math:`\mathscr{E}(-\Theta)\mathscr{E}(R)^{-1}=
    \mathscr{E}(-\widetilde{\Theta}-\widetilde{R})`.

    >>> theta = PureJumpPath([1.0], [0.5])
    >>> mpr_to_tilde(theta, PureJumpPath.empty()).jumps.tolist()
    [0.5]
    >>> mpr_to_tilde(theta, PureJumpPath([1.0], [0.5])).jumps.tolist()
    [0.25]
    >>> mpr_to_tilde(PureJumpPath.empty(), theta).jumps.tolist()
    []
    >>> mpr_to_tilde(theta, PureJumpPath([0.5], [0.5])).jumps.tolist()
    [0.5]

    Rounding may push the result out of the domain of a deflator.

    >>> almost_one = PureJumpPath([1.0], [1 - 2 ** -53])
    >>> mpr_to_tilde(almost_one, almost_one)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.DomainError: jumps of Theta tilde + R tilde must be ...

    :param theta: :math:`\Theta` with :math:`\Delta\Theta<1`
    :param rate_tilde: :math:`\widetilde{R}` with
        :math:`\Delta\widetilde{R}<1`
    :returns: :math:`\widetilde{\Theta}` with
        :math:`\Delta\widetilde{\Theta}+\Delta\widetilde{R}<1`
    :raises DomainError: if jumps are out of range
    """
    _check_below(theta.jumps, 1, "Theta")
    _check_below(rate_tilde.jumps, 1, "R tilde")
    jumps = (1 - rate_tilde.jumps_on(theta.times)) * theta.jumps
    theta_tilde = PureJumpPath(theta.times, jumps)
    _, theta_jumps, rate_jumps = theta_tilde.aligned(rate_tilde)
    _check_below(theta_jumps + rate_jumps, 1, "Theta tilde + R tilde")
    return theta_tilde


def mpr_from_tilde(
    theta_tilde: PureJumpPath, rate_tilde: PureJumpPath
) -> PureJumpPath:
    r"""
    Invert :func:`mpr_to_tilde` for the same :math:`\widetilde{R}`.

    .. math:: \Delta\Theta=\frac{\Delta\widetilde{\Theta}}
        {1-\Delta\widetilde{R}}

    >>> mpr_from_tilde(PureJumpPath([1.0], [0.25]), PureJumpPath([1.0],
    ...     [0.5])).jumps.tolist()
    [0.5]
    >>> mpr_from_tilde(PureJumpPath.empty(), PureJumpPath([1.0], [0.5])
    ...     ).jumps.tolist()
    []
    >>> mpr_from_tilde(PureJumpPath([1.0], [0.5]), PureJumpPath([0.5],
    ...     [0.5])).jumps.tolist()
    [0.5]
    >>> mpr_from_tilde(PureJumpPath([1.0], [0.6]), PureJumpPath([1.0],
    ...     [0.5]))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.DomainError: jumps of Theta tilde + R tilde must be ...

    :param theta_tilde: :math:`\widetilde{\Theta}`
    :param rate_tilde: :math:`\widetilde{R}` with
        :math:`\Delta\widetilde{\Theta}+\Delta\widetilde{R}<1`
    :returns: :math:`\Theta`
    """
    _check_below(rate_tilde.jumps, 1, "R tilde")
    _, theta_jumps, rate_jumps = theta_tilde.aligned(rate_tilde)
    _check_below(theta_jumps + rate_jumps, 1, "Theta tilde + R tilde")
    jumps = theta_tilde.jumps / (1 - rate_tilde.jumps_on(theta_tilde.times))
    return PureJumpPath(theta_tilde.times, jumps)


def inv_stoch_exp(path: PureJumpPath) -> PureJumpPath:
    r"""
    Find :math:`Y` such that :math:`\mathscr{E}(X)\mathscr{E}(Y)=1`.

    .. math:: \Delta Y=-\Delta X+\frac{(\Delta X)^2}{1+\Delta X}=
        -\frac{\Delta X}{1+\Delta X}

    >>> inv_stoch_exp(PureJumpPath([1.0], [1.0])).jumps.tolist()
    [-0.5]
    >>> inv_stoch_exp(PureJumpPath.empty()).jumps.tolist()
    []
    >>> inv_stoch_exp(PureJumpPath([1.0], [-0.5])).jumps.tolist()
    [1.0]

    :param path: :math:`X` with :math:`\Delta X>-1`
    :returns: :math:`Y`
    """
    _check_above(path, -1, "X")
    return PureJumpPath(path.times, -path.jumps / (1 + path.jumps))


def savings_account(rate: PureJumpPath) -> ExpPath:
    """
    Compute :math:`B=\\mathscr{E}(R)` of a pure-jump rate path.

    >>> rate = PureJumpPath([1.0, 2.0], [0.25, 1.0])
    >>> savings_account(rate).product(stoch_exp(rate_to_tilde(rate).negate())
    ...     ).values_at([0.5, 1.0, 2.0]).tolist()
    [1.0, 1.0, 1.0]

    :param rate: :math:`R` with :math:`\\Delta R>-1`
    :returns: :math:`B` which satisfies
        :math:`B\\mathscr{E}(-\\widetilde{R})=1`
    """
    return stoch_exp(rate)
