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
Monte Carlo Verification
=========================

Deflated prices :math:`S_tZ_t` must keep the mean :math:`S_0`. A check
passes if the sample mean is within ``k_sigma`` standard errors of its
target.

>>> from elmd_lab.presets import black_scholes, bs_poisson
>>> from elmd_lab.sim import simulate_deflator, simulate_elmn
>>> from elmd_lab.solver import FixedRate, SolvePolicy, solve_grid
>>> grid = TimeGrid.uniform(1.0, 2)
>>> for spec in (black_scholes(grid), bs_poisson(grid)):
...     defl, _ = solve_grid(spec, SolvePolicy(FixedRate(0.02)))
...     bundle = simulate_market(spec, SimConfig(100_000, seed=7))
...     bundle = simulate_elmn(defl, simulate_deflator(defl, bundle))
...     report = martingale_test(bundle, [0.5, 1.0])
...     print(report.passed, report.numeraire_gap <= 1e-10)
True True
True True

A deflator with a wrong short rate is rejected.

>>> bundle = simulate_deflator(DeflatorSpec.constant(2, [0.4], [], 0.0),
...     simulate_market(black_scholes(grid), SimConfig(100_000, seed=7)))
>>> report = martingale_test(bundle, [0.5, 1.0])
>>> report.passed, min(abs(check.z_score) for check in report.checks) > 10
(False, True)

A correct deflator fails rarely.

>>> spec = bs_poisson(TimeGrid.uniform(1.0, 1))
>>> defl, _ = solve_grid(spec, SolvePolicy(FixedRate(0.02)))
>>> failures = sum(
...     not martingale_test(simulate_deflator(defl, simulate_market(spec,
...         SimConfig(2000, seed=seed))), [1.0]).passed
...     for seed in range(20)
... )
>>> failures <= 2
True
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import sem

from elmd_lab.model import MarketSpec, TimeGrid
from elmd_lab.sim import PathBundle, SimConfig, simulate_market
from elmd_lab.solver import DeflatorSpec, girsanov_transform
from elmd_lab.utils import InvalidInputError

logger = logging.getLogger(__name__)
LOCAL_MARTINGALE_CAVEAT = (
    "An ELMD only needs S*Z to be a local martingale. A strict local "
    "martingale loses mean in time, so a failed mean check of such a model "
    "is expected and is not a defect of the deflator."
)


@dataclass(frozen=True)
class MeanCheck:
    """
    Comparison of a sample mean with its target.

    :param name: what is averaged
    :param time: a checkpoint
    :param target: the expected mean
    :param mean: the sample mean
    :param standard_error: standard error of the mean
    :param z_score: ``(mean - target) / standard_error``
    :param passed: whether ``|mean - target| <= k_sigma * standard_error``
    """

    name: str
    time: float
    target: float
    mean: float
    standard_error: float
    z_score: float
    passed: bool


@dataclass(frozen=True)
class MartingaleReport:
    """
    Mean checks of deflated prices.

    :param checks: one check per asset and checkpoint
    :param passed: whether all checks passed
    :param k_sigma: width of the acceptance band in standard errors
    :param caveat: what a failure does and doesn't mean
    :param clamp_frequency: share of clamped Heston variance steps
    :param numeraire_gap: :math:`\\max|\\bar{Z}_tZ_t-1|` if the numeraire
        was simulated
    """

    checks: Tuple[MeanCheck, ...]
    passed: bool
    k_sigma: float
    caveat: str = LOCAL_MARTINGALE_CAVEAT
    clamp_frequency: Optional[float] = None
    numeraire_gap: Optional[float] = None


@dataclass(frozen=True)
class GirsanovReport:
    """
    Mean checks of density-weighted processes.

    :param checks: all checks
    :param passed: whether all checks passed
    :param k_sigma: width of the acceptance band in standard errors
    """

    checks: Tuple[MeanCheck, ...]
    passed: bool
    k_sigma: float


def mean_check(
    name: str,
    time: float,
    samples: np.ndarray,
    target: float,
    k_sigma: float,
    extra_variance: float = 0.0,
) -> MeanCheck:
    """
    Compare a sample mean with a target.

    >>> mean_check("constant", 1.0, np.ones(10), 1.0, 4.0)
    MeanCheck(name='constant', time=1.0, target=1.0, mean=1.0,
    standard_error=0.0, z_score=0.0, passed=True)
    >>> check = mean_check("shifted", 1.0, np.array([1.0, 3.0]), 1.0, 0.5)
    >>> check.standard_error, check.z_score, check.passed
    (1.0, 1.0, False)
    >>> check = mean_check("array target", 1.0, np.array([1.0, 3.0]),
    ...     np.float64(1.0), 4.0)
    >>> type(check.target), type(check.z_score), type(check.z_score > 0.5)
    (<class 'float'>, <class 'float'>, <class 'bool'>)

    :param name: what is averaged
    :param time: a checkpoint
    :param samples: one value per path
    :param target: the expected mean
    :param k_sigma: width of the acceptance band in standard errors
    :param extra_variance: squared standard error of the target
    :returns: a check
    """
    mean = float(np.mean(samples))
    error = float(np.sqrt(sem(samples) ** 2 + extra_variance))
    target = float(target)
    gap = mean - target
    if error > 0:
        z_score = gap / error
    else:
        z_score = 0.0 if gap == 0 else float(np.copysign(np.inf, gap))
    return MeanCheck(
        name,
        float(time),
        target,
        mean,
        error,
        z_score,
        bool(abs(gap) <= k_sigma * error),
    )


def _indices(bundle: PathBundle, checkpoints: Sequence[float]) -> List[int]:
    grid = TimeGrid(bundle.times)
    return [grid.index_of(time) for time in checkpoints]


def _check_k_sigma(k_sigma: float) -> None:
    if not k_sigma > 0:
        raise InvalidInputError(f"k_sigma must be positive, got {k_sigma}")


def _log_failures(checks: Sequence[MeanCheck], label: str) -> bool:
    failed = [check for check in checks if not check.passed]
    for check in failed:
        logger.warning(
            "%s check %s fails at t=%s: z=%s",
            label,
            check.name,
            check.time,
            check.z_score,
        )
    logger.info(
        "%d of %d %s checks passed",
        len(checks) - len(failed),
        len(checks),
        label,
    )
    return not failed


def martingale_test(
    bundle: PathBundle,
    checkpoints: Sequence[float],
    k_sigma: float = 4.0,
) -> MartingaleReport:
    """
    Check that deflated prices keep their initial value on average.

    The same check of :math:`S/\\bar{Z}` is redundant since
    :math:`\\bar{Z}Z=1` on every path, ``numeraire_gap`` reports how exactly.

    >>> from elmd_lab.sim import simulate_deflator
    >>> spec = MarketSpec.constant(TimeGrid.uniform(1.0, 2), [2.0], [0.0],
    ...     [[0.0]])
    >>> bundle = simulate_deflator(DeflatorSpec.constant(2, [0.0], [], 0.0),
    ...     simulate_market(spec, SimConfig(10)))
    >>> report = martingale_test(bundle, [1.0])
    >>> report.passed, report.checks[0].z_score, report.numeraire_gap
    (True, 0.0, None)
    >>> martingale_test(bundle, [0.6])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: time 0.6 is not on the grid
    >>> martingale_test(simulate_market(spec, SimConfig(10)), [1.0])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: the deflator is not simulated

    :param bundle: paths with a simulated deflator
    :param checkpoints: grid times
    :param k_sigma: width of the acceptance band in standard errors
    :returns: a report
    :raises InvalidInputError: if the deflator is not simulated
    """
    _check_k_sigma(k_sigma)
    if bundle.deflator is None:
        raise InvalidInputError("the deflator is not simulated")
    checks = tuple(
        mean_check(
            f"S[{asset}]",
            bundle.times[index],
            bundle.prices[:, index, asset] * bundle.deflator[:, index],
            bundle.prices[0, 0, asset],
            k_sigma,
        )
        for index in _indices(bundle, checkpoints)
        for asset in range(bundle.prices.shape[2])
    )
    numeraire_gap = None
    if bundle.numeraire is not None:
        numeraire_gap = float(
            np.abs(bundle.numeraire * bundle.deflator - 1).max()
        )
    return MartingaleReport(
        checks,
        _log_failures(checks, "martingale"),
        k_sigma,
        clamp_frequency=bundle.clamp_frequency,
        numeraire_gap=numeraire_gap,
    )


def _shifted_noise(bundle: PathBundle) -> np.ndarray:
    shifted = (
        bundle.noise
        + bundle.market_price_of_risk * bundle.increments[:, np.newaxis]
    )
    return np.concatenate(
        [np.zeros_like(shifted[:, :1]), np.cumsum(shifted, axis=1)], axis=1
    )


def _compensated_counts(bundle: PathBundle) -> np.ndarray:
    thinned = (
        (1 - bundle.jump_premium)
        * bundle.jumps.intensities
        * bundle.increments[:, np.newaxis]
    )
    compensated = bundle.counts - thinned
    return np.concatenate(
        [np.zeros_like(compensated[:, :1]), np.cumsum(compensated, axis=1)],
        axis=1,
    )


def girsanov_test(
    bundle: PathBundle,
    checkpoints: Sequence[float],
    k_sigma: float = 4.0,
) -> GirsanovReport:
    """
    Check the density :math:`D` of the measure change.

    Under :math:`D\\cdot\\mathbb{P}` the process
    :math:`W'=W+\\theta\\cdot\\lambda` is a Wiener process and
    :math:`N^j-(1-\\rho_j)c_jt` are martingales, so their
    :math:`D`-weighted means vanish, and :math:`D` has mean one.

    >>> from elmd_lab.model import JumpMeasure
    >>> from elmd_lab.presets import black_scholes
    >>> from elmd_lab.sim import simulate_deflator
    >>> grid = TimeGrid.uniform(1.0, 2)
    >>> bundle = simulate_market(black_scholes(grid), SimConfig(100, seed=1))
    >>> flat = simulate_deflator(DeflatorSpec.constant(2, [0.0], [], 0.0),
    ...     bundle)
    >>> report = girsanov_test(flat, [1.0])
    >>> report.passed, report.checks[0].name, report.checks[0].z_score
    (True, 'D', 0.0)
    >>> bundle = simulate_market(black_scholes(grid),
    ...     SimConfig(100_000, seed=9))
    >>> girsanov_test(simulate_deflator(DeflatorSpec.constant(2, [0.4], [],
    ...     0.02), bundle), [0.5, 1.0]).passed
    True
    >>> spec = MarketSpec.constant(grid, [1.0], [0.1], [[0.2]], [[1.0]],
    ...     JumpMeasure([1.0], [2.0]))
    >>> bundle = simulate_deflator(DeflatorSpec.constant(2, [0.0], [0.5],
    ...     0.0), simulate_market(spec, SimConfig(100_000, seed=10)))
    >>> report = girsanov_test(bundle, [0.5, 1.0])
    >>> report.passed, [check.name for check in report.checks[:3]]
    (True, ['D', "W'[0]", 'N[0]'])

    :param bundle: paths with a simulated deflator
    :param checkpoints: grid times
    :param k_sigma: width of the acceptance band in standard errors
    :returns: a report
    :raises InvalidInputError: if the deflator is not simulated
    """
    _check_k_sigma(k_sigma)
    if (
        bundle.density is None
        or bundle.market_price_of_risk is None
        or bundle.jump_premium is None
    ):
        raise InvalidInputError("the deflator is not simulated")
    wiener = _shifted_noise(bundle)
    counts = _compensated_counts(bundle)
    checks = []
    for index in _indices(bundle, checkpoints):
        time = bundle.times[index]
        weights = bundle.density[:, index]
        checks.append(mean_check("D", time, weights, 1.0, k_sigma))
        checks.extend(
            mean_check(
                f"W'[{factor}]",
                time,
                weights * wiener[:, index, factor],
                0.0,
                k_sigma,
            )
            for factor in range(wiener.shape[2])
        )
        checks.extend(
            mean_check(
                f"N[{mark}]",
                time,
                weights * counts[:, index, mark],
                0.0,
                k_sigma,
            )
            for mark in range(counts.shape[2])
        )
    return GirsanovReport(
        tuple(checks), _log_failures(checks, "Girsanov"), k_sigma
    )


def coupling_test(
    spec: MarketSpec,
    defl: DeflatorSpec,
    bundle: PathBundle,
    cfg: SimConfig,
    checkpoints: Sequence[float],
    k_sigma: float = 4.0,
) -> GirsanovReport:
    """
    Compare :math:`D`-weighted prices with prices of the transformed market.

    The market from :func:`elmd_lab.solver.girsanov_transform` is simulated
    with ``cfg``, which should use another seed than ``bundle``.

    >>> from elmd_lab.presets import bs_poisson
    >>> from elmd_lab.sim import simulate_deflator
    >>> from elmd_lab.solver import FixedRate, SolvePolicy, solve_grid
    >>> spec = bs_poisson(TimeGrid.uniform(1.0, 2))
    >>> defl, _ = solve_grid(spec, SolvePolicy(FixedRate(0.02)))
    >>> bundle = simulate_deflator(defl, simulate_market(spec,
    ...     SimConfig(20_000, seed=11)))
    >>> report = coupling_test(spec, defl, bundle, SimConfig(20_000, seed=12),
    ...     [0.5, 1.0])
    >>> report.passed, report.checks[0].name
    (True, 'D*S[0]')

    :param spec: the market of ``bundle``
    :param defl: the deflator of ``bundle``
    :param bundle: paths with a simulated deflator
    :param cfg: settings for the transformed market
    :param checkpoints: grid times
    :param k_sigma: width of the acceptance band in standard errors
    :returns: a report
    :raises InvalidInputError: if the deflator is not simulated
    """
    _check_k_sigma(k_sigma)
    if bundle.density is None:
        raise InvalidInputError("the deflator is not simulated")
    transformed = simulate_market(girsanov_transform(spec, defl).spec, cfg)
    checks = []
    for index in _indices(bundle, checkpoints):
        for asset in range(spec.assets):
            other = transformed.prices[:, index, asset]
            checks.append(
                mean_check(
                    f"D*S[{asset}]",
                    bundle.times[index],
                    bundle.density[:, index] * bundle.prices[:, index, asset],
                    float(np.mean(other)),
                    k_sigma,
                    float(sem(other) ** 2),
                )
            )
    return GirsanovReport(
        tuple(checks), _log_failures(checks, "coupling"), k_sigma
    )
