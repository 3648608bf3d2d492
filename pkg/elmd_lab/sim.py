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
Path Simulation
================

Coefficients are constant on each grid step, so every process is stepped
exactly through its stochastic exponential:

.. math:: \frac{S^i_{t_{k+1}}}{S^i_{t_k}}=\exp\left(\sigma^i\Delta W+
    \left(a^i-\sum\limits_jc_j\gamma^i_j-\frac{\|\sigma^i\|^2}{2}\right)
    \Delta t\right)\prod\limits_j\left(1+\gamma^i_j\right)^{\Delta N^j}

Each path has its own random stream derived from the master seed and the
path index, so paths don't depend on each other or on the number of paths.

>>> spec = MarketSpec.constant(TimeGrid.uniform(1.0, 4), [1.0], [0.1],
...     [[0.2]], [[1.0]], JumpMeasure([1.0], [1.0]))
>>> bundle = simulate_market(spec, SimConfig(50, seed=2))
>>> again = simulate_market(spec, SimConfig(50, seed=2))
>>> bool(np.array_equal(bundle.prices, again.prices))
True
>>> bundle = simulate_elmn(
...     DeflatorSpec.constant(4, [0.2], [0.4], 0.02),
...     simulate_deflator(
...         DeflatorSpec.constant(4, [0.2], [0.4], 0.02), bundle
...     ),
... )
>>> bool(np.abs(bundle.numeraire * bundle.deflator - 1).max() <= 1e-10)
True
>>> all(bool(np.all(value > 0)) for value in (bundle.prices,
...     bundle.density, bundle.savings, bundle.deflator, bundle.numeraire))
True
"""
import csv
import dataclasses
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from elmd_lab.model import JumpMeasure, MarketSpec, TimeGrid
from elmd_lab.presets import HestonParams
from elmd_lab.solver import DeflatorSpec, elmn_coefficients
from elmd_lab.utils import DomainError, InvalidInputError

logger = logging.getLogger(__name__)
PROCESSES = ("S", "D", "B", "Z", "Zbar", "v")
Deflators = Union[DeflatorSpec, Sequence[DeflatorSpec]]


@dataclass(frozen=True)
class SimConfig:
    """
    Simulation settings.

    >>> SimConfig(0)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: number of paths must be positive, got 0
    >>> SimConfig(1, record=("S", "W"))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: unknown process W, expected one of ...

    :param paths: number of paths
    :param seed: master seed
    :param grid: if given, must coincide with the grid of the market
    :param record: processes written by :func:`dump_paths`
    """

    paths: int
    seed: int = 0
    grid: Optional[TimeGrid] = None
    record: Tuple[str, ...] = ("S", "Z")

    def __post_init__(self):
        """Validate settings."""
        if self.paths < 1:
            raise InvalidInputError(
                f"number of paths must be positive, got {self.paths}"
            )
        for process in self.record:
            if process not in PROCESSES:
                raise InvalidInputError(
                    f"unknown process {process}, expected one of {PROCESSES}"
                )


@dataclass(frozen=True, eq=False)
class PathBundle:
    """
    Simulated paths.

    Arrays have paths along the first axis and time along the second.

    :param times: grid times
    :param noise: Wiener increments, :math:`P\\times N\\times m`
    :param counts: jump counts per mark, :math:`P\\times N\\times n`
    :param jumps: the jump measure of the market
    :param prices: :math:`S`, :math:`P\\times(N+1)\\times d`
    :param record: processes written by :func:`dump_paths`
    :param variance: Heston variance, :math:`P\\times(N+1)`
    :param volatility: pathwise Heston volatility, :math:`P\\times N`
    :param clamped: number of path steps with variance below the floor
    :param density: :math:`D`, :math:`P\\times(N+1)`
    :param savings: :math:`B`, :math:`P\\times(N+1)`
    :param deflator: :math:`Z=D/B`, :math:`P\\times(N+1)`
    :param numeraire: :math:`\\bar{Z}`, :math:`P\\times(N+1)`
    :param market_price_of_risk: :math:`\\theta`, :math:`P\\times N\\times m`
    :param jump_premium: :math:`\\rho`, :math:`P\\times N\\times n`
    """

    times: np.ndarray
    noise: np.ndarray
    counts: np.ndarray
    jumps: JumpMeasure
    prices: np.ndarray
    record: Tuple[str, ...] = ("S", "Z")
    variance: Optional[np.ndarray] = None
    volatility: Optional[np.ndarray] = None
    clamped: int = 0
    density: Optional[np.ndarray] = None
    savings: Optional[np.ndarray] = None
    deflator: Optional[np.ndarray] = None
    numeraire: Optional[np.ndarray] = None
    market_price_of_risk: Optional[np.ndarray] = None
    jump_premium: Optional[np.ndarray] = None

    def __post_init__(self):
        """Make arrays read-only."""
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if isinstance(value, np.ndarray) and value.flags.writeable:
                value.flags.writeable = False

    @property
    def paths(self) -> int:
        """Number of paths."""
        return self.noise.shape[0]

    @property
    def steps(self) -> int:
        """Number of grid steps."""
        return self.noise.shape[1]

    @property
    def increments(self) -> np.ndarray:
        """Grid step lengths."""
        return np.diff(self.times)

    @property
    def density_weights(self) -> np.ndarray:
        """
        Girsanov density :math:`D_T` of every path.

        :raises InvalidInputError: if the deflator is not simulated
        """
        if self.density is None:
            raise InvalidInputError("the deflator is not simulated")
        return self.density[:, -1]

    @property
    def clamp_frequency(self) -> Optional[float]:
        """Share of path steps with clamped variance."""
        if self.variance is None:
            return None
        return self.clamped / (self.paths * self.steps)


def path_generator(seed: int, index: int) -> np.random.Generator:
    """
    Create the random stream of one path.

    >>> path_generator(1, 5).normal() == path_generator(1, 5).normal()
    True
    >>> path_generator(1, 5).normal() == path_generator(1, 6).normal()
    False

    :param seed: master seed
    :param index: path index
    :returns: a generator which depends only on the seed and the index
    """
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    )


def _draw(
    spec: MarketSpec, cfg: SimConfig, variance_noise: bool
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    steps = spec.grid.steps
    root = np.sqrt(spec.grid.increments)
    noise = np.empty((cfg.paths, steps, spec.factors))
    counts = np.empty((cfg.paths, steps, spec.jumps.size), dtype=np.int64)
    other = np.zeros((cfg.paths, steps))
    rates = np.outer(spec.grid.increments, spec.jumps.intensities)
    for path in range(cfg.paths):
        rng = path_generator(cfg.seed, path)
        noise[path] = (
            rng.standard_normal((steps, spec.factors)) * root[:, np.newaxis]
        )
        counts[path] = rng.poisson(rates)
        if variance_noise:
            other[path] = rng.standard_normal(steps) * root
    return noise, counts, other


def _exp_cumulative(log_steps: np.ndarray) -> np.ndarray:
    start = np.zeros_like(log_steps[:, :1])
    return np.exp(
        np.concatenate([start, np.cumsum(log_steps, axis=1)], axis=1)
    )


def simulate_variance(
    params: HestonParams,
    grid: TimeGrid,
    asset_noise: np.ndarray,
    other_noise: np.ndarray,
) -> Tuple[np.ndarray, int]:
    """
    Simulate the Heston variance with the full truncation scheme.

    The variance is driven by
    :math:`\\tilde{W}=\\varrho W+\\sqrt{1-\\varrho^2}W^{\\perp}`.

    >>> variance, clamped = simulate_variance(
    ...     HestonParams(2.0, 0.04, 0.0, 0.04), TimeGrid.uniform(1.0, 4),
    ...     np.zeros((2, 4)), np.zeros((2, 4)))
    >>> bool(np.allclose(variance, 0.04)), clamped
    (True, 0)
    >>> variance, clamped = simulate_variance(
    ...     HestonParams(2.0, 0.04, 0.0, 1e-9), TimeGrid.uniform(1.0, 4),
    ...     np.zeros((1, 4)), np.zeros((1, 4)))
    >>> clamped
    1

    :param params: variance parameters
    :param grid: a time grid
    :param asset_noise: increments of :math:`W`, :math:`P\\times N`
    :param other_noise: increments of :math:`W^{\\perp}`, :math:`P\\times N`
    :returns: variance :math:`P\\times(N+1)` and the number of path steps
        which variance is below the floor
    """
    driver = (
        params.correlation * asset_noise
        + np.sqrt(1 - params.correlation**2) * other_noise
    )
    variance = np.empty((driver.shape[0], grid.steps + 1))
    variance[:, 0] = params.initial_variance
    for index, step in enumerate(grid.increments):
        positive = np.maximum(variance[:, index], 0.0)
        variance[:, index + 1] = (
            variance[:, index]
            + params.mean_reversion
            * (params.long_run_variance - positive)
            * step
            + params.vol_of_variance * np.sqrt(positive) * driver[:, index]
        )
    clamped = int(np.count_nonzero(variance[:, :-1] < params.variance_floor))
    return variance, clamped


def simulate_market(
    spec: MarketSpec, cfg: SimConfig, heston: Optional[HestonParams] = None
) -> PathBundle:
    """
    Simulate asset prices.

    >>> spec = MarketSpec.constant(TimeGrid.uniform(1.0, 4), [1.0], [0.1],
    ...     [[0.0]])
    >>> bundle = simulate_market(spec, SimConfig(3))
    >>> bool(np.allclose(bundle.prices[:, :, 0], np.exp(0.1 * bundle.times)))
    True
    >>> spec = MarketSpec.constant(TimeGrid.uniform(1.0, 4), [1.0], [0.0],
    ...     [[0.0]])
    >>> bool(np.all(simulate_market(spec, SimConfig(3)).prices == 1.0))
    True
    >>> simulate_market(spec, SimConfig(3, grid=TimeGrid.uniform(1.0, 2)))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: simulation grid differs from ...

    :param spec: a market specification
    :param cfg: simulation settings
    :param heston: if given, volatility is :math:`\\sqrt{v_t}` of a
        simulated variance process
    :returns: a bundle of paths
    :raises InvalidInputError: if settings don't match the market
    """
    if cfg.grid is not None and not np.array_equal(
        cfg.grid.times, spec.grid.times
    ):
        raise InvalidInputError("simulation grid differs from the market grid")
    if heston is not None and (spec.assets, spec.factors) != (1, 1):
        raise InvalidInputError(
            "the Heston model has one asset and one factor"
        )
    noise, counts, other = _draw(spec, cfg, heston is not None)
    variance, volatility, clamped = None, None, 0
    paths_volatility = spec.volatility[np.newaxis]
    if heston is not None:
        variance, clamped = simulate_variance(
            heston, spec.grid, noise[:, :, 0], other
        )
        volatility = np.sqrt(
            np.maximum(variance[:, :-1], heston.variance_floor)
        )
        paths_volatility = volatility[:, :, np.newaxis, np.newaxis]
        if clamped:
            logger.warning(
                "variance clamped at %d of %d path steps",
                clamped,
                noise.shape[0] * spec.grid.steps,
            )
    step = spec.grid.increments[:, np.newaxis]
    log_steps = (
        (paths_volatility @ noise[..., np.newaxis])[..., 0]
        + (spec.drift - spec.jump_coefficients @ spec.jumps.intensities)
        * step
        - np.sum(paths_volatility**2, axis=-1) / 2 * step
        + (np.log1p(spec.jump_coefficients) @ counts[..., np.newaxis])[
            ..., 0
        ]
    )
    logger.info(
        "simulated %d paths of %d steps", cfg.paths, spec.grid.steps
    )
    return PathBundle(
        np.array(spec.grid.times),
        noise,
        counts,
        spec.jumps,
        spec.initial_prices * _exp_cumulative(log_steps),
        cfg.record,
        variance,
        volatility,
        clamped,
    )


def _deflator_list(defl: Deflators, bundle: PathBundle) -> List[DeflatorSpec]:
    specs = [defl] if isinstance(defl, DeflatorSpec) else list(defl)
    if len(specs) not in {1, bundle.paths}:
        raise InvalidInputError(
            f"expected one deflator or {bundle.paths}, got {len(specs)}"
        )
    for spec in specs:
        shape = (
            spec.steps,
            spec.market_price_of_risk.shape[1],
            spec.jump_premium.shape[1],
        )
        if shape != (bundle.steps,) + bundle.noise.shape[2:] + (
            bundle.jumps.size,
        ):
            raise InvalidInputError(
                f"deflator with (steps, factors, marks) = {shape} doesn't "
                "match the driving noise"
            )
    return specs


def simulate_deflator(defl: Deflators, bundle: PathBundle) -> PathBundle:
    """
    Simulate :math:`D`, :math:`B` and :math:`Z=D/B` on the same noise.

    .. math:: \\frac{D_{t_{k+1}}}{D_{t_k}}=\\exp\\left(-\\theta\\Delta W-
        \\frac{\\|\\theta\\|^2}{2}\\Delta t+\\sum\\limits_jc_j\\rho_j
        \\Delta t\\right)\\prod\\limits_j\\left(1-\\rho_j\\right)^
        {\\Delta N^j}

    >>> spec = MarketSpec.constant(TimeGrid.uniform(1.0, 4), [1.0], [0.1],
    ...     [[0.2]], [[1.0]], JumpMeasure([1.0], [1.0]))
    >>> bundle = simulate_market(spec, SimConfig(20, seed=3))
    >>> flat = simulate_deflator(DeflatorSpec.constant(4, [0.0], [0.0], 0.0),
    ...     bundle)
    >>> bool(np.all(flat.deflator == 1.0))
    True
    >>> discounted = simulate_deflator(
    ...     DeflatorSpec.constant(4, [0.0], [0.0], 0.05), bundle)
    >>> bool(np.allclose(discounted.deflator, np.exp(-0.05 * bundle.times)))
    True
    >>> jumpy = simulate_deflator(DeflatorSpec.constant(4, [0.0], [0.5], 0.0),
    ...     bundle)
    >>> bool(np.allclose(jumpy.density[:, 1:] / jumpy.density[:, :-1],
    ...     np.exp(0.5 * 0.25) * 0.5 ** bundle.counts[:, :, 0]))
    True
    >>> simulate_deflator(DeflatorSpec.constant(4, [0.0], [1.0], 0.0), bundle)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.DomainError: jump risk premium must be below one, got 1.0
    >>> simulate_deflator(DeflatorSpec.constant(2, [0.0], [0.0], 0.0), bundle)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: deflator with (steps, factors, ...

    :param defl: one deflator for all paths or one per path
    :param bundle: simulated market
    :returns: a bundle with deflator processes
    :raises DomainError: if a jump risk premium is not below one
    """
    specs = _deflator_list(defl, bundle)
    theta = np.stack([spec.market_price_of_risk for spec in specs])
    premium = np.stack([spec.jump_premium for spec in specs])
    rate = np.stack([spec.rate for spec in specs])
    if np.any(premium >= 1):
        raise DomainError(
            f"jump risk premium must be below one, got {premium.max()}"
        )
    step = bundle.increments
    log_density = (
        -np.sum(theta * bundle.noise, axis=-1)
        - np.sum(theta**2, axis=-1) / 2 * step
        + premium @ bundle.jumps.intensities * step
        + np.sum(bundle.counts * np.log1p(-premium), axis=-1)
    )
    density = _exp_cumulative(log_density)
    savings = _exp_cumulative(
        np.broadcast_to(rate * step, (bundle.paths, bundle.steps))
    )
    return dataclasses.replace(
        bundle,
        density=density,
        savings=savings,
        deflator=density / savings,
        market_price_of_risk=np.broadcast_to(theta, bundle.noise.shape),
        jump_premium=np.broadcast_to(premium, bundle.counts.shape),
    )


def simulate_elmn(defl: Deflators, bundle: PathBundle) -> PathBundle:
    """
    Simulate the numeraire :math:`\\bar{Z}=1/Z` from its own dynamics.

    >>> spec = MarketSpec.constant(TimeGrid.uniform(1.0, 4), [1.0], [0.1],
    ...     [[0.2]], [[1.0]], JumpMeasure([1.0], [1.0]))
    >>> bundle = simulate_market(spec, SimConfig(20, seed=3))
    >>> flat = simulate_elmn(DeflatorSpec.constant(4, [0.0], [0.0], 0.0),
    ...     bundle)
    >>> bool(np.all(flat.numeraire == 1.0))
    True
    >>> growing = simulate_elmn(DeflatorSpec.constant(4, [0.0], [0.0], 0.05),
    ...     bundle)
    >>> bool(np.allclose(growing.numeraire, np.exp(0.05 * bundle.times)))
    True
    >>> jumpy = simulate_elmn(DeflatorSpec.constant(4, [0.0], [0.5], 0.0),
    ...     bundle)
    >>> bool(np.allclose(jumpy.numeraire[:, 1:] / jumpy.numeraire[:, :-1],
    ...     np.exp(-0.5 * 0.25) * 2.0 ** bundle.counts[:, :, 0]))
    True

    :param defl: one deflator for all paths or one per path
    :param bundle: simulated market
    :returns: a bundle with the numeraire
    """
    specs = _deflator_list(defl, bundle)
    coefficients = [
        [
            elmn_coefficients(spec, bundle.jumps, index)
            for index in range(bundle.steps)
        ]
        for spec in specs
    ]
    drift = np.array([[entry[0] for entry in row] for row in coefficients])
    diffusion = np.array(
        [[entry[1] for entry in row] for row in coefficients]
    ).reshape(len(specs), bundle.steps, bundle.noise.shape[2])
    jump = np.array(
        [[entry[2] for entry in row] for row in coefficients]
    ).reshape(len(specs), bundle.steps, bundle.jumps.size)
    step = bundle.increments
    log_numeraire = (
        (drift - np.sum(diffusion**2, axis=-1) / 2) * step
        + np.sum(diffusion * bundle.noise, axis=-1)
        - jump @ bundle.jumps.intensities * step
        + np.sum(bundle.counts * np.log1p(jump), axis=-1)
    )
    return dataclasses.replace(
        bundle,
        numeraire=_exp_cumulative(
            np.broadcast_to(log_numeraire, (bundle.paths, bundle.steps))
        ),
    )


def _pathwise_volatility(bundle: PathBundle) -> np.ndarray:
    if bundle.volatility is None:
        raise InvalidInputError("the bundle has no simulated variance")
    return bundle.volatility


def pathwise_spec(
    spec: MarketSpec, bundle: PathBundle, path: int
) -> MarketSpec:
    """
    Get the market seen along one Heston path.

    :param spec: a Heston market specification
    :param bundle: paths simulated with Heston parameters
    :param path: path index
    :returns: a market with volatility :math:`\\sqrt{v_{t_k}}`
    """
    volatility = _pathwise_volatility(bundle)
    return spec.with_volatility_path(
        volatility[path][:, np.newaxis, np.newaxis]
    )


def heston_deflators(
    spec: MarketSpec, bundle: PathBundle, rate: float
) -> List[DeflatorSpec]:
    """
    Find :math:`\\theta_t=(a-r)/\\sqrt{v_t}` along every path.

    >>> from elmd_lab.presets import heston
    >>> from elmd_lab.solver import drift_residual
    >>> params = HestonParams(2.0, 0.04, 0.3, initial_variance=0.04,
    ...     correlation=-0.5)
    >>> spec = heston(TimeGrid.uniform(1.0, 50), 0.1, params)
    >>> bundle = simulate_market(spec, SimConfig(100, seed=4), params)
    >>> deflators = heston_deflators(spec, bundle, 0.02)
    >>> bool(max(
    ...     float(np.abs(drift_residual(pathwise_spec(spec, bundle, path),
    ...         defl, index)).max())
    ...     for path, defl in enumerate(deflators)
    ...     for index in range(spec.grid.steps)
    ... ) <= 1e-10)
    True
    >>> heston_deflators(spec, simulate_market(spec, SimConfig(1)), 0.02)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: the bundle has no simulated variance

    :param spec: a Heston market specification
    :param bundle: paths simulated with Heston parameters
    :param rate: :math:`r`
    :returns: one deflator per path
    """
    theta = (spec.drift[:, 0] - rate) / _pathwise_volatility(bundle)
    no_marks = np.zeros((bundle.steps, 0))
    return [
        DeflatorSpec(
            row[:, np.newaxis], no_marks, np.full(bundle.steps, rate)
        )
        for row in theta
    ]


def _process_rows(bundle: PathBundle, process: str) -> Optional[np.ndarray]:
    return {
        "S": bundle.prices,
        "D": bundle.density,
        "B": bundle.savings,
        "Z": bundle.deflator,
        "Zbar": bundle.numeraire,
        "v": bundle.variance,
    }[process]


def dump_paths(bundle: PathBundle, stream: TextIO) -> None:
    """
    Write recorded processes as delimited text.

    Asset is empty for processes other than prices.

    >>> import io
    >>> spec = MarketSpec.constant(TimeGrid.uniform(1.0, 1), [1.0], [0.0],
    ...     [[0.0]])
    >>> stream = io.StringIO()
    >>> dump_paths(simulate_market(spec, SimConfig(1, record=("S",))), stream)
    >>> print(stream.getvalue(), end="")
    path,time,asset,value,process
    0,0,0,1,S
    0,1,0,1,S
    >>> dump_paths(simulate_market(spec, SimConfig(1)), stream)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: process Z is not simulated

    :param bundle: simulated paths
    :param stream: where to write
    :raises InvalidInputError: if a recorded process is not simulated
    """
    tables = []
    for process in bundle.record:
        values = _process_rows(bundle, process)
        if values is None:
            raise InvalidInputError(f"process {process} is not simulated")
        tables.append((process, values))
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("path", "time", "asset", "value", "process"))
    for path in range(bundle.paths):
        for index, time in enumerate(bundle.times):
            for process, values in tables:
                row = np.atleast_1d(values[path, index])
                assets = range(row.shape[0]) if values.ndim == 3 else [""]
                writer.writerows(
                    (path, f"{time:.17g}", asset, f"{value:.17g}", process)
                    for asset, value in zip(assets, row)
                )
