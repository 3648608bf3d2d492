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
Deflator Solver
================

An equivalent local martingale deflator

.. math:: Z=\frac{\mathscr{E}\left(-\theta\cdot W-\psi*(p-q)\right)}
    {\exp\left(r\cdot\lambda\right)}

exists iff at every grid point

.. math:: \sigma\theta+\Gamma\rho=a-r\mathbb{1}

has a solution with :math:`\rho<1`, where :math:`\rho_j=\psi(x_j)`. The
same question has an equivalent form :math:`c_{mod}x=a-r\mathbb{1}`.

>>> from elmd_lab.linalg import solvable
>>> rng = np.random.default_rng(6)
>>> from elmd_lab.model import TimeGrid
>>> grid = TimeGrid.uniform(1.0, 1)
>>> agreements, gaps = [], []
>>> for _ in range(500):
...     assets = rng.integers(1, 4)
...     factors, marks = rng.integers(0, 3, size=2)
...     volatility = rng.normal(size=(assets, factors))
...     coefficients = rng.uniform(-0.9, 2.0, size=(assets, marks))
...     jumps = JumpMeasure(np.arange(marks) + 1.0,
...         rng.uniform(0.5, 2.0, marks))
...     rate = rng.uniform(0.0, 0.05)
...     drift = rate + np.hstack([volatility, coefficients]) @ rng.normal(
...         size=factors + marks)
...     if rng.uniform() < 0.5:
...         drift = rng.normal(size=assets)
...     spec = MarketSpec.constant(grid, np.ones(assets), drift, volatility,
...         coefficients, jumps)
...     direct, _ = solvable(
...         np.hstack([volatility, gamma_matrix(spec, 0)]), drift - rate)
...     agreements.append(direct == solvable(
...         build_mod_char(spec, 0).modified, drift - rate)[0])
...     if direct:
...         try:
...             entry = solve_mpr(spec, 0, SolvePolicy(FixedRate(rate)))
...         except MarginViolatedError:
...             continue
...         gaps.append(np.linalg.norm(
...             drift_residual(spec, DeflatorSpec.from_entries([entry]), 0)
...         ) / (1 + np.linalg.norm(drift)))
>>> sum(agreements)
500
>>> bool(max(gaps) <= DEFAULT_TOLERANCES.feasibility_rel_tol)
True

A lower short rate needs a higher market price of risk.

>>> spec = MarketSpec.constant(grid, [1.0], [0.1], [[0.2]])
>>> thetas = [
...     solve_mpr(spec, 0, SolvePolicy(FixedRate(rate))).market_price_of_risk
...     for rate in (0.0, 0.01, 0.02, 0.03, 0.04, 0.05)
... ]
>>> bool(np.all(np.diff(np.ravel(thetas)) < 0))
True
"""
import dataclasses
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from elmd_lab.linalg import (
    DEFAULT_TOLERANCES,
    Tolerances,
    least_norm,
    rank,
    solvable,
)
from elmd_lab.model import (
    JumpMeasure,
    MarketSpec,
    ModifiedCharacteristics,
    build_mod_char,
    gamma_matrix,
)
from elmd_lab.utils import (
    ArrayLike,
    DomainError,
    InfeasibleSystemError,
    InvalidInputError,
    MarginViolatedError,
    as_finite_array,
    as_vector,
)

logger = logging.getLogger(__name__)
NO_ARBITRAGE_LABEL = "NUPBR, NAA1, NA1"


@dataclass(frozen=True)
class FixedRate:
    """
    Fix the short rate and look for the least norm risk premia.

    :param rate: the short rate :math:`r`
    :param jump_premium: if given, the jump risk premium :math:`\\rho` is
        fixed too and only :math:`\\theta` is solved for
    """

    rate: float
    jump_premium: Optional[Tuple[float, ...]] = None


@dataclass(frozen=True)
class MinNorm:
    """Look for the least norm :math:`(\\theta,\\rho,r)` jointly."""


@dataclass(frozen=True)
class SolvePolicy:
    """
    How to choose one deflator among many.

    >>> SolvePolicy(feasibility_margin=0.0)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: feasibility margin must be positive

    :param mode: :class:`FixedRate` or :class:`MinNorm`
    :param feasibility_margin: :math:`\\varepsilon` in
        :math:`\\rho\\leq1-\\varepsilon`
    :param tol: numerical tolerances
    """

    mode: Union[FixedRate, MinNorm] = MinNorm()
    feasibility_margin: float = 1e-6
    tol: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self):
        """Check the margin."""
        if not self.feasibility_margin > 0:
            raise InvalidInputError("feasibility margin must be positive")


@dataclass(frozen=True, eq=False)
class DeflatorEntry:
    """
    Deflator components at one grid point.

    :param market_price_of_risk: :math:`\\theta\\in\\mathbb{R}^m`
    :param jump_premium: :math:`\\rho\\in\\mathbb{R}^n`
    :param rate: :math:`r`
    """

    market_price_of_risk: np.ndarray
    jump_premium: np.ndarray
    rate: float


@dataclass(frozen=True, eq=False)
class DeflatorSpec:
    """
    Deflator components on a time grid.

    >>> defl = DeflatorSpec.constant(2, [0.4], [], 0.02)
    >>> defl.market_price_of_risk.tolist(), defl.rate.tolist()
    ([[0.4], [0.4]], [0.02, 0.02])
    >>> DeflatorSpec([[0.4]], np.zeros((2, 0)), [0.02, 0.02])
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: deflator arrays must have the same ...

    :param market_price_of_risk: :math:`\\theta(t_k)`, an :math:`N\\times m`
        array
    :param jump_premium: :math:`\\rho(t_k)`, an :math:`N\\times n` array
    :param rate: :math:`r(t_k)`, a vector of length :math:`N`
    """

    market_price_of_risk: np.ndarray
    jump_premium: np.ndarray
    rate: np.ndarray

    def __post_init__(self):
        """Validate shapes."""
        theta = as_finite_array(self.market_price_of_risk, 2, "theta")
        premium = as_finite_array(self.jump_premium, 2, "jump premium")
        rate = as_finite_array(self.rate, 1, "rate")
        if not theta.shape[0] == premium.shape[0] == rate.shape[0]:
            raise InvalidInputError(
                "deflator arrays must have the same number of steps"
            )
        for name, value in (
            ("market_price_of_risk", theta),
            ("jump_premium", premium),
            ("rate", rate),
        ):
            value.flags.writeable = False
            object.__setattr__(self, name, value)

    @property
    def steps(self) -> int:
        """Number of grid steps."""
        return self.rate.shape[0]

    @classmethod
    def constant(
        cls,
        steps: int,
        market_price_of_risk: ArrayLike,
        jump_premium: ArrayLike,
        rate: float,
    ) -> "DeflatorSpec":
        """
        Repeat the same components on every step.

        :param steps: number of grid steps
        :param market_price_of_risk: :math:`\\theta`
        :param jump_premium: :math:`\\rho`
        :param rate: :math:`r`
        :returns: a deflator specification
        """
        return cls(
            np.tile(np.asarray(market_price_of_risk, float), (steps, 1)),
            np.tile(np.asarray(jump_premium, float), (steps, 1)),
            np.full(steps, rate, dtype=float),
        )

    @classmethod
    def from_entries(cls, entries: Sequence[DeflatorEntry]) -> "DeflatorSpec":
        """
        Stack entries of consecutive grid points.

        :param entries: one entry per grid step
        :returns: a deflator specification
        """
        return cls(
            np.array([entry.market_price_of_risk for entry in entries]),
            np.array([entry.jump_premium for entry in entries]),
            np.array([entry.rate for entry in entries]),
        )

    def entry(self, index: int) -> DeflatorEntry:
        """
        Get components at one grid point.

        :param index: a grid index
        :returns: components at :math:`t_k`
        """
        return DeflatorEntry(
            self.market_price_of_risk[index],
            self.jump_premium[index],
            float(self.rate[index]),
        )


@dataclass(frozen=True)
class ExistenceCheck:
    """
    Solvability of :math:`c_{mod}x+r\\mathbb{1}=a`.

    :param feasible: whether a solution exists
    :param residual: :math:`\\|(I-MM^{\\dagger})a\\|` for
        :math:`M=(c_{mod},\\mathbb{1})`
    :param solution: the least norm :math:`x` if feasible
    :param rate: the least norm :math:`r` if feasible
    """

    feasible: bool
    residual: float
    solution: Optional[Tuple[float, ...]] = None
    rate: Optional[float] = None


@dataclass(frozen=True)
class GridPointReport:
    """
    What happened at one grid point.

    :param index: grid index :math:`k`
    :param time: :math:`t_k`
    :param feasible: whether the drift condition can be met
    :param residual: residual of the linear system
    :param kernel_dimension: degrees of freedom left in
        :math:`(\\theta,\\rho)`, the dimension of the kernel of
        :math:`(\\sigma,\\Gamma)`
    :param market_price_of_risk: chosen :math:`\\theta`
    :param jump_premium: chosen :math:`\\rho`
    :param rate: chosen :math:`r`
    :param margin_violations: marks where :math:`\\rho_j>1-\\varepsilon`
    """

    index: int
    time: float
    feasible: bool
    residual: float
    kernel_dimension: int
    market_price_of_risk: Tuple[float, ...] = ()
    jump_premium: Tuple[float, ...] = ()
    rate: Optional[float] = None
    margin_violations: Tuple[int, ...] = ()


@dataclass(frozen=True)
class SolveReport:
    """
    Outcome of solving on all grid points.

    :param points: one report per grid step
    :param feasible: whether a deflator exists on the whole grid
    :param label: no-arbitrage properties implied by a feasible verdict
    """

    points: Tuple[GridPointReport, ...]
    feasible: bool
    label: str = ""


def existence_check(
    chars: ModifiedCharacteristics, tol: Tolerances = DEFAULT_TOLERANCES
) -> ExistenceCheck:
    """
    Decide whether :math:`c_{mod}x=a-r\\mathbb{1}` has a solution.

    >>> chars = ModifiedCharacteristics(np.array([1.0, 1.0]), np.ones((2, 2)),
    ...     np.zeros((2, 2)), np.ones((2, 2)), None)
    >>> check = existence_check(chars)
    >>> check.feasible, np.round(check.solution, 12).tolist()
    (True, [0.333333333333, 0.333333333333])
    >>> chars = dataclasses.replace(chars, drift=np.array([1.0, 2.0]))
    >>> check = existence_check(chars)
    >>> check.feasible, round(check.residual, 6), check.solution
    (False, 0.707107, None)
    >>> chars = dataclasses.replace(chars, drift=np.zeros(2))
    >>> check = existence_check(chars)
    >>> check.feasible, check.solution, check.rate
    (True, (0.0, 0.0), 0.0)

    :param chars: modified characteristics at a grid point
    :param tol: numerical tolerances
    :returns: the verdict and the least norm witness :math:`(x,r)`
    """
    drift = np.asarray(chars.drift, dtype=np.float64)
    matrix = np.hstack([chars.modified, np.ones((drift.shape[0], 1))])
    feasible, residual = solvable(matrix, drift, tol)
    if not feasible:
        return ExistenceCheck(False, residual)
    witness = least_norm(matrix, drift, tol)
    return ExistenceCheck(
        True, residual, tuple(witness[:-1].tolist()), float(witness[-1])
    )


def _split(solution: np.ndarray, factors: int, rate: float) -> DeflatorEntry:
    return DeflatorEntry(solution[:factors], solution[factors:], rate)


def _candidate(
    spec: MarketSpec, index: int, policy: SolvePolicy
) -> DeflatorEntry:
    volatility = spec.volatility[spec.check_index(index)]
    gammas = gamma_matrix(spec, index)
    ones = np.ones((spec.assets, 1))
    mode = policy.mode
    if isinstance(mode, MinNorm):
        solution = least_norm(
            np.hstack([volatility, gammas, ones]),
            spec.drift[index],
            policy.tol,
        )
        return _split(solution[:-1], spec.factors, float(solution[-1]))
    target = spec.drift[index] - mode.rate
    if mode.jump_premium is None:
        solution = least_norm(
            np.hstack([volatility, gammas]), target, policy.tol
        )
        return _split(solution, spec.factors, mode.rate)
    premium = as_vector(mode.jump_premium, spec.jumps.size, "jump premium")
    theta = least_norm(volatility, target - gammas @ premium, policy.tol)
    return DeflatorEntry(theta, premium, mode.rate)


def _margin_violations(entry: DeflatorEntry, margin: float) -> Tuple[int, ...]:
    return tuple(
        int(mark) for mark in np.flatnonzero(entry.jump_premium > 1 - margin)
    )


def solve_mpr(
    spec: MarketSpec, index: int, policy: SolvePolicy = SolvePolicy()
) -> DeflatorEntry:
    """
    Find the market price of risk, the jump risk premium and the rate.

    >>> from elmd_lab.model import TimeGrid
    >>> grid = TimeGrid.uniform(1.0, 1)
    >>> spec = MarketSpec.constant(grid, [1.0], [0.1], [[0.2]])
    >>> round(float(solve_mpr(spec, 0, SolvePolicy(FixedRate(0.02))
    ...     ).market_price_of_risk[0]), 12)
    0.4
    >>> spec = MarketSpec.constant(grid, [1.0], [0.1], [[0.2]], [[1.0]],
    ...     JumpMeasure([1.0], [1.0]))
    >>> entry = solve_mpr(spec, 0, SolvePolicy(FixedRate(0.02)))
    >>> np.round(np.hstack([entry.market_price_of_risk, entry.jump_premium]),
    ...     6).tolist()
    [0.015385, 0.076923]
    >>> spec = MarketSpec.constant(grid, [1.0], [0.02], [[0.2]], [[1.0]],
    ...     JumpMeasure([1.0], [1.0]))
    >>> entry = solve_mpr(spec, 0, SolvePolicy(FixedRate(0.02)))
    >>> entry.market_price_of_risk.tolist(), entry.jump_premium.tolist()
    ([0.0], [0.0])
    >>> entry = solve_mpr(spec, 0, SolvePolicy(FixedRate(0.02, (0.5,))))
    >>> round(float(entry.market_price_of_risk[0]), 12)
    -2.5
    >>> solve_mpr(spec, 0, SolvePolicy(FixedRate(-2.0)))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.MarginViolatedError: ((0,), 'jump risk premium ...')
    >>> spec = MarketSpec.constant(grid, [1.0, 1.0], [1.0, 2.0],
    ...     [[1.0], [1.0]])
    >>> solve_mpr(spec, 0)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InfeasibleSystemError: (0.707..., 'no solution exists')

    :param spec: a market specification
    :param index: a grid index :math:`k`
    :param policy: how to choose among many solutions
    :returns: deflator components at :math:`t_k`
    :raises MarginViolatedError: if the jump risk premium comes too close to
        one
    :raises InfeasibleSystemError: if the drift condition has no solution
    """
    entry = _candidate(spec, index, policy)
    violations = _margin_violations(entry, policy.feasibility_margin)
    if violations:
        raise MarginViolatedError(
            violations,
            f"jump risk premium exceeds {1 - policy.feasibility_margin}",
        )
    return entry


def _check_compatible(spec: MarketSpec, defl: DeflatorSpec) -> None:
    expected = (spec.grid.steps, spec.factors, spec.jumps.size)
    actual = (
        defl.steps,
        defl.market_price_of_risk.shape[1],
        defl.jump_premium.shape[1],
    )
    if expected != actual:
        raise InvalidInputError(
            f"deflator has (steps, factors, marks) = {actual}, "
            f"market needs {expected}"
        )


def drift_residual(
    spec: MarketSpec, defl: DeflatorSpec, index: int
) -> np.ndarray:
    """
    Evaluate the drift condition at a grid point.

    It is :math:`a-r\\mathbb{1}-\\sigma\\theta-\\Gamma\\rho`.

    >>> from elmd_lab.model import TimeGrid
    >>> grid = TimeGrid.uniform(1.0, 1)
    >>> spec = MarketSpec.constant(grid, [1.0], [0.1], [[0.2]])
    >>> np.round(drift_residual(spec, DeflatorSpec.constant(1, [0.0], [],
    ...     0.02), 0), 12).tolist()
    [0.08]
    >>> spec = MarketSpec.constant(grid, [1.0], [0.1], [[0.4]])
    >>> bool(abs(drift_residual(spec, DeflatorSpec.constant(1, [0.2], [],
    ...     0.02), 0)[0]) < 1e-15)
    True

    :param spec: a market specification
    :param defl: a deflator specification
    :param index: a grid index :math:`k`
    :returns: a vector in :math:`\\mathbb{R}^d`, zero iff the drift
        condition holds
    """
    _check_compatible(spec, defl)
    return _entry_residual(spec, spec.check_index(index), defl.entry(index))


def _entry_residual(
    spec: MarketSpec, index: int, entry: DeflatorEntry
) -> np.ndarray:
    return (
        spec.drift[index]
        - entry.rate
        - spec.volatility[index] @ entry.market_price_of_risk
        - gamma_matrix(spec, index) @ entry.jump_premium
    )


def _check_premium(premium: np.ndarray) -> None:
    if np.any(premium >= 1):
        raise DomainError(
            f"jump risk premium must be below one, got {premium.max()}"
        )


def elmn_coefficients(
    defl: DeflatorSpec, jumps: JumpMeasure, index: int
) -> Tuple[float, np.ndarray, np.ndarray]:
    r"""
    Find the dynamics of the numeraire :math:`\bar{Z}=1/Z`.

    .. math:: \frac{d\bar{Z}}{\bar{Z}_-}=\left(r+\|\theta\|^2+
        \sum\limits_jc_j\frac{\rho_j^2}{1-\rho_j}\right)dt+\theta dW+
        \frac{\rho}{1-\rho}*(p-q)

    >>> jumps = JumpMeasure.empty()
    >>> elmn_coefficients(DeflatorSpec.constant(1, [0.0], [], 0.02), jumps, 0)
    (0.02, array([0.]), array([], dtype=float64))
    >>> drift, diffusion, _ = elmn_coefficients(
    ...     DeflatorSpec.constant(1, [0.4], [], 0.02), jumps, 0)
    >>> round(drift, 12), diffusion.tolist()
    (0.18, [0.4])
    >>> elmn_coefficients(DeflatorSpec.constant(1, [0.0], [0.5], 0.0),
    ...     JumpMeasure([1.0], [1.0]), 0)
    (0.5, array([0.]), array([1.]))
    >>> elmn_coefficients(DeflatorSpec.constant(1, [0.0], [1.0], 0.0),
    ...     JumpMeasure([1.0], [1.0]), 0)
    Traceback (most recent call last):
     ...
    elmd_lab.utils.DomainError: jump risk premium must be below one, got 1.0

    :param defl: a deflator specification
    :param jumps: the jump measure of the market
    :param index: a grid index :math:`k`
    :returns: drift, diffusion vector and jump coefficients per mark
    :raises InvalidInputError: if the numbers of marks don't match
    """
    entry = defl.entry(index)
    premium = entry.jump_premium
    if premium.shape[0] != jumps.size:
        raise InvalidInputError(
            f"deflator has {premium.shape[0]} marks, measure has {jumps.size}"
        )
    _check_premium(premium)
    jump = premium / (1 - premium)
    theta = np.array(entry.market_price_of_risk)
    drift = entry.rate + theta @ theta + jumps.intensities @ (premium * jump)
    return float(drift), theta, jump


@dataclass(frozen=True)
class GirsanovResult:
    """
    A market under the new measure.

    :param spec: the transformed market specification
    :param failed_points: grid indices where the drift condition fails
    """

    spec: MarketSpec
    failed_points: Tuple[int, ...] = ()

    @property
    def drift_condition_holds(self) -> bool:
        """Whether the new drift is the short rate at every grid point."""
        return not self.failed_points


def girsanov_transform(
    spec: MarketSpec, defl: DeflatorSpec, tol: Tolerances = DEFAULT_TOLERANCES
) -> GirsanovResult:
    """
    Describe the market under the measure with density :math:`D`.

    The drift becomes :math:`r\\mathbb{1}` and intensities become
    :math:`(1-\\rho_j)c_j`. Grid points where the drift condition fails are
    flagged and logged, the returned drift is not the rate there.

    >>> from elmd_lab.model import TimeGrid
    >>> grid = TimeGrid.uniform(1.0, 1)
    >>> spec = MarketSpec.constant(grid, [1.0], [0.1], [[0.2]], [[1.0]],
    ...     JumpMeasure([1.0], [2.0]))
    >>> result = girsanov_transform(spec, DeflatorSpec.constant(1, [0.0],
    ...     [0.5], -0.9))
    >>> result.spec.jumps.intensities.tolist(), result.spec.drift.tolist()
    ([1.0], [[-0.9]])
    >>> result.drift_condition_holds
    True
    >>> result = girsanov_transform(spec, DeflatorSpec.constant(1, [0.0],
    ...     [0.0], 0.02))
    >>> result.spec.jumps.intensities.tolist(), result.spec.drift.tolist()
    ([2.0], [[0.02]])
    >>> result.drift_condition_holds, result.failed_points
    (False, (0,))
    >>> spec = MarketSpec.constant(TimeGrid.uniform(1.0, 2), [1.0], [0.1],
    ...     [[0.2]], [[1.0]], JumpMeasure([1.0], [2.0]))
    >>> girsanov_transform(spec, DeflatorSpec([[0.0], [0.0]], [[0.5], [0.1]],
    ...     [0.0, 0.0]))
    Traceback (most recent call last):
     ...
    elmd_lab.utils.InvalidInputError: jump risk premium must be constant ...

    After a solved deflator the short rate alone explains the new drift,
    so :math:`(x,r')=(0,r)` solves the transformed existence problem.

    >>> from elmd_lab.presets import black_scholes, bs_poisson
    >>> grid = TimeGrid.uniform(1.0, 2)
    >>> policy = SolvePolicy(FixedRate(0.02))
    >>> for market in (black_scholes(grid), bs_poisson(grid)):
    ...     defl = DeflatorSpec.from_entries([
    ...         solve_mpr(market, index, policy) for index in range(2)])
    ...     result = girsanov_transform(market, defl)
    ...     new = result.spec
    ...     zero = DeflatorSpec.constant(2, np.zeros(new.factors),
    ...         np.zeros(new.jumps.size), 0.02)
    ...     print(
    ...         result.drift_condition_holds,
    ...         new.drift.tolist(),
    ...         bool(np.array_equal(new.volatility, market.volatility)),
    ...         np.round(new.jumps.intensities, 6).tolist(),
    ...         [existence_check(build_mod_char(new, index)).feasible
    ...             for index in range(2)],
    ...         [drift_residual(new, zero, index).tolist()
    ...             for index in range(2)],
    ...     )
    True [[0.02], [0.02]] True [] [True, True] [[0.0], [0.0]]
    True [[0.02], [0.02]] True [0.923077] [True, True] [[0.0], [0.0]]

    :param spec: a market specification
    :param defl: a deflator specification
    :param tol: ``feasibility_rel_tol`` is used to check the drift condition
    :returns: the new market specification and grid points where the drift
        condition fails
    :raises InvalidInputError: if the jump risk premium changes in time
    """
    _check_compatible(spec, defl)
    premium = defl.jump_premium
    _check_premium(premium)
    if np.any(premium != premium[0]):
        raise InvalidInputError(
            "jump risk premium must be constant in time to thin "
            "a time-homogeneous jump measure"
        )
    failures = tuple(
        index
        for index in range(spec.grid.steps)
        if np.linalg.norm(drift_residual(spec, defl, index))
        > tol.feasibility_rel_tol * (1 + np.linalg.norm(spec.drift[index]))
    )
    if failures:
        logger.warning(
            "drift condition fails at %d grid points, first at t=%s",
            len(failures),
            spec.grid.times[failures[0]],
        )
    return GirsanovResult(
        dataclasses.replace(
            spec,
            drift=np.repeat(defl.rate[:, np.newaxis], spec.assets, axis=1),
            jumps=JumpMeasure(
                spec.jumps.marks, (1 - premium[0]) * spec.jumps.intensities
            ),
        ),
        failures,
    )


def deflator_from_witness(
    spec: MarketSpec, index: int, solution: ArrayLike, rate: float
) -> DeflatorEntry:
    """
    Turn a solution of :math:`c_{mod}x=a-r\\mathbb{1}` into risk premia.

    With :math:`\\theta=\\sigma^Tx` and :math:`\\rho=\\gamma^Tx` one has
    :math:`\\sigma\\theta+\\Gamma\\rho=c_{mod}x`.

    >>> from elmd_lab.model import TimeGrid
    >>> grid = TimeGrid.uniform(1.0, 1)
    >>> spec = MarketSpec.constant(grid, [1.0], [0.1], [[0.2]], [[1.0]],
    ...     JumpMeasure([1.0], [1.0]))
    >>> entry = deflator_from_witness(spec, 0, [0.08 / 1.04], 0.02)
    >>> np.round(np.hstack([entry.market_price_of_risk, entry.jump_premium]),
    ...     6).tolist()
    [0.015385, 0.076923]

    :param spec: a market specification
    :param index: a grid index :math:`k`
    :param solution: :math:`x\\in\\mathbb{R}^d`
    :param rate: :math:`r`
    :returns: deflator components at :math:`t_k`
    """
    vector = as_vector(solution, spec.assets, "x")
    return DeflatorEntry(
        spec.volatility[spec.check_index(index)].T @ vector,
        spec.jump_coefficients[index].T @ vector,
        float(rate),
    )


def _point_report(
    spec: MarketSpec,
    index: int,
    entry: DeflatorEntry,
    policy: SolvePolicy,
) -> GridPointReport:
    violations = _margin_violations(entry, policy.feasibility_margin)
    if violations:
        logger.warning(
            "jump risk premium too close to one at t=%s for marks %s",
            spec.grid.times[index],
            violations,
        )
    residual = _entry_residual(spec, index, entry)
    return GridPointReport(
        index,
        float(spec.grid.times[index]),
        True,
        float(np.linalg.norm(residual)),
        _kernel_dimension(spec, index, policy.tol),
        tuple(entry.market_price_of_risk.tolist()),
        tuple(entry.jump_premium.tolist()),
        entry.rate,
        violations,
    )


def _kernel_dimension(spec: MarketSpec, index: int, tol: Tolerances) -> int:
    matrix = np.hstack([spec.volatility[index], gamma_matrix(spec, index)])
    return matrix.shape[1] - rank(matrix, tol)


def _infeasible_report(
    spec: MarketSpec, index: int, residual: float, tol: Tolerances
) -> GridPointReport:
    logger.warning(
        "no deflator at t=%s, residual %s", spec.grid.times[index], residual
    )
    return GridPointReport(
        index,
        float(spec.grid.times[index]),
        False,
        residual,
        _kernel_dimension(spec, index, tol),
    )


def _summarise(points: List[GridPointReport]) -> SolveReport:
    feasible = all(
        point.feasible and not point.margin_violations for point in points
    )
    logger.info(
        "%d of %d grid points feasible", sum(p.feasible for p in points),
        len(points),
    )
    return SolveReport(
        tuple(points), feasible, NO_ARBITRAGE_LABEL if feasible else ""
    )


def solve_grid(
    spec: MarketSpec, policy: SolvePolicy = SolvePolicy()
) -> Tuple[Optional[DeflatorSpec], SolveReport]:
    """
    Solve for deflator components on every grid point.

    >>> from elmd_lab.model import TimeGrid
    >>> spec = MarketSpec.constant(TimeGrid.uniform(1.0, 2), [1.0], [0.1],
    ...     [[0.2]])
    >>> defl, report = solve_grid(spec, SolvePolicy(FixedRate(0.02)))
    >>> np.round(defl.market_price_of_risk, 12).tolist()
    [[0.4], [0.4]]
    >>> report.feasible, report.label, report.points[0].kernel_dimension
    (True, 'NUPBR, NAA1, NA1', 0)
    >>> spec = MarketSpec.constant(TimeGrid.uniform(1.0, 2), [1.0, 1.0],
    ...     [1.0, 2.0], [[1.0], [1.0]])
    >>> defl, report = solve_grid(spec)
    >>> defl, report.feasible, report.label, report.points[1].feasible
    (None, False, '', False)

    :param spec: a market specification
    :param policy: how to choose among many solutions
    :returns: deflator components (``None`` unless feasible everywhere) and
        a report
    """
    points, entries = [], []
    for index in range(spec.grid.steps):
        try:
            entry = _candidate(spec, index, policy)
        except InfeasibleSystemError as error:
            points.append(
                _infeasible_report(spec, index, error.residual, policy.tol)
            )
            continue
        entries.append(entry)
        points.append(_point_report(spec, index, entry, policy))
    report = _summarise(points)
    if not report.feasible:
        return None, report
    return DeflatorSpec.from_entries(entries), report


def analyze_grid(
    spec: MarketSpec, policy: SolvePolicy = SolvePolicy()
) -> SolveReport:
    """
    Check existence on every grid point through :math:`c_{mod}`.

    Chosen components come from :func:`deflator_from_witness`.

    >>> from elmd_lab.presets import pure_diffusion
    >>> from elmd_lab.model import TimeGrid
    >>> grid = TimeGrid.uniform(1.0, 1)
    >>> analyze_grid(pure_diffusion(grid, [1.0, 1.0], 1.0, [1.0, 1.0])
    ...     ).feasible
    True
    >>> report = analyze_grid(pure_diffusion(grid, [1.0, 2.0], 1.0,
    ...     [1.0, 1.0]))
    >>> report.feasible, report.points[0].residual > 0.1
    (False, True)

    :param spec: a market specification
    :param policy: only ``feasibility_margin`` and ``tol`` are used
    :returns: a report
    """
    points = []
    for index in range(spec.grid.steps):
        check = existence_check(build_mod_char(spec, index), policy.tol)
        if check.solution is None or check.rate is None:
            points.append(
                _infeasible_report(spec, index, check.residual, policy.tol)
            )
            continue
        entry = deflator_from_witness(
            spec, index, check.solution, check.rate
        )
        points.append(_point_report(spec, index, entry, policy))
    return _summarise(points)
