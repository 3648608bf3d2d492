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
Run Configuration
==================

A run is described by one JSON document. Unknown keys are errors and every
error names the dotted path of the offending field.

>>> config = parse_config(example("black_scholes.json"))
>>> config.model.preset, config.model.black_scholes
('black_scholes', BlackScholesSection(drift=0.1, volatility=0.2, ...
initial_price=1.0))
>>> parse_config(serialize_config(config)) == config
True
>>> build_market(config).drift.ravel().tolist()
[0.1, 0.1]
>>> parse_config('{"model": {"preset": "black_scholes",\\n "black_scholes": '
...     '{"drift": 0.1, "initial_price": 1.0}}}')
Traceback (most recent call last):
 ...
elmd_lab.utils.ConfigValidationError: model.black_scholes.volatility: is ...
>>> parse_config('{"model": {"preset": "custom", "custom": {'
...     '"initial_prices": [1.0], "drift": [0.1], "volatility": [[0.2]], '
...     '"jump_coefficients": [[-1.0]], "marks": [1.0], '
...     '"intensities": [1.0]}}}')
Traceback (most recent call last):
 ...
elmd_lab.utils.ConfigValidationError: model.custom: jump coefficient must ...
>>> parse_config('{"model": {"preset": "black_scholes", "colour": 1}}')
Traceback (most recent call last):
 ...
elmd_lab.utils.ConfigValidationError: model.colour: unknown key
>>> parse_config('{\\n  "model": {\\n    "preset": black_scholes}}')
Traceback (most recent call last):
 ...
elmd_lab.utils.ConfigParseError: ... at line 3, column ...
"""
import dataclasses
import sys
from dataclasses import MISSING, dataclass, field
from typing import (
    Any,
    Dict,
    Optional,
    Tuple,
    Union,
    get_args,
    get_origin,
    get_type_hints,
)

import numpy as np
import orjson

from elmd_lab.model import JumpMeasure, MarketSpec, TimeGrid
from elmd_lab.presets import (
    HestonParams,
    black_scholes,
    bs_poisson,
    heston,
    lognormal_marks,
    merton_discretized,
)
from elmd_lab.sim import SimConfig
from elmd_lab.solver import DeflatorSpec, FixedRate, MinNorm, SolvePolicy
from elmd_lab.termstruct import BhFamily, HjmSurface, bh_synthesize
from elmd_lab.utils import (
    ConfigParseError,
    ConfigValidationError,
    InvalidInputError,
    as_finite_array,
    as_vector,
)

if sys.version_info >= (3, 9):
    from importlib.resources import files
else:  # pragma: no cover
    from importlib_resources import files

PRESETS = (
    "black_scholes",
    "heston",
    "merton_discretized",
    "bs_poisson",
    "custom",
)
MODES = ("min_norm", "fixed_rate", "explicit")
Floats = Tuple[float, ...]
Matrix = Tuple[Tuple[float, ...], ...]


@dataclass(frozen=True)
class BlackScholesSection:
    """Black-Scholes parameters."""

    drift: float
    volatility: float
    initial_price: float = 1.0


@dataclass(frozen=True)
class BsPoissonSection:
    """Black-Scholes parameters with one Poisson jump size."""

    drift: float
    volatility: float
    intensity: float
    jump_size: float
    initial_price: float = 1.0


@dataclass(frozen=True)
class MertonSection:
    """Merton parameters, lognormal jumps are split into ``nodes`` marks."""

    drift: float
    volatility: float
    intensity: float
    log_mean: float
    log_std: float
    nodes: int
    initial_price: float = 1.0


@dataclass(frozen=True)
class HestonSection:
    """Heston parameters."""

    drift: float
    mean_reversion: float
    long_run_variance: float
    vol_of_variance: float
    initial_variance: float
    correlation: float = 0.0
    variance_floor: float = 1e-8
    initial_price: float = 1.0


@dataclass(frozen=True)
class CustomSection:
    """Constant coefficients of an arbitrary market."""

    initial_prices: Floats
    drift: Floats
    volatility: Matrix
    jump_coefficients: Matrix = ()
    marks: Floats = ()
    intensities: Floats = ()


@dataclass(frozen=True)
class ModelConfig:
    """A preset name and the parameters of that preset."""

    preset: str
    black_scholes: Optional[BlackScholesSection] = None
    bs_poisson: Optional[BsPoissonSection] = None
    merton_discretized: Optional[MertonSection] = None
    heston: Optional[HestonSection] = None
    custom: Optional[CustomSection] = None

    def __post_init__(self):
        """Check that the preset is parameterised."""
        if self.preset not in PRESETS:
            raise ConfigValidationError(
                "model.preset", f"expected one of {PRESETS}"
            )
        if getattr(self, self.preset) is None:
            raise ConfigValidationError(
                f"model.{self.preset}", "section is required"
            )


@dataclass(frozen=True)
class DeflatorConfig:
    """
    How to choose a deflator.

    ``explicit`` uses the given constant components without solving.
    """

    mode: str = "min_norm"
    rate: Optional[float] = None
    jump_premium: Optional[Floats] = None
    market_price_of_risk: Optional[Floats] = None
    feasibility_margin: float = 1e-6

    def __post_init__(self):
        """Check required fields of the mode."""
        if self.mode not in MODES:
            raise ConfigValidationError(
                "deflator.mode", f"expected one of {MODES}"
            )
        if self.mode != "min_norm" and self.rate is None:
            raise ConfigValidationError(
                "deflator.rate", f"is required in mode {self.mode}"
            )
        if self.mode == "explicit" and self.market_price_of_risk is None:
            raise ConfigValidationError(
                "deflator.market_price_of_risk", "is required in mode explicit"
            )


@dataclass(frozen=True)
class SimulationConfig:
    """Time grid, number of paths and seed."""

    horizon: float
    steps: int
    paths: int = 10000
    seed: int = 0
    record: Tuple[str, ...] = ("S", "Z")


@dataclass(frozen=True)
class VerificationConfig:
    """Checkpoints and the width of the acceptance band."""

    checkpoints: Floats = ()
    k_sigma: float = 4.0


@dataclass(frozen=True)
class HjmConfig:
    """
    A forward rate surface with volatility decaying in time to maturity.

    Factor :math:`i` has :math:`\\sigma_i(t,T)=s_ie^{-b_i(T-t)}`, mark
    :math:`j` has a constant :math:`\\gamma_j`.
    """

    maturity_horizon: float
    maturity_steps: int
    times: Floats
    volatility: Floats
    forward: float
    market_price_of_risk: Floats
    decay: Floats = ()
    jump_volatility: Floats = ()
    marks: Floats = ()
    intensities: Floats = ()
    jump_premium: Floats = ()
    tolerance: float = 1e-6


@dataclass(frozen=True)
class BhConfig:
    """An exponential density of time to maturity with constant drift."""

    decay: float
    rate: float
    market_price_of_risk: Floats = ()
    alpha: Optional[float] = None
    x_max: float = 1200.0
    x_step: float = 0.05
    tolerance: float = 1e-8


@dataclass(frozen=True)
class TermStructureConfig:
    """Term structure models."""

    hjm: Optional[HjmConfig] = None
    bh: Optional[BhConfig] = None


@dataclass(frozen=True)
class RunConfig:
    """All settings of a run."""

    model: Optional[ModelConfig] = None
    simulation: Optional[SimulationConfig] = None
    deflator: DeflatorConfig = field(default_factory=DeflatorConfig)
    verification: VerificationConfig = field(
        default_factory=VerificationConfig
    )
    term_structure: Optional[TermStructureConfig] = None


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _convert(kind: Any, value: Any, path: str) -> Any:
    origin, args = get_origin(kind), get_args(kind)
    if origin is Union:
        if value is None:
            return None
        return _convert(args[0], value, path)
    if origin is tuple:
        if not isinstance(value, list):
            raise ConfigValidationError(path, "must be an array")
        return tuple(
            _convert(args[0], item, f"{path}[{index}]")
            for index, item in enumerate(value)
        )
    if dataclasses.is_dataclass(kind):
        return _build(kind, value, path)
    checks = {
        float: (lambda item: isinstance(item, (int, float)), "a number"),
        int: (lambda item: isinstance(item, int), "an integer"),
        str: (lambda item: isinstance(item, str), "a string"),
    }
    check, description = checks[kind]
    if isinstance(value, bool) or not check(value):
        raise ConfigValidationError(path, f"must be {description}")
    return kind(value)


def _build(cls: Any, data: Any, path: str) -> Any:
    if not isinstance(data, dict):
        raise ConfigValidationError(path or "document", "must be an object")
    hints = get_type_hints(cls)
    names = {item.name for item in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            raise ConfigValidationError(_join(path, key), "unknown key")
    values: Dict[str, Any] = {}
    for item in dataclasses.fields(cls):
        where = _join(path, item.name)
        if item.name in data:
            values[item.name] = _convert(
                hints[item.name], data[item.name], where
            )
        elif item.default is MISSING and item.default_factory is MISSING:
            raise ConfigValidationError(where, "is required")
    return cls(**values)


def _validation_grid(config: RunConfig) -> TimeGrid:
    if config.simulation is None:
        return TimeGrid.uniform(1.0, 1)
    return build_grid(config)


def parse_config(text: Union[str, bytes]) -> RunConfig:
    """
    Parse and validate a configuration document.

    :param text: a JSON document
    :returns: a validated configuration
    :raises ConfigParseError: on a syntax error
    :raises ConfigValidationError: if a field is missing, unknown or wrong
    """
    try:
        data = orjson.loads(text)
    except orjson.JSONDecodeError as error:
        raise ConfigParseError(error.msg, error.lineno, error.colno) from error
    config = _build(RunConfig, data, "")
    if config.simulation is not None:
        try:
            build_sim_config(config)
        except InvalidInputError as error:
            raise ConfigValidationError("simulation", str(error)) from error
    if config.model is not None:
        try:
            build_market(config, _validation_grid(config))
        except InvalidInputError as error:
            raise ConfigValidationError(
                f"model.{config.model.preset}", str(error)
            ) from error
    return config


def serialize_config(config: RunConfig) -> str:
    """
    Dump a configuration as a JSON document.

    :param config: a configuration
    :returns: a document which parses back to the same configuration
    """
    return orjson.dumps(config, option=orjson.OPT_INDENT_2).decode()


def example(name: str) -> str:
    """
    Read an example configuration shipped with the package.

    :param name: a file name in ``elmd_lab/resources``
    :returns: the document
    """
    return files("elmd_lab").joinpath("resources", name).read_text()


def _required(config: RunConfig, section: str) -> Any:
    value = getattr(config, section)
    if value is None:
        raise ConfigValidationError(section, "section is required")
    return value


def build_grid(config: RunConfig) -> TimeGrid:
    """
    Create the simulation grid.

    :param config: a configuration
    :returns: a uniform grid
    """
    simulation = _required(config, "simulation")
    return TimeGrid.uniform(simulation.horizon, simulation.steps)


def build_heston(config: RunConfig) -> Optional[HestonParams]:
    """
    Get Heston variance parameters if the preset is Heston.

    :param config: a configuration
    :returns: parameters or ``None``
    """
    model = _required(config, "model")
    if model.preset != "heston":
        return None
    section = model.heston
    return HestonParams(
        section.mean_reversion,
        section.long_run_variance,
        section.vol_of_variance,
        section.initial_variance,
        section.correlation,
        section.variance_floor,
    )


def _custom_market(grid: TimeGrid, section: CustomSection) -> MarketSpec:
    jumps = None
    jump_coefficients = None
    if section.marks:
        jumps = JumpMeasure(section.marks, section.intensities)
        jump_coefficients = section.jump_coefficients
    return MarketSpec.constant(
        grid,
        section.initial_prices,
        section.drift,
        section.volatility,
        jump_coefficients,
        jumps,
    )


def build_market(
    config: RunConfig, grid: Optional[TimeGrid] = None
) -> MarketSpec:
    """
    Create the market of a configuration.

    :param config: a configuration
    :param grid: the simulation grid is used if omitted
    :returns: a market on the grid
    """
    model = _required(config, "model")
    grid = build_grid(config) if grid is None else grid
    section = getattr(model, model.preset)
    if model.preset == "black_scholes":
        return black_scholes(
            grid, section.drift, section.volatility, section.initial_price
        )
    if model.preset == "bs_poisson":
        return bs_poisson(
            grid,
            section.drift,
            section.volatility,
            section.intensity,
            section.jump_size,
            section.initial_price,
        )
    if model.preset == "merton_discretized":
        return merton_discretized(
            grid,
            section.drift,
            section.volatility,
            lognormal_marks(
                section.intensity,
                section.log_mean,
                section.log_std,
                section.nodes,
            ),
            section.initial_price,
        )
    if model.preset == "heston":
        return heston(
            grid, section.drift, build_heston(config), section.initial_price
        )
    return _custom_market(grid, section)


def build_policy(config: RunConfig) -> SolvePolicy:
    """
    Create a solver policy.

    :param config: a configuration
    :returns: a policy, min-norm for the explicit mode
    """
    deflator = config.deflator
    mode: Union[FixedRate, MinNorm] = MinNorm()
    if deflator.mode == "fixed_rate":
        mode = FixedRate(deflator.rate, deflator.jump_premium)
    return SolvePolicy(mode, deflator.feasibility_margin)


def explicit_deflator(config: RunConfig) -> Optional[DeflatorSpec]:
    """
    Create a deflator given explicitly.

    >>> config = parse_config(example("wrong_rate.json"))
    >>> explicit_deflator(config).market_price_of_risk.tolist()
    [[0.4], [0.4]]

    :param config: a configuration
    :returns: constant components on the simulation grid or ``None`` unless
        the mode is explicit
    """
    deflator = config.deflator
    if deflator.mode != "explicit":
        return None
    return DeflatorSpec.constant(
        build_grid(config).steps,
        deflator.market_price_of_risk,
        deflator.jump_premium or (),
        deflator.rate,
    )


def build_sim_config(
    config: RunConfig,
    seed: Optional[int] = None,
    paths: Optional[int] = None,
) -> SimConfig:
    """
    Create simulation settings.

    :param config: a configuration
    :param seed: overrides the configured seed
    :param paths: overrides the configured number of paths
    :returns: simulation settings
    """
    simulation = _required(config, "simulation")
    return SimConfig(
        simulation.paths if paths is None else paths,
        simulation.seed if seed is None else seed,
        build_grid(config),
        simulation.record,
    )


def _term_structure(config: RunConfig, model: str) -> Any:
    section = getattr(_required(config, "term_structure"), model)
    if section is None:
        raise ConfigValidationError(
            f"term_structure.{model}", "section is required"
        )
    return section


def build_hjm(config: RunConfig) -> Tuple[HjmSurface, np.ndarray, np.ndarray]:
    """
    Create a forward rate surface and a constant deflator.

    Drift is left zero, it is meant to be synthesized.

    >>> surface, theta, premium = build_hjm(parse_config(example("hjm.json")))
    >>> surface.volatility.shape, theta.shape, premium.shape
    ((3, 501, 1), (3, 1), (3, 1))

    :param config: a configuration with an HJM section
    :returns: a surface, :math:`\\theta(t_k)` and :math:`\\rho(t_k)`
    """
    section = _term_structure(config, "hjm")
    maturities = np.linspace(
        0.0, section.maturity_horizon, section.maturity_steps + 1
    )
    times = np.array(section.times, dtype=np.float64)
    jumps = JumpMeasure(section.marks, section.intensities)
    scale = as_finite_array(section.volatility, 1, "volatility")
    decay = as_vector(
        section.decay or np.zeros_like(scale), scale.size, "decay"
    )
    spread = np.maximum(maturities - times[:, np.newaxis], 0.0)
    volatility = scale * np.exp(-decay * spread[:, :, np.newaxis])
    jump_volatility = np.broadcast_to(
        as_vector(section.jump_volatility, jumps.size, "jump volatility"),
        spread.shape + (jumps.size,),
    )
    surface = HjmSurface(
        maturities,
        times,
        np.zeros(spread.shape),
        volatility,
        np.array(jump_volatility),
        np.full((1, maturities.shape[0]), section.forward),
        jumps,
    )
    return (
        surface,
        np.tile(np.asarray(section.market_price_of_risk), (len(times), 1)),
        np.tile(
            np.asarray(section.jump_premium, dtype=np.float64),
            (len(times), 1),
        ),
    )


def build_bh(config: RunConfig) -> Tuple[BhFamily, np.ndarray]:
    """
    Create an exponential density of time to maturity.

    Without ``alpha`` the family is synthesized for the market price of
    risk with volatility linear in time to maturity, otherwise it has
    constant drift and no volatility.

    >>> family, theta = build_bh(parse_config(example("bh.json")))
    >>> family.required_rate, family.volatility.shape, theta.tolist()
    (0.03, (24001, 1), [0.5])

    :param config: a configuration with a Brody-Hughston section
    :returns: a family and :math:`\\theta`
    """
    section = _term_structure(config, "bh")
    points = np.linspace(
        0.0, section.x_max, round(section.x_max / section.x_step) + 1
    )
    density = section.decay * np.exp(-section.decay * points)
    theta = np.array(section.market_price_of_risk, dtype=np.float64)
    factors = theta.shape[0]
    no_jumps = np.zeros((points.shape[0], 0))
    if section.alpha is None:
        return (
            bh_synthesize(
                points,
                density,
                theta,
                [],
                JumpMeasure.empty(),
                np.repeat(points[:, np.newaxis], factors, axis=1),
                no_jumps,
            ),
            theta,
        )
    return (
        BhFamily(
            points,
            density,
            np.full(points.shape[0], section.alpha),
            np.zeros((points.shape[0], factors)),
            no_jumps,
        ),
        theta,
    )
