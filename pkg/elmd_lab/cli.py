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
Command Line Interface
=======================

Exit codes are ``0`` when all checks pass, ``1`` for an infeasible market or
a failed check and ``2`` for bad input.

>>> import os
>>> if sys.version_info.major == 3 and sys.version_info.minor >= 9:
...     from importlib.resources import files
... else:
...     from importlib_resources import files
>>> def example(name):
...     return str(files("elmd_lab").joinpath("resources", name))
>>> main(["analyze", "--config", example("infeasible.json"),
...     "--out", os.devnull])
1
>>> main(["analyze", "--config", "no-such-file.json"])
2
>>> main(["simulate", "--config", example("black_scholes.json"),
...     "--format", "json"])
2
>>> main(["simulate", "--config", example("black_scholes.json"),
...     "--paths", "1", "--seed", "0"])
path,time,asset,value,process
0,0,0,1,S
0,0,,1,Z
0,0.5,0,...,S
0,0.5,,...,Z
0,1,0,...,S
0,1,,...,Z
0
>>> main(["hjm", "--config", example("hjm.json"), "--out", os.devnull])
0
>>> main(["bh", "--config", example("bh.json"), "--format", "csv",
...     "--out", os.devnull])
0

A deflator with a wrong short rate fails the martingale check, and runs with
a fixed seed give identical reports

>>> import tempfile
>>> main(["verify", "--config", example("wrong_rate.json"),
...     "--out", os.devnull])
1
>>> with tempfile.TemporaryDirectory() as directory:
...     outputs = [os.path.join(directory, f"{run}.json") for run in range(2)]
...     codes = [
...         main(["verify", "--config", example("black_scholes.json"),
...             "--out", output])
...         for output in outputs
...     ]
...     reports = []
...     for output in outputs:
...         with open(output, "rb") as report:
...             reports.append(report.read())
>>> codes, reports[0] == reports[1]
([0, 0], True)
"""
import logging
import sys
from argparse import ArgumentParser, Namespace
from functools import partial
from typing import Callable, Dict, List, Optional, TextIO, Tuple

from elmd_lab.config import (
    RunConfig,
    build_bh,
    build_heston,
    build_hjm,
    build_market,
    build_policy,
    build_sim_config,
    explicit_deflator,
    parse_config,
)
from elmd_lab.model import MarketSpec
from elmd_lab.reports import (
    FORMATS,
    VerifyReport,
    bh_verdict,
    hjm_report,
    write_report,
)
from elmd_lab.sim import (
    Deflators,
    PathBundle,
    dump_paths,
    heston_deflators,
    simulate_deflator,
    simulate_elmn,
    simulate_market,
)
from elmd_lab.solver import analyze_grid, solve_grid
from elmd_lab.termstruct import (
    bh_check,
    hjm_drift_residuals,
    hjm_synthesize_alpha,
)
from elmd_lab.utils import (
    ConfigValidationError,
    DomainError,
    InvalidInputError,
)
from elmd_lab.verify import girsanov_test, martingale_test

logger = logging.getLogger(__name__)
NUMERAIRE_TOLERANCE = 1e-10
Writer = Callable[[TextIO], None]
Outcome = Tuple[Writer, bool]


def parse_args(args: Optional[List[str]] = None) -> Namespace:
    """
    Parse script arguments.

    >>> parse_args(["verify", "--config", "run.json", "--seed", "3"])
    Namespace(command='verify', config='run.json', k_sigma=None, out=None,
    output_format=None, paths=None, seed=3, verbose=False)

    :param args: a list of string arguments
        (for testing and use in a non script scenario)
    :returns: arguments namespace for the script
    """
    argument_parser = ArgumentParser(prog="elmd-lab")
    argument_parser.add_argument("command", choices=sorted(COMMANDS))
    argument_parser.add_argument("--config", type=str, required=True)
    argument_parser.add_argument("--seed", type=int, required=False)
    argument_parser.add_argument("--out", type=str, required=False)
    argument_parser.add_argument(
        "--format", dest="output_format", choices=FORMATS, required=False
    )
    argument_parser.add_argument("--paths", type=int, required=False)
    argument_parser.add_argument("--k-sigma", type=float, required=False)
    argument_parser.add_argument("--verbose", action="store_true")
    parsed_args = argument_parser.parse_args(args)
    return parsed_args


def _report_writer(report: object, arguments: Namespace) -> Writer:
    return partial(
        write_report,
        report,
        output_format=arguments.output_format or "json",
    )


def _solved(
    config: RunConfig, spec: MarketSpec, bundle: PathBundle
) -> Tuple[Optional[Deflators], object]:
    explicit = explicit_deflator(config)
    if explicit is not None:
        return explicit, None
    if build_heston(config) is not None:
        if config.deflator.rate is None:
            raise ConfigValidationError(
                "deflator.rate", "is required for the heston preset"
            )
        return heston_deflators(spec, bundle, config.deflator.rate), None
    defl, report = solve_grid(spec, build_policy(config))
    if defl is None:
        logger.warning("no deflator exists, nothing to simulate")
    return defl, report


def _simulated(
    config: RunConfig, arguments: Namespace
) -> Tuple[MarketSpec, PathBundle]:
    spec = build_market(config)
    return spec, simulate_market(
        spec,
        build_sim_config(config, arguments.seed, arguments.paths),
        build_heston(config),
    )


def analyze(config: RunConfig, arguments: Namespace) -> Outcome:
    """
    Check existence of a deflator on every grid point.

    :param config: a run configuration
    :param arguments: command line arguments
    :returns: a report writer and whether a deflator exists
    """
    report = analyze_grid(build_market(config), build_policy(config))
    return _report_writer(report, arguments), report.feasible


def solve(config: RunConfig, arguments: Namespace) -> Outcome:
    """
    Solve for deflator components.

    :param config: a run configuration
    :param arguments: command line arguments
    :returns: a writer of the deflator (or of the report if there is no
        deflator) and whether a deflator exists
    """
    defl, report = solve_grid(build_market(config), build_policy(config))
    if defl is None:
        return _report_writer(report, arguments), False
    return _report_writer(defl, arguments), True


def simulate(config: RunConfig, arguments: Namespace) -> Outcome:
    """
    Simulate recorded processes.

    :param config: a run configuration
    :param arguments: command line arguments
    :returns: a path dump writer and whether a deflator exists if it is
        recorded
    :raises InvalidInputError: unless the format is ``csv``
    """
    if arguments.output_format not in {None, "csv"}:
        raise InvalidInputError("path dumps are written as csv only")
    spec, bundle = _simulated(config, arguments)
    if set(bundle.record) & {"D", "B", "Z", "Zbar"}:
        defl, report = _solved(config, spec, bundle)
        if defl is None:
            return _report_writer(report, arguments), False
        bundle = simulate_elmn(defl, simulate_deflator(defl, bundle))
    return partial(dump_paths, bundle), True


def verify(config: RunConfig, arguments: Namespace) -> Outcome:
    """
    Run martingale and Girsanov checks.

    :param config: a run configuration
    :param arguments: command line arguments
    :returns: a report writer and whether all checks passed
    """
    spec, bundle = _simulated(config, arguments)
    defl, report = _solved(config, spec, bundle)
    if defl is None:
        return _report_writer(report, arguments), False
    bundle = simulate_elmn(defl, simulate_deflator(defl, bundle))
    checkpoints = config.verification.checkpoints or (bundle.times[-1],)
    k_sigma = (
        config.verification.k_sigma
        if arguments.k_sigma is None
        else arguments.k_sigma
    )
    martingale = martingale_test(bundle, checkpoints, k_sigma)
    girsanov = girsanov_test(bundle, checkpoints, k_sigma)
    exact = (
        martingale.numeraire_gap is not None
        and martingale.numeraire_gap <= NUMERAIRE_TOLERANCE
    )
    if not exact:
        logger.warning(
            "numeraire gap %s exceeds %s",
            martingale.numeraire_gap,
            NUMERAIRE_TOLERANCE,
        )
    passed = martingale.passed and girsanov.passed and exact
    return (
        _report_writer(VerifyReport(martingale, girsanov, passed), arguments),
        passed,
    )


def hjm(config: RunConfig, arguments: Namespace) -> Outcome:
    """
    Synthesize an HJM drift and check the drift condition.

    :param config: a run configuration
    :param arguments: command line arguments
    :returns: a report writer and whether the drift condition holds
    """
    surface, theta, premium = build_hjm(config)
    synthesis = hjm_synthesize_alpha(surface, theta, premium)
    report = hjm_report(
        synthesis,
        hjm_drift_residuals(synthesis.surface, theta, premium),
        config.term_structure.hjm.tolerance,  # type: ignore
    )
    return _report_writer(report, arguments), report.passed


def bh(config: RunConfig, arguments: Namespace) -> Outcome:
    """
    Check a Brody-Hughston family against a deflator.

    :param config: a run configuration
    :param arguments: command line arguments
    :returns: a report writer and whether all residuals are small
    """
    family, theta = build_bh(config)
    section = config.term_structure.bh  # type: ignore
    verdict = bh_verdict(
        bh_check(family, theta, [], section.rate), section.tolerance
    )
    return _report_writer(verdict, arguments), verdict.passed


COMMANDS: Dict[str, Callable[[RunConfig, Namespace], Outcome]] = {
    "analyze": analyze,
    "solve": solve,
    "simulate": simulate,
    "verify": verify,
    "hjm": hjm,
    "bh": bh,
}


def main(args: Optional[List[str]] = None) -> int:
    """
    Run a command.

    :param args: parameters from the command line or explicitly set
    :returns: an exit code
    """
    arguments = parse_args(args)
    logging.basicConfig(
        level=logging.INFO if arguments.verbose else logging.WARNING
    )
    try:
        with open(arguments.config, encoding="utf-8") as config_file:
            config = parse_config(config_file.read())
        writer, passed = COMMANDS[arguments.command](config, arguments)
    except (InvalidInputError, DomainError, OSError) as error:
        logger.error("%s", error)
        return 2
    if arguments.out is None:
        writer(sys.stdout)
    else:
        with open(arguments.out, "w", encoding="utf-8") as out:
            writer(out)
    logger.info("%s finished, passed: %s", arguments.command, passed)
    return 0 if passed else 1


if __name__ == "__main__":
    raise SystemExit(main())  # pragma: no cover
