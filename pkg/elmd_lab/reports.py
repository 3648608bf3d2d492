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
Reports
========

Reports are dataclasses written as JSON by ``orjson`` (shortest decimals
which read back to the same doubles) or as ``field,value`` rows with 17
significant digits.

>>> import sys
>>> from elmd_lab.verify import MeanCheck
>>> check = MeanCheck("S[0]", 1.0, 1.0, 1.1, 0.05, 2.0, True)
>>> write_report(check, sys.stdout, "csv")
field,value
name,S[0]
time,1
target,1
mean,1.1000000000000001
standard_error,0.050000000000000003
z_score,2
passed,true
>>> write_report(check, sys.stdout, "json")
{
  "name": "S[0]",
  "time": 1.0,
  "target": 1.0,
  "mean": 1.1,
  "standard_error": 0.05,
  "z_score": 2.0,
  "passed": true
}
"""
import csv
import dataclasses
from dataclasses import dataclass
from typing import Any, Iterator, TextIO, Tuple

import numpy as np
import orjson

from elmd_lab.termstruct import BhReport, HjmSynthesis
from elmd_lab.verify import GirsanovReport, MartingaleReport

FORMATS = ("json", "csv")


@dataclass(frozen=True)
class VerifyReport:
    """
    Both Monte Carlo checks of one simulation.

    :param martingale: mean checks of deflated prices
    :param girsanov: mean checks of the measure change
    :param passed: whether both passed
    """

    martingale: MartingaleReport
    girsanov: GirsanovReport
    passed: bool


@dataclass(frozen=True, eq=False)
class HjmReport:
    """
    A synthesized HJM drift and how well it closes the drift condition.

    :param times: evaluation times
    :param short_rate: :math:`r(t_k)`
    :param savings: :math:`B_{t_k}`
    :param max_drift_residual: the largest residual over times and
        maturities
    :param tolerance: largest acceptable residual
    :param passed: whether the residual is acceptable
    """

    times: np.ndarray
    short_rate: np.ndarray
    savings: np.ndarray
    max_drift_residual: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class BhVerdict:
    """
    Brody-Hughston residuals compared with a tolerance.

    :param report: residuals
    :param tolerance: largest acceptable residual except the normalisation
    :param passed: whether all residuals are acceptable
    """

    report: BhReport
    tolerance: float
    passed: bool


def hjm_report(
    synthesis: HjmSynthesis, residuals: np.ndarray, tolerance: float
) -> HjmReport:
    """
    Summarise a synthesized surface.

    :param synthesis: a surface with its short rate and savings account
    :param residuals: drift condition residuals on the surface
    :param tolerance: largest acceptable residual
    :returns: a report
    """
    largest = float(np.abs(residuals).max()) if residuals.size else 0.0
    return HjmReport(
        synthesis.surface.times,
        synthesis.short_rate,
        synthesis.savings,
        largest,
        tolerance,
        largest <= tolerance,
    )


def bh_verdict(report: BhReport, tolerance: float) -> BhVerdict:
    """
    Compare Brody-Hughston residuals with a tolerance.

    :param report: residuals
    :param tolerance: largest acceptable residual
    :returns: a verdict
    """
    largest = max(
        report.short_rate_residual,
        report.max_drift_residual,
        report.density_drift_residual,
        report.diffusion_constraint,
        report.jump_constraint,
        report.rho_zero_residual,
    )
    return BhVerdict(report, tolerance, largest <= tolerance)


def _default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not serializable")


def to_json(report: Any) -> str:
    """
    Write a report as JSON.

    >>> print(to_json({"rows": np.arange(6.0).reshape(3, 2)[:, 0]}), end="")
    {
      "rows": [
        0.0,
        2.0,
        4.0
      ]
    }

    :param report: a dataclass
    :returns: a document ending with a newline
    """
    return orjson.dumps(
        report,
        default=_default,
        option=orjson.OPT_SERIALIZE_NUMPY
        | orjson.OPT_INDENT_2
        | orjson.OPT_APPEND_NEWLINE,
    ).decode()


def flatten(report: Any, prefix: str = "") -> Iterator[Tuple[str, Any]]:
    """
    List leaf values of a report with their paths.

    >>> from elmd_lab.solver import DeflatorSpec
    >>> list(flatten(DeflatorSpec.constant(1, [0.4], [], 0.02)))
    [('market_price_of_risk[0][0]', 0.4), ('rate[0]', 0.02)]

    :param report: a dataclass, a sequence, an array or a scalar
    :param prefix: a path of the report itself
    :returns: pairs of a dotted path and a value
    """
    if dataclasses.is_dataclass(report):
        for item in dataclasses.fields(report):
            name = f"{prefix}.{item.name}" if prefix else item.name
            yield from flatten(getattr(report, item.name), name)
    elif isinstance(report, np.ndarray):
        for index in np.ndindex(report.shape):
            name = "".join(f"[{position}]" for position in index)
            yield f"{prefix}{name}", report[index].item()
    elif isinstance(report, (tuple, list)):
        for index, value in enumerate(report):
            yield from flatten(value, f"{prefix}[{index}]")
    else:
        yield prefix, report


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def to_csv(report: Any, stream: TextIO) -> None:
    """
    Write a report as ``field,value`` rows.

    :param report: a dataclass
    :param stream: where to write
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("field", "value"))
    writer.writerows((name, _cell(value)) for name, value in flatten(report))


def write_report(report: Any, stream: TextIO, output_format: str) -> None:
    """
    Write a report in one of :data:`FORMATS`.

    :param report: a dataclass
    :param stream: where to write
    :param output_format: ``json`` or ``csv``
    :raises ValueError: on unknown format
    """
    if output_format == "json":
        stream.write(to_json(report))
    elif output_format == "csv":
        to_csv(report, stream)
    else:
        raise ValueError(f"format {output_format} is not one of {FORMATS}")
