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
Discrete Calculus
******************
"""
from elmd_lab.discalc.finite_tree import (
    DriftConditionReport,
    TreeProcess,
    TwoPeriodTree,
    check_deflator,
    compensator,
    fit_market_price_of_risk,
)
from elmd_lab.discalc.paths import ExpPath, PureJumpPath
from elmd_lab.discalc.transforms import (
    inv_stoch_exp,
    mpr_from_tilde,
    mpr_to_tilde,
    quad_cov,
    rate_from_tilde,
    rate_to_tilde,
    savings_account,
    stoch_exp,
    yor_sum,
)
