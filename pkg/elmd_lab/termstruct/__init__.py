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
Term Structure Models
**********************
"""
from elmd_lab.termstruct.brody_hughston import (
    BhFamily,
    BhReport,
    BhSynthesis,
    bh_check,
    bh_savings_account,
    bh_synthesize,
)
from elmd_lab.termstruct.hjm import (
    HjmSurface,
    HjmSynthesis,
    hjm_drift_residual,
    hjm_drift_residuals,
    hjm_synthesize_alpha,
)
from elmd_lab.termstruct.utils import savings_account
