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
Linear Algebra
***************
"""
from elmd_lab.linalg.completion import (
    gram,
    psd_completion,
    schur_complement,
    split_residual_vector,
    split_solve,
)
from elmd_lab.linalg.kernel import FiniteKernel, extend_kernel
from elmd_lab.linalg.pseudoinverse import (
    adjoint_solution,
    least_norm,
    pinv,
    pinv_limit,
    rank,
    solvable,
)
from elmd_lab.linalg.utils import (
    DEFAULT_TOLERANCES,
    Tolerances,
    check_psd,
    is_psd,
)
