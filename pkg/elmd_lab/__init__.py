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
"""
Existence, construction and numerical verification of equivalent local
martingale deflators for jump-diffusion markets.

The command line entry point is :func:`elmd_lab.cli.main`.
"""
__version__ = "0.1.0"
