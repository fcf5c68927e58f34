# Copyright 2026 The QCL Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Gradient-flow optimal control for closed N-level quantum systems."""

from qcl._native import (  # noqa: F401
    ControlField,
    ControlProblem,
    HessianReport,
    LandscapeBounds,
    OptimizationResult,
    QclError,
    QuantumSystem,
    __version__,
    catalog_json,
    hessian_at,
    initial_field,
    mean_amplitude,
    optimize,
    problem,
    rescale_to_rfs,
    rfs,
    run_single,
)

__all__ = [
    "ControlField",
    "ControlProblem",
    "HessianReport",
    "LandscapeBounds",
    "OptimizationResult",
    "QclError",
    "QuantumSystem",
    "__version__",
    "catalog_json",
    "hessian_at",
    "initial_field",
    "mean_amplitude",
    "optimize",
    "problem",
    "rescale_to_rfs",
    "rfs",
    "run_single",
]
