# SPDX-License-Identifier: Apache-2.0
#
# quantbeam: robust ISAC beamforming under low-resolution DACs/ADCs
# Copyright (C) 2026 The quantbeam Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

"""Robust ISAC beamforming under low-resolution DACs/ADCs.

Configurations are JSON text or plain dicts following the schema of the
``quantbeam`` command-line tool; see ``default_config()``.
"""

from __future__ import annotations

import json as _json
from typing import Any, Mapping, Union

from . import _core
from ._core import (
    ConfigError,
    InfeasibleError,
    SolverFailure,
    distortion_factor,
    midrise_quantize,
    steering_rx,
    steering_tx,
)

Config = Union[str, Mapping[str, Any], None]

__all__ = [
    "ConfigError",
    "InfeasibleError",
    "SolverFailure",
    "channels",
    "config_hash",
    "default_config",
    "distortion_factor",
    "ee",
    "midrise_quantize",
    "roc",
    "solve",
    "steering_rx",
    "steering_tx",
    "sweep",
]


def _text(config: Config) -> str:
    if config is None:
        return "{}"
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def default_config() -> dict:
    """The fully expanded default configuration."""
    return _json.loads(_core.default_config())


def config_hash(config: Config = None) -> str:
    return _core.config_hash(_text(config))


def channels(config: Config = None, trial: int = 0) -> dict:
    return _core.channels(_text(config), trial)


def solve(config: Config = None, algorithm: str = "robust", trial: int = 0) -> dict:
    """Design beamformers; raises InfeasibleError when the thresholds cannot be met."""
    return _core.solve(_text(config), algorithm, trial)


def sweep(config: Config = None) -> list:
    return _core.sweep(_text(config))


def roc(config: Config = None) -> dict:
    return _core.roc(_text(config))


def ee(config: Config = None) -> list:
    return _core.ee(_text(config))
