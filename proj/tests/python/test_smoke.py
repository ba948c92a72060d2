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

"""Smoke tests of the Python module."""

import json
import math

import numpy as np
import pytest

import quantbeam as qb

SMALL = {"system": {"n_tx": 6, "n_rx": 6, "n_users": 2}, "experiment": {"grid": [5, 8], "trials": 2}}


def test_distortion_factor_table():
    assert qb.distortion_factor(3) == pytest.approx(0.03454)
    assert qb.distortion_factor(6) == pytest.approx(math.sqrt(3) * math.pi / 2 * 2.0 ** -12)


def test_steering_is_unit_modulus():
    a = qb.steering_tx(math.radians(40.0), 16)
    assert a.shape == (16,)
    np.testing.assert_allclose(np.abs(a), 1.0)


def test_midrise_zero_maps_to_half_step():
    out = qb.midrise_quantize(np.zeros(2, dtype=complex), 3, np.ones(2))
    step = 2 * 3.0 / 8
    np.testing.assert_allclose(out, (step / 2) * (1 + 1j) * np.ones(2))


def test_default_config_round_trip():
    cfg = qb.default_config()
    assert cfg["system"]["n_tx"] == 16
    assert cfg["target"]["eta2_db"] == pytest.approx(-10.0)
    assert qb.config_hash(cfg) == qb.config_hash(None)


def test_solve_meets_thresholds():
    sol = qb.solve(SMALL)
    assert sol["solver"] == "sdr"
    assert sol["W_c"].shape == (6, 2)
    assert np.all(10 * np.log10(sol["sqinr_per_user"]) >= 5.0 - 1e-4)
    r_x = sol["W_c"] @ sol["W_c"].conj().T + sol["W_r"] @ sol["W_r"].conj().T
    np.testing.assert_allclose(r_x, sol["R_x"], atol=1e-12)


def test_errors_map_to_python_exceptions():
    with pytest.raises(qb.InfeasibleError):
        qb.solve({"system": {"gamma_db": 200}})
    with pytest.raises(qb.ConfigError):
        qb.solve({"sytem": {}})
    with pytest.raises(ValueError):
        qb.solve("{")


def test_sweep_rows():
    rows = qb.sweep(SMALL)
    assert len(rows) == 4
    robust = [r for r in rows if r["algorithm"] == "robust"]
    assert all(r["worst_sqinr_db"] >= r["gamma_db"] - 0.05 for r in robust)


def test_roc_and_ee():
    cfg = {"system": {"n_tx": 4, "n_rx": 4, "n_users": 1, "gamma_db": 0},
           "detection": {"trials": 100, "snapshots": 8, "roc_points": 10},
           "experiment": {"trials": 1, "algorithms": ["robust"]}}
    curves = qb.roc(cfg)
    assert set(curves) == {"robust"}
    table = curves["robust"]["table"]
    assert all(b["p_fa"] >= a["p_fa"] for a, b in zip(table, table[1:]))
    rows = qb.ee(cfg)
    assert [r["b"] for r in rows] == list(range(1, 9))
    assert all(r["ee"] > 0 for r in rows)


def test_cli_entry_point(tmp_path):
    code, out, _ = qb._core.run_cli(["quantbeam", "solve", "--out-dir", str(tmp_path)])
    assert code == 0
    assert "radar SQNR" in out
    sol = json.loads((tmp_path / "solution_robust.json").read_text())
    assert len(sol["sqinr_per_user"]) == 4
