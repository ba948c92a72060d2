// SPDX-License-Identifier: Apache-2.0
//
// quantbeam: robust ISAC beamforming under low-resolution DACs/ADCs
// Copyright (C) 2026 The quantbeam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Python module quantbeam._core. Configurations cross the boundary as JSON
// text (the same schema the command-line tool reads); matrices as NumPy
// arrays.

#include "quantbeam/cli.hpp"
#include "quantbeam/run_config.hpp"
#include "quantbeam/sim.hpp"
#include "quantbeam/units.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace quantbeam;

namespace
{

py::dict solution_dict(const BeamformingSolution &sol)
{
    py::dict d;
    d["W_c"] = sol.W_c;
    d["W_r"] = sol.W_r;
    d["R_x"] = sol.R_x;
    d["objective_value"] = sol.objective_value;
    d["radar_sqnr"] = sol.radar_sqnr;
    d["radar_sqnr_lambda_max"] = sol.radar_sqnr_lambda_max;
    d["sqinr_per_user"] = sol.sqinr_per_user;
    d["solver"] = sol.solver_info.solver;
    d["status"] = sol.solver_info.status;
    d["iterations"] = sol.solver_info.iterations;
    d["objective_history"] = sol.solver_info.objective_history;
    return d;
}

py::dict point_dict(const RocPoint &p)
{
    py::dict d;
    d["threshold"] = p.threshold;
    d["p_fa"] = p.p_fa;
    d["p_fa_ci"] = py::make_tuple(p.p_fa_ci.lo, p.p_fa_ci.hi);
    d["p_d"] = p.p_d;
    d["p_d_ci"] = py::make_tuple(p.p_d_ci.lo, p.p_d_ci.hi);
    return d;
}

Scenario scenario_of(const RunConfig &rc, std::uint64_t trial)
{
    return make_scenario(rc.spec.config, trial_channels(rc.spec, rc.spec.config, trial));
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Robust ISAC beamforming under low-resolution DACs/ADCs";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
    py::register_exception<SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);

    m.def("distortion_factor", py::overload_cast<int>(&distortion_factor), py::arg("bits"),
          "Normalized MSE beta(b) of a b-bit quantizer on a unit Gaussian.");
    m.def("midrise_quantize", &midrise_quantize, py::arg("z"), py::arg("bits"), py::arg("scale"),
          py::arg("loading") = kDefaultLoadingFactor);
    m.def("steering_tx", &steering_tx, py::arg("theta"), py::arg("n"));
    m.def("steering_rx", &steering_rx, py::arg("theta"), py::arg("n"));

    m.def(
        "default_config", [] { return canonical_json(parse_run_config("{}")); },
        "Fully expanded default configuration as JSON text.");
    m.def(
        "canonical_config", [](const std::string &json) { return canonical_json(parse_run_config(json)); },
        py::arg("config"));
    m.def(
        "config_hash", [](const std::string &json) { return config_hash(parse_run_config(json)); },
        py::arg("config"));

    m.def(
        "channels",
        [](const std::string &json, std::uint64_t trial) {
            const Scenario sc = scenario_of(parse_run_config(json), trial);
            py::dict d;
            d["H"] = sc.channels.H;
            d["G"] = sc.channels.G;
            d["alpha_t"] = sc.profile.alpha_t;
            d["alpha_r"] = sc.profile.alpha_r;
            d["alpha_user"] = sc.profile.alpha_user;
            return d;
        },
        py::arg("config") = "{}", py::arg("trial") = 0, "Channels and AQNM gains of one trial.");

    m.def(
        "solve",
        [](const std::string &json, const std::string &algorithm, std::uint64_t trial) {
            const RunConfig rc = parse_run_config(json);
            const Scenario sc = scenario_of(rc, trial);
            BeamformingSolution sol;
            {
                py::gil_scoped_release release;
                sol = solve_algorithm(algorithm_from_string(algorithm), sc, rc.spec.solver);
            }
            return solution_dict(sol);
        },
        py::arg("config") = "{}", py::arg("algorithm") = "robust", py::arg("trial") = 0);

    m.def(
        "sweep",
        [](const std::string &json) {
            const RunConfig rc = parse_run_config(json);
            rc.spec.validate();
            SweepResult res;
            {
                py::gil_scoped_release release;
                res = run_sweep(rc.spec);
            }
            py::list rows;
            for (const SweepRow &r : res.rows)
            {
                py::dict d;
                d[py::str(to_string(rc.spec.axis))] = r.axis_value;
                d["algorithm"] = to_string(r.algorithm);
                d["trials"] = r.trials;
                d["feasible"] = r.feasible;
                d["achieved_mean_sqinr_db"] = r.mean_sqinr_db;
                d["achieved_min_sqinr_db"] = r.min_sqinr_db;
                d["worst_sqinr_db"] = r.worst_sqinr_db;
                d["radar_sqnr_db"] = r.radar_sqnr_db;
                d["mean_iterations"] = r.mean_iterations;
                rows.append(d);
            }
            return rows;
        },
        py::arg("config"));

    m.def(
        "roc",
        [](const std::string &json) {
            RunConfig rc = parse_run_config(json);
            if (!rc.grid_given)
                rc.spec.grid.clear();
            std::vector<RocCurve> curves;
            {
                py::gil_scoped_release release;
                curves = roc_experiment(rc.spec);
            }
            py::dict out;
            for (const RocCurve &c : curves)
            {
                py::dict d;
                d["analytic_sqnr"] = c.analytic_sqnr;
                d["h0"] = c.stats.h0;
                d["h1"] = c.stats.h1;
                py::list table, grid;
                for (const RocPoint &p : c.table)
                    table.append(point_dict(p));
                for (const RocPoint &p : c.at_grid)
                    grid.append(point_dict(p));
                d["table"] = table;
                d["at_pfa_grid"] = grid;
                out[py::str(to_string(c.algorithm))] = d;
            }
            return out;
        },
        py::arg("config"));

    m.def(
        "ee",
        [](const std::string &json) {
            RunConfig rc = parse_run_config(json);
            if (!rc.grid_given)
                rc.spec.grid = default_grid(SweepAxis::Bits);
            std::vector<EeRow> rows;
            {
                py::gil_scoped_release release;
                rows = ee_sweep(rc.spec, rc.power_model);
            }
            py::list out;
            for (const EeRow &r : rows)
            {
                py::dict d;
                d["b"] = r.bits;
                d["ee"] = r.ee;
                d["trials"] = r.trials;
                d["feasible"] = r.feasible;
                d["rate"] = r.rate;
                d["power_w"] = r.power_w;
                out.append(d);
            }
            return out;
        },
        py::arg("config"));

    m.def(
        "run_cli",
        [](const std::vector<std::string> &args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool; returns (exit code, stdout, stderr).");
}
