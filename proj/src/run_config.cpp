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

#include "quantbeam/run_config.hpp"

#include "quantbeam/units.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace quantbeam
{

using nlohmann::ordered_json;

namespace
{

/// Object reader that remembers which keys were used so leftovers can be
/// reported as unknown.
class Section
{
public:
    Section(const ordered_json &j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            fail(path_.empty() ? "configuration must be a JSON object" : path_ + " must be an object");
    }

    ~Section() = default;
    Section(const Section &) = delete;
    Section &operator=(const Section &) = delete;

    [[nodiscard]] const ordered_json *get(const std::string &key)
    {
        used_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    [[nodiscard]] std::string path(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    void number(const std::string &key, double &out)
    {
        if (const auto *v = get(key))
        {
            if (!v->is_number())
                fail(path(key) + " must be a number");
            out = v->get<double>();
            if (!std::isfinite(out))
                fail(path(key) + " must be finite");
        }
    }

    void integer(const std::string &key, int &out)
    {
        if (const auto *v = get(key))
        {
            if (!v->is_number_integer())
                fail(path(key) + " must be an integer");
            out = v->get<int>();
        }
    }

    void unsigned_integer(const std::string &key, std::uint64_t &out)
    {
        if (const auto *v = get(key))
        {
            if (!v->is_number_unsigned())
                fail(path(key) + " must be a nonnegative integer");
            out = v->get<std::uint64_t>();
        }
    }

    void boolean(const std::string &key, bool &out)
    {
        if (const auto *v = get(key))
        {
            if (!v->is_boolean())
                fail(path(key) + " must be true or false");
            out = v->get<bool>();
        }
    }

    void string(const std::string &key, std::string &out)
    {
        if (const auto *v = get(key))
        {
            if (!v->is_string())
                fail(path(key) + " must be a string");
            out = v->get<std::string>();
        }
    }

    void numbers(const std::string &key, std::vector<double> &out)
    {
        if (const auto *v = get(key))
        {
            if (!v->is_array())
                fail(path(key) + " must be an array of numbers");
            out.clear();
            for (const auto &e : *v)
            {
                if (!e.is_number())
                    fail(path(key) + " must be an array of numbers");
                out.push_back(e.get<double>());
            }
        }
    }

    void finish() const
    {
        for (const auto &[key, value] : j_.items())
            if (!used_.contains(key))
                fail("unknown key " + path(key));
    }

    [[noreturn]] static void fail(const std::string &msg) { throw ConfigError(msg); }

private:
    const ordered_json &j_;
    std::string path_;
    std::set<std::string> used_;
};

BitDepth parse_bit_depth(const ordered_json &v, const std::string &path)
{
    if (v.is_string() && v.get<std::string>() == "infinite")
        return BitDepth::infinite();
    if (v.is_number_integer() && v.get<int>() >= 1)
        return BitDepth::finite(v.get<int>());
    Section::fail(path + " entries must be integers >= 1 or \"infinite\"");
}

/// A single resolution for every chain or one per chain.
std::vector<BitDepth> parse_bits(const ordered_json &v, int count, const std::string &path)
{
    if (v.is_array())
    {
        if (static_cast<int>(v.size()) != count)
            Section::fail(path + " needs " + std::to_string(count) + " entries, got " + std::to_string(v.size()));
        std::vector<BitDepth> out;
        for (const auto &e : v)
            out.push_back(parse_bit_depth(e, path));
        return out;
    }
    return std::vector<BitDepth>(static_cast<std::size_t>(count), parse_bit_depth(v, path));
}

ordered_json bits_json(const std::vector<BitDepth> &bits)
{
    const bool same = std::all_of(bits.begin(), bits.end(), [&](const BitDepth &b) { return b == bits.front(); });
    auto one = [](const BitDepth &b) -> ordered_json {
        if (b.is_infinite())
            return "infinite";
        return b.bits();
    };
    if (same && !bits.empty())
        return one(bits.front());
    ordered_json a = ordered_json::array();
    for (const BitDepth &b : bits)
        a.push_back(one(b));
    return a;
}

ordered_json complex_json(cdouble z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json matrix_json(const CMatrix &m)
{
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(complex_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

cdouble complex_from(const ordered_json &v, const std::string &path)
{
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        Section::fail(path + ": complex values are written as [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

CMatrix matrix_from(const ordered_json &v, const std::string &path)
{
    if (!v.is_array())
        Section::fail(path + " must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(v[0].is_array() ? v[0].size() : 0);
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        const auto &row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            Section::fail(path + " rows must all have the same length");
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = complex_from(row[static_cast<std::size_t>(j)], path);
    }
    return m;
}

ordered_json vector_json(const RVector &v)
{
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back(v(i));
    return a;
}

double db_or_inf(double lin) { return lin > 0.0 ? units::linear_to_db(lin) : -std::numeric_limits<double>::infinity(); }

void parse_system(Section &s, SystemConfig &c)
{
    s.integer("n_tx", c.n_tx);
    s.integer("n_rx", c.n_rx);
    s.integer("n_users", c.n_users);
    if (c.n_tx < 1 || c.n_rx < 1 || c.n_users < 0)
        Section::fail("system: n_tx and n_rx must be >= 1 and n_users >= 0");

    double power_dbm = units::watts_to_dbm(c.power_w);
    s.number("power_dbm", power_dbm);
    c.power_w = units::dbm_to_watts(power_dbm);

    double gamma_db = 5.0;
    c.gamma = RVector::Constant(c.n_users, units::db_to_linear(gamma_db));
    if (const auto *g = s.get("gamma_db"))
    {
        if (g->is_number())
            c.gamma.setConstant(units::db_to_linear(g->get<double>()));
        else if (g->is_array() && static_cast<int>(g->size()) == c.n_users)
        {
            for (int k = 0; k < c.n_users; ++k)
            {
                const auto &e = (*g)[static_cast<std::size_t>(k)];
                if (!e.is_number())
                    Section::fail("system.gamma_db entries must be numbers");
                c.gamma(k) = units::db_to_linear(e.get<double>());
            }
        }
        else
            Section::fail("system.gamma_db must be a number or an array with one entry per user");
    }

    double sr = units::watts_to_dbm(c.sigma_r2), sk = units::watts_to_dbm(c.sigma_k2);
    s.number("sigma_r2_dbm", sr);
    s.number("sigma_k2_dbm", sk);
    c.sigma_r2 = units::dbm_to_watts(sr);
    c.sigma_k2 = units::dbm_to_watts(sk);

    c.bits = BitAllocation::uniform(c.n_tx, c.n_rx, c.n_users, BitDepth::finite(3));
    if (const auto *b = s.get("bits"))
    {
        Section bs(*b, s.path("bits"));
        if (const auto *v = bs.get("dac"))
            c.bits.dac_bits = parse_bits(*v, c.n_tx, bs.path("dac"));
        if (const auto *v = bs.get("adc_bs"))
            c.bits.adc_bits_bs = parse_bits(*v, c.n_rx, bs.path("adc_bs"));
        if (const auto *v = bs.get("adc_user"))
            c.bits.adc_bits_user = parse_bits(*v, c.n_users, bs.path("adc_user"));
        bs.finish();
    }
}

TargetModel parse_target(Section &s, bool &redraw)
{
    std::string type = "point";
    s.string("type", type);
    if (type == "point")
    {
        double theta_deg = 40.0, eta2_db = -10.0;
        s.number("theta_deg", theta_deg);
        s.number("eta2_db", eta2_db);
        return PointTarget{units::deg_to_rad(theta_deg), cdouble(std::sqrt(units::db_to_linear(eta2_db)), 0.0)};
    }
    if (type == "extended")
    {
        double g_db = -10.0;
        s.number("sigma_g2_db", g_db);
        s.boolean("redraw", redraw);
        return ExtendedTarget{units::db_to_linear(g_db)};
    }
    if (type == "custom")
    {
        const auto *g = s.get("G");
        if (g == nullptr)
            Section::fail("target.G is required for a custom target");
        return CustomTarget{matrix_from(*g, s.path("G"))};
    }
    Section::fail("target.type must be \"point\", \"extended\" or \"custom\"");
}

template <class F>
auto rethrow_as_config(const std::string &where, F &&f)
{
    try
    {
        return f();
    }
    catch (const ConfigError &)
    {
        throw;
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(where + ": " + e.what());
    }
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

PowerModel RunConfig::default_power_model()
{
    PowerModel pm;
    pm.p_lo = 22.5e-3;
    pm.p_rf = 40e-3;
    pm.c_dac = 0.5e-3;
    pm.c_adc = 0.5e-3;
    pm.kappa = 0.3;
    return pm;
}

std::vector<double> default_grid(SweepAxis axis)
{
    switch (axis)
    {
    case SweepAxis::GammaDb:
        return {5, 6, 7, 8, 9, 10, 11, 12};
    case SweepAxis::PowerDbm:
        return {10, 15, 20, 25, 30};
    case SweepAxis::Antennas:
        return {4, 8, 12, 16};
    case SweepAxis::Bits:
        return {1, 2, 3, 4, 5, 6, 7, 8};
    }
    return {};
}

RunConfig parse_run_config(const std::string &json_text)
{
    ordered_json root;
    try
    {
        root = ordered_json::parse(json_text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }

    RunConfig rc;
    ExperimentSpec &spec = rc.spec;
    Section top(root, "");

    if (const auto *v = top.get("system"))
    {
        Section s(*v, "system");
        parse_system(s, spec.config);
        s.finish();
    }
    rethrow_as_config("system", [&] { spec.config.validate(); });

    if (const auto *v = top.get("target"))
    {
        Section s(*v, "target");
        spec.target = parse_target(s, spec.redraw_target);
        s.finish();
    }
    rethrow_as_config("target", [&] { validate_target(spec.target); });
    if (const auto *c = std::get_if<CustomTarget>(&spec.target))
    {
        if (c->G.rows() != spec.config.n_rx || c->G.cols() != spec.config.n_tx)
            Section::fail("target.G must be n_rx x n_tx");
    }

    if (const auto *v = top.get("experiment"))
    {
        Section s(*v, "experiment");
        std::string axis = to_string(spec.axis);
        s.string("axis", axis);
        rethrow_as_config("experiment.axis", [&] { spec.axis = sweep_axis_from_string(axis); });
        if (s.get("grid") != nullptr)
        {
            rc.grid_given = true;
            s.numbers("grid", spec.grid);
        }
        s.integer("trials", spec.trials);
        s.unsigned_integer("seed", spec.seed);
        s.integer("threads", spec.threads);
        if (const auto *a = s.get("algorithms"))
        {
            if (!a->is_array())
                Section::fail("experiment.algorithms must be an array of names");
            spec.algorithms.clear();
            for (const auto &e : *a)
            {
                if (!e.is_string())
                    Section::fail("experiment.algorithms must be an array of names");
                rethrow_as_config("experiment.algorithms",
                                  [&] { spec.algorithms.push_back(algorithm_from_string(e.get<std::string>())); });
            }
        }
        s.finish();
    }
    if (!rc.grid_given)
        spec.grid = default_grid(spec.axis);
    if (spec.trials < 1)
        Section::fail("experiment.trials must be >= 1");
    if (spec.threads < 0)
        Section::fail("experiment.threads must be >= 0");
    if (spec.algorithms.empty())
        Section::fail("experiment.algorithms must not be empty");
    for (double g : spec.grid)
        rethrow_as_config("experiment.grid", [&] { (void)apply_axis(spec.config, spec.axis, g); });

    DetectionSettings &det = spec.detection;
    if (const auto *v = top.get("detection"))
    {
        Section s(*v, "detection");
        s.integer("trials", det.trials);
        s.integer("snapshots", det.snapshots);
        std::string mode = to_string(det.sampler.mode);
        s.string("sampler", mode);
        rethrow_as_config("detection.sampler", [&] { det.sampler.mode = sampler_mode_from_string(mode); });
        s.number("loading_factor", det.sampler.loading);
        s.numbers("pfa_grid", spec.pfa_grid);
        s.integer("roc_points", spec.roc_points);
        s.finish();
    }
    if (det.trials < 1 || det.snapshots < 1)
        Section::fail("detection.trials and detection.snapshots must be >= 1");
    if (det.sampler.loading <= 0.0)
        Section::fail("detection.loading_factor must be positive");
    if (spec.roc_points < 2)
        Section::fail("detection.roc_points must be >= 2");
    for (double p : spec.pfa_grid)
        if (!(p > 0.0 && p < 1.0))
            Section::fail("detection.pfa_grid entries must lie in (0, 1)");

    SolveSettings &sol = spec.solver;
    if (const auto *v = top.get("solver"))
    {
        Section s(*v, "solver");
        s.boolean("force_mm", sol.force_mm);
        s.string("sdr_engine", rc.sdr_engine);
        s.boolean("feasibility_precheck", sol.sdr.feasibility_precheck);
        s.number("conic_eps", sol.sdr.conic.eps_abs);
        s.number("mm_eps", sol.mm.eps);
        s.integer("mm_max_iters", sol.mm.max_iters);
        s.finish();
    }
    rethrow_as_config("solver.sdr_engine", [&] { sol.sdr.solver = conic::solver_by_name(rc.sdr_engine); });
    if (!(sol.sdr.conic.eps_abs > 0.0) || !(sol.mm.eps > 0.0) || sol.mm.max_iters < 1)
        Section::fail("solver: tolerances must be positive and mm_max_iters >= 1");
    sol.sdr.conic.eps_rel = sol.sdr.conic.eps_abs;

    if (const auto *v = top.get("power_model"))
    {
        Section s(*v, "power_model");
        PowerModel &pm = rc.power_model;
        double lo = pm.p_lo * 1e3, rf = pm.p_rf * 1e3, dac = pm.c_dac * 1e3, adc = pm.c_adc * 1e3;
        s.number("p_lo_mw", lo);
        s.number("p_rf_mw", rf);
        s.number("c_dac_mw", dac);
        s.number("c_adc_mw", adc);
        s.number("kappa", pm.kappa);
        pm.p_lo = lo * 1e-3;
        pm.p_rf = rf * 1e-3;
        pm.c_dac = dac * 1e-3;
        pm.c_adc = adc * 1e-3;
        s.finish();
    }
    rethrow_as_config("power_model", [&] { rc.power_model.validate(); });

    top.finish();
    return rc;
}

std::string canonical_json(const RunConfig &rc, int indent)
{
    const ExperimentSpec &spec = rc.spec;
    const SystemConfig &c = spec.config;
    ordered_json j;

    ordered_json sys;
    sys["n_tx"] = c.n_tx;
    sys["n_rx"] = c.n_rx;
    sys["n_users"] = c.n_users;
    sys["power_dbm"] = units::watts_to_dbm(c.power_w);
    ordered_json gamma = ordered_json::array();
    for (Eigen::Index k = 0; k < c.gamma.size(); ++k)
        gamma.push_back(units::linear_to_db(c.gamma(k)));
    sys["gamma_db"] = gamma;
    sys["sigma_r2_dbm"] = units::watts_to_dbm(c.sigma_r2);
    sys["sigma_k2_dbm"] = units::watts_to_dbm(c.sigma_k2);
    sys["bits"] = {{"dac", bits_json(c.bits.dac_bits)},
                   {"adc_bs", bits_json(c.bits.adc_bits_bs)},
                   {"adc_user", bits_json(c.bits.adc_bits_user)}};
    j["system"] = sys;

    ordered_json target;
    if (const auto *p = std::get_if<PointTarget>(&spec.target))
    {
        target["type"] = "point";
        target["theta_deg"] = units::rad_to_deg(p->theta);
        target["eta2_db"] = units::linear_to_db(std::norm(p->eta));
    }
    else if (const auto *e = std::get_if<ExtendedTarget>(&spec.target))
    {
        target["type"] = "extended";
        target["sigma_g2_db"] = units::linear_to_db(e->sigma_g2);
        target["redraw"] = spec.redraw_target;
    }
    else
    {
        target["type"] = "custom";
        target["G"] = matrix_json(std::get<CustomTarget>(spec.target).G);
    }
    j["target"] = target;

    ordered_json algs = ordered_json::array();
    for (Algorithm a : spec.algorithms)
        algs.push_back(to_string(a));
    j["experiment"] = {{"axis", to_string(spec.axis)}, {"grid", spec.grid},        {"trials", spec.trials},
                       {"seed", spec.seed},            {"threads", spec.threads}, {"algorithms", algs}};

    const DetectionSettings &det = spec.detection;
    j["detection"] = {{"trials", det.trials},
                      {"snapshots", det.snapshots},
                      {"sampler", to_string(det.sampler.mode)},
                      {"loading_factor", det.sampler.loading},
                      {"pfa_grid", spec.pfa_grid},
                      {"roc_points", spec.roc_points}};

    j["solver"] = {{"force_mm", spec.solver.force_mm},
                   {"sdr_engine", rc.sdr_engine},
                   {"feasibility_precheck", spec.solver.sdr.feasibility_precheck},
                   {"conic_eps", spec.solver.sdr.conic.eps_abs},
                   {"mm_eps", spec.solver.mm.eps},
                   {"mm_max_iters", spec.solver.mm.max_iters}};

    const PowerModel &pm = rc.power_model;
    j["power_model"] = {{"p_lo_mw", pm.p_lo * 1e3},
                        {"p_rf_mw", pm.p_rf * 1e3},
                        {"c_dac_mw", pm.c_dac * 1e3},
                        {"c_adc_mw", pm.c_adc * 1e3},
                        {"kappa", pm.kappa}};
    return j.dump(indent);
}

std::string config_hash(const RunConfig &config)
{
    // Threads do not change results, so they do not enter the hash.
    RunConfig c = config;
    c.spec.threads = 0;
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : canonical_json(c, -1))
    {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return hex64(h);
}

std::string to_json(const ChannelSet &channels, int indent)
{
    ordered_json j;
    j["seed"] = channels.seed;
    j["H"] = matrix_json(channels.H);
    j["G"] = matrix_json(channels.G);
    return j.dump(indent);
}

ChannelSet channels_from_json(const std::string &json_text)
{
    ordered_json root;
    try
    {
        root = ordered_json::parse(json_text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    Section s(root, "");
    ChannelSet cs;
    s.unsigned_integer("seed", cs.seed);
    const auto *h = s.get("H");
    const auto *g = s.get("G");
    if (h == nullptr || g == nullptr)
        Section::fail("channels need both H and G");
    cs.H = matrix_from(*h, "H");
    cs.G = matrix_from(*g, "G");
    if (cs.H.rows() > 0 && cs.H.cols() != cs.G.cols())
        Section::fail("H and G disagree on the number of transmit antennas");
    cs.target = CustomTarget{cs.G};
    s.finish();
    return cs;
}

std::string to_json(const BeamformingSolution &sol, int indent)
{
    ordered_json j;
    j["objective_value"] = sol.objective_value;
    j["radar_sqnr"] = sol.radar_sqnr;
    j["radar_sqnr_db"] = db_or_inf(sol.radar_sqnr);
    j["radar_sqnr_lambda_max"] = sol.radar_sqnr_lambda_max;
    j["sqinr_per_user"] = vector_json(sol.sqinr_per_user);
    ordered_json db = ordered_json::array();
    for (Eigen::Index k = 0; k < sol.sqinr_per_user.size(); ++k)
        db.push_back(db_or_inf(sol.sqinr_per_user(k)));
    j["sqinr_per_user_db"] = db;
    const SolverInfo &si = sol.solver_info;
    j["solver"] = {{"solver", si.solver},
                   {"status", si.status},
                   {"iterations", si.iterations},
                   {"conic_iterations", si.conic_iterations},
                   {"primal_residual", si.primal_residual},
                   {"dual_residual", si.dual_residual},
                   {"objective_history", si.objective_history}};
    j["W_c"] = matrix_json(sol.W_c);
    j["W_r"] = matrix_json(sol.W_r);
    j["R_x"] = matrix_json(sol.R_x);
    return j.dump(indent);
}

BeamformingSolution solution_from_json(const std::string &json_text, const Scenario &scenario)
{
    ordered_json root;
    try
    {
        root = ordered_json::parse(json_text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object() || !root.contains("W_c") || !root.contains("W_r"))
        throw ConfigError("solution needs W_c and W_r");
    BeamformingSolution sol;
    sol.W_c = matrix_from(root["W_c"], "W_c");
    sol.W_r = matrix_from(root["W_r"], "W_r");
    if (sol.W_c.size() == 0)
        sol.W_c.resize(scenario.config.n_tx, 0);
    if (sol.W_r.rows() != scenario.config.n_tx || sol.W_c.rows() != scenario.config.n_tx ||
        sol.W_c.cols() != scenario.config.n_users)
        throw ConfigError("solution shape does not match the scenario");
    if (root.contains("solver") && root["solver"].is_object())
    {
        const auto &s = root["solver"];
        sol.solver_info.solver = s.value("solver", "");
        sol.solver_info.status = s.value("status", "");
        sol.solver_info.iterations = s.value("iterations", 0);
    }
    evaluate_solution(sol, scenario);
    return sol;
}

} // namespace quantbeam
