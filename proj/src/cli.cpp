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

#include "quantbeam/cli.hpp"

#include "quantbeam/run_config.hpp"
#include "quantbeam/units.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#ifndef QUANTBEAM_GIT_DESCRIBE
#define QUANTBEAM_GIT_DESCRIBE "unknown"
#endif
#ifndef QUANTBEAM_VERSION
#define QUANTBEAM_VERSION "0.0.0"
#endif

namespace quantbeam::cli
{

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace
{

struct Options
{
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool force_mm = false;
    std::string algorithms;
    int threads = -1;
};

/// Invalid command-line values discovered after parsing.
class UsageError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

std::string num(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

double db(double lin) { return lin > 0.0 ? units::linear_to_db(lin) : -std::numeric_limits<double>::infinity(); }

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read configuration file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Outputs
{
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void write(const std::string &name, const std::string &content)
    {
        std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot write " + (dir_ / name).string());
        f << content;
        names_.push_back(name);
    }

    void manifest(const std::string &command, const RunConfig &rc)
    {
        ordered_json m;
        m["tool"] = "quantbeam";
        m["version"] = QUANTBEAM_VERSION;
        m["git_describe"] = QUANTBEAM_GIT_DESCRIBE;
        m["command"] = command;
        m["seed"] = rc.spec.seed;
        m["config_hash"] = config_hash(rc);
        // Thread count is left out so that outputs do not depend on it.
        RunConfig recorded = rc;
        recorded.spec.threads = 0;
        m["config"] = ordered_json::parse(canonical_json(recorded, -1));
        m["outputs"] = names_;
        std::ofstream f(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
        f << m.dump(2) << '\n';
    }

    [[nodiscard]] const fs::path &dir() const { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> names_;
};

RunConfig load_config(const Options &opt)
{
    RunConfig rc = opt.config_path.empty() ? parse_run_config("{}") : parse_run_config(read_file(opt.config_path));
    if (opt.seed_given)
        rc.spec.seed = opt.seed;
    if (opt.force_mm)
        rc.spec.solver.force_mm = true;
    if (opt.threads >= 0)
        rc.spec.threads = opt.threads;
    if (!opt.algorithms.empty())
    {
        rc.spec.algorithms.clear();
        std::stringstream ss(opt.algorithms);
        std::string name;
        while (std::getline(ss, name, ','))
        {
            try
            {
                rc.spec.algorithms.push_back(algorithm_from_string(name));
            }
            catch (const std::invalid_argument &e)
            {
                throw UsageError(std::string("--algorithms: ") + e.what());
            }
        }
        if (rc.spec.algorithms.empty())
            throw UsageError("--algorithms: no algorithm named");
    }
    return rc;
}

void print_infeasible(const InfeasibleError &e, std::ostream &err)
{
    err << "infeasible: " << e.what() << '\n';
    for (const UserDiagnostic &d : e.users())
    {
        err << "  user " << d.user << ": threshold " << num(db(d.gamma)) << " dB, ADC ceiling " << num(db(d.ceiling))
            << " dB";
        if (!std::isnan(d.margin))
            err << ", margin " << num(d.margin);
        err << '\n';
    }
}

int cmd_solve(const RunConfig &rc, const Options &opt, std::ostream &out)
{
    const ExperimentSpec &spec = rc.spec;
    const Scenario sc = make_scenario(spec.config, trial_channels(spec, spec.config, 0));
    Outputs files(opt.out_dir);
    files.write("channels.json", to_json(sc.channels) + "\n");

    // Without --algorithms only the robust design is computed.
    std::vector<Algorithm> algs{Algorithm::Robust};
    if (!opt.algorithms.empty())
        algs = spec.algorithms;
    for (Algorithm a : algs)
    {
        const BeamformingSolution sol = solve_algorithm(a, sc, spec.solver);
        files.write("solution_" + to_string(a) + ".json", to_json(sol) + "\n");
        const SolverInfo &si = sol.solver_info;
        out << to_string(a) << ": solver " << si.solver << " (" << si.status << "), " << si.iterations
            << " iterations, " << si.conic_iterations << " conic iterations\n";
        out << "  radar SQNR " << num(db(sol.radar_sqnr)) << " dB (single beam " << num(db(sol.radar_sqnr_lambda_max))
            << " dB)\n";
        for (Eigen::Index k = 0; k < sol.sqinr_per_user.size(); ++k)
            out << "  user " << k << " SQINR " << num(db(sol.sqinr_per_user(k))) << " dB (threshold "
                << num(db(sc.config.gamma(k))) << " dB)\n";
    }
    files.manifest("solve", rc);
    return kExitOk;
}

int cmd_sweep(RunConfig rc, const Options &opt, std::ostream &out)
{
    rc.spec.validate();
    const SweepResult res = run_sweep(rc.spec);
    const std::string axis = to_string(rc.spec.axis);
    Outputs files(opt.out_dir);
    for (Algorithm a : rc.spec.algorithms)
    {
        std::ostringstream csv;
        csv << axis
            << ",trials,feasible,achieved_mean_sqinr_db,achieved_min_sqinr_db,worst_sqinr_db,radar_sqnr_db,"
               "mean_iterations\n";
        for (const SweepRow &r : res.rows)
        {
            if (r.algorithm != a)
                continue;
            csv << num(r.axis_value) << ',' << r.trials << ',' << r.feasible << ',' << num(r.mean_sqinr_db) << ','
                << num(r.min_sqinr_db) << ',' << num(r.worst_sqinr_db) << ',' << num(r.radar_sqnr_db) << ','
                << num(r.mean_iterations) << '\n';
            out << to_string(a) << ' ' << axis << '=' << num(r.axis_value) << ": " << r.feasible << '/' << r.trials
                << " feasible, min SQINR " << num(r.min_sqinr_db) << " dB, radar SQNR " << num(r.radar_sqnr_db)
                << " dB\n";
        }
        files.write("sweep_" + to_string(a) + ".csv", csv.str());
    }
    std::ostringstream trials;
    trials << axis << ",algorithm,trial,status,min_sqinr_db,radar_sqnr_db,iterations\n";
    for (const TrialRecord &r : res.records)
    {
        const double min_sqinr = r.sqinr.size() > 0 ? db(r.sqinr.minCoeff()) : std::nan("");
        trials << num(r.axis_value) << ',' << to_string(r.algorithm) << ',' << r.trial << ',' << r.status << ','
               << num(r.status == "ok" ? min_sqinr : std::nan("")) << ','
               << num(r.status == "ok" ? db(r.radar_sqnr) : std::nan("")) << ',' << r.iterations << '\n';
    }
    files.write("trials.csv", trials.str());
    files.manifest("sweep", rc);
    return kExitOk;
}

int cmd_roc(RunConfig rc, const Options &opt, std::ostream &out)
{
    // The ROC uses the system section as written unless a grid is given.
    if (!rc.grid_given)
        rc.spec.grid.clear();
    else if (rc.spec.grid.empty())
        throw ConfigError("experiment.grid is empty");
    const std::vector<RocCurve> curves = roc_experiment(rc.spec);
    Outputs files(opt.out_dir);
    std::ostringstream ops;
    ops << "algorithm,p_fa_target,threshold,p_fa,p_fa_lo,p_fa_hi,p_d,p_d_lo,p_d_hi,analytic_sqnr_db\n";
    for (const RocCurve &c : curves)
    {
        std::ostringstream csv;
        csv << "threshold,p_fa,p_fa_lo,p_fa_hi,p_d,p_d_lo,p_d_hi\n";
        for (const RocPoint &p : c.table)
            csv << num(p.threshold) << ',' << num(p.p_fa) << ',' << num(p.p_fa_ci.lo) << ',' << num(p.p_fa_ci.hi)
                << ',' << num(p.p_d) << ',' << num(p.p_d_ci.lo) << ',' << num(p.p_d_ci.hi) << '\n';
        files.write("roc_" + to_string(c.algorithm) + ".csv", csv.str());
        out << to_string(c.algorithm) << ": analytic radar SQNR " << num(db(c.analytic_sqnr)) << " dB\n";
        for (std::size_t i = 0; i < c.at_grid.size(); ++i)
        {
            const RocPoint &p = c.at_grid[i];
            const double target = rc.spec.pfa_grid[i];
            ops << to_string(c.algorithm) << ',' << num(target) << ',' << num(p.threshold) << ',' << num(p.p_fa)
                << ',' << num(p.p_fa_ci.lo) << ',' << num(p.p_fa_ci.hi) << ',' << num(p.p_d) << ','
                << num(p.p_d_ci.lo) << ',' << num(p.p_d_ci.hi) << ',' << num(db(c.analytic_sqnr)) << '\n';
            out << "  P_FA <= " << num(target) << ": P_D " << num(p.p_d) << " [" << num(p.p_d_ci.lo) << ", "
                << num(p.p_d_ci.hi) << "]\n";
        }
    }
    files.write("roc_operating_points.csv", ops.str());
    files.manifest("roc", rc);
    return kExitOk;
}

int cmd_ee(RunConfig rc, const Options &opt, std::ostream &out)
{
    if (rc.grid_given && rc.spec.axis != SweepAxis::Bits)
        throw ConfigError("ee sweeps the bit resolution: set experiment.axis to \"bits\"");
    if (!rc.grid_given)
        rc.spec.grid = default_grid(SweepAxis::Bits);
    if (rc.spec.grid.empty())
        throw ConfigError("experiment.grid is empty");
    for (double b : rc.spec.grid)
        if (b < 1.0 || b != std::floor(b))
            throw ConfigError("experiment.grid: bit counts must be integers >= 1");
    const std::vector<EeRow> rows = ee_sweep(rc.spec, rc.power_model);
    std::ostringstream csv;
    csv << "b,ee,trials,feasible,rate,power_w\n";
    for (const EeRow &r : rows)
    {
        csv << r.bits << ',' << num(r.ee) << ',' << r.trials << ',' << r.feasible << ',' << num(r.rate) << ','
            << num(r.power_w) << '\n';
        out << "b=" << r.bits << ": EE " << num(r.ee) << " bit/s/Hz/W (" << r.feasible << '/' << r.trials
            << " feasible, " << num(r.power_w) << " W)\n";
    }
    Outputs files(opt.out_dir);
    files.write("ee.csv", csv.str());
    files.manifest("ee", rc);
    return kExitOk;
}

} // namespace

void configure_logging()
{
    static const bool done = [] {
        auto logger = spdlog::stderr_logger_mt("quantbeam");
        spdlog::set_default_logger(logger);
        spdlog::set_pattern("[%l] %v");
        spdlog::level::level_enum level = spdlog::level::warn;
        if (const char *env = std::getenv("QUANTBEAM_LOG"); env != nullptr && *env != '\0')
        {
            const auto parsed = spdlog::level::from_str(env);
            // from_str maps unknown names to off; only accept "off" verbatim.
            if (parsed != spdlog::level::off || std::string(env) == "off")
                level = parsed;
        }
        spdlog::set_level(level);
        return true;
    }();
    (void)done;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    configure_logging();

    CLI::App app{"Robust ISAC beamforming under low-resolution converters"};
    app.name(args.empty() ? "quantbeam" : args.front());
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(QUANTBEAM_VERSION) + " (" + QUANTBEAM_GIT_DESCRIBE + ")");

    Options opt;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", opt.config_path, "JSON run configuration (defaults when omitted)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out-dir", opt.out_dir, "directory for CSV/JSON outputs")->capture_default_str();
        sub->add_option("--seed", opt.seed, "overrides experiment.seed")
            ->each([&](const std::string &) { opt.seed_given = true; });
        sub->add_flag("--force-mm", opt.force_mm, "use the MM solver even when SDR applies");
        sub->add_option("--algorithms", opt.algorithms, "comma list of robust, non_robust, radar_only");
        sub->add_option("--threads", opt.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    };
    CLI::App *solve = app.add_subcommand("solve", "design beamformers for trial 0");
    CLI::App *sweep = app.add_subcommand("sweep", "sweep experiment.axis over experiment.grid");
    CLI::App *roc = app.add_subcommand("roc", "energy-detector ROC with mid-rise converters");
    CLI::App *ee = app.add_subcommand("ee", "energy efficiency versus converter resolution");
    CLI::App *defaults = app.add_subcommand("defaults", "print the expanded default configuration");
    for (CLI::App *s : {solve, sweep, roc, ee})
        add_common(s);

    std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rest.begin(), rest.end()); // CLI11 consumes the vector from the back
    try
    {
        app.parse(rest);
    }
    catch (const CLI::CallForHelp &e)
    {
        out << app.help();
        return kExitOk;
    }
    catch (const CLI::CallForVersion &e)
    {
        out << e.what() << '\n';
        return kExitOk;
    }
    catch (const CLI::ParseError &e)
    {
        err << e.what() << '\n';
        return kExitInvalidConfig;
    }

    try
    {
        if (defaults->parsed())
        {
            out << canonical_json(parse_run_config("{}")) << '\n';
            return kExitOk;
        }
        const RunConfig rc = load_config(opt);
        if (solve->parsed())
            return cmd_solve(rc, opt, out);
        if (sweep->parsed())
            return cmd_sweep(rc, opt, out);
        if (roc->parsed())
            return cmd_roc(rc, opt, out);
        return cmd_ee(rc, opt, out);
    }
    catch (const InfeasibleError &e)
    {
        print_infeasible(e, err);
        return kExitInfeasible;
    }
    catch (const SolverFailure &e)
    {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolverFailure;
    }
    catch (const NumericalError &e)
    {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolverFailure;
    }
    catch (const std::invalid_argument &e)
    {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitInvalidConfig;
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

} // namespace quantbeam::cli
