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

#include "quantbeam/sim.hpp"

#include "quantbeam/units.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace quantbeam
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double to_db(double lin)
{
    if (std::isnan(lin))
        return kNaN;
    return lin > 0.0 ? units::linear_to_db(lin) : -std::numeric_limits<double>::infinity();
}

} // namespace

void parallel_for(int n, int threads, const std::function<void(int)> &fn)
{
    if (n <= 0)
        return;
    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, n);
    if (workers == 1)
    {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (int i = next++; i < n; i = next++)
        {
            try
            {
                fn(i);
            }
            catch (...)
            {
                const std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back(work);
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

// --- algorithms ----------------------------------------------------------

std::string to_string(Algorithm a)
{
    switch (a)
    {
    case Algorithm::Robust:
        return "robust";
    case Algorithm::NonRobust:
        return "non_robust";
    case Algorithm::RadarOnly:
        return "radar_only";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string &s)
{
    if (s == "robust")
        return Algorithm::Robust;
    if (s == "non_robust")
        return Algorithm::NonRobust;
    if (s == "radar_only")
        return Algorithm::RadarOnly;
    throw std::invalid_argument("unknown algorithm '" + s + "' (expected robust, non_robust or radar_only)");
}

bool sdr_applicable(const Scenario &scenario)
{
    return is_point(scenario.channels.target) && scenario.config.bits.uniform_dac();
}

BeamformingSolution solve_robust(const Scenario &scenario, const SolveSettings &settings)
{
    if (sdr_applicable(scenario) && !settings.force_mm)
        return solve_sdr(scenario, settings.sdr);
    return run_mm(scenario, settings.mm).solution;
}

Scenario unquantized(const Scenario &scenario)
{
    Scenario s = scenario;
    const auto &c = scenario.config;
    s.config.bits = BitAllocation::ideal(c.n_tx, c.n_rx, c.n_users);
    s.profile = QuantizationProfile::ideal(c.n_tx, c.n_rx, c.n_users);
    return s;
}

Scenario without_users(const Scenario &scenario)
{
    Scenario s = scenario;
    s.config.n_users = 0;
    s.config.gamma = RVector();
    s.config.bits.adc_bits_user.clear();
    s.channels.H = CMatrix(0, scenario.config.n_tx);
    s.profile.alpha_user = RVector();
    return s;
}

BeamformingSolution non_robust_baseline(const Scenario &scenario, const SolveSettings &settings)
{
    BeamformingSolution sol = solve_robust(unquantized(scenario), settings);
    evaluate_solution(sol, scenario);
    return sol;
}

BeamformingSolution radar_only_baseline(const Scenario &scenario, const SolveSettings &settings)
{
    BeamformingSolution sol = solve_robust(without_users(scenario), settings);
    sol.W_c = CMatrix::Zero(scenario.config.n_tx, scenario.config.n_users);
    evaluate_solution(sol, scenario);
    return sol;
}

BeamformingSolution solve_algorithm(Algorithm a, const Scenario &scenario, const SolveSettings &settings)
{
    switch (a)
    {
    case Algorithm::Robust:
        return solve_robust(scenario, settings);
    case Algorithm::NonRobust:
        return non_robust_baseline(scenario, settings);
    case Algorithm::RadarOnly:
        return radar_only_baseline(scenario, settings);
    }
    throw std::invalid_argument("solve_algorithm: unknown algorithm");
}

QuantizationProfile design_profile(Algorithm a, const Scenario &scenario)
{
    if (a == Algorithm::NonRobust)
        return unquantized(scenario).profile;
    return scenario.profile;
}

// --- detection -----------------------------------------------------------

Interval wilson_interval(std::size_t successes, std::size_t n, double z)
{
    if (n == 0)
        return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
    const double half = z / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

DetectionStats detection_statistics(const BeamformingSolution &sol, const CVector &u, const Scenario &truth,
                                    const DetectionSettings &settings)
{
    require(settings.trials >= 1 && settings.snapshots >= 1, "detection: need trials >= 1 and snapshots >= 1");
    require(u.size() == truth.config.n_rx, "detection: receive beamformer has the wrong length");
    const SignalSampler sampler(sol, truth, settings.sampler);
    DetectionStats stats;
    stats.h0.resize(static_cast<std::size_t>(settings.trials));
    stats.h1.resize(static_cast<std::size_t>(settings.trials));
    parallel_for(settings.trials, settings.threads, [&](int t) {
        const RngStream base(settings.seed, static_cast<std::uint64_t>(t), StreamTag::Detection);
        for (int h = 0; h < 2; ++h)
        {
            RngStream rng = base.split(static_cast<std::uint64_t>(h));
            double acc = 0.0;
            for (int l = 0; l < settings.snapshots; ++l)
                acc += std::norm(u.dot(sampler.draw_radar(rng, h == 1)));
            (h == 1 ? stats.h1 : stats.h0)[static_cast<std::size_t>(t)] = acc / settings.snapshots;
        }
    });
    return stats;
}

namespace
{

RocPoint point_at(const std::vector<double> &h0_sorted, const std::vector<double> &h1_sorted, double threshold)
{
    auto above = [&](const std::vector<double> &v) {
        return static_cast<std::size_t>(v.end() - std::upper_bound(v.begin(), v.end(), threshold));
    };
    RocPoint p;
    p.threshold = threshold;
    const std::size_t fa = above(h0_sorted), d = above(h1_sorted);
    p.p_fa = static_cast<double>(fa) / static_cast<double>(h0_sorted.size());
    p.p_d = static_cast<double>(d) / static_cast<double>(h1_sorted.size());
    p.p_fa_ci = wilson_interval(fa, h0_sorted.size());
    p.p_d_ci = wilson_interval(d, h1_sorted.size());
    return p;
}

} // namespace

std::vector<RocPoint> roc_table(const DetectionStats &stats, int max_points)
{
    require(!stats.h0.empty() && !stats.h1.empty(), "roc_table: empty statistics");
    require(max_points >= 2, "roc_table: need at least two points");
    std::vector<double> h0 = stats.h0, h1 = stats.h1;
    std::sort(h0.begin(), h0.end());
    std::sort(h1.begin(), h1.end());
    std::vector<double> pooled = h0;
    pooled.insert(pooled.end(), h1.begin(), h1.end());
    std::sort(pooled.begin(), pooled.end(), std::greater<>());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

    // the first threshold (the maximum) gives P_FA = P_D = 0; add one below
    // the minimum for P_FA = P_D = 1
    std::vector<double> thresholds;
    const auto n = pooled.size();
    const auto m = std::min<std::size_t>(n, static_cast<std::size_t>(max_points - 1));
    for (std::size_t i = 0; i < m; ++i)
    {
        const std::size_t idx = m == 1 ? 0 : i * (n - 1) / (m - 1);
        if (thresholds.empty() || thresholds.back() != pooled[idx])
            thresholds.push_back(pooled[idx]);
    }
    thresholds.push_back(std::nextafter(pooled.back(), -std::numeric_limits<double>::infinity()));

    std::vector<RocPoint> out;
    out.reserve(thresholds.size());
    for (double t : thresholds)
        out.push_back(point_at(h0, h1, t));
    return out;
}

RocPoint operating_point(const DetectionStats &stats, double p_fa)
{
    require(p_fa >= 0.0 && p_fa <= 1.0, "operating_point: P_FA must lie in [0, 1]");
    require(!stats.h0.empty() && !stats.h1.empty(), "operating_point: empty statistics");
    std::vector<double> h0 = stats.h0, h1 = stats.h1;
    std::sort(h0.begin(), h0.end());
    std::sort(h1.begin(), h1.end());
    // at most floor(p_fa n) null statistics may exceed the threshold
    const auto n = h0.size();
    const auto allowed = static_cast<std::size_t>(std::floor(p_fa * static_cast<double>(n) + 1e-9));
    if (allowed >= n)
        return point_at(h0, h1, std::nextafter(h0.front(), -std::numeric_limits<double>::infinity()));
    double threshold = h0[n - 1 - allowed];
    return point_at(h0, h1, threshold);
}

// --- experiments ---------------------------------------------------------

std::string to_string(SweepAxis a)
{
    switch (a)
    {
    case SweepAxis::GammaDb:
        return "gamma_db";
    case SweepAxis::PowerDbm:
        return "power_dbm";
    case SweepAxis::Antennas:
        return "antennas";
    case SweepAxis::Bits:
        return "bits";
    }
    return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string &s)
{
    for (SweepAxis a : {SweepAxis::GammaDb, SweepAxis::PowerDbm, SweepAxis::Antennas, SweepAxis::Bits})
        if (to_string(a) == s)
            return a;
    throw std::invalid_argument("unknown sweep axis '" + s + "' (expected gamma_db, power_dbm, antennas or bits)");
}

void ExperimentSpec::validate() const
{
    require(!grid.empty(), "experiment: sweep grid is empty");
    require(!algorithms.empty(), "experiment: no algorithms selected");
    require(trials >= 1, "experiment: trials must be >= 1");
    for (double v : grid)
        (void)apply_axis(config, axis, v);
    validate_target(target);
}

SystemConfig apply_axis(const SystemConfig &config, SweepAxis axis, double value)
{
    SystemConfig c = config;
    switch (axis)
    {
    case SweepAxis::GammaDb:
        c.gamma = RVector::Constant(c.n_users, units::db_to_linear(value));
        break;
    case SweepAxis::PowerDbm:
        c.power_w = units::dbm_to_watts(value);
        break;
    case SweepAxis::Antennas: {
        const int n = static_cast<int>(std::lround(value));
        require(n >= 1 && std::abs(value - n) < 1e-9, "sweep: antenna counts must be positive integers");
        require(config.bits.uniform_dac(), "sweep: the antenna axis needs uniform DAC resolutions");
        require(std::adjacent_find(config.bits.adc_bits_bs.begin(), config.bits.adc_bits_bs.end(),
                                   std::not_equal_to<>()) == config.bits.adc_bits_bs.end(),
                "sweep: the antenna axis needs uniform BS ADC resolutions");
        c.n_tx = c.n_rx = n;
        c.bits.dac_bits.assign(static_cast<std::size_t>(n), config.bits.dac_bits.front());
        c.bits.adc_bits_bs.assign(static_cast<std::size_t>(n), config.bits.adc_bits_bs.front());
        break;
    }
    case SweepAxis::Bits: {
        const int b = static_cast<int>(std::lround(value));
        require(b >= 1 && std::abs(value - b) < 1e-9, "sweep: bit depths must be positive integers");
        c.bits = BitAllocation::uniform(c.n_tx, c.n_rx, c.n_users, BitDepth::finite(b));
        break;
    }
    }
    c.validate();
    return c;
}

ChannelSet trial_channels(const ExperimentSpec &spec, const SystemConfig &config, std::uint64_t trial)
{
    ChannelSet cs = draw_channels(spec.target, config.n_users, config.n_tx, config.n_rx, spec.seed, trial);
    if (!spec.redraw_target && trial != 0)
        cs.G = draw_channels(spec.target, config.n_users, config.n_tx, config.n_rx, spec.seed, 0).G;
    return cs;
}

namespace
{

TrialRecord run_one(Algorithm a, const Scenario &sc, const SolveSettings &settings)
{
    TrialRecord r;
    r.algorithm = a;
    try
    {
        const BeamformingSolution sol = solve_algorithm(a, sc, settings);
        r.status = "ok";
        r.sqinr = sol.sqinr_per_user;
        r.radar_sqnr = sol.radar_sqnr;
        r.iterations = sol.solver_info.iterations;
    }
    catch (const InfeasibleError &e)
    {
        r.status = "infeasible";
        spdlog::debug("{}: {}", to_string(a), e.what());
    }
    catch (const SolverFailure &e)
    {
        r.status = "failed";
        spdlog::warn("{}: {}", to_string(a), e.what());
    }
    catch (const NumericalError &e)
    {
        r.status = "failed";
        spdlog::warn("{}: {}", to_string(a), e.what());
    }
    return r;
}

SweepRow aggregate(double value, Algorithm a, const std::vector<const TrialRecord *> &recs)
{
    SweepRow row;
    row.axis_value = value;
    row.algorithm = a;
    row.trials = static_cast<int>(recs.size());
    double sum_sqinr = 0.0, sum_min = 0.0, worst = std::numeric_limits<double>::infinity(), sum_radar = 0.0,
           sum_iter = 0.0;
    std::size_t n_users = 0;
    for (const TrialRecord *r : recs)
    {
        if (r->status != "ok")
            continue;
        ++row.feasible;
        sum_radar += r->radar_sqnr;
        sum_iter += r->iterations;
        if (r->sqinr.size() > 0)
        {
            sum_sqinr += r->sqinr.sum();
            n_users += static_cast<std::size_t>(r->sqinr.size());
            sum_min += r->sqinr.minCoeff();
            worst = std::min(worst, r->sqinr.minCoeff());
        }
    }
    if (row.feasible == 0)
    {
        row.mean_sqinr_db = row.min_sqinr_db = row.worst_sqinr_db = row.radar_sqnr_db = row.mean_iterations = kNaN;
        return row;
    }
    const double f = row.feasible;
    row.radar_sqnr_db = to_db(sum_radar / f);
    row.mean_iterations = sum_iter / f;
    if (n_users == 0)
        row.mean_sqinr_db = row.min_sqinr_db = row.worst_sqinr_db = kNaN;
    else
    {
        row.mean_sqinr_db = to_db(sum_sqinr / static_cast<double>(n_users));
        row.min_sqinr_db = to_db(sum_min / f);
        row.worst_sqinr_db = to_db(worst);
    }
    return row;
}

} // namespace

SweepResult run_sweep(const ExperimentSpec &spec)
{
    spec.validate();
    const int n_grid = static_cast<int>(spec.grid.size());
    const int n_alg = static_cast<int>(spec.algorithms.size());
    const int units = n_grid * spec.trials;
    std::vector<TrialRecord> records(static_cast<std::size_t>(units * n_alg));

    parallel_for(units, spec.threads, [&](int unit) {
        const int g = unit / spec.trials;
        const int t = unit % spec.trials;
        const double value = spec.grid[static_cast<std::size_t>(g)];
        const SystemConfig cfg = apply_axis(spec.config, spec.axis, value);
        const Scenario sc = make_scenario(cfg, trial_channels(spec, cfg, static_cast<std::uint64_t>(t)));
        for (int a = 0; a < n_alg; ++a)
        {
            TrialRecord r = run_one(spec.algorithms[static_cast<std::size_t>(a)], sc, spec.solver);
            r.axis_value = value;
            r.trial = t;
            records[static_cast<std::size_t>(unit * n_alg + a)] = std::move(r);
        }
        spdlog::debug("sweep: {} = {} trial {} done", to_string(spec.axis), value, t);
    });

    SweepResult out;
    for (int g = 0; g < n_grid; ++g)
        for (int a = 0; a < n_alg; ++a)
        {
            std::vector<const TrialRecord *> recs;
            for (int t = 0; t < spec.trials; ++t)
                recs.push_back(&records[static_cast<std::size_t>((g * spec.trials + t) * n_alg + a)]);
            out.rows.push_back(aggregate(spec.grid[static_cast<std::size_t>(g)],
                                         spec.algorithms[static_cast<std::size_t>(a)], recs));
        }
    out.records = std::move(records);
    return out;
}

SweepResult tradeoff_sweep(const ExperimentSpec &spec)
{
    ExperimentSpec s = spec;
    s.axis = SweepAxis::GammaDb;
    return run_sweep(s);
}

std::vector<RocCurve> roc_experiment(const ExperimentSpec &spec)
{
    require(!spec.algorithms.empty(), "roc: no algorithms selected");
    const SystemConfig cfg = spec.grid.empty() ? spec.config : apply_axis(spec.config, spec.axis, spec.grid.front());
    cfg.validate();
    const Scenario sc = make_scenario(cfg, trial_channels(spec, cfg, 0));

    DetectionSettings ds = spec.detection;
    ds.seed = spec.seed;
    ds.threads = spec.threads;

    std::vector<RocCurve> curves;
    for (Algorithm a : spec.algorithms)
    {
        RocCurve c;
        c.algorithm = a;
        c.solution = solve_algorithm(a, sc, spec.solver);
        c.u = receive_beamformer(sc.channels.G, design_profile(a, sc), c.solution.R_x, cfg.sigma_r2);
        c.analytic_sqnr = radar_sqnr(c.u, sc.channels.G, sc.profile, c.solution.R_x, cfg.sigma_r2);
        c.stats = detection_statistics(c.solution, c.u, sc, ds);
        c.table = roc_table(c.stats, spec.roc_points);
        for (double pfa : spec.pfa_grid)
            c.at_grid.push_back(operating_point(c.stats, pfa));
        spdlog::info("roc: {} designed, analytic SQNR {:.2f} dB", to_string(a), to_db(c.analytic_sqnr));
        curves.push_back(std::move(c));
    }
    return curves;
}

std::vector<EeRow> ee_sweep(const ExperimentSpec &spec, const PowerModel &pm)
{
    require(!spec.grid.empty(), "ee: bit grid is empty");
    require(spec.trials >= 1, "ee: trials must be >= 1");
    pm.validate();
    const int n_grid = static_cast<int>(spec.grid.size());
    struct Cell
    {
        bool ok = false;
        double ee = 0.0, rate = 0.0;
    };
    std::vector<Cell> cells(static_cast<std::size_t>(n_grid * spec.trials));
    std::vector<SystemConfig> configs;
    for (double b : spec.grid)
        configs.push_back(apply_axis(spec.config, SweepAxis::Bits, b));

    parallel_for(n_grid * spec.trials, spec.threads, [&](int unit) {
        const int g = unit / spec.trials;
        const int t = unit % spec.trials;
        const SystemConfig &cfg = configs[static_cast<std::size_t>(g)];
        const Scenario sc = make_scenario(cfg, trial_channels(spec, cfg, static_cast<std::uint64_t>(t)));
        const TrialRecord r = run_one(Algorithm::Robust, sc, spec.solver);
        Cell &c = cells[static_cast<std::size_t>(unit)];
        if (r.status != "ok")
            return;
        c.ok = true;
        c.ee = energy_efficiency(r.sqinr, r.radar_sqnr, cfg, pm);
        c.rate = std::log2(1.0 + r.radar_sqnr);
        for (Eigen::Index k = 0; k < r.sqinr.size(); ++k)
            c.rate += std::log2(1.0 + r.sqinr(k));
    });

    std::vector<EeRow> rows;
    for (int g = 0; g < n_grid; ++g)
    {
        const SystemConfig &cfg = configs[static_cast<std::size_t>(g)];
        EeRow row;
        row.bits = static_cast<int>(std::lround(spec.grid[static_cast<std::size_t>(g)]));
        row.trials = spec.trials;
        row.power_w = bs_power(cfg, pm) + users_power(cfg, pm);
        double ee = 0.0, rate = 0.0;
        for (int t = 0; t < spec.trials; ++t)
        {
            const Cell &c = cells[static_cast<std::size_t>(g * spec.trials + t)];
            if (!c.ok)
                continue;
            ++row.feasible;
            ee += c.ee;
            rate += c.rate;
        }
        row.ee = row.feasible > 0 ? ee / row.feasible : kNaN;
        row.rate = row.feasible > 0 ? rate / row.feasible : kNaN;
        rows.push_back(row);
    }
    return rows;
}

} // namespace quantbeam
