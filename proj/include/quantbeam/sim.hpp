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

#pragma once

// Experiment harness: signal-level sampling, detection trials, sweeps over a
// system parameter and the energy-efficiency study.

#include "quantbeam/metrics.hpp"
#include "quantbeam/mm_solver.hpp"
#include "quantbeam/sdr_solver.hpp"
#include "quantbeam/system.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace quantbeam
{

// --- signal sampler ------------------------------------------------------

/// How converters are simulated: the additive noise model or the actual
/// mid-rise quantizer.
enum class SamplerMode
{
    Aqnm,
    Midrise,
};

std::string to_string(SamplerMode m);
SamplerMode sampler_mode_from_string(const std::string &s);

/// One channel use. Users' entries are indexed by k.
struct Snapshot
{
    CVector s;         ///< symbols [s_c; s_r], i.i.d. CN(0, 1)
    CVector x;         ///< V s
    CVector x_q;       ///< DAC output
    CVector y_bs;      ///< G x_q + z_BS
    CVector y_bs_q;    ///< BS ADC output
    CVector y_users;   ///< h_k^H x_q + z_k
    CVector y_users_q; ///< user ADC output
};

struct SamplerSettings
{
    SamplerMode mode = SamplerMode::Aqnm;
    double loading = kDefaultLoadingFactor; ///< mid-rise loading factor
};

/// Draws snapshots of a fixed design on a fixed scenario.
///
/// Each converter's mid-rise grid is scaled to the RMS its input has under
/// the AQNM model with the target present; the front end keeps that gain when
/// the target is absent. Chains with infinite resolution pass samples through
/// unchanged in both modes.
class SignalSampler
{
public:
    SignalSampler(const BeamformingSolution &sol, const Scenario &scenario, const SamplerSettings &settings = {});

    [[nodiscard]] Snapshot draw(RngStream &rng, bool target_present = true) const;

    /// Only the radar receive chain: returns y_BS after the ADCs.
    [[nodiscard]] CVector draw_radar(RngStream &rng, bool target_present = true) const;

    [[nodiscard]] const RVector &dac_scale() const { return dac_scale_; }
    [[nodiscard]] const RVector &adc_scale() const { return adc_scale_; }
    [[nodiscard]] const CMatrix &V() const { return V_; }

private:
    [[nodiscard]] CVector transmit(const CVector &x, RngStream &rng) const;
    [[nodiscard]] CVector receive(const CVector &x_q, RngStream &rng, bool target_present, CVector *y_bs) const;

    Scenario scenario_;
    SamplerSettings settings_;
    CMatrix V_;
    RVector dac_var_, adc_var_, user_var_; ///< AQNM noise variances
    RVector dac_scale_, adc_scale_, user_scale_;
    std::vector<bool> dac_on_, adc_on_, user_on_; ///< finite resolution
    std::vector<int> dac_bits_, adc_bits_, user_bits_;
};

/// Radar SQNR measured from samples: the part of y_BS,q linearly explained by
/// the symbols gives S = C C^H with C = E[y s^H], the rest Q = E[y y^H] - S.
struct RadarSqnrEstimate
{
    CMatrix S, Q;
    double trace = 0.0;      ///< Tr(S Q^-1)
    double lambda_max = 0.0; ///< largest generalized eigenvalue
    double quotient = 0.0;   ///< u^H S u / u^H Q u for the given u
};

RadarSqnrEstimate estimate_radar_sqnr(const SignalSampler &sampler, const CVector &u, int snapshots,
                                      RngStream &rng);

// --- algorithms ----------------------------------------------------------

enum class Algorithm
{
    Robust,    ///< designed under the quantized model
    NonRobust, ///< designed as if every converter were ideal
    RadarOnly, ///< no SQINR constraints
};

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string &s);

struct SolveSettings
{
    SdrSettings sdr;
    MMSettings mm;
    bool force_mm = false;
};

/// Point target with uniform DACs.
bool sdr_applicable(const Scenario &scenario);

/// SDR when applicable (and not forced to MM), MM otherwise.
BeamformingSolution solve_robust(const Scenario &scenario, const SolveSettings &settings = {});

/// The same scenario with every converter ideal.
Scenario unquantized(const Scenario &scenario);

/// The same scenario with the SQINR constraints removed (K = 0).
Scenario without_users(const Scenario &scenario);

/// Designed on unquantized(scenario), evaluated on `scenario`.
BeamformingSolution non_robust_baseline(const Scenario &scenario, const SolveSettings &settings = {});

/// Designed on without_users(scenario); W_c is zero, evaluated on `scenario`.
BeamformingSolution radar_only_baseline(const Scenario &scenario, const SolveSettings &settings = {});

BeamformingSolution solve_algorithm(Algorithm a, const Scenario &scenario, const SolveSettings &settings = {});

/// Quantization model the algorithm designs (and builds its receiver) with.
QuantizationProfile design_profile(Algorithm a, const Scenario &scenario);

// --- detection -----------------------------------------------------------

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval of a binomial proportion (z = 1.96 for 95%).
Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

/// Energy-detector statistics T = (1/L) sum_l |u^H y_BS,q[l]|^2, one per trial
/// and hypothesis (H0: G = 0).
struct DetectionStats
{
    std::vector<double> h0;
    std::vector<double> h1;
};

struct DetectionSettings
{
    int trials = 2000;
    int snapshots = 64;
    SamplerSettings sampler{SamplerMode::Midrise, kDefaultLoadingFactor};
    std::uint64_t seed = 1;
    int threads = 0; ///< 0 = hardware concurrency
};

/// Trial t uses the streams keyed by (seed, t), so every design sees the same
/// symbols and noise.
DetectionStats detection_statistics(const BeamformingSolution &sol, const CVector &u, const Scenario &truth,
                                    const DetectionSettings &settings);

/// Declare a target when T > threshold.
struct RocPoint
{
    double threshold = 0.0;
    double p_fa = 0.0;
    Interval p_fa_ci;
    double p_d = 0.0;
    Interval p_d_ci;
};

/// Thresholds at (at most max_points) pooled statistic values, descending, so
/// P_FA and P_D are nondecreasing down the table.
std::vector<RocPoint> roc_table(const DetectionStats &stats, int max_points = 200);

/// Smallest threshold whose empirical P_FA does not exceed `p_fa`.
RocPoint operating_point(const DetectionStats &stats, double p_fa);

// --- experiments ---------------------------------------------------------

enum class SweepAxis
{
    GammaDb,  ///< common SQINR threshold
    PowerDbm, ///< transmit budget
    Antennas, ///< N_T = N_R
    Bits,     ///< every converter
};

std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string &s);

struct ExperimentSpec
{
    SystemConfig config = SystemConfig::defaults();
    TargetModel target = default_point_target();
    bool redraw_target = true; ///< extended target: new G per trial
    SweepAxis axis = SweepAxis::GammaDb;
    std::vector<double> grid;
    int trials = 20;
    std::uint64_t seed = 1;
    std::vector<Algorithm> algorithms{Algorithm::Robust, Algorithm::NonRobust};
    SolveSettings solver;
    DetectionSettings detection;
    std::vector<double> pfa_grid{0.01, 0.05, 0.1, 0.3};
    int roc_points = 200;
    int threads = 0;

    /// Throws std::invalid_argument on an empty grid, no algorithms or
    /// trials < 1.
    void validate() const;
};

/// config with the sweep variable set to `value`.
SystemConfig apply_axis(const SystemConfig &config, SweepAxis axis, double value);

/// Channels of trial `trial` (the target of trial 0 when it is not redrawn).
ChannelSet trial_channels(const ExperimentSpec &spec, const SystemConfig &config, std::uint64_t trial);

/// Outcome of one algorithm on one trial of one grid point.
struct TrialRecord
{
    double axis_value = 0.0;
    Algorithm algorithm = Algorithm::Robust;
    int trial = 0;
    std::string status; ///< "ok", "infeasible" or "failed"
    RVector sqinr;      ///< achieved, true model
    double radar_sqnr = 0.0;
    int iterations = 0;
};

/// Trial averages over the feasible trials (linear averages reported in dB).
struct SweepRow
{
    double axis_value = 0.0;
    Algorithm algorithm = Algorithm::Robust;
    int trials = 0;
    int feasible = 0;
    double mean_sqinr_db = 0.0;  ///< mean over users and trials
    double min_sqinr_db = 0.0;   ///< mean over trials of the worst user
    double worst_sqinr_db = 0.0; ///< worst user of the worst trial
    double radar_sqnr_db = 0.0;
    double mean_iterations = 0.0;
};

struct SweepResult
{
    std::vector<SweepRow> rows;       ///< grid order, then algorithm order
    std::vector<TrialRecord> records; ///< grid, trial, algorithm order
};

SweepResult run_sweep(const ExperimentSpec &spec);

/// run_sweep along the SQINR-threshold axis.
SweepResult tradeoff_sweep(const ExperimentSpec &spec);

struct RocCurve
{
    Algorithm algorithm = Algorithm::Robust;
    BeamformingSolution solution;
    CVector u;
    double analytic_sqnr = 0.0; ///< u^H S u / u^H Q u under the true model
    DetectionStats stats;
    std::vector<RocPoint> table;
    std::vector<RocPoint> at_grid; ///< operating points at spec.pfa_grid
};

/// Every algorithm designs once on the channels of trial 0 (first grid value
/// applied when the grid is nonempty); detection trials then vary symbols and
/// noise only.
std::vector<RocCurve> roc_experiment(const ExperimentSpec &spec);

struct EeRow
{
    int bits = 0;
    int trials = 0;
    int feasible = 0;
    double ee = 0.0;       ///< mean over feasible trials, bit/s/Hz per watt
    double rate = 0.0;     ///< mean numerator
    double power_w = 0.0;  ///< P_BS + sum P_UE
};

/// Robust design with every converter at b bits, for b on spec.grid.
std::vector<EeRow> ee_sweep(const ExperimentSpec &spec, const PowerModel &pm);

/// Runs fn(0..n-1) on up to `threads` workers (0 = hardware concurrency) and
/// rethrows the first exception.
void parallel_for(int n, int threads, const std::function<void(int)> &fn);

} // namespace quantbeam
