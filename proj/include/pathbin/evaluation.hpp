// SPDX-License-Identifier: Apache-2.0
//
// pathbin: multipath path-bin tracking and blockage forecasting for UAV links
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

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "binning.hpp"
#include "channel_sim.hpp"
#include "death.hpp"
#include "forecasting.hpp"

namespace pathbin {

struct MatchedPair {
    int position_index = 0;
    int bin_id = 0;
    int mpc_index = 0; // 1-based index of the hidden MPC in its snapshot
    MpcVector forecast;
    MpcVector truth;
    double distance = 0.0;
    friend bool operator==(const MatchedPair &, const MatchedPair &) = default;
};

struct Matching {
    std::vector<MatchedPair> pairs;
    std::vector<std::pair<int, int>> unpaired_hidden;    // (position_index, mpc_index): births in the blockage
    std::vector<std::pair<int, int>> unpaired_forecasts; // (position_index, bin_id): deaths in the blockage
    friend bool operator==(const Matching &, const Matching &) = default;
};

/// Pairs hidden MPCs with bin forecasts one-to-one per position, greedily by ascending
/// total distance (ties: lower bin id, then lower MPC index).
inline Matching match_forecast_to_truth(const std::vector<BinForecast> &forecasts, const Trajectory &hidden,
                                        const BinningParams &params) {
    Matching out;
    for (const auto &snap : hidden.snapshots) {
        const int p = snap.position_index;
        std::vector<const BinForecast *> live;
        for (const auto &f : forecasts)
            if (p >= f.start_position && p < f.start_position + f.horizon)
                live.push_back(&f);

        std::vector<std::tuple<double, int, int>> cand; // (distance, live slot, mpc slot)
        for (std::size_t b = 0; b < live.size(); ++b) {
            const MpcVector fv = live[b]->at(p - live[b]->start_position);
            for (std::size_t m = 0; m < snap.mpcs.size(); ++m)
                cand.emplace_back(total_distance(fv, snap.mpcs[m], params.gamma), static_cast<int>(b),
                                  static_cast<int>(m));
        }
        std::sort(cand.begin(), cand.end(), [&](const auto &a, const auto &b) {
            if (std::get<0>(a) != std::get<0>(b))
                return std::get<0>(a) < std::get<0>(b);
            const int ia = live[static_cast<std::size_t>(std::get<1>(a))]->bin_id;
            const int ib = live[static_cast<std::size_t>(std::get<1>(b))]->bin_id;
            if (ia != ib)
                return ia < ib;
            return std::get<2>(a) < std::get<2>(b);
        });

        std::vector<bool> bin_used(live.size(), false);
        std::vector<bool> mpc_used(snap.mpcs.size(), false);
        std::vector<MatchedPair> here;
        for (const auto &[d, b, m] : cand) {
            const auto bs = static_cast<std::size_t>(b);
            const auto ms = static_cast<std::size_t>(m);
            if (bin_used[bs] || mpc_used[ms])
                continue;
            bin_used[bs] = true;
            mpc_used[ms] = true;
            here.push_back({p, live[bs]->bin_id, m + 1, live[bs]->at(p - live[bs]->start_position), snap.mpcs[ms], d});
        }
        std::sort(here.begin(), here.end(),
                  [](const MatchedPair &a, const MatchedPair &b) { return a.mpc_index < b.mpc_index; });
        out.pairs.insert(out.pairs.end(), here.begin(), here.end());
        for (std::size_t m = 0; m < mpc_used.size(); ++m)
            if (!mpc_used[m])
                out.unpaired_hidden.emplace_back(p, static_cast<int>(m) + 1);
        for (std::size_t b = 0; b < live.size(); ++b)
            if (!bin_used[b])
                out.unpaired_forecasts.emplace_back(p, live[b]->bin_id);
    }
    return out;
}

/// Mean squared gain error in dB^2 over the pairs.
inline double mse_db(const std::vector<MatchedPair> &pairs) {
    if (pairs.empty())
        throw EmptyPairs("no matched pairs to score");
    double s = 0.0;
    for (const auto &p : pairs) {
        const double e = p.forecast.gain_db - p.truth.gain_db;
        s += e * e;
    }
    return s / static_cast<double>(pairs.size());
}

/// Mean absolute percentage error over all six parameters (or gain only), skipping
/// parameters whose true magnitude is below 1e-9. Azimuth errors are angular.
inline double mape(const std::vector<MatchedPair> &pairs, bool all_parameters = true) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto &p : pairs) {
        for (int v = 0; v < (all_parameters ? kNumParameters : 1); ++v) {
            const double truth = p.truth[v];
            if (std::abs(truth) < 1e-9)
                continue;
            const double err = is_azimuth(v) ? std::abs(azimuth_step_deg(truth, p.forecast[v]))
                                             : std::abs(p.forecast[v] - truth);
            s += err / std::abs(truth);
            ++n;
        }
    }
    if (n == 0)
        throw AllValuesExcluded("every parameter value was excluded from MAPE");
    return 100.0 * s / static_cast<double>(n);
}

/// Rank-ordered comparator without path binning: the k-th strongest MPC of every
/// observed position forms series k, which is forecast directly. Forecast ids are ranks.
inline std::vector<BinForecast> baseline_unbinned_ar(const Trajectory &observed, int blockage_start, int horizon,
                                                     int order) {
    if (horizon < 1)
        throw ValidationError("forecast horizon must be >= 1");
    std::size_t max_rank = 0;
    for (const auto &s : observed.snapshots)
        max_rank = std::max(max_rank, s.mpcs.size());
    std::vector<BinForecast> out;
    for (std::size_t k = 0; k < max_rank; ++k) {
        std::vector<MpcVector> series;
        for (const auto &s : observed.snapshots)
            if (s.mpcs.size() > k)
                series.push_back(s.mpcs[k]);
        BinForecast f;
        f.bin_id = static_cast<int>(k) + 1;
        f.start_position = blockage_start;
        f.horizon = horizon;
        f.per_parameter = forecast_parameters(series, order, horizon);
        out.push_back(std::move(f));
    }
    return out;
}

struct EvalReport {
    std::map<int, double> per_bin_mse_db;
    double overall_mse_db = 0.0;
    double overall_mape_percent = 0.0;
    double baseline_mse_db = 0.0;
    double baseline_mape_percent = 0.0;
    int matched_pairs = 0;
    int baseline_matched_pairs = 0;
    int unpaired_hidden = 0;
    int unpaired_forecasts = 0;
    std::optional<double> los_rmse_db; // only when the data carry truth labels
    friend bool operator==(const EvalReport &, const EvalReport &) = default;
};

/// Every intermediate of one blockage experiment, kept for the CLI's file outputs.
struct Experiment {
    Trajectory trajectory;
    Trajectory observed;
    Trajectory hidden;
    BinningResult binning; // on the observed positions only
    ForecastSet forecasts;
    std::vector<BinForecast> baseline;
    Matching matching;
    Matching baseline_matching;
    EvalReport report;
};

/// RMS gain error of the bin holding the LOS path at its last observed entry, against the
/// hidden LOS-labelled MPCs.
inline std::optional<double> los_forecast_rmse_db(const BinningResult &binning, const ForecastSet &fs,
                                                  const Trajectory &hidden) {
    int los_bin = 0;
    for (const auto &bin : binning.bins)
        if (!bin.entries.empty() && bin.entries.back().mpc.truth_label == TruthLabel::los())
            los_bin = bin.bin_id;
    const BinForecast *f = nullptr;
    for (const auto &x : fs.forecasts)
        if (x.bin_id == los_bin)
            f = &x;
    if (!f)
        return std::nullopt;
    double s = 0.0;
    int n = 0;
    for (const auto &snap : hidden.snapshots) {
        const int k = snap.position_index - f->start_position;
        if (k < 0 || k >= f->horizon)
            continue;
        for (const auto &m : snap.mpcs) {
            if (m.truth_label == TruthLabel::los()) {
                const double e = f->at(k).gain_db - m.gain_db;
                s += e * e;
                ++n;
            }
        }
    }
    if (n == 0)
        return std::nullopt;
    return std::sqrt(s / n);
}

/// Blockage experiment on an existing trajectory: split, bin the observed part, forecast
/// each bin and the rank baseline, pair with the hidden truth, and score.
inline Experiment run_blockage_experiment(const Trajectory &trajectory, unsigned threads = 1) {
    const ScenarioConfig &config = trajectory.config;
    config.validate();
    Experiment ex;
    ex.trajectory = trajectory;
    std::tie(ex.observed, ex.hidden) = apply_blockage(trajectory, config.blockage_start_index);
    if (ex.observed.snapshots.empty())
        throw RuntimeError("blockage at position 1 leaves nothing to learn from");
    const auto params = BinningParams::from_config(config);
    const int horizon = config.effective_horizon();

    ex.binning = run_binning(ex.observed, params);
    ex.forecasts = forecast_bins(ex.binning, config.blockage_start_index, horizon, config.ar_order,
                                 config.stale_gap, threads);
    ex.baseline = baseline_unbinned_ar(ex.observed, config.blockage_start_index, horizon, config.ar_order);
    ex.matching = match_forecast_to_truth(ex.forecasts.forecasts, ex.hidden, params);
    ex.baseline_matching = match_forecast_to_truth(ex.baseline, ex.hidden, params);

    EvalReport &r = ex.report;
    r.overall_mse_db = mse_db(ex.matching.pairs);
    r.overall_mape_percent = mape(ex.matching.pairs, config.mape_all_parameters);
    r.baseline_mse_db = mse_db(ex.baseline_matching.pairs);
    r.baseline_mape_percent = mape(ex.baseline_matching.pairs, config.mape_all_parameters);
    r.matched_pairs = static_cast<int>(ex.matching.pairs.size());
    r.baseline_matched_pairs = static_cast<int>(ex.baseline_matching.pairs.size());
    r.unpaired_hidden = static_cast<int>(ex.matching.unpaired_hidden.size());
    r.unpaired_forecasts = static_cast<int>(ex.matching.unpaired_forecasts.size());
    std::map<int, std::vector<MatchedPair>> by_bin;
    for (const auto &p : ex.matching.pairs)
        by_bin[p.bin_id].push_back(p);
    for (const auto &[id, ps] : by_bin)
        r.per_bin_mse_db[id] = mse_db(ps);
    r.los_rmse_db = los_forecast_rmse_db(ex.binning, ex.forecasts, ex.hidden);
    return ex;
}

inline Experiment run_blockage_experiment(const ScenarioConfig &config, unsigned threads = 1) {
    return run_blockage_experiment(generate_trajectory(config, threads), threads);
}

} // namespace pathbin
