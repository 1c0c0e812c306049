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

#include <algorithm>
#include <functional>

#include <gtest/gtest.h>

#include "pathbin/evaluation.hpp"

using namespace pathbin;

namespace {

MpcVector mpc(double gain, double delay, double azim) {
    MpcVector m;
    m.gain_db = gain;
    m.delay_ns = delay;
    m.aod_elev_deg = 3.0;
    m.aod_azim_deg = azim;
    m.aoa_elev_deg = -3.0;
    m.aoa_azim_deg = wrap_azimuth_deg(azim + 180.0);
    return m;
}

BinForecast constant_forecast(int id, int start, int horizon, const MpcVector &m) {
    BinForecast f;
    f.bin_id = id;
    f.start_position = start;
    f.horizon = horizon;
    for (int v = 0; v < kNumParameters; ++v)
        f.per_parameter[static_cast<std::size_t>(v)].assign(static_cast<std::size_t>(horizon), m[v]);
    return f;
}

MatchedPair pair_of(const MpcVector &forecast, const MpcVector &truth) {
    MatchedPair p;
    p.forecast = forecast;
    p.truth = truth;
    return p;
}

Trajectory tracks(int n, int blockage, const std::function<std::vector<MpcVector>(int)> &at) {
    Trajectory t;
    t.config.n_positions = n;
    t.config.blockage_start_index = blockage;
    for (int p = 1; p <= n; ++p) {
        Snapshot s;
        s.position_index = p;
        s.mpcs = at(p);
        std::sort(s.mpcs.begin(), s.mpcs.end(), stronger_first);
        t.snapshots.push_back(s);
    }
    return t;
}

} // namespace

TEST(Matching, ExactForecastPairsEverything) {
    const MpcVector a = mpc(-90, 1000, 20), b = mpc(-95, 1400, -70);
    Trajectory hidden;
    for (int p = 10; p < 13; ++p)
        hidden.snapshots.push_back({p, {}, {a, b}});
    const std::vector<BinForecast> fs{constant_forecast(1, 10, 3, a), constant_forecast(2, 10, 3, b)};
    const auto m = match_forecast_to_truth(fs, hidden, BinningParams{});
    ASSERT_EQ(m.pairs.size(), 6u);
    EXPECT_TRUE(m.unpaired_hidden.empty());
    EXPECT_TRUE(m.unpaired_forecasts.empty());
    for (const auto &p : m.pairs) {
        EXPECT_EQ(p.distance, 0.0);
        EXPECT_EQ(p.bin_id, p.mpc_index);
    }
    EXPECT_EQ(mse_db(m.pairs), 0.0);
}

TEST(Matching, OneHiddenTwoForecasts) {
    const MpcVector truth = mpc(-90, 1000, 20);
    Trajectory hidden;
    hidden.snapshots.push_back({5, {}, {truth}});
    const std::vector<BinForecast> fs{constant_forecast(1, 5, 1, mpc(-60, 3000, -100)),
                                      constant_forecast(2, 5, 1, mpc(-91, 1001, 21))};
    const auto m = match_forecast_to_truth(fs, hidden, BinningParams{});
    ASSERT_EQ(m.pairs.size(), 1u);
    EXPECT_EQ(m.pairs[0].bin_id, 2);
    EXPECT_EQ(m.unpaired_forecasts, (std::vector<std::pair<int, int>>{{5, 1}}));
    EXPECT_TRUE(m.unpaired_hidden.empty());
}

TEST(Matching, ExtraHiddenMpcIsUnpaired) {
    Trajectory hidden;
    hidden.snapshots.push_back({5, {}, {mpc(-90, 1000, 20), mpc(-120, 4000, 170)}});
    const std::vector<BinForecast> fs{constant_forecast(1, 5, 1, mpc(-90, 1000, 20))};
    const auto m = match_forecast_to_truth(fs, hidden, BinningParams{});
    EXPECT_EQ(m.pairs.size(), 1u);
    EXPECT_EQ(m.unpaired_hidden, (std::vector<std::pair<int, int>>{{5, 2}}));
}

TEST(Matching, EqualDistancesBreakTiesByBinId) {
    const MpcVector truth = mpc(-90, 1000, 20);
    Trajectory hidden;
    hidden.snapshots.push_back({1, {}, {truth}});
    const std::vector<BinForecast> fs{constant_forecast(4, 1, 1, mpc(-89, 1000, 20)),
                                      constant_forecast(3, 1, 1, mpc(-91, 1000, 20))};
    const auto m = match_forecast_to_truth(fs, hidden, BinningParams{});
    ASSERT_EQ(m.pairs.size(), 1u);
    EXPECT_EQ(m.pairs[0].bin_id, 3);
}

TEST(Metrics, MseOfSymmetricErrors) {
    const MpcVector t = mpc(-90, 1000, 20);
    const std::vector<MatchedPair> ps{pair_of(mpc(-87, 1000, 20), t), pair_of(mpc(-93, 1000, 20), t)};
    EXPECT_DOUBLE_EQ(mse_db(ps), 9.0);
    EXPECT_THROW(mse_db({}), EmptyPairs);
}

TEST(Metrics, MapeOfGain) {
    MpcVector t, f;
    t.gain_db = -100.0;
    f.gain_db = -98.0;
    EXPECT_NEAR(mape({pair_of(f, t)}, false), 2.0, 1e-12);
    EXPECT_NEAR(mape({pair_of(f, t)}, true), 2.0, 1e-12); // zero-valued parameters are skipped
}

TEST(Metrics, MapeUsesAngularAzimuthError) {
    MpcVector t, f;
    t.aod_azim_deg = 179.0;
    f.aod_azim_deg = -179.0;
    EXPECT_NEAR(mape({pair_of(f, t)}, true), 100.0 * 2.0 / 179.0, 1e-12);
}

TEST(Metrics, MapeAllExcluded) {
    EXPECT_THROW(mape({pair_of(MpcVector{}, MpcVector{})}, true), AllValuesExcluded);
    EXPECT_THROW(mape({}, true), AllValuesExcluded);
}

TEST(Baseline, SinglePathMatchesBinnedForecast) {
    auto t = tracks(40, 31, [](int p) { return std::vector<MpcVector>{mpc(-80 - 0.3 * p, 900 + 2.0 * p, 10 + 0.5 * p)}; });
    t.config.n_positions = 40;
    const auto ex = run_blockage_experiment(t);
    ASSERT_EQ(ex.forecasts.forecasts.size(), 1u);
    ASSERT_EQ(ex.baseline.size(), 1u);
    EXPECT_EQ(ex.baseline[0].per_parameter, ex.forecasts.forecasts[0].per_parameter);
    EXPECT_EQ(ex.report.overall_mse_db, ex.report.baseline_mse_db);
    EXPECT_EQ(ex.report.matched_pairs, 10);
}

TEST(Baseline, RankCrossingDegradesUnbinnedForecast) {
    // Two paths whose gains cross at position 12.5, well before the blockage.
    auto t = tracks(40, 26, [](int p) {
        return std::vector<MpcVector>{mpc(-85 - 0.4 * p, 1000 + 1.5 * p, 30), mpc(-95 + 0.4 * p, 2200 - 1.0 * p, -60)};
    });
    const auto ex = run_blockage_experiment(t);
    ASSERT_EQ(ex.binning.bins.size(), 2u);
    EXPECT_LT(ex.report.overall_mse_db, 1e-6);
    EXPECT_LT(ex.report.overall_mape_percent, 1e-4);
    EXPECT_GT(ex.report.baseline_mse_db, ex.report.overall_mse_db);
    EXPECT_GT(ex.report.baseline_mape_percent, ex.report.overall_mape_percent);
}

TEST(Experiment, HorizonOnePairsBlockagePosition) {
    ScenarioConfig c;
    c.horizon = 1;
    const auto ex = run_blockage_experiment(c);
    const auto m_n = ex.hidden.snapshots.front().mpcs.size();
    const auto expected = std::min(m_n, ex.forecasts.forecasts.size());
    EXPECT_EQ(static_cast<std::size_t>(ex.report.matched_pairs), expected);
    for (const auto &p : ex.matching.pairs)
        EXPECT_EQ(p.position_index, c.blockage_start_index);
}

TEST(Experiment, DefaultScenarioBinnedBeatsBaseline) {
    const ScenarioConfig c;
    const auto ex = run_blockage_experiment(c);
    EXPECT_LT(ex.report.overall_mse_db, ex.report.baseline_mse_db);
    EXPECT_LT(ex.report.overall_mape_percent, ex.report.baseline_mape_percent);
    ASSERT_TRUE(ex.report.los_rmse_db.has_value());
    EXPECT_LT(*ex.report.los_rmse_db, 3.0);
    const int total = ex.report.matched_pairs + ex.report.unpaired_hidden;
    int hidden = 0;
    for (const auto &s : ex.hidden.snapshots)
        hidden += static_cast<int>(s.mpcs.size());
    EXPECT_EQ(total, hidden);
}

TEST(Experiment, DeterministicAcrossRunsAndThreads) {
    const ScenarioConfig c;
    const auto a = run_blockage_experiment(c, 1);
    const auto b = run_blockage_experiment(c, 1);
    const auto d = run_blockage_experiment(c, 4);
    EXPECT_EQ(a.report, b.report);
    EXPECT_EQ(a.report, d.report);
    EXPECT_EQ(a.matching, d.matching);
}

TEST(LosRmse, UsesTruthLabels) {
    MpcVector los = mpc(-80, 500, 90);
    los.truth_label = TruthLabel::los();
    BinningResult r;
    PathBin b;
    b.bin_id = 1;
    b.entries.push_back({1, los});
    b.events.push_back({1, BinEvent::Birth});
    r.bins.push_back(b);
    ForecastSet fs;
    fs.forecasts.push_back(constant_forecast(1, 2, 2, mpc(-84, 500, 90)));
    Trajectory hidden;
    MpcVector h = los;
    hidden.snapshots.push_back({2, {}, {h}});
    hidden.snapshots.push_back({3, {}, {h, mpc(-60, 900, 0)}});
    const auto rmse = los_forecast_rmse_db(r, fs, hidden);
    ASSERT_TRUE(rmse.has_value());
    EXPECT_DOUBLE_EQ(*rmse, 4.0);
    r.bins[0].entries[0].mpc.truth_label.reset();
    EXPECT_FALSE(los_forecast_rmse_db(r, fs, hidden).has_value());
}
