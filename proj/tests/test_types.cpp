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

#include <gtest/gtest.h>

#include "pathbin/types.hpp"

using namespace pathbin;

TEST(Angles, AzimuthWrapsIntoHalfOpenRange) {
    MpcVector m;
    m.aod_azim_deg = 190.0;
    m.aoa_azim_deg = -180.0;
    const auto c = canonicalize_angles(m);
    EXPECT_DOUBLE_EQ(c.aod_azim_deg, -170.0);
    EXPECT_DOUBLE_EQ(c.aoa_azim_deg, -180.0);
    EXPECT_DOUBLE_EQ(wrap_azimuth_deg(180.0), -180.0);
    EXPECT_DOUBLE_EQ(wrap_azimuth_deg(-540.0), -180.0);
    EXPECT_DOUBLE_EQ(wrap_azimuth_deg(725.0), 5.0);
}

TEST(Angles, ElevationOutOfRangeIsRejected) {
    MpcVector m;
    m.aoa_elev_deg = 95.0;
    EXPECT_THROW(canonicalize_angles(m), OutOfRangeElevation);
    m.aoa_elev_deg = 90.0;
    EXPECT_NO_THROW(canonicalize_angles(m));
    m.aod_elev_deg = -90.5;
    EXPECT_THROW(canonicalize_angles(m), OutOfRangeElevation);
}

TEST(Angles, ShortestStepCrossesTheSeam) {
    EXPECT_DOUBLE_EQ(azimuth_step_deg(179.0, -179.0), 2.0);
    EXPECT_DOUBLE_EQ(azimuth_step_deg(-179.0, 179.0), -2.0);
    EXPECT_DOUBLE_EQ(azimuth_step_deg(0.0, 180.0), 180.0);
}

TEST(TruthLabel, TextRoundTrip) {
    for (const auto l : {TruthLabel::los(), TruthLabel::ground(), TruthLabel::scatterer(12)})
        EXPECT_EQ(TruthLabel::parse(l.to_string()), l);
    EXPECT_FALSE(TruthLabel::parse("Scatterer(x)"));
    EXPECT_FALSE(TruthLabel::parse("los"));
}

TEST(Snapshot, StrongerFirstBreaksTiesByDelay) {
    MpcVector a, b;
    a.gain_db = b.gain_db = -90.0;
    a.delay_ns = 10.0;
    b.delay_ns = 20.0;
    EXPECT_TRUE(stronger_first(a, b));
    EXPECT_FALSE(stronger_first(b, a));
    b.gain_db = -80.0;
    EXPECT_TRUE(stronger_first(b, a));
}

TEST(ScenarioConfig, DefaultsMatchScenarioTable) {
    const ScenarioConfig c;
    EXPECT_DOUBLE_EQ(c.frequency_hz, 28e9);
    EXPECT_DOUBLE_EQ(c.h_tx_m, 2.0);
    EXPECT_DOUBLE_EQ(c.h_rx_m, 50.0);
    EXPECT_DOUBLE_EQ(c.trajectory_length_m, 100.0);
    EXPECT_EQ(c.n_positions, 100);
    EXPECT_DOUBLE_EQ(c.tx_to_trajectory_start_m, 243.0);
    EXPECT_DOUBLE_EQ(c.scatterer_lateral_offset_m, 145.0);
    EXPECT_DOUBLE_EQ(c.scatterer_edge_m, 40.0);
    EXPECT_DOUBLE_EQ(c.scatterer_spacing_m, 110.0);
    EXPECT_DOUBLE_EQ(c.eps_ground, 3.5);
    EXPECT_DOUBLE_EQ(c.eps_scatterer, 5.31);
    EXPECT_EQ(c.blockage_start_index, 75);
    EXPECT_DOUBLE_EQ(c.gamma, 75.8);
    EXPECT_DOUBLE_EQ(c.epsilon, 0.15);
    EXPECT_EQ(c.ar_order, 4);
    EXPECT_DOUBLE_EQ(c.death_threshold, 4.20);
    EXPECT_EQ(c.effective_horizon(), 26);
    EXPECT_NO_THROW(c.validate());
}

TEST(ScenarioConfig, RxPositionsAreOneMetreApart) {
    const ScenarioConfig c;
    EXPECT_EQ(c.rx_position(1), (Vec3{0.0, 243.0, 50.0}));
    EXPECT_NEAR(c.rx_position(100).y - c.rx_position(1).y, 99.0, 1e-9);
}

TEST(ScenarioConfig, ValidationRejectsBadValues) {
    auto bad = [](auto mutate) {
        ScenarioConfig c;
        mutate(c);
        return c;
    };
    EXPECT_THROW(bad([](auto &c) { c.n_positions = 0; }).validate(), ValidationError);
    EXPECT_THROW(bad([](auto &c) { c.eps_ground = 1.0; }).validate(), ValidationError);
    EXPECT_THROW(bad([](auto &c) { c.epsilon = 0.0; }).validate(), ValidationError);
    EXPECT_THROW(bad([](auto &c) { c.gamma = -1.0; }).validate(), ValidationError);
    EXPECT_THROW(bad([](auto &c) { c.blockage_start_index = 101; }).validate(), ValidationError);
    EXPECT_THROW(bad([](auto &c) { c.blockage_start_index = 0; }).validate(), ValidationError);
    EXPECT_THROW(bad([](auto &c) { c.h_rx_m = 0.0; }).validate(), ValidationError);
}

TEST(PathBin, LifecycleGrammar) {
    PathBin b;
    b.events = {{1, BinEvent::Birth}, {2, BinEvent::Continue}, {3, BinEvent::Discontinue}, {7, BinEvent::Resurrect},
                {8, BinEvent::Continue}, {9, BinEvent::Discontinue}};
    EXPECT_TRUE(lifecycle_is_valid(b));

    PathBin no_birth = b;
    no_birth.events.erase(no_birth.events.begin());
    EXPECT_FALSE(lifecycle_is_valid(no_birth));

    PathBin continue_after_stop;
    continue_after_stop.events = {{1, BinEvent::Birth}, {2, BinEvent::Discontinue}, {3, BinEvent::Continue}};
    EXPECT_FALSE(lifecycle_is_valid(continue_after_stop));

    PathBin resurrect_while_active;
    resurrect_while_active.events = {{1, BinEvent::Birth}, {2, BinEvent::Resurrect}};
    EXPECT_FALSE(lifecycle_is_valid(resurrect_while_active));

    PathBin out_of_order;
    out_of_order.events = {{1, BinEvent::Birth}};
    out_of_order.entries = {{3, {}}, {2, {}}};
    EXPECT_FALSE(lifecycle_is_valid(out_of_order));
}
