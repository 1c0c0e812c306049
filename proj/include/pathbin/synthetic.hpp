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
#include <cstdint>
#include <random>

#include "types.hpp"

namespace pathbin {

/// Well-separated drifting tracks for benchmarks and randomized checks: track k starts
/// 12 dB and 60 ns away from track k-1 and drifts slowly with position.
/// `jitter` scales uniform per-parameter noise added on top of the drift.
inline Trajectory synthetic_tracks(int n_positions, int n_tracks, std::uint64_t seed, double jitter = 0.05) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-jitter, jitter);
    std::uniform_real_distribution<double> drift(-0.05, 0.05);
    std::vector<std::array<double, kNumParameters>> base(static_cast<std::size_t>(n_tracks));
    std::vector<std::array<double, kNumParameters>> slope(static_cast<std::size_t>(n_tracks));
    for (int k = 0; k < n_tracks; ++k) {
        const double kk = static_cast<double>(k);
        base[static_cast<std::size_t>(k)] = {-70.0 - 12.0 * kk,
                                             500.0 + 60.0 * kk,
                                             -60.0 + std::fmod(7.0 * kk, 120.0),
                                             wrap_azimuth_deg(-170.0 + 40.0 * kk),
                                             60.0 - std::fmod(7.0 * kk, 120.0),
                                             wrap_azimuth_deg(170.0 - 40.0 * kk)};
        for (auto &s : slope[static_cast<std::size_t>(k)])
            s = drift(rng);
    }
    Trajectory t;
    t.config.n_positions = n_positions;
    t.config.n_scatterers = 0;
    for (int j = 1; j <= n_positions; ++j) {
        Snapshot s;
        s.position_index = j;
        s.rx_position_m = {0.0, static_cast<double>(j), 0.0};
        for (int k = 0; k < n_tracks; ++k) {
            MpcVector m;
            for (int v = 0; v < kNumParameters; ++v)
                m[v] = base[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)] +
                       slope[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)] * j + noise(rng);
            m.truth_label = TruthLabel::scatterer(k + 1);
            s.mpcs.push_back(canonicalize_angles(m));
        }
        std::stable_sort(s.mpcs.begin(), s.mpcs.end(), stronger_first);
        t.snapshots.push_back(std::move(s));
    }
    return t;
}

} // namespace pathbin
