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

#include <map>
#include <utility>

#include "binning.hpp"

namespace pathbin {

struct DeathEstimate {
    double d_l = 0.0;
    int n_positions = 0;
    bool predicted_dead = false;
    friend bool operator==(const DeathEstimate &, const DeathEstimate &) = default;
};

struct DeathReport {
    std::map<int, DeathEstimate> per_bin;
    double threshold = 4.20;
    int reference_bin = 1;
    friend bool operator==(const DeathReport &, const DeathReport &) = default;
};

/// Mean total distance between bin `bin_id` and the reference bin over the positions
/// where both are populated, together with the number of such positions. Positions
/// without a reference entry are skipped.
inline std::pair<double, int> average_distance_to_los(const BinningResult &result, int bin_id, double gamma,
                                                      int reference_bin = 1) {
    const PathBin *bin = result.find(bin_id);
    const PathBin *ref = result.find(reference_bin);
    if (!bin)
        throw ValidationError("unknown bin " + std::to_string(bin_id));
    if (!ref)
        throw MissingLosReference("reference bin " + std::to_string(reference_bin) + " does not exist");
    if (bin_id == reference_bin)
        throw ValidationError("bin " + std::to_string(bin_id) + " is the reference bin");
    double sum = 0.0;
    int n = 0;
    std::size_t r = 0;
    for (const auto &e : bin->entries) {
        while (r < ref->entries.size() && ref->entries[r].position_index < e.position_index)
            ++r;
        if (r == ref->entries.size() || ref->entries[r].position_index != e.position_index)
            continue;
        sum += total_distance(e.mpc, ref->entries[r].mpc, gamma);
        ++n;
    }
    if (n == 0)
        throw MissingLosReference("bin " + std::to_string(bin_id) + " shares no position with reference bin " +
                                  std::to_string(reference_bin));
    return {sum / n, n};
}

/// Flags bins whose average distance from the reference exceeds `threshold`. Bins with no
/// position in common with the reference are left out of the report.
inline DeathReport predict_deaths(const BinningResult &result, double threshold, double gamma,
                                  int reference_bin = 1) {
    if (!(threshold >= 0.0))
        throw ValidationError("death threshold must be >= 0");
    DeathReport report;
    report.threshold = threshold;
    report.reference_bin = reference_bin;
    for (const auto &bin : result.bins) {
        if (bin.bin_id == reference_bin)
            continue;
        try {
            const auto [d, n] = average_distance_to_los(result, bin.bin_id, gamma, reference_bin);
            report.per_bin[bin.bin_id] = {d, n, d > threshold};
        } catch (const MissingLosReference &) {
        }
    }
    return report;
}

/// Threshold rule applied to precomputed averages, keyed by bin id.
inline std::map<int, bool> flag_deaths(const std::map<int, double> &d_l, double threshold) {
    std::map<int, bool> out;
    for (const auto &[id, d] : d_l)
        out[id] = d > threshold;
    return out;
}

/// Bin with the highest mean gain; the reference for data where bin 1 need not be LOS.
inline int strongest_bin(const BinningResult &result) {
    int best = 1;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (const auto &bin : result.bins) {
        if (bin.entries.empty())
            continue;
        double g = 0.0;
        for (const auto &e : bin.entries)
            g += e.mpc.gain_db;
        g /= static_cast<double>(bin.entries.size());
        if (g > best_gain) {
            best_gain = g;
            best = bin.bin_id;
        }
    }
    return best;
}

} // namespace pathbin
