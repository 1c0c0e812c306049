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
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "types.hpp"

namespace pathbin {

struct BinningParams {
    double gamma = 75.8;
    double epsilon = 0.15;
    int lookback = 0; // previous positions searched for d_min; 0 = all of them
    int within_bin_window = 1;

    static BinningParams from_config(const ScenarioConfig &c) {
        return {c.gamma, c.epsilon, c.lookback, c.within_bin_window};
    }

    void validate() const {
        if (!(gamma > 0.0))
            throw ValidationError("gamma must be > 0");
        if (!(epsilon > 0.0))
            throw ValidationError("epsilon must be > 0");
        if (lookback < 0)
            throw ValidationError("lookback must be >= 0");
        if (within_bin_window < 1)
            throw ValidationError("within_bin_window must be >= 1");
    }
};

// One assignment decision: the realized Markov state for MPC `mpc_index` at this position.
struct MarkovRecord {
    int position_index = 0;
    int mpc_index = 0; // 1-based, in snapshot order
    int chosen_bin_id = 0;
    double d_min = std::numeric_limits<double>::infinity(); // infinite when there is no history
    bool birth = false;
    std::vector<std::pair<int, double>> candidates; // (bin_id, d_l) over eligible bins

    friend bool operator==(const MarkovRecord &, const MarkovRecord &) = default;
};

struct BinningResult {
    std::vector<PathBin> bins; // bin_id == index + 1
    std::vector<MarkovRecord> markov_trace;
    std::vector<std::pair<int, int>> unassigned_births; // (position_index, mpc_index)

    const PathBin *find(int bin_id) const {
        if (bin_id < 1 || bin_id > static_cast<int>(bins.size()))
            return nullptr;
        return &bins[static_cast<std::size_t>(bin_id - 1)];
    }

    friend bool operator==(const BinningResult &, const BinningResult &) = default;
};

/// Absolute difference of one channel parameter (0-based `v`); azimuths use the
/// shortest angular distance.
inline double param_distance(const MpcVector &a, const MpcVector &b, int v) {
    if (is_azimuth(v))
        return std::abs(azimuth_step_deg(a[v], b[v]));
    return std::abs(a[v] - b[v]);
}

/// Sum of the six per-parameter distances, scaled by 1/gamma.
inline double total_distance(const MpcVector &a, const MpcVector &b, double gamma) {
    double sum = 0.0;
    for (int v = 0; v < kNumParameters; ++v)
        sum += param_distance(a, b, v);
    return sum / gamma;
}

namespace detail {

inline double distance_to_bin(const MpcVector &m, const PathBin &bin, int window, double gamma) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = bin.entries.size();
    const std::size_t first = n > static_cast<std::size_t>(window) ? n - static_cast<std::size_t>(window) : 0;
    for (std::size_t i = first; i < n; ++i)
        best = std::min(best, total_distance(m, bin.entries[i].mpc, gamma));
    return best;
}

} // namespace detail

/// Places every MPC of `snap` into a path bin.
///
/// For each MPC in stored order, d_min is its smallest distance to any MPC in `history`
/// (the last `lookback` snapshots when bounded). Below epsilon it joins the eligible bin
/// with the smallest distance to that bin's most recent `within_bin_window` entries;
/// eligible bins are those not yet holding an MPC at this position, ties go to the lower
/// id. Otherwise, or when no bin is eligible, it births a new bin. Active bins left empty
/// at this position are discontinued; a discontinued bin that receives an MPC resurrects.
inline BinningResult assign_snapshot(BinningResult state, const Snapshot &snap, std::span<const Snapshot> history,
                                     const BinningParams &params) {
    if (params.lookback > 0 && history.size() > static_cast<std::size_t>(params.lookback))
        history = history.last(static_cast<std::size_t>(params.lookback));

    const std::size_t bins_before = state.bins.size();
    std::vector<bool> taken(bins_before, false);

    for (std::size_t m = 0; m < snap.mpcs.size(); ++m) {
        const MpcVector &mpc = snap.mpcs[m];
        MarkovRecord rec;
        rec.position_index = snap.position_index;
        rec.mpc_index = static_cast<int>(m) + 1;

        for (const auto &prev : history)
            for (const auto &k : prev.mpcs)
                rec.d_min = std::min(rec.d_min, total_distance(mpc, k, params.gamma));

        int chosen = 0;
        double chosen_d = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < state.bins.size(); ++b) {
            if (b < bins_before ? taken[b] : true)
                continue;
            const double d = detail::distance_to_bin(mpc, state.bins[b], params.within_bin_window, params.gamma);
            rec.candidates.emplace_back(state.bins[b].bin_id, d);
            if (d < chosen_d) {
                chosen_d = d;
                chosen = state.bins[b].bin_id;
            }
        }

        if (rec.d_min < params.epsilon && chosen != 0) {
            PathBin &bin = state.bins[static_cast<std::size_t>(chosen - 1)];
            bin.events.push_back({snap.position_index, bin.active() ? BinEvent::Continue : BinEvent::Resurrect});
            bin.entries.push_back({snap.position_index, mpc});
            taken[static_cast<std::size_t>(chosen - 1)] = true;
        } else {
            PathBin bin;
            bin.bin_id = static_cast<int>(state.bins.size()) + 1;
            bin.entries.push_back({snap.position_index, mpc});
            bin.events.push_back({snap.position_index, BinEvent::Birth});
            chosen = bin.bin_id;
            rec.birth = true;
            state.bins.push_back(std::move(bin));
            state.unassigned_births.emplace_back(snap.position_index, rec.mpc_index);
        }
        rec.chosen_bin_id = chosen;
        state.markov_trace.push_back(std::move(rec));
    }

    for (std::size_t b = 0; b < bins_before; ++b) {
        PathBin &bin = state.bins[b];
        if (!taken[b] && bin.active())
            bin.events.push_back({snap.position_index, BinEvent::Discontinue});
    }
    return state;
}

/// Runs the assignment over every snapshot in position order. Causal: the bins at
/// position j never depend on later snapshots.
inline BinningResult run_binning(const Trajectory &t, const BinningParams &params) {
    params.validate();
    if (t.snapshots.empty())
        throw ValidationError("cannot bin an empty trajectory");
    BinningResult result;
    const std::span<const Snapshot> all(t.snapshots);
    for (std::size_t j = 0; j < all.size(); ++j)
        result = assign_snapshot(std::move(result), all[j], all.first(j), params);
    return result;
}

inline std::vector<MarkovRecord> export_markov_trace(const BinningResult &r) { return r.markov_trace; }

} // namespace pathbin
