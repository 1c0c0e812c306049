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

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace pathbin {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3 &, const Vec3 &) = default;

    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

// Wraps an azimuth in degrees onto [-180, 180).
inline double wrap_azimuth_deg(double az) {
    double w = std::fmod(az + 180.0, 360.0);
    if (w < 0.0)
        w += 360.0;
    w -= 180.0;
    // fmod can land exactly on +180 through rounding of tiny negatives
    return w >= 180.0 ? w - 360.0 : w;
}

// Shortest signed angular step from `from` to `to`, in (-180, 180].
inline double azimuth_step_deg(double from, double to) {
    double d = wrap_azimuth_deg(to - from);
    return d == -180.0 ? 180.0 : d;
}

// Synthetic ground truth attached to simulated MPCs. Never read by the binning code.
struct TruthLabel {
    enum class Kind : std::uint8_t { Los, GroundReflection, Scatterer };
    Kind kind = Kind::Los;
    int scatterer_id = 0;

    static TruthLabel los() { return {Kind::Los, 0}; }
    static TruthLabel ground() { return {Kind::GroundReflection, 0}; }
    static TruthLabel scatterer(int id) { return {Kind::Scatterer, id}; }

    friend bool operator==(const TruthLabel &, const TruthLabel &) = default;

    std::string to_string() const {
        switch (kind) {
        case Kind::Los:
            return "LOS";
        case Kind::GroundReflection:
            return "GroundReflection";
        case Kind::Scatterer:
            return "Scatterer(" + std::to_string(scatterer_id) + ")";
        }
        return {};
    }

    static std::optional<TruthLabel> parse(const std::string &s) {
        if (s == "LOS")
            return los();
        if (s == "GroundReflection")
            return ground();
        if (s.rfind("Scatterer(", 0) == 0 && s.size() > 11 && s.back() == ')') {
            try {
                std::size_t used = 0;
                const std::string num = s.substr(10, s.size() - 11);
                const int id = std::stoi(num, &used);
                if (used == num.size())
                    return scatterer(id);
            } catch (const std::exception &) {
            }
        }
        return std::nullopt;
    }
};

inline constexpr int kNumParameters = 6;

// Channel parameter index, in the fixed order used by the distance metric.
enum class Parameter : int { Gain = 0, Delay, AodElev, AodAzim, AoaElev, AoaAzim };

inline constexpr std::array<const char *, kNumParameters> kParameterNames = {
    "gain_db", "delay_ns", "aod_elev_deg", "aod_azim_deg", "aoa_elev_deg", "aoa_azim_deg"};

inline constexpr bool is_azimuth(int v) { return v == 3 || v == 5; }
inline constexpr bool is_elevation(int v) { return v == 2 || v == 4; }

// One multipath component: power, delay and the departure/arrival angle pairs.
struct MpcVector {
    double gain_db = 0.0;  // received power, dBm
    double delay_ns = 0.0; // propagation delay
    double aod_elev_deg = 0.0;
    double aod_azim_deg = 0.0;
    double aoa_elev_deg = 0.0;
    double aoa_azim_deg = 0.0;
    std::optional<TruthLabel> truth_label;

    // 0-based parameter access, order as in kParameterNames.
    double operator[](int v) const {
        switch (v) {
        case 0:
            return gain_db;
        case 1:
            return delay_ns;
        case 2:
            return aod_elev_deg;
        case 3:
            return aod_azim_deg;
        case 4:
            return aoa_elev_deg;
        default:
            return aoa_azim_deg;
        }
    }
    double &operator[](int v) {
        switch (v) {
        case 0:
            return gain_db;
        case 1:
            return delay_ns;
        case 2:
            return aod_elev_deg;
        case 3:
            return aod_azim_deg;
        case 4:
            return aoa_elev_deg;
        default:
            return aoa_azim_deg;
        }
    }

    std::array<double, kNumParameters> values() const {
        return {gain_db, delay_ns, aod_elev_deg, aod_azim_deg, aoa_elev_deg, aoa_azim_deg};
    }

    friend bool operator==(const MpcVector &, const MpcVector &) = default;
};

// Wraps both azimuths onto [-180, 180) and rejects elevations outside [-90, 90].
inline MpcVector canonicalize_angles(MpcVector m) {
    m.aod_azim_deg = wrap_azimuth_deg(m.aod_azim_deg);
    m.aoa_azim_deg = wrap_azimuth_deg(m.aoa_azim_deg);
    if (!(std::abs(m.aod_elev_deg) <= 90.0) || !(std::abs(m.aoa_elev_deg) <= 90.0))
        throw OutOfRangeElevation("elevation outside [-90, 90] degrees");
    return m;
}

// Descending gain, ties by ascending delay.
inline bool stronger_first(const MpcVector &a, const MpcVector &b) {
    if (a.gain_db != b.gain_db)
        return a.gain_db > b.gain_db;
    return a.delay_ns < b.delay_ns;
}

struct Snapshot {
    int position_index = 1; // 1-based RX position along the trajectory
    Vec3 rx_position_m;
    std::vector<MpcVector> mpcs; // strongest first

    friend bool operator==(const Snapshot &, const Snapshot &) = default;
};

struct ScenarioConfig {
    double frequency_hz = 28e9;
    double tx_power_dbm = 0.0;
    double h_tx_m = 2.0;
    double h_rx_m = 50.0;
    double trajectory_length_m = 100.0;
    int n_positions = 100;
    double tx_to_trajectory_start_m = 243.0;
    double scatterer_lateral_offset_m = 145.0;
    double scatterer_edge_m = 40.0;
    double scatterer_spacing_m = 110.0;
    int n_scatterers = 6;
    double eps_ground = 3.5;
    double eps_scatterer = 5.31;
    int blockage_start_index = 75;
    double gamma = 75.8;
    double epsilon = 0.15;
    int ar_order = 4;
    double death_threshold = 4.20;

    // Reconstruction and tuning knobs; every one has a default and may be omitted in files.
    double noise_floor_dbm = -160.0;
    double scatterer_first_row_m = 130.0; // y of scatterer 1's centre
    double scatterer_stagger_m = 8.0;     // y increment between consecutive scatterers
    int lookback = 0; // previous positions searched for d_min; 0 = unbounded
    int within_bin_window = 1;
    int stale_gap = 5;
    int horizon = 0; // 0 = n_positions - blockage_start_index + 1
    bool mape_all_parameters = true;

    friend bool operator==(const ScenarioConfig &, const ScenarioConfig &) = default;

    double wavelength_m() const { return kSpeedOfLight / frequency_hz; }

    int effective_horizon() const { return horizon > 0 ? horizon : n_positions - blockage_start_index + 1; }

    // TX at the origin on the ground; trajectory runs along +y at h_rx.
    Vec3 tx_position() const { return {0.0, 0.0, h_tx_m}; }

    Vec3 rx_position(int position_index) const {
        const double step = n_positions > 1 ? trajectory_length_m / static_cast<double>(n_positions) : 0.0;
        return {0.0, tx_to_trajectory_start_m + step * static_cast<double>(position_index - 1), h_rx_m};
    }

    void validate() const {
        auto positive = [](double v, const char *name) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw ValidationError(std::string(name) + " must be > 0");
        };
        positive(frequency_hz, "frequency_hz");
        positive(h_tx_m, "h_tx_m");
        positive(h_rx_m, "h_rx_m");
        positive(trajectory_length_m, "trajectory_length_m");
        positive(tx_to_trajectory_start_m, "tx_to_trajectory_start_m");
        positive(scatterer_lateral_offset_m, "scatterer_lateral_offset_m");
        positive(scatterer_edge_m, "scatterer_edge_m");
        positive(scatterer_spacing_m, "scatterer_spacing_m");
        positive(gamma, "gamma");
        positive(epsilon, "epsilon");
        positive(death_threshold, "death_threshold");
        if (!std::isfinite(tx_power_dbm))
            throw ValidationError("tx_power_dbm must be finite");
        if (n_positions < 1)
            throw ValidationError("n_positions must be >= 1");
        if (n_scatterers < 0)
            throw ValidationError("n_scatterers must be >= 0");
        if (!(eps_ground > 1.0))
            throw ValidationError("eps_ground must be > 1");
        if (!(eps_scatterer > 1.0))
            throw ValidationError("eps_scatterer must be > 1");
        if (blockage_start_index < 1 || blockage_start_index > n_positions)
            throw ValidationError("blockage_start_index must lie in [1, n_positions]");
        if (ar_order < 1)
            throw ValidationError("ar_order must be >= 1");
        if (!std::isfinite(scatterer_first_row_m) || !std::isfinite(scatterer_stagger_m))
            throw ValidationError("scatterer layout offsets must be finite");
        if (lookback < 0)
            throw ValidationError("lookback must be >= 0");
        if (within_bin_window < 1)
            throw ValidationError("within_bin_window must be >= 1");
        if (stale_gap < 0)
            throw ValidationError("stale_gap must be >= 0");
        if (horizon < 0)
            throw ValidationError("horizon must be >= 0");
    }
};

struct Trajectory {
    std::vector<Snapshot> snapshots; // ordered by position_index
    ScenarioConfig config;

    friend bool operator==(const Trajectory &, const Trajectory &) = default;
};

enum class BinEvent : std::uint8_t { Birth, Continue, Discontinue, Resurrect };

inline const char *to_string(BinEvent e) {
    switch (e) {
    case BinEvent::Birth:
        return "Birth";
    case BinEvent::Continue:
        return "Continue";
    case BinEvent::Discontinue:
        return "Discontinue";
    case BinEvent::Resurrect:
        return "Resurrect";
    }
    return "";
}

inline std::optional<BinEvent> parse_bin_event(const std::string &s) {
    if (s == "Birth")
        return BinEvent::Birth;
    if (s == "Continue")
        return BinEvent::Continue;
    if (s == "Discontinue")
        return BinEvent::Discontinue;
    if (s == "Resurrect")
        return BinEvent::Resurrect;
    return std::nullopt;
}

struct BinEntry {
    int position_index = 0;
    MpcVector mpc;
    friend bool operator==(const BinEntry &, const BinEntry &) = default;
};

struct BinEventRecord {
    int position_index = 0;
    BinEvent event = BinEvent::Birth;
    friend bool operator==(const BinEventRecord &, const BinEventRecord &) = default;
};

// A sequence of MPCs judged to be one physical path, plus its lifecycle.
struct PathBin {
    int bin_id = 1;
    std::vector<BinEntry> entries; // strictly increasing position_index
    std::vector<BinEventRecord> events;

    bool active() const { return !events.empty() && events.back().event != BinEvent::Discontinue; }

    const BinEntry *entry_at(int position_index) const {
        for (const auto &e : entries)
            if (e.position_index == position_index)
                return &e;
        return nullptr;
    }

    friend bool operator==(const PathBin &, const PathBin &) = default;
};

// Checks the per-bin lifecycle grammar Birth (Continue | Discontinue Resurrect)* with an
// optional trailing Discontinue, and strictly increasing entry positions.
inline bool lifecycle_is_valid(const PathBin &bin) {
    if (bin.events.empty() || bin.events.front().event != BinEvent::Birth)
        return false;
    bool active = true;
    for (std::size_t i = 1; i < bin.events.size(); ++i) {
        const auto e = bin.events[i].event;
        if (bin.events[i].position_index <= bin.events[i - 1].position_index)
            return false;
        if (e == BinEvent::Birth)
            return false;
        if (active && e == BinEvent::Resurrect)
            return false;
        if (!active && e != BinEvent::Resurrect)
            return false;
        active = e != BinEvent::Discontinue;
    }
    for (std::size_t i = 1; i < bin.entries.size(); ++i)
        if (bin.entries[i].position_index <= bin.entries[i - 1].position_index)
            return false;
    return true;
}

} // namespace pathbin
