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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "binning.hpp"
#include "death.hpp"
#include "evaluation.hpp"
#include "forecasting.hpp"
#include "types.hpp"

namespace pathbin::io {

// Shortest text that parses back to the same double.
inline std::string fmt_real(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view s, int line = 0) {
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("expected a number, got '" + std::string(s) + "'", line);
    return v;
}

inline int parse_int(std::string_view s, int line = 0) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("expected an integer, got '" + std::string(s) + "'", line);
    return v;
}

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto p = s.find(sep, start);
        out.emplace_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
        if (p == std::string_view::npos)
            break;
        start = p + 1;
    }
    return out;
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw RuntimeError("cannot write '" + path + "'");
    out << content;
    if (!out)
        throw RuntimeError("write to '" + path + "' failed");
}

// --------------------------------------------------------------------------------------
// Scenario config: flat `key = value` lines, `#` comments.

namespace detail {

struct ConfigField {
    const char *key;
    bool required;
    char kind; // 'b'ool, 'i'nteger or 'r'eal
    std::function<std::string(const ScenarioConfig &)> get;
    std::function<void(ScenarioConfig &, std::string_view, int)> set;
};

template <typename T> ConfigField field(const char *key, bool required, T ScenarioConfig::*member) {
    ConfigField f;
    f.key = key;
    f.required = required;
    f.kind = std::is_same_v<T, bool> ? 'b' : (std::is_integral_v<T> ? 'i' : 'r');
    f.get = [member](const ScenarioConfig &c) {
        if constexpr (std::is_same_v<T, bool>)
            return std::string(c.*member ? "true" : "false");
        else if constexpr (std::is_integral_v<T>)
            return std::to_string(c.*member);
        else
            return fmt_real(c.*member);
    };
    f.set = [member, key](ScenarioConfig &c, std::string_view v, int line) {
        if constexpr (std::is_same_v<T, bool>) {
            if (v == "true")
                c.*member = true;
            else if (v == "false")
                c.*member = false;
            else
                throw ParseError(std::string(key) + ": expected true or false", line);
        } else if constexpr (std::is_integral_v<T>) {
            c.*member = parse_int(v, line);
        } else {
            c.*member = parse_real(v, line);
        }
    };
    return f;
}

inline const std::vector<ConfigField> &config_fields() {
    static const std::vector<ConfigField> fields = {
        field("frequency_hz", true, &ScenarioConfig::frequency_hz),
        field("tx_power_dbm", true, &ScenarioConfig::tx_power_dbm),
        field("h_tx_m", true, &ScenarioConfig::h_tx_m),
        field("h_rx_m", true, &ScenarioConfig::h_rx_m),
        field("trajectory_length_m", true, &ScenarioConfig::trajectory_length_m),
        field("n_positions", true, &ScenarioConfig::n_positions),
        field("tx_to_trajectory_start_m", true, &ScenarioConfig::tx_to_trajectory_start_m),
        field("scatterer_lateral_offset_m", true, &ScenarioConfig::scatterer_lateral_offset_m),
        field("scatterer_edge_m", true, &ScenarioConfig::scatterer_edge_m),
        field("scatterer_spacing_m", true, &ScenarioConfig::scatterer_spacing_m),
        field("n_scatterers", true, &ScenarioConfig::n_scatterers),
        field("eps_ground", true, &ScenarioConfig::eps_ground),
        field("eps_scatterer", true, &ScenarioConfig::eps_scatterer),
        field("blockage_start_index", true, &ScenarioConfig::blockage_start_index),
        field("gamma", true, &ScenarioConfig::gamma),
        field("epsilon", true, &ScenarioConfig::epsilon),
        field("ar_order", true, &ScenarioConfig::ar_order),
        field("death_threshold", true, &ScenarioConfig::death_threshold),
        field("noise_floor_dbm", false, &ScenarioConfig::noise_floor_dbm),
        field("scatterer_first_row_m", false, &ScenarioConfig::scatterer_first_row_m),
        field("scatterer_stagger_m", false, &ScenarioConfig::scatterer_stagger_m),
        field("lookback", false, &ScenarioConfig::lookback),
        field("within_bin_window", false, &ScenarioConfig::within_bin_window),
        field("stale_gap", false, &ScenarioConfig::stale_gap),
        field("horizon", false, &ScenarioConfig::horizon),
        field("mape_all_parameters", false, &ScenarioConfig::mape_all_parameters),
    };
    return fields;
}

} // namespace detail

/// Parses a scenario file. Every scenario key must be present; the tuning knobs
/// (noise floor, layout offsets, lookback, windows, horizon) fall back to defaults.
inline ScenarioConfig parse_config(std::string_view text) {
    ScenarioConfig c;
    std::map<std::string, int> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected 'key = value'", line_no);
        const std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (value.empty())
            throw ParseError("missing value for key '" + key + "'", line_no);
        const auto &fields = detail::config_fields();
        const auto it = std::find_if(fields.begin(), fields.end(), [&](const auto &f) { return key == f.key; });
        if (it == fields.end())
            throw ParseError("unknown key '" + key + "'", line_no);
        if (seen.count(key))
            throw ParseError("duplicate key '" + key + "'", line_no);
        seen[key] = line_no;
        it->set(c, value, line_no);
    }
    for (const auto &f : detail::config_fields())
        if (f.required && !seen.count(f.key))
            throw ParseError(std::string("missing required key '") + f.key + "'");
    c.validate();
    return c;
}

inline ScenarioConfig load_config(const std::string &path) { return parse_config(read_file(path)); }

inline std::string format_config(const ScenarioConfig &c) {
    std::string out;
    for (const auto &f : detail::config_fields())
        out += std::string(f.key) + " = " + f.get(c) + "\n";
    return out;
}

inline nlohmann::ordered_json config_to_json(const ScenarioConfig &c) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto &f : detail::config_fields()) {
        const std::string v = f.get(c);
        if (f.kind == 'b')
            j[f.key] = (v == "true");
        else if (f.kind == 'i')
            j[f.key] = std::stoll(v);
        else
            j[f.key] = parse_real(v);
    }
    return j;
}

inline ScenarioConfig config_from_json(const nlohmann::ordered_json &j) {
    ScenarioConfig c;
    for (const auto &f : detail::config_fields()) {
        if (!j.contains(f.key)) {
            if (f.required)
                throw ParseError(std::string("missing required key '") + f.key + "'");
            continue;
        }
        const auto &v = j.at(f.key);
        std::string text;
        if (f.kind == 'b' && v.is_boolean())
            text = v.get<bool>() ? "true" : "false";
        else if (f.kind == 'i' && v.is_number_integer())
            text = std::to_string(v.get<long long>());
        else if (f.kind == 'r' && v.is_number())
            text = fmt_real(v.get<double>());
        else
            throw ParseError(std::string("key '") + f.key + "' has the wrong type");
        f.set(c, text, 0);
    }
    c.validate();
    return c;
}

// --------------------------------------------------------------------------------------
// Trajectory datasets

inline constexpr const char *kTrajectoryHeader =
    "position_index,x_m,y_m,z_m,gain_db,delay_ns,aod_elev_deg,aod_azim_deg,aoa_elev_deg,aoa_azim_deg,truth_label";

inline std::string format_mpc_fields(const MpcVector &m) {
    std::string s;
    for (int v = 0; v < kNumParameters; ++v) {
        if (v)
            s += ',';
        s += fmt_real(m[v]);
    }
    return s;
}

inline std::string format_trajectory_csv(const Trajectory &t) {
    std::string out = std::string(kTrajectoryHeader) + "\n";
    for (const auto &s : t.snapshots) {
        const std::string pos = std::to_string(s.position_index) + "," + fmt_real(s.rx_position_m.x) + "," +
                                fmt_real(s.rx_position_m.y) + "," + fmt_real(s.rx_position_m.z) + ",";
        for (const auto &m : s.mpcs)
            out += pos + format_mpc_fields(m) + "," + (m.truth_label ? m.truth_label->to_string() : "") + "\n";
    }
    return out;
}

namespace detail {

inline MpcVector parse_mpc_fields(const std::vector<std::string> &cells, std::size_t first, int line) {
    MpcVector m;
    for (int v = 0; v < kNumParameters; ++v)
        m[v] = parse_real(cells[first + static_cast<std::size_t>(v)], line);
    if (!std::isfinite(m.gain_db))
        throw ParseError("gain_db must be finite", line);
    if (!(m.delay_ns >= 0.0))
        throw ParseError("delay_ns must be >= 0", line);
    try {
        m = canonicalize_angles(m);
    } catch (const OutOfRangeElevation &e) {
        throw ParseError(e.what(), line);
    }
    return m;
}

inline std::optional<TruthLabel> parse_label(const std::string &s, int line) {
    if (s.empty())
        return std::nullopt;
    auto l = TruthLabel::parse(s);
    if (!l)
        throw ParseError("unknown truth label '" + s + "'", line);
    return l;
}

inline void finish_snapshots(std::vector<Snapshot> &snaps) {
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        if (snaps[i].position_index != snaps.front().position_index + static_cast<int>(i))
            throw ParseError("position_index values must be contiguous and increasing");
        std::stable_sort(snaps[i].mpcs.begin(), snaps[i].mpcs.end(), stronger_first);
    }
}

} // namespace detail

/// Reads the CSV dataset. Rows of one position must be adjacent; MPCs are re-sorted
/// strongest first. The CSV carries no scenario, so `config` is attached as given.
inline Trajectory parse_trajectory_csv(std::string_view text, const ScenarioConfig &config = {}) {
    Trajectory t;
    t.config = config;
    int line_no = 0;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty())
            continue;
        if (header) {
            if (line != kTrajectoryHeader)
                throw ParseError("unexpected trajectory header", line_no);
            header = false;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 11)
            throw ParseError("expected 11 columns, got " + std::to_string(cells.size()), line_no);
        const int j = parse_int(cells[0], line_no);
        const Vec3 rx{parse_real(cells[1], line_no), parse_real(cells[2], line_no), parse_real(cells[3], line_no)};
        MpcVector m = detail::parse_mpc_fields(cells, 4, line_no);
        m.truth_label = detail::parse_label(cells[10], line_no);
        if (t.snapshots.empty() || t.snapshots.back().position_index != j) {
            for (const auto &s : t.snapshots)
                if (s.position_index == j)
                    throw ParseError("rows of position " + std::to_string(j) + " are not adjacent", line_no);
            t.snapshots.push_back({j, rx, {}});
        } else if (!(t.snapshots.back().rx_position_m == rx)) {
            throw ParseError("position " + std::to_string(j) + " has inconsistent coordinates", line_no);
        }
        t.snapshots.back().mpcs.push_back(std::move(m));
    }
    if (header)
        throw ParseError("empty trajectory file");
    detail::finish_snapshots(t.snapshots);
    return t;
}

inline nlohmann::ordered_json trajectory_to_json(const Trajectory &t) {
    nlohmann::ordered_json j;
    j["config"] = config_to_json(t.config);
    j["snapshots"] = nlohmann::ordered_json::array();
    for (const auto &s : t.snapshots) {
        nlohmann::ordered_json js;
        js["position_index"] = s.position_index;
        js["rx_position_m"] = {s.rx_position_m.x, s.rx_position_m.y, s.rx_position_m.z};
        js["mpcs"] = nlohmann::ordered_json::array();
        for (const auto &m : s.mpcs) {
            nlohmann::ordered_json jm;
            for (int v = 0; v < kNumParameters; ++v)
                jm[kParameterNames[static_cast<std::size_t>(v)]] = m[v];
            jm["truth_label"] = m.truth_label ? nlohmann::ordered_json(m.truth_label->to_string()) : nullptr;
            js["mpcs"].push_back(std::move(jm));
        }
        j["snapshots"].push_back(std::move(js));
    }
    return j;
}

inline Trajectory trajectory_from_json(const nlohmann::ordered_json &j) {
    try {
        Trajectory t;
        t.config = config_from_json(j.at("config"));
        for (const auto &js : j.at("snapshots")) {
            Snapshot s;
            s.position_index = js.at("position_index").get<int>();
            const auto &p = js.at("rx_position_m");
            s.rx_position_m = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
            for (const auto &jm : js.at("mpcs")) {
                MpcVector m;
                for (int v = 0; v < kNumParameters; ++v)
                    m[v] = jm.at(kParameterNames[static_cast<std::size_t>(v)]).get<double>();
                m = canonicalize_angles(m);
                if (!jm.at("truth_label").is_null())
                    m.truth_label = detail::parse_label(jm.at("truth_label").get<std::string>(), 0);
                s.mpcs.push_back(std::move(m));
            }
            t.snapshots.push_back(std::move(s));
        }
        detail::finish_snapshots(t.snapshots);
        return t;
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("malformed trajectory JSON: ") + e.what());
    }
}

/// Loads a dataset by extension: `.json` carries its own scenario, CSV takes `config`.
inline Trajectory load_trajectory(const std::string &path, const ScenarioConfig &config = {}) {
    const std::string text = read_file(path);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        try {
            return trajectory_from_json(nlohmann::ordered_json::parse(text));
        } catch (const nlohmann::json::parse_error &e) {
            throw ParseError(std::string("invalid JSON: ") + e.what());
        }
    }
    return parse_trajectory_csv(text, config);
}

// --------------------------------------------------------------------------------------
// Binning outputs

inline std::string format_bins_csv(const BinningResult &r) {
    std::string out = "bin_id,position_index,gain_db,delay_ns,aod_elev_deg,aod_azim_deg,aoa_elev_deg,aoa_azim_deg,"
                      "truth_label\n";
    for (const auto &b : r.bins)
        for (const auto &e : b.entries)
            out += std::to_string(b.bin_id) + "," + std::to_string(e.position_index) + "," +
                   format_mpc_fields(e.mpc) + "," + (e.mpc.truth_label ? e.mpc.truth_label->to_string() : "") +
                   "\n";
    return out;
}

inline std::string format_events_csv(const BinningResult &r) {
    std::string out = "bin_id,position_index,event\n";
    for (const auto &b : r.bins)
        for (const auto &e : b.events)
            out += std::to_string(b.bin_id) + "," + std::to_string(e.position_index) + "," + to_string(e.event) +
                   "\n";
    return out;
}

inline std::string format_markov_csv(const std::vector<MarkovRecord> &trace) {
    std::string out = "position_index,mpc_index,chosen_bin,d_min,birth,candidates\n";
    for (const auto &rec : trace) {
        std::string cands;
        for (const auto &[id, d] : rec.candidates) {
            if (!cands.empty())
                cands += ';';
            cands += std::to_string(id) + ":" + fmt_real(d);
        }
        out += std::to_string(rec.position_index) + "," + std::to_string(rec.mpc_index) + "," +
               std::to_string(rec.chosen_bin_id) + "," + fmt_real(rec.d_min) + "," + (rec.birth ? "1" : "0") + "," +
               cands + "\n";
    }
    return out;
}

namespace detail {

// Calls `row` for every non-header line, with its cells and 1-based line number.
inline void for_each_row(std::string_view text, std::string_view header, std::size_t columns,
                         const std::function<void(const std::vector<std::string> &, int)> &row) {
    int line_no = 0;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty())
            continue;
        if (first) {
            if (line != header)
                throw ParseError("unexpected header, wanted '" + std::string(header) + "'", line_no);
            first = false;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != columns)
            throw ParseError("expected " + std::to_string(columns) + " columns, got " + std::to_string(cells.size()),
                             line_no);
        row(cells, line_no);
    }
    if (first)
        throw ParseError("empty file");
}

inline PathBin &bin_slot(BinningResult &r, int id, int line) {
    if (id < 1)
        throw ParseError("bin_id must be >= 1", line);
    if (id > static_cast<int>(r.bins.size())) {
        const int old = static_cast<int>(r.bins.size());
        r.bins.resize(static_cast<std::size_t>(id));
        for (int k = old; k < id; ++k)
            r.bins[static_cast<std::size_t>(k)].bin_id = k + 1;
    }
    return r.bins[static_cast<std::size_t>(id - 1)];
}

} // namespace detail

/// Rebuilds bins and lifecycle events from the `bin` outputs. The Markov trace is not
/// needed downstream and is left empty.
inline BinningResult parse_binning_csv(std::string_view bins_csv, std::string_view events_csv) {
    BinningResult r;
    detail::for_each_row(
        bins_csv,
        "bin_id,position_index,gain_db,delay_ns,aod_elev_deg,aod_azim_deg,aoa_elev_deg,aoa_azim_deg,truth_label", 9,
        [&](const std::vector<std::string> &c, int line) {
            PathBin &b = detail::bin_slot(r, parse_int(c[0], line), line);
            BinEntry e{parse_int(c[1], line), detail::parse_mpc_fields(c, 2, line)};
            e.mpc.truth_label = detail::parse_label(c[8], line);
            if (!b.entries.empty() && b.entries.back().position_index >= e.position_index)
                throw ParseError("bin entries must have increasing position_index", line);
            b.entries.push_back(std::move(e));
        });
    detail::for_each_row(events_csv, "bin_id,position_index,event", 3,
                         [&](const std::vector<std::string> &c, int line) {
                             PathBin &b = detail::bin_slot(r, parse_int(c[0], line), line);
                             const auto ev = parse_bin_event(c[2]);
                             if (!ev)
                                 throw ParseError("unknown event '" + c[2] + "'", line);
                             b.events.push_back({parse_int(c[1], line), *ev});
                         });
    for (const auto &b : r.bins)
        if (!lifecycle_is_valid(b))
            throw ParseError("bin " + std::to_string(b.bin_id) + " has an invalid lifecycle");
    return r;
}

inline std::vector<MarkovRecord> parse_markov_csv(std::string_view text) {
    std::vector<MarkovRecord> out;
    detail::for_each_row(text, "position_index,mpc_index,chosen_bin,d_min,birth,candidates", 6,
                         [&](const std::vector<std::string> &c, int line) {
                             MarkovRecord rec;
                             rec.position_index = parse_int(c[0], line);
                             rec.mpc_index = parse_int(c[1], line);
                             rec.chosen_bin_id = parse_int(c[2], line);
                             rec.d_min = parse_real(c[3], line);
                             rec.birth = c[4] == "1";
                             if (!c[5].empty())
                                 for (const auto &pair : split(c[5], ';')) {
                                     const auto kv = split(pair, ':');
                                     if (kv.size() != 2)
                                         throw ParseError("bad candidate '" + pair + "'", line);
                                     rec.candidates.emplace_back(parse_int(kv[0], line), parse_real(kv[1], line));
                                 }
                             out.push_back(std::move(rec));
                         });
    return out;
}

// --------------------------------------------------------------------------------------
// Forecasts, deaths, evaluation

/// Observed history (is_forecast = 0) followed by forecasts (is_forecast = 1) per bin.
inline std::string format_forecast_csv(const BinningResult &binning, const std::vector<BinForecast> &forecasts) {
    std::string out = "bin_id,position_index,parameter,value,is_forecast\n";
    for (const auto &f : forecasts) {
        const PathBin *bin = binning.find(f.bin_id);
        for (int v = 0; v < kNumParameters; ++v) {
            const std::string name = kParameterNames[static_cast<std::size_t>(v)];
            if (bin)
                for (const auto &e : bin->entries)
                    if (e.position_index < f.start_position)
                        out += std::to_string(f.bin_id) + "," + std::to_string(e.position_index) + "," + name + "," +
                               fmt_real(e.mpc[v]) + ",0\n";
            for (int k = 0; k < f.horizon; ++k)
                out += std::to_string(f.bin_id) + "," + std::to_string(f.start_position + k) + "," + name + "," +
                       fmt_real(f.per_parameter[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)]) + ",1\n";
        }
    }
    return out;
}

inline std::vector<BinForecast> parse_forecast_csv(std::string_view text) {
    std::map<int, std::map<int, std::array<std::optional<double>, kNumParameters>>> rows;
    detail::for_each_row(text, "bin_id,position_index,parameter,value,is_forecast", 5,
                         [&](const std::vector<std::string> &c, int line) {
                             if (c[4] == "0")
                                 return;
                             if (c[4] != "1")
                                 throw ParseError("is_forecast must be 0 or 1", line);
                             const auto it = std::find(kParameterNames.begin(), kParameterNames.end(), c[2]);
                             if (it == kParameterNames.end())
                                 throw ParseError("unknown parameter '" + c[2] + "'", line);
                             rows[parse_int(c[0], line)][parse_int(c[1], line)]
                                 [static_cast<std::size_t>(it - kParameterNames.begin())] = parse_real(c[3], line);
                         });
    std::vector<BinForecast> out;
    for (const auto &[id, by_pos] : rows) {
        BinForecast f;
        f.bin_id = id;
        f.start_position = by_pos.begin()->first;
        f.horizon = static_cast<int>(by_pos.size());
        int expect = f.start_position;
        for (const auto &[p, vals] : by_pos) {
            if (p != expect++)
                throw ParseError("forecast positions of bin " + std::to_string(id) + " are not contiguous");
            for (int v = 0; v < kNumParameters; ++v) {
                if (!vals[static_cast<std::size_t>(v)])
                    throw ParseError("bin " + std::to_string(id) + " lacks " +
                                     kParameterNames[static_cast<std::size_t>(v)] + " at position " +
                                     std::to_string(p));
                f.per_parameter[static_cast<std::size_t>(v)].push_back(*vals[static_cast<std::size_t>(v)]);
            }
        }
        out.push_back(std::move(f));
    }
    return out;
}

inline std::string format_deaths_csv(const DeathReport &r) {
    std::string out = "bin_id,d_l,n_positions,predicted_dead\n";
    for (const auto &[id, e] : r.per_bin)
        out += std::to_string(id) + "," + fmt_real(e.d_l) + "," + std::to_string(e.n_positions) + "," +
               (e.predicted_dead ? "true" : "false") + "\n";
    return out;
}

inline std::map<int, DeathEstimate> parse_deaths_csv(std::string_view text) {
    std::map<int, DeathEstimate> out;
    detail::for_each_row(text, "bin_id,d_l,n_positions,predicted_dead", 4,
                         [&](const std::vector<std::string> &c, int line) {
                             if (c[3] != "true" && c[3] != "false")
                                 throw ParseError("predicted_dead must be true or false", line);
                             out[parse_int(c[0], line)] = {parse_real(c[1], line), parse_int(c[2], line),
                                                           c[3] == "true"};
                         });
    return out;
}

inline nlohmann::ordered_json report_to_json(const EvalReport &r) {
    nlohmann::ordered_json j;
    j["overall_mse_db"] = r.overall_mse_db;
    j["overall_mape_percent"] = r.overall_mape_percent;
    j["baseline_mse_db"] = r.baseline_mse_db;
    j["baseline_mape_percent"] = r.baseline_mape_percent;
    j["matched_pairs"] = r.matched_pairs;
    j["baseline_matched_pairs"] = r.baseline_matched_pairs;
    j["unpaired_hidden"] = r.unpaired_hidden;
    j["unpaired_forecasts"] = r.unpaired_forecasts;
    j["los_rmse_db"] = r.los_rmse_db ? nlohmann::ordered_json(*r.los_rmse_db) : nullptr;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto &[id, v] : r.per_bin_mse_db)
        per[std::to_string(id)] = v;
    j["per_bin_mse_db"] = std::move(per);
    return j;
}

inline EvalReport report_from_json(const nlohmann::ordered_json &j) {
    try {
        EvalReport r;
        r.overall_mse_db = j.at("overall_mse_db").get<double>();
        r.overall_mape_percent = j.at("overall_mape_percent").get<double>();
        r.baseline_mse_db = j.at("baseline_mse_db").get<double>();
        r.baseline_mape_percent = j.at("baseline_mape_percent").get<double>();
        r.matched_pairs = j.at("matched_pairs").get<int>();
        r.baseline_matched_pairs = j.at("baseline_matched_pairs").get<int>();
        r.unpaired_hidden = j.at("unpaired_hidden").get<int>();
        r.unpaired_forecasts = j.at("unpaired_forecasts").get<int>();
        if (!j.at("los_rmse_db").is_null())
            r.los_rmse_db = j.at("los_rmse_db").get<double>();
        for (const auto &[k, v] : j.at("per_bin_mse_db").items())
            r.per_bin_mse_db[std::stoi(k)] = v.get<double>();
        return r;
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("malformed evaluation report: ") + e.what());
    }
}

/// One row per scored pair, for both the binned forecast and the rank baseline.
inline std::string format_position_errors_csv(const Experiment &ex) {
    std::string out =
        "method,position_index,bin_id,mpc_index,truth_label,forecast_gain_db,true_gain_db,gain_error_db,distance\n";
    auto emit = [&](const char *method, const Matching &m) {
        for (const auto &p : m.pairs)
            out += std::string(method) + "," + std::to_string(p.position_index) + "," + std::to_string(p.bin_id) +
                   "," + std::to_string(p.mpc_index) + "," +
                   (p.truth.truth_label ? p.truth.truth_label->to_string() : "") + "," +
                   fmt_real(p.forecast.gain_db) + "," + fmt_real(p.truth.gain_db) + "," +
                   fmt_real(p.forecast.gain_db - p.truth.gain_db) + "," + fmt_real(p.distance) + "\n";
    };
    emit("binned", ex.matching);
    emit("baseline", ex.baseline_matching);
    return out;
}

} // namespace pathbin::io
