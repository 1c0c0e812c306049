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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "io.hpp"
#include "types.hpp"

namespace pathbin {

inline constexpr const char *kToolName = "pathbin";
inline constexpr const char *kToolVersion = "0.1.0";

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw RuntimeError("SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

struct FileDigest {
    std::string path; // relative to the manifest's directory for outputs
    std::string sha256;
    friend bool operator==(const FileDigest &, const FileDigest &) = default;
};

// Record of one CLI run. Timings vary between runs; everything else is reproducible.
struct RunManifest {
    std::string command;
    ScenarioConfig config;
    std::vector<FileDigest> inputs;
    std::vector<FileDigest> outputs;
    std::vector<std::pair<std::string, double>> timings_ms;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["command"] = command;
        j["config"] = io::config_to_json(config);
        auto files = [](const std::vector<FileDigest> &v) {
            nlohmann::ordered_json a = nlohmann::ordered_json::array();
            for (const auto &f : v)
                a.push_back({{"path", f.path}, {"sha256", f.sha256}});
            return a;
        };
        j["inputs"] = files(inputs);
        j["outputs"] = files(outputs);
        nlohmann::ordered_json t = nlohmann::ordered_json::object();
        for (const auto &[stage, ms] : timings_ms)
            t[stage] = ms;
        j["timings_ms"] = std::move(t);
        return j;
    }

    static RunManifest from_json(const nlohmann::ordered_json &j) {
        try {
            RunManifest m;
            m.command = j.at("command").get<std::string>();
            m.config = io::config_from_json(j.at("config"));
            for (const auto &f : j.at("inputs"))
                m.inputs.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
            for (const auto &f : j.at("outputs"))
                m.outputs.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
            for (const auto &[k, v] : j.at("timings_ms").items())
                m.timings_ms.emplace_back(k, v.get<double>());
            return m;
        } catch (const nlohmann::json::exception &e) {
            throw ParseError(std::string("malformed manifest: ") + e.what());
        }
    }
};

/// Recomputes every output digest relative to `dir`; returns the files that differ or
/// are missing.
inline std::vector<std::string> verify_manifest(const RunManifest &m, const std::filesystem::path &dir) {
    std::vector<std::string> bad;
    for (const auto &f : m.outputs) {
        try {
            if (sha256_hex(io::read_file((dir / f.path).string())) != f.sha256)
                bad.push_back(f.path);
        } catch (const ValidationError &) {
            bad.push_back(f.path);
        }
    }
    return bad;
}

} // namespace pathbin
