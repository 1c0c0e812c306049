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
#include <complex>
#include <thread>
#include <utility>
#include <vector>

#include "types.hpp"

namespace pathbin {

/// Box-shaped building standing on the ground plane. Only its four vertical faces reflect.
struct Scatterer {
    int id = 1;
    Vec3 center_m; // footprint centre; z is ignored, the box spans [0, edge_m]
    double edge_m = 40.0;
    double eps_r = 5.31;

    static constexpr std::array<Vec3, 4> face_normals = {Vec3{1, 0, 0}, Vec3{-1, 0, 0}, Vec3{0, 1, 0},
                                                         Vec3{0, -1, 0}};

    Vec3 box_min() const { return {center_m.x - edge_m / 2, center_m.y - edge_m / 2, 0.0}; }
    Vec3 box_max() const { return {center_m.x + edge_m / 2, center_m.y + edge_m / 2, edge_m}; }
};

struct FresnelCoefficient {
    double magnitude = 0.0;
    double phase_rad = 0.0;
};

namespace detail {

inline double fspl_gain_db(double tx_power_dbm, double wavelength_m, double path_length_m) {
    return tx_power_dbm + 20.0 * std::log10(wavelength_m / (4.0 * kPi * path_length_m));
}

// Elevation/azimuth (degrees) of direction `d` seen from the observer.
inline std::pair<double, double> direction_angles(Vec3 d) {
    const double horiz = std::hypot(d.x, d.y);
    return {rad2deg(std::atan2(d.z, horiz)), wrap_azimuth_deg(rad2deg(std::atan2(d.y, d.x)))};
}

// AoD looks from tx toward the first interaction point; AoA looks from rx toward the last.
inline MpcVector make_path(double gain_db, double length_m, Vec3 tx, Vec3 first_hop, Vec3 rx, Vec3 last_hop,
                           TruthLabel label) {
    MpcVector m;
    m.gain_db = gain_db;
    m.delay_ns = length_m / kSpeedOfLight * 1e9;
    std::tie(m.aod_elev_deg, m.aod_azim_deg) = direction_angles(first_hop - tx);
    std::tie(m.aoa_elev_deg, m.aoa_azim_deg) = direction_angles(last_hop - rx);
    m.truth_label = label;
    return m;
}

// True when the open segment (a, b) passes through the interior of the box shrunk by `tol`.
inline bool segment_hits_box(Vec3 a, Vec3 b, Vec3 lo, Vec3 hi, double tol = 1e-7) {
    double t0 = 0.0;
    double t1 = 1.0;
    const std::array<double, 3> p{a.x, a.y, a.z};
    const std::array<double, 3> d{b.x - a.x, b.y - a.y, b.z - a.z};
    const std::array<double, 3> mn{lo.x + tol, lo.y + tol, lo.z + tol};
    const std::array<double, 3> mx{hi.x - tol, hi.y - tol, hi.z - tol};
    for (int k = 0; k < 3; ++k) {
        if (std::abs(d[k]) < 1e-15) {
            if (p[k] <= mn[k] || p[k] >= mx[k])
                return false;
            continue;
        }
        double ta = (mn[k] - p[k]) / d[k];
        double tb = (mx[k] - p[k]) / d[k];
        if (ta > tb)
            std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 >= t1)
            return false;
    }
    return true;
}

} // namespace detail

// Vertical-polarization Fresnel coefficient; incidence measured from the surface normal.
inline FresnelCoefficient fresnel_vertical(double eps_r, double incidence_from_normal_rad) {
    const double c = std::cos(incidence_from_normal_rad);
    const double s = std::sin(incidence_from_normal_rad);
    const double root = std::sqrt(eps_r - s * s);
    const std::complex<double> gamma((eps_r * c - root) / (eps_r * c + root), 0.0);
    return {std::abs(gamma), std::arg(gamma)};
}

/// Direct path with Friis free-space loss and 0 dBi antennas at both ends.
inline MpcVector friis_los(const ScenarioConfig &config, Vec3 tx, Vec3 rx) {
    const double r = (rx - tx).norm();
    if (r < 1e-6)
        throw DegenerateGeometry("LOS path length below 1e-6 m");
    return detail::make_path(detail::fspl_gain_db(config.tx_power_dbm, config.wavelength_m(), r), r, tx, rx, rx,
                             tx, TruthLabel::los());
}

/// Specular ground bounce via the image of `tx` in the z = 0 plane.
inline MpcVector ground_reflection(const ScenarioConfig &config, Vec3 tx, Vec3 rx) {
    if (!(tx.z > 0.0) || !(rx.z > 0.0))
        throw DegenerateGeometry("ground reflection needs both endpoints above ground");
    const Vec3 image{tx.x, tx.y, -tx.z};
    const double r = (rx - image).norm();
    if (r < 1e-6)
        throw DegenerateGeometry("ground-reflected path length below 1e-6 m");
    const double t = tx.z / (tx.z + rx.z);
    const Vec3 bounce = image + t * (rx - image);
    const double incidence = std::acos(std::clamp((tx.z + rx.z) / r, -1.0, 1.0));
    const auto gamma = fresnel_vertical(config.eps_ground, incidence);
    const double gain = detail::fspl_gain_db(config.tx_power_dbm, config.wavelength_m(), r) +
                        20.0 * std::log10(gamma.magnitude);
    return detail::make_path(gain, r, tx, bounce, rx, bounce, TruthLabel::ground());
}

/// Default building layout: scatterers alternate between the +x and -x side of the
/// trajectory, each pair one `scatterer_spacing_m` deeper than the previous, and each
/// building staggered by `scatterer_stagger_m` along the flight direction.
inline std::vector<Scatterer> default_scatterers(const ScenarioConfig &config) {
    std::vector<Scatterer> out;
    out.reserve(static_cast<std::size_t>(config.n_scatterers));
    for (int k = 0; k < config.n_scatterers; ++k) {
        const double side = (k % 2 == 0) ? 1.0 : -1.0;
        const double depth = config.scatterer_lateral_offset_m + config.scatterer_edge_m / 2 +
                             static_cast<double>(k / 2) * config.scatterer_spacing_m;
        Scatterer s;
        s.id = k + 1;
        s.center_m = {side * depth, config.scatterer_first_row_m + static_cast<double>(k) * config.scatterer_stagger_m,
                      0.0};
        s.edge_m = config.scatterer_edge_m;
        s.eps_r = config.eps_scatterer;
        out.push_back(s);
    }
    return out;
}

/// Single-bounce specular reflections off the vertical faces of every scatterer.
/// A face contributes when both ends sit in front of it, the image-method specular point
/// lands on the face, and neither leg crosses any building.
inline std::vector<MpcVector> scatterer_reflections(const ScenarioConfig &config, Vec3 tx, Vec3 rx,
                                                    const std::vector<Scatterer> &scatterers) {
    std::vector<MpcVector> out;
    for (const auto &sc : scatterers) {
        for (const Vec3 n : Scatterer::face_normals) {
            const Vec3 on_face = sc.center_m + (sc.edge_m / 2) * n;
            const double dt = (tx - on_face).dot(n);
            const double dr = (rx - on_face).dot(n);
            if (dt <= 0.0 || dr <= 0.0)
                continue;
            const Vec3 image = tx - (2.0 * dt) * n;
            const Vec3 hit = image + (dt / (dt + dr)) * (rx - image);
            // the tangential horizontal axis is y for x-facing faces and vice versa
            const double along = n.x != 0.0 ? hit.y - sc.center_m.y : hit.x - sc.center_m.x;
            if (std::abs(along) > sc.edge_m / 2 || hit.z < 0.0 || hit.z > sc.edge_m)
                continue;
            bool blocked = false;
            for (const auto &other : scatterers) {
                if (detail::segment_hits_box(tx, hit, other.box_min(), other.box_max()) ||
                    detail::segment_hits_box(hit, rx, other.box_min(), other.box_max())) {
                    blocked = true;
                    break;
                }
            }
            if (blocked)
                continue;
            const double r = (rx - image).norm();
            if (r < 1e-6)
                continue;
            const double incidence = std::acos(std::clamp((dt + dr) / r, -1.0, 1.0));
            const auto gamma = fresnel_vertical(sc.eps_r, incidence);
            if (!(gamma.magnitude > 0.0))
                continue;
            const double gain = detail::fspl_gain_db(config.tx_power_dbm, config.wavelength_m(), r) +
                                20.0 * std::log10(gamma.magnitude);
            out.push_back(detail::make_path(gain, r, tx, hit, rx, hit, TruthLabel::scatterer(sc.id)));
        }
    }
    return out;
}

/// All paths at one RX position, strongest first, with sub-floor paths dropped.
inline Snapshot simulate_snapshot(const ScenarioConfig &config, const std::vector<Scatterer> &scatterers,
                                  int position_index) {
    Snapshot snap;
    snap.position_index = position_index;
    snap.rx_position_m = config.rx_position(position_index);
    const Vec3 tx = config.tx_position();
    snap.mpcs.push_back(friis_los(config, tx, snap.rx_position_m));
    snap.mpcs.push_back(ground_reflection(config, tx, snap.rx_position_m));
    for (auto &m : scatterer_reflections(config, tx, snap.rx_position_m, scatterers))
        snap.mpcs.push_back(std::move(m));
    std::erase_if(snap.mpcs, [&](const MpcVector &m) {
        return !std::isfinite(m.gain_db) || m.gain_db < config.noise_floor_dbm;
    });
    std::stable_sort(snap.mpcs.begin(), snap.mpcs.end(), stronger_first);
    return snap;
}

/// Straight-line flight at h_rx over the default layout. Positions are simulated
/// independently, so `threads` only affects wall-clock time.
inline Trajectory generate_trajectory(const ScenarioConfig &config, const std::vector<Scatterer> &scatterers,
                                      unsigned threads = 1) {
    config.validate();
    Trajectory t;
    t.config = config;
    t.snapshots.resize(static_cast<std::size_t>(config.n_positions));
    const unsigned workers = std::max(1u, std::min(threads, static_cast<unsigned>(config.n_positions)));
    auto work = [&](unsigned w) {
        for (int j = static_cast<int>(w); j < config.n_positions; j += static_cast<int>(workers))
            t.snapshots[static_cast<std::size_t>(j)] = simulate_snapshot(config, scatterers, j + 1);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
    }
    return t;
}

inline Trajectory generate_trajectory(const ScenarioConfig &config, unsigned threads = 1) {
    return generate_trajectory(config, default_scatterers(config), threads);
}

/// Splits at `start_index`: positions before it are observed, the rest are hidden.
inline std::pair<Trajectory, Trajectory> apply_blockage(const Trajectory &t, int start_index) {
    const int n = static_cast<int>(t.snapshots.size());
    if (start_index < 1 || start_index > n)
        throw IndexOutOfRange("blockage start " + std::to_string(start_index) + " outside [1, " +
                              std::to_string(n) + "]");
    Trajectory observed{{}, t.config};
    Trajectory hidden{{}, t.config};
    for (const auto &s : t.snapshots)
        (s.position_index < start_index ? observed : hidden).snapshots.push_back(s);
    return {std::move(observed), std::move(hidden)};
}

} // namespace pathbin
