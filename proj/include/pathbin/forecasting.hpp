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
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "binning.hpp"
#include "types.hpp"

namespace pathbin {

/// Autoregressive predictor of order n for one scalar series.
///
/// One-step prediction is `mean + offset + sum_i a_i (x[t-i] - mean)`. `mean` is the
/// sample mean of the fitted series; `offset` is the least-squares intercept left after
/// centring (zero for a model written purely around its mean).
struct ArModel {
    int order = 1;
    std::vector<double> coefficients;
    double mean = 0.0;
    double offset = 0.0;
    double noise_variance = 0.0;

    static ArModel centered(double mean, std::vector<double> coefficients) {
        ArModel m;
        m.order = static_cast<int>(coefficients.size());
        m.coefficients = std::move(coefficients);
        m.mean = mean;
        return m;
    }

    friend bool operator==(const ArModel &, const ArModel &) = default;
};

/// Conditional least-squares AR(order) fit with intercept on the centred series.
/// Needs at least 2*order + 1 samples; throws SeriesTooShort otherwise.
inline ArModel fit_ar(std::span<const double> series, int order) {
    if (order < 1)
        throw ValidationError("AR order must be >= 1");
    const auto len = series.size();
    if (len < static_cast<std::size_t>(2 * order + 1))
        throw SeriesTooShort(len, order);

    ArModel model;
    model.order = order;
    model.coefficients.assign(static_cast<std::size_t>(order), 0.0);
    model.mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(len);

    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    if (*lo == *hi) {
        model.mean = *lo;
        return model;
    }

    const Eigen::Index rows = static_cast<Eigen::Index>(len) - order;
    Eigen::MatrixXd design(rows, order + 1);
    Eigen::VectorXd target(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto t = static_cast<std::size_t>(r + order);
        target(r) = series[t] - model.mean;
        design(r, 0) = 1.0;
        for (int i = 1; i <= order; ++i)
            design(r, i) = series[t - static_cast<std::size_t>(i)] - model.mean;
    }
    const Eigen::VectorXd sol = design.completeOrthogonalDecomposition().solve(target);
    model.offset = sol(0);
    for (int i = 0; i < order; ++i)
        model.coefficients[static_cast<std::size_t>(i)] = sol(i + 1);
    const Eigen::VectorXd resid = target - design * sol;
    model.noise_variance = resid.squaredNorm() / static_cast<double>(rows);
    return model;
}

inline ArModel fit_ar(const std::vector<double> &series, int order) {
    return fit_ar(std::span<const double>(series), order);
}

/// Iterated one-step prediction `horizon` steps past the end of `series`, feeding each
/// prediction back in as the newest lag.
inline std::vector<double> forecast(const ArModel &model, std::span<const double> series, int horizon) {
    if (horizon < 1)
        throw ValidationError("forecast horizon must be >= 1");
    if (series.size() < static_cast<std::size_t>(model.order))
        throw HistoryTooShort("forecast needs at least " + std::to_string(model.order) + " past samples");
    std::vector<double> lags(series.end() - model.order, series.end());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(horizon));
    for (int k = 0; k < horizon; ++k) {
        double next = model.mean + model.offset;
        for (int i = 1; i <= model.order; ++i)
            next += model.coefficients[static_cast<std::size_t>(i - 1)] *
                    (lags[lags.size() - static_cast<std::size_t>(i)] - model.mean);
        out.push_back(next);
        lags.push_back(next);
    }
    return out;
}

inline std::vector<double> forecast(const ArModel &model, const std::vector<double> &series, int horizon) {
    return forecast(model, std::span<const double>(series), horizon);
}

/// Fits at `order`, dropping to max(1, (len-1)/2) when the series is too short. Series
/// with fewer than three samples are held at their last value.
inline std::vector<double> fit_and_forecast(std::span<const double> series, int order, int horizon) {
    if (series.empty())
        throw HistoryTooShort("cannot forecast an empty series");
    ArModel model;
    try {
        model = fit_ar(series, order);
    } catch (const SeriesTooShort &) {
        if (series.size() < 3) {
            model = ArModel::centered(series.back(), {0.0});
        } else {
            model = fit_ar(series, std::max(1, static_cast<int>(series.size() - 1) / 2));
        }
    }
    return forecast(model, series, horizon);
}

/// Cumulative shortest-step unwrapping of an azimuth series.
inline std::vector<double> unwrap_azimuth(std::span<const double> wrapped) {
    std::vector<double> out;
    out.reserve(wrapped.size());
    for (double a : wrapped)
        out.push_back(out.empty() ? a : out.back() + azimuth_step_deg(out.back(), a));
    return out;
}

/// Forecasts all six parameters of one MPC sequence. Azimuths are unwrapped before the
/// fit and re-wrapped after; elevations are clamped to [-90, 90] and delays to >= 0.
inline std::array<std::vector<double>, kNumParameters> forecast_parameters(std::span<const MpcVector> history,
                                                                          int order, int horizon) {
    std::array<std::vector<double>, kNumParameters> out;
    std::vector<double> series(history.size());
    for (int v = 0; v < kNumParameters; ++v) {
        for (std::size_t i = 0; i < history.size(); ++i)
            series[i] = history[i][v];
        if (is_azimuth(v))
            series = unwrap_azimuth(series);
        out[static_cast<std::size_t>(v)] = fit_and_forecast(series, order, horizon);
        for (double &x : out[static_cast<std::size_t>(v)]) {
            if (is_azimuth(v))
                x = wrap_azimuth_deg(x);
            else if (is_elevation(v))
                x = std::clamp(x, -90.0, 90.0);
            else if (v == 1)
                x = std::max(x, 0.0);
        }
    }
    return out;
}

struct BinForecast {
    int bin_id = 0;
    int start_position = 0; // position index of the first forecast value
    int horizon = 0;
    std::array<std::vector<double>, kNumParameters> per_parameter;

    // Forecast vector at step k (0-based), i.e. position start_position + k.
    MpcVector at(int k) const {
        MpcVector m;
        for (int v = 0; v < kNumParameters; ++v)
            m[v] = per_parameter[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)];
        return m;
    }

    friend bool operator==(const BinForecast &, const BinForecast &) = default;
};

struct ForecastFailure {
    int bin_id = 0;
    std::string message;
    friend bool operator==(const ForecastFailure &, const ForecastFailure &) = default;
};

struct ForecastSet {
    std::vector<BinForecast> forecasts; // ascending bin_id
    std::vector<ForecastFailure> failures;
    std::vector<int> skipped_stale;
};

/// Forecasts every bin still live shortly before the blockage.
///
/// A bin is skipped when its last entry is more than `stale_gap` positions before the
/// last observed position (blockage_start - 1). Each remaining bin is fit on its observed
/// entries in order, gaps ignored, and forecast over positions
/// [blockage_start, blockage_start + horizon). A failing bin is reported, not fatal.
inline ForecastSet forecast_bins(const BinningResult &result, int blockage_start, int horizon, int order,
                                 int stale_gap = 5, unsigned threads = 1) {
    if (horizon < 1)
        throw ValidationError("forecast horizon must be >= 1");
    if (order < 1)
        throw ValidationError("AR order must be >= 1");

    struct Slot {
        int bin_id = 0;
        bool stale = false;
        std::optional<BinForecast> forecast;
        std::optional<std::string> error;
    };
    std::vector<Slot> slots(result.bins.size());

    auto one = [&](std::size_t b) {
        const PathBin &bin = result.bins[b];
        Slot &slot = slots[b];
        slot.bin_id = bin.bin_id;
        std::vector<MpcVector> history;
        for (const auto &e : bin.entries)
            if (e.position_index < blockage_start)
                history.push_back(e.mpc);
        if (history.empty()) {
            slot.stale = true;
            return;
        }
        int last = 0;
        for (const auto &e : bin.entries)
            if (e.position_index < blockage_start)
                last = e.position_index;
        if ((blockage_start - 1) - last > stale_gap) {
            slot.stale = true;
            return;
        }
        try {
            BinForecast f;
            f.bin_id = bin.bin_id;
            f.start_position = blockage_start;
            f.horizon = horizon;
            f.per_parameter = forecast_parameters(history, order, horizon);
            slot.forecast = std::move(f);
        } catch (const std::exception &e) {
            slot.error = e.what();
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(slots.size())));
    if (workers <= 1) {
        for (std::size_t b = 0; b < slots.size(); ++b)
            one(b);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t b = w; b < slots.size(); b += workers)
                    one(b);
            });
    }

    ForecastSet out;
    for (auto &s : slots) {
        if (s.stale)
            out.skipped_stale.push_back(s.bin_id);
        else if (s.error)
            out.failures.push_back({s.bin_id, *s.error});
        else if (s.forecast)
            out.forecasts.push_back(std::move(*s.forecast));
    }
    return out;
}

} // namespace pathbin
