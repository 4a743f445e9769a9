#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ixcomplex/error.hpp"

namespace ixcomplex {

// Interaction speed in IS/sec. Range bounds are optional: a model without
// them only supports an expected-time estimate.
struct SpeedModel {
    std::string name;
    double mean = 0;
    std::optional<double> min;
    std::optional<double> max;
    std::string source;

    void check() const {
        if (!(mean > 0)) throw ValidationError("speed model '" + name + "': mean must be positive");
        if (min.has_value() != max.has_value()) {
            throw ValidationError("speed model '" + name + "': min and max must be given together");
        }
        if (min && !(*min > 0 && *min <= mean && mean <= *max)) {
            throw ValidationError("speed model '" + name + "': requires 0 < min <= mean <= max");
        }
    }

    bool has_range() const { return min.has_value(); }

    static SpeedModel from_json(const nlohmann::json& j) {
        try {
            SpeedModel m;
            m.name = j.value("name", std::string("custom"));
            m.mean = j.at("mean").get<double>();
            if (j.contains("min")) m.min = j.at("min").get<double>();
            if (j.contains("max")) m.max = j.at("max").get<double>();
            m.source = j.value("source", std::string{});
            m.check();
            return m;
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("malformed speed model JSON: ") + e.what());
        }
    }
};

inline const std::vector<SpeedModel>& builtin_speed_models() {
    static const std::vector<SpeedModel> models = {
        {"overall", 1.05, 0.18, 8.15, "measured mean over both UI versions, with observed extremes"},
        {"v1", 1.20, std::nullopt, std::nullopt, "measured mean, wizard version"},
        {"v2", 0.66, std::nullopt, std::nullopt, "measured mean, single-page version"},
    };
    return models;
}

inline const SpeedModel* find_speed_model(const std::string& name) {
    for (const auto& m : builtin_speed_models()) {
        if (m.name == name) return &m;
    }
    return nullptr;
}

struct TimeEstimate {
    double expected = 0;
    std::optional<double> fastest;
    std::optional<double> slowest;
};

inline TimeEstimate estimate_time(std::int64_t is_count, const SpeedModel& m) {
    m.check();
    if (is_count < 0) throw Error("IS count must be nonnegative");
    const double is = static_cast<double>(is_count);
    TimeEstimate t{is / m.mean, std::nullopt, std::nullopt};
    if (m.has_range()) {
        t.fastest = is / *m.max;
        t.slowest = is / *m.min;
    }
    return t;
}

struct SpeedSample {
    std::int64_t is_count = 0;
    double seconds = 0;
};

struct SpeedStats {
    std::int64_t is_count = 0;
    std::size_t n = 0;
    double min_time = 0;
    double max_time = 0;
    double mean_time = 0;
    double max_speed = 0;
    double min_speed = 0;
    double mean_speed = 0;
};

// Mean speed is IS / mean time, not the mean of per-sample speeds.
inline SpeedStats speed_stats(std::span<const SpeedSample> samples) {
    if (samples.empty()) throw Error("speed statistics need at least one sample");
    SpeedStats s;
    s.is_count = samples.front().is_count;
    s.n = samples.size();
    s.min_time = samples.front().seconds;
    s.max_time = samples.front().seconds;
    double total = 0;
    for (const auto& x : samples) {
        if (x.is_count != s.is_count) throw Error("samples in one group must share the same IS count");
        if (!(x.seconds > 0)) throw Error("sample durations must be positive");
        s.min_time = std::min(s.min_time, x.seconds);
        s.max_time = std::max(s.max_time, x.seconds);
        total += x.seconds;
    }
    s.mean_time = total / static_cast<double>(samples.size());
    const double is = static_cast<double>(s.is_count);
    s.mean_speed = is / s.mean_time;
    s.max_speed = is / s.min_time;
    s.min_speed = is / s.max_time;
    return s;
}

struct SpeedRow {
    std::size_t n = 0;
    double mean_speed = 0;
};

// Sample-count-weighted mean of row mean speeds.
inline double aggregate_speed(std::span<const SpeedRow> rows) {
    if (rows.empty()) throw Error("aggregate speed needs at least one row");
    double weighted = 0;
    double count = 0;
    for (const auto& r : rows) {
        if (r.n == 0) throw Error("row sample counts must be positive");
        weighted += static_cast<double>(r.n) * r.mean_speed;
        count += static_cast<double>(r.n);
    }
    return weighted / count;
}

}  // namespace ixcomplex
