#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "ixcomplex/rounding.hpp"
#include "ixcomplex/speed.hpp"
#include "ixcomplex/symexpr.hpp"

namespace ixcomplex {

// --- event log: session -> task -> page visit -> interaction step ---

struct StepRecord {
    std::string step_label;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    std::int64_t is_count = 1;

    bool operator==(const StepRecord&) const = default;
};

struct PageVisit {
    std::string page;
    std::int64_t enter_ms = 0;
    std::int64_t exit_ms = 0;
    std::vector<StepRecord> steps;

    bool operator==(const PageVisit&) const = default;
};

struct Task {
    std::string task_id;
    std::string concept_name;
    Binding binding;
    std::int64_t is_count = 0;
    std::vector<PageVisit> page_visits;

    bool operator==(const Task&) const = default;

    // Last page-visit exit minus first page-visit enter; gaps between pages count.
    std::int64_t duration_ms() const {
        if (page_visits.empty()) return 0;
        std::int64_t first = page_visits.front().enter_ms, last = page_visits.front().exit_ms;
        for (const auto& p : page_visits) {
            first = std::min(first, p.enter_ms);
            last = std::max(last, p.exit_ms);
        }
        return last - first;
    }
};

struct Session {
    std::string session_id;
    std::vector<Task> tasks;

    bool operator==(const Session&) const = default;
};

struct EventLog {
    std::vector<Session> sessions;

    bool operator==(const EventLog&) const = default;
};

class LogFormatError : public Error {
public:
    LogFormatError(const std::string& path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(path) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& path) {
    if (!j.is_object()) throw LogFormatError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw LogFormatError(path, std::string("missing field '") + key + "'");
    return *it;
}

inline std::string string_field(const nlohmann::json& j, const char* key, const std::string& path) {
    const auto& v = field(j, key, path);
    if (!v.is_string()) throw LogFormatError(path + "." + key, "expected a string");
    return v.get<std::string>();
}

inline std::int64_t ms_field(const nlohmann::json& j, const char* key, const std::string& path) {
    const auto& v = field(j, key, path);
    if (!v.is_number_integer()) throw LogFormatError(path + "." + key, "expected an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
        throw LogFormatError(path + "." + key, "integer out of range");
    }
    const auto value = v.get<std::int64_t>();
    if (value < 0) throw LogFormatError(path + "." + key, "must be nonnegative");
    return value;
}

inline const nlohmann::json& array_field(const nlohmann::json& j, const char* key, const std::string& path) {
    const auto& v = field(j, key, path);
    if (!v.is_array()) throw LogFormatError(path + "." + key, "expected an array");
    return v;
}

}  // namespace detail

inline EventLog log_from_json(const nlohmann::json& root) {
    EventLog log;
    const auto& sessions = detail::array_field(root, "sessions", "");
    for (std::size_t si = 0; si < sessions.size(); ++si) {
        const std::string sp = "sessions[" + std::to_string(si) + "]";
        const auto& js = sessions[si];
        Session s;
        s.session_id = detail::string_field(js, "session_id", sp);
        const auto& tasks = detail::array_field(js, "tasks", sp);
        for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
            const std::string tp = sp + ".tasks[" + std::to_string(ti) + "]";
            const auto& jt = tasks[ti];
            Task t;
            t.task_id = detail::string_field(jt, "task_id", tp);
            t.concept_name = detail::string_field(jt, "concept_name", tp);
            t.is_count = detail::ms_field(jt, "is_count", tp);
            const auto& jb = detail::field(jt, "binding", tp);
            if (!jb.is_object()) throw LogFormatError(tp + ".binding", "expected an object");
            for (const auto& [name, value] : jb.items()) {
                if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
                    throw LogFormatError(tp + ".binding." + name, "expected a nonnegative integer");
                }
                try {
                    t.binding.set(name, value.get<std::int64_t>());
                } catch (const Error& e) {
                    throw LogFormatError(tp + ".binding", e.what());
                }
            }
            const auto& visits = detail::array_field(jt, "page_visits", tp);
            for (std::size_t pi = 0; pi < visits.size(); ++pi) {
                const std::string pp = tp + ".page_visits[" + std::to_string(pi) + "]";
                const auto& jp = visits[pi];
                PageVisit p;
                p.page = detail::string_field(jp, "page", pp);
                p.enter_ms = detail::ms_field(jp, "enter_ms", pp);
                p.exit_ms = detail::ms_field(jp, "exit_ms", pp);
                if (p.exit_ms < p.enter_ms) throw LogFormatError(pp, "page visit exits before it enters");
                const auto& steps = detail::array_field(jp, "steps", pp);
                for (std::size_t ri = 0; ri < steps.size(); ++ri) {
                    const std::string rp = pp + ".steps[" + std::to_string(ri) + "]";
                    const auto& jr = steps[ri];
                    StepRecord r;
                    r.step_label = detail::string_field(jr, "step_label", rp);
                    r.start_ms = detail::ms_field(jr, "start_ms", rp);
                    r.end_ms = detail::ms_field(jr, "end_ms", rp);
                    r.is_count = detail::ms_field(jr, "is_count", rp);
                    if (r.end_ms < r.start_ms) throw LogFormatError(rp, "step ends before it starts");
                    if (r.start_ms < p.enter_ms || r.end_ms > p.exit_ms) {
                        throw LogFormatError(rp, "step interval lies outside its page visit");
                    }
                    if (r.is_count < 1) throw LogFormatError(rp, "is_count must be at least 1");
                    p.steps.push_back(std::move(r));
                }
                t.page_visits.push_back(std::move(p));
            }
            s.tasks.push_back(std::move(t));
        }
        log.sessions.push_back(std::move(s));
    }
    return log;
}

inline EventLog load_log(std::string_view bytes) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw LogFormatError("", std::string("malformed log: ") + e.what());
    }
    return log_from_json(root);
}

inline nlohmann::json log_to_json(const EventLog& log) {
    nlohmann::json sessions = nlohmann::json::array();
    for (const auto& s : log.sessions) {
        nlohmann::json tasks = nlohmann::json::array();
        for (const auto& t : s.tasks) {
            nlohmann::json visits = nlohmann::json::array();
            for (const auto& p : t.page_visits) {
                nlohmann::json steps = nlohmann::json::array();
                for (const auto& r : p.steps) {
                    steps.push_back({{"step_label", r.step_label},
                                     {"start_ms", r.start_ms},
                                     {"end_ms", r.end_ms},
                                     {"is_count", r.is_count}});
                }
                visits.push_back(
                    {{"page", p.page}, {"enter_ms", p.enter_ms}, {"exit_ms", p.exit_ms}, {"steps", steps}});
            }
            tasks.push_back({{"task_id", t.task_id},
                             {"concept_name", t.concept_name},
                             {"binding", t.binding.values()},
                             {"is_count", t.is_count},
                             {"page_visits", visits}});
        }
        sessions.push_back({{"session_id", s.session_id}, {"tasks", tasks}});
    }
    return {{"sessions", sessions}};
}

inline std::string write_log(const EventLog& log) { return log_to_json(log).dump(2) + "\n"; }

// --- IQR outlier removal ---

struct IqrBounds {
    double q1 = 0;
    double q3 = 0;
    double lower = 0;
    double upper = 0;

    bool contains(double x) const { return x >= lower && x <= upper; }
};

// Linear interpolation at position p*(n-1) of the sorted samples.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline IqrBounds iqr_bounds(std::span<const double> samples) {
    if (samples.empty()) throw Error("IQR filter needs at least one sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    IqrBounds b;
    b.q1 = quantile_sorted(sorted, 0.25);
    b.q3 = quantile_sorted(sorted, 0.75);
    const double iqr = b.q3 - b.q1;
    b.lower = b.q1 - 1.5 * iqr;
    b.upper = b.q3 + 1.5 * iqr;
    return b;
}

struct IqrResult {
    std::vector<double> retained;  // input order
    IqrBounds bounds;
};

inline IqrResult iqr_filter(std::span<const double> samples) {
    IqrResult r;
    r.bounds = iqr_bounds(samples);
    for (double x : samples) {
        if (r.bounds.contains(x)) r.retained.push_back(x);
    }
    return r;
}

// --- speed tables ---

enum class TaskGrouping { by_task, by_concept, by_concept_is };

struct TableRow {
    std::string group;
    SpeedStats stats;
};

struct SpeedTable {
    std::vector<TableRow> rows;
    std::vector<std::string> warnings;
};

namespace detail {

struct GroupSamples {
    std::string label;
    std::optional<std::int64_t> is_count;
    std::vector<double> seconds;
};

inline void add_sample(GroupSamples& g, std::int64_t is_count, double seconds) {
    if (g.is_count && *g.is_count != is_count) {
        throw Error("group '" + g.label + "' mixes IS counts " + std::to_string(*g.is_count) + " and " +
                    std::to_string(is_count));
    }
    g.is_count = is_count;
    g.seconds.push_back(seconds);
}

template <class Key>
SpeedTable build_table(std::map<Key, GroupSamples>& groups) {
    SpeedTable table;
    for (auto& [_, g] : groups) {
        // Sorted input makes floating sums independent of record order.
        std::sort(g.seconds.begin(), g.seconds.end());
        std::vector<double> positive;
        for (double s : g.seconds) {
            if (s > 0) positive.push_back(s);
        }
        if (positive.size() != g.seconds.size()) {
            table.warnings.push_back("group '" + g.label + "': dropped " +
                                     std::to_string(g.seconds.size() - positive.size()) + " zero-duration sample(s)");
        }
        if (positive.empty()) {
            table.warnings.push_back("group '" + g.label + "': no samples left after filtering, row omitted");
            continue;
        }
        const IqrResult filtered = iqr_filter(positive);
        if (filtered.retained.empty()) {
            table.warnings.push_back("group '" + g.label + "': no samples left after filtering, row omitted");
            continue;
        }
        std::vector<SpeedSample> samples;
        for (double s : filtered.retained) samples.push_back({*g.is_count, s});
        table.rows.push_back({g.label, speed_stats(samples)});
    }
    return table;
}

}  // namespace detail

inline SpeedTable task_table(const EventLog& log, TaskGrouping grouping = TaskGrouping::by_concept_is) {
    using Key = std::tuple<std::string, std::int64_t>;
    std::map<Key, detail::GroupSamples> groups;
    std::size_t empty_tasks = 0;
    for (const auto& s : log.sessions) {
        for (const auto& t : s.tasks) {
            if (t.page_visits.empty()) {
                ++empty_tasks;
                continue;
            }
            Key key;
            std::string label;
            switch (grouping) {
                case TaskGrouping::by_task:
                    key = {t.task_id, 0};
                    label = t.task_id;
                    break;
                case TaskGrouping::by_concept:
                    key = {t.concept_name, 0};
                    label = t.concept_name;
                    break;
                case TaskGrouping::by_concept_is:
                    key = {t.concept_name, t.is_count};
                    label = t.concept_name + " (" + std::to_string(t.is_count) + ")";
                    break;
            }
            auto& g = groups[key];
            g.label = label;
            detail::add_sample(g, t.is_count, static_cast<double>(t.duration_ms()) / 1000.0);
        }
    }
    SpeedTable table = detail::build_table(groups);
    if (empty_tasks) {
        table.warnings.insert(table.warnings.begin(),
                              std::to_string(empty_tasks) + " task(s) without page visits skipped");
    }
    if (groups.empty()) table.warnings.push_back("log contains no tasks");
    return table;
}

inline SpeedTable step_table(const EventLog& log) {
    using Key = std::tuple<std::string, std::string>;
    std::map<Key, detail::GroupSamples> groups;
    for (const auto& s : log.sessions) {
        for (const auto& t : s.tasks) {
            for (const auto& p : t.page_visits) {
                for (const auto& r : p.steps) {
                    auto& g = groups[Key{t.concept_name, r.step_label}];
                    g.label = t.concept_name + ": " + r.step_label;
                    detail::add_sample(g, r.is_count, static_cast<double>(r.end_ms - r.start_ms) / 1000.0);
                }
            }
        }
    }
    return detail::build_table(groups);
}

// --- rendering ---

enum class TableFormat { text, csv, json };

inline std::string render_table(const SpeedTable& table, TableFormat format) {
    static const char* header[] = {"group",        "n",            "is",           "min_s",         "max_s",
                                   "mean_s",       "max_is_per_s", "min_is_per_s", "mean_is_per_s"};
    auto cells = [](const TableRow& r) {
        const auto& s = r.stats;
        return std::vector<std::string>{r.group,           std::to_string(s.n),     std::to_string(s.is_count),
                                        fixed2(s.min_time), fixed2(s.max_time),     fixed2(s.mean_time),
                                        fixed2(s.max_speed), fixed2(s.min_speed),   fixed2(s.mean_speed)};
    };

    if (format == TableFormat::json) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : table.rows) {
            nlohmann::json row;
            row["group"] = r.group;
            row["n"] = r.stats.n;
            row["is"] = r.stats.is_count;
            row["min_s"] = round_half_up(r.stats.min_time);
            row["max_s"] = round_half_up(r.stats.max_time);
            row["mean_s"] = round_half_up(r.stats.mean_time);
            row["max_is_per_s"] = round_half_up(r.stats.max_speed);
            row["min_is_per_s"] = round_half_up(r.stats.min_speed);
            row["mean_is_per_s"] = round_half_up(r.stats.mean_speed);
            rows.push_back(row);
        }
        return nlohmann::json{{"rows", rows}, {"warnings", table.warnings}}.dump(2) + "\n";
    }

    std::string out;
    if (format == TableFormat::csv) {
        auto csv_cell = [](const std::string& s) {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char c : s) {
                if (c == '"') q += '"';
                q += c;
            }
            return q + "\"";
        };
        for (std::size_t i = 0; i < 9; ++i) out += std::string(i ? "," : "") + header[i];
        out += "\n";
        for (const auto& r : table.rows) {
            auto c = cells(r);
            for (std::size_t i = 0; i < c.size(); ++i) out += (i ? "," : "") + csv_cell(c[i]);
            out += "\n";
        }
        return out;
    }

    std::vector<std::vector<std::string>> grid;
    grid.emplace_back(std::begin(header), std::end(header));
    for (const auto& r : table.rows) grid.push_back(cells(r));
    std::vector<std::size_t> width(9, 0);
    for (const auto& row : grid) {
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    for (const auto& row : grid) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            const std::string pad(width[i] - row[i].size(), ' ');
            if (i == 0) {
                line += row[i] + pad;
            } else {
                line += "  " + pad + row[i];
            }
        }
        out += line + "\n";
    }
    return out;
}

}  // namespace ixcomplex
