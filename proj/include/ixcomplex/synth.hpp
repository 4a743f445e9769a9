#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include "ixcomplex/concept.hpp"
#include "ixcomplex/log_analytics.hpp"

namespace ixcomplex {

struct ActionCounts {
    std::array<std::int64_t, 5> per_kind{};
    std::int64_t total = 0;

    std::int64_t operator[](ActionKind k) const { return per_kind[static_cast<std::size_t>(k)]; }

    bool operator==(const ActionCounts&) const = default;
};

// "T:35 E:6 C:4 total:45"; zero kinds are left out.
inline std::string format_counts(const ActionCounts& c) {
    std::string out;
    for (ActionKind k : all_action_kinds) {
        if (c[k] == 0) continue;
        out += std::string(1, action_letter(k)) + ":" + std::to_string(c[k]) + " ";
    }
    return out + "total:" + std::to_string(c.total);
}

namespace oracle {

// Recursive interpretation of the parse tree, independent of Expression
// arithmetic.
inline std::int64_t interpret(const syntax::Node& n, const Binding& b) {
    using K = syntax::Node::Kind;
    switch (n.kind) {
        case K::number: return n.value;
        case K::variable: {
            const std::int64_t* v = b.find(n.name);
            if (!v) throw UnboundVariableError(n.name);
            return *v;
        }
        case K::op_name: throw Error("operator name in count expression");
        case K::neg: return detail::checked_sub(0, interpret(n.children[0], b));
        case K::add: return detail::checked_add(interpret(n.children[0], b), interpret(n.children[1], b));
        case K::sub: return detail::checked_sub(interpret(n.children[0], b), interpret(n.children[1], b));
        case K::mul: return detail::checked_mul(interpret(n.children[0], b), interpret(n.children[1], b));
    }
    return 0;
}

inline std::int64_t interpret_count(const Formula& f, const Binding& b, const std::string& step) {
    const std::int64_t v = interpret(syntax::parse(f.source), b);
    if (v < 0) {
        throw EvalError("step '" + step + "': '" + f.source + "' evaluates to " + std::to_string(v) +
                        " (inadmissible binding)");
    }
    return v;
}

inline constexpr std::int64_t max_repeat = 100'000'000;

}  // namespace oracle

// Executes the step repeat-many times, adding its concrete action counts.
inline ActionCounts count_step(const UserStep& s, const Binding& b) {
    ActionCounts counts;
    const std::int64_t repeat = oracle::interpret_count(s.repeat, b, s.label);
    if (repeat > oracle::max_repeat) {
        throw EvalError("step '" + s.label + "': repeat count " + std::to_string(repeat) + " too large to execute");
    }
    std::array<std::int64_t, 5> once{};
    for (const auto& [k, f] : s.actions) once[static_cast<std::size_t>(k)] = oracle::interpret_count(f, b, s.label);
    for (std::int64_t i = 0; i < repeat; ++i) {
        for (std::size_t k = 0; k < once.size(); ++k) {
            counts.per_kind[k] = detail::checked_add(counts.per_kind[k], once[k]);
            counts.total = detail::checked_add(counts.total, once[k]);
        }
    }
    return counts;
}

inline ActionCounts count_actions(const InteractionConcept& c, const Binding& b) {
    ActionCounts counts;
    for (const auto& s : c.steps) {
        const ActionCounts step = count_step(s, b);
        for (std::size_t k = 0; k < counts.per_kind.size(); ++k) {
            counts.per_kind[k] = detail::checked_add(counts.per_kind[k], step.per_kind[k]);
        }
        counts.total = detail::checked_add(counts.total, step.total);
    }
    return counts;
}

// --- synthetic logs ---

struct SynthConfig {
    InteractionConcept interaction;
    Binding binding;
    std::int64_t sessions = 1;
    double speed_mean = 1.05;
    double speed_sd = 0;
    std::uint64_t seed = 0;
};

inline constexpr double min_synth_speed = 0.01;

// Random source: std::mt19937_64 (fully specified by the C++ standard).
// Uniforms take the top 53 bits of one draw; normals use Box-Muller on two
// uniforms and keep only the cosine branch, so every normal costs exactly
// two draws. This keeps logs reproducible across standard libraries.
class SpeedSampler {
public:
    SpeedSampler(std::uint64_t seed, double mean, double sd) : rng_(seed), mean_(mean), sd_(sd) {}

    double next() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return std::max(min_synth_speed, mean_ + sd_ * z);
    }

private:
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    double mean_;
    double sd_;
};

// One task per session, one page visit per step with a nonzero IS count.
// Each step's duration is its IS count divided by a freshly sampled speed.
inline EventLog generate_log(const SynthConfig& cfg) {
    if (cfg.sessions < 1) throw ValidationError("sessions must be positive");
    if (!(cfg.speed_mean > 0)) throw ValidationError("speed mean must be positive");
    if (!(cfg.speed_sd >= 0)) throw ValidationError("speed sd must be nonnegative");
    require_valid(cfg.interaction);

    std::vector<std::pair<std::string, std::int64_t>> steps;
    std::int64_t total = 0;
    for (const auto& s : cfg.interaction.steps) {
        const std::int64_t is = count_step(s, cfg.binding).total;
        total += is;
        if (is > 0) steps.emplace_back(s.label, is);
    }

    SpeedSampler sampler(cfg.seed, cfg.speed_mean, cfg.speed_sd);
    EventLog log;
    const std::size_t width = std::to_string(cfg.sessions).size();
    for (std::int64_t i = 1; i <= cfg.sessions; ++i) {
        std::string id = std::to_string(i);
        id.insert(0, width - id.size(), '0');

        Task task;
        task.task_id = "task-1";
        task.concept_name = cfg.interaction.name;
        task.binding = cfg.binding;
        task.is_count = total;
        double elapsed = 0;
        for (const auto& [label, is] : steps) {
            const double speed = sampler.next();
            const auto enter = static_cast<std::int64_t>(std::llround(elapsed * 1000.0));
            elapsed += static_cast<double>(is) / speed;
            const auto exit = static_cast<std::int64_t>(std::llround(elapsed * 1000.0));
            task.page_visits.push_back({label, enter, exit, {{label, enter, exit, is}}});
        }
        log.sessions.push_back({"session-" + id, {std::move(task)}});
    }
    return log;
}

}  // namespace ixcomplex
