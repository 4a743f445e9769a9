#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ixcomplex/concept.hpp"
#include "ixcomplex/symexpr.hpp"

namespace ixcomplex {

// Summed complexity organized by abstract action. Zero entries are omitted.
class ActionVector {
public:
    ActionVector() = default;

    const Expression& operator[](ActionKind k) const {
        static const Expression zero;
        auto it = per_kind_.find(k);
        return it == per_kind_.end() ? zero : it->second;
    }

    void add(ActionKind k, const Expression& e) {
        Expression sum = (*this)[k] + e;
        if (sum.is_zero()) {
            per_kind_.erase(k);
        } else {
            per_kind_[k] = std::move(sum);
        }
    }

    ActionVector& operator+=(const ActionVector& o) {
        for (const auto& [k, e] : o.per_kind_) add(k, e);
        return *this;
    }

    const std::map<ActionKind, Expression>& entries() const { return per_kind_; }
    bool is_zero() const { return per_kind_.empty(); }

    bool operator==(const ActionVector&) const = default;

private:
    std::map<ActionKind, Expression> per_kind_;
};

struct NormalizedComplexity {
    Expression is_function;
};

enum class ComplexityClass { constant, linear, quadratic, cubic, higher };

struct SimplifiedComplexity {
    Expression retained;
    unsigned degree = 0;

    ComplexityClass complexity_class() const {
        switch (degree) {
            case 0: return ComplexityClass::constant;
            case 1: return ComplexityClass::linear;
            case 2: return ComplexityClass::quadratic;
            case 3: return ComplexityClass::cubic;
            default: return ComplexityClass::higher;
        }
    }

    // "constant", "linear", "quadratic", "cubic", then "degree-k".
    std::string class_label() const {
        switch (complexity_class()) {
            case ComplexityClass::constant: return "constant";
            case ComplexityClass::linear: return "linear";
            case ComplexityClass::quadratic: return "quadratic";
            case ComplexityClass::cubic: return "cubic";
            case ComplexityClass::higher: break;
        }
        return "degree-" + std::to_string(degree);
    }
};

// f_i for one user step: repeat * count, per action kind.
inline ActionVector step_function(const UserStep& s) {
    ActionVector v;
    for (const auto& [k, f] : s.actions) v.add(k, s.repeat.poly * f.poly);
    return v;
}

inline ActionVector sum_steps(const InteractionConcept& c) {
    ActionVector total;
    for (const auto& s : c.steps) total += step_function(s);
    return total;
}

// Every action kind becomes one interaction step.
inline NormalizedComplexity normalize(const ActionVector& v) {
    Expression sum;
    for (const auto& [_, e] : v.entries()) sum += e;
    return {sum};
}

// Keeps the highest-growing part with its coefficients: every monomial whose
// variable set is a nonempty subset of the variable set of some
// maximal-degree monomial. A constant polynomial is kept as is.
inline SimplifiedComplexity simplify(const NormalizedComplexity& n) {
    const Expression& f = n.is_function;
    const unsigned top = total_degree(f);
    if (top == 0) return {f, 0};

    std::vector<std::set<std::string>> leading;
    for (const auto& [p, _] : f.terms()) {
        if (degree_of(p) != top) continue;
        std::set<std::string> vars;
        for (const auto& [v, __] : p) vars.insert(v);
        leading.push_back(std::move(vars));
    }

    std::map<Powers, std::int64_t> kept;
    for (const auto& [p, c] : f.terms()) {
        if (p.empty()) continue;
        for (const auto& vars : leading) {
            const bool subset = std::all_of(p.begin(), p.end(), [&](const auto& kv) { return vars.count(kv.first) != 0; });
            if (subset) {
                kept.emplace(p, c);
                break;
            }
        }
    }
    return {Expression::from_terms(kept), top};
}

inline std::int64_t instantiate(const NormalizedComplexity& n, const Binding& b) { return eval(n.is_function, b); }

struct StepComplexity {
    std::string label;
    ActionVector function;
};

struct ComplexityReport {
    std::vector<StepComplexity> per_step;
    ActionVector summed;
    NormalizedComplexity normalized;
    SimplifiedComplexity simplified;
    std::optional<std::pair<Binding, std::int64_t>> instantiated;
    bool formula_only = false;  // no per-step or per-action detail
};

inline ComplexityReport analyze(const InteractionConcept& c, const std::optional<Binding>& b = std::nullopt) {
    ComplexityReport r;
    for (const auto& s : c.steps) r.per_step.push_back({s.label, step_function(s)});
    for (const auto& s : r.per_step) r.summed += s.function;
    r.normalized = normalize(r.summed);
    r.simplified = simplify(r.normalized);
    if (b) r.instantiated.emplace(*b, instantiate(r.normalized, *b));
    return r;
}

// Report for a normalized IS function entered directly (e.g. a published
// formula), without per-step detail.
inline ComplexityReport analyze_formula(const Expression& is_function, const std::optional<Binding>& b = std::nullopt) {
    ComplexityReport r;
    r.formula_only = true;
    r.normalized = {is_function};
    r.simplified = simplify(r.normalized);
    if (b) r.instantiated.emplace(*b, instantiate(r.normalized, *b));
    return r;
}

// --- rendering ---

inline std::string format_action_vector(const ActionVector& v) {
    if (v.is_zero()) return "0";
    std::string out;
    for (const auto& [k, e] : v.entries()) {
        if (!out.empty()) out += " + ";
        out += "(" + format_factored(e) + ")*" + action_letter(k);
    }
    return out;
}

inline nlohmann::json action_vector_to_json(const ActionVector& v) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, e] : v.entries()) j[std::string(1, action_letter(k))] = format(e);
    return j;
}

inline nlohmann::json report_to_json(const ComplexityReport& r) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : r.per_step) steps.push_back({{"label", s.label}, {"function", action_vector_to_json(s.function)}});
    nlohmann::json j = {
        {"per_step", steps},
        {"summed", r.formula_only ? nlohmann::json(nullptr) : action_vector_to_json(r.summed)},
        {"normalized", format(r.normalized.is_function)},
        {"simplified",
         {{"retained", format(r.simplified.retained)}, {"class_label", r.simplified.class_label()}}},
        {"instantiated", nullptr},
    };
    if (r.instantiated) {
        j["instantiated"] = {{"binding", r.instantiated->first.values()}, {"is", r.instantiated->second}};
    }
    return j;
}

inline std::string report_to_text(const ComplexityReport& r) {
    std::string out;
    if (!r.per_step.empty()) {
        out += "Per-step functions:\n";
        for (const auto& s : r.per_step) out += "  " + s.label + ": " + format_action_vector(s.function) + "\n";
    }
    if (!r.formula_only) out += "Summed: " + format_action_vector(r.summed) + "\n";
    out += "Normalized: (" + format_factored(r.normalized.is_function) + ")*IS\n";
    out += "Simplified: I(" + format_factored(r.simplified.retained) + ") (" + r.simplified.class_label() +
           " interaction complexity)\n";
    if (r.instantiated) out += "IS = " + std::to_string(r.instantiated->second) + "\n";
    return out;
}

}  // namespace ixcomplex
