#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ixcomplex/concept.hpp"
#include "ixcomplex/symexpr.hpp"

namespace ixcomplex {

// Keystroke-level operators. Composite names are spelled out because the
// single-letter KLM names (T, C, S, E) collide with the abstract actions.
enum class KlmOperator { K, M, C_click, S_saccade, P, R, E_mental, PointClick, Glance };

inline constexpr KlmOperator all_klm_operators[] = {
    KlmOperator::K,        KlmOperator::M, KlmOperator::C_click,  KlmOperator::S_saccade, KlmOperator::P,
    KlmOperator::R,        KlmOperator::E_mental, KlmOperator::PointClick, KlmOperator::Glance};

inline const char* operator_name(KlmOperator op) {
    constexpr const char* names[] = {"K", "M", "C_click", "S_saccade", "P", "R", "E_mental", "PointClick", "Glance"};
    return names[static_cast<int>(op)];
}

// Accepts the full names plus the composite shorthands Q (Glance) and
// T (PointClick). Bare C, S and E are rejected as ambiguous.
inline KlmOperator operator_from_name(std::string_view name) {
    if (name == "Q") return KlmOperator::Glance;
    if (name == "T") return KlmOperator::PointClick;
    for (KlmOperator op : all_klm_operators) {
        if (name == operator_name(op)) return op;
    }
    if (name == "C" || name == "S" || name == "E") {
        throw Error("ambiguous operator name '" + std::string(name) + "' (use C_click, S_saccade or E_mental)");
    }
    throw Error("unknown operator name '" + std::string(name) + "'");
}

class KlmModel {
public:
    // Unit times in seconds.
    struct Primitives {
        double k = 0.23;
        double m = 1.5;
        double c_click = 0.23;
        double s_saccade = 0.23;
        double p = 0.1;
        double r = 1.2;
        double e_mental = 0.07;
    };

    KlmModel() = default;
    explicit KlmModel(Primitives p) : p_(p) {
        for (double v : {p.k, p.m, p.c_click, p.s_saccade, p.p, p.r, p.e_mental}) {
            if (!(v > 0)) throw ValidationError("KLM unit times must be positive");
        }
    }

    const Primitives& primitives() const { return p_; }

    double point_click() const { return p_.m + p_.c_click; }
    double glance() const { return p_.s_saccade + p_.p + p_.e_mental; }

    double unit_time(KlmOperator op) const {
        switch (op) {
            case KlmOperator::K: return p_.k;
            case KlmOperator::M: return p_.m;
            case KlmOperator::C_click: return p_.c_click;
            case KlmOperator::S_saccade: return p_.s_saccade;
            case KlmOperator::P: return p_.p;
            case KlmOperator::R: return p_.r;
            case KlmOperator::E_mental: return p_.e_mental;
            case KlmOperator::PointClick: return point_click();
            case KlmOperator::Glance: return glance();
        }
        return 0;
    }

    // Override file: {"K": 0.23, "M": 1.5, ...}; keys omitted keep defaults.
    static KlmModel from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw ValidationError("KLM model must be a JSON object");
        Primitives p;
        const std::map<std::string, double*> slots = {
            {"K", &p.k}, {"M", &p.m}, {"C_click", &p.c_click}, {"S_saccade", &p.s_saccade},
            {"P", &p.p}, {"R", &p.r}, {"E_mental", &p.e_mental}};
        for (const auto& [key, value] : j.items()) {
            auto it = slots.find(key);
            if (it == slots.end()) throw ValidationError("unknown KLM primitive '" + key + "'");
            if (!value.is_number()) throw ValidationError("KLM primitive '" + key + "' must be a number");
            *it->second = value.get<double>();
        }
        return KlmModel(p);
    }

private:
    Primitives p_;
};

// Operator -> count polynomial; zero counts are omitted.
class KlmExpression {
public:
    const Expression& operator[](KlmOperator op) const {
        static const Expression zero;
        auto it = counts_.find(op);
        return it == counts_.end() ? zero : it->second;
    }

    void add(KlmOperator op, const Expression& e) {
        Expression sum = (*this)[op] + e;
        if (sum.is_zero()) {
            counts_.erase(op);
        } else {
            counts_[op] = std::move(sum);
        }
    }

    KlmExpression& operator+=(const KlmExpression& o) {
        for (const auto& [op, e] : o.counts_) add(op, e);
        return *this;
    }

    const std::map<KlmOperator, Expression>& entries() const { return counts_; }
    bool is_empty() const { return counts_.empty(); }

    bool operator==(const KlmExpression&) const = default;

private:
    std::map<KlmOperator, Expression> counts_;
};

inline std::string format_klm(const KlmExpression& k) {
    if (k.is_empty()) return "0";
    std::string out;
    for (const auto& [op, e] : k.entries()) {
        if (!out.empty()) out += " + ";
        out += "(" + format_factored(e) + ")*" + operator_name(op);
    }
    return out;
}

using ActionMapping = std::map<ActionKind, std::vector<KlmOperator>>;

inline ActionMapping default_action_mapping() {
    return {{ActionKind::think, {KlmOperator::Glance}},
            {ActionKind::enter, {KlmOperator::PointClick}},
            {ActionKind::click, {KlmOperator::PointClick}}};
}

// {"Think": ["Glance"], "Enter": ["PointClick"], ...}
inline ActionMapping mapping_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("action mapping must be a JSON object");
    ActionMapping m;
    for (const auto& [key, value] : j.items()) {
        auto kind = action_from_name(key);
        if (!kind) throw ValidationError("unknown action kind '" + key + "' in mapping");
        if (!value.is_array()) throw ValidationError("mapping for '" + key + "' must be an array of operator names");
        std::vector<KlmOperator> ops;
        for (const auto& name : value) {
            if (!name.is_string()) throw ValidationError("mapping for '" + key + "' must be an array of operator names");
            ops.push_back(operator_from_name(name.get<std::string>()));
        }
        m[*kind] = std::move(ops);
    }
    return m;
}

class UnmappedActionError : public Error {
public:
    UnmappedActionError(ActionKind kind, const std::string& step)
        : Error("action " + std::string(action_name(kind)) + " in step '" + step + "' has no KLM mapping"),
          kind_(kind) {}

    ActionKind kind() const { return kind_; }

private:
    ActionKind kind_;
};

inline KlmExpression klm_from_step(const UserStep& s, const ActionMapping& map) {
    KlmExpression k;
    for (const auto& [kind, f] : s.actions) {
        if (f.poly.is_zero()) continue;
        auto it = map.find(kind);
        if (it == map.end()) throw UnmappedActionError(kind, s.label);
        const Expression count = s.repeat.poly * f.poly;
        for (KlmOperator op : it->second) k.add(op, count);
    }
    return k;
}

inline KlmExpression klm_from_concept(const InteractionConcept& c, const ActionMapping& map) {
    KlmExpression k;
    for (const auto& s : c.steps) k += klm_from_step(s, map);
    return k;
}

namespace detail {

// Polynomial part plus operator-linear part, used while lowering a KLM formula.
struct KlmForm {
    Expression scalar;
    KlmExpression ops;

    static KlmForm scaled(const KlmExpression& k, const Expression& by) {
        KlmForm r;
        for (const auto& [op, e] : k.entries()) r.ops.add(op, e * by);
        return r;
    }
};

inline KlmForm lower_klm(const syntax::Node& n) {
    using K = syntax::Node::Kind;
    switch (n.kind) {
        case K::number: return {Expression::constant(n.value), {}};
        case K::variable: return {Expression::variable(n.name), {}};
        case K::op_name: {
            KlmForm r;
            try {
                r.ops.add(operator_from_name(n.name), Expression::constant(1));
            } catch (const Error& e) {
                throw SyntaxError(e.what(), n.offset);
            }
            return r;
        }
        case K::neg: {
            KlmForm a = lower_klm(n.children[0]);
            return {-a.scalar, KlmForm::scaled(a.ops, Expression::constant(-1)).ops};
        }
        case K::add:
        case K::sub: {
            KlmForm a = lower_klm(n.children[0]);
            KlmForm b = lower_klm(n.children[1]);
            const Expression sign = Expression::constant(n.kind == K::add ? 1 : -1);
            a.scalar += sign * b.scalar;
            for (const auto& [op, e] : b.ops.entries()) a.ops.add(op, sign * e);
            return a;
        }
        case K::mul: {
            KlmForm a = lower_klm(n.children[0]);
            KlmForm b = lower_klm(n.children[1]);
            if (!a.ops.is_empty() && !b.ops.is_empty()) {
                throw SyntaxError("product of two operator terms", n.offset);
            }
            KlmForm r;
            r.scalar = a.scalar * b.scalar;
            r.ops = KlmForm::scaled(a.ops, b.scalar).ops;
            r.ops += KlmForm::scaled(b.ops, a.scalar).ops;
            return r;
        }
    }
    return {};
}

}  // namespace detail

// Parses e.g. "(m + a*(r + t + d + s + 2))*Q + (4 + 8*a)*T".
inline KlmExpression klm_parse(std::string_view text) {
    const syntax::Node tree = syntax::parse(text, {.allow_operator_names = true});
    detail::KlmForm f = detail::lower_klm(tree);
    if (!f.scalar.is_zero()) {
        throw SyntaxError("term without an operator (" + format(f.scalar) + ")", 0);
    }
    return f.ops;
}

inline double klm_time(const KlmExpression& k, const KlmModel& model, const Binding& b) {
    double seconds = 0;
    for (const auto& [op, e] : k.entries()) seconds += static_cast<double>(eval(e, b)) * model.unit_time(op);
    return seconds;
}

inline double klm_speed(std::int64_t is_count, double seconds) {
    if (!(seconds > 0)) throw Error("execution time must be positive");
    if (is_count < 0) throw Error("IS count must be nonnegative");
    return static_cast<double>(is_count) / seconds;
}

}  // namespace ixcomplex
