#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ixcomplex/symexpr.hpp"

namespace ixcomplex {

enum class ActionKind { think, enter, click, scroll, external };

inline constexpr std::array<ActionKind, 5> all_action_kinds{
    ActionKind::think, ActionKind::enter, ActionKind::click, ActionKind::scroll, ActionKind::external};

inline char action_letter(ActionKind k) {
    constexpr char letters[] = {'T', 'E', 'C', 'S', 'X'};
    return letters[static_cast<int>(k)];
}

inline const char* action_name(ActionKind k) {
    constexpr const char* names[] = {"Think", "Enter", "Click", "Scroll", "External"};
    return names[static_cast<int>(k)];
}

inline std::optional<ActionKind> action_from_letter(std::string_view s) {
    for (ActionKind k : all_action_kinds) {
        if (s.size() == 1 && s[0] == action_letter(k)) return k;
    }
    return std::nullopt;
}

inline std::optional<ActionKind> action_from_name(std::string_view s) {
    for (ActionKind k : all_action_kinds) {
        if (s == action_name(k)) return k;
    }
    return std::nullopt;
}

// A count expression together with the text it was written as. Equality is
// polynomial equality; the source text is what the brute-force oracle
// interprets, so it never goes through polynomial expansion.
struct Formula {
    Expression poly;
    std::string source;

    static Formula parse(std::string_view text) {
        std::string trimmed(text);
        while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\t')) trimmed.pop_back();
        std::size_t lead = trimmed.find_first_not_of(" \t");
        trimmed.erase(0, lead == std::string::npos ? trimmed.size() : lead);
        return {parse_expr(trimmed), trimmed};
    }

    static Formula of(const Expression& e) { return {e, format(e)}; }

    bool operator==(const Formula& o) const { return poly == o.poly; }
};

struct UserStep {
    std::string label;
    Formula repeat = Formula::of(Expression::constant(1));
    std::map<ActionKind, Formula> actions;  // absent kinds count as zero
    std::string note;

    bool operator==(const UserStep&) const = default;
};

struct Variable {
    std::string name;
    std::string description;

    bool operator==(const Variable&) const = default;
};

struct InteractionConcept {
    std::string name;
    std::vector<Variable> variables;
    std::vector<UserStep> steps;

    bool operator==(const InteractionConcept&) const = default;

    bool declares(const std::string& var) const {
        for (const auto& v : variables) {
            if (v.name == var) return true;
        }
        return false;
    }
};

// --- validation ---

struct Diagnostic {
    enum class Severity { warning, error };

    Severity severity = Severity::error;
    std::string step;  // empty for concept-level diagnostics
    std::string message;

    bool is_error() const { return severity == Severity::error; }
};

inline std::vector<Diagnostic> validate(const InteractionConcept& c) {
    std::vector<Diagnostic> out;
    auto error = [&](std::string step, std::string msg) {
        out.push_back({Diagnostic::Severity::error, std::move(step), std::move(msg)});
    };

    std::set<std::string> vars;
    for (const auto& v : c.variables) {
        if (!is_variable_name(v.name)) error({}, "invalid variable name '" + v.name + "'");
        if (!vars.insert(v.name).second) error({}, "duplicate variable '" + v.name + "'");
    }

    std::set<std::string> labels;
    for (const auto& s : c.steps) {
        if (s.label.empty()) error({}, "step with empty label");
        if (!labels.insert(s.label).second) error(s.label, "duplicate step label '" + s.label + "'");

        std::set<std::string> used = s.repeat.poly.variables();
        for (const auto& [_, f] : s.actions) {
            auto vs = f.poly.variables();
            used.insert(vs.begin(), vs.end());
        }
        for (const auto& v : used) {
            if (!vars.count(v)) error(s.label, "undeclared variable '" + v + "'");
        }

        bool any = false;
        for (const auto& [_, f] : s.actions) any = any || !f.poly.is_zero();
        if (!any || s.repeat.poly.is_zero()) {
            out.push_back({Diagnostic::Severity::warning, s.label, "step contributes no interaction"});
        }
    }
    return out;
}

inline void require_valid(const InteractionConcept& c) {
    for (const auto& d : validate(c)) {
        if (!d.is_error()) continue;
        throw ValidationError(d.step.empty() ? d.message : "step '" + d.step + "': " + d.message);
    }
}

// --- DSL ---

class ConceptSyntaxError : public Error {
public:
    ConceptSyntaxError(std::size_t line, std::size_t column, const std::string& message)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

namespace detail {

class ConceptLineParser {
public:
    ConceptLineParser(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    [[noreturn]] void fail(std::size_t col0, const std::string& message) const {
        throw ConceptSyntaxError(line_no_, col0 + 1, message);
    }

    void skip_ws() {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t' || line_[pos_] == '\r')) ++pos_;
    }

    bool at_end_or_comment() {
        skip_ws();
        return pos_ == line_.size() || line_[pos_] == '#';
    }

    std::string_view word() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < line_.size() &&
               (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '_')) {
            ++pos_;
        }
        return line_.substr(start, pos_ - start);
    }

    std::string quoted() {
        skip_ws();
        if (pos_ == line_.size() || line_[pos_] != '"') fail(pos_, "expected quoted string");
        const std::size_t open = pos_++;
        std::string out;
        while (pos_ < line_.size() && line_[pos_] != '"') {
            if (line_[pos_] == '\\') {
                ++pos_;
                if (pos_ == line_.size() || (line_[pos_] != '"' && line_[pos_] != '\\')) {
                    fail(pos_ - 1, "invalid escape in string");
                }
            }
            out += line_[pos_++];
        }
        if (pos_ == line_.size()) fail(open, "unterminated string");
        ++pos_;
        return out;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ == line_.size() || line_[pos_] != c) fail(pos_, std::string("expected '") + c + "'");
        ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < line_.size() && line_[pos_] == c;
    }

    // Reads an expression up to (not including) the first of `stops`.
    Formula formula(std::string_view stops) {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < line_.size() && stops.find(line_[pos_]) == std::string_view::npos && line_[pos_] != '#') {
            ++pos_;
        }
        try {
            return Formula::parse(line_.substr(start, pos_ - start));
        } catch (const SyntaxError& e) {
            // Formula::parse trims leading blanks; skip_ws already consumed them.
            fail(start + e.offset(), e.detail());
        }
    }

    // Text after '#', trimmed; empty when there is no comment.
    std::string trailing_comment() {
        skip_ws();
        if (pos_ == line_.size()) return {};
        if (line_[pos_] != '#') fail(pos_, "unexpected text after statement");
        std::string_view rest = line_.substr(pos_ + 1);
        const auto b = rest.find_first_not_of(" \t");
        if (b == std::string_view::npos) return {};
        const auto e = rest.find_last_not_of(" \t\r");
        return std::string(rest.substr(b, e - b + 1));
    }

    std::size_t pos() const { return pos_; }

private:
    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Line-oriented concept DSL:
//   concept "<name>"
//   var <ident>            # <description>
//   step "<label>" [repeat <expr>] { <A>: <expr> [; <A>: <expr>]* } [# note]
inline InteractionConcept parse_concept(std::string_view text) {
    InteractionConcept c;
    bool have_header = false;
    std::size_t line_no = 0;

    for (std::size_t start = 0, next = 0; start <= text.size(); start = next) {
        const auto nl = text.find('\n', start);
        const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        next = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        std::string_view line = text.substr(start, end - start);
        ++line_no;

        detail::ConceptLineParser p(line, line_no);
        if (p.at_end_or_comment()) continue;
        const std::size_t kw_col = p.pos();
        const std::string keyword(p.word());

        if (keyword == "concept") {
            if (have_header) p.fail(kw_col, "duplicate concept header");
            c.name = p.quoted();
            p.trailing_comment();
            have_header = true;
        } else if (!have_header) {
            p.fail(kw_col, "expected 'concept \"<name>\"' header");
        } else if (keyword == "var") {
            p.skip_ws();
            const std::size_t name_col = p.pos();
            std::string name(p.word());
            if (!is_variable_name(name)) p.fail(name_col, "invalid variable name");
            if (c.declares(name)) p.fail(name_col, "duplicate variable '" + name + "'");
            c.variables.push_back({std::move(name), p.trailing_comment()});
        } else if (keyword == "step") {
            p.skip_ws();
            const std::size_t label_col = p.pos();
            UserStep s;
            s.label = p.quoted();
            if (s.label.empty()) p.fail(label_col, "empty step label");
            for (const auto& other : c.steps) {
                if (other.label == s.label) p.fail(label_col, "duplicate step label '" + s.label + "'");
            }
            if (!p.peek('{')) {
                const std::size_t col = p.pos();
                if (p.word() != "repeat") p.fail(col, "expected 'repeat' or '{'");
                s.repeat = p.formula("{");
            }
            p.expect('{');
            if (!p.peek('}')) {
                for (;;) {
                    p.skip_ws();
                    const std::size_t kind_col = p.pos();
                    auto kind = action_from_letter(p.word());
                    if (!kind) p.fail(kind_col, "expected action kind T, E, C, S or X");
                    if (s.actions.count(*kind)) p.fail(kind_col, "action kind given twice in one step");
                    p.expect(':');
                    Formula f = p.formula(";}");
                    if (!f.poly.is_zero()) s.actions.emplace(*kind, std::move(f));
                    if (p.peek(';')) {
                        p.expect(';');
                        continue;
                    }
                    break;
                }
            }
            p.expect('}');
            s.note = p.trailing_comment();
            c.steps.push_back(std::move(s));
        } else {
            p.fail(kw_col, keyword.empty() ? "expected a statement" : "unknown statement '" + keyword + "'");
        }
    }
    if (!have_header) throw ConceptSyntaxError(line_no, 1, "missing 'concept \"<name>\"' header");

    // Undeclared variables have no line info at this point; point at the step.
    for (const auto& s : c.steps) {
        std::set<std::string> used = s.repeat.poly.variables();
        for (const auto& [_, f] : s.actions) {
            auto vs = f.poly.variables();
            used.insert(vs.begin(), vs.end());
        }
        for (const auto& v : used) {
            if (!c.declares(v)) throw ValidationError("step '" + s.label + "': undeclared variable '" + v + "'");
        }
    }
    return c;
}

namespace detail {

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

}  // namespace detail

inline std::string serialize_concept(const InteractionConcept& c) {
    std::string out = "concept " + detail::quote(c.name) + "\n";
    for (const auto& v : c.variables) {
        out += "var " + v.name;
        if (!v.description.empty()) out += "  # " + v.description;
        out += "\n";
    }
    for (const auto& s : c.steps) {
        out += "step " + detail::quote(s.label);
        if (s.repeat.poly != Expression::constant(1)) out += " repeat " + format(s.repeat.poly);
        std::string body;
        for (ActionKind k : all_action_kinds) {
            auto it = s.actions.find(k);
            if (it == s.actions.end() || it->second.poly.is_zero()) continue;
            if (!body.empty()) body += "; ";
            body += std::string(1, action_letter(k)) + ": " + format(it->second.poly);
        }
        out += body.empty() ? " {}" : " { " + body + " }";
        if (!s.note.empty()) out += "  # " + s.note;
        out += "\n";
    }
    return out;
}

// --- JSON ---

inline nlohmann::json concept_to_json(const InteractionConcept& c) {
    nlohmann::json vars = nlohmann::json::array();
    for (const auto& v : c.variables) vars.push_back({{"name", v.name}, {"description", v.description}});
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : c.steps) {
        nlohmann::json actions = nlohmann::json::object();
        for (const auto& [k, f] : s.actions) {
            if (!f.poly.is_zero()) actions[std::string(1, action_letter(k))] = format(f.poly);
        }
        steps.push_back({{"label", s.label}, {"repeat", format(s.repeat.poly)}, {"actions", actions}, {"note", s.note}});
    }
    return {{"name", c.name}, {"variables", vars}, {"steps", steps}};
}

inline InteractionConcept concept_from_json(const nlohmann::json& j) {
    auto single_line = [](const std::string& s, const char* what) {
        if (s.find('\n') != std::string::npos) throw ValidationError(std::string(what) + " must be a single line");
        return s;
    };
    try {
        InteractionConcept c;
        c.name = single_line(j.at("name").get<std::string>(), "concept name");
        for (const auto& v : j.at("variables")) {
            c.variables.push_back({v.at("name").get<std::string>(),
                                   single_line(v.value("description", std::string{}), "description")});
        }
        for (const auto& js : j.at("steps")) {
            UserStep s;
            s.label = single_line(js.at("label").get<std::string>(), "label");
            if (js.contains("repeat")) s.repeat = Formula::parse(js.at("repeat").get<std::string>());
            const nlohmann::json actions = js.value("actions", nlohmann::json::object());
            for (const auto& [key, value] : actions.items()) {
                auto kind = action_from_letter(key);
                if (!kind) throw ValidationError("unknown action kind '" + key + "'");
                Formula f = Formula::parse(value.get<std::string>());
                if (!f.poly.is_zero()) s.actions.emplace(*kind, std::move(f));
            }
            s.note = single_line(js.value("note", std::string{}), "note");
            c.steps.push_back(std::move(s));
        }
        require_valid(c);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed concept JSON: ") + e.what());
    }
}

}  // namespace ixcomplex
