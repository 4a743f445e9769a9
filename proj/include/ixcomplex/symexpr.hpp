#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ixcomplex/error.hpp"

namespace ixcomplex {

inline bool is_variable_name(std::string_view name) {
    if (name.empty() || !(name[0] >= 'a' && name[0] <= 'z')) return false;
    return std::all_of(name.begin() + 1, name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

// --- syntax: parse tree shared by the polynomial lowering and the oracle ---

namespace syntax {

struct Node {
    enum class Kind { number, variable, op_name, add, sub, mul, neg };

    Kind kind = Kind::number;
    std::int64_t value = 0;      // number
    std::string name;            // variable / op_name
    std::vector<Node> children;  // add, sub, mul: two; neg: one
    std::size_t offset = 0;
};

struct ParseOptions {
    // Accept identifiers starting with an uppercase letter as Kind::op_name
    // (KLM operator symbols); otherwise they are rejected.
    bool allow_operator_names = false;
};

namespace detail {

class Parser {
public:
    Parser(std::string_view text, ParseOptions options) : text_(text), options_(options) {}

    Node parse() {
        skip_ws();
        if (pos_ == text_.size()) throw SyntaxError("empty expression", pos_);
        Node n = expr();
        skip_ws();
        if (pos_ != text_.size()) unexpected();
        return n;
    }

private:
    Node expr() {
        Node lhs = term();
        for (;;) {
            skip_ws();
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                std::size_t at = pos_;
                auto kind = text_[pos_] == '+' ? Node::Kind::add : Node::Kind::sub;
                ++pos_;
                Node rhs = term();
                lhs = binary(kind, std::move(lhs), std::move(rhs), at);
            } else {
                return lhs;
            }
        }
    }

    Node term() {
        Node lhs = factor();
        for (;;) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '*') {
                std::size_t at = pos_++;
                Node rhs = factor();
                lhs = binary(Node::Kind::mul, std::move(lhs), std::move(rhs), at);
            } else {
                return lhs;
            }
        }
    }

    Node factor() {
        skip_ws();
        if (pos_ == text_.size()) throw SyntaxError("unexpected end of expression", pos_);
        const std::size_t start = pos_;
        const char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            Node n{Node::Kind::neg, 0, {}, {}, start};
            n.children.push_back(factor());
            return n;
        }
        if (c == '(') {
            ++pos_;
            Node inner = expr();
            skip_ws();
            if (pos_ == text_.size() || text_[pos_] != ')') {
                throw SyntaxError("expected ')'", pos_);
            }
            ++pos_;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::int64_t v = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                std::int64_t digit = text_[pos_] - '0';
                if (__builtin_mul_overflow(v, 10, &v) || __builtin_add_overflow(v, digit, &v)) {
                    throw SyntaxError("integer literal out of range", start);
                }
                ++pos_;
            }
            return Node{Node::Kind::number, v, {}, {}, start};
        }
        if (c >= 'a' && c <= 'z') {
            return Node{Node::Kind::variable, 0, std::string(identifier()), {}, start};
        }
        if (c >= 'A' && c <= 'Z' && options_.allow_operator_names) {
            return Node{Node::Kind::op_name, 0, std::string(identifier()), {}, start};
        }
        unexpected();
    }

    std::string_view identifier() {
        const std::size_t start = pos_;
        ++pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                ++pos_;
            } else {
                break;
            }
        }
        return text_.substr(start, pos_ - start);
    }

    [[noreturn]] void unexpected() {
        const unsigned char c = static_cast<unsigned char>(text_[pos_]);
        if (std::isalnum(c) || c == '+' || c == '-' || c == '*' || c == '(' || c == ')') {
            throw SyntaxError(std::string("unexpected '") + static_cast<char>(c) + "'", pos_);
        }
        if (std::isprint(c)) {
            throw SyntaxError(std::string("unknown character '") + static_cast<char>(c) + "'", pos_);
        }
        throw SyntaxError("unknown character (byte " + std::to_string(c) + ")", pos_);
    }

    static Node binary(Node::Kind kind, Node lhs, Node rhs, std::size_t at) {
        Node n{kind, 0, {}, {}, at};
        n.children.push_back(std::move(lhs));
        n.children.push_back(std::move(rhs));
        return n;
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    std::string_view text_;
    ParseOptions options_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Grammar:
//   expr   := term {("+"|"-") term}
//   term   := factor {"*" factor}
//   factor := "-" factor | INT | IDENT | "(" expr ")"
inline Node parse(std::string_view text, ParseOptions options = {}) {
    return detail::Parser(text, options).parse();
}

}  // namespace syntax

// --- Binding ---

class Binding {
public:
    Binding() = default;
    Binding(std::initializer_list<std::pair<const std::string, std::int64_t>> values) {
        for (const auto& [name, value] : values) set(name, value);
    }

    void set(const std::string& name, std::int64_t value) {
        if (!is_variable_name(name)) throw Error("invalid variable name '" + name + "'");
        if (value < 0) {
            throw Error("binding for '" + name + "' must be nonnegative, got " + std::to_string(value));
        }
        values_[name] = value;
    }

    const std::int64_t* find(const std::string& name) const {
        auto it = values_.find(name);
        return it == values_.end() ? nullptr : &it->second;
    }

    bool contains(const std::string& name) const { return values_.count(name) != 0; }
    const std::map<std::string, std::int64_t>& values() const { return values_; }
    bool empty() const { return values_.empty(); }

    // Parses "name=value".
    static std::pair<std::string, std::int64_t> parse_assignment(std::string_view text) {
        auto eq = text.find('=');
        if (eq == std::string_view::npos) throw Error("expected name=value, got '" + std::string(text) + "'");
        std::string name(text.substr(0, eq));
        std::string_view digits = text.substr(eq + 1);
        if (!is_variable_name(name)) throw Error("invalid variable name '" + name + "'");
        if (digits.empty() ||
            !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            throw Error("value for '" + name + "' must be a nonnegative integer, got '" + std::string(digits) + "'");
        }
        std::int64_t v = 0;
        for (char c : digits) {
            if (__builtin_mul_overflow(v, 10, &v) || __builtin_add_overflow(v, c - '0', &v)) {
                throw Error("value for '" + name + "' out of range");
            }
        }
        return {std::move(name), v};
    }

    bool operator==(const Binding&) const = default;

private:
    std::map<std::string, std::int64_t> values_;
};

// --- Expression ---

// Variable name -> positive exponent. The empty map is the constant monomial.
using Powers = std::map<std::string, unsigned>;

inline unsigned degree_of(const Powers& p) {
    unsigned d = 0;
    for (const auto& [_, e] : p) d += e;
    return d;
}

// Exact multivariate polynomial with int64 coefficients, always kept canonical:
// no zero coefficients, one entry per power map.
class Expression {
public:
    Expression() = default;

    static Expression constant(std::int64_t c) {
        Expression e;
        e.add_term({}, c);
        return e;
    }

    static Expression variable(const std::string& name) {
        if (!is_variable_name(name)) throw Error("invalid variable name '" + name + "'");
        Expression e;
        e.add_term(Powers{{name, 1u}}, 1);
        return e;
    }

    static Expression from_terms(const std::map<Powers, std::int64_t>& terms) {
        Expression e;
        for (const auto& [p, c] : terms) e.add_term(p, c);
        return e;
    }

    const std::map<Powers, std::int64_t>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

    std::int64_t constant_term() const {
        auto it = terms_.find(Powers{});
        return it == terms_.end() ? 0 : it->second;
    }

    std::set<std::string> variables() const {
        std::set<std::string> out;
        for (const auto& [p, _] : terms_) {
            for (const auto& [v, __] : p) out.insert(v);
        }
        return out;
    }

    friend Expression operator+(const Expression& a, const Expression& b) {
        Expression r = a;
        for (const auto& [p, c] : b.terms_) r.add_term(p, c);
        return r;
    }

    friend Expression operator-(const Expression& a) {
        Expression r;
        for (const auto& [p, c] : a.terms_) r.terms_.emplace(p, detail::checked_sub(0, c));
        return r;
    }

    friend Expression operator-(const Expression& a, const Expression& b) { return a + (-b); }

    friend Expression operator*(const Expression& a, const Expression& b) {
        Expression r;
        for (const auto& [pa, ca] : a.terms_) {
            for (const auto& [pb, cb] : b.terms_) {
                Powers p = pa;
                for (const auto& [v, e] : pb) p[v] += e;
                r.add_term(p, detail::checked_mul(ca, cb));
            }
        }
        return r;
    }

    Expression& operator+=(const Expression& o) { return *this = *this + o; }

    bool operator==(const Expression&) const = default;

private:
    void add_term(const Powers& p, std::int64_t c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.emplace(p, c);
        if (!inserted) {
            it->second = detail::checked_add(it->second, c);
            if (it->second == 0) terms_.erase(it);
        }
    }

    std::map<Powers, std::int64_t> terms_;
};

enum class CombineOp { add, sub, mul };

inline Expression combine(CombineOp op, const Expression& a, const Expression& b) {
    switch (op) {
        case CombineOp::add: return a + b;
        case CombineOp::sub: return a - b;
        case CombineOp::mul: return a * b;
    }
    return {};
}

inline Expression lower(const syntax::Node& n) {
    using K = syntax::Node::Kind;
    switch (n.kind) {
        case K::number: return Expression::constant(n.value);
        case K::variable: return Expression::variable(n.name);
        case K::op_name: throw SyntaxError("operator name '" + n.name + "' not allowed here", n.offset);
        case K::neg: return -lower(n.children[0]);
        case K::add: return lower(n.children[0]) + lower(n.children[1]);
        case K::sub: return lower(n.children[0]) - lower(n.children[1]);
        case K::mul: return lower(n.children[0]) * lower(n.children[1]);
    }
    return {};
}

inline Expression parse_expr(std::string_view text) { return lower(syntax::parse(text)); }

// Exact value, possibly negative.
inline std::int64_t eval_signed(const Expression& e, const Binding& b) {
    std::int64_t sum = 0;
    for (const auto& [p, c] : e.terms()) {
        std::int64_t term = c;
        for (const auto& [v, exp] : p) {
            const std::int64_t* value = b.find(v);
            if (!value) throw UnboundVariableError(v);
            for (unsigned i = 0; i < exp; ++i) term = detail::checked_mul(term, *value);
        }
        sum = detail::checked_add(sum, term);
    }
    return sum;
}

// Evaluates a count expression; negative results mark the binding inadmissible.
inline std::int64_t eval(const Expression& e, const Binding& b) {
    const std::int64_t v = eval_signed(e, b);
    if (v < 0) throw NegativeCountError(v);
    return v;
}

inline unsigned total_degree(const Expression& e) {
    unsigned d = 0;
    for (const auto& [p, _] : e.terms()) d = std::max(d, degree_of(p));
    return d;
}

// --- formatting ---

namespace detail {

inline std::vector<std::string> expanded_vars(const Powers& p) {
    std::vector<std::string> out;
    for (const auto& [v, e] : p) out.insert(out.end(), e, v);
    return out;
}

// Total degree descending, then lexicographic over the expanded variable list.
inline bool monomial_before(const Powers& a, const Powers& b) {
    const unsigned da = degree_of(a), db = degree_of(b);
    if (da != db) return da > db;
    return expanded_vars(a) < expanded_vars(b);
}

inline std::vector<std::pair<Powers, std::int64_t>> ordered_terms(const Expression& e) {
    std::vector<std::pair<Powers, std::int64_t>> out(e.terms().begin(), e.terms().end());
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return monomial_before(x.first, y.first); });
    return out;
}

inline std::string magnitude_text(const Powers& p, std::int64_t c) {
    // |INT64_MIN| is not representable; print it via unsigned.
    const std::uint64_t mag = c < 0 ? 0 - static_cast<std::uint64_t>(c) : static_cast<std::uint64_t>(c);
    std::string vars;
    for (const auto& v : expanded_vars(p)) {
        if (!vars.empty()) vars += '*';
        vars += v;
    }
    if (vars.empty()) return std::to_string(mag);
    if (mag == 1) return vars;
    return std::to_string(mag) + "*" + vars;
}

// Appends a signed piece ("-x" or "x") to a sum being built.
inline void append_summand(std::string& out, std::string piece) {
    const bool negative = !piece.empty() && piece[0] == '-';
    if (out.empty()) {
        out = std::move(piece);
    } else if (negative) {
        out += " - ";
        out.append(piece, 1);
    } else {
        out += " + ";
        out += piece;
    }
}

}  // namespace detail

inline std::string format(const Expression& e) {
    if (e.is_zero()) return "0";
    std::string out;
    for (const auto& [p, c] : detail::ordered_terms(e)) {
        std::string piece = detail::magnitude_text(p, c);
        if (c < 0) piece.insert(0, "-");
        detail::append_summand(out, std::move(piece));
    }
    return out;
}

// Display form with greedy common-factor extraction, e.g.
// "a*(d + r + s + t + 11) + m + 5". Parses back to the same polynomial.
inline std::string format_factored(const Expression& e) {
    if (e.size() <= 1) return format(e);
    std::map<std::string, std::size_t> occurrences;
    for (const auto& [p, _] : e.terms()) {
        for (const auto& [v, __] : p) ++occurrences[v];
    }
    std::string best;
    std::size_t best_count = 1;
    for (const auto& [v, count] : occurrences) {
        if (count > best_count) {
            best = v;
            best_count = count;
        }
    }
    if (best.empty()) return format(e);

    std::map<Powers, std::int64_t> inner, rest;
    for (const auto& [p, c] : e.terms()) {
        auto it = p.find(best);
        if (it == p.end()) {
            rest.emplace(p, c);
            continue;
        }
        Powers q = p;
        if (--q[best] == 0) q.erase(best);
        inner.emplace(std::move(q), c);
    }
    std::string out = best + "*(" + format_factored(Expression::from_terms(inner)) + ")";
    if (!rest.empty()) detail::append_summand(out, format_factored(Expression::from_terms(rest)));
    return out;
}

}  // namespace ixcomplex
