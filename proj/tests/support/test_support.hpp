#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ixcomplex/ixcomplex.hpp"

namespace ixtest {

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string concept_path(const std::string& name) { return std::string(IXCOMPLEX_CONCEPT_DIR) + "/" + name; }

inline ixcomplex::InteractionConcept load_v1() { return ixcomplex::parse_concept(read_text(concept_path("v1.concept"))); }
inline ixcomplex::InteractionConcept load_v2() { return ixcomplex::parse_concept(read_text(concept_path("v2.concept"))); }

// Bindings used for the big-I instantiation of each version.
inline ixcomplex::Binding v1_binding() { return {{"m", 6}, {"r", 4}, {"t", 7}, {"d", 4}, {"s", 6}, {"a", 5}}; }
inline ixcomplex::Binding v2_binding() { return {{"m", 6}, {"r", 4}, {"d", 4}, {"s", 4}, {"g", 9}, {"o", 7}}; }

// Published normalized IS functions.
inline const char* v1_published_is = "m + 5 + a*(r + t + d + s + 11)";
inline const char* v2_published_is = "m + r + d + s + g + o + 12";

// Published KLM sums.
inline const char* v1_published_klm = "(m + a*(r + t + d + s + 2))*Q + (4 + 8*a)*T";
inline const char* v2_published_klm = "(m + r + t + d + s + o + 2)*Q + 9*T";

// --- random generators ---

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    template <class T>
    const T& pick(const std::vector<T>& xs) {
        return xs[static_cast<std::size_t>(uniform(0, static_cast<int>(xs.size()) - 1))];
    }

    // Expression text over `vars` with integer literals <= max_coef; may
    // contain subtraction and unary minus when `signed_terms` is set.
    std::string expr_text(const std::vector<std::string>& vars, int depth, int max_coef = 9, bool signed_terms = false) {
        const int choice = depth <= 0 ? uniform(0, 1) : uniform(0, signed_terms ? 6 : 4);
        switch (choice) {
            case 0: return std::to_string(uniform(0, max_coef));
            case 1: return vars.empty() ? std::to_string(uniform(0, max_coef)) : pick(vars);
            case 2: return "(" + expr_text(vars, depth - 1, max_coef, signed_terms) + " + " +
                           expr_text(vars, depth - 1, max_coef, signed_terms) + ")";
            case 3: return expr_text(vars, depth - 1, max_coef, signed_terms) + "*" +
                           expr_text(vars, depth - 1, max_coef, signed_terms);
            case 4: return std::to_string(uniform(1, max_coef)) + "*(" + expr_text(vars, depth - 1, max_coef, signed_terms) + ")";
            case 5: return "(" + expr_text(vars, depth - 1, max_coef, signed_terms) + " - " +
                           expr_text(vars, depth - 1, max_coef, signed_terms) + ")";
            default: return "-" + expr_text(vars, depth - 1, max_coef, signed_terms);
        }
    }

    // Count expression that stays admissible for most bindings: nonnegative
    // terms, occasionally "(v - 1)" factors.
    std::string count_text(const std::vector<std::string>& vars, int max_coef = 9) {
        std::string e = expr_text(vars, uniform(0, 2), max_coef);
        if (!vars.empty() && chance(0.15)) e = "(" + pick(vars) + " - 1)*(" + e + ")";
        return e;
    }

    ixcomplex::InteractionConcept make_concept(int max_steps = 10, int max_vars = 6, int max_coef = 9) {
        static const std::vector<std::string> pool = {"m", "r", "t", "d", "s", "g", "a", "o", "n1", "x_2"};
        std::vector<std::string> vars = pool;
        std::shuffle(vars.begin(), vars.end(), rng_);
        vars.resize(static_cast<std::size_t>(uniform(0, max_vars)));

        ixcomplex::InteractionConcept c;
        c.name = "random " + std::to_string(uniform(0, 9999));
        for (const auto& v : vars) c.variables.push_back({v, chance(0.5) ? "count of " + v : ""});
        const int steps = uniform(0, max_steps);
        for (int i = 0; i < steps; ++i) {
            ixcomplex::UserStep s;
            s.label = "step " + std::to_string(i + 1) + (chance(0.3) ? " (\"quoted\")" : "");
            if (chance(0.5)) s.repeat = ixcomplex::Formula::parse(count_text(vars, max_coef));
            for (ixcomplex::ActionKind k : ixcomplex::all_action_kinds) {
                if (!chance(0.5)) continue;
                auto f = ixcomplex::Formula::parse(count_text(vars, max_coef));
                if (!f.poly.is_zero()) s.actions.emplace(k, std::move(f));
            }
            if (chance(0.3)) s.note = "note for step " + std::to_string(i + 1);
            c.steps.push_back(std::move(s));
        }
        return c;
    }

    ixcomplex::Binding binding(const ixcomplex::InteractionConcept& c, int max_value = 5) {
        ixcomplex::Binding b;
        for (const auto& v : c.variables) b.set(v.name, uniform(0, max_value));
        return b;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace ixtest
