// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "support/test_support.hpp"

using namespace ixcomplex;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double x, int places = 4) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(places);
    ss << x;
    return ss.str();
}

Outcome instantiation() {
    const Expression v1 = parse_expr(ixtest::v1_published_is);
    const Expression v2 = parse_expr(ixtest::v2_published_is);
    const Binding b1 = ixtest::v1_binding();
    const Binding b2 = ixtest::v2_binding();
    const auto start = Clock::now();
    const std::int64_t is1 = eval(v1, b1);
    const std::int64_t is2 = eval(v2, b2);
    const double ms = seconds_since(start) * 1000.0;
    return {is1 == 171 && is2 == 46 && ms < 1.0,
            "V1 " + std::to_string(is1) + " IS, V2 " + std::to_string(is2) + " IS, " + num(ms, 4) + " ms"};
}

Outcome classification() {
    const SimplifiedComplexity v1 = simplify({parse_expr(ixtest::v1_published_is)});
    const SimplifiedComplexity v2 = simplify({parse_expr(ixtest::v2_published_is)});
    const bool ok = v1.retained == parse_expr("a*(r + t + d + s + 11)") && v1.class_label() == "quadratic" &&
                    v2.retained == parse_expr("m + r + d + s + g + o") && v2.class_label() == "linear";
    return {ok, "V1 I(" + format_factored(v1.retained) + ") " + v1.class_label() + ", V2 I(" +
                    format_factored(v2.retained) + ") " + v2.class_label()};
}

Outcome klm() {
    const KlmModel model;
    const double t1 = klm_time(klm_parse(ixtest::v1_published_klm), model,
                               {{"m", 6}, {"r", 4}, {"t", 7}, {"d", 6}, {"s", 5}, {"a", 5}});
    const double t2 = klm_time(klm_parse(ixtest::v2_published_klm), model,
                               {{"m", 6}, {"r", 4}, {"t", 7}, {"d", 6}, {"s", 5}, {"o", 5}});
    const std::string s1 = fixed2(klm_speed(171, t1));
    const std::string s2 = fixed2(klm_speed(46, t2));
    const bool ok = std::abs(t1 - 126.52) <= 0.005 && std::abs(t2 - 29.57) <= 0.005 && s1 == "1.35" && s2 == "1.56";
    return {ok, "V1 " + num(t1) + " s -> " + s1 + " IS/sec, V2 " + num(t2) + " s -> " + s2 + " IS/sec"};
}

Outcome aggregation() {
    struct Row {
        std::size_t n;
        std::int64_t is;
        double mean_s;
        const char* cell;
        bool v1;
    };
    // Sample count, IS, mean seconds and published mean speed per row.
    const Row rows[] = {{74, 43, 80.50, "0.53", true},   {85, 43, 42.20, "1.02", true},
                        {86, 75, 65.45, "1.15", true},   {84, 107, 90.22, "1.19", true},
                        {165, 139, 98.64, "1.41", true}, {158, 171, 118.92, "1.44", true},
                        {260, 46, 70.15, "0.66", false}};
    std::vector<SpeedRow> all, v1;
    std::size_t cells = 0;
    for (const auto& r : rows) {
        const double speed = static_cast<double>(r.is) / r.mean_s;
        if (fixed2(speed) == r.cell) ++cells;
        all.push_back({r.n, speed});
        if (r.v1) v1.push_back({r.n, speed});
    }
    const double overall = aggregate_speed(all);
    const double v1_speed = aggregate_speed(v1);
    const bool ok = std::abs(overall - 1.05) <= 0.005 && std::abs(v1_speed - 1.20) <= 0.005 && cells == std::size(rows);
    return {ok, "overall " + num(overall) + ", V1 " + num(v1_speed) + ", cells " + std::to_string(cells) + "/" +
                    std::to_string(std::size(rows))};
}

Outcome oracle_equivalence() {
    const auto start = Clock::now();
    ixtest::Gen gen(20240501);
    std::size_t concepts = 0, bindings = 0, mismatches = 0;
    for (int attempt = 0; attempt < 1000 && concepts < 150; ++attempt) {
        const InteractionConcept c = gen.make_concept(10, 6, 9);
        const Expression f = normalize(sum_steps(c)).is_function;
        std::size_t admissible = 0;
        for (int k = 0; k < 100 && admissible < 8; ++k) {
            const Binding b = gen.binding(c, 5);
            ActionCounts counts;
            try {
                counts = count_actions(c, b);
            } catch (const EvalError&) {
                continue;
            }
            ++admissible;
            if (eval_signed(f, b) != counts.total) ++mismatches;
        }
        if (admissible >= 5) {
            ++concepts;
            bindings += admissible;
        }
    }
    const double secs = seconds_since(start);
    return {concepts >= 100 && mismatches == 0 && secs < 5.0,
            std::to_string(concepts) + " concepts, " + std::to_string(bindings) + " bindings, " +
                std::to_string(mismatches) + " mismatches, " + num(secs, 3) + " s"};
}

std::string run_cli(const std::string& args, int& code) {
    const std::string out = (std::filesystem::temp_directory_path() / ("ixcomplex_acc_" + std::to_string(::getpid()))).string();
    const std::string cmd = "IXCOMPLEX_NO_COLOR=1 '" + std::string(IXCOMPLEX_CLI) + "' " + args + " >'" + out + "' 2>&1";
    const int status = std::system(cmd.c_str());
    code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::string text = ixtest::read_text(out);
    std::filesystem::remove(out);
    return text;
}

Outcome discrepancy() {
    const std::int64_t v1_defined = instantiate(normalize(sum_steps(ixtest::load_v1())), ixtest::v1_binding());
    const std::int64_t v1_oracle = count_actions(ixtest::load_v1(), ixtest::v1_binding()).total;
    const std::int64_t v1_published = eval(parse_expr(ixtest::v1_published_is), ixtest::v1_binding());
    const std::int64_t v2_defined = instantiate(normalize(sum_steps(ixtest::load_v2())), ixtest::v2_binding());
    const std::int64_t v2_oracle = count_actions(ixtest::load_v2(), ixtest::v2_binding()).total;
    const std::int64_t v2_published = eval(parse_expr(ixtest::v2_published_is), ixtest::v2_binding());

    int code1 = 0, code2 = 0;
    const std::string r1 = run_cli("analyze '" + ixtest::concept_path("v1.concept") +
                                       "' --set m=6 --set r=4 --set t=7 --set d=4 --set s=6 --set a=5 --formula '" +
                                       ixtest::v1_published_is + "'",
                                   code1);
    const std::string r2 = run_cli("analyze '" + ixtest::concept_path("v2.concept") +
                                       "' --set m=6 --set r=4 --set d=4 --set s=4 --set g=9 --set o=7 --formula '" +
                                       ixtest::v2_published_is + "'",
                                   code2);
    auto labelled = [](const std::string& report, std::int64_t defined, std::int64_t published) {
        const auto d = report.find("== as-defined ==");
        const auto p = report.find("== as-published ==");
        return d != std::string::npos && p != std::string::npos && d < p &&
               report.find("IS = " + std::to_string(defined) + "\n", d) < p &&
               report.find("IS = " + std::to_string(published) + "\n", p) != std::string::npos;
    };
    const bool ok = v1_defined == 174 && v1_oracle == 174 && v1_published == 171 && v2_defined == 45 &&
                    v2_oracle == 45 && v2_published == 46 && code1 == 0 && code2 == 0 &&
                    labelled(r1, 174, 171) && labelled(r2, 45, 46);
    return {ok, "V1 as-defined " + std::to_string(v1_defined) + " (oracle " + std::to_string(v1_oracle) +
                    ") vs published " + std::to_string(v1_published) + "; V2 as-defined " + std::to_string(v2_defined) +
                    " (oracle " + std::to_string(v2_oracle) + ") vs published " + std::to_string(v2_published)};
}

Outcome synthetic_round_trip() {
    const auto start = Clock::now();
    const SynthConfig cfg{ixtest::load_v1(), ixtest::v1_binding(), 100, 1.05, 0.2, 1};
    const std::string first = write_log(generate_log(cfg));
    const std::string second = write_log(generate_log(cfg));
    const SpeedTable table = task_table(load_log(first));
    const double secs = seconds_since(start);
    if (table.rows.size() != 1) return {false, "expected one task group, got " + std::to_string(table.rows.size())};
    const double mean = table.rows[0].stats.mean_speed;
    const double rel = std::abs(mean - 1.05) / 1.05;
    return {rel <= 0.05 && first == second && secs < 10.0,
            "recovered " + num(mean) + " IS/sec (" + num(rel * 100, 2) + "% off), n=" +
                std::to_string(table.rows[0].stats.n) + ", identical bytes " + (first == second ? "yes" : "no") + ", " +
                num(secs, 3) + " s"};
}

Outcome iqr() {
    const std::vector<double> xs = {1, 2, 3, 4, 100};
    const IqrResult r = iqr_filter(xs);
    const std::vector<double> constant(6, 2.5);
    const bool ok = r.retained == std::vector<double>{1, 2, 3, 4} && r.bounds.lower == -1 && r.bounds.upper == 7 &&
                    iqr_filter(constant).retained == constant;
    return {ok, "retained " + std::to_string(r.retained.size()) + " of 5, bounds [" + num(r.bounds.lower, 2) + ", " +
                    num(r.bounds.upper, 2) + "], constant list kept " +
                    std::to_string(iqr_filter(constant).retained.size()) + "/6"};
}

Outcome round_trips() {
    ixtest::Gen gen(909);
    std::size_t concepts = 0, concept_failures = 0, logs = 0, log_failures = 0;
    for (int i = 0; i < 500; ++i) {
        const InteractionConcept c = gen.make_concept();
        ++concepts;
        const InteractionConcept back = parse_concept(serialize_concept(c));
        if (!(back == c) || parse_concept(serialize_concept(back)) != c) ++concept_failures;
    }
    for (int i = 0; i < 50; ++i) {
        const InteractionConcept c = gen.make_concept(8, 4, 5);
        const Binding b = gen.binding(c, 3);
        EventLog log;
        try {
            log = generate_log({c, b, gen.uniform(1, 20), 1.05, 0.2, static_cast<std::uint64_t>(i)});
        } catch (const EvalError&) {
            continue;
        }
        ++logs;
        if (!(load_log(write_log(log)) == log)) ++log_failures;
    }
    return {concept_failures == 0 && log_failures == 0 && logs >= 20,
            std::to_string(concepts - concept_failures) + "/" + std::to_string(concepts) + " concepts, " +
                std::to_string(logs - log_failures) + "/" + std::to_string(logs) + " logs"};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"big-I instantiation of published formulas", instantiation},
        {"simplification and classification", classification},
        {"KLM execution times and speeds", klm},
        {"speed aggregation and per-row identity", aggregation},
        {"oracle equivalence on random concepts", oracle_equivalence},
        {"as-defined vs published discrepancy report", discrepancy},
        {"synthetic log round trip", synthetic_round_trip},
        {"IQR filter", iqr},
        {"concept and log round trips", round_trips},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << index << "] " << name << ": " << o.detail << "\n";
    }
    std::cout << (failures ? std::to_string(failures) + " criterion(s) failed" : std::string("all criteria passed")) << "\n";
    return failures ? 1 : 0;
}
