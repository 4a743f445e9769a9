// ixcomplex: command-line frontend.
//
// Exit codes: 0 success, 1 domain/validation error, 2 usage error.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ixcomplex/ixcomplex.hpp"

namespace {

using namespace ixcomplex;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool use_color() { return std::getenv("IXCOMPLEX_NO_COLOR") == nullptr && ::isatty(STDOUT_FILENO); }

std::string heading(const std::string& text) { return use_color() ? "\033[1m" + text + "\033[0m" : text; }

std::string read_file(const std::string& path) {
    if (path == "-") {
        return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("'" + path + "' is not valid JSON: " + e.what());
    }
}

InteractionConcept load_concept(const std::string& path) {
    InteractionConcept c;
    const std::string text = read_file(path);
    try {
        if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
            c = concept_from_json(nlohmann::json::parse(text));
        } else {
            c = parse_concept(text);
        }
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(path + ": " + e.what());
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
    for (const auto& d : validate(c)) {
        const std::string where = d.step.empty() ? "" : "step '" + d.step + "': ";
        if (d.is_error()) throw ValidationError(path + ": " + where + d.message);
        std::cerr << "warning: " << where << d.message << "\n";
    }
    return c;
}

struct BindingArgs {
    std::vector<std::string> sets;
    std::string file;

    void attach(CLI::App* app) {
        app->add_option("--set", sets, "Bind a variable, name=value (repeatable)");
        app->add_option("--bindings", file, "JSON file {\"name\": value, ...}");
    }

    Binding get() const {
        Binding b;
        if (!file.empty()) {
            const auto j = read_json(file);
            if (!j.is_object()) throw Error("bindings file must be a JSON object");
            for (const auto& [name, value] : j.items()) {
                if (!value.is_number_integer()) throw Error("binding '" + name + "' must be an integer");
                b.set(name, value.get<std::int64_t>());
            }
        }
        for (const auto& s : sets) {
            std::pair<std::string, std::int64_t> kv;
            try {
                kv = Binding::parse_assignment(s);
            } catch (const Error& e) {
                throw UsageError(std::string("--set: ") + e.what());
            }
            b.set(kv.first, kv.second);
        }
        return b;
    }

    bool given() const { return !sets.empty() || !file.empty(); }
};

std::vector<std::string> missing_variables(const Expression& e, const Binding& b) {
    std::vector<std::string> out;
    for (const auto& v : e.variables()) {
        if (!b.contains(v)) out.push_back(v);
    }
    return out;
}

std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
    return out;
}

void check_format(const std::string& format, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
        if (format == a) return;
    }
    throw UsageError("unsupported --format '" + format + "' for this command");
}

// --- analyze ---

struct AnalyzeArgs {
    std::string concept_path;
    std::string formula;
    std::string format = "text";
    BindingArgs bindings;
};

int cmd_analyze(const AnalyzeArgs& args) {
    check_format(args.format, {"text", "json"});
    const InteractionConcept c = load_concept(args.concept_path);
    const Binding b = args.bindings.get();

    auto run = [&](const std::function<ComplexityReport(const std::optional<Binding>&)>& make,
                   const Expression& is_function) {
        std::optional<Binding> bind;
        const auto missing = missing_variables(is_function, b);
        if (missing.empty() && (args.bindings.given() || is_function.variables().empty())) {
            bind = b;
        } else if (args.bindings.given()) {
            std::cerr << "note: not instantiated, unbound: " << join(missing) << "\n";
        }
        return make(bind);
    };

    const Expression defined_is = normalize(sum_steps(c)).is_function;
    ComplexityReport defined = run([&](const auto& bind) { return analyze(c, bind); }, defined_is);

    std::optional<ComplexityReport> published;
    if (!args.formula.empty()) {
        const Expression f = parse_expr(args.formula);
        published = run([&](const auto& bind) { return analyze_formula(f, bind); }, f);
    }

    if (args.format == "json") {
        nlohmann::json j = report_to_json(defined);
        j["concept"] = c.name;
        if (published) j = {{"concept", c.name}, {"as_defined", j}, {"as_published", report_to_json(*published)}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    std::cout << heading("Concept: " + c.name) << "\n";
    if (published) std::cout << heading("== as-defined ==") << "\n";
    std::cout << report_to_text(defined);
    if (published) {
        std::cout << heading("== as-published ==") << "\n" << report_to_text(*published);
        if (defined.instantiated && published->instantiated) {
            std::cout << "as-defined IS = " << defined.instantiated->second
                      << ", as-published IS = " << published->instantiated->second << "\n";
        }
    }
    return 0;
}

// --- klm ---

struct KlmArgs {
    std::string concept_path;
    std::string formula;
    std::string map_path;
    std::string model_path;
    std::optional<std::int64_t> is_count;
    std::string format = "text";
    BindingArgs bindings;
};

int cmd_klm(const KlmArgs& args) {
    check_format(args.format, {"text", "json"});
    if (args.concept_path.empty() && args.formula.empty()) throw UsageError("klm needs a concept file or --formula");
    const ActionMapping map = args.map_path.empty() ? default_action_mapping() : mapping_from_json(read_json(args.map_path));
    const KlmModel model = args.model_path.empty() ? KlmModel{} : KlmModel::from_json(read_json(args.model_path));
    const Binding b = args.bindings.get();

    struct Result {
        std::string label;
        KlmExpression expr;
        double seconds;
    };
    std::vector<Result> results;
    if (!args.concept_path.empty()) {
        const KlmExpression k = klm_from_concept(load_concept(args.concept_path), map);
        results.push_back({"as-defined", k, klm_time(k, model, b)});
    }
    if (!args.formula.empty()) {
        const KlmExpression k = klm_parse(args.formula);
        results.push_back({"as-published", k, klm_time(k, model, b)});
    }
    const bool labelled = results.size() > 1;

    if (args.format == "json") {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& r : results) {
            nlohmann::json counts = nlohmann::json::object();
            for (const auto& [op, e] : r.expr.entries()) counts[operator_name(op)] = format(e);
            nlohmann::json entry = {{"operators", counts}, {"seconds", round_half_up(r.seconds)}};
            if (args.is_count) entry["is_per_sec"] = round_half_up(klm_speed(*args.is_count, r.seconds));
            j[r.label == "as-defined" ? "as_defined" : "as_published"] = entry;
        }
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    for (const auto& r : results) {
        const std::string prefix = labelled ? r.label + ": " : "";
        std::cout << prefix << "KLM = " << format_klm(r.expr) << "\n";
        std::cout << prefix << fixed2(r.seconds) << " sec\n";
        if (args.is_count) std::cout << prefix << fixed2(klm_speed(*args.is_count, r.seconds)) << " IS/sec\n";
    }
    return 0;
}

// --- estimate ---

struct EstimateArgs {
    std::string concept_path;
    std::string formula;
    std::optional<std::int64_t> is_count;
    std::string speed = "overall";
    std::optional<double> speed_mean;
    std::optional<double> speed_min;
    std::optional<double> speed_max;
    std::string speed_file;
    std::string format = "text";
    BindingArgs bindings;
};

int cmd_estimate(const EstimateArgs& args) {
    check_format(args.format, {"text", "json"});
    const int sources = !args.concept_path.empty() + !args.formula.empty() + args.is_count.has_value();
    if (sources != 1) throw UsageError("estimate needs exactly one of: concept file, --formula, --is");

    SpeedModel model;
    if (!args.speed_file.empty()) {
        model = SpeedModel::from_json(read_json(args.speed_file));
    } else if (args.speed_mean) {
        model = {"custom", *args.speed_mean, args.speed_min, args.speed_max, "command line"};
        model.check();
    } else {
        const SpeedModel* m = find_speed_model(args.speed);
        if (!m) throw UsageError("unknown speed model '" + args.speed + "' (known: overall, v1, v2)");
        model = *m;
    }

    std::int64_t is = 0;
    if (args.is_count) {
        if (*args.is_count < 0) throw UsageError("--is must be nonnegative");
        is = *args.is_count;
    } else {
        const Expression f = args.formula.empty() ? normalize(sum_steps(load_concept(args.concept_path))).is_function
                                                  : parse_expr(args.formula);
        const Binding b = args.bindings.get();
        const auto missing = missing_variables(f, b);
        if (!missing.empty()) throw Error("missing bindings: " + join(missing));
        is = eval(f, b);
    }

    const TimeEstimate t = estimate_time(is, model);
    if (args.format == "json") {
        nlohmann::json j = {{"is", is},
                            {"model", model.name},
                            {"speed_mean", model.mean},
                            {"expected_s", round_half_up(t.expected)},
                            {"fastest_s", nullptr},
                            {"slowest_s", nullptr}};
        if (t.fastest) j["fastest_s"] = round_half_up(*t.fastest);
        if (t.slowest) j["slowest_s"] = round_half_up(*t.slowest);
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "IS: " << is << "\n";
    std::cout << "model: " << model.name << " (mean " << fixed2(model.mean) << " IS/sec)\n";
    std::cout << "expected: " << fixed2(t.expected) << " sec\n";
    if (t.fastest) {
        std::cout << "fastest: " << fixed2(*t.fastest) << " sec\n";
        std::cout << "slowest: " << fixed2(*t.slowest) << " sec\n";
    } else {
        std::cout << "fastest: n/a (model has no speed range)\n";
        std::cout << "slowest: n/a (model has no speed range)\n";
    }
    return 0;
}

// --- logs ---

struct LogsArgs {
    std::string log_path;
    std::string concept_path;
    std::string group_by = "concept-is";
    std::string tables = "both";
    std::string format = "text";
};

int cmd_logs(const LogsArgs& args) {
    check_format(args.format, {"text", "csv", "json"});
    TaskGrouping grouping;
    if (args.group_by == "task") {
        grouping = TaskGrouping::by_task;
    } else if (args.group_by == "concept") {
        grouping = TaskGrouping::by_concept;
    } else if (args.group_by == "concept-is") {
        grouping = TaskGrouping::by_concept_is;
    } else {
        throw UsageError("unknown --group-by '" + args.group_by + "'");
    }
    const TableFormat fmt = args.format == "csv" ? TableFormat::csv
                            : args.format == "json" ? TableFormat::json
                                                    : TableFormat::text;

    const EventLog log = load_log(read_file(args.log_path));

    if (!args.concept_path.empty()) {
        const InteractionConcept c = load_concept(args.concept_path);
        std::size_t matched = 0;
        for (const auto& s : log.sessions) {
            for (const auto& t : s.tasks) {
                if (t.concept_name != c.name) continue;
                ++matched;
                const std::int64_t expected = count_actions(c, t.binding).total;
                if (expected != t.is_count) {
                    std::cerr << "warning: " << s.session_id << "/" << t.task_id << ": logged is_count "
                              << t.is_count << " differs from concept count " << expected << "\n";
                }
            }
        }
        if (matched == 0) std::cerr << "warning: no task in the log belongs to concept '" << c.name << "'\n";
    }

    const bool want_tasks = args.tables != "steps";
    const bool want_steps = args.tables != "tasks";
    std::optional<SpeedTable> tasks, steps;
    if (want_tasks) tasks = task_table(log, grouping);
    if (want_steps) steps = step_table(log);
    for (const auto* t : {tasks ? &*tasks : nullptr, steps ? &*steps : nullptr}) {
        if (!t) continue;
        for (const auto& w : t->warnings) std::cerr << "warning: " << w << "\n";
    }

    if (fmt == TableFormat::json) {
        nlohmann::json j = nlohmann::json::object();
        if (tasks) j["tasks"] = nlohmann::json::parse(render_table(*tasks, fmt));
        if (steps) j["steps"] = nlohmann::json::parse(render_table(*steps, fmt));
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (tasks) {
        if (fmt == TableFormat::text) std::cout << heading("Tasks") << "\n";
        std::cout << render_table(*tasks, fmt);
    }
    if (tasks && steps) std::cout << "\n";
    if (steps) {
        if (fmt == TableFormat::text) std::cout << heading("Steps") << "\n";
        std::cout << render_table(*steps, fmt);
    }
    return 0;
}

// --- synth / oracle ---

struct SynthArgs {
    std::string concept_path;
    std::int64_t sessions = 0;
    double speed_mean = 1.05;
    double speed_sd = 0;
    std::uint64_t seed = 0;
    std::string out = "-";
    BindingArgs bindings;
};

int cmd_synth(const SynthArgs& args) {
    if (args.sessions < 1) throw UsageError("--sessions must be positive");
    if (!(args.speed_mean > 0)) throw UsageError("--speed-mean must be positive");
    if (!(args.speed_sd >= 0)) throw UsageError("--speed-sd must be nonnegative");
    SynthConfig cfg{load_concept(args.concept_path), args.bindings.get(), args.sessions, args.speed_mean,
                    args.speed_sd, args.seed};
    const std::string text = write_log(generate_log(cfg));
    if (args.out == "-") {
        std::cout << text;
    } else {
        std::ofstream out(args.out, std::ios::binary);
        if (!out) throw Error("cannot write '" + args.out + "'");
        out << text;
    }
    return 0;
}

struct OracleArgs {
    std::string concept_path;
    std::string format = "text";
    BindingArgs bindings;
};

int cmd_oracle(const OracleArgs& args) {
    check_format(args.format, {"text", "json"});
    const ActionCounts counts = count_actions(load_concept(args.concept_path), args.bindings.get());
    if (args.format == "json") {
        nlohmann::json j = nlohmann::json::object();
        for (ActionKind k : all_action_kinds) j[std::string(1, action_letter(k))] = counts[k];
        j["total"] = counts.total;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << format_counts(counts) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interaction complexity calculator: big-I analysis, KLM times, speed estimates, log analytics"};
    app.require_subcommand(1);

    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand("analyze", "Derive, simplify and instantiate the IS function of a concept");
    analyze->add_option("concept", analyze_args.concept_path, "Concept file (.concept DSL or .json)")->required();
    analyze->add_option("--formula", analyze_args.formula, "Published IS function to report alongside");
    analyze->add_option("--format", analyze_args.format, "text|json");
    analyze_args.bindings.attach(analyze);

    KlmArgs klm_args;
    auto* klm = app.add_subcommand("klm", "KLM execution time for a concept or an operator formula");
    klm->add_option("concept", klm_args.concept_path, "Concept file");
    klm->add_option("--formula", klm_args.formula, "Operator formula, e.g. \"(m + 2)*Q + 4*T\"");
    klm->add_option("--map", klm_args.map_path, "Action mapping JSON");
    klm->add_option("--model", klm_args.model_path, "Unit-time override JSON");
    klm->add_option("--is", klm_args.is_count, "IS count for the speed column");
    klm->add_option("--format", klm_args.format, "text|json");
    klm_args.bindings.attach(klm);

    EstimateArgs est_args;
    auto* estimate = app.add_subcommand("estimate", "Time estimate from an IS count and an interaction speed");
    estimate->add_option("concept", est_args.concept_path, "Concept file");
    estimate->add_option("--formula", est_args.formula, "IS function to instantiate");
    estimate->add_option("--is", est_args.is_count, "IS count given directly");
    estimate->add_option("--speed", est_args.speed, "Built-in speed model: overall|v1|v2");
    estimate->add_option("--speed-mean", est_args.speed_mean, "Custom mean speed (IS/sec)");
    estimate->add_option("--speed-min", est_args.speed_min, "Custom minimum speed (IS/sec)");
    estimate->add_option("--speed-max", est_args.speed_max, "Custom maximum speed (IS/sec)");
    estimate->add_option("--speed-file", est_args.speed_file, "Speed model JSON");
    estimate->add_option("--format", est_args.format, "text|json");
    est_args.bindings.attach(estimate);

    LogsArgs logs_args;
    auto* logs = app.add_subcommand("logs", "Task and step speed tables from an event log");
    logs->add_option("log", logs_args.log_path, "Log JSON file, or - for stdin")->required();
    logs->add_option("--concept", logs_args.concept_path, "Concept file to cross-check logged IS counts");
    logs->add_option("--group-by", logs_args.group_by, "task|concept|concept-is");
    logs->add_option("--tables", logs_args.tables, "tasks|steps|both")->check(CLI::IsMember({"tasks", "steps", "both"}));
    logs->add_option("--format", logs_args.format, "text|csv|json");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic event log");
    synth->add_option("concept", synth_args.concept_path, "Concept file")->required();
    synth->add_option("--sessions", synth_args.sessions, "Number of sessions")->required();
    synth->add_option("--speed-mean", synth_args.speed_mean, "Mean speed (IS/sec)");
    synth->add_option("--speed-sd", synth_args.speed_sd, "Speed standard deviation (IS/sec)");
    synth->add_option("--seed", synth_args.seed, "RNG seed");
    synth->add_option("--out", synth_args.out, "Output file (default stdout)");
    synth_args.bindings.attach(synth);

    OracleArgs oracle_args;
    auto* oracle = app.add_subcommand("oracle", "Brute-force action counts at a binding");
    oracle->add_option("concept", oracle_args.concept_path, "Concept file")->required();
    oracle->add_option("--format", oracle_args.format, "text|json");
    oracle_args.bindings.attach(oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(analyze_args);
        if (klm->parsed()) return cmd_klm(klm_args);
        if (estimate->parsed()) return cmd_estimate(est_args);
        if (logs->parsed()) return cmd_logs(logs_args);
        if (synth->parsed()) return cmd_synth(synth_args);
        if (oracle->parsed()) return cmd_oracle(oracle_args);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ixcomplex::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
