#include "cli.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "cbc/constraints.hpp"
#include "cbc/error.hpp"
#include "cbc/evaluate.hpp"
#include "cbc/ingest.hpp"
#include "cbc/kmeans.hpp"
#include "cbc/oracle.hpp"
#include "cbc/pipeline.hpp"
#include "cbc/report.hpp"

namespace cbc::cli {

namespace {

bool color_enabled(int fd) {
    const char* no_color = std::getenv("CBC_NO_COLOR");
    if (no_color && *no_color) return false;
    return ::isatty(fd) == 1;
}

std::string paint(const std::string& text, const char* code, bool on) {
    if (!on) return text;
    return std::string("\033[") + code + "m" + text + "\033[0m";
}

void error_line(std::ostream& err, const std::string& message) {
    err << paint("error:", "31", color_enabled(STDERR_FILENO)) << ' ' << message << '\n';
}

std::map<std::string, double> read_weight_map(const std::string& path) {
    const auto text = read_text_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError(path, "weights must be a JSON object of attribute -> number");
    std::map<std::string, double> out;
    for (const auto& [name, value] : doc.items()) {
        if (!value.is_number()) throw ParseError(path + ", " + name, "expected a number");
        out[canonical_attribute_name(name)] = value.get<double>();
    }
    return out;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw ParseError(out_path, "cannot write file");
    file << text;
}

struct Inputs {
    CandidateDataset dataset;
    ConstraintSpec spec;
};

Inputs load(const std::string& data_path, const std::string& constraints_path) {
    Inputs in{parse_dataset(read_text_file(data_path)), {}};
    const auto& schema = in.dataset.schema();
    if (constraints_path.empty()) {
        in.spec.feasibility_threshold = schema.midpoint();
    } else {
        in.spec = parse_constraint_spec(read_text_file(constraints_path), schema.scale_min(), schema.scale_max());
    }
    return in;
}

/// Returns false (after reporting) when the spec does not bind.
bool bind_inputs(const Inputs& in, std::ostream& err) {
    const auto report = bind_and_validate(in.dataset, in.spec);
    for (const auto& w : report.warnings) err << "warning: [" << w.locator << "] " << w.message << '\n';
    for (const auto& e : report.errors) error_line(err, "[" + e.locator + "] " + e.message);
    return report.accepted();
}

// cluster -----------------------------------------------------------------

struct ClusterArgs {
    std::string data;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::size_t restarts = 1;
    std::size_t max_iterations = 100;
    std::string weights;
    std::string out;
};

int cmd_cluster(const ClusterArgs& a, std::ostream& out) {
    const auto dataset = parse_dataset(read_text_file(a.data));
    if (a.k > dataset.size()) throw DomainError("k exceeds candidate count");
    KMeansConfig config;
    config.k = a.k;
    config.seed = a.seed;
    config.restarts = a.restarts;
    config.max_iterations = a.max_iterations;
    std::vector<double> weights;
    if (!a.weights.empty()) weights = resolve_weights(read_weight_map(a.weights), dataset.schema());
    const auto clustering = fit_kmeans(dataset, config, weights);
    emit(render(clustering_to_json(clustering)), a.out, out);
    return kOk;
}

// evaluate ----------------------------------------------------------------

struct EvaluateArgs {
    std::string data;
    std::string constraints;
    std::string weights;
    std::optional<std::size_t> k;
    std::uint64_t seed = 42;
    std::size_t restarts = 10;
    std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    auto in = load(a.data, a.constraints);
    if (a.k) in.spec.k = static_cast<std::int64_t>(*a.k);
    if (!bind_inputs(in, err)) return kInputError;

    CBCConfig config;
    config.kmeans.seed = a.seed;
    config.kmeans.restarts = a.restarts;
    if (!in.spec.k) config.kmeans.k = default_k(in.dataset, a.seed);
    const auto weights = a.weights.empty() ? WeightVector::uniform(in.dataset.schema())
                                           : WeightVector::from_map(read_weight_map(a.weights), in.dataset.schema());

    CBCResult result;
    try {
        result = run_pipeline(in.dataset, in.spec, config);
    } catch (const AssignmentDeadlock& e) {
        error_line(err, e.what());
        return kAssignmentDeadlock;
    }

    RunMetadata meta;
    meta.seed = a.seed;
    meta.restarts = a.restarts;
    meta.config_digest = config_digest(in.spec, config);
    meta.dataset_digest = dataset_digest(in.dataset);
    meta.user_spec = in.spec.user_spec;
    const auto report = rank(result, in.dataset, weights, meta);
    emit(render(report_to_json(report, rfc3339_utc_now())), a.out, out);
    if (result.deadlock.deadlocked()) {
        err << "deadlock: " << result.deadlock.causes.size() << " cause(s); see the report's deadlock section\n";
        return kDeadlock;
    }
    return kOk;
}

// check -------------------------------------------------------------------

struct CheckArgs {
    std::string data;
    std::string constraints;
    std::optional<std::size_t> k;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
    auto in = load(a.data, a.constraints);
    if (a.k) in.spec.k = static_cast<std::int64_t>(*a.k);
    if (!bind_inputs(in, err)) return kInputError;
    if (!in.spec.k) {
        error_line(err, "k is required (pass --k or set it in the constraint spec)");
        return kInputError;
    }
    const auto report = detect_deadlock(in.spec, in.dataset, static_cast<std::size_t>(*in.spec.k));
    out << render(deadlock_to_json(report));
    return report.deadlocked() ? kDeadlock : kOk;
}

// verify ------------------------------------------------------------------

struct VerifyArgs {
    std::string data;
    std::string constraints;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::size_t restarts = 50;
};

constexpr double kMaxGapPercent = 5.0;
constexpr double kSseSlack = 1e-9;

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err, const Options& options) {
    auto in = load(a.data, a.constraints);
    in.spec.k = static_cast<std::int64_t>(a.k);
    if (!bind_inputs(in, err)) return kInputError;
    const auto weights = distance_weights_for(in.spec, in.dataset);
    const bool paint_on = color_enabled(STDOUT_FILENO);

    // Capacity is checked before any engine work.
    const auto baseline_oracle = oracle::brute_force_min_sse(in.dataset, a.k, std::nullopt, weights);

    KMeansConfig kconf;
    kconf.k = a.k;
    kconf.seed = a.seed;
    kconf.restarts = a.restarts;
    const auto engine = fit_kmeans(in.dataset, kconf, weights);

    bool ok = true;
    auto row = [&](const std::string& label, const std::string& value, bool pass) {
        ok = ok && pass;
        out << std::left << std::setw(34) << label << std::setw(22) << value
            << paint(pass ? "ok" : "FAIL", pass ? "32" : "31", paint_on) << '\n';
    };
    auto num = [](double v) {
        std::ostringstream s;
        s << std::setprecision(12) << v;
        return s.str();
    };

    const double gap = baseline_oracle.optimum_sse > 0
                           ? 100.0 * (engine.sse - baseline_oracle.optimum_sse) / baseline_oracle.optimum_sse
                           : (engine.sse > kSseSlack ? INFINITY : 0.0);
    out << "unconstrained k=" << a.k << ", restarts=" << a.restarts << ", seed=" << a.seed << '\n';
    row("engine SSE", num(engine.sse), engine.sse >= baseline_oracle.optimum_sse - kSseSlack);
    row("oracle SSE", num(baseline_oracle.optimum_sse), true);
    std::ostringstream gap_text;
    gap_text << std::fixed << std::setprecision(4) << (std::abs(gap) < 1e-9 ? 0.0 : gap);
    row("gap %", gap_text.str(), gap <= kMaxGapPercent);

    if (!a.constraints.empty()) {
        const auto witness = oracle::brute_force_feasible_exists(in.spec, in.dataset, a.k);
        const auto report = detect_deadlock(in.spec, in.dataset, a.k);
        bool engine_feasible = !report.deadlocked();
        if (options.invert_engine_feasibility) engine_feasible = !engine_feasible;
        out << "constrained\n";
        row("engine feasible", engine_feasible ? "yes" : "no", true);
        row("oracle feasible", witness.exists ? "yes" : "no", true);
        row("feasibility agreement", engine_feasible == witness.exists ? "yes" : "no",
            engine_feasible == witness.exists);

        const auto constrained_oracle = oracle::brute_force_min_sse(in.dataset, a.k, in.spec, weights);
        CBCConfig config;
        config.kmeans = kconf;
        try {
            const auto result = run_pipeline(in.dataset, in.spec, config);
            if (!result.aborted()) {
                const double e = result.clustering->sse;
                row("engine constrained SSE", num(e),
                    constrained_oracle.feasible && e >= constrained_oracle.optimum_sse - kSseSlack);
                row("oracle constrained SSE",
                    constrained_oracle.feasible ? num(constrained_oracle.optimum_sse) : "infeasible", true);
            } else {
                row("engine constrained SSE", "deadlock", true);
            }
        } catch (const AssignmentDeadlock&) {
            row("engine constrained SSE", "assignment deadlock", true);
        }
    }
    return ok ? kOk : kPropertyViolation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Options& options) {
    CLI::App app{"Constraint-based clustering and evaluation of SaaS candidates", "cbc"};
    app.require_subcommand(1);

    ClusterArgs cluster;
    auto* c = app.add_subcommand("cluster", "Baseline seeded k-means; prints the clustering as JSON");
    c->add_option("--data", cluster.data, "Dataset CSV")->required();
    c->add_option("--k", cluster.k, "Number of clusters")->required()->check(CLI::PositiveNumber);
    c->add_option("--seed", cluster.seed, "Random seed")->capture_default_str();
    c->add_option("--restarts", cluster.restarts, "k-means++ restarts")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--max-iterations", cluster.max_iterations, "Lloyd iteration cap")->capture_default_str();
    c->add_option("--weights", cluster.weights, "JSON object of per-attribute distance weights");
    c->add_option("--out", cluster.out, "Write JSON here instead of stdout");

    EvaluateArgs evaluate;
    auto* e = app.add_subcommand("evaluate", "Full pipeline and ranked evaluation report");
    e->add_option("--data", evaluate.data, "Dataset CSV")->required();
    e->add_option("--constraints", evaluate.constraints, "Constraint spec JSON")->required();
    e->add_option("--weights", evaluate.weights, "JSON object of per-attribute scoring weights");
    e->add_option("--k", evaluate.k, "Number of clusters (overrides the spec)")->check(CLI::PositiveNumber);
    e->add_option("--seed", evaluate.seed, "Random seed")->capture_default_str();
    e->add_option("--restarts", evaluate.restarts, "k-means++ restarts")->capture_default_str()->check(CLI::PositiveNumber);
    e->add_option("--out", evaluate.out, "Write the report here instead of stdout");

    CheckArgs check;
    auto* ch = app.add_subcommand("check", "Bind the spec and report deadlocks only");
    ch->add_option("--data", check.data, "Dataset CSV")->required();
    ch->add_option("--constraints", check.constraints, "Constraint spec JSON")->required();
    ch->add_option("--k", check.k, "Number of clusters (overrides the spec)")->check(CLI::PositiveNumber);

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "Compare the engine against the exhaustive oracle");
    v->add_option("--data", verify.data, "Dataset CSV")->required();
    v->add_option("--constraints", verify.constraints, "Constraint spec JSON");
    v->add_option("--k", verify.k, "Number of clusters")->required()->check(CLI::PositiveNumber);
    v->add_option("--seed", verify.seed, "Random seed")->capture_default_str();
    v->add_option("--restarts", verify.restarts, "k-means++ restarts")->capture_default_str()->check(CLI::PositiveNumber);

    std::vector<std::string> argv_store{"cbc"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex, out, err);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex, out, err);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex, out, err);
        return kInputError;
    }

    try {
        if (c->parsed()) return cmd_cluster(cluster, out);
        if (e->parsed()) return cmd_evaluate(evaluate, out, err);
        if (ch->parsed()) return cmd_check(check, out, err);
        if (v->parsed()) return cmd_verify(verify, out, err, options);
    } catch (const CapacityError& ex) {
        error_line(err, ex.what());
        return kCapacityExceeded;
    } catch (const AssignmentDeadlock& ex) {
        error_line(err, ex.what());
        return kAssignmentDeadlock;
    } catch (const ParseError& ex) {
        error_line(err, ex.what());
        return kInputError;
    } catch (const DomainError& ex) {
        error_line(err, ex.what());
        return kInputError;
    }
    return kInputError;
}

}  // namespace cbc::cli
