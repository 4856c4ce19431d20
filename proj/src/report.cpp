#include "cbc/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <stdexcept>

#include "cbc/ingest.hpp"

namespace cbc {

double round_significant(double value, int digits) {
    if (!std::isfinite(value) || value == 0.0) return value;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return std::strtod(buf, nullptr);
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xF]);
    }
    return out;
}

std::string dataset_digest(const CandidateDataset& dataset) { return sha256_hex(serialize_dataset(dataset)); }

std::string config_digest(const ConstraintSpec& spec, const CBCConfig& config) {
    ojson doc;
    doc["spec"] = constraint_spec_to_json(spec);
    doc["k"] = resolve_k(spec, config);
    doc["seed"] = config.kmeans.seed;
    doc["restarts"] = config.kmeans.restarts;
    doc["max_iterations"] = config.kmeans.max_iterations;
    doc["convergence_tol"] = config.kmeans.convergence_tol;
    doc["enforce_links"] = config.enforce_links;
    doc["refine"] = config.refine;
    return sha256_hex(doc.dump());
}

std::string rfc3339_utc_now() {
    std::time_t t = 0;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch)
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    else
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

ojson numbers(const std::vector<double>& v) {
    ojson arr = ojson::array();
    for (double x : v) arr.push_back(round_significant(x));
    return arr;
}

}  // namespace

ojson clustering_to_json(const Clustering& c) {
    ojson out;
    out["k"] = c.k;
    out["seed"] = c.seed;
    out["iterations"] = c.iterations;
    out["sse"] = round_significant(c.sse);
    ojson assignment = ojson::array();
    for (std::size_t i = 0; i < c.ids.size(); ++i)
        assignment.push_back({{"id", c.ids[i]}, {"cluster", c.assignment[i]}});
    out["assignment"] = assignment;
    ojson centroids = ojson::array();
    for (const auto& centroid : c.centroids) centroids.push_back(numbers(centroid));
    out["centroids"] = centroids;
    return out;
}

ojson violations_to_json(const std::vector<Violation>& violations) {
    ojson arr = ojson::array();
    for (const auto& v : violations)
        arr.push_back({{"rule", v.rule},
                       {"observed", round_significant(v.observed)},
                       {"required", round_significant(v.required)},
                       {"message", v.message}});
    return arr;
}

ojson deadlock_to_json(const DeadlockReport& report) {
    ojson out;
    out["deadlocked"] = report.deadlocked();
    ojson causes = ojson::array();
    for (const auto& c : report.causes) {
        ojson cause;
        cause["kind"] = std::string(to_string(c.kind));
        cause["stage"] = c.stage;
        cause["detail"] = c.detail;
        if (!c.ids.empty()) cause["ids"] = c.ids;
        if (!c.path.empty()) cause["must_link_path"] = c.path;
        if (c.cannot_pair) cause["cannot_link"] = {c.cannot_pair->first, c.cannot_pair->second};
        if (!c.numbers.empty()) cause["numbers"] = numbers(c.numbers);
        causes.push_back(std::move(cause));
    }
    out["causes"] = causes;
    out["warnings"] = report.warnings;
    return out;
}

ojson strip_timestamp(ojson report) {
    if (report.contains("meta")) {
        report["meta"].erase("timestamp");
        report["meta"].erase("determinism_digest");
    }
    return report;
}

ojson report_to_json(const EvaluationReport& report, const std::string& timestamp) {
    ojson doc;
    ojson meta;
    meta["seed"] = report.meta.seed;
    meta["k"] = report.meta.k;
    meta["restarts"] = report.meta.restarts;
    meta["config_digest"] = report.meta.config_digest;
    meta["dataset_digest"] = report.meta.dataset_digest;
    meta["attributes"] = report.attributes;
    if (report.meta.user_spec) meta["user_spec"] = user_spec_to_json(*report.meta.user_spec);
    ojson stages = ojson::array();
    for (const auto& s : report.stages) stages.push_back({{"stage", s.name}, {"summary", s.summary}});
    meta["stages"] = stages;
    meta["timestamp"] = timestamp;
    doc["meta"] = meta;
    doc["deadlock"] = deadlock_to_json(report.deadlock);

    if (!report.aborted) {
        ojson micro = ojson::array();
        for (const auto& m : report.micro_clusters)
            micro.push_back({{"parent", m.parent},
                             {"label", m.feasible ? "feasible" : "infeasible"},
                             {"members", m.members},
                             {"mean_score", round_significant(m.mean_score)}});
        doc["micro_clusters"] = micro;

        ojson ranking = ojson::array();
        for (const auto& r : report.ranking) {
            ojson per = ojson::object();
            for (std::size_t a = 0; a < r.per_attribute.size(); ++a)
                per[report.attributes[a]] = round_significant(r.per_attribute[a]);
            ranking.push_back({{"id", r.id}, {"score", round_significant(r.score)}, {"per_attribute", per}});
        }
        doc["ranking"] = ranking;

        ojson excluded = ojson::array();
        for (const auto& [id, v] : report.excluded)
            excluded.push_back({{"id", id}, {"violations", violations_to_json(v)}});
        doc["excluded"] = excluded;
    }

    doc["meta"]["determinism_digest"] = sha256_hex(strip_timestamp(doc).dump());
    return doc;
}

std::string render(const ojson& doc) { return doc.dump(2) + "\n"; }

}  // namespace cbc
