#include "cbc/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbc/error.hpp"

namespace cbc {

WeightVector::WeightVector(std::vector<double> values) : values_(std::move(values)) {
    bool any_positive = false;
    for (double w : values_) {
        if (!std::isfinite(w) || w < 0) throw DomainError("weights must be nonnegative and finite");
        any_positive = any_positive || w > 0;
    }
    if (!any_positive) throw DomainError("at least one weight must be positive");
}

WeightVector WeightVector::uniform(const AttributeSchema& schema) { return WeightVector(unit_weights(schema)); }

WeightVector WeightVector::from_map(const std::map<std::string, double>& by_name, const AttributeSchema& schema) {
    return WeightVector(resolve_weights(by_name, schema));
}

std::vector<double> WeightVector::normalized() const {
    const double total = std::accumulate(values_.begin(), values_.end(), 0.0);
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i] / total;
    return out;
}

double score_candidate(const Candidate& candidate, const AttributeSchema& schema, const WeightVector& weights) {
    if (weights.values().size() != schema.size()) throw DomainError("weight vector length does not match the schema");
    const auto unit = normalize(candidate.ratings, schema);
    const auto& w = weights.values();
    double s = 0.0, total = 0.0;
    for (std::size_t i = 0; i < unit.size(); ++i) {
        s += w[i] * unit[i];
        total += w[i];
    }
    return std::clamp(s / total, 0.0, 1.0);
}

EvaluationReport rank(const CBCResult& result, const CandidateDataset& dataset, const WeightVector& weights,
                      RunMetadata meta) {
    EvaluationReport report;
    report.meta = std::move(meta);
    report.meta.k = result.k;
    report.attributes = dataset.schema().names();
    report.deadlock = result.deadlock;
    report.stages = result.stage_log;
    if (result.aborted()) {
        report.aborted = true;
        return report;
    }
    if (!result.micro) throw DomainError("result carries no micro-clustering to rank");

    const auto& micro = *result.micro;
    auto scored = [&](const std::string& id) {
        const auto& cand = dataset[*dataset.index_of(id)];
        return ScoredCandidate{id, score_candidate(cand, dataset.schema(), weights),
                               normalize(cand.ratings, dataset.schema())};
    };

    for (const auto& mc : micro.micro_clusters) {
        MicroClusterSummary summary{mc.parent, mc.feasible, mc.members, 0.0};
        double total = 0.0;
        for (const auto& id : mc.members) {
            const auto s = scored(id);
            total += s.score;
            if (mc.feasible) report.ranking.push_back(s);
        }
        summary.mean_score = mc.members.empty() ? 0.0 : total / static_cast<double>(mc.members.size());
        report.micro_clusters.push_back(std::move(summary));
    }
    std::sort(report.ranking.begin(), report.ranking.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    for (const auto& cand : dataset.candidates()) {
        auto it = micro.violations.find(cand.id);
        if (it != micro.violations.end()) report.excluded.emplace_back(cand.id, it->second);
    }
    return report;
}

}  // namespace cbc
