#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbc/model.hpp"
#include "cbc/pipeline.hpp"

namespace cbc {

/// Nonnegative per-attribute scoring weights, at least one positive.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> values);
    static WeightVector uniform(const AttributeSchema& schema);
    static WeightVector from_map(const std::map<std::string, double>& by_name, const AttributeSchema& schema);

    const std::vector<double>& values() const noexcept { return values_; }
    /// Weights rescaled to sum to 1.
    std::vector<double> normalized() const;

private:
    std::vector<double> values_;
};

/// Weighted mean of normalized ratings, in [0, 1].
double score_candidate(const Candidate& candidate, const AttributeSchema& schema, const WeightVector& weights);

struct ScoredCandidate {
    std::string id;
    double score = 0.0;
    std::vector<double> per_attribute;  // normalized ratings, schema order
};

struct MicroClusterSummary {
    std::size_t parent = 0;
    bool feasible = true;
    std::vector<std::string> members;
    double mean_score = 0.0;
};

struct RunMetadata {
    std::uint64_t seed = 0;
    std::size_t k = 0;
    std::size_t restarts = 1;
    std::string config_digest;
    std::string dataset_digest;
    std::optional<UserConstraintSpec> user_spec;
};

struct EvaluationReport {
    RunMetadata meta;
    std::vector<std::string> attributes;
    DeadlockReport deadlock;
    bool aborted = false;
    std::vector<MicroClusterSummary> micro_clusters;
    std::vector<ScoredCandidate> ranking;
    std::vector<std::pair<std::string, std::vector<Violation>>> excluded;
    std::vector<StageRecord> stages;
};

/// Ranks the feasible micro-cluster members by score (descending, ties by
/// ascending id) and lists the rest as excluded. An aborted result yields a
/// report holding only the deadlock section.
EvaluationReport rank(const CBCResult& result, const CandidateDataset& dataset, const WeightVector& weights,
                      RunMetadata meta = {});

}  // namespace cbc
