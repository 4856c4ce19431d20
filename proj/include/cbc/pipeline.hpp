#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbc/kmeans.hpp"
#include "cbc/model.hpp"

namespace cbc {

struct CBCConfig {
    KMeansConfig kmeans;
    bool enforce_links = true;
    bool refine = true;
};

struct StageRecord {
    std::string name;
    double duration_ms = 0.0;
    std::string summary;
};

/// Outcome of the three-stage pipeline. When the bind-time check finds a
/// deadlock, clustering and micro are absent and the log ends at "bind".
struct CBCResult {
    std::size_t k = 0;
    std::optional<Clustering> clustering;
    std::optional<MicroClustering> micro;
    DeadlockReport deadlock;
    std::vector<StageRecord> stage_log;

    bool aborted() const noexcept { return !clustering.has_value(); }
};

/// COP-style assignment: must-link components are placed in dataset order on
/// the nearest centroid that breaks no cannot-link and no max size, clusters
/// under min size are topped up by the cheapest admissible moves, then
/// centroids are recomputed; repeat until convergence. Throws
/// AssignmentDeadlock when the greedy order finds no slot.
Clustering constrained_assign(const CandidateDataset& dataset, const Centroids& centroids,
                              const ConstraintSpec& spec, const KMeansConfig& config,
                              std::span<const double> weights = {});

/// Splits each parent cluster into its feasible and infeasible members.
MicroClustering refine_micro_clusters(const Clustering& clustering, const CandidateDataset& dataset,
                                      const ConstraintSpec& spec);

/// Distance weights from the spec, or unit weights.
std::vector<double> distance_weights_for(const ConstraintSpec& spec, const CandidateDataset& dataset);

/// k from the spec when present, else from the config.
std::size_t resolve_k(const ConstraintSpec& spec, const CBCConfig& config);

/// k used when neither the caller nor the spec fixes it: the best
/// silhouette over [2, min(n-1, 8)], or 1 for fewer than three candidates.
std::size_t default_k(const CandidateDataset& dataset, std::uint64_t seed);

/// Bind check, clustering, refinement and post-refinement deadlock check.
/// Throws DomainError on unbound input and AssignmentDeadlock when every
/// restart of the greedy assignment gets stuck.
CBCResult run_pipeline(const CandidateDataset& dataset, const ConstraintSpec& spec, const CBCConfig& config);

}  // namespace cbc
