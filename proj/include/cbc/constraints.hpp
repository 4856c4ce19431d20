#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cbc/model.hpp"

namespace cbc {

/// Must-link closure over candidate indices. Components are numbered by
/// their first member in dataset order; members are listed in dataset order.
struct LinkComponents {
    std::vector<std::size_t> component_of;
    std::vector<std::vector<std::size_t>> components;
    /// Cannot-link lifted to component pairs (first <= second), sorted and
    /// unique. A pair with first == second is a must-link/cannot-link clash.
    std::vector<std::pair<std::size_t, std::size_t>> lifted_cannot;

    std::size_t size() const noexcept { return components.size(); }
    bool conflicting(std::size_t a, std::size_t b) const;
};

/// Throws DomainError when a pair names an unknown candidate.
LinkComponents build_link_components(const ConstraintSpec& spec, const CandidateDataset& dataset);

/// Shortest must-link path between two candidates (indices, both endpoints
/// included); empty when they are not connected.
std::vector<std::size_t> must_link_path(const ConstraintSpec& spec, const CandidateDataset& dataset,
                                        std::size_t from, std::size_t to);

/// Value of `attribute` for a candidate: a rated attribute, a capability
/// column, or the aggregate constraints rating.
double attribute_value(const Candidate& candidate, std::string_view attribute,
                       const CandidateDataset& context);

/// Per-candidate rules generated from user-spec fields that have a matching
/// capability column in the dataset.
std::vector<ExistentialRule> capability_rules(const ConstraintSpec& spec, const CandidateDataset& dataset);

/// User rules followed by the generated capability rules.
std::vector<ExistentialRule> all_rules(const ConstraintSpec& spec, const CandidateDataset& dataset);

struct Feasibility {
    bool feasible = true;
    std::vector<Violation> violations;
};

/// A candidate is feasible iff its constraints rating reaches the threshold
/// and it passes every per-candidate rule. All failures are reported.
Feasibility object_feasible(const Candidate& candidate, const ConstraintSpec& spec,
                            const CandidateDataset& context);

struct FeasibilityPartition {
    std::vector<std::string> feasible;
    std::vector<std::pair<std::string, std::vector<Violation>>> infeasible;
};

FeasibilityPartition feasibility_partition(const CandidateDataset& dataset, const ConstraintSpec& spec);

/// Components above this count skip the exact packing check.
inline constexpr std::size_t kExactPackingLimit = 12;

/// Bind-time unsatisfiability check. Causes, in order: size arithmetic,
/// link conflicts, oversize components, component packing (exact for up to
/// kExactPackingLimit components), existential rules, empty feasible set.
DeadlockReport detect_deadlock(const ConstraintSpec& spec, const CandidateDataset& dataset, std::size_t k);

/// Post-refinement check: existential rules over the feasible population
/// and the empty-feasible-set rule. Causes are tagged "post-refinement".
DeadlockReport recheck_after_refinement(const ConstraintSpec& spec, const CandidateDataset& dataset,
                                        std::span<const std::size_t> feasible);

/// Link and size constraints broken by a concrete assignment, one message
/// per violation. Empty means the assignment satisfies them all.
std::vector<std::string> assignment_violations(const ConstraintSpec& spec, const CandidateDataset& dataset,
                                               std::span<const std::size_t> assignment, std::size_t k);

}  // namespace cbc
