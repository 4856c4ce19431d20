#pragma once

// Exhaustive reference solvers for small inputs. They enumerate set
// partitions as restricted growth strings, so each partition into at most k
// blocks is visited exactly once regardless of label permutation.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbc/model.hpp"

namespace cbc::oracle {

inline constexpr std::size_t kMaxCandidates = 12;
inline constexpr std::size_t kMaxClusters = 4;

struct MinSseResult {
    bool feasible = false;  // false: no assignment satisfies the spec
    Clustering best;        // canonical labels; empty clusters get the data mean
    double optimum_sse = 0.0;
    std::size_t partitions_examined = 0;
};

/// Minimum-SSE partition into at most k blocks, honoring the link and size
/// constraints of `spec` when given. Ties keep the lexicographically smallest
/// restricted growth string. Throws CapacityError beyond the limits.
MinSseResult brute_force_min_sse(const CandidateDataset& dataset, std::size_t k,
                                 const std::optional<ConstraintSpec>& spec = std::nullopt,
                                 std::span<const double> weights = {});

struct FeasibleWitness {
    bool exists = false;
    std::vector<std::size_t> assignment;  // witness when exists
    std::string refutation;               // reason when not
    std::size_t partitions_examined = 0;
};

/// Whether some assignment into k clusters satisfies every constraint in the
/// spec: links, size bounds, existential rules over the population, and a
/// non-empty feasible set.
FeasibleWitness brute_force_feasible_exists(const ConstraintSpec& spec, const CandidateDataset& dataset,
                                            std::size_t k);

/// Calls `visit` with every restricted growth string of length n using
/// labels below k, in lexicographic order, until it returns false.
template <typename Visit>
void for_each_partition(std::size_t n, std::size_t k, Visit&& visit) {
    if (n == 0 || k == 0) return;
    std::vector<std::size_t> rgs(n, 0);
    std::vector<std::size_t> prefix_max(n, 0);  // max label in rgs[0..i]
    while (true) {
        if (!visit(std::span<const std::size_t>(rgs))) return;
        // Increment the rightmost position that may still grow.
        std::size_t i = n;
        while (i-- > 1) {
            const std::size_t bound = std::min(prefix_max[i - 1] + 1, k - 1);
            if (rgs[i] < bound) break;
        }
        if (i == 0) return;
        ++rgs[i];
        prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            rgs[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }
}

}  // namespace cbc::oracle
