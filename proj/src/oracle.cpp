#include "cbc/oracle.hpp"

#include <cstdint>
#include <limits>

#include "cbc/error.hpp"

namespace cbc::oracle {

namespace {

void guard(const CandidateDataset& dataset, std::size_t k) {
    if (dataset.size() > kMaxCandidates || k > kMaxClusters)
        throw CapacityError("oracle capacity exceeded: n=" + std::to_string(dataset.size()) +
                            ", k=" + std::to_string(k) + " (limits n <= " + std::to_string(kMaxCandidates) +
                            ", k <= " + std::to_string(kMaxClusters) + ")");
    if (k < 1) throw DomainError("k must be at least 1");
}

struct IndexPairs {
    std::vector<std::pair<std::size_t, std::size_t>> must;
    std::vector<std::pair<std::size_t, std::size_t>> cannot;
};

IndexPairs index_pairs(const ConstraintSpec& spec, const CandidateDataset& dataset) {
    auto idx = [&](const std::string& id) {
        auto i = dataset.index_of(id);
        if (!i) throw DomainError("unknown id " + id);
        return *i;
    };
    IndexPairs out;
    for (const auto& [a, b] : spec.must_link) out.must.emplace_back(idx(a), idx(b));
    for (const auto& [a, b] : spec.cannot_link) out.cannot.emplace_back(idx(a), idx(b));
    return out;
}

bool satisfies(std::span<const std::size_t> labels, std::size_t k, const IndexPairs& pairs,
               const ConstraintSpec& spec) {
    for (const auto& [a, b] : pairs.must)
        if (labels[a] != labels[b]) return false;
    for (const auto& [a, b] : pairs.cannot)
        if (labels[a] == labels[b]) return false;
    if (!spec.min_cluster_size && !spec.max_cluster_size) return true;
    std::vector<std::int64_t> size(k, 0);
    for (auto l : labels) ++size[l];
    for (auto s : size) {
        if (spec.min_cluster_size && s < *spec.min_cluster_size) return false;
        if (spec.max_cluster_size && s > *spec.max_cluster_size) return false;
    }
    return true;
}

double value_of(const Candidate& c, const std::string& attribute, const CandidateDataset& dataset) {
    if (attribute == kConstraintsAttribute) return c.constraints_rating;
    if (auto i = dataset.schema().index_of(attribute)) return c.ratings[*i];
    if (auto i = dataset.capability_index(attribute)) return c.capabilities[*i];
    throw DomainError("unknown attribute " + attribute);
}

}  // namespace

MinSseResult brute_force_min_sse(const CandidateDataset& dataset, std::size_t k,
                                 const std::optional<ConstraintSpec>& spec, std::span<const double> weights) {
    guard(dataset, k);
    const auto n = dataset.size();
    const auto dim = dataset.schema().size();
    std::vector<double> w(dim, 1.0);
    if (!weights.empty()) {
        if (weights.size() != dim) throw DomainError("weight vector length does not match the schema");
        w.assign(weights.begin(), weights.end());
    }
    const auto& pts = dataset.points();
    const IndexPairs pairs = spec ? index_pairs(*spec, dataset) : IndexPairs{};

    std::vector<double> data_mean(dim, 0.0);
    for (const auto& p : pts)
        for (std::size_t a = 0; a < dim; ++a) data_mean[a] += p[a] / static_cast<double>(n);

    MinSseResult out;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_labels;
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim));
    std::vector<std::size_t> counts(k);

    for_each_partition(n, k, [&](std::span<const std::size_t> labels) {
        ++out.partitions_examined;
        if (spec && !satisfies(labels, k, pairs, *spec)) return true;
        for (auto& s : sums) std::fill(s.begin(), s.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[labels[i]];
            for (std::size_t a = 0; a < dim; ++a) sums[labels[i]][a] += pts[i][a];
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = labels[i];
            for (std::size_t a = 0; a < dim; ++a) {
                const double d = pts[i][a] - sums[c][a] / static_cast<double>(counts[c]);
                total += w[a] * d * d;
            }
        }
        if (total < best - 1e-12) {
            best = total;
            best_labels.assign(labels.begin(), labels.end());
        }
        return true;
    });

    if (best_labels.empty()) return out;
    out.feasible = true;
    out.optimum_sse = best;
    auto& c = out.best;
    c.k = k;
    for (const auto& cand : dataset.candidates()) c.ids.push_back(cand.id);
    c.assignment = best_labels;
    c.centroids.assign(k, data_mean);
    std::fill(counts.begin(), counts.end(), 0);
    std::vector<std::vector<double>> acc(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        ++counts[best_labels[i]];
        for (std::size_t a = 0; a < dim; ++a) acc[best_labels[i]][a] += pts[i][a];
    }
    for (std::size_t l = 0; l < k; ++l) {
        if (counts[l] == 0) continue;
        for (std::size_t a = 0; a < dim; ++a) c.centroids[l][a] = acc[l][a] / static_cast<double>(counts[l]);
    }
    c.sse = best;
    c.sse_trace = {best};
    return out;
}

FeasibleWitness brute_force_feasible_exists(const ConstraintSpec& spec, const CandidateDataset& dataset,
                                            std::size_t k) {
    guard(dataset, k);
    FeasibleWitness out;
    const auto n = dataset.size();

    // Population rules do not depend on the assignment.
    std::size_t feasible = 0;
    for (const auto& c : dataset.candidates()) {
        bool ok = c.constraints_rating >= spec.feasibility_threshold;
        if (spec.user_spec) {
            for (std::size_t j = 0; j < dataset.capability_columns().size(); ++j) {
                const auto& column = dataset.capability_columns()[j];
                if (auto required = spec.user_spec->value_of(column))
                    ok = ok && compare(c.capabilities[j], capability_direction(column), *required);
            }
        }
        feasible += ok ? 1 : 0;
    }
    if (n > 0 && feasible == 0) {
        out.refutation = "no candidate meets the feasibility constraints";
        return out;
    }
    auto population_rule = [&](const std::string& attribute, Comparator op, double threshold,
                               std::int64_t min_count) {
        std::int64_t hits = 0;
        for (const auto& c : dataset.candidates()) hits += compare(value_of(c, attribute, dataset), op, threshold);
        return hits >= min_count;
    };
    for (const auto& r : spec.existential) {
        if (!population_rule(r.attribute, r.op, r.threshold, r.min_count)) {
            out.refutation = "existential rule fails: " + r.describe();
            return out;
        }
    }

    const auto pairs = index_pairs(spec, dataset);
    if (n == 0) {
        // Every cluster is empty.
        out.exists = !spec.min_cluster_size || *spec.min_cluster_size == 0;
        if (!out.exists) out.refutation = "no candidates to fill clusters";
        return out;
    }
    for_each_partition(n, k, [&](std::span<const std::size_t> labels) {
        ++out.partitions_examined;
        if (!satisfies(labels, k, pairs, spec)) return true;
        out.exists = true;
        out.assignment.assign(labels.begin(), labels.end());
        return false;
    });
    if (!out.exists) out.refutation = "exhaustive search found no assignment";
    return out;
}

}  // namespace cbc::oracle
