#include "cbc/constraints.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

#include "cbc/error.hpp"

namespace cbc {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_;
};

std::size_t require_index(const CandidateDataset& dataset, const std::string& id) {
    auto idx = dataset.index_of(id);
    if (!idx) throw DomainError("unknown id " + id);
    return *idx;
}

std::string fmt(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

std::vector<std::string> ids_of(const CandidateDataset& dataset, std::span<const std::size_t> idx) {
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(dataset[i].id);
    return out;
}

/// Exhaustive search for an assignment of components to k clusters that
/// respects lifted cannot-links and the size bounds.
class PackingSearch {
public:
    PackingSearch(const LinkComponents& links, std::size_t k, std::size_t min_size, std::size_t max_size)
        : links_(links), k_(k), min_(min_size), max_(max_size), load_(k, 0) {
        order_.resize(links.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            return links.components[a].size() > links.components[b].size();
        });
        cluster_of_.assign(links.size(), k_);
        for (auto c : order_) remaining_ += links.components[c].size();
    }

    bool solve() { return place(0, 0); }

private:
    bool place(std::size_t pos, std::size_t used) {
        std::size_t deficit = 0;
        for (std::size_t c = 0; c < k_; ++c)
            if (load_[c] < min_) deficit += min_ - load_[c];
        if (deficit > remaining_) return false;
        if (pos == order_.size()) return deficit == 0;

        const auto comp = order_[pos];
        const auto size = links_.components[comp].size();
        const auto limit = std::min(used + 1, k_);
        for (std::size_t c = 0; c < limit; ++c) {
            if (load_[c] + size > max_) continue;
            bool clash = false;
            for (std::size_t other = 0; other < cluster_of_.size() && !clash; ++other)
                clash = cluster_of_[other] == c && links_.conflicting(comp, other);
            if (clash) continue;
            load_[c] += size;
            remaining_ -= size;
            cluster_of_[comp] = c;
            if (place(pos + 1, std::max(used, c + 1))) return true;
            cluster_of_[comp] = k_;
            remaining_ += size;
            load_[c] -= size;
        }
        return false;
    }

    const LinkComponents& links_;
    std::size_t k_;
    std::size_t min_;
    std::size_t max_;
    std::vector<std::size_t> load_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> cluster_of_;
    std::size_t remaining_ = 0;
};

void check_population(const std::vector<ExistentialRule>& rules, const CandidateDataset& dataset,
                      std::span<const std::size_t> population, const std::string& stage,
                      DeadlockReport& report) {
    for (const auto& rule : rules) {
        std::vector<std::size_t> hits;
        for (auto i : population)
            if (compare(attribute_value(dataset[i], rule.attribute, dataset), rule.op, rule.threshold))
                hits.push_back(i);
        if (static_cast<std::int64_t>(hits.size()) >= rule.min_count) continue;
        DeadlockCause cause;
        cause.kind = CauseKind::ExistentialUnsatisfiable;
        cause.stage = stage;
        cause.detail = rule.describe() + ": only " + std::to_string(hits.size()) + " qualify";
        cause.ids = ids_of(dataset, hits);
        cause.numbers = {static_cast<double>(hits.size()), static_cast<double>(rule.min_count)};
        report.causes.push_back(std::move(cause));
    }
    if (!dataset.empty() && population.empty()) {
        DeadlockCause cause;
        cause.kind = CauseKind::EmptyFeasibleSet;
        cause.stage = stage;
        cause.detail = "no candidate meets the feasibility constraints";
        report.causes.push_back(std::move(cause));
    }
}

std::vector<std::size_t> feasible_indices(const CandidateDataset& dataset, const ConstraintSpec& spec) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        if (object_feasible(dataset[i], spec, dataset).feasible) out.push_back(i);
    return out;
}

}  // namespace

bool LinkComponents::conflicting(std::size_t a, std::size_t b) const {
    const auto key = std::minmax(a, b);
    return std::binary_search(lifted_cannot.begin(), lifted_cannot.end(),
                              std::pair<std::size_t, std::size_t>(key.first, key.second));
}

LinkComponents build_link_components(const ConstraintSpec& spec, const CandidateDataset& dataset) {
    const auto n = dataset.size();
    DisjointSets sets(n);
    for (const auto& [a, b] : spec.must_link) sets.unite(require_index(dataset, a), require_index(dataset, b));

    LinkComponents out;
    out.component_of.assign(n, 0);
    std::vector<std::size_t> root_to_comp(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto root = sets.find(i);
        if (root_to_comp[root] == n) {
            root_to_comp[root] = out.components.size();
            out.components.emplace_back();
        }
        out.component_of[i] = root_to_comp[root];
        out.components[root_to_comp[root]].push_back(i);
    }
    for (const auto& [a, b] : spec.cannot_link) {
        auto ca = out.component_of[require_index(dataset, a)];
        auto cb = out.component_of[require_index(dataset, b)];
        out.lifted_cannot.emplace_back(std::min(ca, cb), std::max(ca, cb));
    }
    std::sort(out.lifted_cannot.begin(), out.lifted_cannot.end());
    out.lifted_cannot.erase(std::unique(out.lifted_cannot.begin(), out.lifted_cannot.end()),
                            out.lifted_cannot.end());
    return out;
}

std::vector<std::size_t> must_link_path(const ConstraintSpec& spec, const CandidateDataset& dataset,
                                        std::size_t from, std::size_t to) {
    const auto n = dataset.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [a, b] : spec.must_link) {
        auto ia = require_index(dataset, a);
        auto ib = require_index(dataset, b);
        adj[ia].push_back(ib);
        adj[ib].push_back(ia);
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());

    std::vector<std::size_t> prev(n, n);
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        if (cur == to) break;
        for (auto nb : adj[cur]) {
            if (seen[nb]) continue;
            seen[nb] = true;
            prev[nb] = cur;
            queue.push_back(nb);
        }
    }
    if (!seen[to]) return {};
    std::vector<std::size_t> path{to};
    while (path.back() != from) path.push_back(prev[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
}

double attribute_value(const Candidate& candidate, std::string_view attribute,
                       const CandidateDataset& context) {
    if (attribute == kConstraintsAttribute) return candidate.constraints_rating;
    if (auto idx = context.schema().index_of(attribute)) return candidate.ratings.at(*idx);
    if (auto idx = context.capability_index(attribute)) return candidate.capabilities.at(*idx);
    throw DomainError("rule references unknown attribute " + std::string(attribute));
}

std::vector<ExistentialRule> capability_rules(const ConstraintSpec& spec, const CandidateDataset& dataset) {
    std::vector<ExistentialRule> out;
    if (!spec.user_spec) return out;
    for (const auto& column : dataset.capability_columns()) {
        auto required = spec.user_spec->value_of(column);
        if (!required) continue;
        out.push_back({column, capability_direction(column), *required, 1, true});
    }
    return out;
}

std::vector<ExistentialRule> all_rules(const ConstraintSpec& spec, const CandidateDataset& dataset) {
    auto out = spec.existential;
    auto generated = capability_rules(spec, dataset);
    out.insert(out.end(), generated.begin(), generated.end());
    return out;
}

Feasibility object_feasible(const Candidate& candidate, const ConstraintSpec& spec,
                            const CandidateDataset& context) {
    Feasibility out;
    const double tau = spec.feasibility_threshold;
    if (candidate.constraints_rating < tau) {
        out.violations.push_back({"constraints_rating >= " + fmt(tau), candidate.constraints_rating, tau,
                                  "constraints_rating " + fmt(candidate.constraints_rating) + " < " + fmt(tau)});
    }
    for (const auto& rule : all_rules(spec, context)) {
        if (!rule.per_candidate) continue;
        const double observed = attribute_value(candidate, rule.attribute, context);
        if (compare(observed, rule.op, rule.threshold)) continue;
        out.violations.push_back(
            {rule.attribute + " " + std::string(to_string(rule.op)) + " " + fmt(rule.threshold), observed,
             rule.threshold,
             rule.attribute + " " + fmt(observed) + " " + std::string(negated(rule.op)) + " " +
                 fmt(rule.threshold)});
    }
    out.feasible = out.violations.empty();
    return out;
}

FeasibilityPartition feasibility_partition(const CandidateDataset& dataset, const ConstraintSpec& spec) {
    FeasibilityPartition out;
    for (const auto& c : dataset.candidates()) {
        auto f = object_feasible(c, spec, dataset);
        if (f.feasible)
            out.feasible.push_back(c.id);
        else
            out.infeasible.emplace_back(c.id, std::move(f.violations));
    }
    return out;
}

DeadlockReport detect_deadlock(const ConstraintSpec& spec, const CandidateDataset& dataset, std::size_t k) {
    DeadlockReport report;
    const auto n = dataset.size();
    const std::string stage = "bind";
    if (k < 1) throw DomainError("k must be at least 1");

    const auto min_size = static_cast<std::size_t>(spec.min_cluster_size.value_or(0));
    const auto max_size = spec.max_cluster_size ? static_cast<std::size_t>(*spec.max_cluster_size) : n;

    // (a) size arithmetic
    if (spec.min_cluster_size && k * min_size > n) {
        report.causes.push_back({CauseKind::SizeArithmetic, stage,
                                 "k * min_cluster_size = " + std::to_string(k * min_size) + " > " +
                                     std::to_string(n) + " candidates",
                                 {}, {}, std::nullopt,
                                 {double(k), double(min_size), double(n)}});
    }
    if (spec.max_cluster_size && max_size * k < n) {
        report.causes.push_back({CauseKind::SizeArithmetic, stage,
                                 "k * max_cluster_size = " + std::to_string(k * max_size) + " < " +
                                     std::to_string(n) + " candidates",
                                 {}, {}, std::nullopt,
                                 {double(k), double(max_size), double(n)}});
    }

    const auto links = build_link_components(spec, dataset);

    // (b) cannot-link inside a must-link component
    bool link_conflict = false;
    for (const auto& [a, b] : spec.cannot_link) {
        const auto ia = require_index(dataset, a);
        const auto ib = require_index(dataset, b);
        if (links.component_of[ia] != links.component_of[ib]) continue;
        link_conflict = true;
        const auto path = must_link_path(spec, dataset, ia, ib);
        report.causes.push_back({CauseKind::LinkConflict, stage,
                                 "cannot-link (" + a + ", " + b + ") inside a must-link component",
                                 ids_of(dataset, links.components[links.component_of[ia]]),
                                 ids_of(dataset, path), IdPair{a, b}, {}});
    }

    // (c) component larger than any cluster may be
    bool oversize = false;
    if (spec.max_cluster_size) {
        for (const auto& comp : links.components) {
            if (comp.size() <= max_size) continue;
            oversize = true;
            report.causes.push_back({CauseKind::SizeArithmetic, stage,
                                     "must-link component of size " + std::to_string(comp.size()) +
                                         " exceeds max_cluster_size " + std::to_string(max_size),
                                     ids_of(dataset, comp), {}, std::nullopt,
                                     {double(comp.size()), double(max_size)}});
        }
    }

    // (d) components cannot be packed into k clusters
    if (!link_conflict && !oversize && report.causes.empty()) {
        if (links.size() <= kExactPackingLimit) {
            PackingSearch search(links, k, min_size, max_size);
            if (!search.solve()) {
                report.causes.push_back({CauseKind::ClusterPacking, stage,
                                         "no placement of " + std::to_string(links.size()) +
                                             " must-link components into " + std::to_string(k) +
                                             " clusters respects cannot-link and size bounds",
                                         {}, {}, std::nullopt,
                                         {double(k), double(links.size())}});
            }
        } else {
            report.warnings.push_back("component packing not checked: " + std::to_string(links.size()) +
                                      " components exceed the exact-check limit of " +
                                      std::to_string(kExactPackingLimit));
        }
    }

    // (e), (f)
    std::vector<std::size_t> everyone(n);
    std::iota(everyone.begin(), everyone.end(), std::size_t{0});
    DeadlockReport population;
    check_population(all_rules(spec, dataset), dataset, everyone, stage, population);
    for (auto& c : population.causes)
        if (c.kind == CauseKind::ExistentialUnsatisfiable) report.causes.push_back(std::move(c));
    if (n > 0 && feasible_indices(dataset, spec).empty()) {
        report.causes.push_back({CauseKind::EmptyFeasibleSet, stage,
                                 "no candidate meets the feasibility constraints", {}, {}, std::nullopt,
                                 {spec.feasibility_threshold}});
    }
    return report;
}

DeadlockReport recheck_after_refinement(const ConstraintSpec& spec, const CandidateDataset& dataset,
                                        std::span<const std::size_t> feasible) {
    DeadlockReport report;
    check_population(all_rules(spec, dataset), dataset, feasible, "post-refinement", report);
    return report;
}

std::vector<std::string> assignment_violations(const ConstraintSpec& spec, const CandidateDataset& dataset,
                                               std::span<const std::size_t> assignment, std::size_t k) {
    std::vector<std::string> out;
    if (assignment.size() != dataset.size()) {
        out.push_back("assignment does not cover the dataset");
        return out;
    }
    for (const auto& [a, b] : spec.must_link)
        if (assignment[require_index(dataset, a)] != assignment[require_index(dataset, b)])
            out.push_back("must-link (" + a + ", " + b + ") split");
    for (const auto& [a, b] : spec.cannot_link)
        if (assignment[require_index(dataset, a)] == assignment[require_index(dataset, b)])
            out.push_back("cannot-link (" + a + ", " + b + ") co-assigned");
    std::vector<std::size_t> load(k, 0);
    for (auto c : assignment) {
        if (c >= k) {
            out.push_back("cluster index out of range");
            return out;
        }
        ++load[c];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (spec.min_cluster_size && static_cast<std::int64_t>(load[c]) < *spec.min_cluster_size)
            out.push_back("cluster " + std::to_string(c) + " below min_cluster_size");
        if (spec.max_cluster_size && static_cast<std::int64_t>(load[c]) > *spec.max_cluster_size)
            out.push_back("cluster " + std::to_string(c) + " above max_cluster_size");
    }
    return out;
}

}  // namespace cbc
