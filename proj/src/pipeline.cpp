#include "cbc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <sstream>

#include "cbc/constraints.hpp"
#include "cbc/error.hpp"
#include "cbc/ingest.hpp"
#include "cbc/rng.hpp"

namespace cbc {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string join_ids(const CandidateDataset& dataset, const std::vector<std::size_t>& idx) {
    std::string out;
    for (auto i : idx) {
        if (!out.empty()) out += ", ";
        out += dataset[i].id;
    }
    return out;
}

class ComponentAssigner {
public:
    ComponentAssigner(const CandidateDataset& dataset, const ConstraintSpec& spec, std::size_t k,
                      std::span<const double> weights)
        : dataset_(dataset),
          links_(build_link_components(spec, dataset)),
          k_(k),
          w_(weights.begin(), weights.end()),
          min_(static_cast<std::size_t>(spec.min_cluster_size.value_or(0))),
          max_(spec.max_cluster_size ? static_cast<std::size_t>(*spec.max_cluster_size)
                                     : std::numeric_limits<std::size_t>::max()) {
        const auto dim = dataset.schema().size();
        for (const auto& comp : links_.components) {
            std::vector<double> mean(dim, 0.0);
            for (auto i : comp)
                for (std::size_t a = 0; a < dim; ++a) mean[a] += dataset.points()[i][a];
            for (auto& v : mean) v /= static_cast<double>(comp.size());
            means_.push_back(std::move(mean));
        }
    }

    /// Component -> cluster for the given centroids.
    std::vector<std::size_t> assign(const Centroids& centroids) {
        const auto m = links_.size();
        placed_.assign(m, k_);
        load_.assign(k_, 0);
        std::vector<double> cost(m, 0.0);

        for (std::size_t comp = 0; comp < m; ++comp) {
            std::vector<std::pair<double, std::size_t>> options;
            for (std::size_t c = 0; c < k_; ++c)
                options.emplace_back(weighted_sq_distance(means_[comp], centroids[c], w_), c);
            std::stable_sort(options.begin(), options.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            bool done = false;
            for (const auto& [d, c] : options) {
                if (!admissible(comp, c)) continue;
                put(comp, c);
                done = true;
                break;
            }
            if (!done) stuck(comp, "no admissible cluster");
        }

        repair_min_sizes(centroids);

        // Empty clusters take the component contributing most to SSE, as in
        // the unconstrained Lloyd step.
        for (std::size_t comp = 0; comp < m; ++comp) cost[comp] = contribution(comp, centroids[placed_[comp]]);
        for (std::size_t c = 0; c < k_; ++c) {
            if (load_[c] != 0) continue;
            std::size_t far = m;
            for (std::size_t comp = 0; comp < m; ++comp) {
                const auto from = placed_[comp];
                const auto size = links_.components[comp].size();
                if (load_[from] < size + std::max<std::size_t>(min_, 1)) continue;
                if (size > max_) continue;
                if (far == m || cost[comp] > cost[far]) far = comp;
            }
            if (far == m) continue;
            move(far, c);
            cost[far] = 0.0;
        }

        std::vector<std::size_t> assignment(dataset_.size());
        for (std::size_t comp = 0; comp < m; ++comp)
            for (auto i : links_.components[comp]) assignment[i] = placed_[comp];
        return assignment;
    }

private:
    bool admissible(std::size_t comp, std::size_t c) const {
        if (load_[c] + links_.components[comp].size() > max_) return false;
        for (std::size_t other = 0; other < placed_.size(); ++other)
            if (other != comp && placed_[other] == c && links_.conflicting(comp, other)) return false;
        return true;
    }

    void put(std::size_t comp, std::size_t c) {
        placed_[comp] = c;
        load_[c] += links_.components[comp].size();
    }

    void move(std::size_t comp, std::size_t c) {
        load_[placed_[comp]] -= links_.components[comp].size();
        placed_[comp] = k_;
        put(comp, c);
    }

    double contribution(std::size_t comp, const std::vector<double>& centroid) const {
        double acc = 0.0;
        for (auto i : links_.components[comp]) acc += weighted_sq_distance(dataset_.points()[i], centroid, w_);
        return acc;
    }

    void repair_min_sizes(const Centroids& centroids) {
        if (min_ == 0) return;
        for (std::size_t c = 0; c < k_; ++c) {
            while (load_[c] < min_) {
                std::size_t best = placed_.size();
                double best_cost = std::numeric_limits<double>::infinity();
                for (std::size_t comp = 0; comp < placed_.size(); ++comp) {
                    const auto from = placed_[comp];
                    const auto size = links_.components[comp].size();
                    if (from == c || load_[from] < min_ + size) continue;
                    placed_[comp] = k_;
                    const bool ok = admissible(comp, c);
                    placed_[comp] = from;
                    if (!ok) continue;
                    const double delta =
                        contribution(comp, centroids[c]) - contribution(comp, centroids[from]);
                    if (delta < best_cost) {
                        best_cost = delta;
                        best = comp;
                    }
                }
                if (best == placed_.size()) {
                    std::ostringstream msg;
                    msg << "assignment deadlock: cluster " << c << " cannot reach min_cluster_size " << min_
                        << "; greedy order found no slot (the exhaustive oracle may still find a solution "
                           "at small n)";
                    throw AssignmentDeadlock({}, msg.str());
                }
                move(best, c);
            }
        }
    }

    [[noreturn]] void stuck(std::size_t comp, const std::string& why) const {
        std::vector<std::string> ids;
        for (auto i : links_.components[comp]) ids.push_back(dataset_[i].id);
        throw AssignmentDeadlock(ids, "assignment deadlock: " + why + " for component {" +
                                          join_ids(dataset_, links_.components[comp]) +
                                          "}; greedy order found no slot (the exhaustive oracle may "
                                          "still find a solution at small n)");
    }

    const CandidateDataset& dataset_;
    LinkComponents links_;
    std::size_t k_;
    std::vector<double> w_;
    std::size_t min_;
    std::size_t max_;
    std::vector<std::vector<double>> means_;
    std::vector<std::size_t> placed_;
    std::vector<std::size_t> load_;
};

}  // namespace

Clustering constrained_assign(const CandidateDataset& dataset, const Centroids& centroids,
                              const ConstraintSpec& spec, const KMeansConfig& config,
                              std::span<const double> weights) {
    config.validate();
    if (dataset.empty()) throw DomainError("dataset has no candidates");
    if (config.k > dataset.size()) throw DomainError("k exceeds candidate count");
    if (centroids.size() != config.k) throw DomainError("init must hold exactly k centroids");
    const auto w = detail::effective_weights(weights, dataset.schema().size());

    ComponentAssigner assigner(dataset, spec, config.k, w);
    Clustering out;
    out.k = config.k;
    out.seed = config.seed;
    for (const auto& c : dataset.candidates()) out.ids.push_back(c.id);
    out.centroids = centroids;

    for (std::size_t it = 1; it <= config.max_iterations; ++it) {
        out.assignment = assigner.assign(out.centroids);
        auto next = detail::member_means(dataset, out.assignment, config.k, out.centroids);
        const double moved = detail::max_movement(out.centroids, next);
        out.centroids = std::move(next);
        out.sse = sse(dataset, out, w);
        out.sse_trace.push_back(out.sse);
        out.iterations = it;
        if (moved <= config.convergence_tol) break;
    }

    auto broken = assignment_violations(spec, dataset, out.assignment, config.k);
    if (!broken.empty()) throw AssignmentDeadlock({}, "assignment deadlock: " + broken.front());
    return out;
}

MicroClustering refine_micro_clusters(const Clustering& clustering, const CandidateDataset& dataset,
                                      const ConstraintSpec& spec) {
    if (clustering.assignment.size() != dataset.size())
        throw DomainError("clustering does not cover the dataset");
    MicroClustering out;
    out.parent = clustering;
    const auto groups = clustering.members();
    for (std::size_t c = 0; c < groups.size(); ++c) {
        MicroCluster good{c, true, {}};
        MicroCluster bad{c, false, {}};
        for (auto i : groups[c]) {
            const auto& cand = dataset[i];
            auto f = object_feasible(cand, spec, dataset);
            if (f.feasible) {
                good.members.push_back(cand.id);
            } else {
                bad.members.push_back(cand.id);
                out.violations.emplace(cand.id, std::move(f.violations));
            }
        }
        if (!good.members.empty()) out.micro_clusters.push_back(std::move(good));
        if (!bad.members.empty()) out.micro_clusters.push_back(std::move(bad));
    }
    return out;
}

std::vector<double> distance_weights_for(const ConstraintSpec& spec, const CandidateDataset& dataset) {
    if (spec.distance_weights) return resolve_weights(*spec.distance_weights, dataset.schema());
    return unit_weights(dataset.schema());
}

std::size_t resolve_k(const ConstraintSpec& spec, const CBCConfig& config) {
    return spec.k ? static_cast<std::size_t>(*spec.k) : config.kmeans.k;
}

std::size_t default_k(const CandidateDataset& dataset, std::uint64_t seed) {
    const auto n = dataset.size();
    if (n < 3) return 1;
    return choose_k(dataset, 2, std::min<std::size_t>(n - 1, 8), seed);
}

CBCResult run_pipeline(const CandidateDataset& dataset, const ConstraintSpec& spec, const CBCConfig& config) {
    CBCResult result;
    KMeansConfig kconf = config.kmeans;
    kconf.k = resolve_k(spec, config);
    kconf.validate();
    result.k = kconf.k;

    auto t0 = Clock::now();
    const auto bound = bind_and_validate(dataset, spec);
    if (!bound.accepted()) {
        std::string msg = "constraint spec does not bind to the dataset:";
        for (const auto& e : bound.errors) msg += " [" + e.locator + "] " + e.message + ";";
        throw DomainError(msg);
    }
    if (kconf.k > dataset.size()) throw DomainError("k exceeds candidate count");

    // Stage 0: structural deadlocks abort. An empty feasible set does not; it
    // is reported after refinement, where the ranking comes out empty.
    auto bind_report = detect_deadlock(spec, dataset, kconf.k);
    result.deadlock.warnings = bind_report.warnings;
    const bool abort = std::any_of(bind_report.causes.begin(), bind_report.causes.end(),
                                   [](const auto& c) { return c.kind != CauseKind::EmptyFeasibleSet; });
    if (abort) {
        result.deadlock = std::move(bind_report);
        result.stage_log.push_back({"bind", elapsed_ms(t0),
                                    "deadlock: " + std::to_string(result.deadlock.causes.size()) +
                                        " cause(s); pipeline aborted"});
        return result;
    }
    result.stage_log.push_back({"bind", elapsed_ms(t0), "no structural deadlock"});

    // Stage 1: clustering.
    t0 = Clock::now();
    const auto w = distance_weights_for(spec, dataset);
    if (config.enforce_links && spec.has_assignment_constraints()) {
        std::optional<Clustering> best;
        std::optional<AssignmentDeadlock> first_failure;
        for (std::size_t r = 0; r < kconf.restarts; ++r) {
            KMeansConfig run = kconf;
            run.seed = restart_seed(kconf.seed, r);
            try {
                auto c = constrained_assign(dataset, kmeans_pp_init(dataset, run, w), spec, run, w);
                if (!best || c.sse < best->sse) best = std::move(c);
            } catch (const AssignmentDeadlock& e) {
                if (!first_failure) first_failure = e;
            }
        }
        if (!best) throw *first_failure;
        best->seed = kconf.seed;
        result.clustering = std::move(best);
    } else {
        result.clustering = fit_kmeans(dataset, kconf, w);
    }
    {
        std::ostringstream s;
        s << "k=" << kconf.k << " sse=" << result.clustering->sse
          << " iterations=" << result.clustering->iterations;
        result.stage_log.push_back({"cluster", elapsed_ms(t0), s.str()});
    }

    // Stage 2: refinement.
    t0 = Clock::now();
    if (!config.refine) {
        result.stage_log.push_back({"refine", elapsed_ms(t0), "skipped"});
        return result;
    }
    result.micro = refine_micro_clusters(*result.clustering, dataset, spec);
    std::vector<std::size_t> feasible;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        if (!result.micro->violations.contains(dataset[i].id)) feasible.push_back(i);
    result.stage_log.push_back({"refine", elapsed_ms(t0),
                                std::to_string(result.micro->micro_clusters.size()) + " micro-clusters, " +
                                    std::to_string(feasible.size()) + " feasible candidates"});

    // Stage 3: post-refinement deadlock check.
    t0 = Clock::now();
    auto post = recheck_after_refinement(spec, dataset, feasible);
    for (auto& cause : post.causes) result.deadlock.causes.push_back(std::move(cause));
    result.stage_log.push_back({"deadlock", elapsed_ms(t0),
                                result.deadlock.deadlocked()
                                    ? std::to_string(result.deadlock.causes.size()) + " cause(s)"
                                    : "no deadlock"});
    return result;
}

}  // namespace cbc
