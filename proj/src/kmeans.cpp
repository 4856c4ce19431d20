#include "cbc/kmeans.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include "cbc/error.hpp"
#include "cbc/rng.hpp"

namespace cbc {

void KMeansConfig::validate() const {
    if (k < 1) throw DomainError("k must be at least 1");
    if (max_iterations < 1) throw DomainError("max_iterations must be at least 1");
    if (restarts < 1) throw DomainError("restarts must be at least 1");
    if (!(convergence_tol >= 0)) throw DomainError("convergence_tol must be nonnegative");
}

namespace detail {

std::vector<double> effective_weights(std::span<const double> weights, std::size_t dim) {
    if (weights.empty()) return std::vector<double>(dim, 1.0);
    if (weights.size() != dim) throw DomainError("weight vector length does not match the schema");
    return {weights.begin(), weights.end()};
}

Centroids member_means(const CandidateDataset& dataset, std::span<const std::size_t> assignment,
                       std::size_t k, const Centroids& fallback) {
    const auto dim = dataset.schema().size();
    Centroids sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    const auto& pts = dataset.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto c = assignment[i];
        ++counts[c];
        for (std::size_t a = 0; a < dim; ++a) sums[c][a] += pts[i][a];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) {
            sums[c] = fallback[c];
            continue;
        }
        for (auto& v : sums[c]) v /= static_cast<double>(counts[c]);
    }
    return sums;
}

double max_movement(const Centroids& a, const Centroids& b) {
    double worst = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a[c].size(); ++i) acc += (a[c][i] - b[c][i]) * (a[c][i] - b[c][i]);
        worst = std::max(worst, std::sqrt(acc));
    }
    return worst;
}

}  // namespace detail

namespace {

void check_k(const CandidateDataset& dataset, const KMeansConfig& config) {
    config.validate();
    if (dataset.empty()) throw DomainError("dataset has no candidates");
    if (config.k > dataset.size()) throw DomainError("k exceeds candidate count");
}

double total_sse(const CandidateDataset& dataset, std::span<const std::size_t> assignment,
                 const Centroids& centroids, std::span<const double> w) {
    double acc = 0.0;
    const auto& pts = dataset.points();
    for (std::size_t i = 0; i < pts.size(); ++i)
        acc += weighted_sq_distance(pts[i], centroids[assignment[i]], w);
    return acc;
}

}  // namespace

Centroids kmeans_pp_init(const CandidateDataset& dataset, const KMeansConfig& config,
                         std::span<const double> weights) {
    check_k(dataset, config);
    const auto w = detail::effective_weights(weights, dataset.schema().size());
    const auto& pts = dataset.points();
    const auto n = pts.size();

    SplitMix64 rng(config.seed);
    std::vector<bool> chosen(n, false);
    Centroids centroids;
    centroids.reserve(config.k);

    auto first = rng.below(n);
    chosen[first] = true;
    centroids.push_back(pts[first]);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = weighted_sq_distance(pts[i], pts[first], w);

    while (centroids.size() < config.k) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (d2[i] <= 0.0) continue;
                cum += d2[i];
                pick = i;
                if (cum > target) break;
            }
        } else {
            // Every remaining point coincides with a centroid.
            for (std::size_t i = 0; i < n && pick == n; ++i)
                if (!chosen[i]) pick = i;
        }
        chosen[pick] = true;
        centroids.push_back(pts[pick]);
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], weighted_sq_distance(pts[i], pts[pick], w));
    }
    return centroids;
}

Clustering lloyd(const CandidateDataset& dataset, const Centroids& init, const KMeansConfig& config,
                 std::span<const double> weights) {
    check_k(dataset, config);
    const auto dim = dataset.schema().size();
    if (init.size() != config.k) throw DomainError("init must hold exactly k centroids");
    for (const auto& c : init)
        if (c.size() != dim) throw DomainError("init centroid dimension mismatch");
    const auto w = detail::effective_weights(weights, dim);
    const auto& pts = dataset.points();
    const auto n = pts.size();
    const auto k = config.k;

    Clustering out;
    out.k = k;
    out.seed = config.seed;
    for (const auto& c : dataset.candidates()) out.ids.push_back(c.id);
    out.assignment.assign(n, 0);
    out.centroids = init;

    for (std::size_t it = 1; it <= config.max_iterations; ++it) {
        std::vector<std::size_t> counts(k, 0);
        std::vector<double> dist(n);
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = weighted_sq_distance(pts[i], out.centroids[c], w);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            out.assignment[i] = best_c;
            dist[i] = best;
            ++counts[best_c];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[out.assignment[i]] < 2) continue;
                if (far == n || dist[i] > dist[far]) far = i;
            }
            if (far == n) break;
            --counts[out.assignment[far]];
            out.assignment[far] = c;
            dist[far] = 0.0;
            ++counts[c];
        }

        auto next = detail::member_means(dataset, out.assignment, k, out.centroids);
        const double moved = detail::max_movement(out.centroids, next);
        out.centroids = std::move(next);
        out.sse = total_sse(dataset, out.assignment, out.centroids, w);
        assert(out.sse_trace.empty() || out.sse <= out.sse_trace.back() * (1 + 1e-12) + 1e-15);
        out.sse_trace.push_back(out.sse);
        out.iterations = it;
        if (moved <= config.convergence_tol) break;
    }
    return out;
}

Clustering fit_kmeans(const CandidateDataset& dataset, const KMeansConfig& config,
                      std::span<const double> weights) {
    check_k(dataset, config);
    Clustering best;
    bool have = false;
    for (std::size_t r = 0; r < config.restarts; ++r) {
        KMeansConfig run = config;
        run.seed = restart_seed(config.seed, r);
        auto result = lloyd(dataset, kmeans_pp_init(dataset, run, weights), run, weights);
        if (!have || result.sse < best.sse) {
            best = std::move(result);
            have = true;
        }
    }
    best.seed = config.seed;
    return best;
}

double sse(const CandidateDataset& dataset, const Clustering& clustering, std::span<const double> weights) {
    if (clustering.assignment.size() != dataset.size())
        throw DomainError("clustering does not cover the dataset");
    const auto w = detail::effective_weights(weights, dataset.schema().size());
    return total_sse(dataset, clustering.assignment, clustering.centroids, w);
}

double silhouette(const CandidateDataset& dataset, const Clustering& clustering,
                  std::span<const double> weights) {
    if (clustering.k < 2) throw DomainError("silhouette needs at least two clusters");
    const auto w = detail::effective_weights(weights, dataset.schema().size());
    const auto groups = clustering.members();
    for (const auto& g : groups)
        if (g.empty()) throw DomainError("silhouette needs every cluster non-empty");
    const auto& pts = dataset.points();
    const auto n = pts.size();

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto own = clustering.assignment[i];
        if (groups[own].size() == 1) continue;
        double a = 0.0;
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < groups.size(); ++c) {
            double acc = 0.0;
            for (auto j : groups[c]) acc += std::sqrt(weighted_sq_distance(pts[i], pts[j], w));
            if (c == own)
                a = acc / static_cast<double>(groups[c].size() - 1);
            else
                b = std::min(b, acc / static_cast<double>(groups[c].size()));
        }
        const double m = std::max(a, b);
        if (m > 0.0) total += (b - a) / m;
    }
    return total / static_cast<double>(n);
}

std::size_t choose_k(const CandidateDataset& dataset, std::size_t k_min, std::size_t k_max,
                     std::uint64_t seed, std::size_t restarts, std::span<const double> weights) {
    if (k_min < 2 || k_min > k_max || dataset.size() < 1 || k_max > dataset.size() - 1)
        throw DomainError("empty feasible k range");
    std::size_t best_k = k_min;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = k_min; k <= k_max; ++k) {
        KMeansConfig config;
        config.k = k;
        config.seed = seed;
        config.restarts = restarts;
        const double s = silhouette(dataset, fit_kmeans(dataset, config, weights), weights);
        if (s > best + 1e-12) {
            best = s;
            best_k = k;
        }
    }
    return best_k;
}

}  // namespace cbc
