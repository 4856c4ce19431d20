#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cbc/model.hpp"

namespace cbc {

struct KMeansConfig {
    std::size_t k = 2;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 100;
    double convergence_tol = 1e-9;  // on max centroid movement
    std::size_t restarts = 1;

    void validate() const;
};

using Centroids = std::vector<std::vector<double>>;

/// k-means++ seeding in normalized space. An empty `weights` span means unit
/// weights. Throws DomainError when k exceeds the candidate count.
Centroids kmeans_pp_init(const CandidateDataset& dataset, const KMeansConfig& config,
                         std::span<const double> weights = {});

/// Lloyd iterations from the given centroids. Ties go to the lowest cluster
/// index; an empty cluster takes the point farthest from its current centroid.
Clustering lloyd(const CandidateDataset& dataset, const Centroids& init, const KMeansConfig& config,
                 std::span<const double> weights = {});

/// Best of `config.restarts` seeded k-means++ + Lloyd runs, selected by
/// (SSE, restart index).
Clustering fit_kmeans(const CandidateDataset& dataset, const KMeansConfig& config,
                      std::span<const double> weights = {});

/// Sum of weighted squared distances to the assigned centroids.
double sse(const CandidateDataset& dataset, const Clustering& clustering,
           std::span<const double> weights = {});

/// Mean silhouette coefficient. Singleton-cluster members and points with
/// a = b = 0 contribute 0. Requires k >= 2 and no empty cluster.
double silhouette(const CandidateDataset& dataset, const Clustering& clustering,
                  std::span<const double> weights = {});

/// k in [k_min, k_max] with the largest silhouette; ties go to the smaller k.
std::size_t choose_k(const CandidateDataset& dataset, std::size_t k_min, std::size_t k_max,
                     std::uint64_t seed, std::size_t restarts = 10,
                     std::span<const double> weights = {});

namespace detail {
std::vector<double> effective_weights(std::span<const double> weights, std::size_t dim);
Centroids member_means(const CandidateDataset& dataset, std::span<const std::size_t> assignment,
                       std::size_t k, const Centroids& fallback);
double max_movement(const Centroids& a, const Centroids& b);
}  // namespace detail

}  // namespace cbc
