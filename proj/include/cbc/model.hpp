#pragma once

// Core value types shared by every stage of the engine. Everything here is
// immutable after construction and carries no I/O.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cbc {

enum class CatalogTag { KeyFeature, Potential, Iso9126, Custom };

std::string_view to_string(CatalogTag tag);

/// Lowercases, maps runs of non-alphanumerics to '_' and resolves a few known
/// spellings ("Re-Usability", "Pay per Use") onto the canonical feature names.
std::string canonical_attribute_name(std::string_view raw);

/// Catalog membership of a canonical attribute name. Key features win over
/// the other catalogs ("reliability" is both a potential and an ISO 9126
/// attribute; it is tagged Potential).
CatalogTag catalog_of(std::string_view canonical_name);

/// The six key SaaS features, in canonical column order.
const std::vector<std::string>& key_feature_names();

class AttributeSchema {
public:
    AttributeSchema() = default;
    explicit AttributeSchema(std::vector<std::string> names, double scale_min = 1.0,
                             double scale_max = 10.0);

    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }
    double scale_min() const noexcept { return scale_min_; }
    double scale_max() const noexcept { return scale_max_; }
    double midpoint() const noexcept { return 0.5 * (scale_min_ + scale_max_); }
    CatalogTag tag(std::size_t i) const { return tags_.at(i); }
    std::optional<std::size_t> index_of(std::string_view name) const;

    bool in_range(double rating) const noexcept {
        return rating >= scale_min_ && rating <= scale_max_;
    }

    friend bool operator==(const AttributeSchema&, const AttributeSchema&) = default;

private:
    std::vector<std::string> names_;
    std::vector<CatalogTag> tags_;
    double scale_min_ = 1.0;
    double scale_max_ = 10.0;
};

/// Min-max normalization against the declared schema bounds. Throws
/// DomainError naming the attribute when a rating is out of bounds.
std::vector<double> normalize(std::span<const double> ratings, const AttributeSchema& schema);
double normalize_one(double rating, const AttributeSchema& schema);
std::vector<double> denormalize(std::span<const double> unit, const AttributeSchema& schema);

/// Names of the user-constraint fields that may also appear as per-candidate
/// capability columns in a dataset.
const std::vector<std::string>& user_field_names();
bool is_user_field(std::string_view name);

struct Candidate {
    std::string id;
    std::vector<double> ratings;
    double constraints_rating = 0.0;
    /// Aligned with CandidateDataset::capability_columns().
    std::vector<double> capabilities;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

class CandidateDataset {
public:
    CandidateDataset() = default;
    CandidateDataset(AttributeSchema schema, std::vector<Candidate> candidates,
                     std::vector<std::string> capability_columns = {});

    const AttributeSchema& schema() const noexcept { return schema_; }
    const std::vector<Candidate>& candidates() const noexcept { return candidates_; }
    const std::vector<std::string>& capability_columns() const noexcept {
        return capability_columns_;
    }
    std::size_t size() const noexcept { return candidates_.size(); }
    bool empty() const noexcept { return candidates_.empty(); }
    const Candidate& operator[](std::size_t i) const { return candidates_[i]; }

    std::optional<std::size_t> index_of(std::string_view id) const;
    std::optional<std::size_t> capability_index(std::string_view column) const;

    /// Normalized rating rows in dataset order.
    const std::vector<std::vector<double>>& points() const noexcept { return points_; }

    friend bool operator==(const CandidateDataset& a, const CandidateDataset& b) {
        return a.schema_ == b.schema_ && a.candidates_ == b.candidates_ &&
               a.capability_columns_ == b.capability_columns_;
    }

private:
    AttributeSchema schema_;
    std::vector<Candidate> candidates_;
    std::vector<std::string> capability_columns_;
    std::vector<std::vector<double>> points_;
    std::map<std::string, std::size_t, std::less<>> by_id_;
};

enum class BudgetClass { Low, Medium, High };

std::string_view to_string(BudgetClass c);
std::optional<BudgetClass> parse_budget_class(std::string_view s);

/// User requirements for running the service (instances, work, budget,
/// deadline, spot bid).
struct UserConstraintSpec {
    std::int64_t parallel_instances = 0;
    std::int64_t max_instances = 0;
    double total_work = 0.0;                 // hours per month
    double min_workload_per_instance = 0.0;  // hours
    std::optional<double> task_length;       // hours
    double budget_per_instance = 0.0;        // currency units
    std::optional<double> budget_confidence;
    double deadline = 0.0;                   // days
    std::optional<double> deadline_confidence;
    std::optional<double> spot_bid;
    BudgetClass budget_class = BudgetClass::Medium;
    std::optional<double> trial_period;  // days

    /// Numeric value of a field by name; nullopt when absent or non-numeric.
    std::optional<double> value_of(std::string_view field) const;

    /// Throws DomainError when an invariant does not hold.
    void validate() const;

    friend bool operator==(const UserConstraintSpec&, const UserConstraintSpec&) = default;
};

enum class Comparator { Ge, Le, Gt, Lt, Eq };

std::string_view to_string(Comparator op);
std::optional<Comparator> parse_comparator(std::string_view s);
bool compare(double observed, Comparator op, double threshold);
/// The relation that holds when `op` fails, e.g. ">=" -> "<".
std::string_view negated(Comparator op);

/// Direction a candidate capability must satisfy against the user's value:
/// costs and durations use <=, capacities use >=.
Comparator capability_direction(std::string_view field);

/// Name used by rules that target the aggregate constraints rating.
inline constexpr std::string_view kConstraintsAttribute = "constraints";

/// "At least `min_count` candidates with attribute op threshold". When
/// `per_candidate` is set the predicate also gates each candidate's
/// feasibility.
struct ExistentialRule {
    std::string attribute;
    Comparator op = Comparator::Ge;
    double threshold = 0.0;
    std::int64_t min_count = 0;
    bool per_candidate = false;

    std::string describe() const;

    friend bool operator==(const ExistentialRule&, const ExistentialRule&) = default;
};

/// Unordered id pair, stored with first <= second.
using IdPair = std::pair<std::string, std::string>;
IdPair make_pair_unordered(std::string a, std::string b);

struct ConstraintSpec {
    std::vector<IdPair> must_link;    // sorted, unique
    std::vector<IdPair> cannot_link;  // sorted, unique
    std::optional<std::map<std::string, double>> distance_weights;
    std::optional<std::int64_t> k;
    std::optional<std::int64_t> min_cluster_size;
    std::optional<std::int64_t> max_cluster_size;
    std::vector<ExistentialRule> existential;
    double feasibility_threshold = 5.5;
    std::optional<UserConstraintSpec> user_spec;

    bool has_link_constraints() const noexcept {
        return !must_link.empty() || !cannot_link.empty();
    }
    bool has_assignment_constraints() const noexcept {
        return has_link_constraints() || min_cluster_size || max_cluster_size;
    }

    /// Throws DomainError when a dataset-independent invariant does not hold.
    void validate() const;

    friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

/// Per-attribute weights resolved against a schema. Attributes missing from
/// the map get weight 0; at least one weight must be positive.
std::vector<double> resolve_weights(const std::map<std::string, double>& by_name,
                                    const AttributeSchema& schema);
std::vector<double> unit_weights(const AttributeSchema& schema);

double weighted_sq_distance(std::span<const double> a, std::span<const double> b,
                            std::span<const double> weights);

struct Clustering {
    std::size_t k = 0;
    std::vector<std::string> ids;          // dataset order
    std::vector<std::size_t> assignment;   // aligned with ids
    std::vector<std::vector<double>> centroids;
    double sse = 0.0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    /// SSE after each iteration; the last entry equals `sse`.
    std::vector<double> sse_trace;

    std::size_t cluster_of(std::string_view id) const;
    std::vector<std::vector<std::size_t>> members() const;

    friend bool operator==(const Clustering&, const Clustering&) = default;
};

/// Canonical relabeling of an assignment: labels renumbered by first
/// occurrence. Equal signatures mean equal partitions as sets.
std::vector<std::size_t> partition_signature(std::span<const std::size_t> assignment);

struct Violation {
    std::string rule;
    double observed = 0.0;
    double required = 0.0;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct MicroCluster {
    std::size_t parent = 0;
    bool feasible = true;
    std::vector<std::string> members;

    friend bool operator==(const MicroCluster&, const MicroCluster&) = default;
};

struct MicroClustering {
    Clustering parent;
    std::vector<MicroCluster> micro_clusters;
    std::map<std::string, std::vector<Violation>> violations;

    friend bool operator==(const MicroClustering&, const MicroClustering&) = default;
};

enum class CauseKind {
    SizeArithmetic,
    LinkConflict,
    ClusterPacking,
    ExistentialUnsatisfiable,
    EmptyFeasibleSet,
};

std::string_view to_string(CauseKind kind);

struct DeadlockCause {
    CauseKind kind = CauseKind::SizeArithmetic;
    std::string stage;   // "bind" or "post-refinement"
    std::string detail;
    std::vector<std::string> ids;        // witnessing candidates / component
    std::vector<std::string> path;       // must-link path for link conflicts
    std::optional<IdPair> cannot_pair;   // the violated cannot-link pair
    std::vector<double> numbers;         // witnessing arithmetic

    friend bool operator==(const DeadlockCause&, const DeadlockCause&) = default;
};

struct DeadlockReport {
    std::vector<DeadlockCause> causes;
    std::vector<std::string> warnings;

    bool deadlocked() const noexcept { return !causes.empty(); }

    friend bool operator==(const DeadlockReport&, const DeadlockReport&) = default;
};

}  // namespace cbc
