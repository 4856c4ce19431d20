#include "cbc/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "cbc/error.hpp"

namespace cbc {

namespace {

const std::vector<std::string> kKeyFeatures = {
    "reusability", "customizability", "scalability", "availability", "data_management", "pay_per_use",
};

const std::vector<std::string> kPotential = {
    "adaptability", "reliability", "task_productivity", "price", "back_end_integration", "longevity",
    "ecosystem",
};

const std::vector<std::string> kIso9126 = {
    "functionality", "reliability", "usability", "efficiency", "maintainability", "portability",
};

const std::vector<std::string> kUserFields = {
    "parallel_instances", "max_instances",     "total_work", "min_workload_per_instance",
    "task_length",        "budget_per_instance", "budget_confidence", "deadline",
    "deadline_confidence", "spot_bid",         "trial_period",
};

std::string squash(std::string_view s) {
    std::string out;
    for (char c : s)
        if (c != '_') out.push_back(c);
    return out;
}

bool contains(const std::vector<std::string>& v, std::string_view s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

std::string_view to_string(CatalogTag tag) {
    switch (tag) {
        case CatalogTag::KeyFeature: return "key-feature";
        case CatalogTag::Potential: return "potential";
        case CatalogTag::Iso9126: return "iso9126";
        case CatalogTag::Custom: return "custom";
    }
    return "custom";
}

std::string canonical_attribute_name(std::string_view raw) {
    std::string out;
    bool pending_sep = false;
    for (unsigned char c : raw) {
        if (std::isalnum(c)) {
            if (pending_sep && !out.empty()) out.push_back('_');
            pending_sep = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_sep = true;
        }
    }
    // Typographically split headers ("Re Us abi lit y") collapse onto a known
    // name once separators are ignored.
    const std::string flat = squash(out);
    for (const auto* catalog : {&kKeyFeatures, &kPotential, &kIso9126, &kUserFields}) {
        for (const auto& name : *catalog)
            if (squash(name) == flat) return name;
    }
    if (flat == "constraints") return "constraints";
    if (flat == "customisability") return "customizability";
    if (flat == "datamanagedbyprovider") return "data_management";
    return out;
}

CatalogTag catalog_of(std::string_view name) {
    if (contains(kKeyFeatures, name)) return CatalogTag::KeyFeature;
    if (contains(kPotential, name)) return CatalogTag::Potential;
    if (contains(kIso9126, name)) return CatalogTag::Iso9126;
    return CatalogTag::Custom;
}

const std::vector<std::string>& key_feature_names() { return kKeyFeatures; }
const std::vector<std::string>& user_field_names() { return kUserFields; }
bool is_user_field(std::string_view name) { return contains(kUserFields, name); }

AttributeSchema::AttributeSchema(std::vector<std::string> names, double scale_min, double scale_max)
    : names_(std::move(names)), scale_min_(scale_min), scale_max_(scale_max) {
    if (!std::isfinite(scale_min_) || !std::isfinite(scale_max_) || !(scale_min_ < scale_max_))
        throw DomainError("schema scale_min must be below scale_max");
    std::set<std::string_view> seen;
    tags_.reserve(names_.size());
    for (const auto& n : names_) {
        if (n.empty()) throw DomainError("attribute names must be non-empty");
        if (!seen.insert(n).second) throw DomainError("duplicate attribute name: " + n);
        tags_.push_back(catalog_of(n));
    }
}

std::optional<std::size_t> AttributeSchema::index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

double normalize_one(double rating, const AttributeSchema& schema) {
    return (rating - schema.scale_min()) / (schema.scale_max() - schema.scale_min());
}

std::vector<double> normalize(std::span<const double> ratings, const AttributeSchema& schema) {
    if (ratings.size() != schema.size())
        throw DomainError("rating vector has " + std::to_string(ratings.size()) +
                          " entries, schema has " + std::to_string(schema.size()));
    std::vector<double> out(ratings.size());
    for (std::size_t i = 0; i < ratings.size(); ++i) {
        if (!schema.in_range(ratings[i])) {
            std::ostringstream msg;
            msg << "attribute " << schema.names()[i] << ": rating " << ratings[i]
                << " outside [" << schema.scale_min() << ", " << schema.scale_max() << "]";
            throw DomainError(msg.str());
        }
        out[i] = normalize_one(ratings[i], schema);
    }
    return out;
}

std::vector<double> denormalize(std::span<const double> unit, const AttributeSchema& schema) {
    std::vector<double> out(unit.size());
    const double span = schema.scale_max() - schema.scale_min();
    for (std::size_t i = 0; i < unit.size(); ++i) out[i] = schema.scale_min() + unit[i] * span;
    return out;
}

CandidateDataset::CandidateDataset(AttributeSchema schema, std::vector<Candidate> candidates,
                                   std::vector<std::string> capability_columns)
    : schema_(std::move(schema)),
      candidates_(std::move(candidates)),
      capability_columns_(std::move(capability_columns)) {
    points_.reserve(candidates_.size());
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
        const auto& c = candidates_[i];
        if (c.id.empty()) throw DomainError("candidate id must be non-empty");
        if (!by_id_.emplace(c.id, i).second) throw DomainError("duplicate candidate id " + c.id);
        if (!schema_.in_range(c.constraints_rating))
            throw DomainError("candidate " + c.id + ": constraints rating out of range");
        if (c.capabilities.size() != capability_columns_.size())
            throw DomainError("candidate " + c.id + ": capability count mismatch");
        points_.push_back(normalize(c.ratings, schema_));
    }
}

std::optional<std::size_t> CandidateDataset::index_of(std::string_view id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> CandidateDataset::capability_index(std::string_view column) const {
    auto it = std::find(capability_columns_.begin(), capability_columns_.end(), column);
    if (it == capability_columns_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - capability_columns_.begin());
}

std::string_view to_string(BudgetClass c) {
    switch (c) {
        case BudgetClass::Low: return "low";
        case BudgetClass::Medium: return "medium";
        case BudgetClass::High: return "high";
    }
    return "medium";
}

std::optional<BudgetClass> parse_budget_class(std::string_view s) {
    if (s == "low") return BudgetClass::Low;
    if (s == "medium") return BudgetClass::Medium;
    if (s == "high") return BudgetClass::High;
    return std::nullopt;
}

std::optional<double> UserConstraintSpec::value_of(std::string_view field) const {
    if (field == "parallel_instances") return static_cast<double>(parallel_instances);
    if (field == "max_instances") return static_cast<double>(max_instances);
    if (field == "total_work") return total_work;
    if (field == "min_workload_per_instance") return min_workload_per_instance;
    if (field == "task_length") return task_length;
    if (field == "budget_per_instance") return budget_per_instance;
    if (field == "budget_confidence") return budget_confidence;
    if (field == "deadline") return deadline;
    if (field == "deadline_confidence") return deadline_confidence;
    if (field == "spot_bid") return spot_bid;
    if (field == "trial_period") return trial_period;
    return std::nullopt;
}

void UserConstraintSpec::validate() const {
    if (parallel_instances < 0 || max_instances < 0)
        throw DomainError("user_spec: instance counts must be nonnegative");
    if (parallel_instances > max_instances)
        throw DomainError("user_spec: parallel_instances exceeds max_instances");
    for (const auto& field : kUserFields) {
        auto v = value_of(field);
        if (!v) continue;
        if (!std::isfinite(*v) || *v < 0) throw DomainError("user_spec." + field + " must be nonnegative");
    }
    for (const auto& f : {budget_confidence, deadline_confidence})
        if (f && *f > 1.0) throw DomainError("user_spec: confidence must lie in [0, 1]");
}

std::string_view to_string(Comparator op) {
    switch (op) {
        case Comparator::Ge: return ">=";
        case Comparator::Le: return "<=";
        case Comparator::Gt: return ">";
        case Comparator::Lt: return "<";
        case Comparator::Eq: return "==";
    }
    return "==";
}

std::optional<Comparator> parse_comparator(std::string_view s) {
    if (s == ">=") return Comparator::Ge;
    if (s == "<=") return Comparator::Le;
    if (s == ">") return Comparator::Gt;
    if (s == "<") return Comparator::Lt;
    if (s == "==") return Comparator::Eq;
    return std::nullopt;
}

bool compare(double observed, Comparator op, double threshold) {
    switch (op) {
        case Comparator::Ge: return observed >= threshold;
        case Comparator::Le: return observed <= threshold;
        case Comparator::Gt: return observed > threshold;
        case Comparator::Lt: return observed < threshold;
        case Comparator::Eq: return observed == threshold;
    }
    return false;
}

std::string_view negated(Comparator op) {
    switch (op) {
        case Comparator::Ge: return "<";
        case Comparator::Le: return ">";
        case Comparator::Gt: return "<=";
        case Comparator::Lt: return ">=";
        case Comparator::Eq: return "!=";
    }
    return "!=";
}

Comparator capability_direction(std::string_view field) {
    if (field == "budget_per_instance" || field == "spot_bid" || field == "task_length" ||
        field == "deadline")
        return Comparator::Le;
    return Comparator::Ge;
}

std::string ExistentialRule::describe() const {
    std::ostringstream out;
    out << "at least " << min_count << " with " << attribute << ' ' << to_string(op) << ' '
        << threshold;
    return out.str();
}

IdPair make_pair_unordered(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
}

void ConstraintSpec::validate() const {
    for (const auto& p : cannot_link) {
        if (p.first == p.second) throw DomainError("cannot_link pair with identical ids " + p.first);
        if (std::binary_search(must_link.begin(), must_link.end(), p))
            throw DomainError("pair (" + p.first + ", " + p.second +
                              ") appears in both must_link and cannot_link");
    }
    if (k && *k < 1) throw DomainError("k must be at least 1");
    if (min_cluster_size && *min_cluster_size < 0)
        throw DomainError("min_cluster_size must be nonnegative");
    if (max_cluster_size && *max_cluster_size < 0)
        throw DomainError("max_cluster_size must be nonnegative");
    if (min_cluster_size && max_cluster_size && *min_cluster_size > *max_cluster_size)
        throw DomainError("min_cluster_size exceeds max_cluster_size");
    if (distance_weights) {
        bool any_positive = false;
        for (const auto& [name, w] : *distance_weights) {
            if (!std::isfinite(w) || w < 0) throw DomainError("distance weight for " + name + " is negative");
            any_positive = any_positive || w > 0;
        }
        if (!any_positive) throw DomainError("distance_weights needs at least one positive weight");
    }
    for (const auto& r : existential)
        if (r.min_count < 0) throw DomainError("existential min_count must be nonnegative");
    if (!std::isfinite(feasibility_threshold)) throw DomainError("feasibility_threshold must be finite");
    if (user_spec) user_spec->validate();
}

std::vector<double> resolve_weights(const std::map<std::string, double>& by_name,
                                    const AttributeSchema& schema) {
    std::vector<double> w(schema.size(), 0.0);
    for (const auto& [name, value] : by_name) {
        auto idx = schema.index_of(name);
        if (!idx) throw DomainError("weight for unknown attribute " + name);
        if (!std::isfinite(value) || value < 0) throw DomainError("weight for " + name + " is negative");
        w[*idx] = value;
    }
    if (std::none_of(w.begin(), w.end(), [](double x) { return x > 0; }))
        throw DomainError("at least one weight must be positive");
    return w;
}

std::vector<double> unit_weights(const AttributeSchema& schema) {
    return std::vector<double>(schema.size(), 1.0);
}

double weighted_sq_distance(std::span<const double> a, std::span<const double> b,
                            std::span<const double> weights) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += weights[i] * d * d;
    }
    return acc;
}

std::size_t Clustering::cluster_of(std::string_view id) const {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) throw DomainError("unknown id " + std::string(id));
    return assignment[static_cast<std::size_t>(it - ids.begin())];
}

std::vector<std::vector<std::size_t>> Clustering::members() const {
    std::vector<std::vector<std::size_t>> out(k);
    for (std::size_t i = 0; i < assignment.size(); ++i) out[assignment[i]].push_back(i);
    return out;
}

std::vector<std::size_t> partition_signature(std::span<const std::size_t> assignment) {
    std::map<std::size_t, std::size_t> relabel;
    std::vector<std::size_t> out;
    out.reserve(assignment.size());
    for (auto label : assignment) {
        auto [it, inserted] = relabel.emplace(label, relabel.size());
        out.push_back(it->second);
    }
    return out;
}

std::string_view to_string(CauseKind kind) {
    switch (kind) {
        case CauseKind::SizeArithmetic: return "size-arithmetic";
        case CauseKind::LinkConflict: return "link-conflict";
        case CauseKind::ClusterPacking: return "cluster-packing";
        case CauseKind::ExistentialUnsatisfiable: return "existential-unsatisfiable";
        case CauseKind::EmptyFeasibleSet: return "empty-feasible-set";
    }
    return "size-arithmetic";
}

}  // namespace cbc
