#pragma once
// Shared fixtures for the unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cbc/ingest.hpp"
#include "cbc/model.hpp"

namespace cbc::testing {

inline std::string data_path(const std::string& name) { return std::string(CBC_TEST_DATA_DIR) + "/" + name; }

inline const CandidateDataset& table1() {
    static const CandidateDataset ds = parse_dataset(read_text_file(data_path("table1.csv")));
    return ds;
}

inline ConstraintSpec fixture_spec() { return parse_constraint_spec(read_text_file(data_path("fixture_spec.json"))); }

/// Candidates "C0", "C1", ... with integer ratings on [1,10].
inline CandidateDataset make_dataset(const std::vector<std::vector<double>>& rows,
                                     const std::vector<double>& constraints = {}) {
    const auto dim = rows.empty() ? 1 : rows.front().size();
    std::vector<std::string> names;
    for (std::size_t a = 0; a < dim; ++a) names.push_back("f" + std::to_string(a));
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < rows.size(); ++i)
        cands.push_back({"C" + std::to_string(i), rows[i], constraints.empty() ? 10.0 : constraints[i], {}});
    return CandidateDataset(AttributeSchema(names), std::move(cands));
}

inline CandidateDataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
    std::uniform_int_distribution<int> rating(1, 10);
    std::vector<std::vector<double>> rows(n, std::vector<double>(dim));
    std::vector<double> constraints(n);
    for (auto& r : rows)
        for (auto& v : r) v = rating(rng);
    for (auto& c : constraints) c = rating(rng);
    return make_dataset(rows, constraints);
}

struct RandomSpecOptions {
    double link_density = 0.15;
    bool sizes = true;
    bool existential = true;
    bool threshold = true;
};

/// Random link, size, existential and threshold constraints over `ds`.
/// Pairs never appear in both link lists.
inline ConstraintSpec random_spec(std::mt19937_64& rng, const CandidateDataset& ds, std::size_t k,
                                  const RandomSpecOptions& opt = {}) {
    ConstraintSpec spec;
    const auto n = ds.size();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = u(rng);
            auto pair = make_pair_unordered(ds[i].id, ds[j].id);
            if (r < opt.link_density / 2)
                spec.must_link.push_back(pair);
            else if (r < opt.link_density)
                spec.cannot_link.push_back(pair);
        }
    }
    std::sort(spec.must_link.begin(), spec.must_link.end());
    std::sort(spec.cannot_link.begin(), spec.cannot_link.end());
    if (opt.sizes) {
        std::uniform_int_distribution<std::int64_t> size(0, static_cast<std::int64_t>(n));
        if (u(rng) < 0.4) spec.min_cluster_size = size(rng) / 2;
        if (u(rng) < 0.4) spec.max_cluster_size = std::max<std::int64_t>(1, size(rng));
        if (spec.min_cluster_size && spec.max_cluster_size && *spec.min_cluster_size > *spec.max_cluster_size)
            std::swap(*spec.min_cluster_size, *spec.max_cluster_size);
    }
    if (opt.existential && u(rng) < 0.3) {
        const auto& names = ds.schema().names();
        ExistentialRule rule;
        rule.attribute = names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)];
        rule.op = u(rng) < 0.5 ? Comparator::Ge : Comparator::Le;
        rule.threshold = std::uniform_int_distribution<int>(1, 10)(rng);
        rule.min_count = std::uniform_int_distribution<std::int64_t>(1, static_cast<std::int64_t>(n))(rng);
        spec.existential.push_back(rule);
    }
    spec.feasibility_threshold = opt.threshold && u(rng) < 0.2 ? 10.0 : 1.0;
    spec.k = static_cast<std::int64_t>(k);
    return spec;
}

}  // namespace cbc::testing
