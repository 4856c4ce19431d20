#include "cbc/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cbc/error.hpp"

namespace cbc {

using json = nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto end = line.find(',', start);
        if (end == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, end - start)));
        start = end + 1;
    }
    return cells;
}

std::optional<double> parse_number(std::string_view cell) {
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

bool valid_id(std::string_view id) {
    return !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

enum class ColumnRole { Attribute, Capability, Constraints };

}  // namespace

CandidateDataset parse_dataset(std::string_view csv_text, double scale_min, double scale_max) {
    const auto lines = split_lines(csv_text);
    if (lines.empty()) throw ParseError("header", "missing header row");

    const auto header = split_cells(lines.front());
    if (const auto first = canonical_attribute_name(header.front()); first != "id" && first != "tid")
        throw ParseError("header", "first column must be 'id'");

    std::vector<ColumnRole> roles;
    std::vector<std::string> column_names;
    std::vector<std::string> attributes;
    std::vector<std::string> capabilities;
    std::set<std::string> seen{"id"};
    bool has_constraints = false;
    for (std::size_t c = 1; c < header.size(); ++c) {
        auto name = canonical_attribute_name(header[c]);
        if (name.empty()) throw ParseError("header, column " + std::to_string(c + 1), "empty column name");
        if (!seen.insert(name).second) throw ParseError("header, column " + name, "duplicate column");
        column_names.push_back(name);
        if (name == kConstraintsAttribute) {
            roles.push_back(ColumnRole::Constraints);
            has_constraints = true;
        } else if (is_user_field(name)) {
            roles.push_back(ColumnRole::Capability);
            capabilities.push_back(name);
        } else {
            roles.push_back(ColumnRole::Attribute);
            attributes.push_back(name);
        }
    }
    if (!has_constraints) throw ParseError("header", "missing 'constraints' column");

    AttributeSchema schema = [&] {
        try {
            return AttributeSchema(attributes, scale_min, scale_max);
        } catch (const DomainError& e) {
            throw ParseError("header", e.what());
        }
    }();

    std::vector<Candidate> candidates;
    std::set<std::string, std::less<>> ids;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::string line_loc = "line " + std::to_string(li + 1);
        if (trim(lines[li]).empty()) throw ParseError(line_loc, "empty row");
        const auto cells = split_cells(lines[li]);
        if (!valid_id(cells.front()))
            throw ParseError(line_loc, "invalid id '" + std::string(cells.front()) + "'");
        Candidate cand;
        cand.id = std::string(cells.front());
        const std::string row_loc = "row " + cand.id;
        if (cells.size() != header.size())
            throw ParseError(row_loc, "expected " + std::to_string(header.size()) + " cells, found " +
                                          std::to_string(cells.size()));
        if (!ids.insert(cand.id).second) throw ParseError(row_loc, "duplicate id");

        for (std::size_t c = 1; c < cells.size(); ++c) {
            const auto& col = column_names[c - 1];
            const std::string loc = row_loc + ", column " + col;
            auto value = parse_number(cells[c]);
            if (!value) throw ParseError(loc, "non-numeric value '" + std::string(cells[c]) + "'");
            switch (roles[c - 1]) {
                case ColumnRole::Attribute:
                case ColumnRole::Constraints:
                    if (!schema.in_range(*value)) throw ParseError(loc, "out of range");
                    if (roles[c - 1] == ColumnRole::Constraints)
                        cand.constraints_rating = *value;
                    else
                        cand.ratings.push_back(*value);
                    break;
                case ColumnRole::Capability:
                    if (*value < 0) throw ParseError(loc, "must be nonnegative");
                    cand.capabilities.push_back(*value);
                    break;
            }
        }
        candidates.push_back(std::move(cand));
    }
    return CandidateDataset(std::move(schema), std::move(candidates), std::move(capabilities));
}

std::string serialize_dataset(const CandidateDataset& dataset) {
    std::ostringstream out;
    out << "id";
    for (const auto& n : dataset.schema().names()) out << ',' << n;
    for (const auto& n : dataset.capability_columns()) out << ',' << n;
    out << ',' << kConstraintsAttribute << '\n';
    for (const auto& c : dataset.candidates()) {
        out << c.id;
        for (double r : c.ratings) out << ',' << format_number(r);
        for (double v : c.capabilities) out << ',' << format_number(v);
        out << ',' << format_number(c.constraints_rating) << '\n';
    }
    return out.str();
}

namespace {

std::int64_t get_count(const json& v, const std::string& loc) {
    if (!v.is_number_integer()) throw ParseError(loc, "expected an integer");
    const auto n = v.get<std::int64_t>();
    if (n < 0) throw ParseError(loc, "must be nonnegative");
    return n;
}

double get_number(const json& v, const std::string& loc) {
    if (!v.is_number()) throw ParseError(loc, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(loc, "expected a finite number");
    return d;
}

double get_nonneg(const json& v, const std::string& loc) {
    const double d = get_number(v, loc);
    if (d < 0) throw ParseError(loc, "must be nonnegative");
    return d;
}

std::vector<IdPair> get_pairs(const json& v, const std::string& key) {
    if (!v.is_array()) throw ParseError(key, "expected an array of id pairs");
    std::vector<IdPair> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto loc = key + "[" + std::to_string(i) + "]";
        const auto& p = v[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
            throw ParseError(loc, "expected a 2-element array of ids");
        out.push_back(make_pair_unordered(p[0].get<std::string>(), p[1].get<std::string>()));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                    const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ParseError(where.empty() ? key : where + "." + key, "unknown field");
    }
}

UserConstraintSpec parse_user_spec(const json& u) {
    if (!u.is_object()) throw ParseError("user_spec", "expected an object");
    reject_unknown(u,
                   {"parallel_instances", "max_instances", "total_work", "min_workload_per_instance",
                    "task_length", "budget_per_instance", "budget_confidence", "deadline",
                    "deadline_confidence", "spot_bid", "budget_class", "trial_period"},
                   "user_spec");
    auto required = [&](const char* key) -> const json& {
        if (!u.contains(key)) throw ParseError(std::string("user_spec.") + key, "missing required field");
        return u.at(key);
    };
    auto optional_number = [&](const char* key) -> std::optional<double> {
        if (!u.contains(key)) return std::nullopt;
        return get_nonneg(u.at(key), std::string("user_spec.") + key);
    };
    UserConstraintSpec s;
    s.parallel_instances = get_count(required("parallel_instances"), "user_spec.parallel_instances");
    s.max_instances = get_count(required("max_instances"), "user_spec.max_instances");
    s.total_work = get_nonneg(required("total_work"), "user_spec.total_work");
    s.min_workload_per_instance =
        get_nonneg(required("min_workload_per_instance"), "user_spec.min_workload_per_instance");
    s.task_length = optional_number("task_length");
    s.budget_per_instance = get_nonneg(required("budget_per_instance"), "user_spec.budget_per_instance");
    s.budget_confidence = optional_number("budget_confidence");
    s.deadline = get_nonneg(required("deadline"), "user_spec.deadline");
    s.deadline_confidence = optional_number("deadline_confidence");
    s.spot_bid = optional_number("spot_bid");
    s.trial_period = optional_number("trial_period");
    const auto& bc = required("budget_class");
    if (!bc.is_string()) throw ParseError("user_spec.budget_class", "expected a string");
    auto cls = parse_budget_class(bc.get<std::string>());
    if (!cls) throw ParseError("user_spec.budget_class", "expected one of low, medium, high");
    s.budget_class = *cls;
    return s;
}

}  // namespace

ConstraintSpec parse_constraint_spec(std::string_view json_text, double scale_min, double scale_max) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError("json", std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) throw ParseError("json", "top level must be an object");
    reject_unknown(root,
                   {"must_link", "cannot_link", "distance_weights", "k", "min_cluster_size",
                    "max_cluster_size", "existential", "feasibility_threshold", "user_spec"},
                   "");

    ConstraintSpec spec;
    spec.feasibility_threshold = 0.5 * (scale_min + scale_max);
    if (root.contains("must_link")) spec.must_link = get_pairs(root["must_link"], "must_link");
    if (root.contains("cannot_link")) spec.cannot_link = get_pairs(root["cannot_link"], "cannot_link");
    if (root.contains("distance_weights")) {
        const auto& w = root["distance_weights"];
        if (!w.is_object()) throw ParseError("distance_weights", "expected an object");
        std::map<std::string, double> weights;
        for (const auto& [name, value] : w.items())
            weights[canonical_attribute_name(name)] = get_nonneg(value, "distance_weights." + name);
        spec.distance_weights = std::move(weights);
    }
    if (root.contains("k")) {
        spec.k = get_count(root["k"], "k");
        if (*spec.k < 1) throw ParseError("k", "must be at least 1");
    }
    if (root.contains("min_cluster_size"))
        spec.min_cluster_size = get_count(root["min_cluster_size"], "min_cluster_size");
    if (root.contains("max_cluster_size"))
        spec.max_cluster_size = get_count(root["max_cluster_size"], "max_cluster_size");
    if (root.contains("existential")) {
        const auto& ex = root["existential"];
        if (!ex.is_array()) throw ParseError("existential", "expected an array");
        for (std::size_t i = 0; i < ex.size(); ++i) {
            const auto loc = "existential[" + std::to_string(i) + "]";
            const auto& r = ex[i];
            if (!r.is_object()) throw ParseError(loc, "expected an object");
            reject_unknown(r, {"attribute", "op", "threshold", "min_count"}, loc);
            for (const char* key : {"attribute", "op", "threshold", "min_count"})
                if (!r.contains(key)) throw ParseError(loc + "." + key, "missing required field");
            if (!r["attribute"].is_string()) throw ParseError(loc + ".attribute", "expected a string");
            if (!r["op"].is_string()) throw ParseError(loc + ".op", "expected a string");
            ExistentialRule rule;
            rule.attribute = canonical_attribute_name(r["attribute"].get<std::string>());
            auto op = parse_comparator(r["op"].get<std::string>());
            if (!op) throw ParseError(loc + ".op", "expected one of >=, <=, >, <, ==");
            rule.op = *op;
            rule.threshold = get_number(r["threshold"], loc + ".threshold");
            rule.min_count = get_count(r["min_count"], loc + ".min_count");
            spec.existential.push_back(std::move(rule));
        }
    }
    if (root.contains("feasibility_threshold"))
        spec.feasibility_threshold = get_number(root["feasibility_threshold"], "feasibility_threshold");
    if (root.contains("user_spec")) spec.user_spec = parse_user_spec(root["user_spec"]);

    try {
        spec.validate();
    } catch (const DomainError& e) {
        throw ParseError("spec", e.what());
    }
    return spec;
}

nlohmann::ordered_json user_spec_to_json(const UserConstraintSpec& u) {
    nlohmann::ordered_json us = nlohmann::ordered_json::object();
    us["parallel_instances"] = u.parallel_instances;
    us["max_instances"] = u.max_instances;
    us["total_work"] = u.total_work;
    us["min_workload_per_instance"] = u.min_workload_per_instance;
    if (u.task_length) us["task_length"] = *u.task_length;
    us["budget_per_instance"] = u.budget_per_instance;
    if (u.budget_confidence) us["budget_confidence"] = *u.budget_confidence;
    us["deadline"] = u.deadline;
    if (u.deadline_confidence) us["deadline_confidence"] = *u.deadline_confidence;
    if (u.spot_bid) us["spot_bid"] = *u.spot_bid;
    us["budget_class"] = std::string(to_string(u.budget_class));
    if (u.trial_period) us["trial_period"] = *u.trial_period;
    return us;
}

nlohmann::ordered_json constraint_spec_to_json(const ConstraintSpec& spec) {
    using ojson = nlohmann::ordered_json;
    ojson out = ojson::object();
    auto pairs = [](const std::vector<IdPair>& v) {
        ojson arr = ojson::array();
        for (const auto& [a, b] : v) arr.push_back({a, b});
        return arr;
    };
    out["must_link"] = pairs(spec.must_link);
    out["cannot_link"] = pairs(spec.cannot_link);
    if (spec.distance_weights) {
        ojson w = ojson::object();
        for (const auto& [name, value] : *spec.distance_weights) w[name] = value;
        out["distance_weights"] = w;
    }
    if (spec.k) out["k"] = *spec.k;
    if (spec.min_cluster_size) out["min_cluster_size"] = *spec.min_cluster_size;
    if (spec.max_cluster_size) out["max_cluster_size"] = *spec.max_cluster_size;
    ojson ex = ojson::array();
    for (const auto& r : spec.existential)
        ex.push_back({{"attribute", r.attribute},
                      {"op", std::string(to_string(r.op))},
                      {"threshold", r.threshold},
                      {"min_count", r.min_count}});
    out["existential"] = ex;
    out["feasibility_threshold"] = spec.feasibility_threshold;
    if (spec.user_spec) out["user_spec"] = user_spec_to_json(*spec.user_spec);
    return out;
}

ValidationReport bind_and_validate(const CandidateDataset& dataset, const ConstraintSpec& spec) {
    ValidationReport report;
    auto check_pairs = [&](const std::vector<IdPair>& pairs, const char* key) {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto loc = std::string(key) + "[" + std::to_string(i) + "]";
            for (const auto* id : {&pairs[i].first, &pairs[i].second})
                if (!dataset.index_of(*id)) report.errors.push_back({loc, "unknown id " + *id});
        }
    };
    check_pairs(spec.must_link, "must_link");
    check_pairs(spec.cannot_link, "cannot_link");

    for (std::size_t i = 0; i < spec.existential.size(); ++i) {
        const auto& attr = spec.existential[i].attribute;
        if (attr != kConstraintsAttribute && !dataset.schema().index_of(attr) &&
            !dataset.capability_index(attr))
            report.errors.push_back(
                {"existential[" + std::to_string(i) + "]", "unknown attribute " + attr});
    }
    if (spec.distance_weights) {
        for (const auto& [name, _] : *spec.distance_weights)
            if (!dataset.schema().index_of(name))
                report.errors.push_back({"distance_weights." + name, "unknown attribute " + name});
    }
    if (spec.k && static_cast<std::size_t>(*spec.k) > dataset.size())
        report.errors.push_back({"k", "k exceeds candidate count"});
    if (!dataset.schema().in_range(spec.feasibility_threshold))
        report.errors.push_back({"feasibility_threshold", "threshold outside the rating scale"});
    if (spec.user_spec && spec.user_spec->spot_bid && !dataset.capability_index("spot_bid"))
        report.warnings.push_back(
            {"user_spec.spot_bid", "stored but unused: no spot_bid column in the dataset"});
    return report;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot read file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace cbc
