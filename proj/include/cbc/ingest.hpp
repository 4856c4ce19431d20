#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cbc/model.hpp"

namespace cbc {

struct ValidationIssue {
    std::string locator;
    std::string message;

    friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

struct ValidationReport {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;

    bool accepted() const noexcept { return errors.empty(); }
};

/// Parses a dataset CSV: header row, first column `id`, a `constraints`
/// column (any case) for the aggregate constraints rating, columns named
/// after user-constraint fields as capabilities, everything else as rated
/// attributes in header order. Throws ParseError with a row/column locator.
CandidateDataset parse_dataset(std::string_view csv_text, double scale_min = 1.0,
                               double scale_max = 10.0);

/// Inverse of parse_dataset for accepted inputs (canonical column names,
/// shortest round-trip numbers, LF line endings).
std::string serialize_dataset(const CandidateDataset& dataset);

/// Parses a ConstraintSpec JSON object. Unknown keys are rejected; the
/// feasibility threshold defaults to the midpoint of [scale_min, scale_max].
/// Unknown candidate ids are left for bind_and_validate.
ConstraintSpec parse_constraint_spec(std::string_view json_text, double scale_min = 1.0,
                                     double scale_max = 10.0);

nlohmann::ordered_json constraint_spec_to_json(const ConstraintSpec& spec);
nlohmann::ordered_json user_spec_to_json(const UserConstraintSpec& user);

/// Cross-checks a spec against a dataset and lists every failure.
ValidationReport bind_and_validate(const CandidateDataset& dataset, const ConstraintSpec& spec);

std::string read_text_file(const std::string& path);

}  // namespace cbc
