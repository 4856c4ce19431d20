#pragma once

// JSON renderings of engine results. Doubles are rounded to 12 significant
// digits so reports diff cleanly across platforms.

#include <string>
#include <string_view>

#include "json.hpp"

#include "cbc/evaluate.hpp"
#include "cbc/model.hpp"
#include "cbc/pipeline.hpp"

namespace cbc {

using ojson = nlohmann::ordered_json;

double round_significant(double value, int digits = 12);

std::string sha256_hex(std::string_view bytes);
std::string dataset_digest(const CandidateDataset& dataset);
std::string config_digest(const ConstraintSpec& spec, const CBCConfig& config);

/// Current UTC time as RFC 3339, or SOURCE_DATE_EPOCH when that is set.
std::string rfc3339_utc_now();

ojson clustering_to_json(const Clustering& clustering);
ojson deadlock_to_json(const DeadlockReport& report);
ojson violations_to_json(const std::vector<Violation>& violations);

/// Full evaluation report. `meta.determinism_digest` hashes the report with
/// the timestamp removed, so two runs on identical inputs agree on it.
ojson report_to_json(const EvaluationReport& report, const std::string& timestamp);

/// Report without its timestamp, the basis of the determinism digest.
ojson strip_timestamp(ojson report);

std::string render(const ojson& doc);

}  // namespace cbc
