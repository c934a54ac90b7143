#pragma once

#include "stylo/corpus.hpp"
#include "stylo/features.hpp"
#include "stylo/intertext.hpp"
#include "stylo/ocsvm.hpp"

#include <json.hpp>

#include <string>

namespace stylo {

using json = nlohmann::json;

/// Shortest round-trip decimal; infinities print as "inf" / "-inf".
std::string format_double(double value);

/// Finite values as JSON numbers, non-finite ones as the strings "inf",
/// "-inf" or "nan".
json json_number(double value);
double number_from_json(const json& j);

json to_json(const FeatureSpace& space);
FeatureSpace feature_space_from_json(const json& j);

json to_json(const FeatureVector& v);
FeatureVector feature_vector_from_json(const json& j);

/// {nu, gamma, rho, l, support_vectors, alphas, space_id}
json to_json(const OcsvmModel& model);
OcsvmModel ocsvm_from_json(const json& j);

json to_json(const SamplingPlan& plan);
json to_json(const ScanReport& report);
json to_json(const DocCompareReport& report);

/// Columns offset,distance,excerpt with a header row.
std::string scan_report_csv(const ScanReport& report);

/// One row per hit: query_length,source_offset,query_excerpt,offset,distance,excerpt.
/// Queries without hits contribute one row with empty hit columns.
std::string doc_compare_csv(const DocCompareReport& report);

/// Quotes a CSV field when it contains a delimiter, quote or newline.
std::string csv_field(std::string_view field);

} // namespace stylo
