#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lob/assumptions.hpp"
#include "lob/cli/config.hpp"
#include "lob/drift.hpp"
#include "lob/scaling.hpp"
#include "lob/shape.hpp"
#include "lob/simulation.hpp"

namespace lob::cli {

/// Tool, version, schema, config hash and seed; embedded in every artifact.
nlohmann::json artifact_header(const RunConfig& config, const std::string& command);
/// The same information as "# key: value" lines for CSV files.
std::string csv_header_comment(const RunConfig& config, const std::string& command);

/// Prefixes every line with "# ".
std::string comment_block(const std::string& text);

nlohmann::json to_json(const ConstraintReport& r);
nlohmann::json to_json(const PathSummary& p, double tick);
nlohmann::json to_json(const DriftCertificate& c);
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const Sigma2Estimate& s);
nlohmann::json to_json(const ScalingReport& r);
nlohmann::json to_json(const ShapeStatistics& s);
nlohmann::json book_json(const OrderBookState& q);

/// RFC 4180 quoting: fields containing a comma, quote or line break are quoted.
std::string csv_field(const std::string& s);
std::string csv_number(double x);

/// Writes `doc` with a trailing newline; creates parent directories.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace lob::cli
