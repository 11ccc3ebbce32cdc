#pragma once

#include "phyp/boundary.hpp"
#include "phyp/diagnostics.hpp"
#include "phyp/ivp_solver.hpp"
#include "phyp/periodic_solver.hpp"
#include "phyp/system_model.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace phyp {

using Json = nlohmann::ordered_json;

enum class ReportFormat { csv, json };

void to_json(Json& j, const FieldNorms& r);
void from_json(const Json& j, FieldNorms& r);
void to_json(Json& j, const Certificate& r);
void from_json(const Json& j, Certificate& r);
void to_json(Json& j, const RegularityReport& r);
void from_json(const Json& j, RegularityReport& r);
void to_json(Json& j, const RateFit& r);
void from_json(const Json& j, RateFit& r);
void to_json(Json& j, const ValidationReport& r);
void from_json(const Json& j, ValidationReport& r);
void to_json(Json& j, const IterationReport& r);
void to_json(Json& j, const StabilityReport& r);

std::string rate_status_name(RateFit::Status s);

/// Writes `text` to `path`, creating parent directories; IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

/// CSV: "iteration,delta". JSON: the full record.
void emit_report(const IterationReport& r, ReportFormat format, const std::filesystem::path& dest);

/// CSV: "t,phi,dphi" plus a JSON sidecar (same stem, .json) holding the fitted rates.
void emit_report(const StabilityReport& r, ReportFormat format, const std::filesystem::path& dest);

void emit_report(const ValidationReport& r, const std::filesystem::path& dest);
void emit_report(const Certificate& r, const std::filesystem::path& dest);
void emit_report(const RegularityReport& r, const std::filesystem::path& dest);
void emit_report(const FieldNorms& r, const std::filesystem::path& dest);

/// Snapshot of a field as CSV with columns t,x,u1..un.
void emit_field(const Field& field, const std::filesystem::path& dest);

/// Real number with 17 significant digits.
std::string format_real(double v);

} // namespace phyp
