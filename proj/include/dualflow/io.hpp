#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "dualflow/analysis.hpp"

namespace dualflow {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, std::string_view content);

nlohmann::json report_to_json(const DiagnosticsReport& report, const nlohmann::json& scenario);

}  // namespace dualflow
