#include "dualflow/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace dualflow {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_atomically(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::filesystem::filesystem_error("cannot open for writing", tmp, std::make_error_code(std::errc::io_error));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::filesystem::filesystem_error("write failed", tmp, std::make_error_code(std::errc::io_error));
  }
  std::filesystem::rename(tmp, path);
}

nlohmann::json report_to_json(const DiagnosticsReport& report, const nlohmann::json& scenario) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& r : report.checks) {
    checks.push_back({{"name", r.name}, {"t", r.t}, {"value", r.value}, {"bound", r.bound}, {"tol", r.tol}, {"pass", r.pass}});
  }
  return {{"checks", checks}, {"scenario", scenario}};
}

}  // namespace dualflow
