#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace qp {

inline constexpr const char* kToolName = "qplateau";
inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a over the canonical dump of the configuration, as a hex string.
std::string config_hash(const nlohmann::json& config);

// Common report envelope: tool, version, command, seed, mesh level and the
// hash of the configuration that produced it. Reruns with identical inputs
// produce byte-identical files.
nlohmann::json report_envelope(const std::string& command, std::uint64_t seed, int mesh_level,
                               const nlohmann::json& config);

void write_text_file(const std::string& path, const std::string& content);

// Simple fixed-size SVG line chart of columns over a shared abscissa.
std::string svg_line_chart(const std::string& title, const std::vector<double>& x,
                           const std::vector<std::pair<std::string, std::vector<double>>>& series);

std::string csv_table(const std::vector<std::string>& headers,
                      const std::vector<std::vector<double>>& columns);

}  // namespace qp
