#pragma once

#include <string>
#include <vector>

#include "cv32rt/scenario.hpp"

namespace cv32rt {

enum class ReportFormat { Csv, Markdown };

// Rows in the given order; callers sort for stable output. Columns: scenario,
// controller, abi, metric, cycles, breakdown (phase=cycles joined by ';').
std::string emit_report(const std::vector<ScenarioReport>& reports, ReportFormat format);
std::string format_breakdown(const std::vector<Phase>& phases);

} // namespace cv32rt
