#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustnav/scenario.hpp"

namespace trustnav {

/// Header for a trace with the given pedestrian count; the column set and
/// order are fixed.
std::string trace_csv_header(std::size_t num_pedestrians);

/// Writes the trace as CSV. Numbers use the shortest round-trip decimal
/// form, so identical traces serialize to identical bytes. solve_time_s is
/// written as 0 unless include_timings is set, keeping default output
/// reproducible across runs.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace,
                     std::size_t num_pedestrians, bool include_timings = false);
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace,
                     std::size_t num_pedestrians, bool include_timings = false);

nlohmann::json summary_json(const ScenarioSummary& summary);

}  // namespace trustnav
