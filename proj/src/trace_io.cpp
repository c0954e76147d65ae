#include "trustnav/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace trustnav {

namespace {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) {
    throw std::runtime_error("failed to format double");
  }
  return std::string(buf, ptr);
}

}  // namespace

std::string trace_csv_header(std::size_t num_pedestrians) {
  std::string header = "step,time_s,ego_x,ego_y,u_x,u_y,ref_x,ref_y";
  for (std::size_t j = 0; j < num_pedestrians; ++j) {
    const std::string p = "ped" + std::to_string(j);
    header += "," + p + "_x," + p + "_y," + p + "_dist," + p + "_trust," + p + "_gamma," + p + "_h";
  }
  header += ",min_cbf_residual,solver_status,solve_time_s";
  return header;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace,
                     std::size_t num_pedestrians, bool include_timings) {
  out << trace_csv_header(num_pedestrians) << "\n";
  for (const TraceRow& row : trace) {
    if (row.pedestrians.size() != num_pedestrians) {
      throw std::invalid_argument("trace row pedestrian count does not match header");
    }
    out << row.step << ',' << format_double(row.time) << ',' << format_double(row.ego_position.x())
        << ',' << format_double(row.ego_position.y()) << ',' << format_double(row.control.x())
        << ',' << format_double(row.control.y()) << ',' << format_double(row.reference.x()) << ','
        << format_double(row.reference.y());
    for (const PedTraceEntry& ped : row.pedestrians) {
      out << ',' << format_double(ped.position.x()) << ',' << format_double(ped.position.y())
          << ',' << format_double(ped.distance) << ',' << format_double(ped.trust) << ','
          << format_double(ped.gamma) << ',' << format_double(ped.barrier);
    }
    out << ',' << format_double(row.min_cbf_residual) << ',' << to_string(row.status) << ','
        << format_double(include_timings ? row.solve_time : 0.0) << "\n";
  }
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace,
                     std::size_t num_pedestrians, bool include_timings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open trace file for writing: " + path.string());
  }
  write_trace_csv(out, trace, num_pedestrians, include_timings);
  if (!out) {
    throw std::runtime_error("failed while writing trace file: " + path.string());
  }
}

nlohmann::json summary_json(const ScenarioSummary& summary) {
  nlohmann::json doc;
  doc["min_dist_per_ped"] = summary.min_dist_per_ped;
  doc["steps_to_goal"] = summary.steps_to_goal;
  doc["goal_reached"] = summary.goal_reached;
  doc["violations"] = summary.violations;
  doc["fallback_steps"] = summary.fallback_steps;
  doc["total_solve_time_s"] = summary.total_solve_time_s;
  return doc;
}

}  // namespace trustnav
