#pragma once

#include <string>
#include <vector>

#include "east/planner.hpp"

namespace east::io {

/// %.12g rendering used by every CSV writer (byte-deterministic).
std::string format_double(double v);

void write_trace_csv(const std::string& path, const planner::RunResult& r);
void write_profiles_csv(const std::string& path, const planner::RunResult& r);
void write_result_json(const std::string& path, const std::string& scheme,
                       const planner::RunResult& r, double wall_time_s);

struct SweepRow {
    double value = 0.0;
    std::string scheme;
    double east = 0.0;
    int iterations = 0;
    double wall_time_s = 0.0;
    std::string status; // "ok" or an error class
};
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

} // namespace east::io
