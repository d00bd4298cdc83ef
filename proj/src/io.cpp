#include "east/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "east/errors.hpp"

namespace east::io {

namespace {
std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("io: cannot write file '" + path + "'");
    return out;
}
} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_trace_csv(const std::string& path, const planner::RunResult& r) {
    auto out = open_out(path);
    out << "iteration,east\n";
    out << "0," << format_double(r.trace.east_initial) << "\n";
    for (size_t i = 0; i < r.trace.iterations.size(); ++i)
        out << (i + 1) << "," << format_double(r.trace.iterations[i].east) << "\n";
}

void write_profiles_csv(const std::string& path, const planner::RunResult& r) {
    auto out = open_out(path);
    out << "slot,x,y,z,v_xy,v_z,p_a,p_r,l_u,l_d,r_u_fbl,r_d_fbl,r_u_inf,"
           "r_d_inf,b_s\n";
    for (size_t n = 0; n < r.profiles.size(); ++n) {
        const auto& p = r.profiles[n];
        out << (n + 1);
        for (double v : {p.q.x, p.q.y, p.q.z, p.v_xy, p.v_z, p.p_a, p.p_r, p.l_u,
                         p.l_d, p.r_u_fbl, p.r_d_fbl, p.r_u_inf, p.r_d_inf, p.b_s})
            out << "," << format_double(v);
        out << "\n";
    }
}

void write_result_json(const std::string& path, const std::string& scheme,
                       const planner::RunResult& r, double wall_time_s) {
    nlohmann::json j;
    j["scheme"] = scheme;
    j["status"] = "ok";
    j["east"] = r.east;
    j["east_initial"] = r.trace.east_initial;
    j["iterations"] = r.trace.iterations.size();
    j["wall_time_s"] = wall_time_s;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    auto out = open_out(path);
    out << "value,scheme,east,iterations,wall_time_s,status\n";
    for (const auto& r : rows) {
        out << format_double(r.value) << "," << r.scheme << ","
            << format_double(r.east) << "," << r.iterations << ","
            << format_double(r.wall_time_s) << "," << r.status << "\n";
    }
}

} // namespace east::io
