#include "east/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "east/errors.hpp"

namespace east {

namespace {

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& v, const std::string& key) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || trim(end)[0] != '\0' || !std::isfinite(x))
        throw ParseError("scenario: key '" + key + "' has a non-numeric value '" + v + "'");
    return x;
}

Vec3 parse_vec3(const std::string& v, const std::string& key) {
    std::string t = trim(v);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        throw ParseError("scenario: key '" + key + "' expects [x, y, z]");
    std::string inner = t.substr(1, t.size() - 2);
    std::vector<double> parts;
    std::stringstream ss(inner);
    std::string piece;
    while (std::getline(ss, piece, ','))
        parts.push_back(parse_number(trim(piece), key));
    if (parts.size() != 3)
        throw ParseError("scenario: key '" + key + "' expects exactly 3 components");
    return {parts[0], parts[1], parts[2]};
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// One quantity that may arrive with either a "_w" or a "_dbm" suffix.
void take_power(std::map<std::string, std::string>& kv, const std::string& base, double& out) {
    auto w = kv.find(base + "_w");
    auto d = kv.find(base + "_dbm");
    if (w != kv.end() && d != kv.end())
        throw ParseError("scenario: both '" + base + "_w' and '" + base +
                         "_dbm' given; use exactly one");
    if (w != kv.end()) {
        out = parse_number(w->second, w->first);
        kv.erase(w);
    } else if (d != kv.end()) {
        out = dbm_to_watts(parse_number(d->second, d->first));
        kv.erase(d);
    }
}

void take_scalar(std::map<std::string, std::string>& kv, const std::string& key, double& out) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    out = parse_number(it->second, key);
    kv.erase(it);
}

void take_vec3(std::map<std::string, std::string>& kv, const std::string& key, Vec3& out) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    out = parse_vec3(it->second, key);
    kv.erase(it);
}

} // namespace

Scenario default_scenario() { return Scenario{}; }

std::vector<std::string> validate(const Scenario& s) {
    std::vector<std::string> out;
    auto bad = [&out](const std::string& m) { out.push_back(m); };

    if (s.slot_duration <= 0.0)
        bad(fmt("slot_duration must be > 0 (got %g)", s.slot_duration));
    // A single-slot instance only makes sense when the endpoints coincide
    // (C1 pins both waypoints); anything else needs n_slots >= 2.
    if (s.n_slots < 1 || (s.n_slots == 1 && !(s.uav_start == s.uav_end)))
        bad(fmt("n_slots ≥ 2 required unless uav_start equals uav_end (got n_slots=%d)",
                s.n_slots));
    if (s.slot_duration > 0.0 &&
        std::abs(s.mission_time - s.n_slots * s.slot_duration) >
            1e-9 * std::max(1.0, s.mission_time))
        bad(fmt("mission_time must equal n_slots × slot_duration exactly "
                "(mission_time=%g, n_slots=%d, slot_duration=%g)",
                s.mission_time, s.n_slots, s.slot_duration));

    if (s.h_min > s.h_max) bad(fmt("h_min=%g exceeds h_max=%g", s.h_min, s.h_max));
    for (auto [name, q] : {std::pair<const char*, Vec3>{"uav_start", s.uav_start},
                           {"uav_end", s.uav_end}}) {
        if (q.z < s.h_min || q.z > s.h_max)
            bad(fmt("altitude bound violated: %s.z=%g outside [h_min=%g, h_max=%g]",
                    name, q.z, s.h_min, s.h_max));
    }

    // Reachability of the straight line under C2/C3 within n_slots steps.
    if (s.n_slots >= 2 && s.slot_duration > 0.0) {
        double steps = static_cast<double>(s.n_slots - 1);
        double need_xy = (s.uav_end - s.uav_start).norm_xy() / steps;
        double need_z = std::abs(s.uav_end.z - s.uav_start.z) / steps;
        if (need_xy > s.v_xy_max * s.slot_duration)
            bad(fmt("straight line from uav_start to uav_end unreachable: needs %g m/slot "
                    "horizontally, limit v_xy_max*slot_duration=%g",
                    need_xy, s.v_xy_max * s.slot_duration));
        if (need_z > s.v_z_max * s.slot_duration)
            bad(fmt("straight line from uav_start to uav_end unreachable: needs %g m/slot "
                    "vertically, limit v_z_max*slot_duration=%g",
                    need_z, s.v_z_max * s.slot_duration));
    }

    double d_ae = distance(s.alice_pos, s.eve_est_pos);
    double d_be = distance(s.bob_pos, s.eve_est_pos);
    if (s.eve_uncertainty < 0.0)
        bad(fmt("eve_uncertainty must be nonnegative (got %g)", s.eve_uncertainty));
    if (d_ae < s.eve_uncertainty)
        bad(fmt("Eve uncertainty exceeds Alice–Eve distance (‖alice_pos−eve_est_pos‖=%g "
                "< eve_uncertainty=%g)", d_ae, s.eve_uncertainty));
    if (d_be < s.eve_uncertainty)
        bad(fmt("Eve uncertainty exceeds Bob–Eve distance (‖bob_pos−eve_est_pos‖=%g "
                "< eve_uncertainty=%g)", d_be, s.eve_uncertainty));

    for (auto [name, v] : {std::pair<const char*, double>{"p_tot_alice", s.p_tot_alice},
                           {"p_tot_uav", s.p_tot_uav},
                           {"p_max_alice", s.p_max_alice},
                           {"p_max_uav", s.p_max_uav},
                           {"noise_r", s.noise_r},
                           {"noise_b", s.noise_b},
                           {"noise_e", s.noise_e},
                           {"beta0", s.beta0},
                           {"bandwidth_hz", s.bandwidth_hz}}) {
        if (!(v > 0.0)) bad(fmt("%s must be strictly positive (got %g)", name, v));
    }
    if (s.l_max < 2) bad(fmt("l_max ≥ 2 required (got %d)", s.l_max));
    if (!(s.alpha > 2.0 && s.alpha <= 4.0))
        bad(fmt("alpha must lie in (2, 4] (got %g)", s.alpha));
    for (auto [name, v] : {std::pair<const char*, double>{"eps_r", s.eps_r},
                           {"eps_b", s.eps_b},
                           {"eta_e", s.eta_e}}) {
        if (!(v > 0.0 && v < 0.5))
            bad(fmt("%s must lie in (0, 0.5) (got %g)", name, v));
    }
    if (!(s.epsilon_conv > 0.0))
        bad(fmt("epsilon_conv must be strictly positive (got %g)", s.epsilon_conv));
    if (s.v_xy_max <= 0.0 || s.v_z_max < 0.0)
        bad(fmt("speed limits must be positive (v_xy_max=%g, v_z_max=%g)",
                s.v_xy_max, s.v_z_max));
    return out;
}

Scenario parse_scenario(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(fmt("scenario: line %d is not 'key = value'", lineno));
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ParseError(fmt("scenario: line %d has an empty key or value", lineno));
        if (kv.count(key))
            throw ParseError("scenario: duplicate key '" + key + "'");
        kv[key] = val;
    }

    Scenario s = default_scenario();
    take_vec3(kv, "alice_pos", s.alice_pos);
    take_vec3(kv, "bob_pos", s.bob_pos);
    take_vec3(kv, "eve_est_pos", s.eve_est_pos);
    take_vec3(kv, "uav_start", s.uav_start);
    take_vec3(kv, "uav_end", s.uav_end);
    take_scalar(kv, "eve_uncertainty", s.eve_uncertainty);
    take_scalar(kv, "mission_time", s.mission_time);
    take_scalar(kv, "slot_duration", s.slot_duration);
    take_scalar(kv, "bandwidth_hz", s.bandwidth_hz);
    take_power(kv, "p_tot_alice", s.p_tot_alice);
    take_power(kv, "p_tot_uav", s.p_tot_uav);
    take_power(kv, "p_max_alice", s.p_max_alice);
    take_power(kv, "p_max_uav", s.p_max_uav);
    take_power(kv, "noise_r", s.noise_r);
    take_power(kv, "noise_b", s.noise_b);
    take_power(kv, "noise_e", s.noise_e);

    if (auto it = kv.find("l_max"); it != kv.end()) {
        double v = parse_number(it->second, "l_max");
        if (v != std::floor(v))
            throw ParseError("scenario: l_max must be an integer");
        s.l_max = static_cast<int>(v);
        kv.erase(it);
    }
    take_scalar(kv, "h_min", s.h_min);
    take_scalar(kv, "h_max", s.h_max);
    take_scalar(kv, "v_xy_max", s.v_xy_max);
    take_scalar(kv, "v_z_max", s.v_z_max);
    if (kv.count("beta0") && kv.count("beta0_db"))
        throw ParseError("scenario: both 'beta0' and 'beta0_db' given; use exactly one");
    take_scalar(kv, "beta0", s.beta0);
    if (auto it = kv.find("beta0_db"); it != kv.end()) {
        s.beta0 = db_to_linear(parse_number(it->second, "beta0_db"));
        kv.erase(it);
    }
    take_scalar(kv, "alpha", s.alpha);
    take_scalar(kv, "eps_r", s.eps_r);
    take_scalar(kv, "eps_b", s.eps_b);
    take_scalar(kv, "eta_e", s.eta_e);
    take_scalar(kv, "epsilon_conv", s.epsilon_conv);
    if (auto it = kv.find("rng_seed"); it != kv.end()) {
        s.rng_seed = static_cast<std::uint64_t>(
            std::strtoull(it->second.c_str(), nullptr, 10));
        kv.erase(it);
    }
    if (!kv.empty())
        throw ParseError("scenario: unknown key '" + kv.begin()->first + "'");

    // N is derived, never configured, so T = N * slot_duration stays exact.
    if (s.slot_duration <= 0.0)
        throw ValidationError("scenario: slot_duration must be > 0");
    double ratio = s.mission_time / s.slot_duration;
    double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw ValidationError(fmt(
            "scenario: mission_time=%g is not a positive integer multiple of "
            "slot_duration=%g", s.mission_time, s.slot_duration));
    s.n_slots = static_cast<int>(rounded);
    s.mission_time = s.n_slots * s.slot_duration;

    auto violations = validate(s);
    if (!violations.empty()) {
        std::string msg = "scenario validation failed:";
        for (auto& v : violations) msg += "\n  - " + v;
        throw ValidationError(msg);
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("scenario: cannot open file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    auto num = [](double v) { return fmt("%.17g", v); };
    auto vec = [&](Vec3 q) {
        return "[" + num(q.x) + ", " + num(q.y) + ", " + num(q.z) + "]";
    };
    out << "alice_pos = " << vec(s.alice_pos) << "\n"
        << "bob_pos = " << vec(s.bob_pos) << "\n"
        << "eve_est_pos = " << vec(s.eve_est_pos) << "\n"
        << "eve_uncertainty = " << num(s.eve_uncertainty) << "\n"
        << "uav_start = " << vec(s.uav_start) << "\n"
        << "uav_end = " << vec(s.uav_end) << "\n"
        << "mission_time = " << num(s.mission_time) << "\n"
        << "slot_duration = " << num(s.slot_duration) << "\n"
        << "bandwidth_hz = " << num(s.bandwidth_hz) << "\n"
        << "p_tot_alice_w = " << num(s.p_tot_alice) << "\n"
        << "p_tot_uav_w = " << num(s.p_tot_uav) << "\n"
        << "p_max_alice_w = " << num(s.p_max_alice) << "\n"
        << "p_max_uav_w = " << num(s.p_max_uav) << "\n"
        << "l_max = " << s.l_max << "\n"
        << "h_min = " << num(s.h_min) << "\n"
        << "h_max = " << num(s.h_max) << "\n"
        << "v_xy_max = " << num(s.v_xy_max) << "\n"
        << "v_z_max = " << num(s.v_z_max) << "\n"
        << "beta0 = " << num(s.beta0) << "\n"
        << "alpha = " << num(s.alpha) << "\n"
        << "noise_r_w = " << num(s.noise_r) << "\n"
        << "noise_b_w = " << num(s.noise_b) << "\n"
        << "noise_e_w = " << num(s.noise_e) << "\n"
        << "eps_r = " << num(s.eps_r) << "\n"
        << "eps_b = " << num(s.eps_b) << "\n"
        << "eta_e = " << num(s.eta_e) << "\n"
        << "epsilon_conv = " << num(s.epsilon_conv) << "\n"
        << "rng_seed = " << s.rng_seed << "\n";
    return out.str();
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("scenario: cannot write file '" + path + "'");
    out << serialize_scenario(s);
}

} // namespace east
