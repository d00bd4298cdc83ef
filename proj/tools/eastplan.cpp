// Batch front end: run one scenario, sweep a parameter, or verify the
// numerical machinery against its built-in oracles.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "east/errors.hpp"
#include "east/io.hpp"
#include "east/oracle.hpp"
#include "east/planner.hpp"
#include "east/radio.hpp"
#include "east/rng.hpp"
#include "east/sca_atoms.hpp"
#include "east/scenario.hpp"
#include "east/secrecy.hpp"
#include "east/solver.hpp"

namespace fs = std::filesystem;
using namespace east;

namespace {

// 0 success, 2 validation, 3 solver, 4 internal assertion
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInternal = 4;

int verbosity() {
    const char* v = std::getenv("EASTPLAN_VERBOSITY");
    return v ? std::atoi(v) : 0;
}

void log_note(const std::string& msg) {
    if (verbosity() > 0) std::cerr << "eastplan: " << msg << "\n";
}

void write_error_record(const std::string& out_dir, int code,
                        const std::string& kind, const std::string& message) {
    nlohmann::json j;
    j["status"] = "error";
    j["error"] = kind;
    j["exit_code"] = code;
    j["message"] = message;
    std::cerr << j.dump() << "\n";
    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        std::ofstream f(out_dir + "/error.json");
        if (f) f << j.dump(2) << "\n";
    }
}

planner::RunResult run_one(const Scenario& s, const std::string& scheme,
                           const planner::PlannerOptions& opts) {
    if (scheme == "jtrd") return planner::run_bsca(s, opts);
    if (scheme == "rdft") return planner::run_rdft(s, opts);
    if (scheme == "tdfr") return planner::run_tdfr(s, opts);
    if (scheme == "initial") return planner::run_initial(s, opts);
    throw ValidationError("unknown scheme '" + scheme +
                          "' (expected jtrd, rdft, tdfr or initial)");
}

int cmd_run(const std::string& scenario_file, const std::string& scheme,
            const std::string& out_dir, std::uint64_t seed_override,
            bool has_seed) {
    Scenario s = load_scenario(scenario_file);
    if (has_seed) s.rng_seed = seed_override;
    fs::create_directories(out_dir);

    log_note("running scheme " + scheme + " on " + scenario_file);
    auto t0 = std::chrono::steady_clock::now();
    planner::RunResult r = run_one(s, scheme, {});
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    io::write_trace_csv(out_dir + "/trace.csv", r);
    io::write_profiles_csv(out_dir + "/profiles.csv", r);
    io::write_result_json(out_dir + "/result.json", scheme, r, wall);
    log_note("final EAST " + io::format_double(r.east) + " bits/s");
    return 0;
}

struct SweepSpec {
    std::string key;
    std::vector<double> values;
    std::vector<std::string> schemes;
};

SweepSpec parse_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("sweep: cannot open file '" + path + "'");
    SweepSpec spec;
    std::string line;
    int lineno = 0;
    auto strip = [](std::string t) {
        size_t a = t.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return std::string();
        size_t b = t.find_last_not_of(" \t\r\n");
        return t.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = strip(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("sweep: line " + std::to_string(lineno) +
                             " is not 'key = value'");
        std::string key = strip(line.substr(0, eq));
        std::string val = strip(line.substr(eq + 1));
        if (key == "key") {
            spec.key = val;
        } else if (key == "values" || key == "schemes") {
            if (val.size() < 2 || val.front() != '[' || val.back() != ']')
                throw ParseError("sweep: '" + key + "' expects [a, b, ...]");
            std::stringstream ss(val.substr(1, val.size() - 2));
            std::string piece;
            while (std::getline(ss, piece, ',')) {
                piece = strip(piece);
                if (piece.empty()) continue;
                if (key == "values")
                    spec.values.push_back(std::strtod(piece.c_str(), nullptr));
                else
                    spec.schemes.push_back(piece);
            }
        } else {
            throw ParseError("sweep: unknown key '" + key + "'");
        }
    }
    if (spec.values.empty()) throw ValidationError("sweep: empty value list");
    if (spec.schemes.empty()) throw ValidationError("sweep: empty scheme list");
    static const std::vector<std::string> known = {
        "l_max", "eve_uncertainty", "mission_time", "eps_r", "eps_b", "eta_e"};
    if (std::find(known.begin(), known.end(), spec.key) == known.end())
        throw ValidationError("sweep: unsupported key '" + spec.key + "'");
    return spec;
}

Scenario apply_sweep_value(Scenario s, const std::string& key, double value) {
    if (key == "l_max") {
        if (value != std::floor(value) || value < 2)
            throw ValidationError("sweep: l_max values must be integers >= 2");
        s.l_max = static_cast<int>(value);
    } else if (key == "eve_uncertainty") {
        s.eve_uncertainty = value;
    } else if (key == "mission_time") {
        s.mission_time = value;
        double ratio = value / s.slot_duration;
        if (std::abs(ratio - std::round(ratio)) > 1e-9)
            throw ValidationError("sweep: mission_time must stay an integer "
                                  "multiple of slot_duration");
        s.n_slots = static_cast<int>(std::round(ratio));
    } else if (key == "eps_r") {
        s.eps_r = value;
    } else if (key == "eps_b") {
        s.eps_b = value;
    } else if (key == "eta_e") {
        s.eta_e = value;
    }
    auto violations = validate(s);
    if (!violations.empty())
        throw ValidationError("sweep cell invalid: " + violations[0]);
    return s;
}

int cmd_sweep(const std::string& scenario_file, const std::string& spec_file,
              const std::string& out_dir, int jobs) {
    Scenario base = load_scenario(scenario_file);
    SweepSpec spec = parse_sweep_spec(spec_file);
    fs::create_directories(out_dir);

    struct Cell {
        double value;
        std::string scheme;
    };
    std::vector<Cell> cells;
    for (double v : spec.values)
        for (const auto& sc : spec.schemes) cells.push_back({v, sc});

    std::vector<io::SweepRow> rows(cells.size());
    std::atomic<size_t> next{0};
    std::atomic<int> ok_count{0};
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& c = cells[i];
            io::SweepRow& row = rows[i];
            row.value = c.value;
            row.scheme = c.scheme;
            auto t0 = std::chrono::steady_clock::now();
            try {
                Scenario s = apply_sweep_value(base, spec.key, c.value);
                planner::RunResult r = run_one(s, c.scheme, {});
                row.east = r.east;
                row.iterations = static_cast<int>(r.trace.iterations.size());
                row.status = "ok";
                ok_count.fetch_add(1);
            } catch (const ValidationError&) {
                row.status = "validation_error";
            } catch (const SolverFailure&) {
                row.status = "solver_error";
            } catch (const std::exception&) {
                row.status = "error";
            }
            row.wall_time_s = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
            log_note("cell " + spec.key + "=" + io::format_double(c.value) +
                     " " + c.scheme + ": " + row.status);
        }
    };
    int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    io::write_sweep_csv(out_dir + "/sweep.csv", rows);
    return ok_count.load() > 0 ? 0 : kExitSolver;
}

struct VerifyTable {
    bool all_ok = true;
    void row(const std::string& name, bool ok, const std::string& detail) {
        std::printf("%-38s %s  %s\n", name.c_str(), ok ? "PASS" : "FAIL",
                    detail.c_str());
        all_ok = all_ok && ok;
    }
};

int cmd_verify(const std::string& scenario_file, std::uint64_t seed_override,
               bool has_seed) {
    Scenario s = load_scenario(scenario_file);
    if (has_seed) s.rng_seed = seed_override;
    VerifyTable table;

    { // q_inv inverts Q to 1e-10 over a probability grid
        double worst = 0.0;
        for (double p = 1e-6; p <= 0.5; p *= 1.5)
            worst = std::max(worst,
                             std::abs(radio::q_func(radio::q_inv(p)) - p));
        table.row("q_inv inversion", worst <= 1e-10,
                  "max |Q(q_inv(p)) - p| = " + io::format_double(worst));
    }
    { // tangent dominance of the concave templates
        int bad = 0;
        for (int i = 0; i < 2000; ++i) {
            double x0 = std::pow(10.0, -3.0 + 6.0 * rng::uniform01(s.rng_seed, 21, i));
            double x = std::pow(10.0, -3.0 + 6.0 * rng::uniform01(s.rng_seed, 22, i));
            auto t = sca::tangent_of_concave(sca::ConcaveFn::half_log_kx_2kx, x0, 1.7);
            if (t.at(x) < sca::a0(x, 1.7) - 1e-12) ++bad;
            auto ts = sca::tangent_of_concave(sca::ConcaveFn::sqrt_x, x0);
            if (ts.at(x) < std::sqrt(x) - 1e-12) ++bad;
        }
        table.row("tangent dominance", bad == 0,
                  std::to_string(bad) + " violations / 4000 samples");
    }
    { // f_lb global lower bound
        int bad = 0;
        for (int i = 0; i < 10000; ++i) {
            double x = std::pow(10.0, -3.0 + 6.0 * rng::uniform01(s.rng_seed, 23, i));
            double y = std::pow(10.0, -3.0 + 6.0 * rng::uniform01(s.rng_seed, 24, i));
            double x0 = std::pow(10.0, -3.0 + 6.0 * rng::uniform01(s.rng_seed, 25, i));
            double y0 = std::pow(10.0, -3.0 + 6.0 * rng::uniform01(s.rng_seed, 26, i));
            if (sca::f_lb(x, y, x0, y0) > 1.0 / (x * y) + 1e-12) ++bad;
        }
        table.row("f_lb lower bound", bad == 0,
                  std::to_string(bad) + " violations / 10000 samples");
    }
    { // solver micro-oracles
        bool ok = true;
        {
            sca::ConvexProgram p;
            auto x = p.add_var("x", 0.0, sca::kInf, 1.0);
            p.set_objective(x, 1.0);
            sca::AffineAtom a;
            a.rel = sca::Rel::le;
            a.expr.add(x, 1.0).add_const(-3.0);
            p.add_atom(std::move(a));
            auto rep = solver::solve(p);
            ok = ok && rep.status == solver::Status::optimal &&
                 std::abs(rep.objective - 3.0) <= 1e-6;
        }
        {
            sca::ConvexProgram p;
            auto x = p.add_var("x", 0.0, 1.0, 0.5);
            auto t = p.add_var("t", -sca::kInf, sca::kInf, 0.1);
            p.set_objective(t, 1.0);
            sca::LogAffineAtom a;
            a.logs.push_back({1.0, sca::AffineExpr(1.0).add(x, 1.0)});
            a.tail.add(t, -1.0);
            p.add_atom(std::move(a));
            auto rep = solver::solve(p);
            ok = ok && rep.status == solver::Status::optimal &&
                 std::abs(rep.objective - std::log(2.0)) <= 1e-5;
        }
        table.row("solver micro-oracles", ok, "LP corner and ln(1+x) optimum");
    }
    { // worst-case bound audit on the initial feasible configuration
        planner::DecisionVariables dv = planner::initial_feasible(s);
        oracle::BoundAudit audit =
            oracle::sampled_bound_audit(s, dv, 10000, s.rng_seed);
        bool exact = s.eve_uncertainty == 0.0;
        bool ok = exact ? std::abs(audit.worst_margin) <= 1e-12
                        : audit.worst_margin >= -1e-9;
        table.row("sampled bound audit", ok,
                  "worst margin = " + io::format_double(audit.worst_margin) +
                      (exact ? " (exact, Delta_e = 0)" : ""));
    }
    { // MC uplink rate dominates the closed-form bound
        planner::DecisionVariables dv = planner::initial_feasible(s);
        int n = s.n_slots / 2;
        auto est = secrecy::mc_uplink_rate(s, dv.q_r[n], dv.p_a[n], dv.l_u[n],
                                           20000, s.rng_seed);
        radio::SlotSnr snr = radio::slot_snrs(s, dv.q_r[n], dv.p_a[n], 0.0);
        double lb = secrecy::uplink_rate_lb(snr, dv.l_u[n], s.eps_r, s.eta_e);
        bool ok = lb <= est.mean + 3.0 * est.stderr_ + 1e-12;
        table.row("mc uplink dominance", ok,
                  "lb = " + io::format_double(lb) + ", mc = " +
                      io::format_double(est.mean) + " +- " +
                      io::format_double(est.stderr_));
    }
    return table.all_ok ? 0 : kExitInternal;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EAST planner for the UAV decode-and-forward short-packet relay"};
    app.require_subcommand(1);

    std::string scenario_file, out_dir = "out", scheme = "jtrd", spec_file;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int jobs = 1;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "override the scenario rng_seed")
            ->each([&](const std::string&) { has_seed = true; });
    };

    CLI::App* run = app.add_subcommand("run", "optimize one scenario");
    run->add_option("scenario", scenario_file, "scenario file")->required();
    run->add_option("--scheme", scheme, "jtrd, rdft, tdfr or initial");
    run->add_option("--out", out_dir, "output directory");
    add_seed(run);

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    sweep->add_option("scenario", scenario_file, "scenario file")->required();
    sweep->add_option("spec", spec_file, "sweep spec file")->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--jobs", jobs, "concurrent cells");
    add_seed(sweep);

    CLI::App* verify =
        app.add_subcommand("verify", "run bound audits and solver oracles");
    verify->add_option("scenario", scenario_file, "scenario file")->required();
    add_seed(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    // verify has no output directory; its error records go to stderr only
    const std::string record_dir = verify->parsed() ? "" : out_dir;
    try {
        if (run->parsed()) return cmd_run(scenario_file, scheme, out_dir, seed, has_seed);
        if (sweep->parsed()) return cmd_sweep(scenario_file, spec_file, out_dir, jobs);
        return cmd_verify(scenario_file, seed, has_seed);
    } catch (const ValidationError& e) {
        write_error_record(record_dir, kExitValidation, "validation", e.what());
        return kExitValidation;
    } catch (const ParseError& e) {
        write_error_record(record_dir, kExitValidation, "parse", e.what());
        return kExitValidation;
    } catch (const SolverFailure& e) {
        write_error_record(record_dir, kExitSolver, "solver", e.what());
        return kExitSolver;
    } catch (const std::exception& e) {
        write_error_record(record_dir, kExitInternal, "internal", e.what());
        return kExitInternal;
    }
}
