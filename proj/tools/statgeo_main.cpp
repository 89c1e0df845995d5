// statgeo: batch front-end for the stationary-spacetime geodesic toolkit.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 no geodesic found,
// 3 verification failure.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "statgeo/config.hpp"
#include "statgeo/report_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace statgeo;

namespace {

constexpr const char* kVersion = "1.0.0";

enum ExitCode { kOk = 0, kConfig = 1, kNoGeodesic = 2, kVerifyFailed = 3 };

struct Options {
    std::string config;
    std::string out = ".";
    std::string curve;
    std::optional<int> segments;
    std::optional<std::uint64_t> seed;
    bool deterministic = false;
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json envelope(const Options& opt, const std::string& command, const RunConfig& rc) {
    json doc = {{"tool", "statgeo"}, {"version", kVersion}, {"command", command},
                {"spacetime", rc.spacetime->label()}, {"dimension", rc.spacetime->dim()}};
    if (!opt.deterministic) doc["generated_at"] = utc_timestamp();
    return doc;
}

fs::path output_dir(const Options& opt) {
    fs::path dir = opt.out;
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& file, const json& doc) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
    out << doc.dump(2) << '\n';
}

template <class Writer>
void write_text(const fs::path& file, Writer&& writer) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
    writer(out);
}

RunConfig load(const Options& opt) {
    RunConfig rc = load_run_config(opt.config);
    if (opt.segments) {
        if (*opt.segments < 2) throw ConfigError("--n", "segment count must be >= 2");
        rc.solver.segments = *opt.segments;
    }
    if (opt.seed) rc.solver.seeds.rng_seed = *opt.seed;
    if (!opt.curve.empty()) rc.curve = fs::path(opt.curve);
    return rc;
}

// STATGEO_THREADS caps the number of concurrent multistart runs.
int thread_budget(int configured) {
    int threads = configured > 0 ? configured : omp_get_max_threads();
    if (const char* env = std::getenv("STATGEO_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1) throw ConfigError("STATGEO_THREADS", "expected a positive integer");
        threads = std::min<long>(threads, cap);
    }
    return std::max(1, threads);
}

json problem_json(const ProblemInstance& pi) {
    return {{"x_p", to_json(pi.x_p)}, {"t_p", pi.t_p},           {"x_q", to_json(pi.x_q)},
            {"t_q", pi.t_q},          {"windings", pi.windings}, {"dt", pi.dt()}};
}

CurveCsv read_curve(const RunConfig& rc) {
    if (!rc.curve) throw ConfigError("curve", "a curve CSV is required (--curve or config key 'curve')");
    std::ifstream in(*rc.curve);
    if (!in) throw ConfigError("curve", "cannot open '" + rc.curve->string() + "'");
    return read_curve_csv(in, rc.spacetime->base().coords());
}

// ---------------------------------------------------------------------------

int cmd_solve(const Options& opt) {
    RunConfig rc = load(opt);
    rc.solver.threads = thread_budget(rc.solver.threads);
    const ProblemInstance pi = rc.problem();
    const std::vector<SolveReport> reports = multistart(pi, rc.solver);

    int converged = 0;
    int timelike = 0;
    json runs = json::array();
    for (const auto& r : reports) {
        if (r.status == SolveStatus::Converged) {
            ++converged;
            if (r.value < 0.0) ++timelike;
        }
        runs.push_back(to_json(r));
    }

    json doc = envelope(opt, "solve", rc);
    doc["problem"] = problem_json(pi);
    doc["solver"] = {{"segments", rc.solver.segments},
                     {"gradient_tolerance", rc.solver.gradient_tolerance},
                     {"max_iterations", rc.solver.max_iterations},
                     {"rng_seed", rc.solver.seeds.rng_seed}};
    doc["distinct_converged"] = converged;
    doc["timelike_converged"] = timelike;
    doc["runs"] = runs;

    const fs::path dir = output_dir(opt);
    const SolveReport& lead = reports.front();
    write_text(dir / "trace.csv", [&](std::ostream& out) { write_trace_csv(out, lead.trace); });
    if (converged > 0) {
        const SpacetimePolyline z = time_reconstruction(pi, lead.curve);
        doc["best"] = {{"run", 0}, {"breakdown", to_json(reduced_action(pi, lead.curve))}};
        write_text(dir / "curve.csv", [&](std::ostream& out) { write_curve_csv(out, rc.spacetime->base().coords(), z); });
    } else {
        doc["best"] = nullptr;
    }
    write_json(dir / "solve_report.json", doc);

    std::cout << "solve: " << reports.size() << " report(s), " << converged << " distinct converged ("
              << timelike << " timelike)";
    if (converged == 0) std::cout << ", first status " << to_string(lead.status);
    std::cout << '\n';
    return converged > 0 ? kOk : kNoGeodesic;
}

int cmd_verify(const Options& opt) {
    const RunConfig rc = load(opt);
    const CurveCsv csv = read_curve(rc);
    if (csv.space.segments() < 2) throw ConfigError("curve", "verification needs at least three nodes");
    json doc = envelope(opt, "verify", rc);
    doc["curve"] = rc.curve->string();
    doc["segments"] = csv.space.segments();
    doc["lifted"] = !csv.has_time();
    int code = kOk;
    try {
        SpacetimePolyline z;
        if (csv.has_time()) {
            z.space = csv.space;
            z.time = csv.time;
        } else {
            z = time_reconstruction(rc.problem(), csv.space);
        }
        const VerificationReport report = verify_curve(*rc.spacetime, z, rc.verify);
        doc["report"] = to_json(report, rc.verify);
        write_text(output_dir(opt) / "causal.csv", [&](std::ostream& out) { write_causal_csv(out, report.causal); });
        code = report.passed ? kOk : kVerifyFailed;
        std::cout << "verify: residual " << report.max_residual << ", constraint drift " << report.drift.constraint_drift
                  << ", energy drift " << report.drift.energy_drift << " -> " << (report.passed ? "pass" : "FAIL")
                  << '\n';
    } catch (const DomainError& e) {
        doc["report"] = {{"passed", false}, {"error", e.what()}};
        code = kVerifyFailed;
        std::cout << "verify: curve leaves the domain (" << e.what() << ") -> FAIL\n";
    }
    write_json(output_dir(opt) / "verify_report.json", doc);
    return code;
}

int cmd_lightlike(const Options& opt) {
    const RunConfig rc = load(opt);
    const ProblemInstance pi = rc.problem();
    SpatialPolyline path;
    if (rc.curve) {
        path = read_curve(rc).space;
    } else {
        path = SpatialPolyline::straight(pi.x_p, pi.lifted_target(), rc.solver.segments);
    }
    const LightlikeArrival arrival = lightlike_arrival(pi, path);
    const double bound = arrival_upper_bound(pi, path);
    const CausalCheck causal = causal_curve_check(*rc.spacetime, arrival.curve);

    json doc = envelope(opt, "lightlike", rc);
    doc["problem"] = problem_json(pi);
    doc["path"] = rc.curve ? rc.curve->string() : std::string("straight seed");
    doc["segments"] = path.segments();
    doc["arrival_time"] = finite_or_null(arrival.arrival_time);
    doc["upper_bound"] = finite_or_null(bound);
    doc["causal_verdict"] = to_string(causal.verdict);

    const fs::path dir = output_dir(opt);
    write_text(dir / "lightlike_curve.csv",
               [&](std::ostream& out) { write_curve_csv(out, rc.spacetime->base().coords(), arrival.curve); });
    write_json(dir / "lightlike.json", doc);
    std::cout << "lightlike: T = " << arrival.arrival_time << ", upper bound = " << bound << '\n';
    return kOk;
}

int cmd_diagnose(const Options& opt) {
    const RunConfig rc = load(opt);
    const HyperbolicityDiagnostics diag = diagnose(*rc.spacetime, rc.diagnose.growth, rc.diagnose.probe);
    json doc = envelope(opt, "diagnose", rc);
    doc["sampling"] = {{"r_min", rc.diagnose.growth.r_min},
                       {"r_max", rc.diagnose.growth.r_max},
                       {"samples", rc.diagnose.growth.samples},
                       {"slack", rc.diagnose.growth.slack},
                       {"first_shell", rc.diagnose.probe.first_shell},
                       {"max_length", rc.diagnose.probe.max_length},
                       {"cap", rc.diagnose.probe.cap}};
    doc["diagnostics"] = to_json(diag);
    if (!diag.static_intent) doc["warning"] = "shift field is not identically zero; the completeness probe assumes a static metric";
    write_json(output_dir(opt) / "diagnostics.json", doc);
    std::cout << "diagnose: beta exponent " << diag.beta_exponent << " (" << (diag.quad_ok ? "quad_ok" : "quad FAIL")
              << "), |delta| exponent " << diag.delta_exponent << " (" << (diag.linear_ok ? "linear_ok" : "linear FAIL")
              << ")\n";
    return kOk;
}

int cmd_list() {
    json out = json::array();
    for (const auto& e : registry_entries()) {
        json params = json::array();
        for (const auto& p : e.params) {
            params.push_back({{"name", p.name}, {"type", p.type}, {"default", p.default_value}, {"description", p.description}});
        }
        out.push_back({{"name", e.name}, {"description", e.description}, {"params", params}});
    }
    std::cout << out.dump(2) << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"statgeo: geodesics of standard stationary spacetimes"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Options opt;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_option("--n", opt.segments, "number of curve segments (overrides solver.segments)");
        sub->add_option("--seed", opt.seed, "multistart RNG seed (overrides solver.seeds.rng_seed)");
        sub->add_flag("--deterministic", opt.deterministic, "omit timestamps so reports are byte-identical");
    };

    CLI::App* solve = app.add_subcommand("solve", "multistart search for geodesics between the endpoints");
    add_common(solve);
    CLI::App* verify = app.add_subcommand("verify", "check a curve CSV against the geodesic equations");
    add_common(verify);
    verify->add_option("--curve", opt.curve, "curve CSV (s,x1..xd[,t])");
    CLI::App* lightlike = app.add_subcommand("lightlike", "arrival time of the future lightlike lift of a path");
    add_common(lightlike);
    lightlike->add_option("--curve", opt.curve, "spatial path CSV; defaults to the straight seed");
    CLI::App* diag = app.add_subcommand("diagnose", "growth and conformal-completeness diagnostics");
    add_common(diag);
    CLI::App* list = app.add_subcommand("list-spacetimes", "print the built-in spacetimes as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        if (*solve) return cmd_solve(opt);
        if (*verify) return cmd_verify(opt);
        if (*lightlike) return cmd_lightlike(opt);
        if (*diag) return cmd_diagnose(opt);
        if (*list) return cmd_list();
    } catch (const NoFeasibleSeed& e) {
        std::cerr << "statgeo: " << e.what() << '\n';
        return kNoGeodesic;
    } catch (const ConfigError& e) {
        std::cerr << "statgeo: config error: " << e.what() << '\n';
        return kConfig;
    } catch (const InvariantViolation& e) {
        std::cerr << "statgeo: invariant violation: " << e.what() << '\n';
        return kConfig;
    } catch (const DegenerateCurve& e) {
        std::cerr << "statgeo: degenerate curve: " << e.what() << '\n';
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "statgeo: domain error: " << e.what() << '\n';
        return kConfig;
    } catch (const Error& e) {
        std::cerr << "statgeo: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "statgeo: " << e.what() << '\n';
        return kConfig;
    }
    return kConfig;
}
