#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "statgeo/functional.hpp"
#include "statgeo/solver.hpp"
#include "statgeo/verify.hpp"

namespace statgeo {

struct EndpointConfig {
    Vec x_p;
    Vec x_q;
    double t_p = 0.0;
    double t_q = 0.0;
    std::vector<int> windings;
};

struct DiagnoseConfig {
    GrowthSampling growth;
    CompletenessSpec probe;
};

/// Parsed run configuration. Every section except `spacetime` is optional;
/// `endpoints` is required by the commands that solve or lift curves.
struct RunConfig {
    std::shared_ptr<const StationarySpacetime> spacetime;
    std::string spacetime_source;  // registry name, or "inline"
    std::optional<EndpointConfig> endpoints;
    SolveConfig solver;
    VerifyThresholds verify;
    DiagnoseConfig diagnose;
    std::optional<std::filesystem::path> curve;  // resolved against the config's directory

    /// Throws ConfigError("endpoints", ...) when the section is missing.
    ProblemInstance problem() const;
};

/// Builds a RunConfig from parsed JSON; errors are ConfigError with a
/// dotted schema path (e.g. "solver.seeds.rng_seed").
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& file);

}  // namespace statgeo
