#pragma once

#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "statgeo/functional.hpp"
#include "statgeo/solver.hpp"
#include "statgeo/verify.hpp"

namespace statgeo {

// JSON views of the report types. Non-finite numbers become null, so every
// document stays valid JSON.

nlohmann::json to_json(const FunctionalBreakdown& b);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const ConservationDrift& d);
nlohmann::json to_json(const CausalCheck& c);
nlohmann::json to_json(const VerificationReport& r, const VerifyThresholds& thresholds);
nlohmann::json to_json(const HyperbolicityDiagnostics& d);
nlohmann::json to_json(const Vec& v);

nlohmann::json finite_or_null(double v);

/// Trace CSV with columns iteration,J,gradnorm,h1,boundary_dist.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

/// Per-segment causal classes: segment,character,orientation.
void write_causal_csv(std::ostream& out, const CausalCheck& c);

}  // namespace statgeo
