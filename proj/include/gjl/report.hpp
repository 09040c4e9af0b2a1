#pragma once

#include "gjl/counterexample.hpp"
#include "gjl/jet_propagation.hpp"
#include "gjl/pde_crosscheck.hpp"
#include "gjl/second_jet.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace gjl {

using Json = nlohmann::json;

/// One side of a potential spec: trig terms, a named family, or raw jets.
struct PotentialInput {
  std::optional<TorusPotential> trig;
  JetData jets;
  /// Normalized form written back into report configs.
  Json resolved;

  bool is_trig() const { return trig.has_value(); }
  bool is_zero() const;
  /// Jets up to `order`; raw jets are passed through unchanged.
  JetData jets_to(int order) const;
};

struct ProblemSpec {
  PotentialInput phi0;
  PotentialInput phi1;
  Json resolved;
};

/// Parses {"phi0": P, "phi1": P} with P one of
///   {"terms": [{"coeff": c, "sin_x_power": p, "sin_y_power": q}, ...]}
///   {"jets": {"2": [...], "4": [...], ...}}
///   {"family": "h", "n": n} or {"family": "h_tilde", "n": n, "kappa": k, "chi": c}.
/// A missing side is zero. Throws InvalidArgument on any schema violation.
ProblemSpec parse_problem_spec(const Json& spec);
ProblemSpec parse_problem_spec(const std::string& text);

Json second_jet_report(const SecondJetBoundary& boundary, int nodes);
Json propagate_report(const ProblemSpec& spec, int max_order, int nodes);
Json counterexample_report(int n, int nodes);
/// Also fills `slices_csv` when non-null.
Json pde_report(const ProblemSpec& spec, const GeodesicConfig& config, std::string* slices_csv = nullptr);

/// Recomputes a report from its embedded "config" object.
Json rerun_report(const Json& config);

/// Serializes with the library's float policy (shortest exact round trip).
std::string dump_report(const Json& report);

}  // namespace gjl
